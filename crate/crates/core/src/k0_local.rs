//! Grothendieck group of lattices over a ℤ₍p₎-order satisfying the
//! S-condition: multiplicities, defects, cores, atomic objects and the free
//! basis of atomic objects and S-objects.
//!
//! A completed object is classified summand by summand. A summand isomorphic
//! to a summand of some `Ŝ_W` is of S-type; anything else must be the core of
//! a registered atomic object. Rational multiplicities are always computed over
//! ℚ (from Hom ranks), so no p-adic rank is ever needed.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use serde::Serialize;

use crate::algebra::{
    decompose_local, hom_lattice, iso_local, summands_isomorphic, AlgebraError, IsoVerdict, LatticeModule,
    LocalIsoOptions, LocalSummand,
};
use crate::linalg::{snf, IntMatrix};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum K0Error {
    #[error("mu(U) must be positive")]
    MissingMu,
    #[error("{0} is an S-object")]
    IsSObject(String),
    #[error("{0} is decomposable")]
    Decomposable(String),
    #[error("{module}: completed summand of rank {rank} matches no registered atom core")]
    Unregistered { module: String, rank: usize },
    #[error("S-object {0} has a completed summand that also occurs in another S-object")]
    SharedSClass(String),
    #[error("candidate {0} is not atomic: {1}")]
    NotAtomic(String, String),
    #[error("inconsistent multiplicities for {0}")]
    Inconsistent(String),
    #[error("isomorphism check for {0} did not produce a witness: {1}")]
    NoWitness(String, String),
    #[error("instance data incomplete: {0}")]
    Incomplete(String),
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
}

/// Smallest `d ≥ 0` with `μ(U) | μ(U,V) + d`.
pub fn delta(mu_u: u64, mu_uv: u64) -> Result<u64, K0Error> {
    if mu_u == 0 {
        return Err(K0Error::MissingMu);
    }
    Ok((mu_u - mu_uv % mu_u) % mu_u)
}

/// An indecomposable completed class `U` occurring in `Ŝ_W`.
#[derive(Clone, Debug)]
pub struct SClass {
    pub label: String,
    /// Index of the rational indecomposable `W`, i.e. of the S-object.
    pub w: usize,
    pub mu: u64,
    pub representative: LocalSummand,
}

/// The chosen S-objects `𝖲(W)` and the completed classes they contain.
#[derive(Clone, Debug)]
pub struct SRegistry {
    pub prime: u64,
    pub s_objects: Vec<LatticeModule>,
    pub classes: Vec<SClass>,
    end_dims: Vec<usize>,
}

impl SRegistry {
    pub fn build(s_objects: Vec<LatticeModule>, prime: u64, opts: &LocalIsoOptions) -> Result<Self, K0Error> {
        let mut classes: Vec<SClass> = Vec::new();
        let mut end_dims = Vec::new();
        for (w, s) in s_objects.iter().enumerate() {
            end_dims.push(hom_lattice(s, s)?.rank());
            let d = decompose_local(s, opts.precision, opts.seed)?;
            for (i, (rep, mult)) in d.class_representatives().into_iter().enumerate() {
                for c in &classes {
                    if summands_isomorphic(&c.representative, rep)? {
                        return Err(K0Error::SharedSClass(s.name().to_string()));
                    }
                }
                classes.push(SClass {
                    label: format!("{}#{}", s.name(), i + 1),
                    w,
                    mu: mult as u64,
                    representative: rep.clone(),
                });
            }
        }
        Ok(SRegistry { prime, s_objects, classes, end_dims })
    }

    /// Multiplicity of `QS_W` in `QX`, from `dim Hom(QX, QS_W) / dim End(QS_W)`.
    pub fn rational_multiplicity(&self, x: &LatticeModule, w: usize) -> Result<u64, K0Error> {
        let h = hom_lattice(x, &self.s_objects[w])?.rank();
        let e = self.end_dims[w];
        if e == 0 || h % e != 0 {
            return Err(K0Error::Inconsistent(x.name().to_string()));
        }
        Ok((h / e) as u64)
    }

    pub fn rational_class(&self, x: &LatticeModule) -> Result<Vec<u64>, K0Error> {
        (0..self.s_objects.len()).map(|w| self.rational_multiplicity(x, w)).collect()
    }

    fn s_class_of(&self, s: &LocalSummand) -> Result<Option<usize>, K0Error> {
        for (i, c) in self.classes.iter().enumerate() {
            if summands_isomorphic(&c.representative, s)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    /// `μ(U, QX̂) = mult(W_U, QX) · μ(U)`.
    pub fn mu_of(&self, x: &LatticeModule, u: usize) -> Result<u64, K0Error> {
        let c = &self.classes[u];
        Ok(self.rational_multiplicity(x, c.w)? * c.mu)
    }
}

/// How one completed object splits: counts of S-type classes and the cores.
#[derive(Clone, Debug)]
struct Profile {
    s_counts: Vec<u64>,
    cores: Vec<LocalSummand>,
}

fn profile(reg: &SRegistry, x: &LatticeModule, opts: &LocalIsoOptions) -> Result<Profile, K0Error> {
    let d = decompose_local(x, opts.precision, opts.seed)?;
    let mut s_counts = vec![0u64; reg.classes.len()];
    let mut cores = Vec::new();
    for s in &d.summands {
        match reg.s_class_of(s)? {
            Some(i) => s_counts[i] += 1,
            None => cores.push(s.clone()),
        }
    }
    Ok(Profile { s_counts, cores })
}

/// A registered atomic object with its core and padding data.
#[derive(Clone, Debug)]
pub struct AtomicObject {
    pub module: LatticeModule,
    pub core: LocalSummand,
    /// `μ(U, QC)` for each S-class `U`.
    pub core_mu: Vec<u64>,
    /// Literal defects `δ(U, QC)`.
    pub delta: Vec<u64>,
    /// S-type padding actually present in `Â`.
    pub padding: Vec<u64>,
    pub rational: Vec<u64>,
}

/// A candidate that was not admitted as a new atom.
#[derive(Clone, Debug, Serialize)]
pub struct Rejection {
    pub name: String,
    pub reason: String,
}

#[derive(Clone, Debug, Serialize)]
pub struct MultiplicityTable {
    pub classes: Vec<String>,
    pub mu: Vec<u64>,
    /// Object name and `μ(U, V)` per class.
    pub rows: Vec<(String, Vec<u64>)>,
    /// Atom name and `δ(U, Q co(A))` per class.
    pub defects: Vec<(String, Vec<u64>)>,
}

/// Local K₀ data: registry, atoms, and the basis `𝔸 ∪ 𝕊`.
#[derive(Clone, Debug)]
pub struct LocalK0 {
    pub registry: SRegistry,
    pub atoms: Vec<AtomicObject>,
    pub rejected: Vec<Rejection>,
    opts: LocalIsoOptions,
}

/// Coordinates of `[X]` in the basis atoms first, then S-objects.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct K0Coords {
    pub atoms: Vec<i64>,
    pub s: Vec<i64>,
}

impl K0Coords {
    pub fn to_vec(&self) -> Vec<i64> {
        self.atoms.iter().chain(&self.s).copied().collect()
    }

    pub fn add(&self, o: &K0Coords) -> K0Coords {
        K0Coords {
            atoms: self.atoms.iter().zip(&o.atoms).map(|(a, b)| a + b).collect(),
            s: self.s.iter().zip(&o.s).map(|(a, b)| a + b).collect(),
        }
    }
}

/// Decomposition `⊕ A_i ≅ B ⊕ (⊕ S_j)` of an indecomposable non-S object.
#[derive(Clone, Debug)]
pub struct CoreAndAtoms {
    pub atoms: Vec<usize>,
    pub s_part: Vec<usize>,
    /// Isomorphism `B ⊕ (⊕ S_j) → ⊕ A_i` in lattice coordinates, invertible over ℤ₍p₎.
    pub witness: IntMatrix,
}

impl LocalK0 {
    /// Builds the basis from S-objects and atom candidates. Candidates that are
    /// S-objects or repeat an earlier core are recorded as rejections; a
    /// candidate that is not atomic is an error.
    pub fn build(
        s_objects: Vec<LatticeModule>,
        candidates: &[LatticeModule],
        prime: u64,
        opts: &LocalIsoOptions,
    ) -> Result<Self, K0Error> {
        let registry = SRegistry::build(s_objects, prime, opts)?;
        let mut atoms: Vec<AtomicObject> = Vec::new();
        let mut rejected = Vec::new();
        'cand: for a in candidates {
            let prof = profile(&registry, a, opts)?;
            if prof.cores.is_empty() {
                rejected.push(Rejection { name: a.name().into(), reason: "completion is of S-type".into() });
                continue;
            }
            if prof.cores.len() > 1 {
                return Err(K0Error::NotAtomic(a.name().into(), format!("{} cores", prof.cores.len())));
            }
            let core = prof.cores[0].clone();
            for b in &atoms {
                if summands_isomorphic(&b.core, &core)? {
                    rejected.push(Rejection { name: a.name().into(), reason: format!("same core as {}", b.module.name()) });
                    continue 'cand;
                }
            }
            let rational = registry.rational_class(a)?;
            let mut core_mu = Vec::new();
            let mut deltas = Vec::new();
            for (u, c) in registry.classes.iter().enumerate() {
                let total = rational[c.w] * c.mu;
                let cu = total
                    .checked_sub(prof.s_counts[u])
                    .ok_or_else(|| K0Error::Inconsistent(a.name().to_string()))?;
                core_mu.push(cu);
                deltas.push(delta(c.mu, cu)?);
            }
            // Minimal padding making the rational type a completion: t_W·μ(U) − μ(U, QC).
            for (w, &t) in rational.iter().enumerate() {
                let need = registry
                    .classes
                    .iter()
                    .enumerate()
                    .filter(|(_, c)| c.w == w)
                    .map(|(u, c)| core_mu[u].div_ceil(c.mu))
                    .max()
                    .unwrap_or(0);
                if need != t {
                    return Err(K0Error::NotAtomic(
                        a.name().into(),
                        format!("rational multiplicity {t} of {} exceeds the minimal {need}", registry.s_objects[w].name()),
                    ));
                }
            }
            atoms.push(AtomicObject {
                module: a.clone(),
                core,
                core_mu,
                delta: deltas,
                padding: prof.s_counts.clone(),
                rational,
            });
        }
        Ok(LocalK0 { registry, atoms, rejected, opts: *opts })
    }

    pub fn prime(&self) -> u64 {
        self.registry.prime
    }

    pub fn basis_names(&self) -> Vec<String> {
        self.atoms
            .iter()
            .map(|a| a.module.name().to_string())
            .chain(self.registry.s_objects.iter().map(|s| s.name().to_string()))
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.atoms.len() + self.registry.s_objects.len()
    }

    pub fn multiplicity_table(&self, objects: &[LatticeModule]) -> Result<MultiplicityTable, K0Error> {
        let reg = &self.registry;
        let mut rows = Vec::new();
        for x in objects {
            let v: Result<Vec<u64>, K0Error> = (0..reg.classes.len()).map(|u| reg.mu_of(x, u)).collect();
            rows.push((x.name().to_string(), v?));
        }
        Ok(MultiplicityTable {
            classes: reg.classes.iter().map(|c| c.label.clone()).collect(),
            mu: reg.classes.iter().map(|c| c.mu).collect(),
            rows,
            defects: self.atoms.iter().map(|a| (a.module.name().to_string(), a.delta.clone())).collect(),
        })
    }

    fn atom_of_core(&self, s: &LocalSummand) -> Result<Option<usize>, K0Error> {
        for (i, a) in self.atoms.iter().enumerate() {
            if summands_isomorphic(&a.core, s)? {
                return Ok(Some(i));
            }
        }
        Ok(None)
    }

    /// Coordinates of `[X]`, checked against the completed multiplicities.
    pub fn coords(&self, x: &LatticeModule) -> Result<K0Coords, K0Error> {
        let reg = &self.registry;
        let prof = profile(reg, x, &self.opts)?;
        let mut atoms = vec![0i64; self.atoms.len()];
        for c in &prof.cores {
            let i = self
                .atom_of_core(c)?
                .ok_or_else(|| K0Error::Unregistered { module: x.name().to_string(), rank: c.rank() })?;
            atoms[i] += 1;
        }
        let rational = reg.rational_class(x)?;
        let mut s = Vec::with_capacity(reg.s_objects.len());
        for (w, &m) in rational.iter().enumerate() {
            let used: i64 = atoms.iter().zip(&self.atoms).map(|(&k, a)| k * a.rational[w] as i64).sum();
            s.push(m as i64 - used);
        }
        for (u, c) in reg.classes.iter().enumerate() {
            let expected: i64 =
                atoms.iter().zip(&self.atoms).map(|(&k, a)| k * a.padding[u] as i64).sum::<i64>() + s[c.w] * c.mu as i64;
            if expected != prof.s_counts[u] as i64 {
                return Err(K0Error::Inconsistent(x.name().to_string()));
            }
        }
        Ok(K0Coords { atoms, s })
    }

    /// `X` is indecomposable iff no proper nonempty set of its completed
    /// summands has the rational type of a completed rational object.
    pub fn is_indecomposable(&self, x: &LatticeModule) -> Result<bool, K0Error> {
        let reg = &self.registry;
        let prof = profile(reg, x, &self.opts)?;
        let mut vectors: Vec<Vec<u64>> = Vec::new();
        for (u, &n) in prof.s_counts.iter().enumerate() {
            for _ in 0..n {
                let mut v = vec![0; reg.classes.len()];
                v[u] = 1;
                vectors.push(v);
            }
        }
        for c in &prof.cores {
            let i = self
                .atom_of_core(c)?
                .ok_or_else(|| K0Error::Unregistered { module: x.name().to_string(), rank: c.rank() })?;
            vectors.push(self.atoms[i].core_mu.clone());
        }
        let n = vectors.len();
        if n > 24 {
            return Err(K0Error::Incomplete(format!("{} completed summands are too many to test", n)));
        }
        for mask in 1u32..(1u32 << n) - 1 {
            let mut sum = vec![0u64; reg.classes.len()];
            for (i, v) in vectors.iter().enumerate() {
                if mask & (1 << i) != 0 {
                    for (s, x) in sum.iter_mut().zip(v) {
                        *s += x;
                    }
                }
            }
            if self.is_completed_rational(&sum) {
                return Ok(false);
            }
        }
        Ok(n > 0)
    }

    fn is_completed_rational(&self, v: &[u64]) -> bool {
        let reg = &self.registry;
        (0..reg.s_objects.len()).all(|w| {
            let mut t: Option<u64> = None;
            reg.classes.iter().enumerate().filter(|(_, c)| c.w == w).all(|(u, c)| {
                if v[u] % c.mu != 0 {
                    return false;
                }
                let q = v[u] / c.mu;
                *t.get_or_insert(q) == q
            })
        })
    }

    fn s_object_index(&self, b: &LatticeModule) -> Result<Option<usize>, K0Error> {
        for (w, s) in self.registry.s_objects.iter().enumerate() {
            if b.rank() == s.rank() && iso_local(b, s, self.prime(), &self.opts)?.is_iso() {
                return Ok(Some(w));
            }
        }
        Ok(None)
    }

    pub fn core_and_atoms(&self, b: &LatticeModule) -> Result<CoreAndAtoms, K0Error> {
        if self.s_object_index(b)?.is_some() {
            return Err(K0Error::IsSObject(b.name().to_string()));
        }
        if !self.is_indecomposable(b)? {
            return Err(K0Error::Decomposable(b.name().to_string()));
        }
        let c = self.coords(b)?;
        let mut atoms = Vec::new();
        for (i, &k) in c.atoms.iter().enumerate() {
            for _ in 0..k {
                atoms.push(i);
            }
        }
        let mut s_part = Vec::new();
        for (w, &k) in c.s.iter().enumerate() {
            if k > 0 {
                return Err(K0Error::Inconsistent(b.name().to_string()));
            }
            for _ in 0..(-k) {
                s_part.push(w);
            }
        }
        let mut left_parts = vec![b.clone()];
        left_parts.extend(s_part.iter().map(|&w| self.registry.s_objects[w].clone()));
        let right_parts: Vec<LatticeModule> = atoms.iter().map(|&i| self.atoms[i].module.clone()).collect();
        let left = LatticeModule::direct_sum("left", &left_parts)?;
        let right = LatticeModule::direct_sum("right", &right_parts)?;
        match iso_local(&left, &right, self.prime(), &self.opts)? {
            IsoVerdict::Iso(w) => Ok(CoreAndAtoms { atoms, s_part, witness: w }),
            other => Err(K0Error::NoWitness(b.name().to_string(), format!("{other:?}"))),
        }
    }
}

/// Rank of the integer matrix whose rows are the given coordinate vectors.
pub fn coordinate_rank(rows: &[Vec<i64>]) -> usize {
    if rows.is_empty() {
        return 0;
    }
    let cols = rows[0].len();
    let data: Vec<BigInt> = rows.iter().flat_map(|r| r.iter().map(|&x| BigInt::from(x))).collect();
    let m = IntMatrix::new(rows.len(), cols, data).expect("rectangular coordinates");
    snf(&m).rank()
}

/// Names with nonzero coefficients, for reports.
pub fn describe(names: &[String], v: &[i64]) -> BTreeMap<String, i64> {
    names.iter().zip(v).filter(|(_, &x)| x != 0).map(|(n, &x)| (n.clone(), x)).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn delta_is_the_least_padding() {
        assert_eq!(delta(3, 4).unwrap(), 2);
        assert_eq!(delta(1, 17).unwrap(), 0);
        assert_eq!(delta(2, 0).unwrap(), 0);
        assert!(delta(0, 1).is_err());
        for mu in 1..6u64 {
            for m in 0..12u64 {
                let d = delta(mu, m).unwrap();
                assert_eq!((m + d) % mu, 0);
                assert!(d == 0 || (m + d - 1) % mu != 0);
            }
        }
    }

    #[test]
    fn coordinate_rank_counts_independent_rows() {
        assert_eq!(coordinate_rank(&[vec![1, 0], vec![0, 1], vec![1, 1]]), 2);
        assert_eq!(coordinate_rank(&[vec![2, 4]]), 1);
    }
}
