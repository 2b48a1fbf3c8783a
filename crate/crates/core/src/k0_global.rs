//! Grothendieck groups over ℤ: genus descriptors, the free basis of S-objects
//! and p-atomic genera, the kernel of the genus map, and a purely symbolic
//! variant driven by declared local data.
//!
//! A genus is recorded as its rational class together with the local
//! coordinates at every prime where it differs from the S-object of the same
//! rational type. Only non-maximal primes may carry such overrides.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::algebra::{hom_lattice, iso_local, IsoVerdict, LatticeModule, LocalIsoOptions};
use crate::arith::prime_divisors;
use crate::genus::{relevant_primes, GenusError};
use crate::k0_local::{describe, K0Error, LocalK0};
use crate::linalg::{snf, IntMatrix};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GlobalK0Error {
    #[error("no S-object candidates for rational type {0}")]
    NoCandidates(usize),
    #[error("{module} differs from its S-object at {prime}, which is not a declared non-maximal prime")]
    OverrideAtMaximal { module: String, prime: u64 },
    #[error("{module}: local comparison at {prime} was inconclusive")]
    Inconclusive { module: String, prime: u64 },
    #[error("{0} is not a sum of the registered rational types")]
    RationalType(String),
    #[error("unknown name {0}")]
    Unknown(String),
    #[error("hypothesis fails: {0}")]
    Hypothesis(String),
    #[error("at {prime}: {source}")]
    Local { prime: u64, source: K0Error },
    #[error(transparent)]
    Genus(#[from] GenusError),
    #[error(transparent)]
    Algebra(#[from] crate::algebra::AlgebraError),
}

/// `G(X)`: rational multiplicities and the nonzero local atom coordinates.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct GenusDescriptor {
    pub rational: Vec<u64>,
    pub overrides: BTreeMap<u64, BTreeMap<String, i64>>,
}

/// Free part by basis name plus torsion invariants.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct K0Presentation {
    pub free_basis: Vec<String>,
    #[serde(serialize_with = "decimal_strings")]
    pub torsion: Vec<BigInt>,
}

fn decimal_strings<S: serde::Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    s.collect_seq(v.iter().map(|x| x.to_string()))
}

impl K0Presentation {
    pub fn free_rank(&self) -> usize {
        self.free_basis.len()
    }
}

impl std::fmt::Display for K0Presentation {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let mut parts: Vec<String> = self.torsion.iter().map(|d| format!("Z/{d}")).collect();
        match self.free_rank() {
            0 => {}
            1 => parts.push("Z".into()),
            r => parts.push(format!("Z^{r}")),
        }
        if parts.is_empty() {
            parts.push("0".into());
        }
        write!(f, "{}", parts.join(" + "))
    }
}

/// Invariant factors of a product of finite abelian groups, units dropped.
pub fn ker_g_group(components: &[Vec<BigInt>]) -> Vec<BigInt> {
    let all: Vec<BigInt> = components.iter().flatten().filter(|d| !d.abs().is_one() && !d.is_zero()).cloned().collect();
    if all.is_empty() {
        return Vec::new();
    }
    let d = snf(&IntMatrix::diag(&all));
    d.invariants().into_iter().map(|x| x.abs()).filter(|x| !x.is_one()).collect()
}

/// The S-object representing a rational type: the candidate with the smallest
/// canonical carrier string, so the choice does not depend on input order.
pub fn choose_s_object(candidates: &[LatticeModule]) -> Option<&LatticeModule> {
    candidates.iter().min_by_key(|m| m.carrier().canonical_string())
}

pub struct GlobalK0 {
    pub s_objects: Vec<LatticeModule>,
    pub local: BTreeMap<u64, LocalK0>,
    pub class_groups: Vec<Vec<BigInt>>,
    end_ranks: Vec<usize>,
    opts: LocalIsoOptions,
}

impl GlobalK0 {
    pub fn build(
        s_candidates: &[Vec<LatticeModule>],
        local_candidates: &BTreeMap<u64, Vec<LatticeModule>>,
        class_groups: Vec<Vec<BigInt>>,
        opts: &LocalIsoOptions,
    ) -> Result<Self, GlobalK0Error> {
        let mut s_objects = Vec::new();
        for (w, c) in s_candidates.iter().enumerate() {
            s_objects.push(choose_s_object(c).ok_or(GlobalK0Error::NoCandidates(w))?.clone());
        }
        let mut end_ranks = Vec::new();
        for s in &s_objects {
            end_ranks.push(hom_lattice(s, s)?.rank());
        }
        let mut local = BTreeMap::new();
        for (&p, cands) in local_candidates {
            let ls = s_objects.iter().map(|s| s.localize(p)).collect::<Result<Vec<_>, _>>()?;
            let lc = cands.iter().map(|c| c.localize(p)).collect::<Result<Vec<_>, _>>()?;
            let k = LocalK0::build(ls, &lc, p, opts).map_err(|e| GlobalK0Error::Local { prime: p, source: e })?;
            local.insert(p, k);
        }
        Ok(GlobalK0 { s_objects, local, class_groups, end_ranks, opts: *opts })
    }

    pub fn basis_names(&self) -> Vec<String> {
        let mut names: Vec<String> = self.s_objects.iter().map(|s| s.name().to_string()).collect();
        for (p, k) in &self.local {
            names.extend(k.atoms.iter().map(|a| format!("{}@{p}", a.module.name())));
        }
        names
    }

    pub fn rank(&self) -> usize {
        self.s_objects.len() + self.local.values().map(|k| k.atoms.len()).sum::<usize>()
    }

    /// `m_p`: isomorphism classes of completed indecomposables met at `p`.
    pub fn local_class_count(&self, p: u64) -> Option<usize> {
        self.local.get(&p).map(|k| k.registry.classes.len() + k.atoms.len())
    }

    pub fn presentation(&self) -> K0Presentation {
        K0Presentation { free_basis: self.basis_names(), torsion: ker_g_group(&self.class_groups) }
    }

    pub fn rational_class(&self, x: &LatticeModule) -> Result<Vec<u64>, GlobalK0Error> {
        let mut out = Vec::new();
        let mut dim = 0usize;
        for (s, &e) in self.s_objects.iter().zip(&self.end_ranks) {
            let h = hom_lattice(x, s)?.rank();
            if h % e != 0 {
                return Err(GlobalK0Error::RationalType(x.name().into()));
            }
            out.push((h / e) as u64);
            dim += (h / e) * s.carrier().rank();
        }
        if dim != x.rank() {
            return Err(GlobalK0Error::RationalType(x.name().into()));
        }
        Ok(out)
    }

    /// `S(QX)`, or `None` for the zero module.
    pub fn s_of(&self, rational: &[u64]) -> Result<Option<LatticeModule>, GlobalK0Error> {
        let mut parts = Vec::new();
        for (s, &n) in self.s_objects.iter().zip(rational) {
            for _ in 0..n {
                parts.push(s.clone());
            }
        }
        if parts.is_empty() {
            return Ok(None);
        }
        Ok(Some(LatticeModule::direct_sum("S(QX)", &parts)?))
    }

    pub fn genus_descriptor(&self, x: &LatticeModule) -> Result<GenusDescriptor, GlobalK0Error> {
        let rational = self.rational_class(x)?;
        let mut overrides = BTreeMap::new();
        for (&p, k) in &self.local {
            let c = k.coords(&x.localize(p)?).map_err(|e| GlobalK0Error::Local { prime: p, source: e })?;
            if c.atoms.iter().any(|&a| a != 0) {
                let names: Vec<String> = k.atoms.iter().map(|a| a.module.name().to_string()).collect();
                overrides.insert(p, describe(&names, &c.atoms));
            }
        }
        if let Some(s) = self.s_of(&rational)? {
            for p in relevant_primes(&s, x, self.opts.seed)?.unwrap_or_default() {
                if self.local.contains_key(&p) {
                    continue;
                }
                match iso_local(&s, x, p, &self.opts)? {
                    IsoVerdict::Iso(_) => {}
                    IsoVerdict::NonIso(_) => {
                        return Err(GlobalK0Error::OverrideAtMaximal { module: x.name().into(), prime: p })
                    }
                    IsoVerdict::Inconclusive(_) => {
                        return Err(GlobalK0Error::Inconclusive { module: x.name().into(), prime: p })
                    }
                }
            }
        }
        Ok(GenusDescriptor { rational, overrides })
    }

    /// Coordinates of `[G(X)]` in the basis of [`GlobalK0::basis_names`].
    pub fn coords(&self, x: &LatticeModule) -> Result<Vec<i64>, GlobalK0Error> {
        let rational = self.rational_class(x)?;
        let mut s: Vec<i64> = rational.iter().map(|&r| r as i64).collect();
        let mut atoms = Vec::new();
        for (&p, k) in &self.local {
            let c = k.coords(&x.localize(p)?).map_err(|e| GlobalK0Error::Local { prime: p, source: e })?;
            for (coef, a) in c.atoms.iter().zip(&k.atoms) {
                for (sw, &r) in s.iter_mut().zip(&a.rational) {
                    *sw -= coef * r as i64;
                }
            }
            atoms.extend(c.atoms);
        }
        s.extend(atoms);
        Ok(s)
    }
}

// Symbolic categories: objects are given by their rational class and their
// local atoms at finitely many primes, as in stable homotopy where the
// lattices themselves are not available.

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolicAtom {
    pub label: String,
    pub rational: BTreeMap<String, u64>,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct SymbolicObject {
    pub name: String,
    pub rational: BTreeMap<String, u64>,
    /// Local atom labels at each prime; absent primes are of S-type.
    #[serde(default)]
    pub local: BTreeMap<u64, Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
pub struct SymbolicGenus {
    pub rational: Vec<u64>,
    pub local: BTreeMap<u64, BTreeMap<String, u64>>,
}

#[derive(Clone, Debug, Serialize)]
pub struct SymbolicSplit {
    pub primes: Vec<u64>,
    pub parts: Vec<SymbolicGenus>,
    /// Declared objects realizing each part, if any.
    pub names: Vec<Option<String>>,
}

#[derive(Clone, Debug)]
pub struct SymbolicCategory {
    pub spheres: Vec<String>,
    pub local_atoms: BTreeMap<u64, Vec<SymbolicAtom>>,
    pub objects: Vec<SymbolicObject>,
}

impl SymbolicCategory {
    pub fn new(
        spheres: Vec<String>,
        local_atoms: BTreeMap<u64, Vec<SymbolicAtom>>,
        objects: Vec<SymbolicObject>,
    ) -> Result<Self, GlobalK0Error> {
        let cat = SymbolicCategory { spheres, local_atoms, objects };
        for a in cat.local_atoms.values().flatten() {
            cat.rational_vec(&a.rational)?;
        }
        for o in &cat.objects {
            cat.rational_vec(&o.rational)?;
            for (p, labels) in &o.local {
                for l in labels {
                    cat.atom(*p, l)?;
                }
            }
        }
        Ok(cat)
    }

    fn rational_vec(&self, r: &BTreeMap<String, u64>) -> Result<Vec<u64>, GlobalK0Error> {
        for k in r.keys() {
            if !self.spheres.contains(k) {
                return Err(GlobalK0Error::Unknown(k.clone()));
            }
        }
        Ok(self.spheres.iter().map(|s| r.get(s).copied().unwrap_or(0)).collect())
    }

    fn atom(&self, p: u64, label: &str) -> Result<&SymbolicAtom, GlobalK0Error> {
        self.local_atoms
            .get(&p)
            .and_then(|v| v.iter().find(|a| a.label == label))
            .ok_or_else(|| GlobalK0Error::Unknown(format!("{label} at {p}")))
    }

    pub fn object(&self, name: &str) -> Result<&SymbolicObject, GlobalK0Error> {
        self.objects.iter().find(|o| o.name == name).ok_or_else(|| GlobalK0Error::Unknown(name.into()))
    }

    /// Genus of a named object or sphere.
    pub fn genus(&self, name: &str) -> Result<SymbolicGenus, GlobalK0Error> {
        if let Some(w) = self.spheres.iter().position(|s| s == name) {
            let mut rational = vec![0; self.spheres.len()];
            rational[w] = 1;
            return Ok(SymbolicGenus { rational, local: BTreeMap::new() });
        }
        let o = self.object(name)?;
        let mut local = BTreeMap::new();
        for (p, labels) in &o.local {
            let mut m: BTreeMap<String, u64> = BTreeMap::new();
            for l in labels {
                *m.entry(l.clone()).or_default() += 1;
            }
            if !m.is_empty() {
                local.insert(*p, m);
            }
        }
        Ok(SymbolicGenus { rational: self.rational_vec(&o.rational)?, local })
    }

    pub fn genus_of_sum(&self, names: &[&str]) -> Result<SymbolicGenus, GlobalK0Error> {
        let mut g = SymbolicGenus { rational: vec![0; self.spheres.len()], local: BTreeMap::new() };
        for n in names {
            g = add_genus(&g, &self.genus(n)?);
        }
        Ok(g)
    }

    /// Spheres followed by one p-atomic genus per local atom.
    pub fn basis(&self) -> Result<Vec<SymbolicGenus>, GlobalK0Error> {
        let mut out: Vec<SymbolicGenus> = self.spheres.iter().map(|s| self.genus(s)).collect::<Result<_, _>>()?;
        for (p, atoms) in &self.local_atoms {
            for a in atoms {
                let mut local = BTreeMap::new();
                local.insert(*p, BTreeMap::from([(a.label.clone(), 1)]));
                out.push(SymbolicGenus { rational: self.rational_vec(&a.rational)?, local });
            }
        }
        Ok(out)
    }

    /// A declared name for a genus: a sphere, or the first object realizing it.
    pub fn name_of(&self, g: &SymbolicGenus) -> Result<Option<String>, GlobalK0Error> {
        for s in &self.spheres {
            if &self.genus(s)? == g {
                return Ok(Some(s.clone()));
            }
        }
        for o in &self.objects {
            if &self.genus(&o.name)? == g {
                return Ok(Some(o.name.clone()));
            }
        }
        Ok(None)
    }

    pub fn basis_names(&self) -> Result<Vec<String>, GlobalK0Error> {
        let basis = self.basis()?;
        let mut names = Vec::new();
        for (i, g) in basis.iter().enumerate() {
            let fallback = || {
                let (p, m) = g.local.iter().next().expect("p-atomic genus");
                format!("{}@{p}", m.keys().next().expect("one label"))
            };
            names.push(if i < self.spheres.len() { self.spheres[i].clone() } else { self.name_of(g)?.unwrap_or_else(fallback) });
        }
        Ok(names)
    }

    pub fn coords(&self, g: &SymbolicGenus) -> Result<Vec<i64>, GlobalK0Error> {
        let mut s: Vec<i64> = g.rational.iter().map(|&r| r as i64).collect();
        let mut atoms = Vec::new();
        for (p, list) in &self.local_atoms {
            for a in list {
                let k = g.local.get(p).and_then(|m| m.get(&a.label)).copied().unwrap_or(0) as i64;
                for (sw, r) in s.iter_mut().zip(self.rational_vec(&a.rational)?) {
                    *sw -= k * r as i64;
                }
                atoms.push(k);
            }
        }
        s.extend(atoms);
        Ok(s)
    }

    /// Genus splitting along `α: A → B` with `βα = a` and `αβ = a`. Since `α`
    /// is invertible away from `a`, the local classes of `A` and `B` must
    /// agree at every prime not dividing `a`.
    pub fn split(&self, source: &str, target: &[&str], a: &BigInt) -> Result<SymbolicSplit, GlobalK0Error> {
        if a.is_zero() {
            return Err(GlobalK0Error::Hypothesis("a must be nonzero".into()));
        }
        let ga = self.genus(source)?;
        let gb = self.genus_of_sum(target)?;
        if ga.rational != gb.rational {
            return Err(GlobalK0Error::Hypothesis(format!("{source} and the target differ rationally")));
        }
        let primes = prime_divisors(a);
        let all: std::collections::BTreeSet<u64> = ga.local.keys().chain(gb.local.keys()).copied().collect();
        for q in all {
            if !primes.contains(&q) && ga.local.get(&q) != gb.local.get(&q) {
                return Err(GlobalK0Error::Hypothesis(format!("{source} and the target differ at {q}, which does not divide a")));
            }
        }
        if primes.is_empty() {
            return Ok(SymbolicSplit { primes, names: vec![self.name_of(&ga)?], parts: vec![ga] });
        }
        let mut parts = Vec::new();
        for &p in &primes {
            let mut local = gb.local.clone();
            local.retain(|q, _| *q != p);
            if let Some(m) = ga.local.get(&p) {
                local.insert(p, m.clone());
            }
            parts.push(SymbolicGenus { rational: ga.rational.clone(), local });
        }
        let names = parts.iter().map(|g| self.name_of(g)).collect::<Result<_, _>>()?;
        Ok(SymbolicSplit { primes, parts, names })
    }

    /// Pairs of declared objects whose genus equality disagrees with the
    /// declared isomorphisms `A ⊕ B₀ ≅ A' ⊕ B₀`.
    pub fn dk_mismatches(&self, declared: &[(String, String)]) -> Result<Vec<(String, String)>, GlobalK0Error> {
        let mut bad = Vec::new();
        for (i, x) in self.objects.iter().enumerate() {
            for y in &self.objects[i + 1..] {
                let same = self.genus(&x.name)? == self.genus(&y.name)?;
                let decl = declared.iter().any(|(a, b)| (a == &x.name && b == &y.name) || (a == &y.name && b == &x.name));
                if same != decl {
                    bad.push((x.name.clone(), y.name.clone()));
                }
            }
        }
        Ok(bad)
    }

    pub fn presentation(&self) -> Result<K0Presentation, GlobalK0Error> {
        Ok(K0Presentation { free_basis: self.basis_names()?, torsion: Vec::new() })
    }
}

fn add_genus(a: &SymbolicGenus, b: &SymbolicGenus) -> SymbolicGenus {
    let rational = a.rational.iter().zip(&b.rational).map(|(x, y)| x + y).collect();
    let mut local = a.local.clone();
    for (p, m) in &b.local {
        let e = local.entry(*p).or_default();
        for (l, k) in m {
            *e.entry(l.clone()).or_default() += k;
        }
    }
    SymbolicGenus { rational, local }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kernel_invariants_combine() {
        let g = ker_g_group(&[vec![BigInt::from(2)], vec![BigInt::from(3)], vec![BigInt::one()]]);
        assert_eq!(g, vec![BigInt::from(6)]);
        assert!(ker_g_group(&[]).is_empty());
        let p = K0Presentation { free_basis: vec!["a".into(), "b".into()], torsion: vec![BigInt::from(2)] };
        assert_eq!(p.to_string(), "Z/2 + Z^2");
    }

    fn toy() -> SymbolicCategory {
        let r = BTreeMap::from([("S".to_string(), 1)]);
        let atoms = BTreeMap::from([
            (2, vec![SymbolicAtom { label: "x".into(), rational: r.clone() }]),
            (3, vec![SymbolicAtom { label: "y".into(), rational: r.clone() }]),
        ]);
        let obj = |n: &str, loc: &[(u64, &str)]| SymbolicObject {
            name: n.into(),
            rational: r.clone(),
            local: loc.iter().map(|(p, l)| (*p, vec![l.to_string()])).collect(),
        };
        let objects = vec![obj("A", &[(2, "x"), (3, "y")]), obj("X", &[(2, "x")]), obj("Y", &[(3, "y")])];
        SymbolicCategory::new(vec!["S".into()], atoms, objects).unwrap()
    }

    #[test]
    fn symbolic_split_and_coords() {
        let c = toy();
        let s = c.split("A", &["S"], &BigInt::from(6)).unwrap();
        assert_eq!(s.names, vec![Some("X".to_string()), Some("Y".to_string())]);
        assert_eq!(c.basis_names().unwrap(), vec!["S", "X", "Y"]);
        assert_eq!(c.coords(&c.genus("A").unwrap()).unwrap(), vec![-1, 1, 1]);
        // G(X ⊕ Y) = G(A ⊕ S)
        assert_eq!(c.genus_of_sum(&["X", "Y"]).unwrap(), c.genus_of_sum(&["A", "S"]).unwrap());
        assert!(c.split("A", &["S"], &BigInt::from(2)).is_err());
    }
}
