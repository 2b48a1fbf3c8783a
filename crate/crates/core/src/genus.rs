//! Local–global layer: genus comparison, splitting along primes, gluing of
//! objects and morphisms, global isomorphism search and Roiter addition.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::Serialize;

use crate::algebra::{
    hom_lattice, iso_local, rational_iso, rationally_isomorphic, AlgebraError, IsoVerdict, LatticeModule,
    LocalIsoOptions,
};
use crate::arith::{prime_divisors, valuation};
use crate::lattice::{
    lattice_intersect, lattice_sum, primary_components_at, BaseRing, Lattice, LatticeError, RatVec,
};
use crate::linalg::{lll_reduce, FpMatrix, IntMatrix, RatMatrix};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum GenusError {
    #[error("expected modules over Z, got {0}")]
    NotGlobal(BaseRing),
    #[error("hypothesis fails: {0}")]
    Hypothesis(String),
    #[error("the scalar a must be nonzero")]
    ZeroScalar,
    #[error("override at {0} is not rationally isomorphic to the reference")]
    RationalIncompatible(u64),
    #[error("override at {0} does not rationalize to the given morphism")]
    RationalMismatch(u64),
    #[error("the morphism does not map the source lattice into the target")]
    NotIntegral,
    #[error("genus member list incomplete: no member completes the sum")]
    MembersIncomplete,
    #[error(transparent)]
    Algebra(#[from] AlgebraError),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
}

impl From<crate::linalg::LinalgError> for GenusError {
    fn from(e: crate::linalg::LinalgError) -> Self {
        GenusError::Algebra(e.into())
    }
}

/// Three-valued outcome of a decision that may run out of search budget.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
pub enum Verdict {
    True,
    False,
    Inconclusive,
}

impl Verdict {
    pub fn from_bool(b: bool) -> Self {
        if b {
            Verdict::True
        } else {
            Verdict::False
        }
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct GenusReport {
    pub rational: bool,
    /// Verdict of the local comparison at each relevant prime.
    pub primes: Vec<(u64, String)>,
    pub verdict: Verdict,
}

fn verdict_label(v: &IsoVerdict) -> String {
    match v {
        IsoVerdict::Iso(_) => "iso".into(),
        IsoVerdict::NonIso(why) => format!("non-iso ({why})"),
        IsoVerdict::Inconclusive(why) => format!("inconclusive ({why})"),
    }
}

/// Primes at which a fixed rational isomorphism `A → B` fails to be invertible.
pub fn relevant_primes(a: &LatticeModule, b: &LatticeModule, seed: u64) -> Result<Option<Vec<u64>>, GenusError> {
    let Some(phi) = rational_iso(a, b, seed)? else { return Ok(None) };
    let d = phi.det()?;
    Ok(Some(if d.abs().is_one() { Vec::new() } else { prime_divisors(&d) }))
}

/// `G(A) = G(B)`: rational isomorphism plus local isomorphism at every prime
/// where a fixed rational isomorphism is not already integral-invertible.
pub fn genus_equal(a: &LatticeModule, b: &LatticeModule, opts: &LocalIsoOptions) -> Result<GenusReport, GenusError> {
    if !a.same_algebra(b) {
        return Err(AlgebraError::AlgebraMismatch.into());
    }
    if let BaseRing::LocalAt(p) = a.base() {
        let v = iso_local(a, b, p, opts)?;
        let verdict = match &v {
            IsoVerdict::Iso(_) => Verdict::True,
            IsoVerdict::NonIso(_) => Verdict::False,
            IsoVerdict::Inconclusive(_) => Verdict::Inconclusive,
        };
        return Ok(GenusReport { rational: verdict != Verdict::False, primes: vec![(p, verdict_label(&v))], verdict });
    }
    if a.rank() != b.rank() || !rationally_isomorphic(a, b)? {
        return Ok(GenusReport { rational: false, primes: Vec::new(), verdict: Verdict::False });
    }
    let primes = relevant_primes(a, b, opts.seed)?.unwrap_or_default();
    let mut report = GenusReport { rational: true, primes: Vec::new(), verdict: Verdict::True };
    for p in primes {
        let v = iso_local(a, b, p, opts)?;
        match &v {
            IsoVerdict::NonIso(_) => report.verdict = Verdict::False,
            IsoVerdict::Inconclusive(_) if report.verdict == Verdict::True => report.verdict = Verdict::Inconclusive,
            _ => {}
        }
        report.primes.push((p, verdict_label(&v)));
    }
    Ok(report)
}

/// A prime of the form 2⁶¹ − 1 for fast determinant filtering.
const FILTER_PRIME: u64 = (1 << 61) - 1;

const SEARCH_RADIUS: i64 = 2;

/// Isomorphism over ℤ. A definite binary determinant form is enumerated
/// completely; otherwise a bounded coefficient search can only prove `Iso`.
pub fn iso_global(a: &LatticeModule, b: &LatticeModule, opts: &LocalIsoOptions) -> Result<IsoVerdict, GenusError> {
    for m in [a, b] {
        if m.base() != BaseRing::GlobalZ {
            return Err(GenusError::NotGlobal(m.base()));
        }
    }
    if a.rank() != b.rank() {
        return Ok(IsoVerdict::NonIso(format!("rank {} vs {}", a.rank(), b.rank())));
    }
    let g = genus_equal(a, b, opts)?;
    match g.verdict {
        Verdict::False => return Ok(IsoVerdict::NonIso(format!("genera differ: {:?}", g.primes))),
        Verdict::Inconclusive => return Ok(IsoVerdict::Inconclusive("genus comparison inconclusive".into())),
        Verdict::True => {}
    }
    let hom = hom_lattice(a, b)?;
    if hom.rank() == 2 && a.rank() == 2 {
        if let Some(v) = binary_form_search(&hom.basis[0], &hom.basis[1])? {
            return Ok(v);
        }
    }
    // Short elements have small coefficients in a reduced basis.
    let flat: Vec<Vec<BigInt>> = hom.basis.iter().map(|m| m.entries().to_vec()).collect();
    let basis: Vec<IntMatrix> = lll_reduce(&flat)
        .into_iter()
        .map(|v| IntMatrix::new(b.rank(), a.rank(), v).expect("same shape"))
        .collect();
    let red: Vec<FpMatrix> = basis.iter().map(|h| FpMatrix::from_int(h, FILTER_PRIME)).collect();
    let h = hom.rank();
    for radius in 0..=SEARCH_RADIUS {
        let mut c = vec![-radius; h];
        loop {
            if c.iter().any(|x| x.abs() == radius) {
                if let Some(w) = unit_candidate(&basis, &red, &c)? {
                    return Ok(IsoVerdict::Iso(w));
                }
            }
            if !step(&mut c, radius) {
                break;
            }
        }
    }
    Ok(IsoVerdict::Inconclusive(format!("no unimodular element with coefficients up to {SEARCH_RADIUS}")))
}

fn step(c: &mut [i64], radius: i64) -> bool {
    for x in c.iter_mut() {
        if *x < radius {
            *x += 1;
            return true;
        }
        *x = -radius;
    }
    false
}

fn unit_candidate(basis: &[IntMatrix], red: &[FpMatrix], c: &[i64]) -> Result<Option<IntMatrix>, GenusError> {
    let Some(first) = red.first() else { return Ok(None) };
    let mut x = FpMatrix::zeros(FILTER_PRIME, first.rows(), first.cols());
    for (&ci, r) in c.iter().zip(red) {
        if ci != 0 {
            x = x.axpy(ci.rem_euclid(FILTER_PRIME as i64) as u64, r);
        }
    }
    let d = x.det();
    if d != 1 && d != FILTER_PRIME - 1 {
        return Ok(None);
    }
    let mut w = IntMatrix::zeros(first.rows(), first.cols());
    for (&ci, b) in c.iter().zip(basis) {
        if ci != 0 {
            w = w.add(&b.scale(&BigInt::from(ci)))?;
        }
    }
    Ok(w.det()?.abs().is_one().then_some(w))
}

/// `q(x, y) = det(x·H₁ + y·H₂)`; if definite, every solution of `q = ±1` is found.
fn binary_form_search(h1: &IntMatrix, h2: &IntMatrix) -> Result<Option<IsoVerdict>, GenusError> {
    let q = |x: i64, y: i64| -> Result<BigInt, GenusError> {
        Ok(h1.scale(&BigInt::from(x)).add(&h2.scale(&BigInt::from(y)))?.det()?)
    };
    let qa = q(1, 0)?;
    let qc = q(0, 1)?;
    let qb = q(1, 1)? - &qa - &qc;
    let disc = &qb * &qb - BigInt::from(4) * &qa * &qc;
    if !disc.is_negative() {
        return Ok(None);
    }
    // For |q| = 1: 4a·q = (2a x + b y)² − disc·y², so y² ≤ 4|a|/|disc|, and symmetrically for x.
    let nd = (-&disc).to_f64().unwrap_or(f64::INFINITY);
    let ybound = (4.0 * qa.abs().to_f64().unwrap_or(0.0) / nd).sqrt().floor() as i64;
    let xbound = (4.0 * qc.abs().to_f64().unwrap_or(0.0) / nd).sqrt().floor() as i64;
    for x in -xbound..=xbound {
        for y in -ybound..=ybound {
            if q(x, y)?.abs().is_one() {
                let w = h1.scale(&BigInt::from(x)).add(&h2.scale(&BigInt::from(y)))?;
                return Ok(Some(IsoVerdict::Iso(w)));
            }
        }
    }
    Ok(Some(IsoVerdict::NonIso(format!("definite form {qa}x² + {qb}xy + {qc}y² does not represent ±1"))))
}

/// Parts `A_p` of the splitting `⊕ A_p ≅ A ⊕ (r−1)·B` along the primes of `a`.
#[derive(Clone, Debug)]
pub struct SplitResult {
    pub primes: Vec<u64>,
    pub parts: Vec<LatticeModule>,
    /// Matrix of the isomorphism from the concatenated part bases to
    /// `α(A) ⊕ (r−1)·B`, in lattice coordinates; unimodular.
    pub witness: IntMatrix,
}

/// Splits along the primes of `a` given `α: A → B`, `β: B → A` with
/// `βα = a·1_A` and `αβ = a·1_B` (lattice coordinates).
pub fn split_by_primes(
    a_mod: &LatticeModule,
    b_mod: &LatticeModule,
    a: &BigInt,
    alpha: &IntMatrix,
    beta: &IntMatrix,
) -> Result<SplitResult, GenusError> {
    if a.is_zero() {
        return Err(GenusError::ZeroScalar);
    }
    let ba = beta.mul(alpha).map_err(|_| GenusError::Hypothesis("shapes of α and β".into()))?;
    let ab = alpha.mul(beta).map_err(|_| GenusError::Hypothesis("shapes of α and β".into()))?;
    if ba != IntMatrix::identity(a_mod.rank()).scale(a) || ab != IntMatrix::identity(b_mod.rank()).scale(a) {
        return Err(GenusError::Hypothesis("βα = a·1 and αβ = a·1".into()));
    }
    check_hom(a_mod, b_mod, alpha, "α")?;
    check_hom(b_mod, a_mod, beta, "β")?;
    let primes = if a.abs().is_one() { Vec::new() } else { prime_divisors(a) };
    let image = b_mod.carrier().image_of_coords(alpha);
    if primes.is_empty() {
        return Ok(SplitResult { primes, parts: vec![a_mod.clone()], witness: IntMatrix::identity(a_mod.rank()) });
    }
    let pd = primary_components_at(b_mod.carrier(), &image, &primes)?;
    let mut parts = Vec::new();
    for (&p, lat) in &pd.components {
        let m = LatticeModule::new(
            format!("{}[{p}]", a_mod.name()),
            b_mod.algebra().clone(),
            lat.clone(),
            b_mod.ambient_action().to_vec(),
        )?;
        parts.push(m);
    }
    Ok(SplitResult { primes: pd.primes(), parts, witness: pd.witness })
}

fn check_hom(m: &LatticeModule, n: &LatticeModule, f: &IntMatrix, name: &str) -> Result<(), GenusError> {
    let fr = f.to_rat();
    if f.rows() != n.rank() || f.cols() != m.rank() {
        return Err(GenusError::Hypothesis(format!("{name} has the wrong shape")));
    }
    for (x, y) in m.action().iter().zip(n.action()) {
        if y.mul(&fr)? != fr.mul(x)? {
            return Err(GenusError::Hypothesis(format!("{name} is not a module homomorphism")));
        }
    }
    Ok(())
}

/// Reference module with prescribed localizations at finitely many primes.
#[derive(Clone, Debug)]
pub struct LocalSpec {
    pub reference: LatticeModule,
    pub overrides: BTreeMap<u64, LatticeModule>,
}

/// The module `M` with `M_p ≅ X_p` for each override `p ↦ X` and `M_q = B_q` elsewhere.
///
/// Each override is moved into `QB` (directly if it lives in the same
/// representation, else by a rational isomorphism) as a lattice `L`. With
/// `d·L ⊆ B` and `d·B ⊆ L`, `d = pᵃ·u`, the lattice `(L ∩ p⁻ᵃB) + pᵃB` agrees
/// with `L` at `p` and with `B` elsewhere; `M` is the intersection of these.
pub fn glue_object(spec: &LocalSpec, seed: u64) -> Result<LatticeModule, GenusError> {
    let b = &spec.reference;
    if let BaseRing::LocalAt(q) = b.base() {
        if let Some(&p) = spec.overrides.keys().find(|&&p| p != q) {
            return Err(GenusError::Hypothesis(format!("override at {p} over {}", b.base())));
        }
    }
    let mut m = b.carrier().clone();
    for (&p, x) in &spec.overrides {
        let l = transported(x, b, seed).ok_or(GenusError::RationalIncompatible(p))??;
        let d = mutual_index(&l, b.carrier())?;
        let a = valuation(&d, p);
        let pa = BigRational::from_integer(num_traits::pow(BigInt::from(p), a as usize));
        let local = lattice_sum(&lattice_intersect(&l, &b.carrier().scaled(&pa.recip()))?, &b.carrier().scaled(&pa))?;
        m = lattice_intersect(&m, &local)?;
    }
    let name = if spec.overrides.is_empty() { b.name().to_string() } else { format!("glue({})", b.name()) };
    Ok(LatticeModule::new(name, b.algebra().clone(), m, b.ambient_action().to_vec())?)
}

/// The carrier of `x` inside the representation space of `b`.
fn transported(x: &LatticeModule, b: &LatticeModule, seed: u64) -> Option<Result<Lattice, GenusError>> {
    if x.ambient_action() == b.ambient_action() {
        return Some(Ok(x.carrier().clone()));
    }
    let phi = match rational_iso(x, b, seed) {
        Ok(Some(phi)) => phi,
        Ok(None) => return None,
        Err(e) => return Some(Err(e.into())),
    };
    Some(Ok(b.carrier().image_of_coords(&phi)))
}

/// A positive integer `d` with `d·L ⊆ B` and `d·B ⊆ L`.
fn mutual_index(l: &Lattice, b: &Lattice) -> Result<BigInt, GenusError> {
    let c1 = b.coords_of(l).ok_or(GenusError::Hypothesis("lattices of different rank".into()))?;
    let c2 = l.coords_of(b).ok_or(GenusError::Hypothesis("lattices of different rank".into()))?;
    let d1 = c1.common_denominator();
    let d2 = c2.common_denominator();
    Ok(d1.lcm(&d2))
}

/// The unique morphism `β: M → N` agreeing with `α` away from the overrides
/// and with the override at each listed prime; `Qβ_p = Qα` forces `β = α`.
pub fn glue_morphism(
    source: &LatticeModule,
    target: &LatticeModule,
    alpha: &RatMatrix,
    overrides: &BTreeMap<u64, RatMatrix>,
) -> Result<IntMatrix, GenusError> {
    for (&p, beta) in overrides {
        if beta != alpha {
            return Err(GenusError::RationalMismatch(p));
        }
    }
    let mut out = IntMatrix::zeros(target.rank(), source.rank());
    for (j, v) in source.carrier().basis_vectors().iter().enumerate() {
        let img: RatVec = alpha.mul_vec(v);
        let c = target.carrier().coords(&img).ok_or(GenusError::NotIntegral)?;
        for (i, x) in c.iter().enumerate() {
            if !x.is_integer() {
                return Err(GenusError::NotIntegral);
            }
            out[(i, j)] = x.to_integer();
        }
    }
    check_hom(source, target, &out, "β")?;
    Ok(out)
}

/// Roiter addition by search: the first member `B'` with `A ⊕ B ≅ A' ⊕ B'`.
pub fn roiter_complement(
    a: &LatticeModule,
    a_prime: &LatticeModule,
    b: &LatticeModule,
    members: &[LatticeModule],
    opts: &LocalIsoOptions,
) -> Result<(usize, IntMatrix), GenusError> {
    if genus_equal(a, a_prime, opts)?.verdict != Verdict::True {
        return Err(GenusError::Hypothesis("A' is not in the genus of A".into()));
    }
    let left = LatticeModule::direct_sum(format!("{}+{}", a.name(), b.name()), &[a.clone(), b.clone()])?;
    for (i, bp) in members.iter().enumerate() {
        if genus_equal(b, bp, opts)?.verdict != Verdict::True {
            continue;
        }
        let right = LatticeModule::direct_sum(format!("{}+{}", a_prime.name(), bp.name()), &[a_prime.clone(), bp.clone()])?;
        if let IsoVerdict::Iso(w) = iso_global(&left, &right, opts)? {
            return Ok((i, w));
        }
    }
    Err(GenusError::MembersIncomplete)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::algebra::FiniteAlgebra;
    use crate::lattice::rat;
    use std::sync::Arc;

    fn z_module(name: &str, gens: &[i64]) -> LatticeModule {
        let z = Arc::new(FiniteAlgebra::matrix_algebra(BaseRing::GlobalZ, 1));
        let lat = Lattice::from_vectors(BaseRing::GlobalZ, 1, &gens.iter().map(|&g| vec![rat(g)]).collect::<Vec<_>>()).unwrap();
        LatticeModule::new(name, z, lat, vec![RatMatrix::identity(1)]).unwrap()
    }

    #[test]
    fn splits_six() {
        let z = z_module("Z", &[1]);
        let a = BigInt::from(6);
        let r = split_by_primes(&z, &z, &a, &IntMatrix::from_i64(&[&[6]]), &IntMatrix::from_i64(&[&[1]])).unwrap();
        assert_eq!(r.primes, vec![2, 3]);
        assert_eq!(r.parts[0].carrier(), z_module("", &[2]).carrier());
        assert_eq!(r.parts[1].carrier(), z_module("", &[3]).carrier());
        assert!(crate::linalg::is_unimodular(&r.witness));

        let one = split_by_primes(&z, &z, &BigInt::one(), &IntMatrix::identity(1), &IntMatrix::identity(1)).unwrap();
        assert_eq!(one.parts.len(), 1);
        assert!(split_by_primes(&z, &z, &a, &IntMatrix::from_i64(&[&[2]]), &IntMatrix::from_i64(&[&[3]])).is_ok());
        assert!(split_by_primes(&z, &z, &a, &IntMatrix::from_i64(&[&[2]]), &IntMatrix::from_i64(&[&[2]])).is_err());
    }

    #[test]
    fn glues_two_z() {
        let z = z_module("Z", &[1]);
        let spec = LocalSpec { reference: z.clone(), overrides: BTreeMap::new() };
        assert_eq!(glue_object(&spec, 0).unwrap().carrier(), z.carrier());
        let mut overrides = BTreeMap::new();
        overrides.insert(2, z_module("2Z", &[2]));
        let g = glue_object(&LocalSpec { reference: z.clone(), overrides }, 0).unwrap();
        assert_eq!(g.carrier(), z_module("", &[2]).carrier());
        // A lattice differing at 2 and 3: only the 2-part is taken.
        let mut overrides = BTreeMap::new();
        overrides.insert(2, z_module("X", &[12]));
        let g = glue_object(&LocalSpec { reference: z, overrides }, 0).unwrap();
        assert_eq!(g.carrier(), z_module("", &[4]).carrier());
    }

    #[test]
    fn glues_morphisms() {
        let z = z_module("Z", &[1]);
        let six = RatMatrix::from_i64(&[&[6]]);
        assert_eq!(glue_morphism(&z, &z, &six, &BTreeMap::new()).unwrap(), IntMatrix::from_i64(&[&[6]]));
        let mut o = BTreeMap::new();
        o.insert(2, six.clone());
        assert_eq!(glue_morphism(&z, &z, &six, &o).unwrap(), IntMatrix::from_i64(&[&[6]]));
        o.insert(3, RatMatrix::from_i64(&[&[5]]));
        assert_eq!(glue_morphism(&z, &z, &six, &o), Err(GenusError::RationalMismatch(3)));
    }

    #[test]
    fn genus_of_z_lattices() {
        let opts = LocalIsoOptions::default();
        let z = z_module("Z", &[1]);
        let two = z_module("2Z", &[2]);
        assert_eq!(genus_equal(&z, &two, &opts).unwrap().verdict, Verdict::True);
        assert!(iso_global(&z, &two, &opts).unwrap().is_iso());
        let z2 = z.power(2).unwrap();
        assert!(iso_global(&z, &z2, &opts).unwrap().is_non_iso());
    }
}
