//! Local and rational isomorphism tests.

use num_bigint::BigInt;
use num_traits::{Signed, Zero};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::decompose::summand_isomorphism;
use super::{decompose_local, hom_lattice, rationally_isomorphic, AlgebraError, LatticeModule, DEFAULT_PRECISION};
use crate::lattice::BaseRing;
use crate::linalg::{FpMatrix, IntMatrix};

pub const DEFAULT_TRIALS: usize = 10_000;
pub const ENUMERATION_LIMIT: u64 = 1_000_000;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub enum IsoVerdict {
    /// A homomorphism in lattice coordinates whose determinant is a p-unit.
    Iso(IntMatrix),
    /// The invariant that separates the two modules.
    NonIso(String),
    Inconclusive(String),
}

impl IsoVerdict {
    pub fn is_iso(&self) -> bool {
        matches!(self, IsoVerdict::Iso(_))
    }

    pub fn is_non_iso(&self) -> bool {
        matches!(self, IsoVerdict::NonIso(_))
    }
}

#[derive(Clone, Copy, Debug)]
pub struct LocalIsoOptions {
    pub seed: u64,
    pub trials: usize,
    pub enumeration_limit: u64,
    pub precision: u32,
}

impl Default for LocalIsoOptions {
    fn default() -> Self {
        LocalIsoOptions { seed: 0, trials: DEFAULT_TRIALS, enumeration_limit: ENUMERATION_LIMIT, precision: DEFAULT_PRECISION }
    }
}

fn localized(m: &LatticeModule, p: u64) -> Result<LatticeModule, AlgebraError> {
    match m.base() {
        BaseRing::GlobalZ => m.localize(p),
        BaseRing::LocalAt(q) if q == p => Ok(m.clone()),
        b => Err(AlgebraError::BaseMismatch(b, BaseRing::LocalAt(p))),
    }
}

/// Decides `M̂_p ≅ N̂_p`. Over the complete local ring a homomorphism that is
/// invertible modulo p is an isomorphism, so every search runs modulo p.
pub fn iso_local(m: &LatticeModule, n: &LatticeModule, p: u64, opts: &LocalIsoOptions) -> Result<IsoVerdict, AlgebraError> {
    if !m.same_algebra(n) {
        return Err(AlgebraError::AlgebraMismatch);
    }
    if m.rank() != n.rank() {
        return Ok(IsoVerdict::NonIso(format!("rank {} vs {}", m.rank(), n.rank())));
    }
    let (m, n) = (localized(m, p)?, localized(n, p)?);
    if !rationally_isomorphic(&m, &n)? {
        return Ok(IsoVerdict::NonIso("rational modules differ".into()));
    }
    let hom = hom_lattice(&m, &n)?;
    let red: Vec<FpMatrix> = hom.basis.iter().map(|b| FpMatrix::from_int(b, p)).collect();
    let h = red.len() as u32;
    let exhaustive = (p as f64).powi(h as i32) <= opts.enumeration_limit as f64;
    if exhaustive {
        let mut c = vec![0u64; red.len()];
        loop {
            if let Some(w) = unit_combination(&red, &c, &hom.basis) {
                return Ok(IsoVerdict::Iso(w));
            }
            if !increment(&mut c, p) {
                break;
            }
        }
        return Ok(IsoVerdict::NonIso(format!("no element of Hom (rank {h}) is invertible mod {p}")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(opts.seed);
    for _ in 0..opts.trials {
        let c: Vec<u64> = (0..red.len()).map(|_| rng.gen_range(0..p)).collect();
        if let Some(w) = unit_combination(&red, &c, &hom.basis) {
            return Ok(IsoVerdict::Iso(w));
        }
    }
    by_decomposition(&m, &n, p, opts)
}

fn increment(c: &mut [u64], p: u64) -> bool {
    for x in c.iter_mut() {
        *x += 1;
        if *x < p {
            return true;
        }
        *x = 0;
    }
    false
}

fn unit_combination(red: &[FpMatrix], c: &[u64], basis: &[IntMatrix]) -> Option<IntMatrix> {
    let first = red.first()?;
    let mut x = FpMatrix::zeros(first.p(), first.rows(), first.cols());
    for (ci, b) in c.iter().zip(red) {
        if *ci != 0 {
            x = x.axpy(*ci, b);
        }
    }
    if x.det() == 0 {
        return None;
    }
    let mut w = IntMatrix::zeros(first.rows(), first.cols());
    for (ci, b) in c.iter().zip(basis) {
        if *ci != 0 {
            w = w.add(&b.scale(&BigInt::from(*ci))).expect("same shape");
        }
    }
    Some(w)
}

/// Compares completed decompositions and assembles a witness from matched summands.
fn by_decomposition(m: &LatticeModule, n: &LatticeModule, p: u64, opts: &LocalIsoOptions) -> Result<IsoVerdict, AlgebraError> {
    let (dm, dn) = match (decompose_local(m, opts.precision, opts.seed), decompose_local(n, opts.precision, opts.seed)) {
        (Ok(a), Ok(b)) => (a, b),
        (Err(e), _) | (_, Err(e)) => return Ok(IsoVerdict::Inconclusive(format!("random search failed and {e}"))),
    };
    let mut used = vec![false; dn.summands.len()];
    let mut w = IntMatrix::zeros(n.rank(), m.rank());
    for u in &dm.summands {
        let mut matched = false;
        for (j, v) in dn.summands.iter().enumerate() {
            if used[j] || u.fingerprint != v.fingerprint {
                continue;
            }
            if let Some(phi) = summand_isomorphism(u, v)? {
                used[j] = true;
                matched = true;
                for r in 0..phi.rows() {
                    for c in 0..phi.cols() {
                        w[(v.offset + r, u.offset + c)] += &phi[(r, c)];
                    }
                }
                break;
            }
        }
        if !matched {
            return Ok(IsoVerdict::NonIso(format!(
                "completed summand of rank {} (End dim {}) has no partner",
                u.rank(),
                u.fingerprint.end_dim
            )));
        }
    }
    if FpMatrix::from_int(&w, p).det() == 0 {
        return Ok(IsoVerdict::Inconclusive("assembled summand isomorphisms are singular mod p".into()));
    }
    Ok(IsoVerdict::Iso(w))
}

/// Checks that `w` (lattice coordinates) is a module map `M → N` invertible over ℤ₍p₎.
pub fn verify_local_iso(m: &LatticeModule, n: &LatticeModule, p: u64, w: &IntMatrix) -> Result<bool, AlgebraError> {
    let (m, n) = (localized(m, p)?, localized(n, p)?);
    if w.rows() != n.rank() || w.cols() != m.rank() {
        return Ok(false);
    }
    let wr = w.to_rat();
    for (a, b) in m.action().iter().zip(n.action()) {
        if b.mul(&wr)? != wr.mul(a)? {
            return Ok(false);
        }
    }
    let d = w.det()?;
    Ok(!(d % BigInt::from(p)).is_zero())
}

/// A homomorphism `M → N` that is a rational isomorphism, preferring small determinant.
pub fn rational_iso(m: &LatticeModule, n: &LatticeModule, seed: u64) -> Result<Option<IntMatrix>, AlgebraError> {
    if !rationally_isomorphic(m, n)? {
        return Ok(None);
    }
    let hom = hom_lattice(m, n)?;
    if hom.rank() == 0 {
        return Ok(if m.rank() == 0 { Some(IntMatrix::zeros(0, 0)) } else { None });
    }
    let mut best: Option<(BigInt, IntMatrix)> = None;
    let mut consider = |x: IntMatrix| -> Result<(), AlgebraError> {
        let d = x.det()?.abs();
        if !d.is_zero() && best.as_ref().map_or(true, |(b, _)| &d < b) {
            best = Some((d, x));
        }
        Ok(())
    };
    for b in &hom.basis {
        consider(b.clone())?;
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    for _ in 0..64 {
        let c: Vec<BigInt> = (0..hom.rank()).map(|_| BigInt::from(rng.gen_range(-2i64..=2))).collect();
        consider(hom.combine(&c))?;
    }
    Ok(best.map(|(_, x)| x))
}
