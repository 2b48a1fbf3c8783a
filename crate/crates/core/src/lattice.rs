//! Lattices in ℚⁿ over ℤ or over ℤ localized at one prime.
//!
//! A lattice is stored as `denom⁻¹ · span(basis)` with `basis` an integer
//! matrix in column Hermite form and `denom` the least positive integer
//! clearing denominators, so equal lattices have equal representations.
//!
//! A ℤ₍p₎-lattice `L` is represented by the unique ℤ-lattice `C` in the same
//! rational span with `C ⊗ ℤ₍p₎ = L` and `C ⊗ ℤ₍q₎ = (ℚL ∩ ℤⁿ) ⊗ ℤ₍q₎` for
//! every `q ≠ p`.

use std::collections::BTreeMap;
use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Serialize};

use crate::arith::{factorize, split_p_part, valuation};
use crate::linalg::{hnf_basis, integer_kernel, invariant_factors, saturate, IntMatrix, LinalgError, RatMatrix};

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
pub enum BaseRing {
    GlobalZ,
    LocalAt(u64),
}

impl BaseRing {
    pub fn prime(&self) -> Option<u64> {
        match self {
            BaseRing::GlobalZ => None,
            BaseRing::LocalAt(p) => Some(*p),
        }
    }

    /// True if `x` is invertible in the base ring.
    pub fn is_unit(&self, x: &BigInt) -> bool {
        match self {
            BaseRing::GlobalZ => x.abs().is_one(),
            BaseRing::LocalAt(p) => !(x % BigInt::from(*p)).is_zero(),
        }
    }

    /// True if the rational `x` lies in the base ring.
    pub fn is_integral(&self, x: &BigRational) -> bool {
        match self {
            BaseRing::GlobalZ => x.is_integer(),
            BaseRing::LocalAt(p) => !(x.denom() % BigInt::from(*p)).is_zero(),
        }
    }
}

impl fmt::Display for BaseRing {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            BaseRing::GlobalZ => write!(f, "Z"),
            BaseRing::LocalAt(p) => write!(f, "Z_({p})"),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LatticeError {
    #[error("ambient dimensions differ: {0} vs {1}")]
    AmbientMismatch(usize, usize),
    #[error("base rings differ: {0} vs {1}")]
    BaseMismatch(BaseRing, BaseRing),
    #[error("lattice is not contained in the larger one")]
    NotContained,
    #[error("ranks differ ({0} vs {1}); the quotient is infinite")]
    RankMismatch(usize, usize),
    #[error("operation needs a lattice over Z, got {0}")]
    NotGlobal(BaseRing),
    #[error("generator has length {got}, expected {expected}")]
    GeneratorLength { expected: usize, got: usize },
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Lattice {
    base: BaseRing,
    ambient: usize,
    basis: IntMatrix,
    denom: BigInt,
}

pub type RatVec = Vec<BigRational>;

pub fn rat(n: i64) -> BigRational {
    BigRational::from_integer(BigInt::from(n))
}

pub fn int_to_rat(v: &[BigInt]) -> RatVec {
    v.iter().map(|x| BigRational::from_integer(x.clone())).collect()
}

impl Lattice {
    /// The lattice spanned by the columns of `gens`.
    pub fn from_generators(base: BaseRing, gens: &RatMatrix) -> Self {
        let (ints, den) = gens.to_int_scaled();
        Self::from_scaled(base, &ints, den)
    }

    pub fn from_int_generators(base: BaseRing, gens: &IntMatrix) -> Self {
        Self::from_scaled(base, gens, BigInt::one())
    }

    pub fn from_vectors(base: BaseRing, ambient: usize, vecs: &[RatVec]) -> Result<Self, LatticeError> {
        if let Some(v) = vecs.iter().find(|v| v.len() != ambient) {
            return Err(LatticeError::GeneratorLength { expected: ambient, got: v.len() });
        }
        if vecs.is_empty() {
            return Ok(Self::zero(base, ambient));
        }
        Ok(Self::from_generators(base, &RatMatrix::from_cols(ambient, vecs)))
    }

    pub fn standard(base: BaseRing, n: usize) -> Self {
        Self::from_int_generators(base, &IntMatrix::identity(n))
    }

    pub fn zero(base: BaseRing, n: usize) -> Self {
        Lattice { base, ambient: n, basis: IntMatrix::zeros(n, 0), denom: BigInt::one() }
    }

    /// `denom⁻¹ · span(gens)` in canonical form.
    fn from_scaled(base: BaseRing, gens: &IntMatrix, denom: BigInt) -> Self {
        let n = gens.rows();
        let mut basis = hnf_basis(gens);
        let mut denom = denom;
        if let BaseRing::LocalAt(p) = base {
            if basis.cols() > 0 {
                // Replace the prime-to-p part by the saturation.
                let inv = invariant_factors(&basis);
                let e = inv.last().map(|d| valuation(d, p)).unwrap_or(0);
                let sat = saturate(&basis);
                let pe = num_traits::pow(BigInt::from(p), e as usize);
                basis = hnf_basis(&basis.hstack(&sat.scale(&pe)).expect("same rows"));
                let (pa, _) = split_p_part(&denom, p);
                denom = pa;
            } else {
                denom = BigInt::one();
            }
        }
        let g = basis.content().gcd(&denom);
        if !g.is_one() && !g.is_zero() {
            basis = div_exact(&basis, &g);
            denom /= &g;
        }
        if basis.cols() == 0 {
            denom = BigInt::one();
        }
        Lattice { base, ambient: n, basis, denom }
    }

    pub fn base(&self) -> BaseRing {
        self.base
    }

    pub fn ambient_dim(&self) -> usize {
        self.ambient
    }

    pub fn rank(&self) -> usize {
        self.basis.cols()
    }

    pub fn is_full_rank(&self) -> bool {
        self.rank() == self.ambient
    }

    /// Integer basis before applying the scale.
    pub fn int_basis(&self) -> &IntMatrix {
        &self.basis
    }

    pub fn denom(&self) -> &BigInt {
        &self.denom
    }

    pub fn scale(&self) -> BigRational {
        BigRational::new(BigInt::one(), self.denom.clone())
    }

    /// The actual basis vectors as columns.
    pub fn basis(&self) -> RatMatrix {
        self.basis.to_rat().scale(&self.scale())
    }

    pub fn basis_vectors(&self) -> Vec<RatVec> {
        let b = self.basis();
        (0..b.cols()).map(|j| b.col(j)).collect()
    }

    pub fn with_base(&self, base: BaseRing) -> Self {
        Self::from_scaled(base, &self.basis, self.denom.clone())
    }

    pub fn scaled(&self, c: &BigRational) -> Self {
        let b = self.basis.scale(c.numer());
        Self::from_scaled(self.base, &b, &self.denom * c.denom())
    }

    /// Rational coordinates of `v` in the basis, if `v` lies in the span.
    pub fn rational_coords(&self, v: &[BigRational]) -> Option<RatVec> {
        assert_eq!(v.len(), self.ambient);
        let d = BigRational::from_integer(self.denom.clone());
        let target: RatVec = v.iter().map(|x| x * &d).collect();
        echelon_solve(&self.basis, &target)
    }

    /// Coordinates over the base ring, if `v` lies in the lattice.
    pub fn coords(&self, v: &[BigRational]) -> Option<RatVec> {
        let c = self.rational_coords(v)?;
        c.iter().all(|x| self.base.is_integral(x)).then_some(c)
    }

    pub fn contains(&self, v: &[BigRational]) -> bool {
        self.coords(v).is_some()
    }

    /// Coordinates of `other`'s basis in this basis, as columns.
    pub fn coords_of(&self, other: &Lattice) -> Option<RatMatrix> {
        let cols: Option<Vec<RatVec>> = other.basis_vectors().iter().map(|v| self.rational_coords(v)).collect();
        Some(RatMatrix::from_cols(self.rank(), &cols?))
    }

    pub fn contains_lattice(&self, other: &Lattice) -> bool {
        other.basis_vectors().iter().all(|v| self.contains(v))
    }

    fn check_compatible(&self, other: &Lattice) -> Result<(), LatticeError> {
        if self.ambient != other.ambient {
            return Err(LatticeError::AmbientMismatch(self.ambient, other.ambient));
        }
        if self.base != other.base {
            return Err(LatticeError::BaseMismatch(self.base, other.base));
        }
        Ok(())
    }

    /// Image under a rational linear map of the ambient space.
    pub fn image(&self, map: &RatMatrix) -> Self {
        let img = map.mul(&self.basis()).expect("map acts on the ambient space");
        if img.cols() == 0 {
            return Self::zero(self.base, map.rows());
        }
        Self::from_generators(self.base, &img)
    }

    /// The sublattice spanned by `basis · w`, for an integer matrix `w` of coordinates.
    pub fn image_of_coords(&self, w: &IntMatrix) -> Self {
        let gens = self.basis().mul(&w.to_rat()).expect("coordinates match the rank");
        if gens.cols() == 0 {
            return Self::zero(self.base, self.ambient);
        }
        Self::from_generators(self.base, &gens)
    }

    /// Direct sum inside the product of ambient spaces.
    pub fn direct_sum(parts: &[&Lattice]) -> Self {
        let base = parts.first().map(|l| l.base).unwrap_or(BaseRing::GlobalZ);
        let blocks: Vec<RatMatrix> = parts.iter().map(|l| l.basis()).collect();
        let n: usize = parts.iter().map(|l| l.ambient).sum();
        let m = RatMatrix::block_diag(&blocks);
        if m.cols() == 0 {
            return Self::zero(base, n);
        }
        Self::from_generators(base, &m)
    }

    /// Canonical serialization used for deterministic tie-breaking.
    pub fn canonical_string(&self) -> String {
        let cols: Vec<String> = (0..self.rank())
            .map(|j| self.basis.col(j).iter().map(|x| x.to_string()).collect::<Vec<_>>().join(","))
            .collect();
        format!("{}|{}|{}|[{}]", self.base, self.ambient, self.denom, cols.join(";"))
    }
}

impl fmt::Debug for Lattice {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Lattice({} over {}, 1/{} * {:?})", self.rank(), self.base, self.denom, self.basis)
    }
}

fn div_exact(m: &IntMatrix, g: &BigInt) -> IntMatrix {
    let data = m.entries().iter().map(|x| x / g).collect();
    IntMatrix::new(m.rows(), m.cols(), data).expect("shape kept")
}

/// Solves `H·c = v` for `H` in column echelon form with full column rank.
fn echelon_solve(h: &IntMatrix, v: &[BigRational]) -> Option<RatVec> {
    let mut rest: RatVec = v.to_vec();
    let mut c = vec![BigRational::zero(); h.cols()];
    let mut row = 0;
    for j in 0..h.cols() {
        while h[(row, j)].is_zero() {
            if !rest[row].is_zero() {
                return None;
            }
            row += 1;
        }
        let q = &rest[row] / BigRational::from_integer(h[(row, j)].clone());
        for (i, r) in rest.iter_mut().enumerate().skip(row) {
            if !h[(i, j)].is_zero() {
                *r -= &q * BigRational::from_integer(h[(i, j)].clone());
            }
        }
        c[j] = q;
        row += 1;
    }
    rest.iter().all(|x| x.is_zero()).then_some(c)
}

pub fn lattice_sum(m: &Lattice, n: &Lattice) -> Result<Lattice, LatticeError> {
    m.check_compatible(n)?;
    let d = m.denom.lcm(&n.denom);
    let a = m.basis.scale(&(&d / &m.denom));
    let b = n.basis.scale(&(&d / &n.denom));
    Ok(Lattice::from_scaled(m.base, &a.hstack(&b)?, d))
}

pub fn lattice_intersect(m: &Lattice, n: &Lattice) -> Result<Lattice, LatticeError> {
    m.check_compatible(n)?;
    if m.rank() == 0 || n.rank() == 0 {
        return Ok(Lattice::zero(m.base, m.ambient));
    }
    let d = m.denom.lcm(&n.denom);
    let a = m.basis.scale(&(&d / &m.denom));
    let b = n.basis.scale(&(&d / &n.denom));
    // x ∈ span A ∩ span B  ⇔  A·s = B·t; the kernel of [A | -B] gives all (s, t).
    let k = integer_kernel(&a.hstack(&b.neg())?);
    if k.cols() == 0 {
        return Ok(Lattice::zero(m.base, m.ambient));
    }
    let s = k.submatrix(0..a.cols(), 0..k.cols());
    Ok(Lattice::from_scaled(m.base, &a.mul(&s)?, d))
}

/// Invariant factors `> 1` of `N/M`, p-parts only for a local base.
pub fn quotient_invariants(n: &Lattice, m: &Lattice) -> Result<Vec<BigInt>, LatticeError> {
    n.check_compatible(m)?;
    if n.rank() != m.rank() {
        return Err(LatticeError::RankMismatch(n.rank(), m.rank()));
    }
    if !n.contains_lattice(m) {
        return Err(LatticeError::NotContained);
    }
    let c = n.coords_of(m).ok_or(LatticeError::NotContained)?;
    let (ints, den) = c.to_int_scaled();
    // Over a local ring the coordinates only have prime-to-p denominators.
    debug_assert!(n.base.is_unit(&den) || n.base == BaseRing::GlobalZ && den.is_one());
    let inv = invariant_factors(&ints);
    let out = inv
        .into_iter()
        .map(|d| match n.base {
            BaseRing::GlobalZ => d,
            BaseRing::LocalAt(p) => split_p_part(&d, p).0,
        })
        .filter(|d| !d.is_one())
        .collect();
    Ok(out)
}

/// Index `[N : M]` (the product of the invariant factors).
pub fn lattice_index(n: &Lattice, m: &Lattice) -> Result<BigInt, LatticeError> {
    Ok(quotient_invariants(n, m)?.iter().product())
}

pub fn localize(m: &Lattice, p: u64) -> Result<Lattice, LatticeError> {
    if m.base != BaseRing::GlobalZ {
        return Err(LatticeError::NotGlobal(m.base));
    }
    Ok(m.with_base(BaseRing::LocalAt(p)))
}

/// Lattices `M_p` of the primary decomposition together with the splitting
/// isomorphism `⊕ M_p ≅ M ⊕ (r−1)·N`.
#[derive(Clone, Debug)]
pub struct PrimaryDecomposition {
    pub components: BTreeMap<u64, Lattice>,
    /// CRT coefficients `c_p` with `c_p ≡ 1` at `p` and `≡ 0` at the other primes.
    pub coefficients: Vec<BigInt>,
    /// Matrix of `(ρ, ψ)` from the concatenated bases of the `M_p` to the
    /// basis of `M` followed by `r−1` copies of the basis of `N`.
    pub witness: IntMatrix,
}

impl PrimaryDecomposition {
    pub fn primes(&self) -> Vec<u64> {
        self.components.keys().copied().collect()
    }

    pub fn witness_is_unimodular(&self) -> bool {
        self.witness.cols() == 0 || crate::linalg::is_unimodular(&self.witness)
    }
}

/// CRT coefficients `c_i ≡ δ_ij mod q_j` for pairwise coprime moduli.
pub fn crt_idempotents(moduli: &[BigInt]) -> Vec<BigInt> {
    let total: BigInt = moduli.iter().product();
    moduli
        .iter()
        .map(|q| {
            let rest = &total / q;
            let inv = crate::linalg::mod_inverse(&rest, q).unwrap_or_else(BigInt::zero);
            (rest * inv).mod_floor(&total)
        })
        .collect()
}

/// Primary components of `M ⊆ N` with the splitting witness.
///
/// `M_p = M + pᵏ·N` where `pᵏ` is the `p`-part of the exponent of `N/M`.
/// The retraction `ρ(u) = Σ c_i·u_i + (1 − Σ c_i)·u_1` only uses scalars, so
/// the same witness is linear for any order acting on both lattices.
pub fn primary_components(n: &Lattice, m: &Lattice) -> Result<PrimaryDecomposition, LatticeError> {
    let inv = quotient_invariants(n, m)?;
    let exponent = inv.last().cloned().unwrap_or_else(BigInt::one);
    let primes: Vec<u64> = if exponent.is_one() { Vec::new() } else { factorize(&exponent).iter().map(|f| f.0).collect() };
    primary_components_at(n, m, &primes)
}

/// As [`primary_components`], with one component for each listed prime;
/// a prime not dividing the index contributes `N` itself.
pub fn primary_components_at(n: &Lattice, m: &Lattice, primes: &[u64]) -> Result<PrimaryDecomposition, LatticeError> {
    let inv = quotient_invariants(n, m)?;
    let exponent = inv.last().cloned().unwrap_or_else(BigInt::one);
    let mut primes = primes.to_vec();
    primes.sort_unstable();
    primes.dedup();
    let moduli: Vec<BigInt> = primes.iter().map(|&p| split_p_part(&exponent, p).0).collect();
    let mut components = BTreeMap::new();
    for (&p, q) in primes.iter().zip(&moduli) {
        components.insert(p, lattice_sum(m, &n.scaled(&BigRational::from_integer(q.clone())))?);
    }
    // Coprime CRT moduli: a prime with trivial p-part still needs a distinct modulus.
    let crt_moduli: Vec<BigInt> =
        primes.iter().zip(&moduli).map(|(&p, q)| if q.is_one() { BigInt::from(p) } else { q.clone() }).collect();
    let coefficients = crt_idempotents(&crt_moduli);
    let witness = splitting_witness(n, m, &components.values().cloned().collect::<Vec<_>>(), &coefficients)?;
    Ok(PrimaryDecomposition { components, coefficients, witness })
}

fn splitting_witness(n: &Lattice, m: &Lattice, parts: &[Lattice], c: &[BigInt]) -> Result<IntMatrix, LatticeError> {
    let r = parts.len();
    if r == 0 {
        return Ok(IntMatrix::zeros(0, 0));
    }
    let (rm, rn) = (m.rank(), n.rank());
    let rows = rm + (r - 1) * rn;
    let total_cols: usize = parts.iter().map(|l| l.rank()).sum();
    let mut w = IntMatrix::zeros(rows, total_cols);
    let sum_c: BigInt = c.iter().sum();
    let correction = BigInt::one() - sum_c;
    let mut col = 0;
    for (i, part) in parts.iter().enumerate() {
        let mut ci = BigRational::from_integer(c[i].clone());
        if i == 0 {
            ci += BigRational::from_integer(correction.clone());
        }
        for v in part.basis_vectors() {
            let rho: RatVec = v.iter().map(|x| x * &ci).collect();
            let rc = m.coords(&rho).ok_or(LatticeError::NotContained)?;
            for (k, x) in rc.iter().enumerate() {
                w[(k, col)] = to_base_int(x, m.base);
            }
            let nc = n.coords(&v).ok_or(LatticeError::NotContained)?;
            // ψ(u)_j = u_j − u_{j+1}: u_i enters block i with +1 and block i−1 with −1.
            if i < r - 1 {
                for (k, x) in nc.iter().enumerate() {
                    w[(rm + i * rn + k, col)] = to_base_int(x, m.base);
                }
            }
            if i > 0 {
                for (k, x) in nc.iter().enumerate() {
                    w[(rm + (i - 1) * rn + k, col)] = -to_base_int(x, m.base);
                }
            }
            col += 1;
        }
    }
    Ok(w)
}

/// A representative integer for an element of the base ring; over ℤ₍p₎
/// coordinates are only p-integral, so reduce modulo a large power of p.
fn to_base_int(x: &BigRational, base: BaseRing) -> BigInt {
    if x.is_integer() {
        return x.to_integer();
    }
    match base {
        BaseRing::GlobalZ => panic!("non-integral coordinate over Z"),
        BaseRing::LocalAt(p) => {
            let m = num_traits::pow(BigInt::from(p), 64);
            let inv = crate::linalg::mod_inverse(x.denom(), &m).expect("p-integral");
            (x.numer() * inv).mod_floor(&m)
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn lat(cols: &[&[i64]]) -> Lattice {
        let n = cols[0].len();
        let vecs: Vec<RatVec> = cols.iter().map(|c| c.iter().map(|&x| rat(x)).collect()).collect();
        Lattice::from_vectors(BaseRing::GlobalZ, n, &vecs).unwrap()
    }

    #[test]
    fn sum_examples() {
        assert_eq!(lattice_sum(&lat(&[&[2]]), &lat(&[&[3]])).unwrap(), lat(&[&[1]]));
        let m = lat(&[&[2, 0], &[0, 2]]);
        assert_eq!(lattice_sum(&m, &m).unwrap(), m);
        let s = lattice_sum(&m, &lat(&[&[1, 1]])).unwrap();
        assert_eq!(s.int_basis(), &IntMatrix::from_i64(&[&[1, 0], &[1, 2]]));
    }

    #[test]
    fn intersect_examples() {
        assert_eq!(lattice_intersect(&lat(&[&[2]]), &lat(&[&[3]])).unwrap(), lat(&[&[6]]));
        let m = lat(&[&[2, 0], &[0, 2]]);
        assert_eq!(lattice_intersect(&m, &Lattice::standard(BaseRing::GlobalZ, 2)).unwrap(), m);
        let half = Lattice::from_vectors(
            BaseRing::GlobalZ,
            2,
            &[vec![BigRational::new(1.into(), 2.into()), BigRational::new(1.into(), 2.into())], vec![rat(0), rat(1)]],
        )
        .unwrap();
        let z2 = Lattice::standard(BaseRing::GlobalZ, 2);
        assert_eq!(lattice_intersect(&z2, &half).unwrap(), z2);
    }

    #[test]
    fn quotient_examples() {
        let z = lat(&[&[1]]);
        assert_eq!(quotient_invariants(&z, &lat(&[&[6]])).unwrap(), vec![BigInt::from(6)]);
        assert!(quotient_invariants(&z, &z).unwrap().is_empty());
        let z2 = Lattice::standard(BaseRing::GlobalZ, 2);
        assert_eq!(quotient_invariants(&z2, &lat(&[&[2, 0], &[0, 3]])).unwrap(), vec![BigInt::from(6)]);
        assert_eq!(quotient_invariants(&lat(&[&[6]]), &z), Err(LatticeError::NotContained));
    }

    #[test]
    fn localize_examples() {
        let l = localize(&lat(&[&[6]]), 2).unwrap();
        assert_eq!(l, lat(&[&[2]]).with_base(BaseRing::LocalAt(2)));
        assert_eq!(l.int_basis(), &IntMatrix::from_i64(&[&[2]]));
        let z2 = Lattice::standard(BaseRing::GlobalZ, 2);
        assert_eq!(localize(&z2, 5).unwrap(), Lattice::standard(BaseRing::LocalAt(5), 2));
        let m = lat(&[&[1, 1], &[0, 2]]);
        assert_eq!(localize(&m, 3).unwrap(), Lattice::standard(BaseRing::LocalAt(3), 2));
        assert_ne!(localize(&m, 2).unwrap(), Lattice::standard(BaseRing::LocalAt(2), 2));
    }

    #[test]
    fn primary_examples() {
        let z = lat(&[&[1]]);
        let pd = primary_components(&z, &lat(&[&[6]])).unwrap();
        assert_eq!(pd.primes(), vec![2, 3]);
        assert_eq!(pd.components[&2], lat(&[&[2]]));
        assert_eq!(pd.components[&3], lat(&[&[3]]));
        assert!(pd.witness_is_unimodular());
        assert!(primary_components(&z, &z).unwrap().components.is_empty());
        let z2 = Lattice::standard(BaseRing::GlobalZ, 2);
        let m = lat(&[&[2, 0], &[0, 2]]);
        let pd = primary_components(&z2, &m).unwrap();
        assert_eq!(pd.components.len(), 1);
        assert_eq!(pd.components[&2], m);
    }
}
