//! Finite algebras given by structure constants, their lattice modules,
//! homomorphism lattices, radicals mod p and completed decompositions.

mod decompose;
mod hom;
mod iso;
mod module;
mod radical;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};

use crate::lattice::{BaseRing, LatticeError, RatVec};
use crate::linalg::{LinalgError, RatMatrix};

pub use decompose::{
    decompose_local, summands_isomorphic, CertificateEntry, DecompositionCertificate, LocalDecomposition,
    LocalSummand, SummandFingerprint, DEFAULT_PRECISION, MAX_PRECISION,
};
pub use hom::{end_ring, hom_lattice, rational_hom_dim, rationally_isomorphic, HomLattice};
pub use iso::{
    iso_local, rational_iso, verify_local_iso, IsoVerdict, LocalIsoOptions, DEFAULT_TRIALS, ENUMERATION_LIMIT,
};
pub use module::LatticeModule;
pub use radical::{primitive_idempotents, radical_mod_p, FpAlgebra};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum AlgebraError {
    #[error("structure constants have {got} entries, expected {expected}")]
    ConstantCount { expected: usize, got: usize },
    #[error("associativity fails for basis elements ({0}, {1}, {2})")]
    NotAssociative(usize, usize, usize),
    #[error("the declared unit is not a two-sided identity (fails on basis element {0})")]
    BadUnit(usize),
    #[error("action matrices do not respect the structure constants for ({0}, {1})")]
    ActionNotMultiplicative(usize, usize),
    #[error("the unit does not act as the identity")]
    ActionUnit,
    #[error("expected {expected} action matrices, got {got}")]
    ActionCount { expected: usize, got: usize },
    #[error("action of basis element {0} does not preserve the lattice")]
    ActionNotIntegral(usize),
    #[error("modules are over different algebras")]
    AlgebraMismatch,
    #[error("base ring {0} does not match the algebra base {1}")]
    BaseMismatch(BaseRing, BaseRing),
    #[error("unsupported characteristic: p = {p} must exceed the dimension {dim}")]
    UnsupportedCharacteristic { p: u64, dim: usize },
    #[error("operation needs a local base ring")]
    NotLocal,
    #[error("decomposition did not stabilize up to precision {max_precision}")]
    Unstable { max_precision: u32, partial: Vec<usize> },
    #[error("no splitting element found for a non-local corner after {0} trials")]
    SplittingFailed(usize),
    #[error(transparent)]
    Lattice(#[from] LatticeError),
    #[error(transparent)]
    Linalg(#[from] LinalgError),
}

/// An associative unital algebra that is free of finite rank over its base.
///
/// `e_i · e_j = Σ_k (c_ijk / denominator) · e_k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct FiniteAlgebra {
    base: BaseRing,
    rank: usize,
    denominator: BigInt,
    constants: Vec<BigInt>,
    unit: RatVec,
}

impl FiniteAlgebra {
    pub fn new(
        base: BaseRing,
        rank: usize,
        denominator: BigInt,
        constants: Vec<BigInt>,
        unit: RatVec,
    ) -> Result<Self, AlgebraError> {
        if constants.len() != rank * rank * rank {
            return Err(AlgebraError::ConstantCount { expected: rank * rank * rank, got: constants.len() });
        }
        if unit.len() != rank {
            return Err(AlgebraError::ConstantCount { expected: rank, got: unit.len() });
        }
        let alg = FiniteAlgebra { base, rank, denominator, constants, unit };
        alg.validate()?;
        Ok(alg)
    }

    /// The full matrix algebra `Mat(n, base)` with matrix units `E_ij` in row-major order.
    pub fn matrix_algebra(base: BaseRing, n: usize) -> Self {
        let r = n * n;
        let mut c = vec![BigInt::zero(); r * r * r];
        for i in 0..n {
            for j in 0..n {
                for l in 0..n {
                    // E_ij · E_jl = E_il
                    let (a, b, k) = (i * n + j, j * n + l, i * n + l);
                    c[(a * r + b) * r + k] = BigInt::one();
                }
            }
        }
        let mut unit = vec![BigRational::zero(); r];
        for i in 0..n {
            unit[i * n + i] = BigRational::one();
        }
        FiniteAlgebra::new(base, r, BigInt::one(), c, unit).expect("matrix units are associative")
    }

    fn validate(&self) -> Result<(), AlgebraError> {
        let n = self.rank;
        let basis: Vec<RatVec> = (0..n).map(|i| self.basis_vector(i)).collect();
        for i in 0..n {
            for j in 0..n {
                let ij = self.mul(&basis[i], &basis[j]);
                for k in 0..n {
                    let left = self.mul(&ij, &basis[k]);
                    let right = self.mul(&basis[i], &self.mul(&basis[j], &basis[k]));
                    if left != right {
                        return Err(AlgebraError::NotAssociative(i, j, k));
                    }
                }
            }
        }
        for (i, b) in basis.iter().enumerate() {
            if &self.mul(&self.unit, b) != b || &self.mul(b, &self.unit) != b {
                return Err(AlgebraError::BadUnit(i));
            }
        }
        Ok(())
    }

    pub fn base(&self) -> BaseRing {
        self.base
    }

    pub fn rank(&self) -> usize {
        self.rank
    }

    pub fn denominator(&self) -> &BigInt {
        &self.denominator
    }

    pub fn raw_constants(&self) -> &[BigInt] {
        &self.constants
    }

    pub fn unit(&self) -> &RatVec {
        &self.unit
    }

    pub fn with_base(&self, base: BaseRing) -> Self {
        FiniteAlgebra { base, ..self.clone() }
    }

    pub fn constant(&self, i: usize, j: usize, k: usize) -> BigRational {
        let n = self.rank;
        BigRational::new(self.constants[(i * n + j) * n + k].clone(), self.denominator.clone())
    }

    pub fn basis_vector(&self, i: usize) -> RatVec {
        let mut v = vec![BigRational::zero(); self.rank];
        v[i] = BigRational::one();
        v
    }

    pub fn mul(&self, x: &[BigRational], y: &[BigRational]) -> RatVec {
        let n = self.rank;
        let mut out = vec![BigRational::zero(); n];
        for i in 0..n {
            if x[i].is_zero() {
                continue;
            }
            for j in 0..n {
                if y[j].is_zero() {
                    continue;
                }
                let xy = &x[i] * &y[j];
                for (k, o) in out.iter_mut().enumerate() {
                    let c = &self.constants[(i * n + j) * n + k];
                    if !c.is_zero() {
                        *o += &xy * BigRational::new(c.clone(), self.denominator.clone());
                    }
                }
            }
        }
        out
    }

    /// Matrix of left multiplication by `e_i` on the basis.
    pub fn left_mult(&self, i: usize) -> RatMatrix {
        let n = self.rank;
        let mut m = RatMatrix::zeros(n, n);
        for j in 0..n {
            for k in 0..n {
                m[(k, j)] = self.constant(i, j, k);
            }
        }
        m
    }

    /// Left regular representation, one matrix per basis element.
    pub fn regular_representation(&self) -> Vec<RatMatrix> {
        (0..self.rank).map(|i| self.left_mult(i)).collect()
    }

    pub fn is_commutative(&self) -> bool {
        let n = self.rank;
        (0..n).all(|i| (0..n).all(|j| (0..n).all(|k| self.constant(i, j, k) == self.constant(j, i, k))))
    }

    /// Checks that `action` is a unital representation of this algebra.
    pub fn check_representation(&self, action: &[RatMatrix]) -> Result<(), AlgebraError> {
        let n = self.rank;
        if action.len() != n {
            return Err(AlgebraError::ActionCount { expected: n, got: action.len() });
        }
        let d = action.first().map(|m| m.rows()).unwrap_or(0);
        for i in 0..n {
            for j in 0..n {
                let lhs = action[i].mul(&action[j])?;
                let mut rhs = RatMatrix::zeros(d, d);
                for (k, a) in action.iter().enumerate() {
                    let c = self.constant(i, j, k);
                    if !c.is_zero() {
                        rhs = rhs.add(&a.scale(&c))?;
                    }
                }
                if lhs != rhs {
                    return Err(AlgebraError::ActionNotMultiplicative(i, j));
                }
            }
        }
        let mut u = RatMatrix::zeros(d, d);
        for (k, a) in action.iter().enumerate() {
            if !self.unit[k].is_zero() {
                u = u.add(&a.scale(&self.unit[k]))?;
            }
        }
        if u != RatMatrix::identity(d) {
            return Err(AlgebraError::ActionUnit);
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::rat;

    pub(crate) fn upper_triangular_2() -> FiniteAlgebra {
        // basis E11, E12, E22
        let idx = |i: usize, j: usize, k: usize| (i * 3 + j) * 3 + k;
        let mut c = vec![BigInt::zero(); 27];
        c[idx(0, 0, 0)] = 1.into();
        c[idx(0, 1, 1)] = 1.into();
        c[idx(1, 2, 1)] = 1.into();
        c[idx(2, 2, 2)] = 1.into();
        FiniteAlgebra::new(BaseRing::GlobalZ, 3, 1.into(), c, vec![rat(1), rat(0), rat(1)]).unwrap()
    }

    pub(crate) fn dual_numbers(base: BaseRing) -> FiniteAlgebra {
        // basis 1, x with x² = 0
        let mut c = vec![BigInt::zero(); 8];
        c[0] = 1.into(); // 1·1 = 1
        c[3] = 1.into(); // 1·x = x
        c[5] = 1.into(); // x·1 = x
        FiniteAlgebra::new(base, 2, 1.into(), c, vec![rat(1), rat(0)]).unwrap()
    }

    #[test]
    fn validates_axioms() {
        let a = dual_numbers(BaseRing::GlobalZ);
        assert!(a.is_commutative());
        a.check_representation(&a.regular_representation()).unwrap();
        let mut bad = a.raw_constants().to_vec();
        bad[0] = 2.into();
        assert!(FiniteAlgebra::new(BaseRing::GlobalZ, 2, 1.into(), bad, vec![rat(1), rat(0)]).is_err());
        let m2 = FiniteAlgebra::matrix_algebra(BaseRing::GlobalZ, 2);
        assert_eq!(m2.rank(), 4);
        assert!(!m2.is_commutative());
    }

    fn column_modules() -> (LatticeModule, LatticeModule) {
        let t = std::sync::Arc::new(upper_triangular_2());
        let act2 = vec![
            RatMatrix::from_i64(&[&[1, 0], &[0, 0]]),
            RatMatrix::from_i64(&[&[0, 1], &[0, 0]]),
            RatMatrix::from_i64(&[&[0, 0], &[0, 1]]),
        ];
        let act1 = vec![RatMatrix::from_i64(&[&[1]]), RatMatrix::from_i64(&[&[0]]), RatMatrix::from_i64(&[&[0]])];
        let p1 = LatticeModule::new("P1", t.clone(), crate::lattice::Lattice::standard(BaseRing::GlobalZ, 1), act1).unwrap();
        let p2 = LatticeModule::new("P2", t, crate::lattice::Lattice::standard(BaseRing::GlobalZ, 2), act2).unwrap();
        (p1, p2)
    }

    #[test]
    fn hom_examples() {
        let z = std::sync::Arc::new(FiniteAlgebra::matrix_algebra(BaseRing::GlobalZ, 1));
        let zz = LatticeModule::regular("Z", z.clone()).unwrap();
        assert_eq!(hom_lattice(&zz, &zz).unwrap().rank(), 1);
        let z2 = zz.power(2).unwrap();
        let end = end_ring(&z2).unwrap();
        assert_eq!(end.rank(), 4);
        assert!(!end.is_commutative());

        let dual = std::sync::Arc::new(dual_numbers(BaseRing::GlobalZ));
        let reg = LatticeModule::regular("D", dual).unwrap();
        let end = end_ring(&reg).unwrap();
        assert_eq!(end.rank(), 2);
        assert!(end.is_commutative());

        let (p1, p2) = column_modules();
        assert_eq!(hom_lattice(&p1, &p2).unwrap().rank(), 1);
        assert_eq!(hom_lattice(&p2, &p1).unwrap().rank(), 0);
        let h = hom_lattice(&p2, &p2).unwrap();
        for b in &h.basis {
            for (a, m) in p2.action().iter().zip(p2.action()) {
                assert_eq!(a.mul(&b.to_rat()).unwrap(), b.to_rat().mul(m).unwrap());
            }
        }
    }

    #[test]
    fn decomposes_regular_triangular_order() {
        let (p1, p2) = column_modules();
        let reg = LatticeModule::regular("T", p1.algebra().clone()).unwrap().localize(5).unwrap();
        let d = decompose_local(&reg, DEFAULT_PRECISION, 0).unwrap();
        assert!(d.certificate.stable);
        assert_eq!(d.len(), 2);
        assert_eq!(d.class_count(), 2);
        assert_eq!(d.certificate.total_rank(), 3);

        let sum = LatticeModule::direct_sum("P1+P2", &[p1.clone(), p2.clone()]).unwrap();
        let opts = LocalIsoOptions::default();
        let v = iso_local(&sum, &reg, 5, &opts).unwrap();
        match v {
            IsoVerdict::Iso(w) => assert!(verify_local_iso(&sum, &reg, 5, &w).unwrap()),
            other => panic!("expected an isomorphism, got {other:?}"),
        }
        let p1sq = LatticeModule::direct_sum("P1+P1+P1", &[p1.clone(), p1.clone(), p1]).unwrap();
        assert!(iso_local(&p1sq, &reg, 5, &opts).unwrap().is_non_iso());

        let z = std::sync::Arc::new(FiniteAlgebra::matrix_algebra(BaseRing::GlobalZ, 1));
        let z3 = LatticeModule::regular("Z", z).unwrap().power(3).unwrap().localize(7).unwrap();
        let d = decompose_local(&z3, DEFAULT_PRECISION, 0).unwrap();
        assert_eq!(d.len(), 3);
        assert_eq!(d.class_count(), 1);
    }
}
