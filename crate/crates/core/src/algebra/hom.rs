use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

use super::{AlgebraError, FiniteAlgebra, LatticeModule};
use crate::lattice::RatVec;
use crate::linalg::{integer_kernel_rat, IntMatrix, RatMatrix};

/// A basis of `Hom_Λ(M, N)` over the base ring, as `rank N × rank M`
/// integer matrices in lattice coordinates.
#[derive(Clone, Debug)]
pub struct HomLattice {
    pub rows: usize,
    pub cols: usize,
    pub basis: Vec<IntMatrix>,
    /// Rows of the flattened basis that form an invertible block, and that
    /// block's inverse; used to read off coordinates.
    pivot_rows: Vec<usize>,
    pivot_inverse: RatMatrix,
}

impl HomLattice {
    fn new(rows: usize, cols: usize, basis: Vec<IntMatrix>) -> Self {
        let h = basis.len();
        let flat = flatten_all(&basis, rows * cols);
        let (_, pivots) = flat.transpose().rref();
        let mut block = RatMatrix::zeros(h, h);
        for (i, &r) in pivots.iter().enumerate() {
            for j in 0..h {
                block[(i, j)] = flat[(r, j)].clone();
            }
        }
        let pivot_inverse = if h == 0 { block } else { block.inverse().expect("basis is independent") };
        HomLattice { rows, cols, basis, pivot_rows: pivots, pivot_inverse }
    }

    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Coordinates of a rational matrix in the basis, if it lies in the rational span.
    pub fn coords(&self, x: &RatMatrix) -> Option<RatVec> {
        let h = self.rank();
        let v: Vec<BigRational> = self.pivot_rows.iter().map(|&r| x[(r / self.cols, r % self.cols)].clone()).collect();
        let c = if h == 0 { Vec::new() } else { self.pivot_inverse.mul_vec(&v) };
        let mut recon = RatMatrix::zeros(self.rows, self.cols);
        for (ci, b) in c.iter().zip(&self.basis) {
            if !ci.is_zero() {
                recon = recon.add(&b.to_rat().scale(ci)).expect("same shape");
            }
        }
        (recon == *x).then_some(c)
    }

    /// `Σ c_i · basis_i`.
    pub fn combine(&self, c: &[BigInt]) -> IntMatrix {
        let mut out = IntMatrix::zeros(self.rows, self.cols);
        for (ci, b) in c.iter().zip(&self.basis) {
            if !ci.is_zero() {
                out = out.add(&b.scale(ci)).expect("same shape");
            }
        }
        out
    }
}

fn flatten_all(basis: &[IntMatrix], len: usize) -> RatMatrix {
    let cols: Vec<RatVec> =
        basis.iter().map(|b| b.entries().iter().map(|x| BigRational::from_integer(x.clone())).collect()).collect();
    if cols.is_empty() {
        return RatMatrix::zeros(len, 0);
    }
    RatMatrix::from_cols(len, &cols)
}

/// `Hom_Λ(M, N)`: all base-ring maps commuting with the action.
pub fn hom_lattice(m: &LatticeModule, n: &LatticeModule) -> Result<HomLattice, AlgebraError> {
    if !m.same_algebra(n) {
        return Err(AlgebraError::AlgebraMismatch);
    }
    let (mb, nb) = (m.blocks(), n.blocks());
    if mb.len() == 1 && nb.len() == 1 {
        let basis = hom_basis(m.action(), n.action(), m.rank(), n.rank());
        return Ok(HomLattice::new(n.rank(), m.rank(), basis));
    }
    let (mo, no) = (m.block_offsets(), n.block_offsets());
    let mut basis = Vec::new();
    for (i, nblk) in nb.iter().enumerate() {
        for (j, mblk) in mb.iter().enumerate() {
            for b in hom_basis(mblk.action(), nblk.action(), mblk.rank(), nblk.rank()) {
                let mut x = IntMatrix::zeros(n.rank(), m.rank());
                for r in 0..b.rows() {
                    for c in 0..b.cols() {
                        x[(no[i] + r, mo[j] + c)] = b[(r, c)].clone();
                    }
                }
                basis.push(x);
            }
        }
    }
    Ok(HomLattice::new(n.rank(), m.rank(), basis))
}

/// Integer solutions `X` of `N_a·X = X·M_a` for every basis element `a`.
fn hom_basis(ma: &[RatMatrix], na: &[RatMatrix], rm: usize, rn: usize) -> Vec<IntMatrix> {
    let unknowns = rn * rm;
    if unknowns == 0 {
        return Vec::new();
    }
    let mut eqs = RatMatrix::zeros(ma.len() * unknowns, unknowns);
    for (a, (m, n)) in ma.iter().zip(na).enumerate() {
        let off = a * unknowns;
        for i in 0..rn {
            for j in 0..rm {
                let row = off + i * rm + j;
                for k in 0..rn {
                    if !n[(i, k)].is_zero() {
                        eqs[(row, k * rm + j)] += &n[(i, k)];
                    }
                }
                for k in 0..rm {
                    if !m[(k, j)].is_zero() {
                        eqs[(row, i * rm + k)] -= &m[(k, j)];
                    }
                }
            }
        }
    }
    let k = integer_kernel_rat(&eqs);
    (0..k.cols())
        .map(|c| IntMatrix::new(rn, rm, k.col(c)).expect("reshape"))
        .collect()
}

/// `End_Λ(M)` as a finite algebra on the Hom basis.
pub fn end_ring(m: &LatticeModule) -> Result<FiniteAlgebra, AlgebraError> {
    let h = hom_lattice(m, m)?;
    let n = h.rank();
    let mut constants = vec![BigInt::zero(); n * n * n];
    for (i, a) in h.basis.iter().enumerate() {
        for (j, b) in h.basis.iter().enumerate() {
            let prod = a.mul(b)?.to_rat();
            let c = h.coords(&prod).expect("End is closed under composition");
            for (k, x) in c.into_iter().enumerate() {
                constants[(i * n + j) * n + k] = x.to_integer();
            }
        }
    }
    let unit = h.coords(&RatMatrix::identity(m.rank())).expect("identity is an endomorphism");
    FiniteAlgebra::new(m.base(), n, BigInt::from(1), constants, unit)
}

/// `dim_ℚ Hom(QM, QN)`.
pub fn rational_hom_dim(m: &LatticeModule, n: &LatticeModule) -> Result<usize, AlgebraError> {
    Ok(hom_lattice(m, n)?.rank())
}

/// `QM ≅ QN`, decided by `dim End QM + dim End QN = 2·dim Hom(QM, QN)`,
/// which characterizes equal multiplicities over a semisimple algebra.
pub fn rationally_isomorphic(m: &LatticeModule, n: &LatticeModule) -> Result<bool, AlgebraError> {
    if m.rank() != n.rank() {
        return Ok(false);
    }
    let a = rational_hom_dim(m, m)?;
    let b = rational_hom_dim(n, n)?;
    let c = rational_hom_dim(m, n)?;
    Ok(a + b == 2 * c)
}
