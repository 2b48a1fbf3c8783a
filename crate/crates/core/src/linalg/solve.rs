//! Linear systems over the integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::Zero;

use super::{hnf_basis, snf, IntMatrix, LinalgError, RatMatrix};

/// One solution of `A·x = b` plus a basis of the integer kernel of `A`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntSolution {
    pub x: Vec<BigInt>,
    /// Kernel basis as columns, in Hermite form.
    pub kernel: IntMatrix,
}

impl IntSolution {
    pub fn kernel_vectors(&self) -> Vec<Vec<BigInt>> {
        (0..self.kernel.cols()).map(|j| self.kernel.col(j)).collect()
    }
}

/// Solves `A·x = b` over ℤ. `Ok(None)` means no integer solution exists.
///
/// The returned `x` is reduced modulo the kernel lattice, so it is a
/// canonical representative of the solution coset.
pub fn solve_integer(a: &IntMatrix, b: &[BigInt]) -> Result<Option<IntSolution>, LinalgError> {
    if b.len() != a.rows() {
        return Err(LinalgError::Shape { op: "solve_integer", left: (a.rows(), a.cols()), right: (b.len(), 1) });
    }
    let s = snf(a);
    let ub = s.u.mul_vec(b);
    let r = s.rank();
    let mut y = vec![BigInt::zero(); a.cols()];
    for (i, ubi) in ub.iter().enumerate() {
        if i < r {
            let d = &s.d[(i, i)];
            let (q, rem) = ubi.div_rem(d);
            if !rem.is_zero() {
                return Ok(None);
            }
            y[i] = q;
        } else if !ubi.is_zero() {
            return Ok(None);
        }
    }
    let x = s.v.mul_vec(&y);
    let kernel_cols: Vec<usize> = (r..a.cols()).collect();
    let kernel = hnf_basis(&s.v.select_cols(&kernel_cols));
    let x = reduce_mod_lattice(&x, &kernel);
    Ok(Some(IntSolution { x, kernel }))
}

/// Reduces `x` by a Hermite basis so pivot coordinates land in `[0, pivot)`.
pub fn reduce_mod_lattice(x: &[BigInt], basis: &IntMatrix) -> Vec<BigInt> {
    let mut x = x.to_vec();
    let mut row = 0;
    for j in 0..basis.cols() {
        while row < basis.rows() && basis[(row, j)].is_zero() {
            row += 1;
        }
        if row == basis.rows() {
            break;
        }
        let q = x[row].div_floor(&basis[(row, j)]);
        if !q.is_zero() {
            for (i, xi) in x.iter_mut().enumerate() {
                *xi -= &q * &basis[(i, j)];
            }
        }
        row += 1;
    }
    x
}

/// ℤ-basis of `{x ∈ ℤⁿ : A·x = 0}` as columns in Hermite form.
pub fn integer_kernel(a: &IntMatrix) -> IntMatrix {
    integer_kernel_rat(&a.to_rat())
}

/// Integer kernel of a rational system: the saturation of its rational kernel.
pub fn integer_kernel_rat(a: &RatMatrix) -> IntMatrix {
    let k = a.kernel();
    if k.cols() == 0 {
        return IntMatrix::zeros(a.cols(), 0);
    }
    saturate(&k.to_int_scaled().0)
}

/// Saturation `ℚ·K ∩ ℤⁿ` of the column span of an integer matrix.
pub fn saturate(k: &IntMatrix) -> IntMatrix {
    if k.cols() == 0 || k.is_zero() {
        return IntMatrix::zeros(k.rows(), 0);
    }
    // Kᵀ·U = [H | 0] with U unimodular, so Kᵀ = H·(first rows of U⁻¹) and
    // those rows, recovered as H⁻¹·Kᵀ, span the saturated lattice.
    let kt = k.transpose();
    let h = hnf_basis(&kt);
    let rows: Vec<usize> = pivot_rows(&h);
    let square = select_rows(&h, &rows);
    let kt_rows = select_rows(&kt, &rows);
    let inv = square.to_rat().inverse().expect("pivot block is invertible");
    let s = inv.mul(&kt_rows.to_rat()).expect("shapes agree");
    let s = s.to_int().expect("saturation rows are integral");
    hnf_basis(&s.transpose())
}

fn pivot_rows(h: &IntMatrix) -> Vec<usize> {
    let mut out = Vec::with_capacity(h.cols());
    let mut row = 0;
    for j in 0..h.cols() {
        while h[(row, j)].is_zero() {
            row += 1;
        }
        out.push(row);
        row += 1;
    }
    out
}

fn select_rows(m: &IntMatrix, rows: &[usize]) -> IntMatrix {
    let vecs: Vec<Vec<BigInt>> = rows.iter().map(|&i| m.row(i).to_vec()).collect();
    IntMatrix::from_row_vecs(&vecs)
}
