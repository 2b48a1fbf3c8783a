//! Exact linear algebra over ℤ, ℚ, ℤ/pᵏ and F_p.

mod fp;
mod hnf;
mod lll;
mod matrix;
mod modp;
mod snf;
mod solve;

pub use fp::{inv_mod, pow_mod, reduce_big, FpMatrix, Subspace};
pub use hnf::{hnf, hnf_basis, is_hnf, is_unimodular, Hermite};
pub use lll::lll_reduce;
pub use matrix::{IntMatrix, RatMatrix};
pub use modp::{mod_inverse, ModPMatrix};
pub use snf::{invariant_factors, snf, Smith};
pub use solve::{integer_kernel, integer_kernel_rat, reduce_mod_lattice, saturate, solve_integer, IntSolution};

#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum LinalgError {
    #[error("expected {rows}x{cols} = {} entries, got {got}", rows * cols)]
    EntryCount { rows: usize, cols: usize, got: usize },
    #[error("shape mismatch in {op}: {left:?} vs {right:?}")]
    Shape { op: &'static str, left: (usize, usize), right: (usize, usize) },
    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },
    #[error("matrix is singular")]
    Singular,
    #[error("entry has a denominator divisible by {prime}")]
    NotIntegralAt { prime: u64 },
}

#[cfg(test)]
mod tests;
