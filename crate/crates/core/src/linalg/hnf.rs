//! Column-style Hermite normal form.
//!
//! `H = M·U` with `U` unimodular. `H` is lower triangular in echelon sense:
//! the pivot of column `j` sits strictly below the pivot of column `j-1`,
//! pivots are positive, entries left of a pivot in its row lie in
//! `[0, pivot)`, and zero columns come last.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};

use super::IntMatrix;

/// Result of [`hnf`]: the normal form, the transform, and pivot rows.
#[derive(Clone, Debug)]
pub struct Hermite {
    pub h: IntMatrix,
    pub u: IntMatrix,
    pub pivot_rows: Vec<usize>,
}

impl Hermite {
    pub fn rank(&self) -> usize {
        self.pivot_rows.len()
    }
}

/// Hermite form with unimodular transform.
pub fn hnf(m: &IntMatrix) -> Hermite {
    let mut h = m.clone();
    let mut u = IntMatrix::identity(m.cols());
    let pivot_rows = reduce(&mut h, Some(&mut u));
    Hermite { h, u, pivot_rows }
}

/// Hermite form of the column span, keeping only the nonzero columns.
pub fn hnf_basis(m: &IntMatrix) -> IntMatrix {
    let mut h = m.clone();
    let pivots = reduce(&mut h, None);
    h.select_cols(&(0..pivots.len()).collect::<Vec<_>>())
}

fn col_axpy(m: &mut IntMatrix, dst: usize, src: usize, f: &BigInt) {
    if f.is_zero() {
        return;
    }
    for i in 0..m.rows() {
        if !m[(i, src)].is_zero() {
            let v = &m[(i, dst)] + f * &m[(i, src)];
            m[(i, dst)] = v;
        }
    }
}

/// Replaces columns (a, b) by (x·a + y·b, z·a + w·b); callers pass a 2×2
/// transform of determinant 1.
fn col_combine(m: &mut IntMatrix, a: usize, b: usize, c: [&BigInt; 4]) {
    let [x, y, z, w] = c;
    for i in 0..m.rows() {
        let (va, vb) = (m[(i, a)].clone(), m[(i, b)].clone());
        if va.is_zero() && vb.is_zero() {
            continue;
        }
        m[(i, a)] = x * &va + y * &vb;
        m[(i, b)] = z * &va + w * &vb;
    }
}

fn negate_col(m: &mut IntMatrix, j: usize) {
    for i in 0..m.rows() {
        let v = -&m[(i, j)];
        m[(i, j)] = v;
    }
}

fn reduce(h: &mut IntMatrix, mut u: Option<&mut IntMatrix>) -> Vec<usize> {
    let (rows, cols) = (h.rows(), h.cols());
    let mut pivots = Vec::new();
    let mut c = 0;
    for r in 0..rows {
        if c == cols {
            break;
        }
        // Clear row r to the right of column c, leaving the gcd in column c.
        for j in c + 1..cols {
            if h[(r, j)].is_zero() {
                continue;
            }
            if h[(r, c)].is_zero() {
                h.swap_cols(c, j);
                if let Some(u) = u.as_deref_mut() {
                    u.swap_cols(c, j);
                }
                continue;
            }
            let (a, b) = (h[(r, c)].clone(), h[(r, j)].clone());
            if (&b % &a).is_zero() {
                let q = -(&b / &a);
                col_axpy(h, j, c, &q);
                if let Some(u) = u.as_deref_mut() {
                    col_axpy(u, j, c, &q);
                }
                continue;
            }
            let eg = a.extended_gcd(&b);
            let g = eg.gcd;
            let (x, y) = (eg.x, eg.y);
            let z = -(&b / &g);
            let w = &a / &g;
            let coeffs = [&x, &y, &z, &w];
            col_combine(h, c, j, coeffs);
            if let Some(u) = u.as_deref_mut() {
                col_combine(u, c, j, coeffs);
            }
        }
        if h[(r, c)].is_zero() {
            continue;
        }
        if h[(r, c)].is_negative() {
            negate_col(h, c);
            if let Some(u) = u.as_deref_mut() {
                negate_col(u, c);
            }
        }
        let p = h[(r, c)].clone();
        for j in 0..c {
            let q = h[(r, j)].div_floor(&p);
            if !q.is_zero() {
                let nq = -q;
                col_axpy(h, j, c, &nq);
                if let Some(u) = u.as_deref_mut() {
                    col_axpy(u, j, c, &nq);
                }
            }
        }
        pivots.push(r);
        c += 1;
    }
    pivots
}

/// True if `h` already satisfies every condition of the Hermite form.
pub fn is_hnf(h: &IntMatrix) -> bool {
    let mut last_pivot: Option<usize> = None;
    let mut seen_zero = false;
    for j in 0..h.cols() {
        let first = (0..h.rows()).find(|&i| !h[(i, j)].is_zero());
        match first {
            None => seen_zero = true,
            Some(r) => {
                if seen_zero || last_pivot.is_some_and(|p| r <= p) || !h[(r, j)].is_positive() {
                    return false;
                }
                let p = &h[(r, j)];
                if (0..j).any(|k| h[(r, k)].is_negative() || &h[(r, k)] >= p) {
                    return false;
                }
                last_pivot = Some(r);
            }
        }
    }
    true
}

/// True if `u` is square with determinant ±1.
pub fn is_unimodular(u: &IntMatrix) -> bool {
    u.is_square() && u.det().map(|d| d.abs().is_one()).unwrap_or(false)
}
