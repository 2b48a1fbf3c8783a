//! Smith normal form with both transforms.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{Signed, Zero};

use super::IntMatrix;

/// `d = u · m · v`, `d` diagonal with `d₁ | d₂ | …`, positive, zeros last.
#[derive(Clone, Debug)]
pub struct Smith {
    pub d: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl Smith {
    /// The nonzero diagonal entries.
    pub fn invariants(&self) -> Vec<BigInt> {
        (0..self.d.rows().min(self.d.cols()))
            .map(|i| self.d[(i, i)].clone())
            .take_while(|x| !x.is_zero())
            .collect()
    }

    pub fn rank(&self) -> usize {
        self.invariants().len()
    }
}

pub fn snf(m: &IntMatrix) -> Smith {
    let mut d = m.clone();
    let mut u = IntMatrix::identity(m.rows());
    let mut v = IntMatrix::identity(m.cols());
    diagonalize(&mut d, Some(&mut u), Some(&mut v));
    Smith { d, u, v }
}

/// Nonzero invariant factors only, without tracking transforms.
pub fn invariant_factors(m: &IntMatrix) -> Vec<BigInt> {
    let mut d = m.clone();
    diagonalize(&mut d, None, None);
    (0..d.rows().min(d.cols())).map(|i| d[(i, i)].clone()).take_while(|x| !x.is_zero()).collect()
}

fn row_combine(m: &mut IntMatrix, a: usize, b: usize, c: [&BigInt; 4]) {
    let [x, y, z, w] = c;
    for j in 0..m.cols() {
        let (va, vb) = (m[(a, j)].clone(), m[(b, j)].clone());
        if va.is_zero() && vb.is_zero() {
            continue;
        }
        m[(a, j)] = x * &va + y * &vb;
        m[(b, j)] = z * &va + w * &vb;
    }
}

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

fn row_axpy(m: &mut IntMatrix, dst: usize, src: usize, f: &BigInt) {
    for j in 0..m.cols() {
        if !m[(src, j)].is_zero() {
            let v = &m[(dst, j)] + f * &m[(src, j)];
            m[(dst, j)] = v;
        }
    }
}

/// Bezout transform sending (a, b) to (gcd, 0); determinant 1.
fn bezout(a: &BigInt, b: &BigInt) -> [BigInt; 4] {
    let eg = a.extended_gcd(b);
    let g = eg.gcd;
    [eg.x, eg.y, -(b / &g), a / &g]
}

fn diagonalize(d: &mut IntMatrix, mut u: Option<&mut IntMatrix>, mut v: Option<&mut IntMatrix>) {
    let (rows, cols) = (d.rows(), d.cols());
    for t in 0..rows.min(cols) {
        // Smallest nonzero entry of the trailing block becomes the pivot.
        let mut best: Option<(usize, usize)> = None;
        for i in t..rows {
            for j in t..cols {
                if !d[(i, j)].is_zero()
                    && best.map_or(true, |(bi, bj)| d[(i, j)].abs() < d[(bi, bj)].abs())
                {
                    best = Some((i, j));
                }
            }
        }
        let Some((bi, bj)) = best else { break };
        d.swap_rows(t, bi);
        if let Some(u) = u.as_deref_mut() {
            u.swap_rows(t, bi);
        }
        d.swap_cols(t, bj);
        if let Some(v) = v.as_deref_mut() {
            v.swap_cols(t, bj);
        }
        loop {
            let mut changed = false;
            for i in t + 1..rows {
                if d[(i, t)].is_zero() {
                    continue;
                }
                let (a, b) = (d[(t, t)].clone(), d[(i, t)].clone());
                if (&b % &a).is_zero() {
                    let q = -(&b / &a);
                    row_axpy(d, i, t, &q);
                    if let Some(u) = u.as_deref_mut() {
                        row_axpy(u, i, t, &q);
                    }
                } else {
                    let c = bezout(&a, &b);
                    let cr = [&c[0], &c[1], &c[2], &c[3]];
                    row_combine(d, t, i, cr);
                    if let Some(u) = u.as_deref_mut() {
                        row_combine(u, t, i, cr);
                    }
                    changed = true;
                }
            }
            for j in t + 1..cols {
                if d[(t, j)].is_zero() {
                    continue;
                }
                let (a, b) = (d[(t, t)].clone(), d[(t, j)].clone());
                if (&b % &a).is_zero() {
                    let q = -(&b / &a);
                    for i in 0..rows {
                        if !d[(i, t)].is_zero() {
                            let val = &d[(i, j)] + &q * &d[(i, t)];
                            d[(i, j)] = val;
                        }
                    }
                    if let Some(v) = v.as_deref_mut() {
                        for i in 0..v.rows() {
                            if !v[(i, t)].is_zero() {
                                let val = &v[(i, j)] + &q * &v[(i, t)];
                                v[(i, j)] = val;
                            }
                        }
                    }
                } else {
                    let c = bezout(&a, &b);
                    let cr = [&c[0], &c[1], &c[2], &c[3]];
                    col_combine(d, t, j, cr);
                    if let Some(v) = v.as_deref_mut() {
                        col_combine(v, t, j, cr);
                    }
                    changed = true;
                }
            }
            let clear = (t + 1..rows).all(|i| d[(i, t)].is_zero()) && (t + 1..cols).all(|j| d[(t, j)].is_zero());
            if !clear || changed {
                continue;
            }
            // Enforce divisibility: pull an offending row into row t.
            let p = d[(t, t)].clone();
            let bad = (t + 1..rows).find(|&i| (t + 1..cols).any(|j| !(&d[(i, j)] % &p).is_zero()));
            match bad {
                Some(i) => {
                    let one = BigInt::from(1);
                    row_axpy(d, t, i, &one);
                    if let Some(u) = u.as_deref_mut() {
                        row_axpy(u, t, i, &one);
                    }
                }
                None => break,
            }
        }
        if d[(t, t)].is_negative() {
            for j in 0..cols {
                let val = -&d[(t, j)];
                d[(t, j)] = val;
            }
            if let Some(u) = u.as_deref_mut() {
                for j in 0..u.cols() {
                    let val = -&u[(t, j)];
                    u[(t, j)] = val;
                }
            }
        }
    }
}
