//! Matrices over ℤ/pᵏ.

use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Zero};

use super::{IntMatrix, LinalgError, RatMatrix};

/// Matrix with entries reduced into `[0, pᵏ)`.
#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct ModPMatrix {
    prime: u64,
    exponent: u32,
    modulus: BigInt,
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

impl ModPMatrix {
    pub fn zeros(prime: u64, exponent: u32, rows: usize, cols: usize) -> Self {
        assert!(exponent >= 1, "precision must be at least 1");
        let modulus = num_traits::pow(BigInt::from(prime), exponent as usize);
        Self { prime, exponent, modulus, rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(prime: u64, exponent: u32, n: usize) -> Self {
        let mut m = Self::zeros(prime, exponent, n, n);
        for i in 0..n {
            m.data[i * n + i] = BigInt::one();
        }
        m
    }

    /// Reduction of an integer matrix.
    pub fn from_int(m: &IntMatrix, prime: u64, exponent: u32) -> Self {
        let mut out = Self::zeros(prime, exponent, m.rows(), m.cols());
        for (o, x) in out.data.iter_mut().zip(m.entries()) {
            *o = x.mod_floor(&out.modulus);
        }
        out
    }

    /// Reduction of a matrix over ℤ₍p₎; fails if a denominator is divisible by p.
    pub fn from_rat(m: &RatMatrix, prime: u64, exponent: u32) -> Result<Self, LinalgError> {
        let mut out = Self::zeros(prime, exponent, m.rows(), m.cols());
        let p = BigInt::from(prime);
        for (o, x) in out.data.iter_mut().zip(m.entries()) {
            if (x.denom() % &p).is_zero() {
                return Err(LinalgError::NotIntegralAt { prime });
            }
            let inv = mod_inverse(x.denom(), &out.modulus).ok_or(LinalgError::NotIntegralAt { prime })?;
            *o = (x.numer() * inv).mod_floor(&out.modulus);
        }
        Ok(out)
    }

    pub fn prime(&self) -> u64 {
        self.prime
    }

    pub fn exponent(&self) -> u32 {
        self.exponent
    }

    pub fn modulus(&self) -> &BigInt {
        &self.modulus
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|x| x.is_zero())
    }

    /// Lift to integers with entries in `[0, pᵏ)`.
    pub fn lift(&self) -> IntMatrix {
        IntMatrix::new(self.rows, self.cols, self.data.clone()).expect("shape is consistent")
    }

    /// Reduction to a lower precision.
    pub fn reduce_to(&self, exponent: u32) -> Self {
        assert!(exponent <= self.exponent);
        let mut out = Self::zeros(self.prime, exponent, self.rows, self.cols);
        for (o, x) in out.data.iter_mut().zip(&self.data) {
            *o = x.mod_floor(&out.modulus);
        }
        out
    }

    fn check(&self, other: &Self) {
        assert_eq!(self.modulus, other.modulus, "moduli differ");
    }

    pub fn mul(&self, other: &Self) -> Self {
        self.check(other);
        assert_eq!(self.cols, other.rows, "shape mismatch in mul");
        let mut out = Self::zeros(self.prime, self.exponent, self.rows, other.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = &self.data[i * self.cols + k];
                if a.is_zero() {
                    continue;
                }
                for j in 0..other.cols {
                    let b = &other.data[k * other.cols + j];
                    if !b.is_zero() {
                        out.data[i * other.cols + j] += a * b;
                    }
                }
            }
        }
        for x in &mut out.data {
            *x = x.mod_floor(&self.modulus);
        }
        out
    }

    pub fn add(&self, other: &Self) -> Self {
        self.check(other);
        let mut out = self.clone();
        for (o, x) in out.data.iter_mut().zip(&other.data) {
            *o = (&*o + x).mod_floor(&self.modulus);
        }
        out
    }

    pub fn sub(&self, other: &Self) -> Self {
        self.check(other);
        let mut out = self.clone();
        for (o, x) in out.data.iter_mut().zip(&other.data) {
            *o = (&*o - x).mod_floor(&self.modulus);
        }
        out
    }

    pub fn scale(&self, c: &BigInt) -> Self {
        let mut out = self.clone();
        for o in &mut out.data {
            *o = (&*o * c).mod_floor(&self.modulus);
        }
        out
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        let mut out = Self::zeros(self.prime, self.exponent, self.rows, idx.len());
        for i in 0..self.rows {
            for (j, &c) in idx.iter().enumerate() {
                out.data[i * idx.len() + j] = self.data[i * self.cols + c].clone();
            }
        }
        out
    }

    /// Inverse over ℤ/pᵏ; exists iff the reduction mod p is invertible.
    pub fn inverse(&self) -> Result<Self, LinalgError> {
        if self.rows != self.cols {
            return Err(LinalgError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let p = BigInt::from(self.prime);
        let mut a = self.clone();
        let mut inv = Self::identity(self.prime, self.exponent, n);
        for c in 0..n {
            let Some(r) = (c..n).find(|&r| !(&a[(r, c)] % &p).is_zero()) else {
                return Err(LinalgError::Singular);
            };
            a.swap_rows(r, c);
            inv.swap_rows(r, c);
            let u = mod_inverse(&a[(c, c)], &self.modulus).expect("unit");
            a.scale_row(c, &u);
            inv.scale_row(c, &u);
            for i in 0..n {
                if i != c && !a[(i, c)].is_zero() {
                    let f = a[(i, c)].clone();
                    a.row_sub(i, c, &f);
                    inv.row_sub(i, c, &f);
                }
            }
        }
        Ok(inv)
    }

    /// Solves `self · X = B` when `self` has a left inverse mod pᵏ, i.e. its
    /// columns are independent mod p. Returns `None` if `B` is outside the span.
    pub fn solve_left(&self, b: &Self) -> Option<Self> {
        self.check(b);
        let (n, r) = (self.rows, self.cols);
        let p = BigInt::from(self.prime);
        let mut a = self.clone();
        let mut rhs = b.clone();
        let mut pivot_rows = Vec::with_capacity(r);
        for c in 0..r {
            let row = pivot_rows.len();
            let found = (row..n).find(|&i| !(&a[(i, c)] % &p).is_zero())?;
            a.swap_rows(found, row);
            rhs.swap_rows(found, row);
            let u = mod_inverse(&a[(row, c)], &self.modulus).expect("unit");
            a.scale_row(row, &u);
            rhs.scale_row(row, &u);
            for i in 0..n {
                if i != row && !a[(i, c)].is_zero() {
                    let f = a[(i, c)].clone();
                    a.row_sub(i, row, &f);
                    rhs.row_sub(i, row, &f);
                }
            }
            pivot_rows.push(row);
        }
        // Rows past the pivots must be consistent.
        for i in r..n {
            if (0..rhs.cols).any(|j| !rhs[(i, j)].is_zero()) {
                return None;
            }
        }
        let mut x = Self::zeros(self.prime, self.exponent, r, b.cols);
        for i in 0..r {
            for j in 0..b.cols {
                x[(i, j)] = rhs[(i, j)].clone();
            }
        }
        Some(x)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn scale_row(&mut self, r: usize, f: &BigInt) {
        for j in 0..self.cols {
            let v = (&self.data[r * self.cols + j] * f).mod_floor(&self.modulus);
            self.data[r * self.cols + j] = v;
        }
    }

    fn row_sub(&mut self, dst: usize, src: usize, f: &BigInt) {
        for j in 0..self.cols {
            let s = &self.data[src * self.cols + j];
            if !s.is_zero() {
                let v = (&self.data[dst * self.cols + j] - f * s).mod_floor(&self.modulus);
                self.data[dst * self.cols + j] = v;
            }
        }
    }
}

impl Index<(usize, usize)> for ModPMatrix {
    type Output = BigInt;
    fn index(&self, (i, j): (usize, usize)) -> &BigInt {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for ModPMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut BigInt {
        &mut self.data[i * self.cols + j]
    }
}

/// Inverse of `a` modulo `m`, if `gcd(a, m) = 1`.
pub fn mod_inverse(a: &BigInt, m: &BigInt) -> Option<BigInt> {
    let eg = a.mod_floor(m).extended_gcd(m);
    if eg.gcd.is_one() {
        Some(eg.x.mod_floor(m))
    } else {
        None
    }
}
