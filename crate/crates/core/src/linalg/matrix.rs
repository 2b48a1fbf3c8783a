//! Dense integer and rational matrices with arbitrary-precision entries.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};

use super::LinalgError;

/// Row-major matrix over the integers.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct IntMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigInt>,
}

/// Row-major matrix over the rationals; entries are always in lowest terms.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct RatMatrix {
    rows: usize,
    cols: usize,
    data: Vec<BigRational>,
}

macro_rules! dense_common {
    ($ty:ident, $elem:ty) => {
        impl $ty {
            pub fn new(rows: usize, cols: usize, data: Vec<$elem>) -> Result<Self, LinalgError> {
                if data.len() != rows * cols {
                    return Err(LinalgError::EntryCount { rows, cols, got: data.len() });
                }
                Ok(Self { rows, cols, data })
            }

            pub fn zeros(rows: usize, cols: usize) -> Self {
                Self { rows, cols, data: vec![<$elem>::zero(); rows * cols] }
            }

            pub fn identity(n: usize) -> Self {
                let mut m = Self::zeros(n, n);
                for i in 0..n {
                    m[(i, i)] = <$elem>::one();
                }
                m
            }

            pub fn rows(&self) -> usize {
                self.rows
            }

            pub fn cols(&self) -> usize {
                self.cols
            }

            pub fn is_square(&self) -> bool {
                self.rows == self.cols
            }

            pub fn entries(&self) -> &[$elem] {
                &self.data
            }

            pub fn is_zero(&self) -> bool {
                self.data.iter().all(|x| x.is_zero())
            }

            pub fn row(&self, i: usize) -> &[$elem] {
                &self.data[i * self.cols..(i + 1) * self.cols]
            }

            pub fn col(&self, j: usize) -> Vec<$elem> {
                (0..self.rows).map(|i| self[(i, j)].clone()).collect()
            }

            pub fn from_cols(rows: usize, cols: &[Vec<$elem>]) -> Self {
                let mut m = Self::zeros(rows, cols.len());
                for (j, c) in cols.iter().enumerate() {
                    assert_eq!(c.len(), rows, "column length mismatch");
                    for (i, x) in c.iter().enumerate() {
                        m[(i, j)] = x.clone();
                    }
                }
                m
            }

            pub fn from_row_vecs(rows: &[Vec<$elem>]) -> Self {
                let cols = rows.first().map_or(0, |r| r.len());
                let mut data = Vec::with_capacity(rows.len() * cols);
                for r in rows {
                    assert_eq!(r.len(), cols, "ragged rows");
                    data.extend(r.iter().cloned());
                }
                Self { rows: rows.len(), cols, data }
            }

            pub fn transpose(&self) -> Self {
                let mut t = Self::zeros(self.cols, self.rows);
                for i in 0..self.rows {
                    for j in 0..self.cols {
                        t[(j, i)] = self[(i, j)].clone();
                    }
                }
                t
            }

            pub fn mul(&self, other: &Self) -> Result<Self, LinalgError> {
                if self.cols != other.rows {
                    return Err(LinalgError::Shape {
                        op: "mul",
                        left: (self.rows, self.cols),
                        right: (other.rows, other.cols),
                    });
                }
                let mut out = Self::zeros(self.rows, other.cols);
                for i in 0..self.rows {
                    for k in 0..self.cols {
                        let a = &self[(i, k)];
                        if a.is_zero() {
                            continue;
                        }
                        for j in 0..other.cols {
                            let b = &other[(k, j)];
                            if !b.is_zero() {
                                out.data[i * other.cols + j] += a * b;
                            }
                        }
                    }
                }
                Ok(out)
            }

            pub fn add(&self, other: &Self) -> Result<Self, LinalgError> {
                self.same_shape(other, "add")?;
                let data = self.data.iter().zip(&other.data).map(|(a, b)| a + b).collect();
                Ok(Self { rows: self.rows, cols: self.cols, data })
            }

            pub fn sub(&self, other: &Self) -> Result<Self, LinalgError> {
                self.same_shape(other, "sub")?;
                let data = self.data.iter().zip(&other.data).map(|(a, b)| a - b).collect();
                Ok(Self { rows: self.rows, cols: self.cols, data })
            }

            pub fn scale(&self, c: &$elem) -> Self {
                Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x * c).collect() }
            }

            pub fn neg(&self) -> Self {
                Self { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| -x).collect() }
            }

            pub fn mul_vec(&self, v: &[$elem]) -> Vec<$elem> {
                assert_eq!(v.len(), self.cols, "vector length mismatch");
                (0..self.rows)
                    .map(|i| {
                        let mut acc = <$elem>::zero();
                        for (a, b) in self.row(i).iter().zip(v) {
                            if !a.is_zero() && !b.is_zero() {
                                acc += a * b;
                            }
                        }
                        acc
                    })
                    .collect()
            }

            /// Columns of `self` followed by columns of `other`.
            pub fn hstack(&self, other: &Self) -> Result<Self, LinalgError> {
                if self.rows != other.rows {
                    return Err(LinalgError::Shape {
                        op: "hstack",
                        left: (self.rows, self.cols),
                        right: (other.rows, other.cols),
                    });
                }
                let mut out = Self::zeros(self.rows, self.cols + other.cols);
                for i in 0..self.rows {
                    for j in 0..self.cols {
                        out[(i, j)] = self[(i, j)].clone();
                    }
                    for j in 0..other.cols {
                        out[(i, self.cols + j)] = other[(i, j)].clone();
                    }
                }
                Ok(out)
            }

            pub fn vstack(&self, other: &Self) -> Result<Self, LinalgError> {
                if self.cols != other.cols {
                    return Err(LinalgError::Shape {
                        op: "vstack",
                        left: (self.rows, self.cols),
                        right: (other.rows, other.cols),
                    });
                }
                let mut data = self.data.clone();
                data.extend(other.data.iter().cloned());
                Ok(Self { rows: self.rows + other.rows, cols: self.cols, data })
            }

            /// Block-diagonal matrix with the given blocks.
            pub fn block_diag(blocks: &[Self]) -> Self {
                let rows = blocks.iter().map(|b| b.rows).sum();
                let cols = blocks.iter().map(|b| b.cols).sum();
                let mut out = Self::zeros(rows, cols);
                let (mut r0, mut c0) = (0, 0);
                for b in blocks {
                    for i in 0..b.rows {
                        for j in 0..b.cols {
                            out[(r0 + i, c0 + j)] = b[(i, j)].clone();
                        }
                    }
                    r0 += b.rows;
                    c0 += b.cols;
                }
                out
            }

            pub fn submatrix(&self, rows: std::ops::Range<usize>, cols: std::ops::Range<usize>) -> Self {
                let mut out = Self::zeros(rows.len(), cols.len());
                for (i, r) in rows.clone().enumerate() {
                    for (j, c) in cols.clone().enumerate() {
                        out[(i, j)] = self[(r, c)].clone();
                    }
                }
                out
            }

            pub fn select_cols(&self, idx: &[usize]) -> Self {
                let mut out = Self::zeros(self.rows, idx.len());
                for i in 0..self.rows {
                    for (j, &c) in idx.iter().enumerate() {
                        out[(i, j)] = self[(i, c)].clone();
                    }
                }
                out
            }

            pub fn swap_cols(&mut self, a: usize, b: usize) {
                if a == b {
                    return;
                }
                for i in 0..self.rows {
                    self.data.swap(i * self.cols + a, i * self.cols + b);
                }
            }

            pub fn swap_rows(&mut self, a: usize, b: usize) {
                if a == b {
                    return;
                }
                for j in 0..self.cols {
                    self.data.swap(a * self.cols + j, b * self.cols + j);
                }
            }

            fn same_shape(&self, other: &Self, op: &'static str) -> Result<(), LinalgError> {
                if self.rows != other.rows || self.cols != other.cols {
                    return Err(LinalgError::Shape {
                        op,
                        left: (self.rows, self.cols),
                        right: (other.rows, other.cols),
                    });
                }
                Ok(())
            }
        }

        impl Index<(usize, usize)> for $ty {
            type Output = $elem;
            fn index(&self, (i, j): (usize, usize)) -> &$elem {
                debug_assert!(i < self.rows && j < self.cols);
                &self.data[i * self.cols + j]
            }
        }

        impl IndexMut<(usize, usize)> for $ty {
            fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut $elem {
                debug_assert!(i < self.rows && j < self.cols);
                &mut self.data[i * self.cols + j]
            }
        }

        impl fmt::Debug for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                write!(f, "[")?;
                for i in 0..self.rows {
                    if i > 0 {
                        write!(f, "; ")?;
                    }
                    for j in 0..self.cols {
                        if j > 0 {
                            write!(f, " ")?;
                        }
                        write!(f, "{}", self[(i, j)])?;
                    }
                }
                write!(f, "]")
            }
        }

        impl fmt::Display for $ty {
            fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                fmt::Debug::fmt(self, f)
            }
        }
    };
}

dense_common!(IntMatrix, BigInt);
dense_common!(RatMatrix, BigRational);

impl IntMatrix {
    /// Convenience constructor from small integers given row by row.
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        let v: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
        if v.is_empty() {
            return Self::zeros(0, 0);
        }
        Self::from_row_vecs(&v)
    }

    pub fn diag(d: &[BigInt]) -> Self {
        let mut m = Self::zeros(d.len(), d.len());
        for (i, x) in d.iter().enumerate() {
            m[(i, i)] = x.clone();
        }
        m
    }

    pub fn to_rat(&self) -> RatMatrix {
        RatMatrix {
            rows: self.rows,
            cols: self.cols,
            data: self.data.iter().map(|x| BigRational::from_integer(x.clone())).collect(),
        }
    }

    /// Determinant by fraction-free (Bareiss) elimination.
    pub fn det(&self) -> Result<BigInt, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        if n == 0 {
            return Ok(BigInt::one());
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n - 1 {
            if a[(k, k)].is_zero() {
                match (k + 1..n).find(|&i| !a[(i, k)].is_zero()) {
                    Some(i) => {
                        a.swap_rows(i, k);
                        sign = -sign;
                    }
                    None => return Ok(BigInt::zero()),
                }
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (&a[(i, j)] * &a[(k, k)] - &a[(i, k)] * &a[(k, j)]) / &prev;
                    a[(i, j)] = v;
                }
                a[(i, k)] = BigInt::zero();
            }
            prev = a[(k, k)].clone();
        }
        Ok(sign * &a[(n - 1, n - 1)])
    }

    /// Gcd of all entries (zero for the zero matrix).
    pub fn content(&self) -> BigInt {
        self.data.iter().fold(BigInt::zero(), |g, x| g.gcd(x))
    }

    pub fn max_abs(&self) -> BigInt {
        self.data.iter().map(|x| x.abs()).max().unwrap_or_else(BigInt::zero)
    }
}

impl RatMatrix {
    pub fn from_i64(rows: &[&[i64]]) -> Self {
        IntMatrix::from_i64(rows).to_rat()
    }

    /// Least common multiple of all entry denominators.
    pub fn common_denominator(&self) -> BigInt {
        self.data.iter().fold(BigInt::one(), |l, x| l.lcm(x.denom()))
    }

    /// Returns `(M, d)` with `self = M / d`, `d > 0` minimal.
    pub fn to_int_scaled(&self) -> (IntMatrix, BigInt) {
        let d = self.common_denominator();
        let data = self.data.iter().map(|x| x.numer() * (&d / x.denom())).collect();
        (IntMatrix { rows: self.rows, cols: self.cols, data }, d)
    }

    /// Integer matrix if every entry is integral.
    pub fn to_int(&self) -> Option<IntMatrix> {
        if self.data.iter().all(|x| x.is_integer()) {
            Some(IntMatrix { rows: self.rows, cols: self.cols, data: self.data.iter().map(|x| x.to_integer()).collect() })
        } else {
            None
        }
    }

    pub fn is_integral(&self) -> bool {
        self.data.iter().all(|x| x.is_integer())
    }

    /// Reduced row echelon form; returns the form and the pivot columns.
    pub fn rref(&self) -> (RatMatrix, Vec<usize>) {
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..a.cols {
            if r == a.rows {
                break;
            }
            let Some(p) = (r..a.rows).find(|&i| !a[(i, c)].is_zero()) else { continue };
            a.swap_rows(p, r);
            let inv = a[(r, c)].recip();
            for j in c..a.cols {
                let v = &a[(r, j)] * &inv;
                a[(r, j)] = v;
            }
            for i in 0..a.rows {
                if i != r && !a[(i, c)].is_zero() {
                    let f = a[(i, c)].clone();
                    for j in c..a.cols {
                        if !a[(r, j)].is_zero() {
                            let v = &a[(i, j)] - &f * &a[(r, j)];
                            a[(i, j)] = v;
                        }
                    }
                }
            }
            pivots.push(c);
            r += 1;
        }
        (a, pivots)
    }

    pub fn rank(&self) -> usize {
        self.rref().1.len()
    }

    /// Basis of the right kernel, one column per free variable.
    pub fn kernel(&self) -> RatMatrix {
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut k = RatMatrix::zeros(self.cols, free.len());
        for (j, &f) in free.iter().enumerate() {
            k[(f, j)] = BigRational::one();
            for (i, &p) in pivots.iter().enumerate() {
                k[(p, j)] = -r[(i, f)].clone();
            }
        }
        k
    }

    pub fn det(&self) -> Result<BigRational, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let (m, d) = self.to_int_scaled();
        let det = m.det()?;
        Ok(BigRational::new(det, num_traits::pow(d, self.rows)))
    }

    pub fn inverse(&self) -> Result<RatMatrix, LinalgError> {
        if !self.is_square() {
            return Err(LinalgError::NotSquare { rows: self.rows, cols: self.cols });
        }
        let n = self.rows;
        let aug = self.hstack(&RatMatrix::identity(n))?;
        let (r, pivots) = aug.rref();
        if pivots.len() < n || pivots[n - 1] != n - 1 {
            return Err(LinalgError::Singular);
        }
        Ok(r.submatrix(0..n, n..2 * n))
    }

    /// Solves `self * X = B` for square invertible `self`.
    pub fn solve(&self, b: &RatMatrix) -> Result<RatMatrix, LinalgError> {
        self.inverse()?.mul(b)
    }
}

/// Serialized as a list of rows of decimal strings.
impl serde::Serialize for IntMatrix {
    fn serialize<S: serde::Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let rows: Vec<Vec<String>> =
            (0..self.rows).map(|i| self.row(i).iter().map(|x| x.to_string()).collect()).collect();
        rows.serialize(s)
    }
}
