//! Linear algebra over a prime field `F_p` with word-sized residues.

use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::ToPrimitive;

use super::{IntMatrix, LinalgError, RatMatrix};

#[derive(Clone, PartialEq, Eq, Hash, Debug)]
pub struct FpMatrix {
    p: u64,
    rows: usize,
    cols: usize,
    data: Vec<u64>,
}

#[inline]
fn mulmod(a: u64, b: u64, p: u64) -> u64 {
    ((a as u128 * b as u128) % p as u128) as u64
}

pub fn inv_mod(a: u64, p: u64) -> u64 {
    assert!(a % p != 0, "zero has no inverse");
    pow_mod(a % p, p - 2, p)
}

pub fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut r = 1 % p;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            r = mulmod(r, b, p);
        }
        b = mulmod(b, b, p);
        e >>= 1;
    }
    r
}

/// Reduces a big integer into `[0, p)`.
pub fn reduce_big(x: &BigInt, p: u64) -> u64 {
    x.mod_floor(&BigInt::from(p)).to_u64().expect("residue fits")
}

impl FpMatrix {
    pub fn zeros(p: u64, rows: usize, cols: usize) -> Self {
        Self { p, rows, cols, data: vec![0; rows * cols] }
    }

    pub fn identity(p: u64, n: usize) -> Self {
        let mut m = Self::zeros(p, n, n);
        for i in 0..n {
            m.data[i * n + i] = 1 % p;
        }
        m
    }

    pub fn from_int(m: &IntMatrix, p: u64) -> Self {
        let data = m.entries().iter().map(|x| reduce_big(x, p)).collect();
        Self { p, rows: m.rows(), cols: m.cols(), data }
    }

    /// Reduction of a matrix over ℤ₍p₎.
    pub fn from_rat(m: &RatMatrix, p: u64) -> Result<Self, LinalgError> {
        let mut data = Vec::with_capacity(m.rows() * m.cols());
        for x in m.entries() {
            let d = reduce_big(x.denom(), p);
            if d == 0 {
                return Err(LinalgError::NotIntegralAt { prime: p });
            }
            data.push(mulmod(reduce_big(x.numer(), p), inv_mod(d, p), p));
        }
        Ok(Self { p, rows: m.rows(), cols: m.cols(), data })
    }

    pub fn from_vec(p: u64, rows: usize, cols: usize, data: Vec<u64>) -> Self {
        assert_eq!(data.len(), rows * cols);
        Self { p, rows, cols, data: data.into_iter().map(|x| x % p).collect() }
    }

    pub fn to_int(&self) -> IntMatrix {
        IntMatrix::new(self.rows, self.cols, self.data.iter().map(|&x| BigInt::from(x)).collect())
            .expect("shape is consistent")
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn entries(&self) -> &[u64] {
        &self.data
    }

    pub fn is_zero(&self) -> bool {
        self.data.iter().all(|&x| x == 0)
    }

    pub fn mul(&self, o: &Self) -> Self {
        assert_eq!(self.cols, o.rows, "shape mismatch in mul");
        let p = self.p;
        let mut out = Self::zeros(p, self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.data[i * self.cols + k];
                if a == 0 {
                    continue;
                }
                for j in 0..o.cols {
                    let b = o.data[k * o.cols + j];
                    if b != 0 {
                        let idx = i * o.cols + j;
                        out.data[idx] = (out.data[idx] + mulmod(a, b, p)) % p;
                    }
                }
            }
        }
        out
    }

    pub fn add(&self, o: &Self) -> Self {
        let p = self.p;
        let data = self.data.iter().zip(&o.data).map(|(a, b)| (a + b) % p).collect();
        Self { p, rows: self.rows, cols: self.cols, data }
    }

    pub fn sub(&self, o: &Self) -> Self {
        let p = self.p;
        let data = self.data.iter().zip(&o.data).map(|(a, b)| (a + p - b) % p).collect();
        Self { p, rows: self.rows, cols: self.cols, data }
    }

    pub fn scale(&self, c: u64) -> Self {
        let p = self.p;
        Self { p, rows: self.rows, cols: self.cols, data: self.data.iter().map(|&x| mulmod(x, c % p, p)).collect() }
    }

    /// `self + c·o`.
    pub fn axpy(&self, c: u64, o: &Self) -> Self {
        let p = self.p;
        let data = self.data.iter().zip(&o.data).map(|(a, b)| (a + mulmod(c % p, *b, p)) % p).collect();
        Self { p, rows: self.rows, cols: self.cols, data }
    }

    pub fn pow(&self, mut e: u64) -> Self {
        let mut base = self.clone();
        let mut acc = Self::identity(self.p, self.rows);
        while e > 0 {
            if e & 1 == 1 {
                acc = acc.mul(&base);
            }
            e >>= 1;
            if e > 0 {
                base = base.mul(&base);
            }
        }
        acc
    }

    pub fn trace(&self) -> u64 {
        (0..self.rows.min(self.cols)).fold(0, |t, i| (t + self.data[i * self.cols + i]) % self.p)
    }

    pub fn transpose(&self) -> Self {
        let mut t = Self::zeros(self.p, self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                t.data[j * self.rows + i] = self.data[i * self.cols + j];
            }
        }
        t
    }

    pub fn select_cols(&self, idx: &[usize]) -> Self {
        let mut out = Self::zeros(self.p, self.rows, idx.len());
        for i in 0..self.rows {
            for (j, &c) in idx.iter().enumerate() {
                out.data[i * idx.len() + j] = self.data[i * self.cols + c];
            }
        }
        out
    }

    /// Reduced row echelon form and pivot columns.
    pub fn rref(&self) -> (Self, Vec<usize>) {
        let p = self.p;
        let mut a = self.clone();
        let mut pivots = Vec::new();
        let mut r = 0;
        for c in 0..a.cols {
            if r == a.rows {
                break;
            }
            let Some(pr) = (r..a.rows).find(|&i| a.data[i * a.cols + c] != 0) else { continue };
            if pr != r {
                for j in 0..a.cols {
                    a.data.swap(pr * a.cols + j, r * a.cols + j);
                }
            }
            let inv = inv_mod(a.data[r * a.cols + c], p);
            for j in 0..a.cols {
                a.data[r * a.cols + j] = mulmod(a.data[r * a.cols + j], inv, p);
            }
            for i in 0..a.rows {
                let f = a.data[i * a.cols + c];
                if i != r && f != 0 {
                    for j in 0..a.cols {
                        let s = a.data[r * a.cols + j];
                        if s != 0 {
                            let idx = i * a.cols + j;
                            a.data[idx] = (a.data[idx] + p - mulmod(f, s, p)) % p;
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

    /// Right kernel basis as columns.
    pub fn kernel(&self) -> Self {
        let p = self.p;
        let (r, pivots) = self.rref();
        let free: Vec<usize> = (0..self.cols).filter(|c| !pivots.contains(c)).collect();
        let mut k = Self::zeros(p, self.cols, free.len());
        for (j, &f) in free.iter().enumerate() {
            k.data[f * free.len() + j] = 1;
            for (i, &pc) in pivots.iter().enumerate() {
                k.data[pc * free.len() + j] = (p - r.data[i * r.cols + f]) % p;
            }
        }
        k
    }

    pub fn det(&self) -> u64 {
        assert_eq!(self.rows, self.cols);
        let p = self.p;
        let n = self.rows;
        let mut a = self.clone();
        let mut det = 1u64;
        for c in 0..n {
            let Some(r) = (c..n).find(|&i| a.data[i * n + c] != 0) else { return 0 };
            if r != c {
                for j in 0..n {
                    a.data.swap(r * n + j, c * n + j);
                }
                det = (p - det) % p;
            }
            let piv = a.data[c * n + c];
            det = mulmod(det, piv, p);
            let inv = inv_mod(piv, p);
            for i in c + 1..n {
                let f = mulmod(a.data[i * n + c], inv, p);
                if f != 0 {
                    for j in c..n {
                        let s = a.data[c * n + j];
                        a.data[i * n + j] = (a.data[i * n + j] + p - mulmod(f, s, p)) % p;
                    }
                }
            }
        }
        det
    }

    pub fn inverse(&self) -> Option<Self> {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        let mut aug = Self::zeros(self.p, n, 2 * n);
        for i in 0..n {
            for j in 0..n {
                aug.data[i * 2 * n + j] = self.data[i * n + j];
            }
            aug.data[i * 2 * n + n + i] = 1 % self.p;
        }
        let (r, piv) = aug.rref();
        if piv.len() < n || piv[n - 1] != n - 1 {
            return None;
        }
        let mut out = Self::zeros(self.p, n, n);
        for i in 0..n {
            for j in 0..n {
                out.data[i * n + j] = r.data[i * 2 * n + n + j];
            }
        }
        Some(out)
    }

    /// Flattened row-major entries as a vector.
    pub fn flatten(&self) -> Vec<u64> {
        self.data.clone()
    }
}

impl Index<(usize, usize)> for FpMatrix {
    type Output = u64;
    fn index(&self, (i, j): (usize, usize)) -> &u64 {
        &self.data[i * self.cols + j]
    }
}

impl IndexMut<(usize, usize)> for FpMatrix {
    fn index_mut(&mut self, (i, j): (usize, usize)) -> &mut u64 {
        &mut self.data[i * self.cols + j]
    }
}

/// A subspace of `F_pⁿ` kept in reduced echelon form, with coordinates of
/// arbitrary vectors relative to the original spanning vectors.
#[derive(Clone, Debug)]
pub struct Subspace {
    p: u64,
    dim: usize,
    /// Chosen basis vectors (a subset of the inputs, in input order).
    basis: Vec<Vec<u64>>,
    /// Indices of the chosen vectors among the inputs.
    chosen: Vec<usize>,
    /// Echelon rows with pivots, plus the combination of basis vectors each row is.
    echelon: Vec<(usize, Vec<u64>, Vec<u64>)>,
}

impl Subspace {
    /// Builds the span of `vectors`, keeping a maximal independent subset.
    pub fn span(p: u64, dim: usize, vectors: &[Vec<u64>]) -> Self {
        let mut s = Subspace { p, dim, basis: Vec::new(), chosen: Vec::new(), echelon: Vec::new() };
        for (idx, v) in vectors.iter().enumerate() {
            s.try_insert(v, idx);
        }
        s
    }

    fn try_insert(&mut self, v: &[u64], idx: usize) -> bool {
        let p = self.p;
        let k = self.basis.len();
        let mut w: Vec<u64> = v.iter().map(|x| x % p).collect();
        let mut comb = vec![0u64; k + 1];
        comb[k] = 1;
        for (piv, row, rc) in &self.echelon {
            let f = w[*piv];
            if f != 0 {
                for j in 0..self.dim {
                    w[j] = (w[j] + p - mulmod(f, row[j], p)) % p;
                }
                for (j, c) in rc.iter().enumerate() {
                    comb[j] = (comb[j] + p - mulmod(f, *c, p)) % p;
                }
            }
        }
        let Some(piv) = w.iter().position(|&x| x != 0) else { return false };
        let inv = inv_mod(w[piv], p);
        for x in &mut w {
            *x = mulmod(*x, inv, p);
        }
        for c in &mut comb {
            *c = mulmod(*c, inv, p);
        }
        for (_, _, rc) in &mut self.echelon {
            rc.push(0);
        }
        self.basis.push(v.to_vec());
        self.chosen.push(idx);
        self.echelon.push((piv, w, comb));
        true
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[Vec<u64>] {
        &self.basis
    }

    pub fn chosen(&self) -> &[usize] {
        &self.chosen
    }

    /// Coordinates of `v` with respect to [`Self::basis`], if `v` lies in the span.
    pub fn coords(&self, v: &[u64]) -> Option<Vec<u64>> {
        let p = self.p;
        let k = self.basis.len();
        let mut w: Vec<u64> = v.iter().map(|x| x % p).collect();
        let mut coords = vec![0u64; k];
        for (piv, row, rc) in &self.echelon {
            let f = w[*piv];
            if f != 0 {
                for j in 0..self.dim {
                    w[j] = (w[j] + p - mulmod(f, row[j], p)) % p;
                }
                for (j, c) in rc.iter().enumerate() {
                    coords[j] = (coords[j] + mulmod(f, *c, p)) % p;
                }
            }
        }
        if w.iter().all(|&x| x == 0) {
            Some(coords)
        } else {
            None
        }
    }

    pub fn contains(&self, v: &[u64]) -> bool {
        self.coords(v).is_some()
    }
}
