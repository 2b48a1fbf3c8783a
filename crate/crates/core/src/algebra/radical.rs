//! Subalgebras of `End(F_pⁿ)`: trace-form radical and primitive idempotents.
//!
//! The trace-form criterion `J = {x : tr(xy) = 0 ∀y}` is exact whenever the
//! characteristic exceeds the dimension of the space the algebra acts on:
//! `tr(xᵏ) = 0` for `k ≤ n < p` forces `x` nilpotent by Newton's identities.

use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{AlgebraError, FiniteAlgebra};
use crate::linalg::{FpMatrix, Subspace};

/// A subalgebra of n×n matrices over `F_p`, given by a linear basis.
#[derive(Clone, Debug)]
pub struct FpAlgebra {
    p: u64,
    n: usize,
    basis: Vec<FpMatrix>,
    space: Subspace,
}

impl FpAlgebra {
    /// The span of `mats`; callers guarantee it is closed under products.
    pub fn from_spanning(p: u64, n: usize, mats: &[FpMatrix]) -> Self {
        let vecs: Vec<Vec<u64>> = mats.iter().map(|m| m.flatten()).collect();
        let space = Subspace::span(p, n * n, &vecs);
        let basis = space.chosen().iter().map(|&i| mats[i].clone()).collect();
        FpAlgebra { p, n, basis, space }
    }

    /// Regular representation of an abstract algebra reduced mod p.
    pub fn regular(alg: &FiniteAlgebra, p: u64) -> Result<Self, AlgebraError> {
        let mats: Result<Vec<FpMatrix>, _> =
            alg.regular_representation().iter().map(|m| FpMatrix::from_rat(m, p)).collect();
        Ok(Self::from_spanning(p, alg.rank(), &mats?))
    }

    pub fn p(&self) -> u64 {
        self.p
    }

    /// Dimension of the space acted on.
    pub fn degree(&self) -> usize {
        self.n
    }

    pub fn dim(&self) -> usize {
        self.basis.len()
    }

    pub fn basis(&self) -> &[FpMatrix] {
        &self.basis
    }

    pub fn coords(&self, x: &FpMatrix) -> Option<Vec<u64>> {
        self.space.coords(&x.flatten())
    }

    pub fn contains(&self, x: &FpMatrix) -> bool {
        self.space.contains(&x.flatten())
    }

    pub fn combine(&self, c: &[u64]) -> FpMatrix {
        let mut out = FpMatrix::zeros(self.p, self.n, self.n);
        for (ci, b) in c.iter().zip(&self.basis) {
            if *ci != 0 {
                out = out.axpy(*ci, b);
            }
        }
        out
    }

    pub fn is_commutative(&self) -> bool {
        self.basis.iter().enumerate().all(|(i, a)| self.basis[i + 1..].iter().all(|b| a.mul(b) == b.mul(a)))
    }
}

/// Jacobson radical of `a` as a list of independent matrices.
pub fn radical_mod_p(a: &FpAlgebra) -> Result<Vec<FpMatrix>, AlgebraError> {
    if a.p <= a.n as u64 {
        return Err(AlgebraError::UnsupportedCharacteristic { p: a.p, dim: a.n });
    }
    Ok(trace_radical(a))
}

fn trace_radical(a: &FpAlgebra) -> Vec<FpMatrix> {
    let m = a.dim();
    if m == 0 {
        return Vec::new();
    }
    let mut gram = FpMatrix::zeros(a.p, m, m);
    for i in 0..m {
        for j in i..m {
            let t = a.basis[i].mul(&a.basis[j]).trace();
            gram[(i, j)] = t;
            gram[(j, i)] = t;
        }
    }
    let k = gram.kernel();
    (0..k.cols()).map(|j| a.combine(&(0..m).map(|i| k[(i, j)]).collect::<Vec<_>>())).collect()
}

/// Coordinates modulo a subspace `J`: span `J` first, then the rest.
struct Quotient {
    space: Subspace,
    jdim: usize,
}

impl Quotient {
    fn new(p: u64, n: usize, j: &[FpMatrix], c: &[FpMatrix]) -> Self {
        let vecs: Vec<Vec<u64>> = j.iter().chain(c).map(|m| m.flatten()).collect();
        let space = Subspace::span(p, n * n, &vecs);
        Quotient { space, jdim: j.len() }
    }

    fn dim(&self) -> usize {
        self.space.dim() - self.jdim
    }

    fn reduce(&self, x: &FpMatrix) -> Vec<u64> {
        let c = self.space.coords(&x.flatten()).expect("element of the algebra");
        c[self.jdim..].to_vec()
    }
}

/// `{x ∈ span(c) : x^p − x ∈ J}`; linear when `span(c)/J` is commutative.
fn berlekamp(p: u64, c: &[FpMatrix], q: &Quotient) -> Vec<FpMatrix> {
    let m = c.len();
    let qd = q.dim();
    let mut f = FpMatrix::zeros(p, qd.max(1), m);
    for (i, b) in c.iter().enumerate() {
        let v = q.reduce(&b.pow(p).sub(b));
        for (r, x) in v.into_iter().enumerate() {
            f[(r, i)] = x;
        }
    }
    let k = f.kernel();
    (0..k.cols())
        .map(|j| {
            let mut x = FpMatrix::zeros(p, c[0].rows(), c[0].cols());
            for (i, b) in c.iter().enumerate() {
                if k[(i, j)] != 0 {
                    x = x.axpy(k[(i, j)], b);
                }
            }
            x
        })
        .collect()
}

/// Number of independent classes among `xs` modulo `J`.
fn quotient_rank(p: u64, xs: &[FpMatrix], q: &Quotient) -> usize {
    let vecs: Vec<Vec<u64>> = xs.iter().map(|x| q.reduce(x)).collect();
    Subspace::span(p, q.dim(), &vecs).dim()
}

/// A nontrivial idempotent `f = (e − (x − c·e)^{p−1})^{pᵗ}` of the corner,
/// given `x` with eigenvalues in `F_p` that is not congruent to a scalar.
fn eigen_idempotent(x: &FpMatrix, e: &FpMatrix) -> Option<FpMatrix> {
    let p = x.p();
    let mut pt = p;
    while pt < x.rows() as u64 {
        pt *= p;
    }
    for c in 0..p {
        let y = x.sub(&e.scale(c));
        let f = e.sub(&y.pow(p - 1)).pow(pt);
        if !f.is_zero() && &f != e {
            return Some(f);
        }
    }
    None
}

/// Picks from `b` an element whose class is not in `F_p·e + J` and splits `e` with it.
fn split_by(b: &[FpMatrix], e: &FpMatrix, q: &Quotient) -> Option<FpMatrix> {
    let p = e.p();
    let er = q.reduce(e);
    let line = Subspace::span(p, q.dim(), &[er]);
    b.iter().filter(|x| !line.contains(&q.reduce(x))).find_map(|x| eigen_idempotent(x, e))
}

const RANDOM_SPLIT_TRIALS: usize = 200;

/// A complete set of primitive orthogonal idempotents of `a` summing to 1.
pub fn primitive_idempotents(a: &FpAlgebra, rng: &mut ChaCha8Rng) -> Result<Vec<FpMatrix>, AlgebraError> {
    if a.p <= a.n as u64 {
        return Err(AlgebraError::UnsupportedCharacteristic { p: a.p, dim: a.n });
    }
    let one = FpMatrix::identity(a.p, a.n);
    let mut out = Vec::new();
    let mut stack = vec![one];
    while let Some(e) = stack.pop() {
        match split_corner(a, &e, rng)? {
            Some(f) => {
                stack.push(e.sub(&f));
                stack.push(f);
            }
            None => out.push(e),
        }
    }
    Ok(out)
}

/// Returns a nontrivial idempotent of `eAe`, or `None` if `e` is primitive.
fn split_corner(a: &FpAlgebra, e: &FpMatrix, rng: &mut ChaCha8Rng) -> Result<Option<FpMatrix>, AlgebraError> {
    let (p, n) = (a.p, a.n);
    let mats: Vec<FpMatrix> = a.basis.iter().map(|b| e.mul(b).mul(e)).collect();
    let corner = FpAlgebra::from_spanning(p, n, &mats);
    let j = trace_radical(&corner);
    let q = Quotient::new(p, n, &j, &corner.basis);
    if q.dim() <= 1 {
        return Ok(None);
    }
    let c = &corner.basis;
    let commutative = (0..c.len()).all(|i| (i + 1..c.len()).all(|k| q.reduce(&c[i].mul(&c[k]).sub(&c[k].mul(&c[i]))).iter().all(|&x| x == 0)));
    if commutative {
        let b = berlekamp(p, c, &q);
        if quotient_rank(p, &b, &q) <= 1 {
            return Ok(None);
        }
        return Ok(split_by(&b, e, &q));
    }
    // Noncommutative semisimple quotient: try central idempotents first.
    let z = center_mod(p, c, &q);
    let bz = berlekamp(p, &z, &q);
    if quotient_rank(p, &bz, &q) > 1 {
        if let Some(f) = split_by(&bz, e, &q) {
            return Ok(Some(f));
        }
    }
    // A single matrix block: a generic element generates a split commutative subalgebra.
    for _ in 0..RANDOM_SPLIT_TRIALS {
        let coeffs: Vec<u64> = (0..c.len()).map(|_| rng.gen_range(0..p)).collect();
        let x = corner.combine(&coeffs);
        let mut powers = vec![e.clone()];
        let mut span = Subspace::span(p, n * n, &[e.flatten()]);
        let mut cur = x.clone();
        loop {
            let before = span.dim();
            span = Subspace::span(p, n * n, &powers.iter().chain([&cur]).map(|m| m.flatten()).collect::<Vec<_>>());
            if span.dim() == before {
                break;
            }
            powers.push(cur.clone());
            cur = cur.mul(&x);
        }
        let sub = FpAlgebra::from_spanning(p, n, &powers);
        let js = trace_radical(&sub);
        let qs = Quotient::new(p, n, &js, &sub.basis);
        let bs = berlekamp(p, &sub.basis, &qs);
        if quotient_rank(p, &bs, &qs) > 1 {
            if let Some(f) = split_by(&bs, e, &qs) {
                return Ok(Some(f));
            }
        }
    }
    Err(AlgebraError::SplittingFailed(RANDOM_SPLIT_TRIALS))
}

/// Preimage in `span(c)` of the center of `span(c)/J`.
fn center_mod(p: u64, c: &[FpMatrix], q: &Quotient) -> Vec<FpMatrix> {
    let m = c.len();
    let qd = q.dim();
    let mut eqs = FpMatrix::zeros(p, (m * qd).max(1), m);
    for i in 0..m {
        for k in 0..m {
            let v = q.reduce(&c[i].mul(&c[k]).sub(&c[k].mul(&c[i])));
            for (r, x) in v.into_iter().enumerate() {
                eqs[(k * qd + r, i)] = x;
            }
        }
    }
    let ker = eqs.kernel();
    (0..ker.cols())
        .map(|j| {
            let mut x = FpMatrix::zeros(p, c[0].rows(), c[0].cols());
            for (i, b) in c.iter().enumerate() {
                if ker[(i, j)] != 0 {
                    x = x.axpy(ker[(i, j)], b);
                }
            }
            x
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::lattice::BaseRing;
    use rand::SeedableRng;

    #[test]
    fn radical_examples() {
        let field = FpAlgebra::from_spanning(7, 1, &[FpMatrix::identity(7, 1)]);
        assert!(radical_mod_p(&field).unwrap().is_empty());

        let dual = super::super::tests::dual_numbers(BaseRing::GlobalZ);
        let rd = radical_mod_p(&FpAlgebra::regular(&dual, 5).unwrap()).unwrap();
        assert_eq!(rd.len(), 1);
        assert!(rd[0].mul(&rd[0]).is_zero());

        let ut = FpAlgebra::regular(&super::super::tests::upper_triangular_2(), 7).unwrap();
        let r = radical_mod_p(&ut).unwrap();
        assert_eq!(r.len(), 1);
        assert!(r[0].mul(&r[0]).is_zero());

        let small = FpAlgebra::regular(&super::super::tests::upper_triangular_2(), 3).unwrap();
        assert!(matches!(radical_mod_p(&small), Err(AlgebraError::UnsupportedCharacteristic { .. })));
    }

    #[test]
    fn idempotents_of_matrix_and_split_algebras() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        // Full matrix algebra M_3(F_7) acting on F_7³: three rank-1 idempotents.
        let mut units = Vec::new();
        for i in 0..3 {
            for j in 0..3 {
                let mut m = FpMatrix::zeros(7, 3, 3);
                m[(i, j)] = 1;
                units.push(m);
            }
        }
        let m3 = FpAlgebra::from_spanning(7, 3, &units);
        let idem = primitive_idempotents(&m3, &mut rng).unwrap();
        assert_eq!(idem.len(), 3);
        let mut sum = FpMatrix::zeros(7, 3, 3);
        for (i, e) in idem.iter().enumerate() {
            assert_eq!(e.mul(e), *e);
            assert_eq!(e.rank(), 1);
            for f in &idem[i + 1..] {
                assert!(e.mul(f).is_zero());
            }
            sum = sum.add(e);
        }
        assert_eq!(sum, FpMatrix::identity(7, 3));

        // Diagonal algebra F_7 × F_7 with a nilpotent tail: upper triangular 2×2.
        let ut = FpAlgebra::regular(&super::super::tests::upper_triangular_2(), 7).unwrap();
        assert_eq!(primitive_idempotents(&ut, &mut rng).unwrap().len(), 2);

        // Dual numbers are local.
        let dual = FpAlgebra::regular(&super::super::tests::dual_numbers(BaseRing::GlobalZ), 5).unwrap();
        assert_eq!(primitive_idempotents(&dual, &mut rng).unwrap().len(), 1);
    }
}
