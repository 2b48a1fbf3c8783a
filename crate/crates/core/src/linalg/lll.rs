//! LLL reduction of a lattice basis with exact rational Gram–Schmidt data.

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::Zero;

fn dot(a: &[BigRational], b: &[BigRational]) -> BigRational {
    a.iter().zip(b).fold(BigRational::zero(), |s, (x, y)| s + x * y)
}

fn gram_schmidt(b: &[Vec<BigInt>]) -> (Vec<Vec<BigRational>>, Vec<BigRational>) {
    let mut star: Vec<Vec<BigRational>> = Vec::with_capacity(b.len());
    let mut norms = Vec::with_capacity(b.len());
    for v in b {
        let mut s: Vec<BigRational> = v.iter().map(|x| BigRational::from_integer(x.clone())).collect();
        for (u, n) in star.iter().zip(&norms) {
            if n == &BigRational::zero() {
                continue;
            }
            let mu = dot(&s, u) / n;
            for (si, ui) in s.iter_mut().zip(u) {
                *si -= &mu * ui;
            }
        }
        norms.push(dot(&s, &s));
        star.push(s);
    }
    (star, norms)
}

/// LLL-reduced basis (δ = 3/4) of the lattice spanned by linearly independent rows.
pub fn lll_reduce(basis: &[Vec<BigInt>]) -> Vec<Vec<BigInt>> {
    let mut b = basis.to_vec();
    let n = b.len();
    if n < 2 {
        return b;
    }
    let delta = BigRational::new(BigInt::from(3), BigInt::from(4));
    let mu = |b: &[Vec<BigInt>], star: &[Vec<BigRational>], norms: &[BigRational], i: usize, j: usize| {
        let v: Vec<BigRational> = b[i].iter().map(|x| BigRational::from_integer(x.clone())).collect();
        dot(&v, &star[j]) / &norms[j]
    };
    let (mut star, mut norms) = gram_schmidt(&b);
    let mut k = 1;
    while k < n {
        for j in (0..k).rev() {
            let m = mu(&b, &star, &norms, k, j);
            let r = m.round().to_integer();
            if !r.is_zero() {
                let bj = b[j].clone();
                for (x, y) in b[k].iter_mut().zip(&bj) {
                    *x -= &r * y;
                }
            }
        }
        let m = mu(&b, &star, &norms, k, k - 1);
        let lhs = &norms[k];
        let rhs = (&delta - &m * &m) * &norms[k - 1];
        if *lhs >= rhs {
            k += 1;
        } else {
            b.swap(k, k - 1);
            (star, norms) = gram_schmidt(&b);
            k = (k - 1).max(1);
        }
    }
    b
}

#[cfg(test)]
mod tests {
    use super::*;
    use num_traits::One;

    fn v(x: &[i64]) -> Vec<BigInt> {
        x.iter().map(|&a| BigInt::from(a)).collect()
    }

    #[test]
    fn reduces_skewed_basis() {
        let r = lll_reduce(&[v(&[1, 0]), v(&[1000, 1])]);
        assert!(r.iter().flatten().all(|x| x.magnitude() <= BigInt::one().magnitude()));
        let r = lll_reduce(&[v(&[1, 1, 1]), v(&[-1, 0, 2]), v(&[3, 5, 6])]);
        let norm = |x: &Vec<BigInt>| x.iter().map(|a| a * a).sum::<BigInt>();
        assert!(norm(&r[0]) <= BigInt::from(3));
    }
}
