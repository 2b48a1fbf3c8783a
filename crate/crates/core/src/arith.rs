//! Small-integer arithmetic: primality and factorization of big integers.

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};

pub fn is_prime_u64(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    for p in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        if n % p == 0 {
            return n == p;
        }
    }
    let (mut d, mut s) = (n - 1, 0);
    while d % 2 == 0 {
        d /= 2;
        s += 1;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    'witness: for a in [2u64, 3, 5, 7, 11, 13, 17, 19, 23, 29, 31, 37] {
        let mut x = crate::linalg::pow_mod(a, d, n);
        if x == 1 || x == n - 1 {
            continue;
        }
        for _ in 1..s {
            x = mulmod(x, x);
            if x == n - 1 {
                continue 'witness;
            }
        }
        return false;
    }
    true
}

fn rho(n: u64) -> u64 {
    if n % 2 == 0 {
        return 2;
    }
    let mulmod = |a: u64, b: u64| ((a as u128 * b as u128) % n as u128) as u64;
    for c in 1u64.. {
        let f = |x: u64| (mulmod(x, x) + c) % n;
        let (mut x, mut y, mut d) = (2u64, 2u64, 1u64);
        while d == 1 {
            x = f(x);
            y = f(f(y));
            d = x.abs_diff(y).gcd(&n);
        }
        if d != n {
            return d;
        }
    }
    unreachable!()
}

fn factor_u64(n: u64, out: &mut Vec<u64>) {
    if n == 1 {
        return;
    }
    if is_prime_u64(n) {
        out.push(n);
        return;
    }
    for p in [2u64, 3, 5, 7, 11, 13] {
        if n % p == 0 {
            out.push(p);
            return factor_u64(n / p, out);
        }
    }
    let d = rho(n);
    factor_u64(d, out);
    factor_u64(n / d, out);
}

/// Prime factorization of `|n|` as sorted `(prime, exponent)` pairs.
///
/// Panics if `n` is zero or has a prime factor beyond 64 bits after trial
/// division; instance data never comes close.
pub fn factorize(n: &BigInt) -> Vec<(u64, u32)> {
    assert!(!n.is_zero(), "cannot factor zero");
    let mut n = n.abs();
    let mut primes = Vec::new();
    let mut p = 2u64;
    while n.to_u64().is_none() {
        let bp = BigInt::from(p);
        while (&n % &bp).is_zero() {
            n /= &bp;
            primes.push(p);
        }
        p += 1;
        assert!(p < 1 << 24, "integer too large to factor");
    }
    factor_u64(n.to_u64().expect("fits"), &mut primes);
    primes.sort_unstable();
    let mut out: Vec<(u64, u32)> = Vec::new();
    for q in primes {
        match out.last_mut() {
            Some((r, e)) if *r == q => *e += 1,
            _ => out.push((q, 1)),
        }
    }
    out
}

pub fn prime_divisors(n: &BigInt) -> Vec<u64> {
    factorize(n).into_iter().map(|(p, _)| p).collect()
}

/// `p`-adic valuation of a nonzero integer.
pub fn valuation(n: &BigInt, p: u64) -> u32 {
    assert!(!n.is_zero());
    let bp = BigInt::from(p);
    let mut n = n.clone();
    let mut v = 0;
    while (&n % &bp).is_zero() {
        n /= &bp;
        v += 1;
    }
    v
}

/// Splits `n` into its `p`-part and the cofactor prime to `p`.
pub fn split_p_part(n: &BigInt, p: u64) -> (BigInt, BigInt) {
    let v = valuation(n, p);
    let pp = num_traits::pow(BigInt::from(p), v as usize);
    let rest = n / &pp;
    (pp, rest)
}

pub fn is_one_abs(n: &BigInt) -> bool {
    n.abs().is_one()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn factors_small_and_composite() {
        assert_eq!(factorize(&BigInt::from(24)), vec![(2, 3), (3, 1)]);
        assert_eq!(factorize(&BigInt::from(-1)), vec![]);
        let n = BigInt::from(1_000_003u64) * BigInt::from(998_244_353u64);
        assert_eq!(factorize(&n), vec![(1_000_003, 1), (998_244_353, 1)]);
    }

    #[test]
    fn valuation_and_split() {
        assert_eq!(valuation(&BigInt::from(96), 2), 5);
        assert_eq!(split_p_part(&BigInt::from(-12), 2), (BigInt::from(4), BigInt::from(-3)));
    }
}
