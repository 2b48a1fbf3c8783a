//! Independent oracles shared by the property and acceptance suites. Nothing
//! here calls the normal-form code it is used to check.

#![allow(dead_code)]

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::sync::Arc;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use k0_core::algebra::{FiniteAlgebra, LatticeModule};
use k0_core::genus::{glue_object, split_by_primes, LocalSpec};
use k0_core::instance::{Instance, K0Context, VerifyOptions};
use k0_core::lattice::{localize, primary_components_at, quotient_invariants, BaseRing, Lattice};
use k0_core::linalg::{hnf, snf, IntMatrix, RatMatrix};

pub fn instance_path(name: &str) -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../instances").join(format!("{name}.k0i"))
}

pub const SHIPPED: [&str; 4] = ["triad_z7", "hereditary_tiled", "sw_fragment", "quad_m5"];

// Determinants and minors by cofactor expansion.

pub fn det(m: &[Vec<BigInt>]) -> BigInt {
    let n = m.len();
    if n == 0 {
        return BigInt::one();
    }
    if n == 1 {
        return m[0][0].clone();
    }
    let mut total = BigInt::zero();
    for j in 0..n {
        if m[0][j].is_zero() {
            continue;
        }
        let minor: Vec<Vec<BigInt>> =
            m[1..].iter().map(|r| r.iter().enumerate().filter(|(k, _)| *k != j).map(|(_, x)| x.clone()).collect()).collect();
        let t = &m[0][j] * det(&minor);
        if j % 2 == 0 {
            total += t;
        } else {
            total -= t;
        }
    }
    total
}

fn subsets(n: usize, k: usize) -> Vec<Vec<usize>> {
    if k == 0 {
        return vec![vec![]];
    }
    if n < k {
        return vec![];
    }
    let mut out = subsets(n - 1, k);
    for mut s in subsets(n - 1, k - 1) {
        s.push(n - 1);
        out.push(s);
    }
    out
}

pub fn rows_of(m: &IntMatrix) -> Vec<Vec<BigInt>> {
    (0..m.rows()).map(|i| m.row(i).to_vec()).collect()
}

/// `d_k` = gcd of all k×k minors, for k = 1..=min(rows, cols).
pub fn determinantal_divisors(m: &[Vec<BigInt>]) -> Vec<BigInt> {
    let (r, c) = (m.len(), m.first().map_or(0, |x| x.len()));
    let mut out = Vec::new();
    for k in 1..=r.min(c) {
        let mut g = BigInt::zero();
        for rs in subsets(r, k) {
            for cs in subsets(c, k) {
                let sub: Vec<Vec<BigInt>> = rs.iter().map(|&i| cs.iter().map(|&j| m[i][j].clone()).collect()).collect();
                g = g.gcd(&det(&sub));
            }
        }
        out.push(g);
    }
    out
}

/// Invariant factors from determinantal divisors: `s_k = d_k / d_{k-1}`, zeros dropped.
pub fn oracle_invariants(m: &[Vec<BigInt>]) -> Vec<BigInt> {
    let d = determinantal_divisors(m);
    let mut out = Vec::new();
    let mut prev = BigInt::one();
    for dk in d {
        if dk.is_zero() {
            break;
        }
        out.push(&dk / &prev);
        prev = dk;
    }
    out
}

fn rank_of(m: &[Vec<BigInt>]) -> usize {
    determinantal_divisors(m).iter().take_while(|d| !d.is_zero()).count()
}

fn unimodular(m: &IntMatrix) -> bool {
    m.rows() == m.cols() && det(&rows_of(m)).abs().is_one()
}

/// Checks HNF and SNF of `m` against the minor oracle; `Err` names the violation.
pub fn check_normal_forms(m: &IntMatrix) -> Result<(), String> {
    let rows = rows_of(m);
    let r = rank_of(&rows);
    let h = hnf(m);
    if !unimodular(&h.u) {
        return Err("HNF transform is not unimodular".into());
    }
    if m.mul(&h.u).unwrap() != h.h {
        return Err("H != M U".into());
    }
    // Column echelon shape, checked directly.
    let mut last: Option<usize> = None;
    for j in 0..h.h.cols() {
        match (0..h.h.rows()).find(|&i| !h.h[(i, j)].is_zero()) {
            None => {
                if j < r {
                    return Err("zero column before the rank".into());
                }
            }
            Some(i) => {
                if j >= r || last.is_some_and(|p| i <= p) || !h.h[(i, j)].is_positive() {
                    return Err("HNF pivot structure".into());
                }
                if (0..j).any(|k| h.h[(i, k)].is_negative() || h.h[(i, k)] >= h.h[(i, j)]) {
                    return Err("HNF entries left of a pivot are not reduced".into());
                }
                last = Some(i);
            }
        }
    }
    // Column operations preserve the gcd of r×r minors.
    let dm = determinantal_divisors(&rows);
    let dh = determinantal_divisors(&rows_of(&h.h));
    if r > 0 && dm[r - 1] != dh[r - 1] {
        return Err("HNF changes the gcd of maximal minors".into());
    }
    let s = snf(m);
    if !unimodular(&s.u) || !unimodular(&s.v) {
        return Err("SNF transforms are not unimodular".into());
    }
    if s.u.mul(m).unwrap().mul(&s.v).unwrap() != s.d {
        return Err("D != U M V".into());
    }
    for i in 0..s.d.rows() {
        for j in 0..s.d.cols() {
            if i != j && !s.d[(i, j)].is_zero() {
                return Err("SNF is not diagonal".into());
            }
        }
    }
    if s.invariants() != oracle_invariants(&rows) {
        return Err(format!("invariants {:?} vs oracle {:?}", s.invariants(), oracle_invariants(&rows)));
    }
    Ok(())
}

pub fn exhaustive_2x2() -> (usize, usize) {
    let mut bad = 0;
    let mut n = 0;
    for a in -3..=3i64 {
        for b in -3..=3i64 {
            for c in -3..=3i64 {
                for d in -3..=3i64 {
                    n += 1;
                    if check_normal_forms(&IntMatrix::from_i64(&[&[a, b], &[c, d]])).is_err() {
                        bad += 1;
                    }
                }
            }
        }
    }
    (n, bad)
}

pub fn random_matrix(rng: &mut ChaCha8Rng, rows: usize, cols: usize, bound: i64) -> IntMatrix {
    let data = (0..rows * cols).map(|_| BigInt::from(rng.gen_range(-bound..=bound))).collect();
    IntMatrix::new(rows, cols, data).unwrap()
}

/// 500 random 3×3 and 4×4 matrices; returns the number of mismatches.
pub fn random_normal_forms(rng: &mut ChaCha8Rng) -> usize {
    (0..500)
        .filter(|i| {
            let n = 3 + i % 2;
            check_normal_forms(&random_matrix(rng, n, n, 9)).is_err()
        })
        .count()
}

// Random lattice pairs over the trivial algebra ℤ acting on ℚⁿ.

pub fn z_module(name: &str, lat: Lattice) -> LatticeModule {
    let n = lat.ambient_dim();
    let z = Arc::new(FiniteAlgebra::matrix_algebra(BaseRing::GlobalZ, 1));
    LatticeModule::new(name, z, lat, vec![RatMatrix::identity(n)]).unwrap()
}

fn random_unimodular(rng: &mut ChaCha8Rng, n: usize) -> IntMatrix {
    let mut u = IntMatrix::identity(n);
    if n < 2 {
        return u;
    }
    for _ in 0..3 * n {
        let i = rng.gen_range(0..n);
        let j = (i + rng.gen_range(1..n)) % n;
        let c = BigInt::from(rng.gen_range(-2..=2i64));
        for k in 0..n {
            let v = &u[(j, k)] * &c;
            u[(i, k)] += v;
        }
    }
    u
}

const SMALL_PRIMES: [u64; 6] = [2, 3, 5, 7, 11, 13];

/// `M ⊆ N` of rank ≤ 4 whose index only involves primes ≤ 13.
pub fn random_pair(rng: &mut ChaCha8Rng) -> (Lattice, Lattice) {
    let n = rng.gen_range(1..=4);
    let mut nb = random_unimodular(rng, n);
    for i in 0..n {
        nb[(i, i)] += BigInt::from(rng.gen_range(0..3));
    }
    let nl = Lattice::from_int_generators(BaseRing::GlobalZ, &nb);
    let nl = if nl.rank() == n { nl } else { Lattice::standard(BaseRing::GlobalZ, n) };
    let mut d = IntMatrix::identity(n);
    for i in 0..n {
        let mut x = BigInt::one();
        for _ in 0..rng.gen_range(0..3) {
            x *= SMALL_PRIMES[rng.gen_range(0..SMALL_PRIMES.len())];
        }
        d[(i, i)] = x;
    }
    let k = random_unimodular(rng, n).mul(&d).unwrap().mul(&random_unimodular(rng, n)).unwrap();
    let m = nl.image_of_coords(&k);
    (m, nl)
}

/// Primary decomposition and gluing checks on one pair; `Err` names the violation.
pub fn check_lg_pair(m: &Lattice, n: &Lattice) -> Result<(), String> {
    let inv = quotient_invariants(n, m).map_err(|e| e.to_string())?;
    let exponent = inv.last().cloned().unwrap_or_else(BigInt::one);
    let primes: Vec<u64> = SMALL_PRIMES.iter().copied().filter(|p| (&exponent % p).is_zero()).collect();
    let pd = primary_components_at(n, m, &primes).map_err(|e| e.to_string())?;
    for (&p, mp) in &pd.components {
        if !mp.contains_lattice(m) || !n.contains_lattice(mp) {
            return Err(format!("M ⊆ M_{p} ⊆ N fails"));
        }
        for &q in &SMALL_PRIMES {
            let want = if q == p { m } else { n };
            if localize(mp, q).unwrap() != localize(want, q).unwrap() {
                return Err(format!("M_{p} has the wrong localization at {q}"));
            }
        }
    }
    if !primes.is_empty() {
        let w = &pd.witness;
        if !unimodular(w) {
            return Err("splitting witness is not unimodular".into());
        }
        // The first block of rows is the retraction u ↦ Σ c_i u_i onto M.
        let total: BigInt = pd.coefficients.iter().sum();
        let mut col = 0;
        for (i, mp) in pd.components.values().enumerate() {
            let mut c = pd.coefficients[i].clone();
            if i == 0 {
                c += BigInt::one() - &total;
            }
            for v in mp.basis_vectors() {
                let img: Vec<_> = v.iter().map(|x| x * num_rational::BigRational::from_integer(c.clone())).collect();
                let coords = m.coords(&img).ok_or("retraction leaves M")?;
                for (k, x) in coords.iter().enumerate() {
                    if !x.is_integer() || x.to_integer() != w[(k, col)] {
                        return Err("witness retraction block".into());
                    }
                }
                col += 1;
            }
        }
    }
    // The same splitting through the morphism interface, α the inclusion.
    let (mm, nm) = (z_module("M", m.clone()), z_module("N", n.clone()));
    let alpha = n.coords_of(m).unwrap().to_int().unwrap();
    let beta = m.coords_of(&n.scaled(&num_rational::BigRational::from_integer(exponent.clone()))).unwrap().to_int().unwrap();
    let s = split_by_primes(&mm, &nm, &exponent, &alpha, &beta).map_err(|e| e.to_string())?;
    let ranks: usize = s.parts.iter().map(|p| p.rank()).sum();
    if !s.primes.is_empty() && ranks != m.rank() + (s.parts.len() - 1) * n.rank() {
        return Err("part ranks do not add up".into());
    }
    if s.witness.rows() > 0 && !unimodular(&s.witness) {
        return Err("split witness is not unimodular".into());
    }
    // Gluing N with the components at their primes recovers M.
    let spec = LocalSpec {
        reference: nm.clone(),
        overrides: pd.components.iter().map(|(&p, l)| (p, z_module("Mp", l.clone()))).collect::<BTreeMap<_, _>>(),
    };
    let g = glue_object(&spec, 0).map_err(|e| e.to_string())?;
    if g.carrier() != m {
        return Err("gluing does not recover M".into());
    }
    Ok(())
}

pub fn random_lg_pairs(rng: &mut ChaCha8Rng, count: usize) -> Vec<String> {
    (0..count)
        .filter_map(|_| {
            let (m, n) = random_pair(rng);
            check_lg_pair(&m, &n).err()
        })
        .collect()
}

// Class number of discriminant −20.

/// Reduced positive definite forms `ax² + bxy + cy²` of discriminant `disc < 0`.
pub fn reduced_forms(disc: i64) -> Vec<(i64, i64, i64)> {
    let mut out = Vec::new();
    let amax = ((-disc) as f64 / 3.0).sqrt() as i64 + 1;
    for a in 1..=amax {
        for b in -a + 1..=a {
            let num = b * b - disc;
            if num % (4 * a) != 0 {
                continue;
            }
            let c = num / (4 * a);
            if c < a || (c == a && b < 0) {
                continue;
            }
            out.push((a, b, c));
        }
    }
    out
}

/// `h(ℤ[√−5])` by the Minkowski bound: every class contains an ideal of norm
/// ≤ (2/π)√20 < 3, so only the primes over 2 matter. `(2) = P²` with
/// `P = (2, 1+√−5)`, which is principal iff `x² + 5y² = 2` is solvable.
pub fn class_number_minus_20() -> u64 {
    let bound = 2.0 / std::f64::consts::PI * 20f64.sqrt();
    let mut h = 1;
    for p in 2..=(bound.floor() as i64) {
        if !(2..p).all(|d| p % d != 0) {
            continue;
        }
        // p splits or ramifies iff −5 is a square mod p (or p | 20).
        let non_inert = 20 % p == 0 || (0..p).any(|x| (x * x + 5) % p == 0);
        if !non_inert {
            continue;
        }
        let principal = (0..=p).any(|x| (0..=p).any(|y| x * x + 5 * y * y == p));
        if !principal {
            // P² = (p) is principal, so P has order 2.
            h *= 2;
        }
    }
    h
}

// Additivity and basis rank on a shipped instance, recomputed here.

fn int_rank(rows: &[Vec<i64>]) -> usize {
    let big: Vec<Vec<BigInt>> = rows.iter().map(|r| r.iter().map(|&x| BigInt::from(x)).collect()).collect();
    rank_of(&big)
}

pub fn check_instance_coords(name: &str) -> Result<String, String> {
    let inst = Instance::load(&instance_path(name)).map_err(|e| e.to_string())?;
    let ctx = K0Context::build(&inst, &VerifyOptions::default())?;
    let basis = ctx.basis_names(&inst)?;
    let mut sums = 0;
    if let Some(cat) = &inst.symbolic {
        // Every object, and the sum of each declared pair.
        for (a, b) in &inst.file.declared_isos {
            let ca = ctx.coords(&inst, a)?;
            let cb = ctx.coords(&inst, b)?;
            let cs = cat.coords(&cat.genus_of_sum(&[a, b]).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            if cs.iter().zip(ca.iter().zip(&cb)).any(|(s, (x, y))| *s != x + y) {
                return Err(format!("{name}: coords of {a} + {b} are not additive"));
            }
            sums += 1;
        }
    } else {
        for spec in &inst.file.modules {
            let Some(parts) = &spec.sum else { continue };
            let total = ctx.coords(&inst, &spec.name)?;
            let mut acc = vec![0i64; total.len()];
            for p in parts {
                for (a, x) in acc.iter_mut().zip(ctx.coords(&inst, p)?) {
                    *a += x;
                }
            }
            if acc != total {
                return Err(format!("{name}: coords of {} are not additive", spec.name));
            }
            sums += 1;
        }
    }
    // Basis vectors: S-objects and atoms are realized by declared names, or
    // by their descriptors in the symbolic case.
    let rows: Vec<Vec<i64>> = match &inst.symbolic {
        Some(cat) => cat
            .basis()
            .map_err(|e| e.to_string())?
            .iter()
            .map(|g| cat.coords(g).map_err(|e| e.to_string()))
            .collect::<Result<_, _>>()?,
        None => basis
            .iter()
            .map(|b| ctx.coords(&inst, b.split('@').next().unwrap()))
            .collect::<Result<_, _>>()?,
    };
    let r = int_rank(&rows);
    if r != basis.len() {
        return Err(format!("{name}: basis coordinate rank {r} < {}", basis.len()));
    }
    Ok(format!("{name}: {sums} sums additive, basis rank {r}"))
}

pub fn to_u64(x: &BigInt) -> u64 {
    x.to_u64().unwrap()
}
