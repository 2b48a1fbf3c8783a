//! Decomposition of ℤ₍p₎-lattice modules over the p-adic completion.
//!
//! Primitive idempotents of `End(M)/p` are lifted to `End(M) ⊗ ℤ/pᵏ` by the
//! Newton iteration `g ← 3g² − 2g³`, one at a time inside the complement of
//! those already lifted so that the family stays orthogonal.

use std::collections::HashMap;

use num_bigint::BigInt;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::Serialize;

use super::radical::{radical_mod_p, FpAlgebra};
use super::{hom_lattice, primitive_idempotents, AlgebraError, HomLattice, LatticeModule};
use crate::linalg::{FpMatrix, IntMatrix, ModPMatrix};

pub const DEFAULT_PRECISION: u32 = 8;
pub const MAX_PRECISION: u32 = 256;

/// Isomorphism invariants of an indecomposable completed summand `U = eM̂`:
/// its rank and the dimensions of `End(U)/p = eĀe` and of its radical.
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub struct SummandFingerprint {
    pub rank: usize,
    pub end_dim: usize,
    pub radical_dim: usize,
}

/// One indecomposable summand of a completed module, held as a lifted
/// idempotent of the declared block it lives in.
#[derive(Clone, Debug)]
pub struct LocalSummand {
    pub prime: u64,
    pub precision: u32,
    /// Index of the declared block and its coordinate offset in the module.
    pub block: usize,
    pub offset: usize,
    module: LatticeModule,
    /// Idempotent of `End(block)` modulo `p^precision`, in block coordinates.
    pub idempotent: IntMatrix,
    /// Columns of the idempotent spanning `eM̂` modulo `p^precision`.
    pub basis: IntMatrix,
    pub fingerprint: SummandFingerprint,
}

impl LocalSummand {
    pub fn rank(&self) -> usize {
        self.fingerprint.rank
    }

    /// The declared block containing this summand.
    pub fn block_module(&self) -> &LatticeModule {
        &self.module
    }
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CertificateEntry {
    pub fingerprint: SummandFingerprint,
    pub multiplicity: usize,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct DecompositionCertificate {
    pub summands: Vec<CertificateEntry>,
    pub precision: u32,
    pub stable: bool,
}

impl DecompositionCertificate {
    pub fn summand_count(&self) -> usize {
        self.summands.iter().map(|e| e.multiplicity).sum()
    }

    pub fn total_rank(&self) -> usize {
        self.summands.iter().map(|e| e.multiplicity * e.fingerprint.rank).sum()
    }
}

#[derive(Clone, Debug)]
pub struct LocalDecomposition {
    pub prime: u64,
    pub summands: Vec<LocalSummand>,
    /// Isomorphism class index of each summand, numbered by first appearance.
    pub classes: Vec<usize>,
    pub certificate: DecompositionCertificate,
    /// Summand bases placed side by side; invertible modulo p.
    pub witness: IntMatrix,
}

impl LocalDecomposition {
    pub fn len(&self) -> usize {
        self.summands.len()
    }

    pub fn is_empty(&self) -> bool {
        self.summands.is_empty()
    }

    pub fn class_count(&self) -> usize {
        self.classes.iter().max().map_or(0, |m| m + 1)
    }

    /// One representative summand per class, with its multiplicity.
    pub fn class_representatives(&self) -> Vec<(&LocalSummand, usize)> {
        let mut out: Vec<(&LocalSummand, usize)> = Vec::new();
        for (s, &c) in self.summands.iter().zip(&self.classes) {
            if c == out.len() {
                out.push((s, 1));
            } else {
                out[c].1 += 1;
            }
        }
        out
    }
}

/// Decomposes a ℤ₍p₎-lattice module into indecomposables over `ℤ̂_p`.
///
/// Precision starts at `precision` and doubles until two consecutive rounds
/// give the same certificate, capped at [`MAX_PRECISION`].
pub fn decompose_local(m: &LatticeModule, precision: u32, seed: u64) -> Result<LocalDecomposition, AlgebraError> {
    let p = m.base().prime().ok_or(AlgebraError::NotLocal)?;
    let mut k = precision.max(1);
    let mut prev = decompose_at(m, p, k, seed)?;
    loop {
        let next_k = k.saturating_mul(2);
        if next_k > MAX_PRECISION {
            let partial = prev.as_ref().map(|d| d.summands.iter().map(|s| s.rank()).collect()).unwrap_or_default();
            return Err(AlgebraError::Unstable { max_precision: MAX_PRECISION, partial });
        }
        let next = decompose_at(m, p, next_k, seed)?;
        if let (Some(a), Some(b)) = (&prev, &next) {
            if a.certificate.summands == b.certificate.summands {
                let mut out = b.clone();
                out.certificate.stable = true;
                return Ok(out);
            }
        }
        prev = next;
        k = next_k;
    }
}

/// One round at fixed precision; `None` if the lifted idempotents fail to verify.
fn decompose_at(m: &LatticeModule, p: u64, k: u32, seed: u64) -> Result<Option<LocalDecomposition>, AlgebraError> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut summands = Vec::new();
    let offsets = m.block_offsets();
    for (bi, block) in m.blocks().into_iter().enumerate() {
        match split_block(block, p, k, &mut rng)? {
            Some(parts) => {
                for (idem, basis, fp) in parts {
                    summands.push(LocalSummand {
                        prime: p,
                        precision: k,
                        block: bi,
                        offset: offsets[bi],
                        module: block.clone(),
                        idempotent: idem,
                        basis,
                        fingerprint: fp,
                    });
                }
            }
            None => return Ok(None),
        }
    }
    let mut cache = HomCache::default();
    let mut reps: Vec<usize> = Vec::new();
    let mut classes = Vec::with_capacity(summands.len());
    for i in 0..summands.len() {
        let mut found = None;
        for (c, &r) in reps.iter().enumerate() {
            if summands[r].fingerprint == summands[i].fingerprint
                && cache.isomorphic(&summands[r], &summands[i])?
            {
                found = Some(c);
                break;
            }
        }
        classes.push(found.unwrap_or_else(|| {
            reps.push(i);
            reps.len() - 1
        }));
    }
    let mut entries: Vec<CertificateEntry> = reps
        .iter()
        .enumerate()
        .map(|(c, &r)| CertificateEntry {
            fingerprint: summands[r].fingerprint.clone(),
            multiplicity: classes.iter().filter(|&&x| x == c).count(),
        })
        .collect();
    entries.sort_by(|a, b| a.fingerprint.cmp(&b.fingerprint));

    let r = m.rank();
    let mut witness = IntMatrix::zeros(r, r);
    let mut col = 0;
    for s in &summands {
        for j in 0..s.basis.cols() {
            for i in 0..s.basis.rows() {
                witness[(s.offset + i, col)] = s.basis[(i, j)].clone();
            }
            col += 1;
        }
    }
    if col != r || FpMatrix::from_int(&witness, p).det() == 0 {
        return Ok(None);
    }
    Ok(Some(LocalDecomposition {
        prime: p,
        summands,
        classes,
        certificate: DecompositionCertificate { summands: entries, precision: k, stable: false },
        witness,
    }))
}

type BlockPart = (IntMatrix, IntMatrix, SummandFingerprint);

fn split_block(block: &LatticeModule, p: u64, k: u32, rng: &mut ChaCha8Rng) -> Result<Option<Vec<BlockPart>>, AlgebraError> {
    let r = block.rank();
    if r == 0 {
        return Ok(Some(Vec::new()));
    }
    if p <= r as u64 {
        return Err(AlgebraError::UnsupportedCharacteristic { p, dim: r });
    }
    let end = hom_lattice(block, block)?;
    let mats: Vec<FpMatrix> = end.basis.iter().map(|h| FpMatrix::from_int(h, p)).collect();
    let alg = FpAlgebra::from_spanning(p, r, &mats);
    debug_assert_eq!(alg.dim(), end.rank(), "End is saturated, so reduction mod p is injective");
    let idems = primitive_idempotents(&alg, rng)?;

    let one = ModPMatrix::identity(p, k, r);
    let mut acc = ModPMatrix::zeros(p, k, r, r);
    let mut parts = Vec::with_capacity(idems.len());
    for (i, eps) in idems.iter().enumerate() {
        let e = if i + 1 == idems.len() {
            one.sub(&acc)
        } else {
            let c = alg.coords(eps).expect("idempotent lies in the algebra");
            let x = lift_combination(&end, alg.basis(), &mats, &c);
            let comp = one.sub(&acc);
            let g = comp.mul(&ModPMatrix::from_int(&x, p, k)).mul(&comp);
            match newton_idempotent(g) {
                Some(e) => e,
                None => return Ok(None),
            }
        };
        acc = acc.add(&e);
        let ei = e.lift();
        let ep = FpMatrix::from_int(&ei, p);
        if ep != *eps {
            return Ok(None);
        }
        let (_, pivots) = ep.rref();
        let basis = ei.select_cols(&pivots);
        let fp = fingerprint(&alg, eps)?;
        parts.push((ei, basis, fp));
    }
    if acc != one {
        return Ok(None);
    }
    Ok(Some(parts))
}

/// Integer combination of the End basis matching `Σ c_i · alg.basis[i]` mod p.
fn lift_combination(end: &HomLattice, alg_basis: &[FpMatrix], mats: &[FpMatrix], c: &[u64]) -> IntMatrix {
    let mut coeffs = vec![BigInt::from(0); end.rank()];
    for (ci, b) in c.iter().zip(alg_basis) {
        let idx = mats.iter().position(|m| m == b).expect("basis drawn from the End basis");
        coeffs[idx] = BigInt::from(*ci);
    }
    end.combine(&coeffs)
}

fn newton_idempotent(mut g: ModPMatrix) -> Option<ModPMatrix> {
    let three = BigInt::from(3);
    let two = BigInt::from(2);
    for _ in 0..64 {
        let g2 = g.mul(&g);
        if g2 == g {
            return Some(g);
        }
        let g3 = g2.mul(&g);
        g = g2.scale(&three).sub(&g3.scale(&two));
    }
    None
}

fn fingerprint(alg: &FpAlgebra, e: &FpMatrix) -> Result<SummandFingerprint, AlgebraError> {
    let corner: Vec<FpMatrix> = alg.basis().iter().map(|b| e.mul(b).mul(e)).collect();
    let c = FpAlgebra::from_spanning(alg.p(), alg.degree(), &corner);
    Ok(SummandFingerprint { rank: e.rank(), end_dim: c.dim(), radical_dim: radical_mod_p(&c)?.len() })
}

/// Memoizes Hom bases between declared blocks while comparing summands.
#[derive(Default)]
struct HomCache {
    homs: HashMap<(String, String), (Vec<FpMatrix>, Vec<FpMatrix>)>,
}

impl HomCache {
    fn isomorphic(&mut self, u: &LocalSummand, v: &LocalSummand) -> Result<bool, AlgebraError> {
        let key = (u.module.canonical_string() + u.module.name(), v.module.canonical_string() + v.module.name());
        if !self.homs.contains_key(&key) {
            let p = u.prime;
            let h = hom_lattice(&u.module, &v.module)?;
            let g = hom_lattice(&v.module, &u.module)?;
            let red = |x: &HomLattice| x.basis.iter().map(|b| FpMatrix::from_int(b, p)).collect::<Vec<_>>();
            self.homs.insert(key.clone(), (red(&h), red(&g)));
        }
        let (h, g) = &self.homs[&key];
        Ok(iso_by_composition(u, v, h, g))
    }
}

/// `eX̂ ≅ fŶ` iff some `e·g·f·h·e` is a unit of the local ring `eĀe`.
fn iso_by_composition(u: &LocalSummand, v: &LocalSummand, h: &[FpMatrix], g: &[FpMatrix]) -> bool {
    if u.prime != v.prime || u.rank() != v.rank() {
        return false;
    }
    let p = u.prime;
    let e = FpMatrix::from_int(&u.idempotent, p);
    let f = FpMatrix::from_int(&v.idempotent, p);
    let fhe: Vec<FpMatrix> = h.iter().map(|x| f.mul(x).mul(&e)).filter(|x| !x.is_zero()).collect();
    let egf: Vec<FpMatrix> = g.iter().map(|x| e.mul(x).mul(&f)).filter(|x| !x.is_zero()).collect();
    let target = u.rank();
    fhe.iter().any(|a| egf.iter().any(|b| b.mul(a).rank() == target))
}

/// A homomorphism `eX̂ → fŶ` that is an isomorphism, as `f·h·e` for a basis map `h`.
pub(crate) fn summand_isomorphism(u: &LocalSummand, v: &LocalSummand) -> Result<Option<IntMatrix>, AlgebraError> {
    let p = u.prime;
    let h = hom_lattice(&u.module, &v.module)?;
    let g = hom_lattice(&v.module, &u.module)?;
    let e = FpMatrix::from_int(&u.idempotent, p);
    let f = FpMatrix::from_int(&v.idempotent, p);
    for hb in &h.basis {
        let a = f.mul(&FpMatrix::from_int(hb, p)).mul(&e);
        if a.is_zero() {
            continue;
        }
        for gb in &g.basis {
            let b = e.mul(&FpMatrix::from_int(gb, p)).mul(&f);
            if b.mul(&a).rank() == u.rank() {
                let exact = v.idempotent.mul(hb)?.mul(&u.idempotent)?;
                return Ok(Some(exact));
            }
        }
    }
    Ok(None)
}

/// Whether two completed indecomposable summands are isomorphic.
pub fn summands_isomorphic(u: &LocalSummand, v: &LocalSummand) -> Result<bool, AlgebraError> {
    if u.prime != v.prime || u.fingerprint != v.fingerprint {
        return Ok(false);
    }
    if !u.module.same_algebra(&v.module) {
        return Err(AlgebraError::AlgebraMismatch);
    }
    HomCache::default().isomorphic(u, v)
}
