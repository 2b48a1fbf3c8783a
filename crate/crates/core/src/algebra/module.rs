use std::sync::Arc;

use num_traits::Zero;

use super::{AlgebraError, FiniteAlgebra};
use crate::lattice::{BaseRing, Lattice};
use crate::linalg::RatMatrix;

/// A lattice in ℚᵈ stable under a representation of a finite algebra.
///
/// `ambient_action[i]` is the d×d matrix of basis element `i` on ℚᵈ and
/// `action[i]` the same map in lattice coordinates. A module assembled by
/// [`LatticeModule::direct_sum`] remembers its summands so that Hom and
/// decomposition computations can run blockwise.
#[derive(Clone, Debug)]
pub struct LatticeModule {
    name: String,
    algebra: Arc<FiniteAlgebra>,
    carrier: Lattice,
    ambient_action: Vec<RatMatrix>,
    action: Vec<RatMatrix>,
    summands: Vec<LatticeModule>,
}

impl LatticeModule {
    pub fn new(
        name: impl Into<String>,
        algebra: Arc<FiniteAlgebra>,
        carrier: Lattice,
        ambient_action: Vec<RatMatrix>,
    ) -> Result<Self, AlgebraError> {
        if carrier.base() != algebra.base() {
            return Err(AlgebraError::BaseMismatch(carrier.base(), algebra.base()));
        }
        algebra.check_representation(&ambient_action)?;
        let action = coordinate_action(&carrier, &ambient_action)?;
        Ok(LatticeModule { name: name.into(), algebra, carrier, ambient_action, action, summands: Vec::new() })
    }

    /// Λ acting on itself by left multiplication.
    pub fn regular(name: impl Into<String>, algebra: Arc<FiniteAlgebra>) -> Result<Self, AlgebraError> {
        let carrier = Lattice::standard(algebra.base(), algebra.rank());
        let action = algebra.regular_representation();
        Self::new(name, algebra, carrier, action)
    }

    pub fn direct_sum(name: impl Into<String>, parts: &[LatticeModule]) -> Result<Self, AlgebraError> {
        let first = parts.first().expect("direct sum of at least one module");
        let mut flat: Vec<LatticeModule> = Vec::new();
        for p in parts {
            if p.algebra != first.algebra && *p.algebra != *first.algebra {
                return Err(AlgebraError::AlgebraMismatch);
            }
            if p.summands.is_empty() {
                flat.push(p.clone());
            } else {
                flat.extend(p.summands.iter().cloned());
            }
        }
        let lattices: Vec<&Lattice> = flat.iter().map(|p| &p.carrier).collect();
        let carrier = Lattice::direct_sum(&lattices);
        let n = first.algebra.rank();
        let ambient_action: Vec<RatMatrix> = (0..n)
            .map(|i| RatMatrix::block_diag(&flat.iter().map(|p| p.ambient_action[i].clone()).collect::<Vec<_>>()))
            .collect();
        let action: Vec<RatMatrix> = (0..n)
            .map(|i| RatMatrix::block_diag(&flat.iter().map(|p| p.action[i].clone()).collect::<Vec<_>>()))
            .collect();
        let m = LatticeModule {
            name: name.into(),
            algebra: first.algebra.clone(),
            carrier,
            ambient_action,
            action,
            summands: if flat.len() > 1 { flat } else { Vec::new() },
        };
        debug_assert_eq!(coordinate_action(&m.carrier, &m.ambient_action).ok().as_ref(), Some(&m.action));
        Ok(m)
    }

    /// `n` copies of this module.
    pub fn power(&self, n: usize) -> Result<Self, AlgebraError> {
        let parts = vec![self.clone(); n];
        Self::direct_sum(format!("{}^{}", self.name, n), &parts)
    }

    /// The same module over ℤ localized at `p`.
    pub fn localize(&self, p: u64) -> Result<Self, AlgebraError> {
        let base = BaseRing::LocalAt(p);
        if self.base() == base {
            return Ok(self.clone());
        }
        let algebra = Arc::new(self.algebra.with_base(base));
        if self.summands.is_empty() {
            let carrier = self.carrier.with_base(base);
            return Self::new(self.name.clone(), algebra, carrier, self.ambient_action.clone());
        }
        let parts: Result<Vec<_>, _> = self.summands.iter().map(|s| s.localize(p)).collect();
        Self::direct_sum(self.name.clone(), &parts?)
    }

    pub fn renamed(&self, name: impl Into<String>) -> Self {
        LatticeModule { name: name.into(), ..self.clone() }
    }

    pub fn name(&self) -> &str {
        &self.name
    }

    pub fn algebra(&self) -> &Arc<FiniteAlgebra> {
        &self.algebra
    }

    pub fn base(&self) -> BaseRing {
        self.carrier.base()
    }

    pub fn carrier(&self) -> &Lattice {
        &self.carrier
    }

    pub fn rank(&self) -> usize {
        self.carrier.rank()
    }

    pub fn ambient_action(&self) -> &[RatMatrix] {
        &self.ambient_action
    }

    /// Action matrices in lattice coordinates.
    pub fn action(&self) -> &[RatMatrix] {
        &self.action
    }

    /// Declared direct summands; empty when the module was not built as a sum.
    pub fn summands(&self) -> &[LatticeModule] {
        &self.summands
    }

    /// The declared blocks (the module itself if it has no declared summands).
    pub fn blocks(&self) -> Vec<&LatticeModule> {
        if self.summands.is_empty() {
            vec![self]
        } else {
            self.summands.iter().collect()
        }
    }

    /// Coordinate offsets of the blocks.
    pub fn block_offsets(&self) -> Vec<usize> {
        let mut out = Vec::new();
        let mut acc = 0;
        for b in self.blocks() {
            out.push(acc);
            acc += b.rank();
        }
        out
    }

    pub fn same_algebra(&self, other: &LatticeModule) -> bool {
        let (a, b) = (&self.algebra, &other.algebra);
        Arc::ptr_eq(a, b)
            || (a.rank() == b.rank()
                && a.denominator() == b.denominator()
                && a.raw_constants() == b.raw_constants()
                && a.unit() == b.unit())
    }

    /// Canonical serialization of the carrier, used to break ties.
    pub fn canonical_string(&self) -> String {
        self.carrier.canonical_string()
    }
}

fn coordinate_action(carrier: &Lattice, ambient_action: &[RatMatrix]) -> Result<Vec<RatMatrix>, AlgebraError> {
    let basis = carrier.basis_vectors();
    let r = carrier.rank();
    let mut out = Vec::with_capacity(ambient_action.len());
    for (i, a) in ambient_action.iter().enumerate() {
        let mut m = RatMatrix::zeros(r, r);
        for (j, b) in basis.iter().enumerate() {
            let img = a.mul_vec(b);
            let c = carrier.coords(&img).ok_or(AlgebraError::ActionNotIntegral(i))?;
            for (k, x) in c.into_iter().enumerate() {
                if !x.is_zero() {
                    m[(k, j)] = x;
                }
            }
        }
        out.push(m);
    }
    Ok(out)
}
