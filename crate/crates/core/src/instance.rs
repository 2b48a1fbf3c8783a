//! Instance files: JSON with integers as decimal strings. Loading re-checks
//! the algebra axioms, the module axioms and registry consistency; [`verify`]
//! runs every declared identity and reports pass, fail or inconclusive.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Arc;
use std::time::Instant;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::algebra::{
    decompose_local, hom_lattice, iso_local, verify_local_iso, AlgebraError, FiniteAlgebra, IsoVerdict, LatticeModule,
    LocalIsoOptions, DEFAULT_PRECISION,
};
use crate::arith::is_prime_u64;
use crate::genus::{genus_equal, glue_object, iso_global, roiter_complement, split_by_primes, LocalSpec, Verdict};
use crate::k0_global::{ker_g_group, GlobalK0, K0Presentation, SymbolicAtom, SymbolicCategory, SymbolicObject};
use crate::k0_local::{coordinate_rank, describe, LocalK0};
use crate::lattice::{BaseRing, Lattice};
use crate::linalg::{IntMatrix, RatMatrix};

/// An integer written as a decimal string (bare JSON integers are accepted too).
#[derive(Clone, Debug, PartialEq, Eq, PartialOrd, Ord)]
pub struct Dec(pub BigInt);

impl Serialize for Dec {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.0.to_string())
    }
}

impl<'de> Deserialize<'de> for Dec {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Raw {
            S(String),
            I(i64),
        }
        match Raw::deserialize(d)? {
            Raw::S(s) => s.trim().parse::<BigInt>().map(Dec).map_err(|_| serde::de::Error::custom(format!("not an integer: {s:?}"))),
            Raw::I(i) => Ok(Dec(BigInt::from(i))),
        }
    }
}

impl Dec {
    fn i64(&self) -> Result<i64, InstanceError> {
        self.0.to_i64().ok_or_else(|| InstanceError::Invalid(format!("{} does not fit in 64 bits", self.0)))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum InstanceKind {
    Lattice,
    Symbolic,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct AlgebraSpec {
    pub rank: usize,
    #[serde(default = "one")]
    pub denominator: Dec,
    /// Nonzero structure constants `[i, j, k, c]`: `e_i e_j` has `c/denominator` on `e_k`.
    pub constants: Vec<(usize, usize, usize, Dec)>,
    pub unit: Vec<Dec>,
}

fn one() -> Dec {
    Dec(BigInt::from(1))
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RepresentationSpec {
    pub name: String,
    pub dim: usize,
    /// One matrix per algebra basis element, row-major.
    pub action: Vec<Vec<Vec<Dec>>>,
}

/// Either a lattice spanned by `generators` in a representation, or a direct sum.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ModuleSpec {
    pub name: String,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub representation: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub generators: Option<Vec<Vec<Dec>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sum: Option<Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RegistrySpec {
    /// Candidates for the S-object of each rational type.
    pub s_objects: Vec<Vec<String>>,
    /// Atom candidates of a local instance.
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub atoms: Vec<String>,
    /// Atom candidates at each non-maximal prime of a global instance.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub non_maximal_primes: BTreeMap<u64, Vec<String>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ClassGroupSpec {
    /// Index of the rational type in `registry.s_objects`.
    pub w: usize,
    pub invariants: Vec<Dec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub members: Vec<String>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GlueSpec {
    pub name: String,
    pub reference: String,
    pub overrides: BTreeMap<u64, String>,
}

/// `α: source → ⊕target` and `β` back with `βα = a` and `αβ = a`. Lattice
/// instances give both maps in lattice coordinates; symbolic ones declare them.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SplittingSpec {
    pub name: String,
    pub source: String,
    pub target: Vec<String>,
    pub a: Dec,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub alpha: Option<Vec<Vec<Dec>>>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub beta: Option<Vec<Vec<Dec>>>,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "check", rename_all = "snake_case", deny_unknown_fields)]
pub enum Identity {
    Decompose {
        module: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        prime: Option<Dec>,
        summands: usize,
    },
    HomRank {
        source: String,
        target: String,
        rank: usize,
    },
    EndRank {
        module: String,
        rank: usize,
    },
    IsoLocal {
        left: String,
        right: String,
        #[serde(default, skip_serializing_if = "Option::is_none")]
        prime: Option<Dec>,
        expected: bool,
    },
    Indecomposable {
        module: String,
        expected: bool,
    },
    CoreAndAtoms {
        module: String,
        atoms: Vec<String>,
        s_part: Vec<String>,
    },
    Coords {
        module: String,
        expected: BTreeMap<String, Dec>,
    },
    Glue {
        spec: String,
        expected: String,
    },
    K0 {
        free_rank: usize,
        torsion: Vec<Dec>,
    },
    GenusEqual {
        left: String,
        right: String,
        expected: bool,
    },
    IsoGlobal {
        left: String,
        right: String,
        expected: bool,
    },
    Roiter {
        a: String,
        a_prime: String,
        b: String,
        expected: String,
    },
    KerG {
        invariants: Vec<Dec>,
    },
    HereditaryFormula {
        /// Declared `m_p` by prime (decimal string keys).
        m: BTreeMap<String, usize>,
    },
    Split {
        splitting: String,
        expected: Vec<String>,
    },
    GenusBasis {
        expected: Vec<String>,
    },
    Freyd {},
    Dk {},
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct InstanceFile {
    pub name: String,
    pub kind: InstanceKind,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub base: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub algebra: Option<AlgebraSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub representations: Vec<RepresentationSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub modules: Vec<ModuleSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub registry: Option<RegistrySpec>,
    /// Declared rational multiplicities `mult(W, QX)` by module and S-object name.
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub multiplicities: BTreeMap<String, BTreeMap<String, u64>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub class_groups: Vec<ClassGroupSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub glue: Vec<GlueSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub spheres: Vec<String>,
    #[serde(default, skip_serializing_if = "BTreeMap::is_empty")]
    pub local_atoms: BTreeMap<u64, Vec<SymbolicAtom>>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub objects: Vec<SymbolicObject>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub splittings: Vec<SplittingSpec>,
    #[serde(default, skip_serializing_if = "Vec::is_empty")]
    pub declared_isos: Vec<(String, String)>,
    #[serde(default)]
    pub identities: Vec<Identity>,
}

#[derive(Debug, thiserror::Error)]
pub enum InstanceError {
    #[error("parse error at line {line}, column {column}: {message}")]
    Parse { line: usize, column: usize, message: String },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("invalid instance: {0}")]
    Invalid(String),
    #[error("{context}: {source}")]
    Axiom { context: String, source: AlgebraError },
}

fn axiom(context: impl Into<String>) -> impl FnOnce(AlgebraError) -> InstanceError {
    let context = context.into();
    move |source| InstanceError::Axiom { context, source }
}

pub struct Instance {
    pub file: InstanceFile,
    pub base: BaseRing,
    pub algebra: Option<Arc<FiniteAlgebra>>,
    pub modules: Vec<LatticeModule>,
    pub symbolic: Option<SymbolicCategory>,
}

pub fn parse_base(s: &str) -> Result<BaseRing, InstanceError> {
    let t = s.trim();
    if t == "Z" {
        return Ok(BaseRing::GlobalZ);
    }
    let p = t
        .strip_prefix("Z_(")
        .and_then(|r| r.strip_suffix(')'))
        .and_then(|r| r.parse::<u64>().ok())
        .ok_or_else(|| InstanceError::Invalid(format!("base must be \"Z\" or \"Z_(p)\", got {s:?}")))?;
    if !is_prime_u64(p) {
        return Err(InstanceError::Invalid(format!("base Z_({p}): {p} is not prime")));
    }
    Ok(BaseRing::LocalAt(p))
}

fn rat_matrix(rows: &[Vec<Dec>], n_rows: usize, n_cols: usize, what: &str) -> Result<RatMatrix, InstanceError> {
    if rows.len() != n_rows || rows.iter().any(|r| r.len() != n_cols) {
        return Err(InstanceError::Invalid(format!("{what} must be {n_rows}x{n_cols}")));
    }
    let data = rows.iter().flatten().map(|d| BigRational::from_integer(d.0.clone())).collect();
    Ok(RatMatrix::new(n_rows, n_cols, data).expect("shape checked"))
}

fn int_matrix(rows: &[Vec<Dec>], what: &str) -> Result<IntMatrix, InstanceError> {
    let n = rows.len();
    let m = rows.first().map_or(0, |r| r.len());
    if rows.iter().any(|r| r.len() != m) {
        return Err(InstanceError::Invalid(format!("{what} has rows of different lengths")));
    }
    Ok(IntMatrix::new(n, m, rows.iter().flatten().map(|d| d.0.clone()).collect()).expect("shape checked"))
}

impl Instance {
    pub fn load(path: &std::path::Path) -> Result<Self, InstanceError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| InstanceError::Io { path: path.display().to_string(), message: e.to_string() })?;
        Self::from_json(&text)
    }

    pub fn from_json(text: &str) -> Result<Self, InstanceError> {
        let file: InstanceFile = serde_json::from_str(text)
            .map_err(|e| InstanceError::Parse { line: e.line(), column: e.column(), message: e.to_string() })?;
        Self::from_file(file)
    }

    pub fn from_file(file: InstanceFile) -> Result<Self, InstanceError> {
        match file.kind {
            InstanceKind::Lattice => Self::lattice(file),
            InstanceKind::Symbolic => Self::symbolic(file),
        }
    }

    fn lattice(file: InstanceFile) -> Result<Self, InstanceError> {
        let base = parse_base(file.base.as_deref().ok_or_else(|| InstanceError::Invalid("missing base".into()))?)?;
        let spec = file.algebra.as_ref().ok_or_else(|| InstanceError::Invalid("missing algebra".into()))?;
        let n = spec.rank;
        let mut constants = vec![BigInt::zero(); n * n * n];
        for (i, j, k, c) in &spec.constants {
            if *i >= n || *j >= n || *k >= n {
                return Err(InstanceError::Invalid(format!("structure constant index ({i},{j},{k}) out of range")));
            }
            constants[(i * n + j) * n + k] += &c.0;
        }
        if spec.denominator.0.is_zero() {
            return Err(InstanceError::Invalid("algebra denominator is zero".into()));
        }
        let unit = spec.unit.iter().map(|d| BigRational::from_integer(d.0.clone())).collect();
        let algebra = Arc::new(
            FiniteAlgebra::new(base, n, spec.denominator.0.clone(), constants, unit).map_err(axiom("algebra"))?,
        );
        let mut reps: BTreeMap<&str, Vec<RatMatrix>> = BTreeMap::new();
        for r in &file.representations {
            if r.action.len() != n {
                return Err(InstanceError::Invalid(format!("representation {} needs {n} action matrices", r.name)));
            }
            let mats = r
                .action
                .iter()
                .enumerate()
                .map(|(i, m)| rat_matrix(m, r.dim, r.dim, &format!("action {i} of {}", r.name)))
                .collect::<Result<Vec<_>, _>>()?;
            algebra.check_representation(&mats).map_err(axiom(format!("representation {}", r.name)))?;
            reps.insert(&r.name, mats);
        }
        let mut modules: Vec<LatticeModule> = Vec::new();
        for m in &file.modules {
            if modules.iter().any(|x| x.name() == m.name) {
                return Err(InstanceError::Invalid(format!("module {} declared twice", m.name)));
            }
            let module = match (&m.representation, &m.generators, &m.sum) {
                (Some(r), Some(g), None) => {
                    let action = reps
                        .get(r.as_str())
                        .ok_or_else(|| InstanceError::Invalid(format!("module {}: unknown representation {r}", m.name)))?;
                    let dim = action[0].rows();
                    let vecs: Vec<Vec<BigRational>> = g
                        .iter()
                        .map(|v| {
                            if v.len() != dim {
                                return Err(InstanceError::Invalid(format!("module {}: generator of length {}", m.name, v.len())));
                            }
                            Ok(v.iter().map(|d| BigRational::from_integer(d.0.clone())).collect())
                        })
                        .collect::<Result<_, _>>()?;
                    let lat = Lattice::from_vectors(base, dim, &vecs)
                        .map_err(|e| InstanceError::Invalid(format!("module {}: {e}", m.name)))?;
                    if !lat.is_full_rank() {
                        return Err(InstanceError::Invalid(format!("module {}: generators do not span Q^{dim}", m.name)));
                    }
                    LatticeModule::new(&m.name, algebra.clone(), lat, action.clone())
                        .map_err(axiom(format!("module {}", m.name)))?
                }
                (None, None, Some(parts)) => {
                    if parts.is_empty() {
                        return Err(InstanceError::Invalid(format!("module {}: empty sum", m.name)));
                    }
                    let ps = parts
                        .iter()
                        .map(|p| {
                            modules.iter().find(|x| x.name() == p).cloned().ok_or_else(|| {
                                InstanceError::Invalid(format!("module {}: summand {p} must be declared earlier", m.name))
                            })
                        })
                        .collect::<Result<Vec<_>, _>>()?;
                    LatticeModule::direct_sum(&m.name, &ps).map_err(axiom(format!("module {}", m.name)))?
                }
                _ => {
                    return Err(InstanceError::Invalid(format!(
                        "module {} needs either representation and generators, or sum",
                        m.name
                    )))
                }
            };
            modules.push(module);
        }
        let inst = Instance { base, algebra: Some(algebra), modules, symbolic: None, file };
        inst.check_registry()?;
        Ok(inst)
    }

    fn check_registry(&self) -> Result<(), InstanceError> {
        let known = |n: &str, what: &str| {
            if self.modules.iter().any(|m| m.name() == n) {
                Ok(())
            } else {
                Err(InstanceError::Invalid(format!("{what} refers to unknown module {n}")))
            }
        };
        let f = &self.file;
        if let Some(r) = &f.registry {
            for (w, c) in r.s_objects.iter().enumerate() {
                if c.is_empty() {
                    return Err(InstanceError::Invalid(format!("registry: no S-object candidates for type {w}")));
                }
                c.iter().try_for_each(|n| known(n, "registry"))?;
            }
            r.atoms.iter().try_for_each(|n| known(n, "registry"))?;
            for (p, c) in &r.non_maximal_primes {
                if !is_prime_u64(*p) {
                    return Err(InstanceError::Invalid(format!("registry: {p} is not prime")));
                }
                c.iter().try_for_each(|n| known(n, "registry"))?;
            }
            match self.base {
                BaseRing::LocalAt(_) if !r.non_maximal_primes.is_empty() => {
                    return Err(InstanceError::Invalid("registry: a local instance lists atoms, not primes".into()))
                }
                BaseRing::GlobalZ if !r.atoms.is_empty() => {
                    return Err(InstanceError::Invalid("registry: a global instance lists atoms per prime".into()))
                }
                _ => {}
            }
        }
        let n_types = f.registry.as_ref().map_or(0, |r| r.s_objects.len());
        for c in &f.class_groups {
            if c.w >= n_types {
                return Err(InstanceError::Invalid(format!("class group for unknown rational type {}", c.w)));
            }
            c.members.iter().try_for_each(|n| known(n, "class group"))?;
        }
        for g in &f.glue {
            known(&g.reference, "glue")?;
            g.overrides.values().try_for_each(|n| known(n, "glue"))?;
        }
        for s in &f.splittings {
            known(&s.source, "splitting")?;
            s.target.iter().try_for_each(|n| known(n, "splitting"))?;
            if s.alpha.is_none() || s.beta.is_none() {
                return Err(InstanceError::Invalid(format!("splitting {} needs alpha and beta", s.name)));
            }
        }
        for m in f.multiplicities.keys() {
            known(m, "multiplicities")?;
        }
        Ok(())
    }

    fn symbolic(file: InstanceFile) -> Result<Self, InstanceError> {
        let cat = SymbolicCategory::new(file.spheres.clone(), file.local_atoms.clone(), file.objects.clone())
            .map_err(|e| InstanceError::Invalid(e.to_string()))?;
        let known = |n: &str| cat.spheres.iter().any(|s| s == n) || cat.objects.iter().any(|o| o.name == n);
        for s in &file.splittings {
            for n in std::iter::once(&s.source).chain(&s.target) {
                if !known(n) {
                    return Err(InstanceError::Invalid(format!("splitting {} refers to unknown object {n}", s.name)));
                }
            }
        }
        for (a, b) in &file.declared_isos {
            if !known(a) || !known(b) {
                return Err(InstanceError::Invalid(format!("declared isomorphism ({a}, {b}) names an unknown object")));
            }
        }
        Ok(Instance { base: BaseRing::GlobalZ, algebra: None, modules: Vec::new(), symbolic: Some(cat), file })
    }

    pub fn name(&self) -> &str {
        &self.file.name
    }

    pub fn module(&self, name: &str) -> Result<&LatticeModule, String> {
        self.modules.iter().find(|m| m.name() == name).ok_or_else(|| format!("unknown module {name}"))
    }

    /// Primes carrying local data: the base prime, or the declared ones.
    pub fn primes(&self) -> Vec<u64> {
        match (&self.symbolic, self.base) {
            (Some(c), _) => c.local_atoms.keys().copied().collect(),
            (None, BaseRing::LocalAt(p)) => vec![p],
            (None, BaseRing::GlobalZ) => {
                self.file.registry.as_ref().map_or(Vec::new(), |r| r.non_maximal_primes.keys().copied().collect())
            }
        }
    }

    /// The instance with every lattice replaced by its canonical basis, so
    /// that two files describing the same data serialize identically.
    pub fn canonical(&self) -> InstanceFile {
        let mut f = self.file.clone();
        for spec in f.modules.iter_mut() {
            if spec.generators.is_some() {
                let m = self.modules.iter().find(|m| m.name() == spec.name).expect("loaded");
                let b = m.carrier().basis();
                let (ints, d) = b.to_int_scaled();
                debug_assert!(d == BigInt::from(1) || m.carrier().rank() > 0);
                spec.generators =
                    Some((0..ints.cols()).map(|j| ints.col(j).into_iter().map(|x| Dec(x / &d)).collect()).collect());
            }
        }
        f
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(&self.canonical()).expect("instance serializes")
    }
}

// Verification driver.

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum Status {
    Pass,
    Fail,
    Inconclusive,
}

impl fmt::Display for Status {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Status::Pass => "PASS",
            Status::Fail => "FAIL",
            Status::Inconclusive => "INCONCLUSIVE",
        })
    }
}

#[derive(Clone, Debug, Serialize)]
pub struct CheckResult {
    pub check: String,
    pub status: Status,
    pub detail: String,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub witness: Option<serde_json::Value>,
    pub millis: u128,
}

#[derive(Clone, Debug, Serialize)]
pub struct Report {
    pub instance: String,
    pub seed: u64,
    pub precision: u32,
    pub checks: Vec<CheckResult>,
}

impl Report {
    pub fn status(&self) -> Status {
        if self.checks.iter().any(|c| c.status == Status::Fail) {
            Status::Fail
        } else if self.checks.iter().any(|c| c.status == Status::Inconclusive) {
            Status::Inconclusive
        } else {
            Status::Pass
        }
    }

    pub fn exit_code(&self) -> i32 {
        match self.status() {
            Status::Pass => 0,
            Status::Fail => 1,
            Status::Inconclusive => 2,
        }
    }

    pub fn find(&self, prefix: &str) -> Vec<&CheckResult> {
        self.checks.iter().filter(|c| c.check.starts_with(prefix)).collect()
    }
}

impl fmt::Display for Report {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        writeln!(f, "instance {} (seed {}, precision {})", self.instance, self.seed, self.precision)?;
        let w = self.checks.iter().map(|c| c.check.chars().count()).max().unwrap_or(0);
        for c in &self.checks {
            writeln!(f, "  {:<12} {:<w$}  {:>6} ms  {}", c.status.to_string(), c.check, c.millis, c.detail)?;
        }
        write!(f, "overall: {}", self.status())
    }
}

#[derive(Clone, Copy, Debug)]
pub struct VerifyOptions {
    pub seed: u64,
    pub precision: u32,
}

impl Default for VerifyOptions {
    fn default() -> Self {
        VerifyOptions { seed: 0, precision: DEFAULT_PRECISION }
    }
}

impl VerifyOptions {
    pub fn iso(&self) -> LocalIsoOptions {
        LocalIsoOptions { seed: self.seed, precision: self.precision, ..LocalIsoOptions::default() }
    }
}

type Outcome = Result<(Status, String, Option<serde_json::Value>), String>;

fn pass_if(ok: bool, detail: String) -> Outcome {
    Ok((if ok { Status::Pass } else { Status::Fail }, detail, None))
}

fn json<T: Serialize>(x: &T) -> Option<serde_json::Value> {
    serde_json::to_value(x).ok()
}

/// Grothendieck-group data shared by the checks of one instance.
pub enum K0Context {
    Local(LocalK0),
    Global(GlobalK0),
    Symbolic,
    Missing,
}

impl K0Context {
    pub fn build(inst: &Instance, opts: &VerifyOptions) -> Result<Self, String> {
        if inst.symbolic.is_some() {
            return Ok(K0Context::Symbolic);
        }
        let Some(reg) = &inst.file.registry else { return Ok(K0Context::Missing) };
        let named = |ns: &[String]| ns.iter().map(|n| inst.module(n).cloned()).collect::<Result<Vec<_>, _>>();
        let s_cands: Vec<Vec<LatticeModule>> = reg.s_objects.iter().map(|c| named(c)).collect::<Result<_, _>>()?;
        match inst.base {
            BaseRing::LocalAt(p) => {
                let s = s_cands
                    .iter()
                    .map(|c| crate::k0_global::choose_s_object(c).cloned().expect("nonempty"))
                    .collect();
                let k = LocalK0::build(s, &named(&reg.atoms)?, p, &opts.iso()).map_err(|e| e.to_string())?;
                Ok(K0Context::Local(k))
            }
            BaseRing::GlobalZ => {
                let local = reg
                    .non_maximal_primes
                    .iter()
                    .map(|(p, c)| Ok((*p, named(c)?)))
                    .collect::<Result<BTreeMap<_, _>, String>>()?;
                let mut groups = vec![Vec::new(); reg.s_objects.len()];
                for c in &inst.file.class_groups {
                    groups[c.w] = c.invariants.iter().map(|d| d.0.clone()).collect();
                }
                let g = GlobalK0::build(&s_cands, &local, groups, &opts.iso()).map_err(|e| e.to_string())?;
                Ok(K0Context::Global(g))
            }
        }
    }

    pub fn basis_names(&self, inst: &Instance) -> Result<Vec<String>, String> {
        match self {
            K0Context::Local(k) => Ok(k.basis_names()),
            K0Context::Global(g) => Ok(g.basis_names()),
            K0Context::Symbolic => inst.symbolic.as_ref().expect("symbolic").basis_names().map_err(|e| e.to_string()),
            K0Context::Missing => Err("instance has no registry".into()),
        }
    }

    pub fn presentation(&self, inst: &Instance) -> Result<K0Presentation, String> {
        match self {
            K0Context::Local(k) => Ok(K0Presentation { free_basis: k.basis_names(), torsion: Vec::new() }),
            K0Context::Global(g) => Ok(g.presentation()),
            K0Context::Symbolic => inst.symbolic.as_ref().expect("symbolic").presentation().map_err(|e| e.to_string()),
            K0Context::Missing => Err("instance has no registry".into()),
        }
    }

    /// Coordinates of a named module or object in the basis of [`K0Context::basis_names`].
    pub fn coords(&self, inst: &Instance, name: &str) -> Result<Vec<i64>, String> {
        match self {
            K0Context::Local(k) => k.coords(inst.module(name)?).map(|c| c.to_vec()).map_err(|e| e.to_string()),
            K0Context::Global(g) => g.coords(inst.module(name)?).map_err(|e| e.to_string()),
            K0Context::Symbolic => {
                let c = inst.symbolic.as_ref().expect("symbolic");
                c.genus(name).and_then(|g| c.coords(&g)).map_err(|e| e.to_string())
            }
            K0Context::Missing => Err("instance has no registry".into()),
        }
    }

    /// Names whose classes form the basis, for the full-rank check.
    fn basis_members(&self, inst: &Instance) -> Vec<String> {
        match self {
            K0Context::Local(k) => k.basis_names(),
            K0Context::Global(g) => {
                let mut v: Vec<String> = g.s_objects.iter().map(|s| s.name().to_string()).collect();
                v.extend(g.local.values().flat_map(|k| k.atoms.iter().map(|a| a.module.name().to_string())));
                v
            }
            K0Context::Symbolic => inst.symbolic.as_ref().and_then(|c| c.basis_names().ok()).unwrap_or_default(),
            K0Context::Missing => Vec::new(),
        }
    }
}

fn timed(check: String, f: impl FnOnce() -> Outcome) -> CheckResult {
    let t = Instant::now();
    let (status, detail, witness) = match f() {
        Ok(x) => x,
        Err(e) => (Status::Fail, e, None),
    };
    CheckResult { check, status, detail, witness, millis: t.elapsed().as_millis() }
}

/// Runs every declared identity, then the structural checks that apply to
/// the instance (coordinate additivity, basis rank). Identities run on
/// separate threads; the report keeps declaration order.
pub fn verify(inst: &Instance, opts: &VerifyOptions) -> Report {
    let t = Instant::now();
    let ctx = K0Context::build(inst, opts);
    let mut checks = vec![CheckResult {
        check: "registry".into(),
        status: if ctx.is_ok() { Status::Pass } else { Status::Fail },
        detail: match &ctx {
            Ok(K0Context::Missing) => "none declared".into(),
            Ok(c) => format!("basis {}", c.basis_names(inst).map(|v| v.join(", ")).unwrap_or_default()),
            Err(e) => e.clone(),
        },
        witness: None,
        millis: t.elapsed().as_millis(),
    }];
    let ctx = ctx.unwrap_or(K0Context::Missing);
    let results: Vec<CheckResult> = std::thread::scope(|s| {
        let handles: Vec<_> = inst
            .file
            .identities
            .iter()
            .map(|id| {
                let ctx = &ctx;
                s.spawn(move || timed(label(inst, id), || run_identity(inst, ctx, id, opts)))
            })
            .collect();
        handles
            .into_iter()
            .map(|h| {
                h.join().unwrap_or_else(|_| CheckResult {
                    check: "identity".into(),
                    status: Status::Fail,
                    detail: "check panicked".into(),
                    witness: None,
                    millis: 0,
                })
            })
            .collect()
    });
    checks.extend(results);
    for (m, mult) in &inst.file.multiplicities {
        checks.push(timed(format!("multiplicities {m}"), || check_multiplicities(inst, &ctx, m, mult)));
    }
    if !matches!(ctx, K0Context::Missing) {
        checks.push(timed("coords additivity".into(), || check_additivity(inst, &ctx)));
        checks.push(timed("basis full rank".into(), || check_basis_rank(inst, &ctx)));
    }
    Report { instance: inst.name().to_string(), seed: opts.seed, precision: opts.precision, checks }
}

fn label(inst: &Instance, id: &Identity) -> String {
    let at = |p: &Option<Dec>| p.as_ref().and_then(|d| d.0.to_u64()).or(inst.base.prime()).map(|p| format!(" at {p}")).unwrap_or_default();
    match id {
        Identity::Decompose { module, prime, .. } => format!("decompose {module}{}", at(prime)),
        Identity::HomRank { source, target, .. } => format!("hom_rank {source} -> {target}"),
        Identity::EndRank { module, .. } => format!("end_rank {module}"),
        Identity::IsoLocal { left, right, prime, .. } => format!("iso_local {left} ~ {right}{}", at(prime)),
        Identity::Indecomposable { module, .. } => format!("indecomposable {module}"),
        Identity::CoreAndAtoms { module, .. } => format!("core_and_atoms {module}"),
        Identity::Coords { module, .. } => format!("coords {module}"),
        Identity::Glue { spec, .. } => format!("glue {spec}"),
        Identity::K0 { .. } => "k0".into(),
        Identity::GenusEqual { left, right, .. } => format!("genus_equal {left} ~ {right}"),
        Identity::IsoGlobal { left, right, .. } => format!("iso_global {left} ~ {right}"),
        Identity::Roiter { a, a_prime, b, .. } => format!("roiter {a} {a_prime} {b}"),
        Identity::KerG { .. } => "ker_g".into(),
        Identity::HereditaryFormula { .. } => "hereditary_formula".into(),
        Identity::Split { splitting, .. } => format!("split {splitting}"),
        Identity::GenusBasis { .. } => "genus_basis".into(),
        Identity::Freyd {} => "freyd".into(),
        Identity::Dk {} => "dk".into(),
    }
}

fn prime_for(inst: &Instance, p: &Option<Dec>) -> Result<u64, String> {
    match p {
        Some(d) => d.0.to_u64().filter(|&q| is_prime_u64(q)).ok_or_else(|| format!("{} is not a prime", d.0)),
        None => inst.base.prime().ok_or_else(|| "a prime is required over Z".into()),
    }
}

fn local_ctx(ctx: &K0Context) -> Result<&LocalK0, String> {
    match ctx {
        K0Context::Local(k) => Ok(k),
        _ => Err("needs a local instance with a registry".into()),
    }
}

fn lattice_only(inst: &Instance) -> Result<(), String> {
    if inst.symbolic.is_some() {
        Err("needs a lattice instance".into())
    } else {
        Ok(())
    }
}

fn symbolic_only(inst: &Instance) -> Result<&SymbolicCategory, String> {
    inst.symbolic.as_ref().ok_or_else(|| "needs a symbolic instance".into())
}

fn run_identity(inst: &Instance, ctx: &K0Context, id: &Identity, opts: &VerifyOptions) -> Outcome {
    let iso = opts.iso();
    let err = |e: &dyn fmt::Display| e.to_string();
    match id {
        Identity::Decompose { module, prime, summands } => {
            lattice_only(inst)?;
            let p = prime_for(inst, prime)?;
            let m = inst.module(module)?.localize(p).map_err(|e| err(&e))?;
            let d = decompose_local(&m, opts.precision, opts.seed).map_err(|e| err(&e))?;
            let ranks: Vec<usize> = d.summands.iter().map(|s| s.rank()).collect();
            let detail = format!(
                "{} summands of ranks {:?} in {} classes (precision {}, stable {})",
                d.len(),
                ranks,
                d.class_count(),
                d.certificate.precision,
                d.certificate.stable
            );
            Ok((if d.len() == *summands { Status::Pass } else { Status::Fail }, detail, json(&d.certificate)))
        }
        Identity::HomRank { source, target, rank } => {
            lattice_only(inst)?;
            let h = hom_lattice(inst.module(source)?, inst.module(target)?).map_err(|e| err(&e))?;
            pass_if(h.rank() == *rank, format!("rank {} (expected {rank})", h.rank()))
        }
        Identity::EndRank { module, rank } => {
            lattice_only(inst)?;
            let m = inst.module(module)?;
            let h = hom_lattice(m, m).map_err(|e| err(&e))?;
            pass_if(h.rank() == *rank, format!("rank {} (expected {rank})", h.rank()))
        }
        Identity::IsoLocal { left, right, prime, expected } => {
            lattice_only(inst)?;
            let p = prime_for(inst, prime)?;
            let (a, b) = (inst.module(left)?, inst.module(right)?);
            match iso_local(a, b, p, &iso).map_err(|e| err(&e))? {
                IsoVerdict::Iso(w) => {
                    let checked = verify_local_iso(a, b, p, &w).map_err(|e| err(&e))?;
                    let ok = *expected && checked;
                    let detail = format!("isomorphic, witness {}", if checked { "verified" } else { "REJECTED" });
                    Ok((if ok { Status::Pass } else { Status::Fail }, detail, json(&w)))
                }
                IsoVerdict::NonIso(why) => pass_if(!*expected, format!("not isomorphic: {why}")),
                IsoVerdict::Inconclusive(why) => Ok((Status::Inconclusive, why, None)),
            }
        }
        Identity::Indecomposable { module, expected } => {
            let k = local_ctx(ctx)?;
            let ind = k.is_indecomposable(inst.module(module)?).map_err(|e| err(&e))?;
            pass_if(ind == *expected, format!("indecomposable: {ind}"))
        }
        Identity::CoreAndAtoms { module, atoms, s_part } => {
            let k = local_ctx(ctx)?;
            let b = inst.module(module)?;
            let r = k.core_and_atoms(b).map_err(|e| err(&e))?;
            let mut got_atoms: Vec<String> = r.atoms.iter().map(|&i| k.atoms[i].module.name().to_string()).collect();
            let mut got_s: Vec<String> = r.s_part.iter().map(|&w| k.registry.s_objects[w].name().to_string()).collect();
            let (mut ea, mut es) = (atoms.clone(), s_part.clone());
            for v in [&mut got_atoms, &mut got_s, &mut ea, &mut es] {
                v.sort();
            }
            // Re-check the witness for B ⊕ S-part ≅ ⊕ atoms independently.
            let mut left = vec![b.clone()];
            left.extend(r.s_part.iter().map(|&w| k.registry.s_objects[w].clone()));
            let right: Vec<LatticeModule> = r.atoms.iter().map(|&i| k.atoms[i].module.clone()).collect();
            let l = LatticeModule::direct_sum("left", &left).map_err(|e| err(&e))?;
            let rr = LatticeModule::direct_sum("right", &right).map_err(|e| err(&e))?;
            let ok_w = verify_local_iso(&l, &rr, k.prime(), &r.witness).map_err(|e| err(&e))?;
            let ok = got_atoms == ea && got_s == es && ok_w;
            let detail = format!(
                "{} + {} = {} (witness {})",
                module,
                got_s.join(" + "),
                got_atoms.join(" + "),
                if ok_w { "verified" } else { "REJECTED" }
            );
            Ok((if ok { Status::Pass } else { Status::Fail }, detail, json(&r.witness)))
        }
        Identity::Coords { module, expected } => {
            let names = ctx.basis_names(inst)?;
            let v = ctx.coords(inst, module)?;
            let got = describe(&names, &v);
            let mut want = BTreeMap::new();
            for (k, d) in expected {
                let x = d.i64().map_err(|e| err(&e))?;
                if x != 0 {
                    want.insert(k.clone(), x);
                }
            }
            Ok((if got == want { Status::Pass } else { Status::Fail }, format!("{got:?}"), json(&got)))
        }
        Identity::Glue { spec, expected } => {
            lattice_only(inst)?;
            let g = inst.file.glue.iter().find(|g| &g.name == spec).ok_or_else(|| format!("unknown glue spec {spec}"))?;
            let out = run_glue(inst, g, opts)?;
            let want = inst.module(expected)?;
            if out.carrier() == want.carrier() {
                return Ok((Status::Pass, format!("glued lattice equals {expected}"), None));
            }
            let v = genus_equal(&out, want, &iso).map_err(|e| err(&e))?;
            match v.verdict {
                Verdict::True => Ok((Status::Pass, format!("glued lattice lies in the genus of {expected}"), json(&v))),
                Verdict::False => Ok((Status::Fail, format!("glued lattice is not in the genus of {expected}"), json(&v))),
                Verdict::Inconclusive => Ok((Status::Inconclusive, "local comparison inconclusive".into(), json(&v))),
            }
        }
        Identity::K0 { free_rank, torsion } => {
            let p = ctx.presentation(inst)?;
            let want = ker_g_group(&[torsion.iter().map(|d| d.0.clone()).collect()]);
            let ok = p.free_rank() == *free_rank && p.torsion == want;
            Ok((if ok { Status::Pass } else { Status::Fail }, format!("K0 = {p} on {}", p.free_basis.join(", ")), json(&p)))
        }
        Identity::GenusEqual { left, right, expected } => {
            lattice_only(inst)?;
            let r = genus_equal(inst.module(left)?, inst.module(right)?, &iso).map_err(|e| err(&e))?;
            let detail = format!("{:?}, primes {:?}", r.verdict, r.primes);
            match r.verdict {
                Verdict::Inconclusive => Ok((Status::Inconclusive, detail, json(&r))),
                v => Ok((if (v == Verdict::True) == *expected { Status::Pass } else { Status::Fail }, detail, json(&r))),
            }
        }
        Identity::IsoGlobal { left, right, expected } => {
            lattice_only(inst)?;
            match iso_global(inst.module(left)?, inst.module(right)?, &iso).map_err(|e| err(&e))? {
                IsoVerdict::Iso(w) => Ok((if *expected { Status::Pass } else { Status::Fail }, "isomorphic".into(), json(&w))),
                IsoVerdict::NonIso(why) => pass_if(!*expected, format!("not isomorphic: {why}")),
                IsoVerdict::Inconclusive(why) => Ok((Status::Inconclusive, why, None)),
            }
        }
        Identity::Roiter { a, a_prime, b, expected } => {
            lattice_only(inst)?;
            let members: Vec<LatticeModule> = inst
                .file
                .class_groups
                .iter()
                .flat_map(|c| c.members.iter())
                .map(|n| inst.module(n).cloned())
                .collect::<Result<_, _>>()?;
            let (i, w) = roiter_complement(inst.module(a)?, inst.module(a_prime)?, inst.module(b)?, &members, &iso)
                .map_err(|e| err(&e))?;
            let got = members[i].name().to_string();
            Ok((
                if &got == expected { Status::Pass } else { Status::Fail },
                format!("{a} + {b} = {a_prime} + {got}"),
                json(&w),
            ))
        }
        Identity::KerG { invariants } => {
            let groups: Vec<Vec<BigInt>> =
                inst.file.class_groups.iter().map(|c| c.invariants.iter().map(|d| d.0.clone()).collect()).collect();
            let got = ker_g_group(&groups);
            let want = ker_g_group(&[invariants.iter().map(|d| d.0.clone()).collect()]);
            let show = |v: &[BigInt]| v.iter().map(|d| format!("Z/{d}")).collect::<Vec<_>>().join(" + ");
            pass_if(got == want, format!("Ker G = {}", if got.is_empty() { "0".into() } else { show(&got) }))
        }
        Identity::HereditaryFormula { m } => {
            let K0Context::Global(g) = ctx else { return Err("needs a global instance with a registry".into()) };
            let mut detail = Vec::new();
            let mut ok = true;
            let m: BTreeMap<u64, usize> = m
                .iter()
                .map(|(p, &v)| p.parse::<u64>().map(|p| (p, v)).map_err(|_| format!("{p:?} is not a prime")))
                .collect::<Result<_, _>>()?;
            for (p, &mp) in &m {
                let got = g.local_class_count(*p).ok_or_else(|| format!("{p} is not a declared non-maximal prime"))?;
                ok &= got == mp;
                detail.push(format!("m_{p} = {got}"));
            }
            let formula = g.s_objects.len() + m.values().map(|&mp| mp.saturating_sub(g.s_objects.len())).sum::<usize>();
            ok &= formula == g.rank() && m.keys().copied().collect::<Vec<_>>() == g.local.keys().copied().collect::<Vec<_>>();
            detail.push(format!("m = {formula}, free rank {}", g.rank()));
            pass_if(ok, detail.join(", "))
        }
        Identity::Split { splitting, expected } => {
            let s = inst
                .file
                .splittings
                .iter()
                .find(|s| &s.name == splitting)
                .ok_or_else(|| format!("unknown splitting {splitting}"))?;
            if let Some(cat) = &inst.symbolic {
                let targets: Vec<&str> = s.target.iter().map(|t| t.as_str()).collect();
                let r = cat.split(&s.source, &targets, &s.a.0).map_err(|e| err(&e))?;
                let names: Vec<String> = r.names.iter().map(|n| n.clone().unwrap_or_else(|| "?".into())).collect();
                // G(⊕ parts) = G(A ⊕ (r-1)B)
                let mut rhs: Vec<&str> = vec![s.source.as_str()];
                for _ in 1..r.parts.len() {
                    rhs.extend(&targets);
                }
                let lhs: Vec<&str> = names.iter().map(|n| n.as_str()).collect();
                let sum_ok = names.iter().all(|n| n != "?")
                    && cat.genus_of_sum(&lhs).map_err(|e| err(&e))? == cat.genus_of_sum(&rhs).map_err(|e| err(&e))?;
                let ok = &names == expected && sum_ok;
                return Ok((
                    if ok { Status::Pass } else { Status::Fail },
                    format!("primes {:?}: parts {}; sum identity {}", r.primes, names.join(", "), if sum_ok { "holds" } else { "FAILS" }),
                    json(&r),
                ));
            }
            let a = inst.module(&s.source)?;
            let parts: Vec<LatticeModule> = s.target.iter().map(|t| inst.module(t).cloned()).collect::<Result<_, _>>()?;
            let b = LatticeModule::direct_sum("B", &parts).map_err(|e| err(&e))?;
            let alpha = int_matrix(s.alpha.as_ref().expect("checked at load"), "alpha").map_err(|e| err(&e))?;
            let beta = int_matrix(s.beta.as_ref().expect("checked at load"), "beta").map_err(|e| err(&e))?;
            let r = split_by_primes(a, &b, &s.a.0, &alpha, &beta).map_err(|e| err(&e))?;
            let mut names = Vec::new();
            for part in &r.parts {
                names.push(
                    inst.modules
                        .iter()
                        .find(|m| m.carrier() == part.carrier() && m.ambient_action() == part.ambient_action())
                        .map_or("?".to_string(), |m| m.name().to_string()),
                );
            }
            pass_if(&names == expected, format!("primes {:?}: parts {}", r.primes, names.join(", ")))
        }
        Identity::GenusBasis { expected } => {
            let names = ctx.basis_names(inst)?;
            pass_if(&names == expected, format!("{} elements: {}", names.len(), names.join(", ")))
        }
        Identity::Freyd {} => {
            let cat = symbolic_only(inst)?;
            let basis = cat.basis().map_err(|e| err(&e))?;
            let expected_size = cat.spheres.len() + cat.local_atoms.values().map(|v| v.len()).sum::<usize>();
            let mut realized = 0;
            for g in &basis {
                if cat.name_of(g).map_err(|e| err(&e))?.is_some() {
                    realized += 1;
                }
            }
            // Every object's genus is recovered from its coordinates.
            let mut roundtrip = true;
            for o in &cat.objects {
                let g = cat.genus(&o.name).map_err(|e| err(&e))?;
                let c = cat.coords(&g).map_err(|e| err(&e))?;
                let mut rational = vec![0i64; g.rational.len()];
                let mut local: BTreeMap<u64, BTreeMap<String, i64>> = BTreeMap::new();
                for (k, b) in c.iter().zip(&basis) {
                    rational.iter_mut().zip(&b.rational).for_each(|(x, y)| *x += k * *y as i64);
                    for (p, m) in &b.local {
                        for (l, n) in m {
                            *local.entry(*p).or_default().entry(l.clone()).or_default() += k * *n as i64;
                        }
                    }
                }
                local.values_mut().for_each(|m| m.retain(|_, n| *n != 0));
                local.retain(|_, m| !m.is_empty());
                let want_local: BTreeMap<u64, BTreeMap<String, i64>> = g
                    .local
                    .iter()
                    .map(|(p, m)| (*p, m.iter().map(|(l, n)| (l.clone(), *n as i64)).collect()))
                    .collect();
                let rebuilt_ok = rational == g.rational.iter().map(|&x| x as i64).collect::<Vec<_>>() && local == want_local;
                roundtrip &= rebuilt_ok;
            }
            pass_if(
                basis.len() == expected_size && realized == basis.len() && roundtrip,
                format!(
                    "{} basis genera ({} spheres), {realized} realized by declared objects, coordinates {}",
                    basis.len(),
                    cat.spheres.len(),
                    if roundtrip { "recover every genus" } else { "DO NOT recover every genus" }
                ),
            )
        }
        Identity::Dk {} => {
            let cat = symbolic_only(inst)?;
            let bad = cat.dk_mismatches(&inst.file.declared_isos).map_err(|e| err(&e))?;
            pass_if(
                bad.is_empty(),
                if bad.is_empty() {
                    format!("genus equality matches {} declared isomorphisms", inst.file.declared_isos.len())
                } else {
                    format!("mismatched pairs {bad:?}")
                },
            )
        }
    }
}

pub fn run_glue(inst: &Instance, g: &GlueSpec, opts: &VerifyOptions) -> Result<LatticeModule, String> {
    let spec = LocalSpec {
        reference: inst.module(&g.reference)?.clone(),
        overrides: g.overrides.iter().map(|(p, n)| Ok((*p, inst.module(n)?.clone()))).collect::<Result<_, String>>()?,
    };
    let out = glue_object(&spec, opts.seed).map_err(|e| e.to_string())?;
    for (p, x) in &spec.overrides {
        if !iso_local(&out, x, *p, &opts.iso()).map_err(|e| e.to_string())?.is_iso() {
            return Err(format!("glued lattice is not isomorphic to the override at {p}"));
        }
    }
    Ok(out.renamed(g.name.clone()))
}

fn check_multiplicities(inst: &Instance, ctx: &K0Context, module: &str, want: &BTreeMap<String, u64>) -> Outcome {
    let m = inst.module(module)?;
    let (names, got): (Vec<String>, Vec<u64>) = match ctx {
        K0Context::Local(k) => (
            k.registry.s_objects.iter().map(|s| s.name().to_string()).collect(),
            k.registry.rational_class(m).map_err(|e| e.to_string())?,
        ),
        K0Context::Global(g) => (
            g.s_objects.iter().map(|s| s.name().to_string()).collect(),
            g.rational_class(m).map_err(|e| e.to_string())?,
        ),
        _ => return Err("needs a lattice registry".into()),
    };
    let got: BTreeMap<String, u64> = names.into_iter().zip(got).filter(|(_, x)| *x != 0).collect();
    let want: BTreeMap<String, u64> = want.iter().filter(|(_, x)| **x != 0).map(|(k, v)| (k.clone(), *v)).collect();
    pass_if(got == want, format!("{got:?}"))
}

/// `[A ⊕ B] = [A] + [B]` for every declared direct sum.
fn check_additivity(inst: &Instance, ctx: &K0Context) -> Outcome {
    let mut n = 0;
    if let Some(cat) = &inst.symbolic {
        for (a, b) in &inst.file.declared_isos {
            let ga = cat.genus(a).map_err(|e| e.to_string())?;
            let sum = cat.genus_of_sum(&[a.as_str(), b.as_str()]).map_err(|e| e.to_string())?;
            let ca = cat.coords(&ga).map_err(|e| e.to_string())?;
            let cb = cat.coords(&cat.genus(b).map_err(|e| e.to_string())?).map_err(|e| e.to_string())?;
            let cs = cat.coords(&sum).map_err(|e| e.to_string())?;
            if cs != ca.iter().zip(&cb).map(|(x, y)| x + y).collect::<Vec<_>>() {
                return Ok((Status::Fail, format!("coords of {a} + {b} are not additive"), None));
            }
            n += 1;
        }
        return pass_if(true, format!("{n} sums checked"));
    }
    for spec in &inst.file.modules {
        let Some(parts) = &spec.sum else { continue };
        let total = ctx.coords(inst, &spec.name)?;
        let mut acc = vec![0i64; total.len()];
        for p in parts {
            for (a, x) in acc.iter_mut().zip(ctx.coords(inst, p)?) {
                *a += x;
            }
        }
        if acc != total {
            return Ok((Status::Fail, format!("coords of {} differ from the sum of its parts", spec.name), None));
        }
        n += 1;
    }
    pass_if(true, format!("{n} sums checked"))
}

/// The coordinate vectors of the basis objects have full rank.
fn check_basis_rank(inst: &Instance, ctx: &K0Context) -> Outcome {
    let names = ctx.basis_members(inst);
    let rows = names.iter().map(|n| ctx.coords(inst, n)).collect::<Result<Vec<_>, _>>()?;
    let r = coordinate_rank(&rows);
    pass_if(r == names.len(), format!("rank {r} of {} basis vectors", names.len()))
}
