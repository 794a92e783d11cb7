//! Experiment configuration files.
//!
//! A config is a JSON object with a `kind` tag, the parameters of that
//! kind, and optionally `seed` and `out`.

use std::path::{Path, PathBuf};

use equilattice::cm::Region;
use equilattice::equidist::NamedWindow;
use equilattice::forms::{FiberQuadrature, LieSpec};
use equilattice::QuadraticLattice;
use serde::{Deserialize, Serialize};
use serde_json::Value;

use crate::presets;

#[derive(Debug)]
pub struct ConfigError(pub String);

impl std::fmt::Display for ConfigError {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(&self.0)
    }
}

impl std::error::Error for ConfigError {}

fn field_error(field: &str, msg: impl std::fmt::Display) -> ConfigError {
    ConfigError(format!("field `{field}`: {msg}"))
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LatticeRef {
    Preset(String),
    Inline(QuadraticLattice),
}

impl LatticeRef {
    pub fn resolve(&self, field: &str) -> Result<QuadraticLattice, ConfigError> {
        match self {
            LatticeRef::Inline(l) => Ok(l.clone()),
            LatticeRef::Preset(name) => presets::lattice(name)
                .ok_or_else(|| field_error(field, format!("unknown lattice preset {name:?} (see `equilattice presets`)"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum LieRef {
    Preset(String),
    Inline(Box<LieSpec>),
}

impl LieRef {
    pub fn resolve(&self, field: &str) -> Result<LieSpec, ConfigError> {
        match self {
            LieRef::Inline(s) => Ok((**s).clone()),
            LieRef::Preset(name) => presets::lie(name)
                .ok_or_else(|| field_error(field, format!("unknown Lie preset {name:?} (see `equilattice presets`)"))),
        }
    }
}

fn default_samples() -> u64 {
    1 << 20
}
fn default_alpha_k_max() -> u64 {
    10_000
}
fn default_shell_eps() -> f64 {
    0.01
}

/// Window masses (`windows` over `n_grid`) and streamed totals (`totals`).
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SublatticeParams {
    pub lattice: LatticeRef,
    pub r: usize,
    #[serde(default)]
    pub n_grid: Vec<i64>,
    #[serde(default)]
    pub windows: Vec<NamedWindow>,
    /// n values at which ν'/ν of all sublattices is compared with 1/α;
    /// only r ∈ {1, 2}.
    #[serde(default)]
    pub totals: Vec<i64>,
    #[serde(default = "default_samples")]
    pub samples: u64,
    #[serde(default = "default_alpha_k_max")]
    pub alpha_k_max: u64,
    #[serde(default = "default_shell_eps")]
    pub shell_eps: f64,
    /// Asserted bound on |rel_dev| of window rows at the largest n.
    #[serde(default)]
    pub window_tolerance: Option<f64>,
    /// Asserted bound on |rel_dev| of the totals rows.
    #[serde(default)]
    pub total_tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RelationParams {
    pub lattice: LatticeRef,
    pub n_max: i64,
    #[serde(default)]
    pub windows: Vec<NamedWindow>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct MultiplicityParams {
    pub r: usize,
    #[serde(rename = "K")]
    pub k_max: u64,
    /// Lattice rank for α(r, d).
    #[serde(default)]
    pub d: Option<usize>,
    #[serde(default)]
    pub relation: Option<RelationParams>,
}

fn default_s_max() -> u32 {
    6
}
fn yes() -> bool {
    true
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityTarget {
    pub m: Vec<Vec<i64>>,
    pub a: u64,
}

fn default_cutoff() -> u64 {
    50
}
fn default_growth_s_max() -> u32 {
    8
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GrowthParams {
    pub m0: Vec<Vec<i64>>,
    pub n_max: i64,
    #[serde(default = "yes")]
    pub squarefree: bool,
    #[serde(default = "default_cutoff")]
    pub prime_cutoff: u64,
    #[serde(default = "default_growth_s_max")]
    pub s_max: u32,
    #[serde(default)]
    pub tolerance: Option<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct DensityParams {
    pub lattice: LatticeRef,
    #[serde(default)]
    pub targets: Vec<DensityTarget>,
    #[serde(default = "default_s_max")]
    pub s_max: u32,
    /// Compare every level with the full residue scan where it is feasible.
    #[serde(default = "yes")]
    pub scan_check: bool,
    #[serde(default)]
    pub growth: Option<GrowthParams>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PullPushCheck {
    /// Witness search and ‖pull-push‖ below `vanishing_tolerance`.
    Vanishing,
    /// Value on a complex line of g/k meeting h/l is positive.
    ComplexNonvanishing,
    /// Pull-push proportional to the first Chern form, positive scalar.
    ChernProportionality,
    /// Pull-push restricted to h/l is a positive multiple of its area form.
    HlRestriction,
}

fn default_quadrature() -> FiberQuadrature {
    FiberQuadrature::Trapezoid { nodes: 64 }
}
fn one() -> f64 {
    1.0
}
fn default_invariance_samples() -> usize {
    50
}
fn default_vanishing_tol() -> f64 {
    1e-8
}
fn default_residual_tol() -> f64 {
    1e-6
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct PullPushParams {
    pub preset: LieRef,
    #[serde(default = "default_quadrature")]
    pub quadrature: FiberQuadrature,
    #[serde(default = "one")]
    pub omega_scale: f64,
    #[serde(default = "default_invariance_samples")]
    pub invariance_samples: usize,
    #[serde(default)]
    pub checks: Vec<PullPushCheck>,
    #[serde(default = "default_vanishing_tol")]
    pub vanishing_tolerance: f64,
    #[serde(default = "default_residual_tol")]
    pub residual_tolerance: f64,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct NamedRegion {
    pub id: String,
    #[serde(flatten)]
    pub region: Region,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum RegionsSpec {
    Named(String),
    List(Vec<NamedRegion>),
}

impl Default for RegionsSpec {
    fn default() -> Self {
        RegionsSpec::Named("default".into())
    }
}

impl RegionsSpec {
    pub fn resolve(&self) -> Result<Vec<(String, Region)>, ConfigError> {
        match self {
            RegionsSpec::Named(n) if n == "default" => Ok(equilattice::cm::default_regions()),
            RegionsSpec::Named(n) => Err(field_error("regions", format!("unknown region set {n:?}; use \"default\" or a list"))),
            RegionsSpec::List(v) => Ok(v.iter().map(|r| (r.id.clone(), r.region)).collect()),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CmParams {
    #[serde(rename = "N_set", default)]
    pub n_set: Vec<i64>,
    /// Inclusive range [from, to], added to `N_set`.
    #[serde(rename = "N_range", default)]
    pub n_range: Option<[i64; 2]>,
    #[serde(default)]
    pub regions: RegionsSpec,
    /// Write one row per fixed point.
    #[serde(default = "yes")]
    pub points: bool,
    /// Compare per-trace class counts with reduced forms.
    #[serde(default)]
    pub oracle_check: bool,
    /// Asserted bound on the pairwise deviation of aggregate ratios.
    #[serde(default)]
    pub tolerance: Option<f64>,
}

impl CmParams {
    pub fn ns(&self) -> Vec<i64> {
        let mut ns = self.n_set.clone();
        if let Some([a, b]) = self.n_range {
            ns.extend(a..=b);
        }
        ns.sort_unstable();
        ns.dedup();
        ns
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Experiment {
    Sublattices(SublatticeParams),
    Multiplicity(MultiplicityParams),
    Density(DensityParams),
    Pullpush(PullPushParams),
    Cm(CmParams),
}

impl Experiment {
    pub fn kind(&self) -> &'static str {
        match self {
            Experiment::Sublattices(_) => "sublattices",
            Experiment::Multiplicity(_) => "multiplicity",
            Experiment::Density(_) => "density",
            Experiment::Pullpush(_) => "pullpush",
            Experiment::Cm(_) => "cm",
        }
    }

    /// Whether results depend on random numbers.
    pub fn stochastic(&self) -> bool {
        match self {
            Experiment::Sublattices(p) => !p.windows.is_empty(),
            Experiment::Pullpush(p) => {
                p.invariance_samples > 0 || matches!(p.quadrature, FiberQuadrature::MonteCarlo { .. })
            }
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentConfig {
    pub experiment: Experiment,
    pub seed: Option<u64>,
    pub out: Option<PathBuf>,
    /// The parsed JSON, echoed into reports.
    pub raw: Value,
}

impl ExperimentConfig {
    pub fn from_json(text: &str) -> Result<Self, ConfigError> {
        let raw: Value = serde_json::from_str(text).map_err(|e| ConfigError(format!("invalid JSON: {e}")))?;
        Self::from_value(raw)
    }

    pub fn from_value(raw: Value) -> Result<Self, ConfigError> {
        let Value::Object(mut obj) = raw.clone() else {
            return Err(ConfigError("config must be a JSON object".into()));
        };
        let seed = match obj.remove("seed") {
            None | Some(Value::Null) => None,
            Some(v) => Some(v.as_u64().ok_or_else(|| field_error("seed", "expected a non-negative integer"))?),
        };
        let out = match obj.remove("out") {
            None | Some(Value::Null) => None,
            Some(Value::String(s)) => Some(PathBuf::from(s)),
            Some(_) => return Err(field_error("out", "expected a path string")),
        };
        if !obj.contains_key("kind") {
            return Err(field_error("kind", "missing; one of sublattices, multiplicity, density, pullpush, cm"));
        }
        let experiment: Experiment =
            serde_json::from_value(Value::Object(obj)).map_err(|e| ConfigError(format!("schema: {e}")))?;
        let cfg = ExperimentConfig { experiment, seed, out, raw };
        cfg.validate()?;
        Ok(cfg)
    }

    pub fn load(path: &Path) -> Result<Self, ConfigError> {
        let text = std::fs::read_to_string(path).map_err(|e| ConfigError(format!("cannot read {}: {e}", path.display())))?;
        Self::from_json(&text)
    }

    /// Preset references, seeds and parameter ranges.
    pub fn validate(&self) -> Result<(), ConfigError> {
        if self.experiment.stochastic() && self.seed.is_none() {
            return Err(field_error("seed", format!("required for a stochastic {} experiment", self.experiment.kind())));
        }
        match &self.experiment {
            Experiment::Sublattices(p) => {
                let l = p.lattice.resolve("lattice")?;
                if p.r == 0 || p.r > l.rank() {
                    return Err(field_error("r", format!("must be in 1..={}", l.rank())));
                }
                if !p.windows.is_empty() && p.n_grid.is_empty() {
                    return Err(field_error("n_grid", "needed when windows are given"));
                }
                if !p.totals.is_empty() && p.r > 2 {
                    return Err(field_error("totals", "streamed totals exist for r = 1 and r = 2 only"));
                }
                if p.n_grid.iter().chain(&p.totals).any(|&n| n < 1) {
                    return Err(field_error("n_grid", "values must be positive"));
                }
            }
            Experiment::Multiplicity(p) => {
                if p.r == 0 || p.k_max == 0 {
                    return Err(field_error("r", "r and K must be positive"));
                }
                if let Some(d) = p.d {
                    if d <= p.r {
                        return Err(field_error("d", "α(r, d) needs d > r"));
                    }
                }
                if let Some(rel) = &p.relation {
                    rel.lattice.resolve("relation.lattice")?;
                }
            }
            Experiment::Density(p) => {
                p.lattice.resolve("lattice")?;
                if p.targets.is_empty() && p.growth.is_none() {
                    return Err(field_error("targets", "give targets, growth or both"));
                }
                if p.s_max < 2 {
                    return Err(field_error("s_max", "must be at least 2"));
                }
            }
            Experiment::Pullpush(p) => {
                p.preset.resolve("preset")?;
            }
            Experiment::Cm(p) => {
                let ns = p.ns();
                if ns.is_empty() {
                    return Err(field_error("N_set", "no N given"));
                }
                if ns[0] < 1 {
                    return Err(field_error("N_set", "N must be positive"));
                }
                p.regions.resolve()?;
            }
        }
        Ok(())
    }
}
