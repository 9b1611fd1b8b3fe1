//! Versioned JSON experiment configuration.

use std::path::PathBuf;

use orcon::bench::{
    build_disjunctive, build_gap_domain, disjunctive_starts, gap_domain_starts, heat_starts, random_gap_targets,
    toy_line, toy_point, HeatGridConfig, HeatModel, StartDomain,
};
use orcon::homotopy::{HomotopyConfig, MethodId};
use orcon::Problem;
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const CONFIG_VERSION: u32 = 1;

fn default_starts() -> usize {
    100
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct ExperimentConfig {
    pub version: u32,
    pub benchmark: BenchmarkSpec,
    /// Method identifiers; all five when omitted.
    #[serde(default)]
    pub methods: Option<Vec<String>>,
    #[serde(default = "default_starts")]
    pub starts: usize,
    #[serde(default)]
    pub seed: u64,
    /// Profile offset δ; 0 for heat control, 1 otherwise when omitted.
    #[serde(default)]
    pub delta: Option<f64>,
    /// Worker threads; `ORCON_THREADS` takes precedence.
    #[serde(default)]
    pub threads: Option<usize>,
    #[serde(default)]
    pub homotopy: HomotopyOverrides,
    #[serde(default)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(tag = "id", rename_all = "kebab-case", deny_unknown_fields)]
pub enum BenchmarkSpec {
    // Unit variants would let unknown keys through under an internal tag.
    Disjunctive {},
    GapDomain {
        #[serde(default = "GapDefaults::n")]
        n: usize,
        #[serde(default = "GapDefaults::budget")]
        budget: f64,
        /// Explicit sorted targets in `[0, 1]`; drawn from `targets_seed` otherwise.
        #[serde(default)]
        targets: Option<Vec<f64>>,
        #[serde(default = "GapDefaults::min_high")]
        min_high: usize,
        #[serde(default = "GapDefaults::targets_seed")]
        targets_seed: u64,
    },
    Heat {
        #[serde(default = "HeatDefaults::nodes_per_axis")]
        nodes_per_axis: usize,
        #[serde(default = "HeatDefaults::time_steps")]
        time_steps: usize,
        #[serde(default = "HeatDefaults::horizon")]
        horizon: f64,
        #[serde(default = "HeatDefaults::alpha")]
        alpha: f64,
        #[serde(default = "HeatDefaults::beta")]
        beta: f64,
    },
    ToyLine {},
    ToyPoint {},
}

struct GapDefaults;

impl GapDefaults {
    fn n() -> usize {
        50
    }
    fn budget() -> f64 {
        15.0
    }
    fn min_high() -> usize {
        15
    }
    fn targets_seed() -> u64 {
        1
    }
}

struct HeatDefaults;

impl HeatDefaults {
    fn nodes_per_axis() -> usize {
        HeatGridConfig::default().nodes_per_axis
    }
    fn time_steps() -> usize {
        HeatGridConfig::default().time_steps
    }
    fn horizon() -> f64 {
        HeatGridConfig::default().horizon
    }
    fn alpha() -> f64 {
        HeatGridConfig::default().alpha
    }
    fn beta() -> f64 {
        HeatGridConfig::default().beta
    }
}

pub const PROBLEM_IDS: [&str; 5] = ["disjunctive", "gap-domain", "heat", "toy-line", "toy-point"];

impl BenchmarkSpec {
    /// Default parameters for a bare problem id.
    pub fn from_id(id: &str) -> Result<Self, CliError> {
        serde_json::from_value(serde_json::json!({ "id": id })).map_err(|_| {
            CliError::Input(format!("unknown problem `{id}` (expected one of {})", PROBLEM_IDS.join(", ")))
        })
    }

    pub fn id(&self) -> &'static str {
        match self {
            Self::Disjunctive {} => "disjunctive",
            Self::GapDomain { .. } => "gap-domain",
            Self::Heat { .. } => "heat",
            Self::ToyLine {} => "toy-line",
            Self::ToyPoint {} => "toy-point",
        }
    }

    fn heat_config(&self) -> Option<HeatGridConfig> {
        match *self {
            Self::Heat { nodes_per_axis, time_steps, horizon, alpha, beta } => Some(HeatGridConfig {
                nodes_per_axis,
                time_steps,
                horizon,
                alpha,
                beta,
                ..HeatGridConfig::default()
            }),
            _ => None,
        }
    }

    /// The assembled heat model, for heat benchmarks.
    pub fn heat_model(&self) -> Result<Option<HeatModel>, CliError> {
        match self.heat_config() {
            Some(cfg) => Ok(Some(HeatModel::new(cfg)?)),
            None => Ok(None),
        }
    }

    pub fn build(&self) -> Result<Problem, CliError> {
        let p = match self {
            Self::Disjunctive {} => build_disjunctive(),
            Self::GapDomain { n, budget, targets, min_high, targets_seed } => {
                let a = match targets {
                    Some(a) => a.clone(),
                    None => random_gap_targets(*n, *min_high, *targets_seed)?,
                };
                if a.len() != *n {
                    return Err(CliError::Input(format!("gap-domain: {} targets given for n = {n}", a.len())));
                }
                build_gap_domain(*budget, &a)?
            }
            Self::Heat { .. } => self.heat_model()?.expect("heat variant").problem(),
            Self::ToyLine {} => toy_line(),
            Self::ToyPoint {} => toy_point(),
        };
        Ok(p)
    }

    pub fn start_domain(&self, n: usize) -> StartDomain {
        match self {
            Self::Disjunctive {} => disjunctive_starts(),
            Self::GapDomain { .. } => gap_domain_starts(n),
            Self::Heat { .. } => heat_starts(n),
            Self::ToyLine {} | Self::ToyPoint {} => StartDomain::uniform(n, -2.0, 2.0),
        }
    }

    pub fn default_delta(&self) -> f64 {
        match self {
            Self::Heat { .. } => 0.0,
            _ => 1.0,
        }
    }
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct HomotopyOverrides {
    pub t_initial: Option<f64>,
    pub t_factor: Option<f64>,
    pub t_min: Option<f64>,
    pub or_tol: Option<f64>,
    pub inner_tol: Option<f64>,
    pub direct_tol: Option<f64>,
    pub max_stages: Option<usize>,
    pub max_inner_iter: Option<usize>,
}

impl HomotopyOverrides {
    pub fn apply(&self) -> HomotopyConfig<f64> {
        let d = HomotopyConfig::default();
        HomotopyConfig {
            t_initial: self.t_initial.unwrap_or(d.t_initial),
            t_factor: self.t_factor.unwrap_or(d.t_factor),
            t_min: self.t_min.unwrap_or(d.t_min),
            or_tol: self.or_tol.unwrap_or(d.or_tol),
            inner_tol: self.inner_tol.unwrap_or(d.inner_tol),
            direct_tol: self.direct_tol.unwrap_or(d.direct_tol),
            max_stages: self.max_stages.unwrap_or(d.max_stages),
            max_inner_iter: self.max_inner_iter.unwrap_or(d.max_inner_iter),
        }
    }
}

/// Parses a comma-separated method list, keeping the given order.
pub fn parse_methods(items: &[String]) -> Result<Vec<MethodId>, CliError> {
    let mut out = Vec::new();
    for item in items.iter().flat_map(|s| s.split(',')).map(str::trim).filter(|s| !s.is_empty()) {
        let m: MethodId = item.parse()?;
        if out.contains(&m) {
            return Err(CliError::Input(format!("method `{m}` listed twice")));
        }
        out.push(m);
    }
    if out.is_empty() {
        return Err(CliError::Input("the method list is empty".into()));
    }
    Ok(out)
}

impl ExperimentConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        let cfg: Self = serde_json::from_str(text).map_err(|e| CliError::Input(format!("config: {e}")))?;
        if cfg.version != CONFIG_VERSION {
            return Err(CliError::Input(format!(
                "config: unsupported version {} (this build reads version {CONFIG_VERSION})",
                cfg.version
            )));
        }
        Ok(cfg)
    }

    pub fn load(path: &std::path::Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn methods(&self) -> Result<Vec<MethodId>, CliError> {
        match &self.methods {
            Some(list) => parse_methods(list),
            None => Ok(MethodId::ALL.to_vec()),
        }
    }

    pub fn delta(&self) -> f64 {
        self.delta.unwrap_or_else(|| self.benchmark.default_delta())
    }

    pub fn validate(&self) -> Result<(), CliError> {
        if self.starts == 0 {
            return Err(CliError::Input("config: starts must be at least 1".into()));
        }
        if self.threads == Some(0) {
            return Err(CliError::Input("config: threads must be at least 1".into()));
        }
        if !(self.delta() >= 0.0) {
            return Err(CliError::Input("config: delta must be nonnegative".into()));
        }
        self.methods()?;
        self.homotopy.apply().validate()?;
        Ok(())
    }
}
