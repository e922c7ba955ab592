//! JSON run configuration.
//!
//! Only `params` is required. Every other section falls back to a default:
//! the default copying rule, `λ` taken from `params`, `n = 100000`, `seed = 0`.

use std::fs;
use std::path::Path;

use serde::{Deserialize, Serialize};

use scriptswap_core::statics::{linspace, Quantity, SweepSpec};
use scriptswap_core::welfare::{IntegrityMetric, WelfareSpec};
use scriptswap_core::{BehaviorPolicy, Field, GameParams};

use crate::error::{CliError, Result};

pub const DEFAULT_N: u64 = 100_000;
pub const DEFAULT_SEED: u64 = 0;
pub const DEFAULT_AXIS: &str = "p";
pub const DEFAULT_GRID: &str = "0.05:0.95:19";
pub const DEFAULT_OUTPUTS: [&str; 4] = ["p_bar_numeric", "pure_ne_count", "separating_ne_count", "class"];

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub params: GameParams,
    #[serde(default)]
    pub behavior: BehaviorPolicy,
    #[serde(default)]
    pub welfare: WelfareSection,
    #[serde(default)]
    pub sim: SimSection,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub sweep: Option<SweepSection>,
}

#[derive(Debug, Clone, PartialEq, Default, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct WelfareSection {
    /// Overrides `params.lambda` when present.
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub lambda: Option<f64>,
    #[serde(default)]
    pub metric: IntegrityMetric,
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SimSection {
    #[serde(default = "default_n")]
    pub n: u64,
    #[serde(default)]
    pub seed: u64,
}

fn default_n() -> u64 {
    DEFAULT_N
}

impl Default for SimSection {
    fn default() -> Self {
        SimSection { n: DEFAULT_N, seed: DEFAULT_SEED }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepSection {
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub axis: Option<String>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub grid: Option<GridSpec>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub outputs: Option<Vec<String>>,
}

/// Either `"start:stop:steps"` or an explicit list of points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(untagged)]
pub enum GridSpec {
    Range(String),
    Points(Vec<f64>),
}

impl GridSpec {
    pub fn points(&self) -> Result<Vec<f64>> {
        match self {
            GridSpec::Range(s) => parse_grid(s),
            GridSpec::Points(v) => Ok(v.clone()),
        }
    }
}

/// Parses `start:stop:steps` into `steps` evenly spaced points, rounded to
/// 15 significant digits so decimal endpoints give decimal points.
pub fn parse_grid(text: &str) -> Result<Vec<f64>> {
    let bad = || CliError::Input(format!("grid '{}' is not of the form start:stop:steps", text));
    let parts: Vec<&str> = text.split(':').collect();
    let [start, stop, steps] = parts.as_slice() else {
        return Err(bad());
    };
    let start: f64 = start.trim().parse().map_err(|_| bad())?;
    let stop: f64 = stop.trim().parse().map_err(|_| bad())?;
    let steps: usize = steps.trim().parse().map_err(|_| bad())?;
    if steps == 0 {
        return Err(CliError::Input(format!("grid '{}' has zero steps", text)));
    }
    Ok(linspace(start, stop, steps).into_iter().map(round15).collect())
}

fn round15(x: f64) -> f64 {
    if x == 0.0 || !x.is_finite() {
        return x;
    }
    format!("{:.14e}", x).parse().unwrap_or(x)
}

/// Command-line values that take precedence over the file.
#[derive(Debug, Clone, Default)]
pub struct Overrides {
    pub n: Option<u64>,
    pub seed: Option<u64>,
    pub axis: Option<String>,
    pub grid: Option<String>,
    pub outputs: Option<Vec<String>>,
}

impl Default for RunConfig {
    /// The symmetric reference game: θ = 1, g = 100, α = 0.4, β = 0.5,
    /// γ = 0.6, p = p0 = 0.5, τ = 0.5, c = 10.
    fn default() -> Self {
        RunConfig {
            params: GameParams {
                theta_a: 1.0,
                theta_b: 1.0,
                g: 100.0,
                alpha: 0.4,
                beta: 0.5,
                gamma: 0.6,
                p: 0.5,
                p0: 0.5,
                tau: 0.5,
                c: 10.0,
                lambda: 0.0,
            },
            behavior: BehaviorPolicy::default(),
            welfare: WelfareSection::default(),
            sim: SimSection::default(),
            sweep: None,
        }
    }
}

impl RunConfig {
    /// Reads and validates a config file.
    pub fn load(path: &Path) -> Result<RunConfig> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        let config: RunConfig =
            serde_json::from_str(&text).map_err(|source| CliError::Config { path: path.to_path_buf(), source })?;
        config.validated()
    }

    /// `load` when a path is given, the built-in default otherwise.
    pub fn load_or_default(path: Option<&Path>) -> Result<RunConfig> {
        match path {
            Some(p) => RunConfig::load(p),
            None => Ok(RunConfig::default()),
        }
    }

    pub fn validated(mut self) -> Result<RunConfig> {
        self.params = self.params.validate()?;
        if let Some(lambda) = self.welfare.lambda {
            if !(lambda.is_finite() && lambda >= 0.0) {
                return Err(CliError::Input(format!("welfare.lambda = {} must be finite and ≥ 0", lambda)));
            }
        }
        if let IntegrityMetric::Constant(v) = self.welfare.metric {
            if !v.is_finite() {
                return Err(CliError::Input(String::from("welfare.metric constant must be finite")));
            }
        }
        if self.sim.n == 0 {
            return Err(CliError::Input(String::from("sim.n must be at least 1")));
        }
        Ok(self)
    }

    pub fn apply(mut self, overrides: &Overrides) -> Result<RunConfig> {
        if let Some(n) = overrides.n {
            self.sim.n = n;
        }
        if let Some(seed) = overrides.seed {
            self.sim.seed = seed;
        }
        if overrides.axis.is_some() || overrides.grid.is_some() || overrides.outputs.is_some() {
            let sweep = self.sweep.get_or_insert(SweepSection { axis: None, grid: None, outputs: None });
            if let Some(axis) = &overrides.axis {
                sweep.axis = Some(axis.clone());
            }
            if let Some(grid) = &overrides.grid {
                sweep.grid = Some(GridSpec::Range(grid.clone()));
            }
            if let Some(outputs) = &overrides.outputs {
                sweep.outputs = Some(outputs.clone());
            }
        }
        self.validated()
    }

    pub fn welfare_spec(&self) -> WelfareSpec {
        WelfareSpec { lambda: self.welfare.lambda.unwrap_or(self.params.lambda), metric: self.welfare.metric }
    }

    /// Sweep specification with defaults filled in.
    pub fn sweep_spec(&self) -> Result<SweepSpec> {
        let section = self.sweep.clone().unwrap_or(SweepSection { axis: None, grid: None, outputs: None });
        let axis_name = section.axis.as_deref().unwrap_or(DEFAULT_AXIS);
        let axis = Field::from_name(axis_name).ok_or_else(|| {
            let names: Vec<&str> = Field::ALL.iter().map(|f| f.name()).collect();
            CliError::Input(format!("unknown axis '{}' (expected one of {})", axis_name, names.join(", ")))
        })?;
        let grid = match &section.grid {
            Some(g) => g.points()?,
            None => parse_grid(DEFAULT_GRID)?,
        };
        let outputs = match &section.outputs {
            Some(names) => names.iter().map(|n| Quantity::parse(n.trim())).collect::<std::result::Result<_, _>>()?,
            None => DEFAULT_OUTPUTS.iter().map(|n| Quantity::parse(n)).collect::<std::result::Result<_, _>>()?,
        };
        let spec = SweepSpec { base: self.params, behavior: self.behavior, axis, grid, outputs };
        spec.check()?;
        Ok(spec)
    }
}
