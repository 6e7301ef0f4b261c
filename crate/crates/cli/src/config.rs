use std::path::{Path, PathBuf};

use bsseries::rational::parse_rational;
use bsseries::{Grid, ParamSet, YPolynomial};
use clap::Args;
use serde::Deserialize;

use crate::CliError;

/// JSON run configuration. Unknown keys are rejected at every level.
#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub k1: Option<String>,
    pub k2: Option<String>,
    /// Coefficients of `f_0` by ascending degree.
    #[serde(default = "default_f0")]
    pub f0: Vec<String>,
    #[serde(default = "default_order")]
    pub order: usize,
    pub grid: Option<GridConfig>,
    #[serde(default)]
    pub sweep: SweepConfig,
    #[serde(default)]
    pub oracle: OracleConfig,
    #[serde(default)]
    pub output: OutputConfig,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct GridConfig {
    pub y_min: f64,
    pub y_max: f64,
    pub ny: usize,
    pub z_start: f64,
    pub z_end: f64,
    pub nz: usize,
    #[serde(default = "default_theta")]
    pub theta: f64,
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct SweepConfig {
    /// Truncation orders; defaults to `[2, 4, 8, order]`.
    pub orders: Option<Vec<usize>>,
    /// Evaluation points; defaults to `[grid.z_end]`.
    pub z: Option<Vec<f64>>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum DataSource {
    /// `c (y + (k1 - 1) z) exp(-k2 z²)` for `f_0 = c y`.
    ClosedForm,
    /// The highest-order series of the sweep.
    Series,
}

#[derive(Debug, Clone, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OracleConfig {
    /// Where initial and boundary data for the grid solve come from.
    #[serde(default = "default_source")]
    pub source: DataSource,
    #[serde(default = "default_levels")]
    pub refinement_levels: usize,
    /// Keep every n-th z-level in `grid.csv`.
    #[serde(default = "default_save_every")]
    pub save_every: usize,
    /// Points added on each side of the y interval for the width check.
    #[serde(default = "default_pad")]
    pub domain_pad: usize,
}

impl Default for OracleConfig {
    fn default() -> Self {
        Self {
            source: default_source(),
            refinement_levels: default_levels(),
            save_every: default_save_every(),
            domain_pad: default_pad(),
        }
    }
}

#[derive(Debug, Clone, Default, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct OutputConfig {
    pub series: Option<PathBuf>,
    pub report: Option<PathBuf>,
    pub dir: Option<PathBuf>,
}

fn default_f0() -> Vec<String> {
    vec!["0".into(), "1".into()]
}

fn default_order() -> usize {
    12
}

fn default_theta() -> f64 {
    0.5
}

fn default_source() -> DataSource {
    DataSource::ClosedForm
}

fn default_levels() -> usize {
    3
}

fn default_save_every() -> usize {
    100
}

fn default_pad() -> usize {
    50
}

/// Flags that override config keys of the same name.
#[derive(Debug, Clone, Default, Args)]
pub struct Overrides {
    /// Path to the JSON run configuration
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long, allow_hyphen_values = true)]
    pub k1: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub k2: Option<String>,
    /// Comma-separated coefficients of f0 by ascending degree
    #[arg(long, value_delimiter = ',', allow_hyphen_values = true)]
    pub f0: Option<Vec<String>>,
    #[arg(long)]
    pub order: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub y_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub y_max: Option<f64>,
    #[arg(long)]
    pub ny: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub z_start: Option<f64>,
    #[arg(long)]
    pub z_end: Option<f64>,
    #[arg(long)]
    pub nz: Option<usize>,
    #[arg(long)]
    pub theta: Option<f64>,
}

impl RunConfig {
    pub fn parse(text: &str) -> Result<Self, CliError> {
        serde_json::from_str(text).map_err(|e| CliError::Config(e.to_string()))
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = std::fs::read_to_string(path)
            .map_err(|e| CliError::Config(format!("{}: {e}", path.display())))?;
        Self::parse(&text)
    }

    pub fn load_with(overrides: &Overrides) -> Result<Self, CliError> {
        let mut cfg = Self::load(&overrides.config)?;
        cfg.apply(overrides)?;
        Ok(cfg)
    }

    pub fn apply(&mut self, o: &Overrides) -> Result<(), CliError> {
        if let Some(v) = &o.k1 {
            self.k1 = Some(v.clone());
        }
        if let Some(v) = &o.k2 {
            self.k2 = Some(v.clone());
        }
        if let Some(v) = &o.f0 {
            self.f0 = v.clone();
        }
        if let Some(v) = o.order {
            self.order = v;
        }
        let grid_flags = [o.y_min, o.y_max, o.z_start, o.z_end, o.theta]
            .iter()
            .any(Option::is_some)
            || o.ny.is_some()
            || o.nz.is_some();
        if grid_flags {
            let g = self.grid.as_mut().ok_or_else(|| {
                CliError::Config("grid flags given but the config has no grid block".into())
            })?;
            g.y_min = o.y_min.unwrap_or(g.y_min);
            g.y_max = o.y_max.unwrap_or(g.y_max);
            g.ny = o.ny.unwrap_or(g.ny);
            g.z_start = o.z_start.unwrap_or(g.z_start);
            g.z_end = o.z_end.unwrap_or(g.z_end);
            g.nz = o.nz.unwrap_or(g.nz);
            g.theta = o.theta.unwrap_or(g.theta);
        }
        Ok(())
    }

    pub fn params(&self) -> Result<ParamSet, CliError> {
        let get = |name: &str, v: &Option<String>| -> Result<_, CliError> {
            let text = v
                .as_deref()
                .ok_or_else(|| CliError::Config(format!("missing key {name:?}")))?;
            parse_rational(text).map_err(|e| CliError::Config(format!("{name}: {e}")))
        };
        Ok(ParamSet::new(get("k1", &self.k1)?, get("k2", &self.k2)?))
    }

    pub fn initial_profile(&self) -> Result<YPolynomial, CliError> {
        self.f0
            .iter()
            .map(|c| parse_rational(c).map_err(|e| CliError::Config(format!("f0: {e}"))))
            .collect::<Result<Vec<_>, _>>()
            .map(YPolynomial::from_coeffs)
    }

    pub fn grid(&self) -> Result<(Grid, f64), CliError> {
        let g = self
            .grid
            .as_ref()
            .ok_or_else(|| CliError::Config("missing grid block".into()))?;
        let grid = Grid {
            y_min: g.y_min,
            y_max: g.y_max,
            ny: g.ny,
            z_start: g.z_start,
            z_end: g.z_end,
            nz: g.nz,
        };
        grid.validate()
            .map_err(|e| CliError::Config(e.to_string()))?;
        if !(0.0..=1.0).contains(&g.theta) {
            return Err(CliError::Config(format!(
                "theta = {} must lie in [0, 1]",
                g.theta
            )));
        }
        Ok((grid, g.theta))
    }

    pub fn sweep_orders(&self) -> Vec<usize> {
        let mut orders = self
            .sweep
            .orders
            .clone()
            .unwrap_or_else(|| vec![2, 4, 8, self.order]);
        orders.sort_unstable();
        orders.dedup();
        orders
    }

    pub fn sweep_z(&self, grid: &Grid) -> Vec<f64> {
        self.sweep.z.clone().unwrap_or_else(|| vec![grid.z_end])
    }
}
