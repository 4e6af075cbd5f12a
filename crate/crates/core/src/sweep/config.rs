//! Sweep configuration: a flat TOML document.
//!
//! ```toml
//! sensor = "free"                # free | cavity
//! sweep_axis = "temperature"     # temperature | power | finesse | omega0
//! grid = [0.0, 0.01, 0.1, 1.0]   # or grid_min / grid_max / grid_points / grid_spacing
//! temperature = 0.0              # bath temperature (K) when not sweeping it
//! method = "lorentzian"          # quadrature | lorentzian | narrowband
//! include_classical = true
//! output_path = "fig1.csv"
//! output_format = "csv"          # csv | json
//!
//! mass = 1e-19                   # kg
//! frequency = 1e9                # Hz (ω₀ = 2πν), or `omega0` in rad/s
//! quality_factor = 1e7
//! bandwidth = 1e3                # Hz
//! drive_energy = 1.6e-15         # J
//!
//! # cavity sensor only
//! cavity_length = 1e-3           # m
//! wavelength = 810e-9            # m
//! finesse = 5.0
//! input_power = 1e-3             # W
//! detuning_mode = "effective"    # effective | bare
//! detuning_ratio = 1.0           # detuning in units of ω₀, or `detuning` in rad/s
//! ```
//!
//! Unknown keys are rejected. A `[run]` table (written into metadata sidecars) is
//! accepted and ignored, so a sidecar can be fed back in as a config.

use std::f64::consts::PI;
use std::path::PathBuf;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::noise::BandIntegralMethod;
use crate::params::{CavityInput, CavityParams, Detuning, FreeSensorInput, FreeSensorParams, ParamError};

/// Lower end of the default temperature grid, K.
pub const DEFAULT_T_MIN: f64 = 1e-3;
/// Upper end of the default temperature grid, K.
pub const DEFAULT_T_MAX: f64 = 25.0;
/// Default number of grid points (including the prepended T = 0).
pub const DEFAULT_GRID_POINTS: usize = 50;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ConfigError {
    #[error("config parse error: {0}")]
    Parse(String),
    #[error("invalid parameter: {0}")]
    Validation(#[from] ParamError),
    #[error("invalid config: {0}")]
    Invalid(String),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SensorKind {
    Free,
    Cavity,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum SweepAxis {
    Temperature,
    Power,
    Finesse,
    Omega0,
}

impl SweepAxis {
    pub fn as_str(self) -> &'static str {
        match self {
            SweepAxis::Temperature => "temperature",
            SweepAxis::Power => "power",
            SweepAxis::Finesse => "finesse",
            SweepAxis::Omega0 => "omega0",
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum OutputFormat {
    #[default]
    Csv,
    Json,
}

impl FromStr for OutputFormat {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "csv" => Ok(Self::Csv),
            "json" => Ok(Self::Json),
            other => Err(format!("unknown format `{other}` (expected csv or json)")),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GridSpacing {
    #[default]
    Log,
    Linear,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum DetuningMode {
    #[default]
    Effective,
    Bare,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub enum SensorConfig {
    Free(FreeSensorParams),
    Cavity(CavityParams),
}

impl SensorConfig {
    pub fn kind(&self) -> SensorKind {
        match self {
            SensorConfig::Free(_) => SensorKind::Free,
            SensorConfig::Cavity(_) => SensorKind::Cavity,
        }
    }

    pub fn base(&self) -> &FreeSensorParams {
        match self {
            SensorConfig::Free(p) => p,
            SensorConfig::Cavity(p) => p.base(),
        }
    }
}

/// Fully validated sweep description.
#[derive(Debug, Clone, PartialEq)]
pub struct SweepConfig {
    pub sensor: SensorConfig,
    /// When set, the detuning is this multiple of ω₀ and follows ω₀ sweeps.
    pub detuning_ratio: Option<f64>,
    pub sweep_axis: SweepAxis,
    pub grid: Vec<f64>,
    /// Bath temperature for non-temperature sweeps, K.
    pub temperature: f64,
    pub method: BandIntegralMethod,
    pub include_classical: bool,
    pub output_path: PathBuf,
    pub output_format: OutputFormat,
}

#[derive(Debug, Deserialize)]
#[serde(deny_unknown_fields)]
struct RawConfig {
    sensor: SensorKind,
    sweep_axis: Option<SweepAxis>,
    grid: Option<Vec<f64>>,
    grid_min: Option<f64>,
    grid_max: Option<f64>,
    grid_points: Option<usize>,
    grid_spacing: Option<GridSpacing>,
    temperature: Option<f64>,
    method: Option<BandIntegralMethod>,
    include_classical: Option<bool>,
    output_path: Option<PathBuf>,
    output_format: Option<OutputFormat>,

    mass: f64,
    omega0: Option<f64>,
    frequency: Option<f64>,
    quality_factor: f64,
    bandwidth: f64,
    drive_energy: f64,

    cavity_length: Option<f64>,
    wavelength: Option<f64>,
    finesse: Option<f64>,
    input_power: Option<f64>,
    detuning_mode: Option<DetuningMode>,
    detuning: Option<f64>,
    detuning_ratio: Option<f64>,

    #[allow(dead_code)]
    run: Option<toml::Table>,
}

fn invalid(msg: impl Into<String>) -> ConfigError {
    ConfigError::Invalid(msg.into())
}

fn require(value: Option<f64>, key: &str) -> Result<f64, ConfigError> {
    value.ok_or_else(|| invalid(format!("missing key `{key}` (required for the cavity sensor)")))
}

/// Parse and validate a configuration document.
pub fn parse_config(text: &str) -> Result<SweepConfig, ConfigError> {
    let raw: RawConfig = toml::from_str(text).map_err(|e| ConfigError::Parse(e.to_string()))?;

    let omega0 = match (raw.omega0, raw.frequency) {
        (Some(w), None) => w,
        (None, Some(f)) => 2.0 * PI * f,
        (Some(_), Some(_)) => return Err(invalid("give either `omega0` or `frequency`, not both")),
        (None, None) => return Err(invalid("missing key `omega0` (or `frequency`)")),
    };
    let base = FreeSensorInput {
        mass: raw.mass,
        omega0,
        quality_factor: raw.quality_factor,
        bandwidth: raw.bandwidth,
        drive_energy: raw.drive_energy,
    };
    let free = FreeSensorParams::validate(base)?;

    let cavity_keys = [
        ("cavity_length", raw.cavity_length.is_some()),
        ("wavelength", raw.wavelength.is_some()),
        ("finesse", raw.finesse.is_some()),
        ("input_power", raw.input_power.is_some()),
        ("detuning_mode", raw.detuning_mode.is_some()),
        ("detuning", raw.detuning.is_some()),
        ("detuning_ratio", raw.detuning_ratio.is_some()),
    ];

    let (sensor, detuning_ratio) = match raw.sensor {
        SensorKind::Free => {
            if let Some((key, _)) = cavity_keys.iter().find(|(_, set)| *set) {
                return Err(invalid(format!("key `{key}` only applies to the cavity sensor")));
            }
            (SensorConfig::Free(free), None)
        }
        SensorKind::Cavity => {
            let (value, ratio) = match (raw.detuning, raw.detuning_ratio) {
                (Some(d), None) => (d, None),
                (None, Some(r)) => (r * omega0, Some(r)),
                (Some(_), Some(_)) => {
                    return Err(invalid("give either `detuning` or `detuning_ratio`, not both"))
                }
                (None, None) => return Err(invalid("missing key `detuning` (or `detuning_ratio`)")),
            };
            let detuning = match raw.detuning_mode.unwrap_or_default() {
                DetuningMode::Effective => Detuning::Effective(value),
                DetuningMode::Bare => Detuning::Bare(value),
            };
            let p = CavityParams::validate(CavityInput {
                base,
                cavity_length: require(raw.cavity_length, "cavity_length")?,
                wavelength: require(raw.wavelength, "wavelength")?,
                finesse: require(raw.finesse, "finesse")?,
                input_power: require(raw.input_power, "input_power")?,
                detuning,
            })?;
            (SensorConfig::Cavity(p), ratio)
        }
    };

    let sweep_axis = raw.sweep_axis.unwrap_or(SweepAxis::Temperature);
    if sensor.kind() == SensorKind::Free && matches!(sweep_axis, SweepAxis::Power | SweepAxis::Finesse) {
        return Err(invalid(format!(
            "sweep axis `{}` needs the cavity sensor",
            sweep_axis.as_str()
        )));
    }

    let include_classical = raw.include_classical.unwrap_or(false);
    if include_classical && sensor.kind() == SensorKind::Cavity {
        return Err(invalid("`include_classical` only applies to the free sensor"));
    }

    let grid = match raw.grid {
        Some(g) => {
            if raw.grid_min.is_some() || raw.grid_max.is_some() || raw.grid_points.is_some() || raw.grid_spacing.is_some() {
                return Err(invalid("`grid` cannot be combined with grid_min/grid_max/grid_points/grid_spacing"));
            }
            g
        }
        None => generate_grid(
            sweep_axis,
            raw.grid_min,
            raw.grid_max,
            raw.grid_points,
            raw.grid_spacing.unwrap_or_default(),
        )?,
    };
    validate_grid(sweep_axis, &grid)?;

    let temperature = raw.temperature.unwrap_or(0.0);
    if !(temperature >= 0.0 && temperature.is_finite()) {
        return Err(invalid(format!("temperature must be >= 0 K, got {temperature}")));
    }
    if sweep_axis == SweepAxis::Temperature && raw.temperature.is_some() {
        return Err(invalid("`temperature` conflicts with a temperature sweep"));
    }

    Ok(SweepConfig {
        sensor,
        detuning_ratio,
        sweep_axis,
        grid,
        temperature,
        method: raw.method.unwrap_or_default(),
        include_classical,
        output_path: raw.output_path.unwrap_or_else(|| PathBuf::from("sweep.csv")),
        output_format: raw.output_format.unwrap_or_default(),
    })
}

/// Grid from bounds. Temperature grids get an explicit T = 0 point in front.
fn generate_grid(
    axis: SweepAxis,
    min: Option<f64>,
    max: Option<f64>,
    points: Option<usize>,
    spacing: GridSpacing,
) -> Result<Vec<f64>, ConfigError> {
    let is_t = axis == SweepAxis::Temperature;
    let (min, max) = match (min, max, is_t) {
        (Some(a), Some(b), _) => (a, b),
        (a, b, true) => (a.unwrap_or(DEFAULT_T_MIN), b.unwrap_or(DEFAULT_T_MAX)),
        _ => {
            return Err(invalid(format!(
                "sweep axis `{}` needs `grid` or `grid_min` and `grid_max`",
                axis.as_str()
            )))
        }
    };
    let total = points.unwrap_or(DEFAULT_GRID_POINTS);
    let n = if is_t { total.saturating_sub(1) } else { total };
    if n == 0 {
        return Err(invalid("grid_points too small"));
    }
    if !(min > 0.0 && max >= min && max.is_finite()) {
        return Err(invalid(format!("grid bounds must satisfy 0 < grid_min <= grid_max, got [{min}, {max}]")));
    }
    let mut grid: Vec<f64> = if n == 1 {
        vec![min]
    } else {
        (0..n)
            .map(|i| {
                let s = i as f64 / (n - 1) as f64;
                match spacing {
                    GridSpacing::Log => (min.ln() + s * (max.ln() - min.ln())).exp(),
                    GridSpacing::Linear => min + s * (max - min),
                }
            })
            .collect()
    };
    // pin the endpoints exactly
    grid[0] = min;
    if n > 1 {
        grid[n - 1] = max;
    }
    if is_t {
        grid.insert(0, 0.0);
    }
    Ok(grid)
}

fn validate_grid(axis: SweepAxis, grid: &[f64]) -> Result<(), ConfigError> {
    if grid.is_empty() {
        return Err(invalid("grid is empty"));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(invalid("grid must be strictly increasing"));
    }
    let ok = |v: f64| match axis {
        SweepAxis::Temperature | SweepAxis::Power => v >= 0.0 && v.is_finite(),
        SweepAxis::Finesse | SweepAxis::Omega0 => v > 0.0 && v.is_finite(),
    };
    if let Some(bad) = grid.iter().find(|v| !ok(**v)) {
        return Err(invalid(format!("grid value {bad} is out of range for axis `{}`", axis.as_str())));
    }
    Ok(())
}

/// Canonical TOML rendering of a config (explicit grid, ω₀ in rad/s). Parsing the
/// result with [`parse_config`] reproduces `cfg`.
pub fn config_to_toml(cfg: &SweepConfig) -> toml::Table {
    use toml::Value;
    let mut t = toml::Table::new();
    let kind = match cfg.sensor.kind() {
        SensorKind::Free => "free",
        SensorKind::Cavity => "cavity",
    };
    t.insert("sensor".into(), Value::String(kind.into()));
    t.insert("sweep_axis".into(), Value::String(cfg.sweep_axis.as_str().into()));
    t.insert(
        "grid".into(),
        Value::Array(cfg.grid.iter().map(|v| Value::Float(*v)).collect()),
    );
    if cfg.sweep_axis != SweepAxis::Temperature {
        t.insert("temperature".into(), Value::Float(cfg.temperature));
    }
    t.insert("method".into(), Value::String(cfg.method.as_str().into()));
    t.insert("include_classical".into(), Value::Boolean(cfg.include_classical));
    t.insert(
        "output_path".into(),
        Value::String(cfg.output_path.to_string_lossy().into_owned()),
    );
    let fmt = match cfg.output_format {
        OutputFormat::Csv => "csv",
        OutputFormat::Json => "json",
    };
    t.insert("output_format".into(), Value::String(fmt.into()));

    let b = cfg.sensor.base();
    t.insert("mass".into(), Value::Float(b.mass()));
    t.insert("omega0".into(), Value::Float(b.omega0()));
    t.insert("quality_factor".into(), Value::Float(b.quality_factor()));
    t.insert("bandwidth".into(), Value::Float(b.bandwidth()));
    t.insert("drive_energy".into(), Value::Float(b.drive_energy()));

    if let SensorConfig::Cavity(p) = &cfg.sensor {
        t.insert("cavity_length".into(), Value::Float(p.cavity_length()));
        t.insert("wavelength".into(), Value::Float(p.wavelength()));
        t.insert("finesse".into(), Value::Float(p.finesse()));
        t.insert("input_power".into(), Value::Float(p.input_power()));
        let mode = match p.detuning() {
            Detuning::Effective(_) => "effective",
            Detuning::Bare(_) => "bare",
        };
        t.insert("detuning_mode".into(), Value::String(mode.into()));
        match cfg.detuning_ratio {
            Some(r) => t.insert("detuning_ratio".into(), Value::Float(r)),
            None => t.insert("detuning".into(), Value::Float(p.detuning().value())),
        };
    }
    t
}
