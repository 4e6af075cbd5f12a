//! Evaluate a sweep grid, in parallel, into output rows.

use serde::Serialize;

use crate::cavity::{cavity_min_mass, CavityError};
use crate::constants::MassUnit;
use crate::free_sensor::{min_detectable_mass, min_detectable_mass_classical, MassSensitivityResult, SensorError};
use crate::noise::BandIntegralMethod;
use crate::params::{CavityParams, Detuning, FreeSensorParams, ParamError};

use super::config::{SensorConfig, SweepAxis, SweepConfig};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Curve {
    Quantum,
    Classical,
    Cavity,
}

impl Curve {
    pub fn as_str(self) -> &'static str {
        match self {
            Curve::Quantum => "quantum",
            Curve::Classical => "classical",
            Curve::Cavity => "cavity",
        }
    }
}

/// Outcome of one grid point. Failed points are kept as rows with a status.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "snake_case")]
pub enum RowStatus {
    Ok,
    InvalidParameter,
    Undefined,
    Bistable,
    Unstable,
    NoSteadyState,
    NumericalError,
}

impl RowStatus {
    pub fn as_str(self) -> &'static str {
        match self {
            RowStatus::Ok => "ok",
            RowStatus::InvalidParameter => "invalid_parameter",
            RowStatus::Undefined => "undefined",
            RowStatus::Bistable => "bistable",
            RowStatus::Unstable => "unstable",
            RowStatus::NoSteadyState => "no_steady_state",
            RowStatus::NumericalError => "numerical_error",
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SweepRow {
    pub axis: SweepAxis,
    pub axis_value: f64,
    pub curve: Curve,
    pub temperature_k: f64,
    pub n_bar: Option<f64>,
    pub delta_m_kg: Option<f64>,
    pub delta_m_display: Option<f64>,
    #[serde(serialize_with = "unit_label")]
    pub display_unit: MassUnit,
    pub delta_omega: Option<f64>,
    pub e_noise_j: Option<f64>,
    /// ⟨q̃²⟩ (cavity only).
    pub c11: Option<f64>,
    pub stable: Option<bool>,
    pub method: BandIntegralMethod,
    pub status: RowStatus,
    pub message: String,
}

fn unit_label<S: serde::Serializer>(u: &MassUnit, s: S) -> Result<S::Ok, S::Error> {
    s.serialize_str(u.label())
}

impl SweepRow {
    pub fn is_ok(&self) -> bool {
        self.status == RowStatus::Ok
    }
}

/// Column order shared by the CSV header and the JSON objects.
pub const COLUMNS: [&str; 15] = [
    "axis",
    "axis_value",
    "curve",
    "temperature_k",
    "n_bar",
    "delta_m_kg",
    "delta_m_display",
    "display_unit",
    "delta_omega",
    "e_noise_j",
    "c11",
    "stable",
    "method",
    "status",
    "message",
];

pub fn display_unit(sensor: &SensorConfig) -> MassUnit {
    match sensor {
        SensorConfig::Free(_) => MassUnit::Emu,
        SensorConfig::Cavity(_) => MassUnit::Da,
    }
}

/// Sensor parameters and temperature at one grid value.
pub fn point_parameters(cfg: &SweepConfig, value: f64) -> Result<(SensorConfig, f64), ParamError> {
    let t = match cfg.sweep_axis {
        SweepAxis::Temperature => value,
        _ => cfg.temperature,
    };
    let sensor = match (&cfg.sensor, cfg.sweep_axis) {
        (s, SweepAxis::Temperature) => *s,
        (SensorConfig::Cavity(p), SweepAxis::Power) => SensorConfig::Cavity(p.with_input_power(value)?),
        (SensorConfig::Cavity(p), SweepAxis::Finesse) => SensorConfig::Cavity(p.with_finesse(value)?),
        (SensorConfig::Free(p), SweepAxis::Omega0) => SensorConfig::Free(p.with_omega0(value)?),
        (SensorConfig::Cavity(p), SweepAxis::Omega0) => {
            let base = p.base().with_omega0(value)?;
            let moved = p.with_base(*base.input())?;
            SensorConfig::Cavity(match cfg.detuning_ratio {
                Some(r) => moved.with_detuning(match p.detuning() {
                    Detuning::Effective(_) => Detuning::Effective(r * value),
                    Detuning::Bare(_) => Detuning::Bare(r * value),
                })?,
                None => moved,
            })
        }
        // power and finesse sweeps of the free sensor are rejected by the config
        (SensorConfig::Free(p), _) => SensorConfig::Free(*p),
    };
    Ok((sensor, t))
}

struct PointContext {
    axis: SweepAxis,
    value: f64,
    t: f64,
    method: BandIntegralMethod,
    unit: MassUnit,
}

impl PointContext {
    fn ok(&self, curve: Curve, r: &MassSensitivityResult, c11: Option<f64>) -> SweepRow {
        SweepRow {
            n_bar: Some(r.n_bar),
            delta_m_kg: Some(r.delta_m),
            delta_m_display: Some(self.unit.from_kg(r.delta_m)),
            delta_omega: Some(r.delta_omega),
            e_noise_j: Some(r.noise_energy),
            c11,
            stable: Some(true),
            ..self.failed(curve, RowStatus::Ok, String::new())
        }
    }

    fn failed(&self, curve: Curve, status: RowStatus, message: String) -> SweepRow {
        SweepRow {
            axis: self.axis,
            axis_value: self.value,
            curve,
            temperature_k: self.t,
            n_bar: None,
            delta_m_kg: None,
            delta_m_display: None,
            display_unit: self.unit,
            delta_omega: None,
            e_noise_j: None,
            c11: None,
            stable: None,
            method: self.method,
            status,
            message,
        }
    }
}

fn sensor_status(e: &SensorError) -> RowStatus {
    match e {
        SensorError::ZeroTemperatureClassical => RowStatus::Undefined,
        SensorError::Noise(_) | SensorError::EmptyGrid => RowStatus::NumericalError,
    }
}

fn cavity_status(e: &CavityError) -> RowStatus {
    match e {
        CavityError::BistableRegime { .. } => RowStatus::Bistable,
        CavityError::UnstableDriftMatrix { .. } => RowStatus::Unstable,
        CavityError::NoPhysicalRoot(_) => RowStatus::NoSteadyState,
        _ => RowStatus::NumericalError,
    }
}

fn free_rows(ctx: &PointContext, p: &FreeSensorParams, classical: bool) -> Vec<SweepRow> {
    let mut rows = vec![match min_detectable_mass(p, ctx.t, ctx.method) {
        Ok(r) => ctx.ok(Curve::Quantum, &r, None),
        Err(e) => ctx.failed(Curve::Quantum, sensor_status(&e), e.to_string()),
    }];
    if classical {
        rows.push(match min_detectable_mass_classical(p, ctx.t, ctx.method) {
            Ok(r) => ctx.ok(Curve::Classical, &r, None),
            Err(e) => ctx.failed(Curve::Classical, sensor_status(&e), e.to_string()),
        });
    }
    rows
}

fn cavity_row(ctx: &PointContext, p: &CavityParams) -> SweepRow {
    match cavity_min_mass(p, ctx.t, ctx.method) {
        Ok(r) => ctx.ok(Curve::Cavity, &r.mass, Some(r.correlation.q_variance())),
        Err(e) => {
            let mut row = ctx.failed(Curve::Cavity, cavity_status(&e), e.to_string());
            if row.status == RowStatus::Unstable {
                row.stable = Some(false);
            }
            row
        }
    }
}

/// Rows for a single grid value: one per curve.
pub fn evaluate_point(cfg: &SweepConfig, value: f64) -> Vec<SweepRow> {
    let unit = display_unit(&cfg.sensor);
    let fallback_t = if cfg.sweep_axis == SweepAxis::Temperature { value } else { cfg.temperature };
    let mut ctx = PointContext {
        axis: cfg.sweep_axis,
        value,
        t: fallback_t,
        method: cfg.method,
        unit,
    };
    let (sensor, t) = match point_parameters(cfg, value) {
        Ok(v) => v,
        Err(e) => {
            let curve = match cfg.sensor {
                SensorConfig::Free(_) => Curve::Quantum,
                SensorConfig::Cavity(_) => Curve::Cavity,
            };
            return vec![ctx.failed(curve, RowStatus::InvalidParameter, e.to_string())];
        }
    };
    ctx.t = t;
    match sensor {
        SensorConfig::Free(p) => free_rows(&ctx, &p, cfg.include_classical),
        SensorConfig::Cavity(p) => vec![cavity_row(&ctx, &p)],
    }
}

/// Evaluate every grid point. Rows come back in grid order regardless of
/// scheduling; `jobs = None` uses the global rayon pool.
pub fn run_sweep(cfg: &SweepConfig, jobs: Option<usize>) -> Result<Vec<SweepRow>, rayon::ThreadPoolBuildError> {
    use rayon::prelude::*;
    let work = || -> Vec<SweepRow> {
        cfg.grid
            .par_iter()
            .map(|&v| evaluate_point(cfg, v))
            .collect::<Vec<_>>()
            .into_iter()
            .flatten()
            .collect()
    };
    match jobs {
        Some(n) => Ok(rayon::ThreadPoolBuilder::new().num_threads(n).build()?.install(work)),
        None => Ok(work()),
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::sweep::config::parse_config;

    const FREE: &str = r#"
sensor = "free"
mass = 1e-19
frequency = 1e9
quality_factor = 1e7
bandwidth = 1e3
drive_energy = 1.6e-15
grid = [0.0, 0.01, 1.0, 25.0]
include_classical = true
"#;

    const CAVITY: &str = r#"
sensor = "cavity"
mass = 5e-17
frequency = 1e9
quality_factor = 1e7
bandwidth = 1e3
drive_energy = 1.6e-15
cavity_length = 1e-3
wavelength = 810e-9
finesse = 5.0
input_power = 1e-3
detuning_ratio = 1.0
"#;

    #[test]
    fn free_rows_in_order_with_classical() {
        let cfg = parse_config(FREE).unwrap();
        let rows = run_sweep(&cfg, Some(2)).unwrap();
        assert_eq!(rows.len(), 8);
        for (i, pair) in rows.chunks(2).enumerate() {
            assert_eq!(pair[0].axis_value, cfg.grid[i]);
            assert_eq!(pair[0].curve, Curve::Quantum);
            assert_eq!(pair[1].curve, Curve::Classical);
            assert!(pair[0].is_ok());
        }
        assert_eq!(rows[1].status, RowStatus::Undefined);
        assert!(rows[3].is_ok());
        assert_eq!(rows[0].display_unit, MassUnit::Emu);
        let serial = run_sweep(&cfg, Some(1)).unwrap();
        assert_eq!(rows, serial);
    }

    #[test]
    fn cavity_power_sweep_reports_instability() {
        let cfg = parse_config(&format!("{CAVITY}\nsweep_axis = \"power\"\ngrid = [1e-6, 1e-4, 1e-3]")).unwrap();
        let rows = run_sweep(&cfg, None).unwrap();
        assert_eq!(rows.len(), 3);
        assert!(rows.iter().all(|r| r.is_ok() && r.c11.unwrap() > 0.0));
        assert_eq!(rows[0].display_unit, MassUnit::Da);

        // drive on the other side of the resonance: the mirror is anti-damped
        let text = CAVITY.replace("detuning_ratio = 1.0", "detuning_ratio = -1.0");
        let cfg = parse_config(&format!("{text}\nsweep_axis = \"power\"\ngrid = [1e-3, 1.0]")).unwrap();
        let rows = run_sweep(&cfg, None).unwrap();
        assert!(rows[0].is_ok(), "{:?}", rows[0]);
        assert_eq!(rows[1].status, RowStatus::Unstable);
        assert_eq!(rows[1].stable, Some(false));
        assert!(rows[1].delta_m_kg.is_none());
    }

    #[test]
    fn single_point_matches_direct_call() {
        let cfg = parse_config(&FREE.replace("grid = [0.0, 0.01, 1.0, 25.0]", "grid = [4.0]")).unwrap();
        let rows = run_sweep(&cfg, None).unwrap();
        let SensorConfig::Free(p) = cfg.sensor else { unreachable!() };
        let direct = min_detectable_mass(&p, 4.0, BandIntegralMethod::Lorentzian).unwrap();
        assert_eq!(rows[0].delta_m_kg, Some(direct.delta_m));
        assert_eq!(rows[0].n_bar, Some(direct.n_bar));

        let cfg = parse_config(&format!("{CAVITY}\ngrid = [2.0]")).unwrap();
        let rows = run_sweep(&cfg, None).unwrap();
        let SensorConfig::Cavity(p) = cfg.sensor else { unreachable!() };
        let direct = cavity_min_mass(&p, 2.0, BandIntegralMethod::Lorentzian).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].delta_m_kg, Some(direct.mass.delta_m));
        assert_eq!(rows[0].c11, Some(direct.correlation.q_variance()));
    }

    #[test]
    fn omega0_sweep_keeps_detuning_ratio() {
        let text = format!("{}\nsweep_axis = \"omega0\"\ngrid = [3e9, 6e9]", CAVITY);
        let cfg = parse_config(&text).unwrap();
        for v in [3e9, 6e9] {
            let (s, _) = point_parameters(&cfg, v).unwrap();
            match s {
                SensorConfig::Cavity(p) => {
                    assert_eq!(p.base().omega0(), v);
                    assert_eq!(p.detuning(), Detuning::Effective(v));
                }
                _ => unreachable!(),
            }
        }
    }
}
