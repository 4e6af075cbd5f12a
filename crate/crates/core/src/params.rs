//! Validated sensor parameter records and the cavity quantities derived from them.
//!
//! Raw inputs (`FreeSensorInput`, `CavityInput`) are plain serde records. They only
//! become usable by the physics modules after validation into `FreeSensorParams` /
//! `CavityParams`, which also carry the derived quantities.

use serde::{Deserialize, Serialize};
use std::f64::consts::PI;
use thiserror::Error;

use crate::constants::{C, HBAR};

/// Narrow-band validity margin: `2π·Δf < NARROW_BAND_MARGIN·ω₀/Q`.
pub const NARROW_BAND_MARGIN: f64 = 0.01;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ParamError {
    #[error("parameter `{field}` must be positive and finite, got {value}")]
    NonPositiveParameter { field: &'static str, value: f64 },
    #[error("parameter `{field}` must be non-negative and finite, got {value}")]
    NegativeParameter { field: &'static str, value: f64 },
    #[error("quality factor must exceed 1 (high-Q analysis), got {0}")]
    QTooSmall(f64),
    #[error("detuning must be finite, got {0}")]
    NonFiniteDetuning(f64),
}

fn positive(field: &'static str, value: f64) -> Result<f64, ParamError> {
    if value.is_finite() && value > 0.0 {
        Ok(value)
    } else {
        Err(ParamError::NonPositiveParameter { field, value })
    }
}

fn non_negative(field: &'static str, value: f64) -> Result<f64, ParamError> {
    if value.is_finite() && value >= 0.0 {
        Ok(value)
    } else {
        Err(ParamError::NegativeParameter { field, value })
    }
}

/// Unvalidated free-cantilever parameters, SI units throughout.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FreeSensorInput {
    /// Cantilever mass M, kg.
    pub mass: f64,
    /// Mechanical resonance ω₀, rad/s.
    pub omega0: f64,
    /// Mechanical quality factor Q.
    pub quality_factor: f64,
    /// Measurement bandwidth Δf, Hz.
    pub bandwidth: f64,
    /// Drive energy E_d, J.
    pub drive_energy: f64,
}

/// Validated free-cantilever parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FreeSensorParams {
    input: FreeSensorInput,
    gamma_c: f64,
    narrow_band: bool,
}

impl FreeSensorParams {
    pub fn validate(input: FreeSensorInput) -> Result<Self, ParamError> {
        positive("mass", input.mass)?;
        positive("omega0", input.omega0)?;
        positive("quality_factor", input.quality_factor)?;
        positive("bandwidth", input.bandwidth)?;
        positive("drive_energy", input.drive_energy)?;
        if input.quality_factor <= 1.0 {
            return Err(ParamError::QTooSmall(input.quality_factor));
        }
        let gamma_c = input.omega0 / input.quality_factor;
        let narrow_band = 2.0 * PI * input.bandwidth < NARROW_BAND_MARGIN * gamma_c;
        Ok(Self {
            input,
            gamma_c,
            narrow_band,
        })
    }

    pub fn new(
        mass: f64,
        omega0: f64,
        quality_factor: f64,
        bandwidth: f64,
        drive_energy: f64,
    ) -> Result<Self, ParamError> {
        Self::validate(FreeSensorInput {
            mass,
            omega0,
            quality_factor,
            bandwidth,
            drive_energy,
        })
    }

    pub fn input(&self) -> &FreeSensorInput {
        &self.input
    }
    pub fn mass(&self) -> f64 {
        self.input.mass
    }
    pub fn omega0(&self) -> f64 {
        self.input.omega0
    }
    pub fn quality_factor(&self) -> f64 {
        self.input.quality_factor
    }
    pub fn bandwidth(&self) -> f64 {
        self.input.bandwidth
    }
    pub fn drive_energy(&self) -> f64 {
        self.input.drive_energy
    }

    /// Mechanical damping rate γ_c = ω₀/Q, rad/s.
    pub fn gamma_c(&self) -> f64 {
        self.gamma_c
    }

    /// True when the measurement band is well inside the mechanical linewidth,
    /// the regime where the narrow-band closed form is trustworthy.
    pub fn is_narrow_band(&self) -> bool {
        self.narrow_band
    }

    /// Mean squared drive amplitude ⟨q_d²⟩ = 2E_d/(Mω₀²), m².
    pub fn drive_amplitude_sq(&self) -> f64 {
        2.0 * self.input.drive_energy / (self.input.mass * self.input.omega0 * self.input.omega0)
    }

    pub fn with_mass(&self, mass: f64) -> Result<Self, ParamError> {
        Self::validate(FreeSensorInput { mass, ..self.input })
    }
    pub fn with_omega0(&self, omega0: f64) -> Result<Self, ParamError> {
        Self::validate(FreeSensorInput { omega0, ..self.input })
    }
    pub fn with_quality_factor(&self, quality_factor: f64) -> Result<Self, ParamError> {
        Self::validate(FreeSensorInput {
            quality_factor,
            ..self.input
        })
    }
    pub fn with_bandwidth(&self, bandwidth: f64) -> Result<Self, ParamError> {
        Self::validate(FreeSensorInput {
            bandwidth,
            ..self.input
        })
    }
    pub fn with_drive_energy(&self, drive_energy: f64) -> Result<Self, ParamError> {
        Self::validate(FreeSensorInput {
            drive_energy,
            ..self.input
        })
    }
}

/// How the laser-cavity detuning is specified.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "mode", content = "value", rename_all = "lowercase")]
pub enum Detuning {
    /// Effective detuning Δ = δ − g·q̃_s (rad/s), already including the static
    /// radiation-pressure shift. The fixed point then follows without a root search.
    Effective(f64),
    /// Bare laser-cavity detuning δ = ω_c − ω_l (rad/s); the fixed point is a cubic.
    Bare(f64),
}

impl Detuning {
    pub fn value(&self) -> f64 {
        match *self {
            Detuning::Effective(v) | Detuning::Bare(v) => v,
        }
    }
}

/// Unvalidated cavity-sensor parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CavityInput {
    pub base: FreeSensorInput,
    /// Cavity length L, m.
    pub cavity_length: f64,
    /// Laser wavelength, m.
    pub wavelength: f64,
    /// Cavity finesse.
    pub finesse: f64,
    /// Input laser power, W.
    pub input_power: f64,
    pub detuning: Detuning,
}

/// Quantities the cavity model needs but which follow from the raw parameters.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CavityDerived {
    /// Laser angular frequency ω_l = 2πc/λ, rad/s.
    pub omega_l: f64,
    /// Cavity energy decay rate γ = πc/(L·𝓕), rad/s.
    pub gamma: f64,
    /// Single-photon optomechanical coupling g = (ω_l/L)·√(ħ/(Mω₀)), rad/s.
    pub coupling: f64,
    /// Input photon flux |α_in|² = P/(ħω_l), photons/s.
    pub input_flux: f64,
}

/// Validated cavity-sensor parameters.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CavityParams {
    base: FreeSensorParams,
    input: CavityInput,
    derived: CavityDerived,
}

impl CavityParams {
    pub fn validate(input: CavityInput) -> Result<Self, ParamError> {
        let base = FreeSensorParams::validate(input.base)?;
        positive("cavity_length", input.cavity_length)?;
        positive("wavelength", input.wavelength)?;
        positive("finesse", input.finesse)?;
        non_negative("input_power", input.input_power)?;
        if !input.detuning.value().is_finite() {
            return Err(ParamError::NonFiniteDetuning(input.detuning.value()));
        }
        let derived = derive_cavity_quantities(&base, &input);
        Ok(Self {
            base,
            input,
            derived,
        })
    }

    pub fn base(&self) -> &FreeSensorParams {
        &self.base
    }
    pub fn input(&self) -> &CavityInput {
        &self.input
    }
    pub fn derived(&self) -> &CavityDerived {
        &self.derived
    }
    pub fn cavity_length(&self) -> f64 {
        self.input.cavity_length
    }
    pub fn wavelength(&self) -> f64 {
        self.input.wavelength
    }
    pub fn finesse(&self) -> f64 {
        self.input.finesse
    }
    pub fn input_power(&self) -> f64 {
        self.input.input_power
    }
    pub fn detuning(&self) -> Detuning {
        self.input.detuning
    }

    pub fn with_input_power(&self, input_power: f64) -> Result<Self, ParamError> {
        Self::validate(CavityInput {
            input_power,
            ..self.input
        })
    }
    pub fn with_finesse(&self, finesse: f64) -> Result<Self, ParamError> {
        Self::validate(CavityInput {
            finesse,
            ..self.input
        })
    }
    pub fn with_base(&self, base: FreeSensorInput) -> Result<Self, ParamError> {
        Self::validate(CavityInput { base, ..self.input })
    }
    pub fn with_detuning(&self, detuning: Detuning) -> Result<Self, ParamError> {
        Self::validate(CavityInput {
            detuning,
            ..self.input
        })
    }
}

fn derive_cavity_quantities(base: &FreeSensorParams, input: &CavityInput) -> CavityDerived {
    let omega_l = 2.0 * PI * C / input.wavelength;
    let gamma = PI * C / (input.cavity_length * input.finesse);
    let coupling = omega_l / input.cavity_length * (HBAR / (base.mass() * base.omega0())).sqrt();
    let input_flux = input.input_power / (HBAR * omega_l);
    CavityDerived {
        omega_l,
        gamma,
        coupling,
        input_flux,
    }
}

/// Derived cavity quantities `(ω_l, γ, g, |α_in|²)` for validated parameters.
pub fn cavity_quantities(p: &CavityParams) -> CavityDerived {
    p.derived
}
