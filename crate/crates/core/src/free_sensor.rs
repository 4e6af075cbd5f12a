//! Minimum detectable mass of a free, noiselessly driven cantilever.
//!
//! The frequency noise in the measurement band is converted to mass through the
//! responsivity ∂M/∂ω₀ = −2M/ω₀ at a signal-to-noise ratio of one. Results are
//! reported as positive magnitudes.

use serde::Serialize;
use thiserror::Error;

use crate::noise::{
    band_frequency_noise, classical_noise_energy, noise_energy, BandIntegralMethod, NoiseError,
};
use crate::params::FreeSensorParams;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SensorError {
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error("the classical treatment is undefined at T = 0")]
    ZeroTemperatureClassical,
    #[error("temperature grid is empty")]
    EmptyGrid,
}

/// Which noise energy fed the pipeline.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum NoiseModel {
    /// ħω₀(n̄ + ½).
    Quantum,
    /// k_BT.
    Classical,
}

/// Thermal regime of the mechanical mode, by occupation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Regime {
    Quantum,
    Crossover,
    Classical,
}

impl Regime {
    pub fn from_occupation(n_bar: f64) -> Self {
        if n_bar < 0.1 {
            Regime::Quantum
        } else if n_bar > 10.0 {
            Regime::Classical
        } else {
            Regime::Crossover
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MassSensitivityResult {
    /// Minimum detectable mass, kg (magnitude).
    pub delta_m: f64,
    /// Minimum detectable frequency shift, rad/s.
    pub delta_omega: f64,
    pub n_bar: f64,
    /// Noise energy used, J.
    pub noise_energy: f64,
    pub method: BandIntegralMethod,
    pub model: NoiseModel,
    pub regime: Regime,
    /// Set when `NarrowBand` was used outside 2πΔf ≪ ω₀/Q.
    pub narrow_band_warning: bool,
}

/// ∂M/∂ω₀ = −2M/ω₀, kg·s/rad. Negative: accreted mass lowers the frequency.
pub fn mass_responsivity(mass: f64, omega0: f64) -> f64 {
    -2.0 * mass / omega0
}

/// Map a noise energy to the minimum detectable mass through the band integral
/// and the responsivity. Shared by the free and cavity sensors.
pub(crate) fn mass_from_noise_energy(
    p: &FreeSensorParams,
    noise_energy: f64,
    n_bar: f64,
    method: BandIntegralMethod,
    model: NoiseModel,
) -> Result<MassSensitivityResult, NoiseError> {
    let delta_omega = band_frequency_noise(p, noise_energy / p.drive_energy(), method)?;
    Ok(MassSensitivityResult {
        delta_m: mass_responsivity(p.mass(), p.omega0()).abs() * delta_omega,
        delta_omega,
        n_bar,
        noise_energy,
        method,
        model,
        regime: Regime::from_occupation(n_bar),
        narrow_band_warning: method == BandIntegralMethod::NarrowBand && !p.is_narrow_band(),
    })
}

/// Quantum-limited minimum detectable mass at bath temperature `t` (K).
pub fn min_detectable_mass(
    p: &FreeSensorParams,
    t: f64,
    method: BandIntegralMethod,
) -> Result<MassSensitivityResult, SensorError> {
    let thermal = noise_energy(p.omega0(), t)?;
    Ok(mass_from_noise_energy(
        p,
        thermal.noise_energy,
        thermal.n_bar,
        method,
        NoiseModel::Quantum,
    )?)
}

/// Same pipeline with the classical noise energy k_BT, which vanishes at T = 0.
pub fn min_detectable_mass_classical(
    p: &FreeSensorParams,
    t: f64,
    method: BandIntegralMethod,
) -> Result<MassSensitivityResult, SensorError> {
    if t == 0.0 {
        return Err(SensorError::ZeroTemperatureClassical);
    }
    let energy = classical_noise_energy(t)?;
    let n_bar = crate::noise::bose_occupation(p.omega0(), t)?;
    Ok(mass_from_noise_energy(
        p,
        energy,
        n_bar,
        method,
        NoiseModel::Classical,
    )?)
}

/// Closed form in the narrow-band limit:
/// 2√(2π)·M·[ħω₀(2n̄+1)/(2E_d)]^½·(Δf/(Qω₀))^½.
pub fn narrow_band_closed_form(p: &FreeSensorParams, n_bar: f64) -> f64 {
    use crate::constants::HBAR;
    use std::f64::consts::PI;
    let energy = HBAR * p.omega0() * (2.0 * n_bar + 1.0) / (2.0 * p.drive_energy());
    2.0 * (2.0 * PI).sqrt()
        * p.mass()
        * energy.sqrt()
        * (p.bandwidth() / (p.quality_factor() * p.omega0())).sqrt()
}

/// Quantum sensitivity over a temperature grid, in grid order.
pub fn sweep_temperature(
    p: &FreeSensorParams,
    temperatures: &[f64],
    method: BandIntegralMethod,
) -> Result<Vec<MassSensitivityResult>, SensorError> {
    if temperatures.is_empty() {
        return Err(SensorError::EmptyGrid);
    }
    temperatures
        .iter()
        .map(|&t| min_detectable_mass(p, t, method))
        .collect()
}
