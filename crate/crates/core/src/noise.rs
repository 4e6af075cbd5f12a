//! Thermal and zero-point noise of the mechanical mode, its displacement and
//! frequency-fluctuation spectral densities, and the band-limited frequency noise.
//!
//! Spectral densities are one-sided over ω ∈ [0, ∞). The measurement circuit is an
//! ideal unit band-pass on [ω₀ − πΔf, ω₀ + πΔf].

use std::f64::consts::{FRAC_PI_2, PI};
use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::constants::{HBAR, K_B};
use crate::numerics::{integrate_with_breakpoints, QuadratureError, QuadratureOptions};
use crate::params::FreeSensorParams;

/// Relative tolerance of the quadrature route.
pub const QUADRATURE_REL_TOL: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum NoiseError {
    #[error("temperature must be >= 0 K, got {0}")]
    NegativeTemperature(f64),
    #[error("noise energy ratio must be >= 0, got {0}")]
    NegativeEnergyRatio(f64),
    #[error("band half-width πΔf = {half_width:e} rad/s reaches below zero frequency (ω₀ = {omega0:e})")]
    BandExceedsDomain { omega0: f64, half_width: f64 },
    #[error("band integral: {0}")]
    ToleranceNotMet(#[from] QuadratureError),
}

/// How the band integral of the frequency noise is evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Default, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum BandIntegralMethod {
    /// Adaptive quadrature of the exact integrand; the reference route.
    Quadrature,
    /// Resonant (Lorentzian) approximation, valid for Q ≫ 1.
    #[default]
    Lorentzian,
    /// Additionally assumes 2πΔf ≪ ω₀/Q.
    NarrowBand,
}

impl BandIntegralMethod {
    pub const ALL: [BandIntegralMethod; 3] = [
        BandIntegralMethod::Quadrature,
        BandIntegralMethod::Lorentzian,
        BandIntegralMethod::NarrowBand,
    ];

    pub fn as_str(self) -> &'static str {
        match self {
            BandIntegralMethod::Quadrature => "quadrature",
            BandIntegralMethod::Lorentzian => "lorentzian",
            BandIntegralMethod::NarrowBand => "narrowband",
        }
    }
}

impl fmt::Display for BandIntegralMethod {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for BandIntegralMethod {
    type Err = String;
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s {
            "quadrature" => Ok(Self::Quadrature),
            "lorentzian" => Ok(Self::Lorentzian),
            "narrowband" => Ok(Self::NarrowBand),
            other => Err(format!(
                "unknown method `{other}` (expected quadrature, lorentzian or narrowband)"
            )),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ThermalState {
    /// Mean phonon occupation n̄.
    pub n_bar: f64,
    /// E_noise = ħω₀(n̄ + ½), J.
    pub noise_energy: f64,
}

fn check_temperature(t: f64) -> Result<(), NoiseError> {
    if t >= 0.0 && t.is_finite() {
        Ok(())
    } else {
        Err(NoiseError::NegativeTemperature(t))
    }
}

/// Bose-Einstein occupation of a mode at `omega0` (rad/s) and temperature `t` (K).
pub fn bose_occupation(omega0: f64, t: f64) -> Result<f64, NoiseError> {
    check_temperature(t)?;
    if t == 0.0 {
        return Ok(0.0);
    }
    let x = HBAR * omega0 / (K_B * t);
    Ok(1.0 / x.exp_m1())
}

/// Thermal plus zero-point energy of the oscillator.
pub fn noise_energy(omega0: f64, t: f64) -> Result<ThermalState, NoiseError> {
    let n_bar = bose_occupation(omega0, t)?;
    Ok(ThermalState {
        n_bar,
        noise_energy: HBAR * omega0 * (n_bar + 0.5),
    })
}

/// Energy k_BT assigned to the mode by equipartition (the classical treatment).
pub fn classical_noise_energy(t: f64) -> Result<f64, NoiseError> {
    check_temperature(t)?;
    Ok(K_B * t)
}

/// (ω² − ω₀²)² + ω²ω₀²/Q², with the difference factored to keep precision near ω₀.
fn resonance_denominator(omega: f64, omega0: f64, q: f64) -> f64 {
    let diff = (omega - omega0) * (omega + omega0);
    diff * diff + omega * omega * omega0 * omega0 / (q * q)
}

/// Displacement spectral density S_q(ω), m²·s/rad.
pub fn displacement_psd(omega: f64, p: &FreeSensorParams, noise_energy: f64) -> f64 {
    let (w0, q) = (p.omega0(), p.quality_factor());
    2.0 * w0 / (p.mass() * q) * noise_energy / resonance_denominator(omega, w0, q)
}

/// Phase-noise spectral density S_φ = (2π)²·S_q/⟨q_d²⟩.
pub fn phase_psd(displacement_psd: f64, p: &FreeSensorParams) -> f64 {
    (2.0 * PI).powi(2) * displacement_psd / p.drive_amplitude_sq()
}

/// Frequency-noise spectral density S_ω = ω₀²·S_φ/((2π)²Q²).
pub fn frequency_psd_from_phase(phase_psd: f64, p: &FreeSensorParams) -> f64 {
    let q = p.quality_factor();
    p.omega0() * p.omega0() * phase_psd / ((2.0 * PI).powi(2) * q * q)
}

/// Frequency-noise integrand (ω₀⁵/Q³)·(E_noise/E_d)/[(ω² − ω₀²)² + ω²ω₀²/Q²], rad/s.
pub fn frequency_noise_integrand(omega: f64, p: &FreeSensorParams, energy_ratio: f64) -> f64 {
    let (w0, q) = (p.omega0(), p.quality_factor());
    w0.powi(5) / q.powi(3) * energy_ratio / resonance_denominator(omega, w0, q)
}

/// Smallest detectable frequency shift δω_s (rad/s): square root of the frequency
/// noise integrated over the measurement band.
pub fn band_frequency_noise(
    p: &FreeSensorParams,
    energy_ratio: f64,
    method: BandIntegralMethod,
) -> Result<f64, NoiseError> {
    if !(energy_ratio >= 0.0) {
        return Err(NoiseError::NegativeEnergyRatio(energy_ratio));
    }
    let (w0, q, df) = (p.omega0(), p.quality_factor(), p.bandwidth());
    let half_width = PI * df;
    if w0 <= half_width {
        return Err(NoiseError::BandExceedsDomain {
            omega0: w0,
            half_width,
        });
    }
    if energy_ratio == 0.0 {
        return Ok(0.0);
    }
    let band_integral = match method {
        BandIntegralMethod::Lorentzian => {
            (w0 / q).powi(2) * energy_ratio * (2.0 * PI * q * df / w0).atan()
        }
        BandIntegralMethod::NarrowBand => 2.0 * PI * w0 * df * energy_ratio / q,
        BandIntegralMethod::Quadrature => quadrature_band_integral(w0, q, half_width / w0)? * energy_ratio,
    };
    Ok(band_integral.sqrt())
}

/// ∫ (ω₀⁵/Q³)/[(ω²−ω₀²)² + ω²ω₀²/Q²] dω over ω₀(1 ± b), evaluated in the reduced
/// offset u = ω/ω₀ − 1 where the integrand is ω₀²/Q³ / [(u(u+2))² + (1+u)²/Q²].
fn quadrature_band_integral(w0: f64, q: f64, b: f64) -> Result<f64, NoiseError> {
    let inv_q2 = 1.0 / (q * q);
    let f = |u: f64| {
        let d = u * (u + 2.0);
        let s = 1.0 + u;
        1.0 / (d * d + s * s * inv_q2)
    };
    // geometric breakpoints around the resonance, whose half-width is 1/(2Q)
    let hw = 0.5 / q;
    let mut right = Vec::new();
    let mut x = hw;
    while x < b {
        right.push(x);
        x *= 4.0;
    }
    let mut points: Vec<f64> = right.iter().rev().map(|x| -x).collect();
    points.insert(0, -b);
    points.push(0.0);
    points.extend(right.iter().copied());
    points.push(b);
    let r = integrate_with_breakpoints(
        f,
        &points,
        QuadratureOptions {
            rel_tol: QUADRATURE_REL_TOL,
            ..Default::default()
        },
    )?;
    Ok(w0 * w0 / q.powi(3) * r.value)
}

/// Limit of the Lorentzian band noise as the band opens up: (ω₀/Q)·√(E_ratio·π/2).
pub fn lorentzian_saturation(p: &FreeSensorParams, energy_ratio: f64) -> f64 {
    p.omega0() / p.quality_factor() * (energy_ratio * FRAC_PI_2).sqrt()
}
