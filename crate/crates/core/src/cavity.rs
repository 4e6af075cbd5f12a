//! Cantilever as the end mirror of a driven Fabry-Pérot cavity.
//!
//! The quantum Langevin equations are reduced to their semiclassical fixed point
//! (time-averaged over the mechanical drive) and linearised about it. Fluctuations
//! `(δq̃, δp̃, δX, δY)` obey `v̇ = A·v + noise`; the stationary symmetrised covariance
//! `C` solves `A·C + C·Aᵀ = −D` with `D = diag[0, γ_c(2n̄+1), γ/2, γ/2]`. The mirror
//! displacement variance `⟨q̃²⟩ = C₁₁` replaces `n̄ + ½` in the noise energy
//! `E_noise = ħω₀·C₁₁`, which then goes through the same band integral and
//! responsivity as the free sensor.

use serde::Serialize;
use thiserror::Error;

use crate::constants::{C, HBAR};
use crate::free_sensor::{mass_from_noise_energy, MassSensitivityResult, NoiseModel};
use crate::noise::{bose_occupation, BandIntegralMethod, NoiseError};
use crate::numerics::linalg::{mat4_frobenius, mat4_max_abs, mat4_mul, mat4_scale, mat4_transpose};
use crate::numerics::{
    characteristic_polynomial, cubic_real_roots, linear_solve_dense, routh_hurwitz_quartic,
    DenseMatrix, HurwitzCondition, LinalgError, Mat4, PolyError, PolynomialReal,
};
use crate::params::{CavityDerived, CavityParams, Detuning};

/// Largest accepted Lyapunov residual ‖AC + CAᵀ + D‖/‖D‖.
pub const LYAPUNOV_RESIDUAL_TOL: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum CavityError {
    #[error(transparent)]
    Noise(#[from] NoiseError),
    #[error("bistable steady state: {} real fixed points (q̃_s = {roots:?}); specify the effective detuning to pick a branch", roots.len())]
    BistableRegime { roots: Vec<f64> },
    #[error("no physical steady state (fixed-point solution {0})")]
    NoPhysicalRoot(f64),
    #[error("linearised dynamics are unstable ({failed})")]
    UnstableDriftMatrix { failed: HurwitzCondition },
    #[error("Lyapunov system is singular: {0}")]
    SingularSystem(#[from] LinalgError),
    #[error("Lyapunov residual {residual:e} exceeds tolerance")]
    LyapunovResidual { residual: f64 },
    #[error(transparent)]
    Polynomial(#[from] PolyError),
}

/// Semiclassical fixed point of the driven cavity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SteadyState {
    /// Real intracavity amplitude α_s (phase chosen so that α_s is real).
    pub alpha_s: f64,
    /// Static dimensionless mirror displacement q̃_s = g·α_s²/ω₀.
    pub q_s: f64,
    /// Effective detuning Δ = δ − g·q̃_s, rad/s.
    pub delta_eff: f64,
    /// Bare laser-cavity detuning δ, rad/s.
    pub bare_detuning: f64,
    /// Intracavity photon number α_s².
    pub n_cavity: f64,
    /// Number of real fixed points at this bare detuning (1, or 3 when bistable).
    pub branch_count: usize,
}

/// Real roots q̃ of the fixed-point cubic at bare detuning `delta`, ascending.
///
/// In units of the half-linewidth, y = g·q̃/(γ/2) and d = δ/(γ/2) satisfy
/// y·[1 + (d − y)²] = η with η = γ|α_in|²g²/(ω₀(γ/2)³).
pub fn fixed_point_displacements(
    derived: &CavityDerived,
    omega0: f64,
    delta: f64,
) -> Result<Vec<f64>, CavityError> {
    let half = derived.gamma / 2.0;
    let g = derived.coupling;
    if g == 0.0 {
        return Ok(vec![0.0]);
    }
    let d = delta / half;
    let eta = derived.gamma * derived.input_flux * g * g / (omega0 * half.powi(3));
    let cubic = PolynomialReal::new(vec![1.0, -2.0 * d, 1.0 + d * d, -eta])?;
    let roots = cubic_real_roots(&cubic)?;
    Ok(roots.into_iter().map(|y| y * half / g).collect())
}

/// Fixed point from the derived cavity quantities. Exposed separately from
/// [`solve_steady_state`] so that degenerate couplings (g = 0) can be examined.
pub fn steady_state_from(
    derived: &CavityDerived,
    omega0: f64,
    detuning: Detuning,
) -> Result<SteadyState, CavityError> {
    let half = derived.gamma / 2.0;
    let g = derived.coupling;
    match detuning {
        Detuning::Effective(delta_eff) => {
            let n = derived.gamma * derived.input_flux / (half * half + delta_eff * delta_eff);
            let q_s = g * n / omega0;
            let bare = delta_eff + g * q_s;
            let branch_count = fixed_point_displacements(derived, omega0, bare)?.len();
            Ok(SteadyState {
                alpha_s: n.sqrt(),
                q_s,
                delta_eff,
                bare_detuning: bare,
                n_cavity: n,
                branch_count,
            })
        }
        Detuning::Bare(bare) => {
            let roots = fixed_point_displacements(derived, omega0, bare)?;
            if roots.len() > 1 {
                return Err(CavityError::BistableRegime { roots });
            }
            let q_s = roots[0];
            if !(q_s >= 0.0 && q_s.is_finite()) {
                return Err(CavityError::NoPhysicalRoot(q_s));
            }
            let delta_eff = bare - g * q_s;
            // evaluate n from the Lorentzian rather than q̃_s·ω₀/g, exact also at g = 0
            let n = derived.gamma * derived.input_flux / (half * half + delta_eff * delta_eff);
            Ok(SteadyState {
                alpha_s: n.sqrt(),
                q_s,
                delta_eff,
                bare_detuning: bare,
                n_cavity: n,
                branch_count: 1,
            })
        }
    }
}

pub fn solve_steady_state(p: &CavityParams) -> Result<SteadyState, CavityError> {
    steady_state_from(p.derived(), p.base().omega0(), p.detuning())
}

/// Relative residuals of the two fixed-point relations
/// `q̃_s = gα_s²/ω₀` and `α_s²[(γ/2)² + Δ²] = γ|α_in|²`.
pub fn steady_state_residual(derived: &CavityDerived, omega0: f64, ss: &SteadyState) -> (f64, f64) {
    let half = derived.gamma / 2.0;
    let n = ss.alpha_s * ss.alpha_s;
    let q = derived.coupling * n / omega0;
    let r1 = if q == 0.0 { ss.q_s.abs() } else { (ss.q_s - q).abs() / q.abs() };
    let delta = ss.bare_detuning - derived.coupling * ss.q_s;
    let drive = derived.gamma * derived.input_flux;
    let lhs = n * (half * half + delta * delta);
    let r2 = if drive == 0.0 { lhs.abs() } else { (lhs - drive).abs() / drive };
    (r1, r2)
}

/// Power circulating inside the cavity, n·ħω_l·c/(2L), W.
pub fn intracavity_power(p: &CavityParams, ss: &SteadyState) -> f64 {
    ss.n_cavity * HBAR * p.derived().omega_l * C / (2.0 * p.cavity_length())
}

/// Linearised drift matrix over `(δq̃, δp̃, δX, δY)`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DriftMatrix {
    pub a: Mat4,
    /// Effective optomechanical coupling G = √2·g·α_s, rad/s.
    pub coupling: f64,
    pub delta_eff: f64,
}

impl DriftMatrix {
    pub fn from_rates(omega0: f64, gamma_c: f64, gamma: f64, coupling: f64, delta_eff: f64) -> Self {
        let k = gamma / 2.0;
        let a = [
            [0.0, omega0, 0.0, 0.0],
            [-omega0, -gamma_c, coupling, 0.0],
            [0.0, 0.0, -k, delta_eff],
            [coupling, 0.0, -delta_eff, -k],
        ];
        Self {
            a,
            coupling,
            delta_eff,
        }
    }

    pub fn trace(&self) -> f64 {
        (0..4).map(|i| self.a[i][i]).sum()
    }
}

pub fn build_drift_matrix(p: &CavityParams, ss: &SteadyState) -> DriftMatrix {
    let coupling = std::f64::consts::SQRT_2 * p.derived().coupling * ss.alpha_s;
    DriftMatrix::from_rates(
        p.base().omega0(),
        p.base().gamma_c(),
        p.derived().gamma,
        coupling,
        ss.delta_eff,
    )
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct StabilityReport {
    pub stable: bool,
    /// First violated Routh-Hurwitz condition, if any.
    pub failed: Option<HurwitzCondition>,
    /// Characteristic polynomial of A/scale (monic, highest degree first).
    pub scaled_polynomial: PolynomialReal,
    /// Rate used to nondimensionalise A (its largest entry magnitude).
    pub scale: f64,
    pub second_determinant: f64,
    pub third_determinant: f64,
}

/// Routh-Hurwitz classification of the drift matrix.
pub fn stability_check(drift: &DriftMatrix) -> Result<StabilityReport, CavityError> {
    stability_of(&drift.a)
}

/// Routh-Hurwitz classification of any real 4×4 matrix. Time is rescaled by the
/// largest entry so the characteristic coefficients are O(1).
pub fn stability_of(a: &Mat4) -> Result<StabilityReport, CavityError> {
    let scale = mat4_max_abs(a);
    let scaled = if scale > 0.0 { mat4_scale(a, 1.0 / scale) } else { *a };
    let poly = characteristic_polynomial(&scaled)?;
    let rh = routh_hurwitz_quartic(&poly)?;
    Ok(StabilityReport {
        stable: rh.stable,
        failed: rh.failed,
        scaled_polynomial: poly,
        scale,
        second_determinant: rh.second_determinant,
        third_determinant: rh.third_determinant,
    })
}

/// Stationary symmetrised covariance of the fluctuations.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CorrelationMatrix {
    pub c: Mat4,
    /// ‖AC + CAᵀ + D‖_F / ‖D‖_F after symmetrisation.
    pub residual: f64,
}

impl CorrelationMatrix {
    /// Dimensionless mirror displacement variance ⟨q̃²⟩ = C₁₁.
    pub fn q_variance(&self) -> f64 {
        self.c[0][0]
    }
}

/// Diffusion matrix diag[0, γ_c(2n̄+1), γ/2, γ/2].
pub fn diffusion_matrix(n_bar: f64, gamma_c: f64, gamma: f64) -> Mat4 {
    let mut d = [[0.0; 4]; 4];
    d[1][1] = gamma_c * (2.0 * n_bar + 1.0);
    d[2][2] = gamma / 2.0;
    d[3][3] = gamma / 2.0;
    d
}

/// Solve A·C + C·Aᵀ = −D for a stable drift matrix.
pub fn solve_lyapunov(
    drift: &DriftMatrix,
    n_bar: f64,
    gamma_c: f64,
    gamma: f64,
) -> Result<CorrelationMatrix, CavityError> {
    let report = stability_check(drift)?;
    if let Some(failed) = report.failed {
        return Err(CavityError::UnstableDriftMatrix { failed });
    }
    lyapunov_dense(&drift.a, &diffusion_matrix(n_bar, gamma_c, gamma))
}

/// Dense Kronecker-form solve of A·C + C·Aᵀ = −D (16 unknowns), symmetrised and
/// checked against [`LYAPUNOV_RESIDUAL_TOL`]. No stability check.
pub fn lyapunov_dense(a: &Mat4, d: &Mat4) -> Result<CorrelationMatrix, CavityError> {
    let scale = mat4_max_abs(a);
    let s = if scale > 0.0 { 1.0 / scale } else { 1.0 };
    let (a_s, d_s) = (mat4_scale(a, s), mat4_scale(d, s));

    // row (i,j), column (k,l) ↔ index 4i+j, 4k+l
    let mut k = DenseMatrix::zeros(16);
    let mut rhs = vec![0.0; 16];
    for i in 0..4 {
        for j in 0..4 {
            let row = 4 * i + j;
            for m in 0..4 {
                k[(row, 4 * m + j)] += a_s[i][m];
                k[(row, 4 * i + m)] += a_s[j][m];
            }
            rhs[row] = -d_s[i][j];
        }
    }
    let x = linear_solve_dense(&k, &rhs)?;
    let mut c = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            c[i][j] = 0.5 * (x[4 * i + j] + x[4 * j + i]);
        }
    }
    let residual = lyapunov_residual(a, &c, d);
    if !(residual <= LYAPUNOV_RESIDUAL_TOL) {
        return Err(CavityError::LyapunovResidual { residual });
    }
    Ok(CorrelationMatrix { c, residual })
}

/// ‖AC + CAᵀ + D‖_F / ‖D‖_F.
pub fn lyapunov_residual(a: &Mat4, c: &Mat4, d: &Mat4) -> f64 {
    let ac = mat4_mul(a, c);
    let cat = mat4_mul(c, &mat4_transpose(a));
    let mut r = [[0.0; 4]; 4];
    for i in 0..4 {
        for j in 0..4 {
            r[i][j] = ac[i][j] + cat[i][j] + d[i][j];
        }
    }
    let dn = mat4_frobenius(d);
    if dn == 0.0 {
        mat4_frobenius(&r)
    } else {
        mat4_frobenius(&r) / dn
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CavityMassResult {
    pub mass: MassSensitivityResult,
    pub steady_state: SteadyState,
    pub drift: DriftMatrix,
    pub stability: StabilityReport,
    pub correlation: CorrelationMatrix,
}

/// Minimum detectable mass of the cavity sensor at bath temperature `t` (K).
pub fn cavity_min_mass(
    p: &CavityParams,
    t: f64,
    method: BandIntegralMethod,
) -> Result<CavityMassResult, CavityError> {
    let base = p.base();
    let steady_state = solve_steady_state(p)?;
    let drift = build_drift_matrix(p, &steady_state);
    let stability = stability_check(&drift)?;
    if let Some(failed) = stability.failed {
        return Err(CavityError::UnstableDriftMatrix { failed });
    }
    let n_bar = bose_occupation(base.omega0(), t)?;
    let correlation = lyapunov_dense(
        &drift.a,
        &diffusion_matrix(n_bar, base.gamma_c(), p.derived().gamma),
    )?;
    let noise_energy = HBAR * base.omega0() * correlation.q_variance();
    let mass = mass_from_noise_energy(base, noise_energy, n_bar, method, NoiseModel::Quantum)?;
    Ok(CavityMassResult {
        mass,
        steady_state,
        drift,
        stability,
        correlation,
    })
}

/// The simplified narrow-band cavity expression
/// 2√π·M·(ħω₀⟨q̃²⟩/E_d)^½·(Δf/(Qω₀))^½, which treats ½·ħω₀⟨q̃²⟩ (potential energy
/// only) as the noise energy. It is √2 below the narrow-band result of
/// [`cavity_min_mass`], which uses ħω₀⟨q̃²⟩ so that G → 0 recovers the free sensor.
pub fn cavity_narrow_band_closed_form(p: &CavityParams, q_variance: f64) -> f64 {
    let b = p.base();
    2.0 * std::f64::consts::PI.sqrt()
        * b.mass()
        * (HBAR * b.omega0() * q_variance / b.drive_energy()).sqrt()
        * (b.bandwidth() / (b.quality_factor() * b.omega0())).sqrt()
}
