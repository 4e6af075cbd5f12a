//! Independent reference computations shared by the integration tests.
#![allow(dead_code)]

use std::f64::consts::PI;

use nalgebra::{DMatrix, Matrix4, SymmetricEigen};
use rand::Rng;

use nanomass::numerics::{Mat4, PolynomialReal};
use nanomass::params::{CavityInput, CavityParams, Detuning, FreeSensorInput, FreeSensorParams};

pub const HBAR: f64 = 1.054_571_817e-34;
pub const K_B: f64 = 1.380_649e-23;
pub const ELECTRON_MASS: f64 = 9.109_383_701_5e-31;
pub const DALTON: f64 = 1.660_539_066_60e-27;

pub fn fig1_input() -> FreeSensorInput {
    FreeSensorInput {
        mass: 1e-19,
        omega0: 2.0 * PI * 1e9,
        quality_factor: 1e7,
        bandwidth: 1e3,
        drive_energy: 1.6e-15,
    }
}

pub fn fig1() -> FreeSensorParams {
    FreeSensorParams::validate(fig1_input()).unwrap()
}

pub fn fig2(power: f64) -> CavityParams {
    let base = FreeSensorInput {
        mass: 5e-17,
        ..fig1_input()
    };
    CavityParams::validate(CavityInput {
        base,
        cavity_length: 1e-3,
        wavelength: 810e-9,
        finesse: 5.0,
        input_power: power,
        detuning: Detuning::Effective(base.omega0),
    })
    .unwrap()
}

pub fn to_na(a: &Mat4) -> Matrix4<f64> {
    Matrix4::from_fn(|i, j| a[i][j])
}

/// Largest real part of the eigenvalues, and the spectral radius.
pub fn spectral_abscissa(a: &Matrix4<f64>) -> (f64, f64) {
    let ev = a.complex_eigenvalues();
    let max_re = ev.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let rho = ev.iter().map(|z| z.norm()).fold(0.0, f64::max);
    (max_re, rho)
}

/// Roots of a polynomial (highest coefficient first) via its companion matrix.
pub fn companion_abscissa(coeffs: &[f64]) -> (f64, f64) {
    let n = coeffs.len() - 1;
    let mut m = DMatrix::<f64>::zeros(n, n);
    for j in 0..n {
        m[(0, j)] = -coeffs[j + 1] / coeffs[0];
    }
    for i in 1..n {
        m[(i, i - 1)] = 1.0;
    }
    let ev = m.complex_eigenvalues();
    let max_re = ev.iter().map(|z| z.re).fold(f64::NEG_INFINITY, f64::max);
    let rho = ev.iter().map(|z| z.norm()).fold(0.0, f64::max);
    (max_re, rho)
}

/// Gauss-Legendre nodes and weights on [0, 1] (Golub-Welsch).
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut j = DMatrix::<f64>::zeros(n, n);
    for k in 1..n {
        let b = k as f64 / ((4 * k * k - 1) as f64).sqrt();
        j[(k, k - 1)] = b;
        j[(k - 1, k)] = b;
    }
    let eig = SymmetricEigen::new(j);
    let mut out: Vec<(f64, f64)> = (0..n)
        .map(|i| {
            let v0 = eig.eigenvectors[(0, i)];
            (0.5 * (eig.eigenvalues[i] + 1.0), v0 * v0)
        })
        .collect();
    out.sort_by(|a, b| a.0.total_cmp(&b.0));
    out
}

/// ∫₀^∞ e^{At} D e^{Aᵀt} dt by Gauss-Legendre panels of width `h`, stopped once
/// the propagator has decayed below 1e-15.
pub fn lyapunov_time_integral(a: &Matrix4<f64>, d: &Matrix4<f64>, h: f64) -> Matrix4<f64> {
    let rule = gauss_legendre(12);
    let node_props: Vec<(Matrix4<f64>, f64)> = rule
        .iter()
        .map(|&(x, w)| ((a * (h * x)).exp(), w * h))
        .collect();
    let step = (a * h).exp();
    let mut start = Matrix4::<f64>::identity();
    let mut total = Matrix4::<f64>::zeros();
    for _ in 0..10_000_000 {
        for (e, w) in &node_props {
            let prop = e * start;
            total += prop * d * prop.transpose() * *w;
        }
        start = step * start;
        if start.abs().max() < 1e-15 {
            break;
        }
    }
    total
}

/// Random O(1)-rate drift matrix with the optomechanical sparsity pattern.
pub fn random_unit_drift<R: Rng>(rng: &mut R) -> (f64, f64, f64, f64, f64) {
    let omega0 = rng.random_range(0.5..2.0);
    let gamma_c = rng.random_range(0.05..0.5);
    let gamma = rng.random_range(0.5..3.0);
    let coupling = rng.random_range(0.0..0.6);
    let delta = rng.random_range(-2.0..2.0);
    (omega0, gamma_c, gamma, coupling, delta)
}

pub fn log_uniform<R: Rng>(rng: &mut R, lo: f64, hi: f64) -> f64 {
    (rng.random_range(lo.ln()..hi.ln())).exp()
}

/// Cavity parameters drawn from broad physical ranges.
pub fn random_cavity<R: Rng>(rng: &mut R) -> CavityParams {
    let omega0 = 2.0 * PI * log_uniform(rng, 1e6, 1e10);
    let base = FreeSensorInput {
        mass: log_uniform(rng, 1e-19, 1e-14),
        omega0,
        quality_factor: log_uniform(rng, 1e2, 1e8),
        bandwidth: 1e3,
        drive_energy: 1.6e-15,
    };
    CavityParams::validate(CavityInput {
        base,
        cavity_length: log_uniform(rng, 1e-4, 1e-2),
        wavelength: rng.random_range(500e-9..1600e-9),
        finesse: log_uniform(rng, 1.0, 1e5),
        input_power: log_uniform(rng, 1e-9, 1e-1),
        detuning: Detuning::Effective(rng.random_range(-3.0..3.0) * omega0),
    })
    .unwrap()
}

/// Monic quartic with prescribed roots (`pairs` are complex-conjugate (re, im)).
pub fn quartic_from_roots(real: &[f64], pairs: &[(f64, f64)]) -> PolynomialReal {
    let mut c = vec![1.0];
    let mul = |c: &[f64], f: &[f64]| {
        let mut out = vec![0.0; c.len() + f.len() - 1];
        for (i, a) in c.iter().enumerate() {
            for (j, b) in f.iter().enumerate() {
                out[i + j] += a * b;
            }
        }
        out
    };
    for r in real {
        c = mul(&c, &[1.0, -r]);
    }
    for (re, im) in pairs {
        c = mul(&c, &[1.0, -2.0 * re, re * re + im * im]);
    }
    PolynomialReal::new(c).unwrap()
}

pub fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / b.abs()
}

/// Outcome of comparing Routh-Hurwitz against eigenvalues over a random sample.
#[derive(Debug, Default)]
pub struct StabilityTally {
    pub compared: usize,
    pub skipped: usize,
    pub stable: usize,
    pub disagreements: Vec<String>,
}

/// `n` random monic quartics with the other coefficients uniform in [−10, 10].
/// Samples within the 1e-9 neutral band are skipped.
pub fn quartic_tally(seed: u64, n: usize) -> StabilityTally {
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let polys = (0..n).map(|_| {
        let mut c = vec![1.0];
        c.extend((0..4).map(|_| rng.random_range(-10.0..10.0)));
        PolynomialReal::new(c).unwrap()
    });
    tally_polynomials(polys)
}

pub fn tally_polynomials(polys: impl Iterator<Item = PolynomialReal>) -> StabilityTally {
    use nanomass::numerics::routh_hurwitz_quartic;
    let mut t = StabilityTally::default();
    for p in polys {
        let (max_re, rho) = companion_abscissa(p.coefficients());
        if max_re.abs() <= 1e-9 * rho.max(1.0) {
            t.skipped += 1;
            continue;
        }
        let rh = routh_hurwitz_quartic(&p).unwrap();
        if rh.stable != (max_re < 0.0) {
            t.disagreements.push(format!("{:?}: max Re = {max_re:e}", p.coefficients()));
        }
        t.compared += 1;
        t.stable += rh.stable as usize;
    }
    t
}

/// `n` drift matrices linearised about the steady state of random physical
/// cavities.
pub fn drift_tally(seed: u64, n: usize) -> StabilityTally {
    use nanomass::cavity::{build_drift_matrix, solve_steady_state, stability_check};
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut t = StabilityTally::default();
    for _ in 0..n {
        let p = random_cavity(&mut rng);
        let ss = solve_steady_state(&p).unwrap();
        let drift = build_drift_matrix(&p, &ss);
        let report = stability_check(&drift).unwrap();
        let (max_re, rho) = spectral_abscissa(&to_na(&drift.a));
        if max_re.abs() <= 1e-9 * rho {
            t.skipped += 1;
            continue;
        }
        if report.stable != (max_re < 0.0) {
            t.disagreements.push(format!("{:?}: max Re = {max_re:e}, rho = {rho:e}", p.input()));
        }
        t.compared += 1;
        t.stable += report.stable as usize;
    }
    t
}

/// Worst entrywise relative error of the library Lyapunov solution against the
/// time integral, over `n` random stable O(1)-rate instances. C₁₂ vanishes
/// identically (d⟨q̃²⟩/dt = 2ω₀C₁₂), so that entry is held to the scale of C.
pub fn lyapunov_oracle_worst(seed: u64, n: usize) -> f64 {
    use nanomass::cavity::{diffusion_matrix, solve_lyapunov, DriftMatrix};
    use rand::SeedableRng;
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(seed);
    let mut checked = 0;
    let mut worst: f64 = 0.0;
    while checked < n {
        let (w0, gc, g, cpl, delta) = random_unit_drift(&mut rng);
        let drift = DriftMatrix::from_rates(w0, gc, g, cpl, delta);
        let a = to_na(&drift.a);
        if spectral_abscissa(&a).0 > -0.01 {
            continue;
        }
        let n_bar = rng.random_range(0.0..5.0);
        let c = solve_lyapunov(&drift, n_bar, gc, g).unwrap();
        let d = to_na(&diffusion_matrix(n_bar, gc, g));
        let oracle = lyapunov_time_integral(&a, &d, 0.25);
        let scale = oracle.abs().max();
        for i in 0..4 {
            for j in 0..4 {
                let err = if i + j == 1 {
                    (c.c[i][j] - oracle[(i, j)]).abs() / scale
                } else {
                    (c.c[i][j] - oracle[(i, j)]).abs() / oracle[(i, j)].abs()
                };
                worst = worst.max(err);
            }
        }
        checked += 1;
    }
    worst
}
