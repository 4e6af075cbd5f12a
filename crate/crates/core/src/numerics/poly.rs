//! Low-degree real polynomials: closed-form cubic roots and the Routh-Hurwitz
//! test for quartics.

use std::f64::consts::PI;
use std::fmt;

use serde::Serialize;
use thiserror::Error;

pub const MAX_DEGREE: usize = 4;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PolyError {
    #[error("polynomial needs at least one coefficient")]
    Empty,
    #[error("leading coefficient must be nonzero and finite")]
    ZeroLeading,
    #[error("coefficient {0} is not finite")]
    NonFinite(usize),
    #[error("degree {0} exceeds the supported maximum of 4")]
    DegreeTooHigh(usize),
    #[error("expected degree {expected}, got {actual}")]
    WrongDegree { expected: usize, actual: usize },
}

/// Real polynomial with coefficients stored highest degree first.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct PolynomialReal {
    coefficients: Vec<f64>,
}

impl PolynomialReal {
    pub fn new(coefficients: Vec<f64>) -> Result<Self, PolyError> {
        let lead = *coefficients.first().ok_or(PolyError::Empty)?;
        if let Some(i) = coefficients.iter().position(|c| !c.is_finite()) {
            return Err(PolyError::NonFinite(i));
        }
        if lead == 0.0 {
            return Err(PolyError::ZeroLeading);
        }
        if coefficients.len() > MAX_DEGREE + 1 {
            return Err(PolyError::DegreeTooHigh(coefficients.len() - 1));
        }
        Ok(Self { coefficients })
    }

    /// Monic polynomial with the given roots (real roots only).
    pub fn from_roots(roots: &[f64]) -> Result<Self, PolyError> {
        let mut c = vec![1.0];
        for &r in roots {
            let mut next = vec![0.0; c.len() + 1];
            for (i, &ci) in c.iter().enumerate() {
                next[i] += ci;
                next[i + 1] -= r * ci;
            }
            c = next;
        }
        Self::new(c)
    }

    pub fn degree(&self) -> usize {
        self.coefficients.len() - 1
    }

    pub fn coefficients(&self) -> &[f64] {
        &self.coefficients
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coefficients.iter().fold(0.0, |acc, &c| acc * x + c)
    }

    fn monic(&self) -> Vec<f64> {
        let lead = self.coefficients[0];
        self.coefficients.iter().map(|c| c / lead).collect()
    }

    fn expect_degree(&self, expected: usize) -> Result<(), PolyError> {
        if self.degree() == expected {
            Ok(())
        } else {
            Err(PolyError::WrongDegree {
                expected,
                actual: self.degree(),
            })
        }
    }
}

/// Real roots of a cubic, ascending, repeated according to multiplicity
/// (always one or three entries).
pub fn cubic_real_roots(p: &PolynomialReal) -> Result<Vec<f64>, PolyError> {
    p.expect_degree(3)?;
    let m = p.monic();
    let (a, b, c) = (m[1], m[2], m[3]);

    // depressed cubic t³ + pt + q with x = t − a/3
    let shift = a / 3.0;
    let pd = b - a * a / 3.0;
    let qd = 2.0 * a * a * a / 27.0 - a * b / 3.0 + c;
    let disc = qd * qd / 4.0 + pd * pd * pd / 27.0;
    // within rounding of a multiple root, treat as three real roots
    let disc_scale = qd * qd / 4.0 + (pd * pd * pd / 27.0).abs();
    let three_real = pd < 0.0 && disc <= 64.0 * f64::EPSILON * disc_scale;

    let mut roots = if pd == 0.0 && qd == 0.0 {
        vec![0.0; 3]
    } else if three_real {
        let r = 2.0 * (-pd / 3.0).sqrt();
        let arg = (3.0 * qd / (2.0 * pd) * (-3.0 / pd).sqrt()).clamp(-1.0, 1.0);
        let phi = arg.acos() / 3.0;
        (0..3)
            .map(|k| r * (phi - 2.0 * PI * k as f64 / 3.0).cos())
            .collect()
    } else {
        let sq = disc.max(0.0).sqrt();
        let u = (-qd / 2.0 - qd.signum() * sq).cbrt();
        let t = if u == 0.0 { 0.0 } else { u - pd / (3.0 * u) };
        vec![t]
    };
    for t in roots.iter_mut() {
        *t = polish(&m, *t - shift);
    }
    roots.sort_by(f64::total_cmp);
    Ok(roots)
}

fn polish(monic: &[f64], mut x: f64) -> f64 {
    let eval = |x: f64| {
        let mut v = 0.0;
        let mut d = 0.0;
        for &c in monic {
            d = d * x + v;
            v = v * x + c;
        }
        (v, d)
    };
    for _ in 0..3 {
        let (v, d) = eval(x);
        if v == 0.0 || d == 0.0 {
            break;
        }
        let next = x - v / d;
        if eval(next).0.abs() < v.abs() {
            x = next;
        } else {
            break;
        }
    }
    x
}

/// Which Routh-Hurwitz condition a quartic failed first.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
pub enum HurwitzCondition {
    /// Coefficient of s^(4−index) in the monic polynomial is not positive.
    NonPositiveCoefficient(usize),
    /// Δ₂ = a₁a₂ − a₃ is not positive.
    SecondDeterminant,
    /// Δ₃ = a₃Δ₂ − a₁²a₄ is not positive.
    ThirdDeterminant,
}

impl fmt::Display for HurwitzCondition {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            HurwitzCondition::NonPositiveCoefficient(i) => write!(f, "a{i} <= 0"),
            HurwitzCondition::SecondDeterminant => write!(f, "a1*a2 - a3 <= 0"),
            HurwitzCondition::ThirdDeterminant => {
                write!(f, "a3*(a1*a2 - a3) - a1^2*a4 <= 0")
            }
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct RouthHurwitz {
    pub stable: bool,
    pub failed: Option<HurwitzCondition>,
    /// Monic coefficients a₁..a₄.
    pub coefficients: [f64; 4],
    pub second_determinant: f64,
    pub third_determinant: f64,
}

/// Routh-Hurwitz classification of s⁴ + a₁s³ + a₂s² + a₃s + a₄ (after normalising
/// by the leading coefficient). Stable means every root has strictly negative
/// real part; roots on the imaginary axis are reported unstable.
pub fn routh_hurwitz_quartic(p: &PolynomialReal) -> Result<RouthHurwitz, PolyError> {
    p.expect_degree(4)?;
    let m = p.monic();
    let a = [m[1], m[2], m[3], m[4]];
    let d2 = a[0] * a[1] - a[2];
    let d3 = a[2] * d2 - a[0] * a[0] * a[3];
    let failed = if let Some(i) = a.iter().position(|&c| !(c > 0.0)) {
        Some(HurwitzCondition::NonPositiveCoefficient(i + 1))
    } else if !(d2 > 0.0) {
        Some(HurwitzCondition::SecondDeterminant)
    } else if !(d3 > 0.0) {
        Some(HurwitzCondition::ThirdDeterminant)
    } else {
        None
    };
    Ok(RouthHurwitz {
        stable: failed.is_none(),
        failed,
        coefficients: a,
        second_determinant: d2,
        third_determinant: d3,
    })
}
