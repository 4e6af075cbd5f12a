//! Globally adaptive Gauss-Kronrod (10/21 point) quadrature.
//!
//! Segments are kept in a max-heap keyed by their error estimate; the worst one is
//! bisected until the summed error estimate meets the tolerance. Callers that know
//! where the integrand is sharply peaked pass those points as initial breakpoints.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use thiserror::Error;

/// Default hard cap on integrand evaluations.
pub const DEFAULT_MAX_EVALUATIONS: usize = 1_000_000;

const KRONROD_POINTS: usize = 21;

// Abscissae of the 21-point Kronrod rule; odd indices are the 10-point Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 11] = [
    0.995_657_163_025_808_080_735_527_280_689_003,
    0.973_906_528_517_171_720_077_964_012_084_452,
    0.930_157_491_355_708_226_001_207_180_059_508,
    0.865_063_366_688_984_510_732_096_688_423_493,
    0.780_817_726_586_416_897_063_717_578_345_042,
    0.679_409_568_299_024_406_234_327_365_114_874,
    0.562_757_134_668_604_683_339_000_099_272_694,
    0.433_395_394_129_247_190_799_265_943_165_784,
    0.294_392_862_701_460_198_131_126_603_103_866,
    0.148_874_338_981_631_210_884_826_001_129_720,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 5] = [
    0.066_671_344_308_688_137_593_568_809_893_332,
    0.149_451_349_150_580_593_145_776_339_657_697,
    0.219_086_362_515_982_043_995_534_934_228_163,
    0.269_266_719_309_996_355_091_226_921_569_469,
    0.295_524_224_714_752_870_173_892_994_651_338,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 11] = [
    0.011_694_638_867_371_874_278_064_396_062_192,
    0.032_558_162_307_964_727_478_818_972_459_390,
    0.054_755_896_574_351_996_031_381_300_244_580,
    0.075_039_674_810_919_952_767_043_140_916_190,
    0.093_125_454_583_697_605_535_065_465_083_366,
    0.109_387_158_802_297_641_899_210_590_325_805,
    0.123_491_976_262_065_851_077_958_109_831_074,
    0.134_709_217_311_473_325_928_054_001_771_707,
    0.142_775_938_577_060_080_797_094_273_138_717,
    0.147_739_104_901_338_491_374_841_515_972_068,
    0.149_445_554_002_916_905_664_936_468_389_821,
];

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureResult {
    pub value: f64,
    pub est_error: f64,
    pub evaluations: usize,
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadratureError {
    #[error("invalid integration interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("relative tolerance must be positive, got {0}")]
    InvalidTolerance(f64),
    #[error("integrand is not finite at x = {0}")]
    NonFiniteIntegrand(f64),
    #[error("tolerance not met (value {:e}, error estimate {:e})", .partial.value, .partial.est_error)]
    ToleranceNotMet { partial: QuadratureResult },
    #[error("evaluation cap of {cap} exceeded (value {:e}, error estimate {:e})", .partial.value, .partial.est_error)]
    EvaluationCapExceeded {
        cap: usize,
        partial: QuadratureResult,
    },
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadratureOptions {
    pub rel_tol: f64,
    /// Absolute error floor; the target is `max(abs_tol, rel_tol·|value|)`.
    pub abs_tol: f64,
    pub max_evaluations: usize,
}

impl Default for QuadratureOptions {
    fn default() -> Self {
        Self {
            rel_tol: 1e-9,
            abs_tol: 0.0,
            max_evaluations: DEFAULT_MAX_EVALUATIONS,
        }
    }
}

#[derive(Debug, Clone, Copy)]
struct Segment {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.cmp(other) == Ordering::Equal
    }
}
impl Eq for Segment {}
impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error
            .total_cmp(&other.error)
            .then_with(|| other.a.total_cmp(&self.a))
    }
}

/// One Gauss-Kronrod 10/21 panel with QUADPACK-style error rescaling.
fn gauss_kronrod<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Segment, QuadratureError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = f(center);
    if !f_center.is_finite() {
        return Err(QuadratureError::NonFiniteIntegrand(center));
    }
    let mut fv1 = [0.0; 10];
    let mut fv2 = [0.0; 10];
    let mut kronrod = WGK[10] * f_center;
    let mut gauss = 0.0;
    let mut abs_sum = kronrod.abs();
    for j in 0..10 {
        let x = half * XGK[j];
        let (lo, hi) = (f(center - x), f(center + x));
        if !lo.is_finite() {
            return Err(QuadratureError::NonFiniteIntegrand(center - x));
        }
        if !hi.is_finite() {
            return Err(QuadratureError::NonFiniteIntegrand(center + x));
        }
        fv1[j] = lo;
        fv2[j] = hi;
        kronrod += WGK[j] * (lo + hi);
        abs_sum += WGK[j] * (lo.abs() + hi.abs());
        if j % 2 == 1 {
            gauss += WG[j / 2] * (lo + hi);
        }
    }
    let mean = 0.5 * kronrod;
    let mut asc = WGK[10] * (f_center - mean).abs();
    for j in 0..10 {
        asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }
    let value = kronrod * half;
    let res_abs = abs_sum * half.abs();
    let res_asc = asc * half.abs();
    let mut error = ((kronrod - gauss) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }
    Ok(Segment { a, b, value, error })
}

/// Integrate `f` over `[a, b]` to relative tolerance `rel_tol`.
pub fn integrate_adaptive<F: Fn(f64) -> f64>(
    f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
) -> Result<QuadratureResult, QuadratureError> {
    integrate_with_breakpoints(
        f,
        &[a, b],
        QuadratureOptions {
            rel_tol,
            ..Default::default()
        },
    )
}

/// Integrate `f` over `[points[0], points[last]]`, starting from the segments
/// delimited by the strictly increasing `points`.
pub fn integrate_with_breakpoints<F: Fn(f64) -> f64>(
    f: F,
    points: &[f64],
    opts: QuadratureOptions,
) -> Result<QuadratureResult, QuadratureError> {
    let (a, b) = match points {
        [first, .., last] => (*first, *last),
        _ => return Err(QuadratureError::InvalidInterval { a: f64::NAN, b: f64::NAN }),
    };
    if !(a.is_finite() && b.is_finite() && a < b) || points.windows(2).any(|w| w[0] >= w[1]) {
        return Err(QuadratureError::InvalidInterval { a, b });
    }
    if !(opts.rel_tol > 0.0) {
        return Err(QuadratureError::InvalidTolerance(opts.rel_tol));
    }

    let mut heap = BinaryHeap::new();
    let mut evaluations = 0;
    for w in points.windows(2) {
        heap.push(gauss_kronrod(&f, w[0], w[1])?);
        evaluations += KRONROD_POINTS;
    }

    loop {
        let value: f64 = heap.iter().map(|s| s.value).sum();
        let est_error: f64 = heap.iter().map(|s| s.error).sum();
        let result = QuadratureResult {
            value,
            est_error,
            evaluations,
        };
        if est_error <= opts.abs_tol.max(opts.rel_tol * value.abs()) {
            return Ok(result);
        }
        if evaluations + 2 * KRONROD_POINTS > opts.max_evaluations {
            return Err(QuadratureError::EvaluationCapExceeded {
                cap: opts.max_evaluations,
                partial: result,
            });
        }
        let worst = heap.pop().expect("at least one segment");
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            // segment cannot be split further in double precision
            heap.push(worst);
            return Err(QuadratureError::ToleranceNotMet { partial: result });
        }
        heap.push(gauss_kronrod(&f, worst.a, mid)?);
        heap.push(gauss_kronrod(&f, mid, worst.b)?);
        evaluations += 2 * KRONROD_POINTS;
    }
}
