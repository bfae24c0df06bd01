//! Executable checks of the defining properties of the kernels and of the
//! Gauss rule error decay on shrinking intervals.

use std::fmt;

use crate::greens::{green_eval, split_kernels, SplitKernel};
use crate::quadrature::gauss_rule;

/// Outcome of one property check.
#[derive(Debug, Clone, PartialEq)]
pub struct PropertyResult {
    pub name: String,
    /// Largest observed deviation, in the units of the property.
    pub violation: f64,
    pub tolerance: f64,
    pub passed: bool,
}

impl PropertyResult {
    pub fn new(name: impl Into<String>, violation: f64, tolerance: f64) -> Self {
        // NaN never passes
        let passed = violation <= tolerance;
        Self { name: name.into(), violation, tolerance, passed }
    }
}

impl fmt::Display for PropertyResult {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{:<4} {:<44} violation {:.3e}  tolerance {:.1e}", if self.passed { "PASS" } else { "FAIL" }, self.name, self.violation, self.tolerance)
    }
}

/// Step used to probe one-sided limits at t = x.
pub const PROBE_STEP: f64 = 1e-8;

/// Deterministic points of (-1, 1) from the golden-ratio additive sequence.
fn sample_points(count: usize, seed: f64) -> Vec<f64> {
    const PHI: f64 = 0.618_033_988_749_894_9;
    (0..count).map(|i| 2.0 * (seed + PHI * i as f64).fract() - 1.0).collect()
}

fn boundary_vanishing() -> PropertyResult {
    let ts: Vec<f64> = (0..100).map(|i| -1.0 + 2.0 * i as f64 / 99.0).collect();
    let mut worst = 0.0f64;
    for j in 0..2 {
        for &x in &[-1.0, 1.0] {
            for &t in &ts {
                worst = worst.max(green_eval(j, x, t).abs());
            }
        }
    }
    PropertyResult::new("G0, G1 vanish at x = ±1", worst, 1e-14)
}

fn diagonal_probe_points() -> Vec<f64> {
    (0..41).map(|i| -0.95 + 1.9 * i as f64 / 40.0).collect()
}

fn continuity() -> PropertyResult {
    let mut worst = 0.0f64;
    for j in 0..3 {
        for x in diagonal_probe_points() {
            let jump = green_eval(j, x, x + PROBE_STEP) - green_eval(j, x, x - PROBE_STEP);
            worst = worst.max(jump.abs());
        }
    }
    PropertyResult::new("G0, G1, G2 continuous across t = x", worst, 1e-6)
}

fn third_order_jump() -> PropertyResult {
    let worst = diagonal_probe_points()
        .into_iter()
        .map(|x| (green_eval(3, x, x + PROBE_STEP) - green_eval(3, x, x - PROBE_STEP) + 1.0).abs())
        .fold(0.0, f64::max);
    PropertyResult::new("G3 jumps by -1 across t = x", worst, 1e-6)
}

/// Nonzero split coefficients attached to powers of x beyond x^{3-j}.
pub fn verify_x_degree(kernels: &[SplitKernel; 4]) -> PropertyResult {
    let mut worst = 0.0f64;
    for k in kernels {
        for row in k.x_powers()..4 {
            for v in k.upper[row].iter().chain(&k.lower[row]) {
                worst = worst.max(v.abs());
            }
        }
    }
    PropertyResult::new("x-degree of each branch at most 3", worst, 0.0)
}

/// Split-kernel evaluation against the closed-form kernels at 400 points.
pub fn verify_split_reconstruction(kernels: &[SplitKernel; 4]) -> PropertyResult {
    let xs = sample_points(400, 0.1234);
    let ts = sample_points(400, 0.5678);
    let mut worst = 0.0f64;
    for (j, k) in kernels.iter().enumerate() {
        for (&x, &t) in xs.iter().zip(ts.iter().rev()) {
            worst = worst.max((k.eval(x, t) - green_eval(j, x, t)).abs());
        }
    }
    PropertyResult::new("split kernels reproduce G0..G3", worst, 1e-13)
}

/// The kernel properties: boundary vanishing, continuity, unit jump,
/// branch degree and split reconstruction.
pub fn verify_green_properties() -> Vec<PropertyResult> {
    let kernels = split_kernels();
    vec![boundary_vanishing(), continuity(), third_order_jump(), verify_x_degree(&kernels), verify_split_reconstruction(&kernels)]
}

/// Absolute error below which quadrature errors are treated as rounding.
pub const ROUNDING_FLOOR: f64 = 100.0 * f64::EPSILON;

/// Errors of the n-point rule for ∫_0^L f on each length L.
pub fn quadrature_errors(f: impl Fn(f64) -> f64, primitive: impl Fn(f64) -> f64, n: usize, lengths: &[f64]) -> Vec<f64> {
    let rule = gauss_rule(n).expect("n >= 1");
    lengths
        .iter()
        .map(|&l| {
            let (xs, ws) = rule.mapped(0.0, l);
            let approx: f64 = xs.iter().zip(&ws).map(|(x, w)| w * f(*x)).sum();
            (approx - (primitive(l) - primitive(0.0))).abs()
        })
        .collect()
}

/// Checks that halving the interval divides the error by at least 2^{2n}
/// for each consecutive pair of lengths, ignoring pairs whose smaller error
/// has reached the rounding floor.
///
/// The violation is the largest 2^{2n} / observed-ratio; it passes at ≤ 1.
pub fn decay_result(errors: &[f64], n: usize) -> PropertyResult {
    let required = 2f64.powi(2 * n as i32);
    let mut worst = 0.0f64;
    for pair in errors.windows(2) {
        if pair[1] <= ROUNDING_FLOOR || pair[0] <= ROUNDING_FLOOR {
            continue;
        }
        worst = worst.max(required / (pair[0] / pair[1]));
    }
    PropertyResult::new(format!("{n}-point rule error decays by 2^{}", 2 * n), worst, 1.0)
}

/// Gauss error decay for sin(5x) on [0, L], L halving over `lengths`.
pub fn verify_quadrature_bound(n: usize, lengths: &[f64]) -> PropertyResult {
    let errors = quadrature_errors(|x| (5.0 * x).sin(), |x| -(5.0 * x).cos() / 5.0, n, lengths);
    decay_result(&errors, n)
}

/// Default lengths for the decay check.
pub const DEFAULT_LENGTHS: [f64; 3] = [1.0, 0.5, 0.25];
