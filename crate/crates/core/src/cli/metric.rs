//! The relative error measure used in every experiment table.

use crate::error::{Error, Result};
use crate::problem::Interval;

/// Number of equispaced evaluation points, endpoints included.
pub const DEFAULT_GRID: usize = 10_000;

/// `points` equispaced abscissae from a to b inclusive.
pub fn equispaced_grid(interval: &Interval, points: usize) -> Vec<f64> {
    assert!(points >= 2, "grid needs both endpoints");
    let (a, b) = (interval.a, interval.b);
    let last = (points - 1) as f64;
    (0..points).map(|i| if i + 1 == points { b } else { a + (b - a) * i as f64 / last }).collect()
}

/// sqrt(Σ |est(x_i) - ref(x_i)|² / Σ |ref(x_i)|²) over an equispaced grid.
pub fn relative_error_r(estimate: impl Fn(f64) -> f64, reference: impl Fn(f64) -> f64, interval: &Interval, points: usize) -> Result<f64> {
    let mut num = 0.0;
    let mut den = 0.0;
    for x in equispaced_grid(interval, points) {
        let r = reference(x);
        num += (estimate(x) - r).powi(2);
        den += r * r;
    }
    if den == 0.0 {
        return Err(Error::ZeroReference);
    }
    Ok((num / den).sqrt())
}

/// R from precomputed samples on the same grid.
pub fn relative_error_samples(estimate: &[f64], reference: &[f64]) -> Result<f64> {
    if estimate.len() != reference.len() {
        return Err(Error::DimensionMismatch { expected: reference.len(), got: estimate.len() });
    }
    let num: f64 = estimate.iter().zip(reference).map(|(e, r)| (e - r).powi(2)).sum();
    let den: f64 = reference.iter().map(|r| r * r).sum();
    if den == 0.0 {
        return Err(Error::ZeroReference);
    }
    Ok((num / den).sqrt())
}
