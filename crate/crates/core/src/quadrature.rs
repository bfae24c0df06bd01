//! Legendre polynomials, Gauss-Legendre rules and the maps between node
//! values and Legendre coefficients.

use crate::error::{Error, Result};
use std::f64::consts::PI;

const NEWTON_MAX_ITERATIONS: usize = 100;

/// Values P_0(x), …, P_{n_max}(x) by the three-term recurrence.
pub fn legendre_eval(n_max: usize, x: f64) -> Vec<f64> {
    let mut p = Vec::with_capacity(n_max + 1);
    p.push(1.0);
    if n_max >= 1 {
        p.push(x);
    }
    for k in 1..n_max {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * p[k] - kf * p[k - 1]) / (kf + 1.0);
        p.push(next);
    }
    p
}

/// P_n(x) and P_n'(x).
pub fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    if n == 0 {
        return (1.0, 0.0);
    }
    let mut prev = 1.0;
    let mut cur = x;
    let mut dprev = 0.0;
    let mut dcur = 1.0;
    for k in 1..n {
        let kf = k as f64;
        let next = ((2.0 * kf + 1.0) * x * cur - kf * prev) / (kf + 1.0);
        // P'_{k+1} = P'_{k-1} + (2k+1) P_k
        let dnext = dprev + (2.0 * kf + 1.0) * cur;
        prev = cur;
        cur = next;
        dprev = dcur;
        dcur = dnext;
    }
    (cur, dcur)
}

/// n-point Gauss-Legendre rule on [-1, 1].
#[derive(Debug, Clone, PartialEq)]
pub struct GaussRule {
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

impl GaussRule {
    pub fn order(&self) -> usize {
        self.nodes.len()
    }

    /// Nodes in increasing order.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Nodes and weights affinely mapped onto [a, b].
    pub fn mapped(&self, a: f64, b: f64) -> (Vec<f64>, Vec<f64>) {
        let half = 0.5 * (b - a);
        let mid = 0.5 * (a + b);
        let nodes = self.nodes.iter().map(|y| mid + half * y).collect();
        let weights = self.weights.iter().map(|w| half * w).collect();
        (nodes, weights)
    }
}

/// Gauss-Legendre nodes (roots of P_n) by Newton iteration from Chebyshev
/// initial guesses, and weights 2 / ((1 - y²) P_n'(y)²).
pub fn gauss_rule(n: usize) -> Result<GaussRule> {
    if n == 0 {
        return Err(Error::InvalidDiscretization("Gauss rule needs at least one node".into()));
    }
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // i-th largest root
        let mut y = (PI * (i as f64 + 0.75) / (nf + 0.5)).cos();
        if 2 * i + 1 == n {
            y = 0.0;
        }
        let mut converged = false;
        for _ in 0..NEWTON_MAX_ITERATIONS {
            let (p, dp) = legendre_with_derivative(n, y);
            let step = p / dp;
            y -= step;
            if step.abs() <= 2.0 * f64::EPSILON * y.abs().max(f64::EPSILON) {
                converged = true;
                break;
            }
        }
        if !converged {
            // Newton stalls at the rounding level; accept if the last steps
            // were already tiny.
            let (p, dp) = legendre_with_derivative(n, y);
            if (p / dp).abs() > 1e-14 {
                return Err(Error::QuadratureNonConvergence { order: n, index: i });
            }
        }
        let (_, dp) = legendre_with_derivative(n, y);
        let w = 2.0 / ((1.0 - y * y) * dp * dp);
        nodes[n - 1 - i] = y;
        nodes[i] = -y;
        weights[n - 1 - i] = w;
        weights[i] = w;
    }
    Ok(GaussRule { nodes, weights })
}

/// Σ f(rescaled y_i) · (b - a)/2 · w_i for samples taken at the mapped nodes.
pub fn integrate_on(rule: &GaussRule, a: f64, b: f64, samples: &[f64]) -> f64 {
    assert_eq!(samples.len(), rule.order());
    0.5 * (b - a) * samples.iter().zip(&rule.weights).map(|(f, w)| f * w).sum::<f64>()
}

/// Node values ↔ Legendre coefficients for one Gauss rule.
#[derive(Debug, Clone)]
pub struct LegendreTransform {
    order: usize,
    /// row i: ((2i+1)/2) P_i(y_j) w_j
    to_coeffs: Vec<f64>,
    /// row j: P_i(y_j)
    to_values: Vec<f64>,
}

impl LegendreTransform {
    pub fn new(rule: &GaussRule) -> Self {
        let n = rule.order();
        let mut to_coeffs = vec![0.0; n * n];
        let mut to_values = vec![0.0; n * n];
        for (j, (&y, &w)) in rule.nodes().iter().zip(rule.weights()).enumerate() {
            let p = legendre_eval(n - 1, y);
            for i in 0..n {
                to_coeffs[i * n + j] = (2.0 * i as f64 + 1.0) * 0.5 * p[i] * w;
                to_values[j * n + i] = p[i];
            }
        }
        Self { order: n, to_coeffs, to_values }
    }

    pub fn order(&self) -> usize {
        self.order
    }

    pub fn values_to_coeffs(&self, samples: &[f64]) -> Vec<f64> {
        apply(&self.to_coeffs, self.order, samples)
    }

    pub fn coeffs_to_values(&self, coeffs: &[f64]) -> Vec<f64> {
        apply(&self.to_values, self.order, coeffs)
    }

    /// Row-major n×n matrix mapping node values to coefficients.
    pub fn values_to_coeffs_matrix(&self) -> &[f64] {
        &self.to_coeffs
    }
}

fn apply(m: &[f64], n: usize, v: &[f64]) -> Vec<f64> {
    assert_eq!(v.len(), n);
    m.chunks(n).map(|row| row.iter().zip(v).map(|(a, b)| a * b).sum()).collect()
}

/// Σ c_i P_i(x) by the recurrence.
pub fn eval_expansion(coeffs: &[f64], x: f64) -> f64 {
    match coeffs.len() {
        0 => 0.0,
        1 => coeffs[0],
        _ => {
            let mut prev = 1.0;
            let mut cur = x;
            let mut sum = coeffs[0] + coeffs[1] * x;
            for (k, c) in coeffs.iter().enumerate().skip(2) {
                let kf = (k - 1) as f64;
                let next = ((2.0 * kf + 1.0) * x * cur - kf * prev) / (kf + 1.0);
                prev = cur;
                cur = next;
                sum += c * cur;
            }
            sum
        }
    }
}

/// Coefficients of the primitive of Σ c_k P_k that vanishes at x = -1.
///
/// Uses ∫P_k = (P_{k+1} - P_{k-1}) / (2k + 1); the result has one more term.
pub fn antiderivative_coeffs(coeffs: &[f64]) -> Vec<f64> {
    let n = coeffs.len();
    let mut b = vec![0.0; n + 1];
    if n == 0 {
        return b;
    }
    // ∫P_0 = P_1 + const
    b[1] += coeffs[0];
    for k in 1..n {
        let s = coeffs[k] / (2.0 * k as f64 + 1.0);
        b[k + 1] += s;
        b[k - 1] -= s;
    }
    // P_k(-1) = (-1)^k
    let at_minus_one: f64 = b.iter().enumerate().skip(1).map(|(k, v)| if k % 2 == 0 { *v } else { -*v }).sum();
    b[0] = -at_minus_one;
    b
}

/// Coefficients of x · Σ c_k P_k (one more term), using
/// x P_k = ((k+1) P_{k+1} + k P_{k-1}) / (2k+1).
pub fn multiply_by_x(coeffs: &[f64]) -> Vec<f64> {
    let n = coeffs.len();
    let mut b = vec![0.0; n + 1];
    for (k, &c) in coeffs.iter().enumerate() {
        let kf = k as f64;
        let d = 2.0 * kf + 1.0;
        b[k + 1] += c * (kf + 1.0) / d;
        if k > 0 {
            b[k - 1] += c * kf / d;
        }
    }
    b
}

/// Coefficients of the derivative of Σ c_k P_k (one fewer term).
pub fn derivative_coeffs(coeffs: &[f64]) -> Vec<f64> {
    let n = coeffs.len();
    if n <= 1 {
        return vec![0.0];
    }
    // P'_{k+1} - P'_{k-1} = (2k+1) P_k, processed from the top down
    let mut c = coeffs.to_vec();
    let mut d = vec![0.0; n - 1];
    for k in (1..n).rev() {
        d[k - 1] = (2.0 * (k - 1) as f64 + 1.0) * c[k];
        if k >= 2 {
            c[k - 2] += c[k];
        }
    }
    d
}
