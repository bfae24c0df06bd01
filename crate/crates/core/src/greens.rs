//! The biharmonic Green's function on [-1, 1] with clamped ends, its
//! x-derivatives, their split polynomial form and the boundary cubics.
//!
//! `G_0(x, t)` solves φ'''' = δ(x - t) with φ(±1) = φ'(±1) = 0. For each
//! derivative order j the kernel is a polynomial on either side of the
//! diagonal:
//!
//! ```text
//! G_j(x, t) = Σ_i x^i p_i(t)   for x < t
//!           = Σ_i x^i q_i(t)   for t < x
//! ```

/// 24·G_0 on the branch t > x, coefficient of x^i t^d at `[i][d]`.
const G0_UPPER: [[f64; 4]; 4] = [
    [1.0, 0.0, -3.0, 2.0],
    [0.0, 3.0, -6.0, 3.0],
    [-3.0, 6.0, -3.0, 0.0],
    [-2.0, 3.0, 0.0, -1.0],
];

/// 24·G_0 on the branch t < x.
const G0_LOWER: [[f64; 4]; 4] = [
    [1.0, 0.0, -3.0, -2.0],
    [0.0, 3.0, 6.0, 3.0],
    [-3.0, -6.0, -3.0, 0.0],
    [2.0, 3.0, 0.0, -1.0],
];

/// G_j(x, t) = ∂^j G_0 / ∂x^j evaluated from the factored branch formulas.
///
/// On the diagonal t = x the t < x branch is used.
pub fn green_eval(j: usize, x: f64, t: f64) -> f64 {
    let upper = t > x;
    match (j, upper) {
        (0, true) => (1.0 - t).powi(2) * (1.0 + x).powi(2) * (1.0 + 2.0 * t - 2.0 * x - t * x) / 24.0,
        (0, false) => (1.0 - x).powi(2) * (1.0 + t).powi(2) * (1.0 + 2.0 * x - 2.0 * t - t * x) / 24.0,
        (1, true) => -(1.0 - t).powi(2) * (1.0 + x) * (t * x - t + 2.0 * x) / 8.0,
        (1, false) => (1.0 + t).powi(2) * (1.0 - x) * (t * x + t - 2.0 * x) / 8.0,
        (2, true) => -(1.0 - t).powi(2) * (t * x + 2.0 * x + 1.0) / 4.0,
        (2, false) => -(1.0 + t).powi(2) * (t * x - 2.0 * x + 1.0) / 4.0,
        (3, true) => -(1.0 - t).powi(2) * (t + 2.0) / 4.0,
        (3, false) => (2.0 - t) * (1.0 + t).powi(2) / 4.0,
        _ => panic!("kernel order {j} out of range 0..=3"),
    }
}

/// Split form of G_j: `upper[i][d]` is the t^d coefficient of p_i (branch
/// x < t), `lower[i][d]` that of q_i (branch t < x), for x-powers
/// i = 0..=3-j. Unused rows are zero.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitKernel {
    pub order: usize,
    pub upper: [[f64; 4]; 4],
    pub lower: [[f64; 4]; 4],
}

impl SplitKernel {
    /// Number of x-powers, 4 - j.
    pub fn x_powers(&self) -> usize {
        4 - self.order
    }

    fn eval_table(table: &[[f64; 4]; 4], x: f64, t: f64) -> f64 {
        let mut xp = 1.0;
        let mut sum = 0.0;
        for row in table {
            let q = ((row[3] * t + row[2]) * t + row[1]) * t + row[0];
            sum += xp * q;
            xp *= x;
        }
        sum
    }

    /// Σ x^i p_i(t) regardless of the ordering of x and t.
    pub fn eval_upper(&self, x: f64, t: f64) -> f64 {
        Self::eval_table(&self.upper, x, t)
    }

    /// Σ x^i q_i(t) regardless of the ordering of x and t.
    pub fn eval_lower(&self, x: f64, t: f64) -> f64 {
        Self::eval_table(&self.lower, x, t)
    }

    pub fn eval(&self, x: f64, t: f64) -> f64 {
        if t > x {
            self.eval_upper(x, t)
        } else {
            self.eval_lower(x, t)
        }
    }
}

/// Differentiates the G_0 tables j times in x.
pub fn split_kernel(j: usize) -> SplitKernel {
    assert!(j <= 3, "kernel order {j} out of range 0..=3");
    let mut upper = [[0.0; 4]; 4];
    let mut lower = [[0.0; 4]; 4];
    for i in 0..4 - j {
        // d^j/dx^j x^{i+j} = (i+j)!/i! x^i
        let falling: f64 = ((i + 1)..=(i + j)).map(|v| v as f64).product();
        for d in 0..4 {
            upper[i][d] = falling * G0_UPPER[i + j][d] / 24.0;
            lower[i][d] = falling * G0_LOWER[i + j][d] / 24.0;
        }
    }
    SplitKernel { order: j, upper, lower }
}

/// All four split kernels, index = derivative order.
pub fn split_kernels() -> [SplitKernel; 4] {
    [split_kernel(0), split_kernel(1), split_kernel(2), split_kernel(3)]
}

/// Boundary data (α_{l,0}, α_{r,0}, α_{l,1}, α_{r,1}): values at -1 and 1,
/// then first derivatives at -1 and 1.
pub type BoundaryData = [f64; 4];

/// The cubics with one unit datum among value/slope at ±1.
#[derive(Debug, Clone, Copy, Default)]
pub struct BoundaryCubics;

impl BoundaryCubics {
    /// k-th derivative of member `which` (same order as [`BoundaryData`]).
    pub fn eval(which: usize, x: f64, k: usize) -> f64 {
        let (u, v) = (1.0 - x, 1.0 + x);
        match (which, k) {
            // (1-x)^2 (2+x) / 4 = (x^3 - 3x + 2) / 4
            (0, 0) => u * u * (2.0 + x) / 4.0,
            (0, 1) => 0.75 * (x * x - 1.0),
            (0, 2) => 1.5 * x,
            (0, 3) => 1.5,
            // (1+x)^2 (2-x) / 4 = (-x^3 + 3x + 2) / 4
            (1, 0) => v * v * (2.0 - x) / 4.0,
            (1, 1) => 0.75 * (1.0 - x * x),
            (1, 2) => -1.5 * x,
            (1, 3) => -1.5,
            // (1-x)^2 (x+1) / 4 = (x^3 - x^2 - x + 1) / 4
            (2, 0) => u * u * v / 4.0,
            (2, 1) => (3.0 * x * x - 2.0 * x - 1.0) / 4.0,
            (2, 2) => (6.0 * x - 2.0) / 4.0,
            (2, 3) => 1.5,
            // (1+x)^2 (x-1) / 4 = (x^3 + x^2 - x - 1) / 4
            (3, 0) => v * v * (x - 1.0) / 4.0,
            (3, 1) => (3.0 * x * x + 2.0 * x - 1.0) / 4.0,
            (3, 2) => (6.0 * x + 2.0) / 4.0,
            (3, 3) => 1.5,
            (0..=3, _) => 0.0,
            _ => panic!("boundary cubic index {which} out of range 0..=3"),
        }
    }
}

/// k-th derivative of ψ_α, the cubic matching the boundary data α.
pub fn psi_alpha(alpha: &BoundaryData, x: f64, k: usize) -> f64 {
    alpha.iter().enumerate().filter(|(_, a)| **a != 0.0).map(|(w, a)| a * BoundaryCubics::eval(w, x, k)).sum()
}
