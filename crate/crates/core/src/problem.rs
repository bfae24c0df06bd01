//! Problem definition, affine rescaling to [-1, 1], leading-coefficient
//! normalization and the uniform mesh.

use crate::error::{Error, Result};
use crate::greens::BoundaryData;
use crate::quadrature::{gauss_rule, GaussRule, LegendreTransform};
use std::fmt;
use std::sync::Arc;

/// A scalar field on the problem interval.
pub type Field = Arc<dyn Fn(f64) -> f64 + Send + Sync>;

pub fn field(f: impl Fn(f64) -> f64 + Send + Sync + 'static) -> Field {
    Arc::new(f)
}

pub fn constant(c: f64) -> Field {
    Arc::new(move |_| c)
}

/// Closed interval [a, b] with a < b.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Interval {
    pub a: f64,
    pub b: f64,
}

impl Interval {
    pub fn new(a: f64, b: f64) -> Result<Self> {
        if !(b > a) || !a.is_finite() || !b.is_finite() {
            return Err(Error::DegenerateInterval { a, b });
        }
        Ok(Self { a, b })
    }

    pub fn unit() -> Self {
        Self { a: -1.0, b: 1.0 }
    }

    pub fn length(&self) -> f64 {
        self.b - self.a
    }

    /// y ∈ [-1, 1] ↦ x ∈ [a, b].
    pub fn from_unit(&self, y: f64) -> f64 {
        if y <= -1.0 {
            return self.a;
        }
        if y >= 1.0 {
            return self.b;
        }
        0.5 * (self.a + self.b) + 0.5 * self.length() * y
    }

    /// x ∈ [a, b] ↦ y ∈ [-1, 1].
    pub fn to_unit(&self, x: f64) -> f64 {
        (x - 0.5 * (self.a + self.b)) / (0.5 * self.length())
    }

    /// (2 / (b - a))^j, the factor taking y-derivatives to x-derivatives.
    pub fn derivative_scale(&self, j: usize) -> f64 {
        (2.0 / self.length()).powi(j as i32)
    }

    pub fn contains(&self, x: f64) -> bool {
        x >= self.a && x <= self.b
    }
}

/// The differential operator Σ a_j(x) d^j/dx^j on an interval.
#[derive(Clone)]
pub struct Operator {
    /// a_0 … a_4
    pub coeffs: [Field; 5],
    pub interval: Interval,
}

impl fmt::Debug for Operator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("Operator").field("interval", &self.interval).finish_non_exhaustive()
    }
}

impl Operator {
    pub fn new(coeffs: [Field; 5], interval: Interval) -> Self {
        Self { coeffs, interval }
    }

    /// d⁴/dx⁴ on the given interval.
    pub fn biharmonic(interval: Interval) -> Self {
        Self::new([constant(0.0), constant(0.0), constant(0.0), constant(0.0), constant(1.0)], interval)
    }

    /// Σ a_j(x) φ^{(j)}(x) for given derivative values.
    pub fn apply_at(&self, x: f64, derivs: &[f64; 5]) -> f64 {
        self.coeffs.iter().zip(derivs).map(|(a, d)| a(x) * d).sum()
    }

    /// Same operator written in y ∈ [-1, 1]: ã_j(y) = (2/(b-a))^j a_j(x(y)).
    pub fn rescaled(&self) -> Operator {
        let iv = self.interval;
        let coeffs = std::array::from_fn(|j| {
            let a = self.coeffs[j].clone();
            let s = iv.derivative_scale(j);
            field(move |y| s * a(iv.from_unit(y)))
        });
        Operator::new(coeffs, Interval::unit())
    }
}

/// Σ a_j φ^{(j)} = f on [a, b] with φ, φ' prescribed at both ends.
#[derive(Clone)]
pub struct BVProblem {
    pub operator: Operator,
    pub rhs: Field,
    /// (α_{l,0}, α_{r,0}, α_{l,1}, α_{r,1})
    pub alpha: BoundaryData,
}

impl fmt::Debug for BVProblem {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("BVProblem").field("operator", &self.operator).field("alpha", &self.alpha).finish_non_exhaustive()
    }
}

impl BVProblem {
    pub fn new(operator: Operator, rhs: Field, alpha: BoundaryData) -> Self {
        Self { operator, rhs, alpha }
    }

    pub fn interval(&self) -> Interval {
        self.operator.interval
    }
}

/// Boundary data expressed in y ∈ [-1, 1]: slopes pick up a factor (b-a)/2.
pub fn rescale_alpha(alpha: &BoundaryData, interval: &Interval) -> BoundaryData {
    let h = interval.length() / 2.0;
    [alpha[0], alpha[1], h * alpha[2], h * alpha[3]]
}

/// The same problem posed on [-1, 1].
pub fn rescale_problem(p: &BVProblem) -> BVProblem {
    let iv = p.interval();
    let f = p.rhs.clone();
    BVProblem {
        operator: p.operator.rescaled(),
        rhs: field(move |y| f(iv.from_unit(y))),
        alpha: rescale_alpha(&p.alpha, &iv),
    }
}

/// Maps y-derivative values back to x-derivatives on [a, b], together with
/// the abscissae x(y).
pub fn inverse_rescale_derivatives(ys: &[f64], values: &[f64], j: usize, interval: &Interval) -> (Vec<f64>, Vec<f64>) {
    let s = interval.derivative_scale(j);
    (ys.iter().map(|&y| interval.from_unit(y)).collect(), values.iter().map(|v| s * v).collect())
}

/// Coefficients a_0…a_3 divided by a_4 and sampled at nodes.
#[derive(Debug, Clone, PartialEq)]
pub struct NormalizedTables {
    pub coeffs: [Vec<f64>; 4],
    pub leading: Vec<f64>,
}

/// Samples a_j / a_4 (j < 4) at the given nodes of a [-1, 1] operator.
pub fn normalize_leading(op: &Operator, nodes: &[f64]) -> Result<NormalizedTables> {
    let leading: Vec<f64> = nodes.iter().map(|&y| (op.coeffs[4])(y)).collect();
    if let Some((i, _)) = leading.iter().enumerate().find(|(_, v)| **v == 0.0 || !v.is_finite()) {
        return Err(Error::ZeroLeadingCoefficient { x: op.interval.from_unit(nodes[i]) });
    }
    let coeffs = std::array::from_fn(|j| nodes.iter().zip(&leading).map(|(&y, a4)| (op.coeffs[j])(y) / a4).collect());
    Ok(NormalizedTables { coeffs, leading })
}

impl NormalizedTables {
    /// f / a_4 at the same nodes.
    pub fn normalize_rhs(&self, f: &[f64]) -> Vec<f64> {
        f.iter().zip(&self.leading).map(|(v, a)| v / a).collect()
    }
}

/// One boundary functional: Σ_k w_a[k] φ^{(k)}(a) + Σ_k w_b[k] φ^{(k)}(b) = target.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct BoundaryFunctional {
    pub at_a: [f64; 4],
    pub at_b: [f64; 4],
    pub target: f64,
}

impl BoundaryFunctional {
    pub fn left(k: usize, target: f64) -> Self {
        let mut at_a = [0.0; 4];
        at_a[k] = 1.0;
        Self { at_a, at_b: [0.0; 4], target }
    }

    pub fn right(k: usize, target: f64) -> Self {
        let mut at_b = [0.0; 4];
        at_b[k] = 1.0;
        Self { at_a: [0.0; 4], at_b, target }
    }

    /// Value of the functional given derivative values 0..=3 at a and at b.
    pub fn apply(&self, at_a: &[f64; 4], at_b: &[f64; 4]) -> f64 {
        self.at_a.iter().zip(at_a).chain(self.at_b.iter().zip(at_b)).map(|(w, v)| w * v).sum()
    }
}

/// Four boundary functionals.
pub type GeneralBC = [BoundaryFunctional; 4];

/// The standard clamped-type data α as general functionals.
pub fn standard_bcs(alpha: &BoundaryData) -> GeneralBC {
    [
        BoundaryFunctional::left(0, alpha[0]),
        BoundaryFunctional::right(0, alpha[1]),
        BoundaryFunctional::left(1, alpha[2]),
        BoundaryFunctional::right(1, alpha[3]),
    ]
}

/// m equal subintervals of [-1, 1] with n Gauss nodes each.
#[derive(Debug, Clone)]
pub struct Mesh {
    m: usize,
    rule: GaussRule,
    transform: LegendreTransform,
    breakpoints: Vec<f64>,
    nodes: Vec<f64>,
    weights: Vec<f64>,
}

/// Smallest supported node count per subinterval.
pub const MIN_NODES: usize = 4;

pub fn build_mesh(m: usize, n: usize) -> Result<Mesh> {
    if m == 0 {
        return Err(Error::InvalidDiscretization("at least one subinterval is required".into()));
    }
    if n < MIN_NODES {
        return Err(Error::InvalidDiscretization(format!("n = {n} nodes per subinterval; at least {MIN_NODES} required")));
    }
    let rule = gauss_rule(n)?;
    let breakpoints: Vec<f64> = (0..=m).map(|i| -1.0 + 2.0 * i as f64 / m as f64).collect();
    let mut nodes = Vec::with_capacity(m * n);
    let mut weights = Vec::with_capacity(m * n);
    for k in 0..m {
        let (x, w) = rule.mapped(breakpoints[k], breakpoints[k + 1]);
        nodes.extend(x);
        weights.extend(w);
    }
    let transform = LegendreTransform::new(&rule);
    Ok(Mesh { m, rule, transform, breakpoints, nodes, weights })
}

impl Mesh {
    pub fn subintervals(&self) -> usize {
        self.m
    }

    pub fn nodes_per_subinterval(&self) -> usize {
        self.rule.order()
    }

    pub fn rule(&self) -> &GaussRule {
        &self.rule
    }

    pub fn transform(&self) -> &LegendreTransform {
        &self.transform
    }

    pub fn breakpoints(&self) -> &[f64] {
        &self.breakpoints
    }

    /// All m·n nodes in increasing order.
    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Half-width of every subinterval, 1/m.
    pub fn half_width(&self) -> f64 {
        1.0 / self.m as f64
    }

    pub fn center(&self, k: usize) -> f64 {
        0.5 * (self.breakpoints[k] + self.breakpoints[k + 1])
    }

    /// Global node range of subinterval k.
    pub fn range(&self, k: usize) -> std::ops::Range<usize> {
        let n = self.nodes_per_subinterval();
        k * n..(k + 1) * n
    }

    /// Subinterval containing y ∈ [-1, 1]: breakpoints belong to the
    /// subinterval on their left, except y = -1.
    pub fn locate(&self, y: f64) -> usize {
        let m = self.m;
        let pos = (y + 1.0) * m as f64 / 2.0;
        let mut k = if pos <= 0.0 { 0 } else { (pos.ceil() as usize).saturating_sub(1).min(m - 1) };
        // guard against rounding in the division
        while k > 0 && y <= self.breakpoints[k] {
            k -= 1;
        }
        while k + 1 < m && y > self.breakpoints[k + 1] {
            k += 1;
        }
        k
    }

    /// Local coordinate of y within subinterval k.
    pub fn local_coordinate(&self, k: usize, y: f64) -> f64 {
        ((y - self.center(k)) * self.m as f64).clamp(-1.0, 1.0)
    }
}
