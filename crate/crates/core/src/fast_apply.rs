//! Linear-cost application of the kernels G_j and of L G_0 to a function
//! sampled at all m·n mesh nodes.
//!
//! With the split form G_j(x, t) = Σ_i x^i q_i(t) (t < x), Σ_i x^i p_i(t)
//! (t > x) every integral reduces to moments ∫ t^d σ(t) dt, d = 0..3, over
//! whole subintervals (combined by prefix sums) and over the partial piece
//! of the subinterval that contains x. The partial pieces use n×n tables
//! computed once, because on a uniform mesh they are identical in local
//! coordinates.

use crate::greens::{split_kernels, SplitKernel};
use crate::problem::Mesh;
use crate::quadrature::{antiderivative_coeffs, eval_expansion, gauss_rule, legendre_eval, multiply_by_x, GaussRule, LegendreTransform};

/// Moment tables for one subinterval mapped to ξ ∈ [-1, 1].
///
/// For node values σ_l of a degree-(n-1) polynomial:
/// `full[e] · σ = ∫_{-1}^{1} ξ^e σ dξ`, row r of `left[e]` gives
/// `∫_{-1}^{y_r} ξ^e σ dξ` and row r of `right[e]` gives `∫_{y_r}^{1} ξ^e σ dξ`.
#[derive(Debug, Clone)]
pub struct LocalMomentTables {
    n: usize,
    pub full: [Vec<f64>; 4],
    pub left: [Vec<f64>; 4],
    pub right: [Vec<f64>; 4],
}

impl LocalMomentTables {
    pub fn new(rule: &GaussRule, transform: &LegendreTransform) -> Self {
        let n = rule.order();
        let v2c = transform.values_to_coeffs_matrix();
        let sub = gauss_rule(n).expect("n >= 1");
        let full = std::array::from_fn(|e| rule.nodes().iter().zip(rule.weights()).map(|(y, w)| y.powi(e as i32) * w).collect());
        let mut left: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; n * n]);
        let mut right: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; n * n]);

        // Lagrange cardinal values at ξ via the Legendre expansion
        let cardinals = |xi: f64| -> Vec<f64> {
            let p = legendre_eval(n - 1, xi);
            (0..n).map(|l| (0..n).map(|i| p[i] * v2c[i * n + l]).sum()).collect()
        };

        for (r, &yr) in rule.nodes().iter().enumerate() {
            for (tables, lo, hi) in [(&mut left, -1.0, yr), (&mut right, yr, 1.0)] {
                let (taus, ws) = sub.mapped(lo, hi);
                for (&tau, &w) in taus.iter().zip(&ws) {
                    let card = cardinals(tau);
                    let mut power = w;
                    for table in tables.iter_mut() {
                        for (l, c) in card.iter().enumerate() {
                            table[r * n + l] += power * c;
                        }
                        power *= tau;
                    }
                }
            }
        }
        Self { n, full, left, right }
    }

    pub fn order(&self) -> usize {
        self.n
    }
}

fn binomial(d: usize, e: usize) -> f64 {
    const B: [[f64; 4]; 4] = [[1.0, 0.0, 0.0, 0.0], [1.0, 1.0, 0.0, 0.0], [1.0, 2.0, 1.0, 0.0], [1.0, 3.0, 3.0, 1.0]];
    B[d][e]
}

/// Converts local moments ∫ξ^e σ dξ (e = 0..3) on a subinterval with centre
/// c and half-width s into global moments ∫ t^d σ dt with t = c + sξ.
fn to_global_moments(local: &[f64; 4], c: f64, s: f64) -> [f64; 4] {
    let mut cpow = [1.0; 4];
    let mut spow = [s; 4];
    for i in 1..4 {
        cpow[i] = cpow[i - 1] * c;
        spow[i] = spow[i - 1] * s;
    }
    std::array::from_fn(|d| (0..=d).map(|e| binomial(d, e) * cpow[d - e] * spow[e] * local[e]).sum())
}

/// Everything needed to apply G_j on a mesh in O(m·n²).
#[derive(Debug, Clone)]
pub struct PartialIntegralTables {
    m: usize,
    n: usize,
    half_width: f64,
    centers: Vec<f64>,
    breakpoints: Vec<f64>,
    nodes: Vec<f64>,
    local: LocalMomentTables,
    transform: LegendreTransform,
    kernels: [SplitKernel; 4],
}

pub fn build_tables(mesh: &Mesh, kernels: &[SplitKernel; 4]) -> PartialIntegralTables {
    let m = mesh.subintervals();
    PartialIntegralTables {
        m,
        n: mesh.nodes_per_subinterval(),
        half_width: mesh.half_width(),
        centers: (0..m).map(|k| mesh.center(k)).collect(),
        breakpoints: mesh.breakpoints().to_vec(),
        nodes: mesh.nodes().to_vec(),
        local: LocalMomentTables::new(mesh.rule(), mesh.transform()),
        transform: mesh.transform().clone(),
        kernels: *kernels,
    }
}

fn mat_vec_row(table: &[f64], n: usize, r: usize, v: &[f64]) -> f64 {
    table[r * n..(r + 1) * n].iter().zip(v).map(|(a, b)| a * b).sum()
}

fn poly_dot(poly: &[f64; 4], moments: &[f64; 4]) -> f64 {
    poly.iter().zip(moments).map(|(a, b)| a * b).sum()
}

impl PartialIntegralTables {
    pub fn local_tables(&self) -> &LocalMomentTables {
        &self.local
    }

    pub fn kernels(&self) -> &[SplitKernel; 4] {
        &self.kernels
    }

    fn global_full(&self, k: usize, sigma: &[f64]) -> [f64; 4] {
        let loc = std::array::from_fn(|e| self.local.full[e].iter().zip(sigma).map(|(a, b)| a * b).sum());
        to_global_moments(&loc, self.centers[k], self.half_width)
    }

    fn global_partial(&self, k: usize, r: usize, sigma: &[f64], left: bool) -> [f64; 4] {
        let t = if left { &self.local.left } else { &self.local.right };
        let loc = std::array::from_fn(|e| mat_vec_row(&t[e], self.n, r, sigma));
        to_global_moments(&loc, self.centers[k], self.half_width)
    }

    /// ∫_{x_k}^{x_{k+1}} poly(t) σ(t) dt for σ given at the n nodes of
    /// subinterval k and poly given by its t^0..t^3 coefficients.
    pub fn full_integral(&self, k: usize, poly: &[f64; 4], sigma: &[f64]) -> f64 {
        poly_dot(poly, &self.global_full(k, sigma))
    }

    /// ∫_{x_k}^{x_r} poly(t) σ(t) dt at each node x_r of subinterval k.
    pub fn left_partials(&self, k: usize, poly: &[f64; 4], sigma: &[f64]) -> Vec<f64> {
        (0..self.n).map(|r| poly_dot(poly, &self.global_partial(k, r, sigma, true))).collect()
    }

    /// ∫_{x_r}^{x_{k+1}} poly(t) σ(t) dt at each node x_r of subinterval k.
    pub fn right_partials(&self, k: usize, poly: &[f64; 4], sigma: &[f64]) -> Vec<f64> {
        (0..self.n).map(|r| poly_dot(poly, &self.global_partial(k, r, sigma, false))).collect()
    }

    /// Prefix sums of whole-subinterval moments: (Σ_{k'<k}, Σ_{k'>k}).
    fn prefix_moments(&self, sigma: &[f64]) -> (Vec<[f64; 4]>, Vec<[f64; 4]>) {
        let n = self.n;
        let full: Vec<[f64; 4]> = (0..self.m).map(|k| self.global_full(k, &sigma[k * n..(k + 1) * n])).collect();
        let mut before = vec![[0.0; 4]; self.m];
        let mut after = vec![[0.0; 4]; self.m];
        for k in 1..self.m {
            for d in 0..4 {
                before[k][d] = before[k - 1][d] + full[k - 1][d];
            }
        }
        for k in (0..self.m.saturating_sub(1)).rev() {
            for d in 0..4 {
                after[k][d] = after[k + 1][d] + full[k + 1][d];
            }
        }
        (before, after)
    }

    fn combine(&self, x: f64, below: &[f64; 4], above: &[f64; 4], out: &mut [f64; 4]) {
        for (j, kernel) in self.kernels.iter().enumerate() {
            let mut xp = 1.0;
            let mut v = 0.0;
            for i in 0..kernel.x_powers() {
                v += xp * (poly_dot(&kernel.lower[i], below) + poly_dot(&kernel.upper[i], above));
                xp *= x;
            }
            out[j] = v;
        }
    }

    /// (G_j σ̂)(x) for j = 0..3 at every mesh node.
    pub fn apply_all(&self, sigma: &[f64]) -> [Vec<f64>; 4] {
        let n = self.n;
        assert_eq!(sigma.len(), self.m * n);
        let (before, after) = self.prefix_moments(sigma);
        let mut out: [Vec<f64>; 4] = std::array::from_fn(|_| vec![0.0; self.m * n]);
        let mut vals = [0.0; 4];
        for k in 0..self.m {
            let sk = &sigma[k * n..(k + 1) * n];
            for r in 0..n {
                let left = self.global_partial(k, r, sk, true);
                let right = self.global_partial(k, r, sk, false);
                let below: [f64; 4] = std::array::from_fn(|d| before[k][d] + left[d]);
                let above: [f64; 4] = std::array::from_fn(|d| after[k][d] + right[d]);
                self.combine(self.nodes[k * n + r], &below, &above, &mut vals);
                for j in 0..4 {
                    out[j][k * n + r] = vals[j];
                }
            }
        }
        out
    }

    /// (G_j σ̂) at the mesh nodes.
    pub fn apply_g(&self, j: usize, sigma: &[f64]) -> Vec<f64> {
        let mut all = self.apply_all(sigma);
        std::mem::take(&mut all[j])
    }

    /// (G_j σ̂)(y) for j = 0..3 at arbitrary points of [-1, 1].
    ///
    /// The partial piece is integrated through the Legendre expansion of σ
    /// on the containing subinterval (multiply by ξ, take the primitive).
    pub fn apply_all_at(&self, sigma: &[f64], points: &[f64]) -> Vec<[f64; 4]> {
        let n = self.n;
        assert_eq!(sigma.len(), self.m * n);
        let (before, after) = self.prefix_moments(sigma);
        let mut primitive_cache: Vec<Option<[Vec<f64>; 4]>> = vec![None; self.m];
        points
            .iter()
            .map(|&y| {
                let y = y.clamp(-1.0, 1.0);
                let k = locate(&self.breakpoints, y);
                let prims = primitive_cache[k].get_or_insert_with(|| {
                    let mut c = self.transform.values_to_coeffs(&sigma[k * n..(k + 1) * n]);
                    std::array::from_fn(|e| {
                        if e > 0 {
                            c = multiply_by_x(&c);
                        }
                        antiderivative_coeffs(&c)
                    })
                });
                let xi = ((y - self.centers[k]) / self.half_width).clamp(-1.0, 1.0);
                let left_loc: [f64; 4] = std::array::from_fn(|e| eval_expansion(&prims[e], xi));
                let right_loc: [f64; 4] = std::array::from_fn(|e| eval_expansion(&prims[e], 1.0) - left_loc[e]);
                let left = to_global_moments(&left_loc, self.centers[k], self.half_width);
                let right = to_global_moments(&right_loc, self.centers[k], self.half_width);
                let below: [f64; 4] = std::array::from_fn(|d| before[k][d] + left[d]);
                let above: [f64; 4] = std::array::from_fn(|d| after[k][d] + right[d]);
                let mut vals = [0.0; 4];
                self.combine(y, &below, &above, &mut vals);
                vals
            })
            .collect()
    }
}

fn locate(breakpoints: &[f64], y: f64) -> usize {
    let m = breakpoints.len() - 1;
    let k = breakpoints.partition_point(|&b| b < y);
    k.saturating_sub(1).min(m - 1)
}

/// Normalized coefficient samples a_0/a_4 … a_3/a_4 at the mesh nodes.
pub type CoefficientTables = [Vec<f64>; 4];

/// (L G_0 σ̂) = σ̂ + Σ_j a_j ⊙ (G_j σ̂) at all mesh nodes (a_4 ≡ 1).
pub fn apply_lg0(coeffs: &CoefficientTables, sigma: &[f64], tables: &PartialIntegralTables) -> Vec<f64> {
    let g = tables.apply_all(sigma);
    let mut out = sigma.to_vec();
    for j in 0..4 {
        for ((o, a), v) in out.iter_mut().zip(&coeffs[j]).zip(&g[j]) {
            *o += a * v;
        }
    }
    out
}

/// Split kernels and tables for a mesh.
pub fn tables_for(mesh: &Mesh) -> PartialIntegralTables {
    build_tables(mesh, &split_kernels())
}
