//! Factorization, the deferred-corrections solve and the piecewise
//! Legendre representation of the result.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fast_apply::{apply_lg0, build_tables, LocalMomentTables, PartialIntegralTables};
use crate::greens::{split_kernels, BoundaryCubics, BoundaryData};
use crate::linalg::{qr_factor, Matrix};
use crate::local_solver::{assemble_all, homogeneous_basis, solve_boundary, HomogeneousBasis, LocalDiscretization, LocalKernels, LocalSystem};
use crate::matching::{EndpointData, MatchingSystem};
use crate::problem::{build_mesh, normalize_leading, rescale_alpha, BVProblem, Field, GeneralBC, Interval, Mesh, NormalizedTables, Operator, MIN_NODES};
use crate::quadrature::{antiderivative_coeffs, eval_expansion, LegendreTransform};

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SolverOptions {
    /// Number of subintervals.
    pub m: usize,
    /// Gauss nodes per subinterval.
    pub n: usize,
    pub max_iterations: usize,
    /// Two consecutive residual ratios above this value stop the iteration.
    pub stagnation_ratio: f64,
    pub target_residual: f64,
    pub local: LocalDiscretization,
}

impl SolverOptions {
    pub fn new(m: usize, n: usize) -> Self {
        Self { m, n, max_iterations: 30, stagnation_ratio: 0.5, target_residual: 10.0 * f64::EPSILON, local: LocalDiscretization::default() }
    }

    pub fn validate(&self) -> Result<()> {
        if self.m == 0 {
            return Err(Error::InvalidDiscretization("m must be at least 1".into()));
        }
        if self.n < MIN_NODES {
            return Err(Error::InvalidDiscretization(format!("n must be at least {MIN_NODES}")));
        }
        if !(self.stagnation_ratio > 0.0 && self.stagnation_ratio < 1.0) {
            return Err(Error::InvalidDiscretization(format!("stagnation ratio {} must lie in (0, 1)", self.stagnation_ratio)));
        }
        if self.max_iterations == 0 {
            return Err(Error::InvalidDiscretization("at least one iteration is required".into()));
        }
        Ok(())
    }
}

/// Relative residual after each deferred-corrections iteration.
#[derive(Debug, Clone, Default, PartialEq)]
pub struct IterationLog {
    pub residuals: Vec<f64>,
}

impl IterationLog {
    pub fn len(&self) -> usize {
        self.residuals.len()
    }

    pub fn is_empty(&self) -> bool {
        self.residuals.is_empty()
    }

    pub fn last(&self) -> Option<f64> {
        self.residuals.last().copied()
    }

    pub fn min(&self) -> f64 {
        self.residuals.iter().copied().fold(f64::INFINITY, f64::min)
    }
}

/// Everything that depends on the operator and the mesh but not on the
/// right-hand side or the boundary data.
#[derive(Debug, Clone)]
pub struct Factorization {
    options: SolverOptions,
    interval: Interval,
    mesh: Mesh,
    tables: NormalizedTables,
    systems: Vec<LocalSystem>,
    bases: Vec<HomogeneousBasis>,
    matching: MatchingSystem,
    partial: PartialIntegralTables,
    /// psi[w][j]: j-th derivative of boundary cubic w at the mesh nodes.
    psi: [[Vec<f64>; 4]; 4],
}

pub fn factorize(op: &Operator, options: &SolverOptions) -> Result<Factorization> {
    options.validate()?;
    let mesh = build_mesh(options.m, options.n)?;
    let tables = normalize_leading(&op.rescaled(), mesh.nodes())?;
    let moments = LocalMomentTables::new(mesh.rule(), mesh.transform());
    let kernels = Arc::new(LocalKernels::new(mesh.rule(), &moments));
    let systems = assemble_all(&mesh, &tables, &kernels, options.local)?;
    let bases: Vec<HomogeneousBasis> = systems.iter().map(homogeneous_basis).collect();
    let matching = MatchingSystem::new(&bases)?;
    let partial = build_tables(&mesh, &split_kernels());
    let psi = std::array::from_fn(|w| std::array::from_fn(|j| mesh.nodes().iter().map(|&y| BoundaryCubics::eval(w, y, j)).collect()));
    Ok(Factorization { options: *options, interval: op.interval, mesh, tables, systems, bases, matching, partial, psi })
}

fn weighted_norm(v: &[f64], w: &[f64]) -> f64 {
    v.iter().zip(w).map(|(x, w)| w * x * x).sum::<f64>().sqrt()
}

impl Factorization {
    pub fn options(&self) -> &SolverOptions {
        &self.options
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn tables(&self) -> &NormalizedTables {
        &self.tables
    }

    pub fn local_systems(&self) -> &[LocalSystem] {
        &self.systems
    }

    pub fn bases(&self) -> &[HomogeneousBasis] {
        &self.bases
    }

    pub fn matching(&self) -> &MatchingSystem {
        &self.matching
    }

    pub fn partial_tables(&self) -> &PartialIntegralTables {
        &self.partial
    }

    /// Samples f at the mesh nodes and divides by the rescaled leading
    /// coefficient.
    pub fn normalized_rhs(&self, f: &Field) -> Vec<f64> {
        let iv = self.interval;
        let samples: Vec<f64> = self.mesh.nodes().iter().map(|&y| f(iv.from_unit(y))).collect();
        self.tables.normalize_rhs(&samples)
    }

    /// ψ_α^{(j)} at the mesh nodes, α in [-1, 1] coordinates.
    fn psi_values(&self, alpha: &BoundaryData, j: usize) -> Vec<f64> {
        let mut out = vec![0.0; self.mesh.nodes().len()];
        for (w, a) in alpha.iter().enumerate() {
            if *a != 0.0 {
                for (o, v) in out.iter_mut().zip(&self.psi[w][j]) {
                    *o += a * v;
                }
            }
        }
        out
    }

    /// g - L ψ_α at the mesh nodes.
    pub fn reduced_rhs(&self, g: &[f64], alpha: &BoundaryData) -> Vec<f64> {
        let mut out = g.to_vec();
        for j in 0..4 {
            let psi = self.psi_values(alpha, j);
            for ((o, c), p) in out.iter_mut().zip(&self.tables.coeffs[j]).zip(&psi) {
                *o -= c * p;
            }
        }
        out
    }

    /// One pass of local solves plus matching: an approximate inverse of
    /// L G_0 with the boundary data α folded in.
    pub fn approximate_inverse(&self, g: &[f64], alpha: &BoundaryData) -> Vec<f64> {
        let locals: Vec<_> = self.systems.iter().enumerate().map(|(k, s)| solve_boundary(s, &g[self.mesh.range(k)], &[0.0; 4])).collect();
        let ends: Vec<EndpointData> = locals.iter().map(|l| (l.left, l.right)).collect();
        let beta = self.matching.solve(&ends, alpha);
        let mut sigma = Vec::with_capacity(g.len());
        for (k, local) in locals.into_iter().enumerate() {
            let b = beta.subinterval(k);
            let mut part = local.sigma;
            for (w, member) in self.bases[k].members.iter().enumerate() {
                for (p, v) in part.iter_mut().zip(&member.sigma) {
                    *p += b[w] * v;
                }
            }
            sigma.extend(part);
        }
        sigma
    }

    /// L G_0 σ̂ at the mesh nodes.
    pub fn apply_operator(&self, sigma: &[f64]) -> Vec<f64> {
        apply_lg0(&self.tables.coeffs, sigma, &self.partial)
    }

    /// Deferred corrections on σ̂ for normalized data g and α in [-1, 1]
    /// coordinates. Returns the best σ̂ seen and the residual history.
    pub fn iterate(&self, g: &[f64], alpha: &BoundaryData) -> (Vec<f64>, IterationLog) {
        let opts = &self.options;
        let w = self.mesh.weights();
        let f_alpha = self.reduced_rhs(g, alpha);
        let f_norm = weighted_norm(&f_alpha, w);
        let mut sigma = self.approximate_inverse(g, alpha);
        let mut log = IterationLog::default();
        let mut best: Option<(f64, Vec<f64>)> = None;
        let mut slow_steps = 0;
        for it in 1..=opts.max_iterations {
            let applied = self.apply_operator(&sigma);
            let delta: Vec<f64> = f_alpha.iter().zip(&applied).map(|(f, a)| f - a).collect();
            let d_norm = weighted_norm(&delta, w);
            let residual = if f_norm == 0.0 { d_norm } else { d_norm / f_norm };
            if let Some(&prev) = log.residuals.last() {
                slow_steps = if residual > opts.stagnation_ratio * prev { slow_steps + 1 } else { 0 };
            }
            log.residuals.push(residual);
            if best.as_ref().map_or(true, |(r, _)| residual < *r) {
                best = Some((residual, sigma.clone()));
            }
            if residual <= opts.target_residual || slow_steps >= 2 || it == opts.max_iterations {
                break;
            }
            let correction = self.approximate_inverse(&delta, &[0.0; 4]);
            for (s, c) in sigma.iter_mut().zip(&correction) {
                *s += c;
            }
        }
        (best.map(|(_, s)| s).unwrap_or(sigma), log)
    }

    /// φ^{(j)} = G_j σ̂ + ψ_α^{(j)} (j < 4) and φ^{(4)} = σ̂ in [-1, 1]
    /// coordinates, at the mesh nodes.
    pub fn node_derivatives(&self, sigma: &[f64], alpha: &BoundaryData) -> [Vec<f64>; 5] {
        let g = self.partial.apply_all(sigma);
        std::array::from_fn(|j| {
            if j == 4 {
                return sigma.to_vec();
            }
            let psi = self.psi_values(alpha, j);
            g[j].iter().zip(&psi).map(|(a, b)| a + b).collect()
        })
    }

    /// φ^{(k)}(a) and φ^{(k)}(b), k = 0..3, as x-derivatives, computed by
    /// integrating the kernels exactly against σ̂ at the endpoints.
    pub fn endpoint_derivatives(&self, sigma: &[f64], alpha: &BoundaryData) -> ([f64; 4], [f64; 4]) {
        let g = self.partial.apply_all_at(sigma, &[-1.0, 1.0]);
        let iv = self.interval;
        let at = |i: usize, y: f64| -> [f64; 4] { std::array::from_fn(|k| iv.derivative_scale(k) * (g[i][k] + crate::greens::psi_alpha(alpha, y, k))) };
        (at(0, -1.0), at(1, 1.0))
    }

    fn assemble_solution(&self, sigma: &[f64], alpha: &BoundaryData) -> PiecewiseSolution {
        let derivs = self.node_derivatives(sigma, alpha);
        PiecewiseSolution::from_unit_node_values(&self.mesh, self.interval, derivs)
    }
}

/// Solves L φ = f with φ, φ' prescribed at both ends of the interval.
pub fn solve(fact: &Factorization, f: &Field, alpha: &BoundaryData) -> (PiecewiseSolution, IterationLog) {
    let g = fact.normalized_rhs(f);
    let alpha = rescale_alpha(alpha, &fact.interval);
    let (sigma, log) = fact.iterate(&g, &alpha);
    (fact.assemble_solution(&sigma, &alpha), log)
}

/// Factorizes and solves in one call.
pub fn solve_problem(problem: &BVProblem, options: &SolverOptions) -> Result<(PiecewiseSolution, IterationLog)> {
    let fact = factorize(&problem.operator, options)?;
    Ok(solve(&fact, &problem.rhs, &problem.alpha))
}

/// Solves L φ = f subject to four general two-point boundary functionals.
///
/// The returned log is the one of the particular solution with zero
/// boundary data.
pub fn solve_general_bc(fact: &Factorization, f: &Field, bcs: &GeneralBC) -> Result<(PiecewiseSolution, IterationLog)> {
    let iv = fact.interval;
    let g = fact.normalized_rhs(f);
    let (mut sigma, log) = fact.iterate(&g, &[0.0; 4]);
    let zero = vec![0.0; g.len()];
    let homogeneous: Vec<(Vec<f64>, BoundaryData)> = (0..4)
        .map(|w| {
            let mut alpha = [0.0; 4];
            alpha[w] = 1.0;
            let alpha = rescale_alpha(&alpha, &iv);
            (fact.iterate(&zero, &alpha).0, alpha)
        })
        .collect();
    let hom_ends: Vec<_> = homogeneous.iter().map(|(s, a)| fact.endpoint_derivatives(s, a)).collect();
    let (pa, pb) = fact.endpoint_derivatives(&sigma, &[0.0; 4]);
    let m = Matrix::from_fn(4, |r, w| bcs[r].apply(&hom_ends[w].0, &hom_ends[w].1));
    let factor = qr_factor(&m).map_err(|_| Error::DependentBoundaryFunctionals)?;
    let rhs: Vec<f64> = bcs.iter().map(|bc| bc.target - bc.apply(&pa, &pb)).collect();
    let b = factor.solve(&rhs);
    let mut alpha = [0.0; 4];
    for (w, (s, a)) in homogeneous.iter().enumerate() {
        for (x, y) in sigma.iter_mut().zip(s) {
            *x += b[w] * y;
        }
        for (x, y) in alpha.iter_mut().zip(a) {
            *x += b[w] * y;
        }
    }
    Ok((fact.assemble_solution(&sigma, &alpha), log))
}

/// φ and its first four derivatives as Legendre expansions on each
/// subinterval, in the coordinate x of the original interval.
#[derive(Debug, Clone, PartialEq)]
pub struct PiecewiseSolution {
    interval: Interval,
    m: usize,
    n: usize,
    /// Breakpoints in [-1, 1].
    breakpoints: Vec<f64>,
    /// Node abscissae in [a, b].
    nodes: Vec<f64>,
    /// φ^{(k)} at the nodes, x-derivatives.
    values: [Vec<f64>; 5],
    /// Legendre coefficients of φ^{(k)}; subinterval i holds n + 4 - k of
    /// them starting at i·(n + 4 - k).
    coeffs: [Vec<f64>; 5],
}

impl PiecewiseSolution {
    /// Builds the expansions from node values of y-derivatives on [-1, 1].
    pub fn from_unit_node_values(mesh: &Mesh, interval: Interval, unit_values: [Vec<f64>; 5]) -> Self {
        let m = mesh.subintervals();
        let n = mesh.nodes_per_subinterval();
        let values: [Vec<f64>; 5] = std::array::from_fn(|k| {
            let s = interval.derivative_scale(k);
            unit_values[k].iter().map(|v| s * v).collect()
        });
        let transform: &LegendreTransform = mesh.transform();
        let rule = mesh.rule();
        // d/dξ = h d/dx on a subinterval of half-width h
        let h = 0.5 * interval.length() / m as f64;
        let mut coeffs: [Vec<f64>; 5] = Default::default();
        for i in 0..m {
            let r = mesh.range(i);
            // the fourth derivative is interpolated; each lower derivative
            // integrates the one above and takes its constant from the node
            // values, so polynomials of degree below n + 4 are exact
            let mut c = transform.values_to_coeffs(&values[4][r.clone()]);
            coeffs[4].extend_from_slice(&c);
            for k in (0..4).rev() {
                c = antiderivative_coeffs(&c).into_iter().map(|v| h * v).collect();
                let mean: f64 = rule.nodes().iter().zip(rule.weights()).zip(&values[k][r.clone()]).map(|((xi, w), v)| w * (v - eval_expansion(&c, *xi))).sum();
                c[0] += 0.5 * mean;
                coeffs[k].extend_from_slice(&c);
            }
        }
        Self {
            interval,
            m,
            n,
            breakpoints: mesh.breakpoints().to_vec(),
            nodes: mesh.nodes().iter().map(|&y| interval.from_unit(y)).collect(),
            values,
            coeffs,
        }
    }

    pub fn interval(&self) -> Interval {
        self.interval
    }

    pub fn subintervals(&self) -> usize {
        self.m
    }

    pub fn nodes_per_subinterval(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn node_values(&self, k: usize) -> &[f64] {
        &self.values[k]
    }

    /// Legendre coefficients of φ^{(k)} on subinterval i.
    pub fn coefficients(&self, k: usize, i: usize) -> &[f64] {
        let len = self.n + 4 - k;
        &self.coeffs[k][i * len..(i + 1) * len]
    }

    /// Subinterval containing y ∈ [-1, 1]; breakpoints belong to the left
    /// neighbour except the left end.
    fn locate(&self, y: f64) -> usize {
        let k = self.breakpoints.partition_point(|&b| b < y);
        k.saturating_sub(1).min(self.m - 1)
    }

    /// φ^{(k)}(x) for x in [a, b].
    pub fn evaluate(&self, x: f64, k: usize) -> Result<f64> {
        let iv = self.interval;
        if !(x >= iv.a && x <= iv.b) {
            return Err(Error::OutOfRange { x, a: iv.a, b: iv.b });
        }
        if k > 4 {
            return Err(Error::InvalidDiscretization(format!("derivative order {k} exceeds 4")));
        }
        let y = iv.to_unit(x).clamp(-1.0, 1.0);
        let i = self.locate(y);
        let center = 0.5 * (self.breakpoints[i] + self.breakpoints[i + 1]);
        let xi = ((y - center) * self.m as f64).clamp(-1.0, 1.0);
        Ok(eval_expansion(self.coefficients(k, i), xi))
    }

    pub fn evaluate_on(&self, xs: &[f64], k: usize) -> Result<Vec<f64>> {
        xs.iter().map(|&x| self.evaluate(x, k)).collect()
    }

    /// self += a · other (same mesh and interval).
    pub fn add_scaled(&mut self, a: f64, other: &PiecewiseSolution) {
        assert_eq!(self.nodes.len(), other.nodes.len());
        for k in 0..5 {
            for (s, o) in self.values[k].iter_mut().zip(&other.values[k]) {
                *s += a * o;
            }
            for (s, o) in self.coeffs[k].iter_mut().zip(&other.coeffs[k]) {
                *s += a * o;
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::greens::BoundaryCubics;
    use crate::problem::{constant, field, standard_bcs, BoundaryFunctional};
    use std::f64::consts::PI;

    fn sin5_operator() -> Operator {
        let coeffs = std::array::from_fn(|j| field(move |x: f64| 1.0 + x.powi(4 - j as i32)));
        Operator::new(coeffs, Interval::new(0.0, 2.0 * PI).unwrap())
    }

    fn sin5_rhs() -> Field {
        field(|x: f64| {
            let d = [(5.0 * x).sin(), 5.0 * (5.0 * x).cos(), -25.0 * (5.0 * x).sin(), -125.0 * (5.0 * x).cos(), 625.0 * (5.0 * x).sin()];
            (0..5).map(|j| (1.0 + x.powi(4 - j as i32)) * d[j]).sum()
        })
    }

    #[test]
    fn options_are_validated() {
        assert!(SolverOptions::new(0, 6).validate().is_err());
        assert!(SolverOptions::new(2, 3).validate().is_err());
        let mut o = SolverOptions::new(2, 6);
        o.stagnation_ratio = 1.0;
        assert!(o.validate().is_err());
    }

    #[test]
    fn pure_fourth_derivative_factorization_is_trivial() {
        let fact = factorize(&Operator::biharmonic(Interval::unit()), &SolverOptions::new(3, 6)).unwrap();
        for s in fact.local_systems() {
            assert_eq!(s.matrix(), &Matrix::identity(6));
        }
        for basis in fact.bases() {
            for (w, g) in basis.members.iter().enumerate() {
                let d = [g.left[0], g.right[0], g.left[1], g.right[1]];
                for (v, x) in d.iter().enumerate() {
                    assert!((x - if v == w { 1.0 } else { 0.0 }).abs() < 1e-14);
                }
                let _ = BoundaryCubics::eval(w, 0.0, 0);
            }
        }
    }

    #[test]
    fn zero_data_converge_immediately() {
        let fact = factorize(&sin5_operator(), &SolverOptions::new(4, 8)).unwrap();
        let (sol, log) = solve(&fact, &constant(0.0), &[0.0; 4]);
        assert_eq!(log.residuals, vec![0.0]);
        assert!(sol.node_values(0).iter().all(|v| *v == 0.0));
    }

    #[test]
    fn quartic_solution() {
        let fact = factorize(&Operator::biharmonic(Interval::unit()), &SolverOptions::new(4, 6)).unwrap();
        let (sol, log) = solve(&fact, &constant(24.0), &[0.0; 4]);
        assert!(log.len() <= 2, "{:?}", log);
        assert!((sol.evaluate(0.0, 0).unwrap() - 1.0).abs() < 1e-13);
        for x in [-1.0, -0.77, -0.5, 0.1, 0.5, 0.93, 1.0] {
            assert!((sol.evaluate(x, 0).unwrap() - (x * x - 1.0_f64).powi(2)).abs() < 1e-13);
            assert!((sol.evaluate(x, 2).unwrap() - (12.0 * x * x - 4.0)).abs() < 1e-12);
        }
    }

    #[test]
    fn expansions_reproduce_node_values() {
        let op = sin5_operator();
        let fact = factorize(&op, &SolverOptions::new(8, 10)).unwrap();
        let (sol, _) = solve(&fact, &sin5_rhs(), &[0.0, 0.0, 5.0, 5.0]);
        for k in 0..5 {
            let scale = sol.node_values(k).iter().fold(1.0f64, |a, v| a.max(v.abs()));
            for (i, &x) in sol.nodes().iter().enumerate() {
                assert!((sol.evaluate(x, k).unwrap() - sol.node_values(k)[i]).abs() <= 1e-12 * scale);
            }
        }
        assert!(sol.evaluate(-0.1, 0).is_err());
        assert!(sol.evaluate(2.0 * PI + 0.1, 0).is_err());
    }

    #[test]
    fn sin5_accuracy_and_boundary() {
        let fact = factorize(&sin5_operator(), &SolverOptions::new(16, 10)).unwrap();
        let (sol, log) = solve(&fact, &sin5_rhs(), &[0.0, 0.0, 5.0, 5.0]);
        assert!(log.min() <= 1e3 * f64::EPSILON, "{log:?}");
        let xs: Vec<f64> = (0..2000).map(|i| 2.0 * PI * i as f64 / 1999.0).collect();
        let num: f64 = xs.iter().map(|&x| (sol.evaluate(x, 0).unwrap() - (5.0 * x).sin()).powi(2)).sum();
        let den: f64 = xs.iter().map(|&x| (5.0 * x).sin().powi(2)).sum();
        assert!((num / den).sqrt() <= 1e-8);
        assert!(sol.evaluate(0.0, 0).unwrap().abs() < 1e-8);
        assert!((sol.evaluate(2.0 * PI, 1).unwrap() - 5.0).abs() < 1e-7);
    }

    #[test]
    fn factorization_is_reusable() {
        let op = sin5_operator();
        let opts = SolverOptions::new(16, 10);
        let fact = factorize(&op, &opts).unwrap();
        let f2 = field(|x: f64| x.cos());
        let (a1, _) = solve(&fact, &sin5_rhs(), &[0.0, 0.0, 5.0, 5.0]);
        let (a2, _) = solve(&fact, &f2, &[1.0, 0.0, 0.0, 0.0]);
        let fresh = factorize(&op, &opts).unwrap();
        assert_eq!(solve(&fresh, &f2, &[1.0, 0.0, 0.0, 0.0]).0, a2);
        assert_eq!(solve(&fresh, &sin5_rhs(), &[0.0, 0.0, 5.0, 5.0]).0, a1);
    }

    #[test]
    fn general_bcs_agree_with_standard_solve() {
        let fact = factorize(&sin5_operator(), &SolverOptions::new(16, 10)).unwrap();
        let alpha = [0.0, 0.0, 5.0, 5.0];
        let (direct, _) = solve(&fact, &sin5_rhs(), &alpha);
        let (general, _) = solve_general_bc(&fact, &sin5_rhs(), &standard_bcs(&alpha)).unwrap();
        for k in 0..5 {
            let scale = direct.node_values(k).iter().fold(1.0f64, |a, v| a.max(v.abs()));
            for (a, b) in direct.node_values(k).iter().zip(general.node_values(k)) {
                assert!((a - b).abs() <= 1e-11 * scale, "k = {k}");
            }
        }
    }

    #[test]
    fn dependent_functionals_are_rejected() {
        let fact = factorize(&Operator::biharmonic(Interval::unit()), &SolverOptions::new(2, 6)).unwrap();
        let bcs = [BoundaryFunctional::left(0, 0.0), BoundaryFunctional::left(0, 1.0), BoundaryFunctional::right(0, 0.0), BoundaryFunctional::right(1, 0.0)];
        assert_eq!(solve_general_bc(&fact, &constant(1.0), &bcs).unwrap_err(), Error::DependentBoundaryFunctionals);
    }

    #[test]
    fn zero_targets_and_load_give_zero() {
        let fact = factorize(&sin5_operator(), &SolverOptions::new(4, 8)).unwrap();
        let bcs = [BoundaryFunctional::left(0, 0.0), BoundaryFunctional::left(2, 0.0), BoundaryFunctional::right(0, 0.0), BoundaryFunctional::right(2, 0.0)];
        let (sol, _) = solve_general_bc(&fact, &constant(0.0), &bcs).unwrap();
        assert!(sol.node_values(0).iter().all(|v| v.abs() < 1e-300));
    }
}
