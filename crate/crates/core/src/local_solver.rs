//! Single-subinterval solves of the second-kind integral equation
//! σ + Σ_j a_j G_j σ = f - L ψ_α.
//!
//! Inputs and outputs are expressed in the coordinate of the parent
//! problem on [-1, 1]; each subinterval is mapped to [-1, 1] internally and
//! derivatives are converted back with powers of the half-width.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::fast_apply::LocalMomentTables;
use crate::greens::{green_eval, psi_alpha, split_kernels, BoundaryData};
use crate::linalg::{dot, pseudo_inverse, qr_factor, DenseFactor, Matrix};
use crate::problem::{Mesh, NormalizedTables};
use crate::quadrature::GaussRule;

/// Kernel matrices on [-1, 1] shared by every subinterval of a uniform mesh.
#[derive(Debug, Clone)]
pub struct LocalKernels {
    n: usize,
    nodes: Vec<f64>,
    /// G_j(y_i, y_k) w_k, the Nyström matrices that enter A.
    nystrom: [Vec<f64>; 4],
    /// ∫ G_j(y_i, t) ℓ_k(t) dt, exact for the node interpolant of σ.
    product: [Vec<f64>; 4],
    /// G_j(∓1, y_k) w_k.
    left_rows: [Vec<f64>; 4],
    right_rows: [Vec<f64>; 4],
}

impl LocalKernels {
    pub fn new(rule: &GaussRule, moments: &LocalMomentTables) -> Self {
        let n = rule.order();
        let y = rule.nodes();
        let w = rule.weights();
        let nystrom = std::array::from_fn(|j| (0..n * n).map(|ik| green_eval(j, y[ik / n], y[ik % n]) * w[ik % n]).collect());
        let kernels = split_kernels();
        let product = std::array::from_fn(|j| {
            let kernel = &kernels[j];
            let mut out = vec![0.0; n * n];
            for i in 0..n {
                let mut xp = 1.0;
                for p in 0..kernel.x_powers() {
                    for d in 0..4 {
                        let (lo, up) = (kernel.lower[p][d], kernel.upper[p][d]);
                        if lo == 0.0 && up == 0.0 {
                            continue;
                        }
                        for k in 0..n {
                            out[i * n + k] += xp * (lo * moments.left[d][i * n + k] + up * moments.right[d][i * n + k]);
                        }
                    }
                    xp *= y[i];
                }
            }
            out
        });
        let rows = |x: f64| -> [Vec<f64>; 4] { std::array::from_fn(|j| (0..n).map(|k| green_eval(j, x, y[k]) * w[k]).collect()) };
        Self { n, nodes: y.to_vec(), nystrom, product, left_rows: rows(-1.0), right_rows: rows(1.0) }
    }

    pub fn order(&self) -> usize {
        self.n
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn nystrom(&self, j: usize) -> &[f64] {
        &self.nystrom[j]
    }

    pub fn product(&self, j: usize) -> &[f64] {
        &self.product[j]
    }
}

/// How the integrals Σ_j a_j ∫ G_j(y_i, t) σ(t) dt enter the local matrix.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LocalDiscretization {
    /// Integrate each kernel row exactly against the node interpolant of σ
    /// (split at t = y_i). Consistent with the global operator apply, so
    /// deferred corrections converges in a few steps.
    #[default]
    Product,
    /// Plain Gauss weights: G_j(y_i, y_k) w_k. Loses accuracy because the
    /// kernels are not smooth across t = y_i.
    Nystrom,
}

/// The factored n×n system of one subinterval.
#[derive(Debug, Clone)]
pub struct LocalSystem {
    index: usize,
    /// Half-width of the subinterval relative to the parent [-1, 1].
    scale: f64,
    /// s^{4-j} a_j at the local nodes.
    coeffs: [Vec<f64>; 4],
    matrix: Matrix,
    /// Reciprocal max-norms of the rows of `matrix`; the factor is of the
    /// row-equilibrated matrix, which keeps the singularity test meaningful
    /// when the coefficients blow up near a singular leading coefficient.
    row_scale: Vec<f64>,
    inverse: LocalInverse,
    kernels: Arc<LocalKernels>,
}

/// How a local system is solved.
#[derive(Debug, Clone)]
enum LocalInverse {
    Factor(DenseFactor),
    /// Used when the equilibrated matrix is numerically rank deficient, as
    /// on a subinterval touching a root of the leading coefficient.
    Pseudo(Matrix),
}

/// Singular values below this fraction of the largest are discarded when a
/// local system is numerically singular.
pub const PSEUDO_INVERSE_CUTOFF: f64 = 1e-13;

impl LocalSystem {
    /// Overwrites `rhs` with the solution of `matrix · x = rhs`.
    pub fn solve_in_place(&self, rhs: &mut [f64]) {
        for (v, r) in rhs.iter_mut().zip(&self.row_scale) {
            *v *= r;
        }
        match &self.inverse {
            LocalInverse::Factor(f) => f.solve_in_place(rhs),
            LocalInverse::Pseudo(p) => {
                let x = p.mul_vec(rhs);
                rhs.copy_from_slice(&x);
            }
        }
    }

    /// Whether the system was numerically singular and is solved in the
    /// least-squares sense.
    pub fn is_rank_deficient(&self) -> bool {
        matches!(self.inverse, LocalInverse::Pseudo(_))
    }

    pub fn index(&self) -> usize {
        self.index
    }

    pub fn scale(&self) -> f64 {
        self.scale
    }

    pub fn matrix(&self) -> &Matrix {
        &self.matrix
    }

    pub fn local_coeffs(&self) -> &[Vec<f64>; 4] {
        &self.coeffs
    }
}

/// Builds A(i,k) = δ_ik + Σ_j a_j(y_i) K_j(i,k) for one subinterval, with
/// K_j chosen by `mode`.
///
/// `coeffs` are the normalized coefficients a_0/a_4 … a_3/a_4 of the parent
/// problem sampled at this subinterval's nodes, and `scale` is its
/// half-width in parent coordinates.
pub fn assemble_local(index: usize, coeffs: [&[f64]; 4], scale: f64, kernels: Arc<LocalKernels>, mode: LocalDiscretization) -> Result<LocalSystem> {
    let n = kernels.order();
    let k_mat = match mode {
        LocalDiscretization::Product => &kernels.product,
        LocalDiscretization::Nystrom => &kernels.nystrom,
    };
    let coeffs: [Vec<f64>; 4] = std::array::from_fn(|j| {
        let factor = scale.powi(4 - j as i32);
        coeffs[j].iter().map(|a| factor * a).collect()
    });
    let matrix = Matrix::from_fn(n, |i, k| {
        let mut v = if i == k { 1.0 } else { 0.0 };
        for j in 0..4 {
            let a = coeffs[j][i];
            if a != 0.0 {
                v += a * k_mat[j][i * n + k];
            }
        }
        v
    });
    let row_scale: Vec<f64> = (0..n).map(|i| 1.0 / (0..n).map(|k| matrix[(i, k)].abs()).fold(0.0, f64::max)).collect();
    if row_scale.iter().any(|r| !r.is_finite()) {
        return Err(Error::InvalidDiscretization(format!("non-finite or zero row in local system {index}")));
    }
    let equilibrated = Matrix::from_fn(n, |i, k| row_scale[i] * matrix[(i, k)]);
    let inverse = match qr_factor(&equilibrated) {
        Ok(f) if condition_one_norm(&equilibrated, &f) * PSEUDO_INVERSE_CUTOFF < 1.0 => LocalInverse::Factor(f),
        Ok(_) | Err(Error::SingularDense { .. }) => LocalInverse::Pseudo(pseudo_inverse(&equilibrated, PSEUDO_INVERSE_CUTOFF)?.0),
        Err(e) => return Err(e),
    };
    Ok(LocalSystem { index, scale, coeffs, matrix, row_scale, inverse, kernels })
}

/// ‖A‖₁ ‖A⁻¹‖₁ with the inverse formed column by column from the factor.
fn condition_one_norm(a: &Matrix, factor: &DenseFactor) -> f64 {
    let n = a.order();
    let norm_a = (0..n).map(|k| (0..n).map(|i| a[(i, k)].abs()).sum::<f64>()).fold(0.0, f64::max);
    let mut norm_inv = 0.0f64;
    let mut e = vec![0.0; n];
    for k in 0..n {
        e.iter_mut().for_each(|v| *v = 0.0);
        e[k] = 1.0;
        factor.solve_in_place(&mut e);
        norm_inv = norm_inv.max(e.iter().map(|v| v.abs()).sum());
    }
    norm_a * norm_inv
}

/// Assembles and factors the systems of every subinterval of a mesh.
pub fn assemble_all(mesh: &Mesh, tables: &NormalizedTables, kernels: &Arc<LocalKernels>, mode: LocalDiscretization) -> Result<Vec<LocalSystem>> {
    (0..mesh.subintervals())
        .map(|k| {
            let r = mesh.range(k);
            let c = std::array::from_fn(|j| &tables.coeffs[j][r.clone()]);
            assemble_local(k, c, mesh.half_width(), kernels.clone(), mode)
        })
        .collect()
}

/// A local solution in parent coordinates.
#[derive(Debug, Clone, PartialEq)]
pub struct LocalSolution {
    /// σ̂ at the local nodes; identical to `values[4]`.
    pub sigma: Vec<f64>,
    /// φ^{(j)} at the local nodes, j = 0..4.
    pub values: [Vec<f64>; 5],
    /// φ^{(j)} at the left end, j = 0..3.
    pub left: [f64; 4],
    /// φ^{(j)} at the right end, j = 0..3.
    pub right: [f64; 4],
}

/// σ̂ and endpoint data only, without node values of φ.
#[derive(Debug, Clone, PartialEq)]
pub(crate) struct LocalBoundarySolve {
    pub sigma: Vec<f64>,
    pub left: [f64; 4],
    pub right: [f64; 4],
}

struct LocalCore {
    alpha: BoundaryData,
    sigma: Vec<f64>,
    left: [f64; 4],
    right: [f64; 4],
}

fn solve_core(system: &LocalSystem, f: &[f64], alpha: &BoundaryData) -> LocalCore {
    let kern = &system.kernels;
    let n = kern.order();
    assert_eq!(f.len(), n);
    let s = system.scale;
    let alpha = [alpha[0], alpha[1], s * alpha[2], s * alpha[3]];
    let s4 = s.powi(4);
    let mut sigma: Vec<f64> = f.iter().map(|v| s4 * v).collect();
    if alpha.iter().any(|a| *a != 0.0) {
        for (i, &y) in kern.nodes.iter().enumerate() {
            sigma[i] -= (0..4).map(|j| system.coeffs[j][i] * psi_alpha(&alpha, y, j)).sum::<f64>();
        }
    }
    system.solve_in_place(&mut sigma);
    let left = std::array::from_fn(|j| dot(&kern.left_rows[j], &sigma) + psi_alpha(&alpha, -1.0, j));
    let right = std::array::from_fn(|j| dot(&kern.right_rows[j], &sigma) + psi_alpha(&alpha, 1.0, j));
    LocalCore { alpha, sigma, left, right }
}

fn to_parent(mut data: [f64; 4], s: f64) -> [f64; 4] {
    let mut factor = 1.0;
    for v in &mut data {
        *v /= factor;
        factor *= s;
    }
    data
}

pub(crate) fn solve_boundary(system: &LocalSystem, f: &[f64], alpha: &BoundaryData) -> LocalBoundarySolve {
    let core = solve_core(system, f, alpha);
    let s = system.scale;
    let s4 = s.powi(4);
    LocalBoundarySolve { sigma: core.sigma.iter().map(|v| v / s4).collect(), left: to_parent(core.left, s), right: to_parent(core.right, s) }
}

/// Solves the local equation for right-hand side `f` and boundary data
/// `alpha`, both in parent coordinates, and recovers φ and its derivatives.
pub fn solve_local(system: &LocalSystem, f: &[f64], alpha: &BoundaryData) -> LocalSolution {
    let core = solve_core(system, f, alpha);
    let kern = &system.kernels;
    let n = kern.order();
    let s = system.scale;
    let values: [Vec<f64>; 5] = std::array::from_fn(|j| {
        let to_parent = s.powi(-(j as i32));
        if j == 4 {
            return core.sigma.iter().map(|v| to_parent * v).collect();
        }
        (0..n)
            .map(|i| {
                let g = dot(&kern.product[j][i * n..(i + 1) * n], &core.sigma);
                to_parent * (g + psi_alpha(&core.alpha, kern.nodes[i], j))
            })
            .collect()
    });
    LocalSolution { sigma: values[4].clone(), values, left: to_parent(core.left, s), right: to_parent(core.right, s) }
}

/// The four solutions of L g = 0 whose endpoint values and slopes are the
/// unit vectors, in the order of [`BoundaryData`].
#[derive(Debug, Clone, PartialEq)]
pub struct HomogeneousBasis {
    pub members: [LocalSolution; 4],
}

pub fn homogeneous_basis(system: &LocalSystem) -> HomogeneousBasis {
    let zero = vec![0.0; system.kernels.order()];
    HomogeneousBasis {
        members: std::array::from_fn(|w| {
            let mut alpha = [0.0; 4];
            alpha[w] = 1.0;
            solve_local(system, &zero, &alpha)
        }),
    }
}
