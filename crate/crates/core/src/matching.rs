//! Gluing local solutions into one C³ function.
//!
//! On subinterval i the solution is φ̃_i + Σ_w β_{i,w} g_{i,w}, where the
//! g are the homogeneous basis members. Unknown β_{i,w} sits in column
//! 4i + w. Rows are ordered left to right: the two left-end conditions,
//! four matching conditions per interface, then the two right-end
//! conditions. This keeps every nonzero within five subdiagonals and three
//! superdiagonals.

use crate::error::Result;
use crate::greens::BoundaryData;
use crate::linalg::{BandedLu, BandedMatrix};
use crate::local_solver::{HomogeneousBasis, LocalSolution};

pub const LOWER_BANDWIDTH: usize = 5;
pub const UPPER_BANDWIDTH: usize = 3;

/// β_{i,w} stored as [β_{0,0}, β_{0,1}, β_{0,2}, β_{0,3}, β_{1,0}, …].
#[derive(Debug, Clone, PartialEq)]
pub struct MatchingCoefficients(pub Vec<f64>);

impl MatchingCoefficients {
    pub fn subinterval(&self, i: usize) -> &[f64] {
        &self.0[4 * i..4 * i + 4]
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }
}

/// Endpoint data (left, right) of φ^{(0..3)} for one local solution.
pub type EndpointData = ([f64; 4], [f64; 4]);

/// The 4m×4m matching matrix; depends only on the homogeneous bases.
pub fn matching_matrix(bases: &[HomogeneousBasis]) -> BandedMatrix {
    let m = bases.len();
    let mut a = BandedMatrix::zeros(4 * m, LOWER_BANDWIDTH, UPPER_BANDWIDTH);
    a.set(0, 0, 1.0);
    a.set(1, 2, 1.0);
    for i in 0..m.saturating_sub(1) {
        let r = 2 + 4 * i;
        // value and slope: the basis data are cardinal
        a.set(r, 4 * i + 1, 1.0);
        a.set(r, 4 * (i + 1), -1.0);
        a.set(r + 1, 4 * i + 3, 1.0);
        a.set(r + 1, 4 * (i + 1) + 2, -1.0);
        for k in 2..4 {
            for w in 0..4 {
                a.set(r + k, 4 * i + w, bases[i].members[w].right[k]);
                a.set(r + k, 4 * (i + 1) + w, -bases[i + 1].members[w].left[k]);
            }
        }
    }
    a.set(4 * m - 2, 4 * m - 3, 1.0);
    a.set(4 * m - 1, 4 * m - 1, 1.0);
    a
}

/// Right-hand side for tilde-solution endpoint data and boundary data α.
pub fn matching_rhs(tilde: &[EndpointData], alpha: &BoundaryData) -> Vec<f64> {
    let m = tilde.len();
    let mut rhs = vec![0.0; 4 * m];
    rhs[0] = alpha[0] - tilde[0].0[0];
    rhs[1] = alpha[2] - tilde[0].0[1];
    for i in 0..m.saturating_sub(1) {
        for k in 0..4 {
            rhs[2 + 4 * i + k] = tilde[i + 1].0[k] - tilde[i].1[k];
        }
    }
    rhs[4 * m - 2] = alpha[1] - tilde[m - 1].1[0];
    rhs[4 * m - 1] = alpha[3] - tilde[m - 1].1[1];
    rhs
}

/// Matrix and right-hand side of the matching equations.
pub fn assemble_matching(tilde: &[LocalSolution], bases: &[HomogeneousBasis], alpha: &BoundaryData) -> (BandedMatrix, Vec<f64>) {
    let data: Vec<EndpointData> = tilde.iter().map(|t| (t.left, t.right)).collect();
    (matching_matrix(bases), matching_rhs(&data, alpha))
}

/// The factored matching matrix, reused for every right-hand side.
#[derive(Debug, Clone)]
pub struct MatchingSystem {
    matrix: BandedMatrix,
    lu: BandedLu,
}

impl MatchingSystem {
    pub fn new(bases: &[HomogeneousBasis]) -> Result<Self> {
        let matrix = matching_matrix(bases);
        let lu = BandedLu::factor(&matrix)?;
        Ok(Self { matrix, lu })
    }

    pub fn matrix(&self) -> &BandedMatrix {
        &self.matrix
    }

    pub fn solve(&self, tilde: &[EndpointData], alpha: &BoundaryData) -> MatchingCoefficients {
        MatchingCoefficients(self.lu.solve(&matching_rhs(tilde, alpha)))
    }
}

/// Solves the assembled matching equations.
pub fn solve_matching(matrix: &BandedMatrix, rhs: &[f64]) -> Result<MatchingCoefficients> {
    crate::linalg::banded_factor_solve(matrix, rhs).map(MatchingCoefficients)
}

/// Node values and endpoint data of φ^{(k)}, k = 0..4, on every subinterval.
pub fn combine(tilde: &[LocalSolution], bases: &[HomogeneousBasis], beta: &MatchingCoefficients) -> Vec<LocalSolution> {
    tilde
        .iter()
        .zip(bases)
        .enumerate()
        .map(|(i, (t, basis))| {
            let b = beta.subinterval(i);
            let mut out = t.clone();
            for (w, g) in basis.members.iter().enumerate() {
                if b[w] == 0.0 {
                    continue;
                }
                for k in 0..5 {
                    for (o, v) in out.values[k].iter_mut().zip(&g.values[k]) {
                        *o += b[w] * v;
                    }
                }
                for k in 0..4 {
                    out.left[k] += b[w] * g.left[k];
                    out.right[k] += b[w] * g.right[k];
                }
            }
            out.sigma = out.values[4].clone();
            out
        })
        .collect()
}

/// Global node vectors of φ^{(k)}, k = 0..4, from combined local solutions.
pub fn global_values(parts: &[LocalSolution]) -> [Vec<f64>; 5] {
    std::array::from_fn(|k| parts.iter().flat_map(|p| p.values[k].iter().copied()).collect())
}
