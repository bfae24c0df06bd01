//! Solver for linear fourth-order two-point boundary value problems
//!
//! a_4 φ'''' + a_3 φ''' + a_2 φ'' + a_1 φ' + a_0 φ = f on [a, b]
//!
//! with φ and φ' prescribed at both ends (or four general boundary
//! functionals). The equation is recast as a second-kind integral equation
//! for σ = φ'''' using the Green's function of d⁴/dx⁴ with clamped ends,
//! solved independently on subintervals, glued by a banded matching system
//! and refined by deferred corrections with a linear-cost operator apply.

pub mod cli;
pub mod driver;
pub mod error;
pub mod fast_apply;
pub mod greens;
pub mod greens_validation;
pub mod linalg;
pub mod local_solver;
pub mod matching;
pub mod problem;
pub mod quadrature;

pub use driver::{factorize, solve, solve_general_bc, solve_problem, Factorization, IterationLog, PiecewiseSolution, SolverOptions};
pub use error::{Error, Result};
pub use problem::{constant, field, BVProblem, BoundaryFunctional, Field, GeneralBC, Interval, Operator};
