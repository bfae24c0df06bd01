//! The built-in test problems and the driver that measures their errors.

use std::fmt;
use std::str::FromStr;
use std::time::Instant;

use crate::cli::bessel::bessel_j_derivative;
use crate::cli::metric::{equispaced_grid, relative_error_samples, DEFAULT_GRID};
use crate::driver::{factorize, solve, solve_general_bc, IterationLog, PiecewiseSolution, SolverOptions};
use crate::error::{Error, Result};
use crate::problem::{constant, field, BVProblem, BoundaryFunctional, GeneralBC, Interval, Operator};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, clap::ValueEnum)]
pub enum ProblemId {
    Sin5,
    Sin150,
    BeamFixed,
    BeamSs,
    Bessel,
}

/// How the error of a run is measured.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReferenceKind {
    ClosedForm,
    /// Against the solution on twice as many subintervals.
    SelfConvergence,
    SpecialFunction,
}

impl ProblemId {
    pub const ALL: [ProblemId; 5] = [ProblemId::Sin5, ProblemId::Sin150, ProblemId::BeamFixed, ProblemId::BeamSs, ProblemId::Bessel];

    pub fn name(self) -> &'static str {
        match self {
            ProblemId::Sin5 => "sin5",
            ProblemId::Sin150 => "sin150",
            ProblemId::BeamFixed => "beam-fixed",
            ProblemId::BeamSs => "beam-ss",
            ProblemId::Bessel => "bessel",
        }
    }

    /// Nodes per subinterval used unless overridden.
    pub fn default_n(self) -> usize {
        match self {
            ProblemId::Sin150 => 15,
            ProblemId::Bessel => 20,
            _ => 10,
        }
    }

    pub fn reference_kind(self) -> ReferenceKind {
        match self {
            ProblemId::Sin5 | ProblemId::Sin150 => ReferenceKind::ClosedForm,
            ProblemId::BeamFixed | ProblemId::BeamSs => ReferenceKind::SelfConvergence,
            ProblemId::Bessel => ReferenceKind::SpecialFunction,
        }
    }

    /// Left end of the Bessel interval: the square root of the smallest
    /// positive normal double.
    pub fn bessel_left_end() -> f64 {
        f64::MIN_POSITIVE.sqrt()
    }

    fn frequency(self) -> Option<f64> {
        match self {
            ProblemId::Sin5 => Some(5.0),
            ProblemId::Sin150 => Some(150.0),
            _ => None,
        }
    }

    /// j-th derivative of the known solution, where one exists.
    pub fn exact_derivative(self, x: f64, j: usize) -> Option<f64> {
        if let Some(k) = self.frequency() {
            return Some(Self::exact_sine(k, x, j));
        }
        match self {
            ProblemId::Bessel => Some(bessel_j_derivative(10, j, x)),
            _ => None,
        }
    }

    /// The boundary value problem and, for the simply supported beam, the
    /// general boundary functionals that replace the standard data.
    pub fn problem(self) -> (BVProblem, Option<GeneralBC>) {
        match self {
            ProblemId::Sin5 | ProblemId::Sin150 => {
                let k = self.frequency().unwrap();
                let iv = Interval::new(0.0, 2.0 * std::f64::consts::PI).unwrap();
                let coeffs = std::array::from_fn(|j| field(move |x: f64| 1.0 + x.powi(4 - j as i32)));
                let op = Operator::new(coeffs, iv);
                let rhs = field(move |x: f64| (0..5).map(|j| (1.0 + x.powi(4 - j as i32)) * ProblemId::exact_sine(k, x, j)).sum());
                (BVProblem::new(op, rhs, [0.0, 0.0, k, k]), None)
            }
            ProblemId::BeamFixed | ProblemId::BeamSs => {
                let iv = Interval::new(0.0, 1.0).unwrap();
                let op = Operator::new(
                    [constant(0.0), constant(0.0), constant(2.0), field(|x| 4.0 * (x - 0.5)), field(|x| (x - 0.5).powi(2) + 1.0)],
                    iv,
                );
                let rhs = field(|x| (2.0 * std::f64::consts::PI * x).sin() + 1.0);
                let bcs = (self == ProblemId::BeamSs).then(|| {
                    [BoundaryFunctional::left(0, 0.0), BoundaryFunctional::right(0, 0.0), BoundaryFunctional::left(2, 0.0), BoundaryFunctional::right(2, 0.0)]
                });
                (BVProblem::new(op, rhs, [0.0; 4]), bcs)
            }
            ProblemId::Bessel => {
                let iv = Interval::new(Self::bessel_left_end(), 100.0).unwrap();
                let op = Operator::new([constant(2.0), field(|x| 4.0 * x), field(|x| x * x - 96.0), field(|x| 5.0 * x), field(|x| x * x)], iv);
                // J10 and J10' are far below double precision at the left end
                let alpha = [0.0, bessel_j_derivative(10, 0, 100.0), 0.0, bessel_j_derivative(10, 1, 100.0)];
                (BVProblem::new(op, constant(0.0), alpha), None)
            }
        }
    }

    fn exact_sine(k: f64, x: f64, j: usize) -> f64 {
        let kx = k * x;
        k.powi(j as i32)
            * match j % 4 {
                0 => kx.sin(),
                1 => kx.cos(),
                2 => -kx.sin(),
                _ => -kx.cos(),
            }
    }
}

impl fmt::Display for ProblemId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for ProblemId {
    type Err = String;
    fn from_str(s: &str) -> std::result::Result<Self, String> {
        ProblemId::ALL.into_iter().find(|p| p.name() == s).ok_or_else(|| format!("unknown problem '{s}'"))
    }
}

/// One experiment: a problem, the subinterval counts to run, and solver
/// settings.
#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub problem: ProblemId,
    pub ms: Vec<usize>,
    pub n: usize,
    pub max_iterations: usize,
    pub target_residual: f64,
    pub eval_grid: usize,
}

impl ExperimentSpec {
    pub fn new(problem: ProblemId, ms: Vec<usize>) -> Self {
        let defaults = SolverOptions::new(1, problem.default_n());
        Self { problem, ms, n: problem.default_n(), max_iterations: defaults.max_iterations, target_residual: defaults.target_residual, eval_grid: DEFAULT_GRID }
    }

    pub fn options(&self, m: usize) -> SolverOptions {
        let mut o = SolverOptions::new(m, self.n);
        o.max_iterations = self.max_iterations;
        o.target_residual = self.target_residual;
        o
    }
}

/// A solved instance with its timings in seconds.
#[derive(Debug, Clone)]
pub struct TimedSolve {
    pub solution: PiecewiseSolution,
    pub log: IterationLog,
    pub t_factor: f64,
    pub t_solve: f64,
}

/// Factorizes and solves one problem at the given options.
pub fn solve_instance(problem: ProblemId, options: &SolverOptions) -> Result<TimedSolve> {
    let (bvp, bcs) = problem.problem();
    let start = Instant::now();
    let fact = factorize(&bvp.operator, options)?;
    let t_factor = start.elapsed().as_secs_f64();
    let start = Instant::now();
    let (solution, log) = match bcs {
        Some(bcs) => solve_general_bc(&fact, &bvp.rhs, &bcs)?,
        None => solve(&fact, &bvp.rhs, &bvp.alpha),
    };
    let t_solve = start.elapsed().as_secs_f64();
    Ok(TimedSolve { solution, log, t_factor, t_solve })
}

#[derive(Debug, Clone, PartialEq)]
pub enum RowStatus {
    Ok,
    Failed(String),
}

/// Results for one value of m.
#[derive(Debug, Clone, PartialEq)]
pub struct ErrorRow {
    pub m: usize,
    /// R(φ^{(j)}), j = 0..4; `None` when the row failed.
    pub errors: Option<[f64; 5]>,
    pub t_factor: f64,
    pub t_solve: f64,
    pub t_total: f64,
    pub residuals: Vec<f64>,
    pub status: RowStatus,
}

#[derive(Debug, Clone, PartialEq)]
pub struct ErrorReport {
    pub problem: ProblemId,
    pub n: usize,
    pub rows: Vec<ErrorRow>,
}

impl ErrorReport {
    pub fn all_ok(&self) -> bool {
        self.rows.iter().all(|r| r.status == RowStatus::Ok)
    }
}

fn sample_derivatives(sol: &PiecewiseSolution, grid: &[f64]) -> Result<[Vec<f64>; 5]> {
    let mut out: [Vec<f64>; 5] = Default::default();
    for (j, slot) in out.iter_mut().enumerate() {
        *slot = sol.evaluate_on(grid, j)?;
    }
    Ok(out)
}

fn measure(spec: &ExperimentSpec, m: usize, run: &TimedSolve) -> Result<[f64; 5]> {
    let sol = &run.solution;
    let grid = equispaced_grid(&sol.interval(), spec.eval_grid);
    let estimate = sample_derivatives(sol, &grid)?;
    let reference: [Vec<f64>; 5] = match spec.problem.reference_kind() {
        ReferenceKind::SelfConvergence => {
            let finer = solve_instance(spec.problem, &spec.options(2 * m))?;
            sample_derivatives(&finer.solution, &grid)?
        }
        _ => std::array::from_fn(|j| grid.iter().map(|&x| spec.problem.exact_derivative(x, j).expect("closed-form reference")).collect()),
    };
    let mut r = [0.0; 5];
    for j in 0..5 {
        r[j] = relative_error_samples(&estimate[j], &reference[j])?;
    }
    Ok(r)
}

fn run_row(spec: &ExperimentSpec, m: usize) -> Result<ErrorRow> {
    let run = solve_instance(spec.problem, &spec.options(m))?;
    let errors = measure(spec, m, &run)?;
    Ok(ErrorRow {
        m,
        errors: Some(errors),
        t_factor: run.t_factor,
        t_solve: run.t_solve,
        t_total: run.t_factor + run.t_solve,
        residuals: run.log.residuals,
        status: RowStatus::Ok,
    })
}

/// Runs every m of the spec sequentially; a failing m is recorded and the
/// run continues.
pub fn run_experiment(spec: &ExperimentSpec) -> ErrorReport {
    let rows = spec
        .ms
        .iter()
        .map(|&m| {
            run_row(spec, m).unwrap_or_else(|e: Error| ErrorRow {
                m,
                errors: None,
                t_factor: 0.0,
                t_solve: 0.0,
                t_total: 0.0,
                residuals: Vec::new(),
                status: RowStatus::Failed(e.to_string()),
            })
        })
        .collect();
    ErrorReport { problem: spec.problem, n: spec.n, rows }
}
