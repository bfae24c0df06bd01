use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use bvp4::cli::experiments::{run_experiment, ExperimentSpec, ProblemId};
use bvp4::cli::metric::DEFAULT_GRID;
use bvp4::cli::report::{render, write_csv};
use bvp4::greens_validation::{verify_green_properties, verify_quadrature_bound, DEFAULT_LENGTHS};

#[derive(Parser)]
#[command(name = "bvp4", about = "Fourth-order boundary value problem solver and experiment runner")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve a built-in problem for each m and report errors, times and residuals
    Solve {
        #[arg(long, value_enum)]
        problem: ProblemId,
        /// Subinterval counts, comma separated
        #[arg(long, value_delimiter = ',', required = true)]
        m: Vec<usize>,
        /// Gauss nodes per subinterval (problem default when omitted)
        #[arg(long)]
        n: Option<usize>,
        #[arg(long)]
        max_iters: Option<usize>,
        /// Target relative residual for the deferred corrections
        #[arg(long)]
        tol: Option<f64>,
        /// Directory for the CSV output
        #[arg(long)]
        csv: Option<PathBuf>,
        #[arg(long, default_value_t = DEFAULT_GRID)]
        eval_grid: usize,
    },
    /// Check the kernel properties and the Gauss error decay
    Verify {
        /// Nodes of the rule used in the decay check
        #[arg(long, default_value_t = 4)]
        n: usize,
    },
}

fn main() -> ExitCode {
    match Cli::parse().command {
        Command::Solve { problem, m, n, max_iters, tol, csv, eval_grid } => {
            let mut spec = ExperimentSpec::new(problem, m);
            if let Some(n) = n {
                spec.n = n;
            }
            if let Some(k) = max_iters {
                spec.max_iterations = k;
            }
            if let Some(t) = tol {
                spec.target_residual = t;
            }
            if eval_grid < 2 {
                eprintln!("--eval-grid needs at least 2 points");
                return ExitCode::from(2);
            }
            spec.eval_grid = eval_grid;
            let report = run_experiment(&spec);
            print!("{}", render(&report));
            if let Some(dir) = csv {
                match write_csv(&report, &dir) {
                    Ok(paths) => {
                        for p in paths {
                            println!("wrote {}", p.display());
                        }
                    }
                    Err(e) => {
                        eprintln!("{e}");
                        return ExitCode::FAILURE;
                    }
                }
            }
            if report.all_ok() {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
        Command::Verify { n } => {
            let mut results = verify_green_properties();
            results.push(verify_quadrature_bound(n, &DEFAULT_LENGTHS));
            for r in &results {
                println!("{r}");
            }
            if results.iter().all(|r| r.passed) {
                ExitCode::SUCCESS
            } else {
                ExitCode::FAILURE
            }
        }
    }
}
