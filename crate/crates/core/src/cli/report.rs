//! Text tables and CSV files for experiment reports.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};

use crate::cli::experiments::{ErrorReport, ErrorRow, ProblemId, RowStatus};

#[derive(Debug, thiserror::Error)]
pub enum ReportError {
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
    #[error("csv error: {0}")]
    Csv(#[from] csv::Error),
    #[error("malformed report: {0}")]
    Malformed(String),
}

fn sci(v: f64) -> String {
    format!("{v:.16e}")
}

fn short(v: f64) -> String {
    format!("{v:.2e}")
}

/// Table of R(φ^{(j)}) per m.
pub fn error_table(report: &ErrorReport) -> String {
    let mut out = format!("{} (n = {}): relative errors R\n", report.problem, report.n);
    let _ = writeln!(out, "{:>6} {:>10} {:>10} {:>10} {:>10} {:>10}", "m", "phi", "phi'", "phi''", "phi'''", "phi''''");
    for row in &report.rows {
        match (&row.errors, &row.status) {
            (Some(e), RowStatus::Ok) => {
                let _ = write!(out, "{:>6}", row.m);
                for v in e {
                    let _ = write!(out, " {:>10}", short(*v));
                }
                out.push('\n');
            }
            (_, RowStatus::Failed(msg)) => {
                let _ = writeln!(out, "{:>6} failed: {msg}", row.m);
            }
            (None, RowStatus::Ok) => {
                let _ = writeln!(out, "{:>6} no errors recorded", row.m);
            }
        }
    }
    out
}

/// Table of factorization and solve times in milliseconds.
pub fn timing_table(report: &ErrorReport) -> String {
    let mut out = format!("{} (n = {}): times in ms\n", report.problem, report.n);
    let _ = writeln!(out, "{:>6} {:>12} {:>12} {:>12}", "m", "factor", "solve", "total");
    for row in report.rows.iter().filter(|r| r.status == RowStatus::Ok) {
        let _ = writeln!(out, "{:>6} {:>12.3} {:>12.3} {:>12.3}", row.m, 1e3 * row.t_factor, 1e3 * row.t_solve, 1e3 * row.t_total);
    }
    out
}

/// Relative residual after each deferred-correction step.
pub fn residual_table(report: &ErrorReport) -> String {
    let mut out = format!("{} (n = {}): relative residuals\n", report.problem, report.n);
    for row in report.rows.iter().filter(|r| r.status == RowStatus::Ok) {
        let list: Vec<String> = row.residuals.iter().map(|r| short(*r)).collect();
        let _ = writeln!(out, "{:>6}  {}", row.m, list.join("  "));
    }
    out
}

pub fn render(report: &ErrorReport) -> String {
    format!("{}\n{}\n{}", error_table(report), timing_table(report), residual_table(report))
}

/// Paths of the three CSV files of a problem inside `dir`.
pub fn csv_paths(dir: &Path, problem: ProblemId) -> [PathBuf; 3] {
    ["errors", "timings", "residuals"].map(|kind| dir.join(format!("{}_{kind}.csv", problem.name())))
}

/// Writes `<problem>_errors.csv`, `<problem>_timings.csv` and
/// `<problem>_residuals.csv`. Failed rows keep their m with empty error
/// fields and the reason in the status column.
pub fn write_csv(report: &ErrorReport, dir: &Path) -> Result<[PathBuf; 3], ReportError> {
    fs::create_dir_all(dir)?;
    let paths = csv_paths(dir, report.problem);

    let mut w = csv::Writer::from_path(&paths[0])?;
    w.write_record(["m", "n", "R0", "R1", "R2", "R3", "R4", "status"])?;
    for row in &report.rows {
        let mut rec = vec![row.m.to_string(), report.n.to_string()];
        match &row.errors {
            Some(e) => rec.extend(e.iter().map(|v| sci(*v))),
            None => rec.extend(std::iter::repeat(String::new()).take(5)),
        }
        rec.push(match &row.status {
            RowStatus::Ok => "ok".to_string(),
            RowStatus::Failed(msg) => format!("failed: {msg}"),
        });
        w.write_record(&rec)?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(&paths[1])?;
    w.write_record(["m", "t_factor", "t_solve", "t_total"])?;
    for row in &report.rows {
        w.write_record([row.m.to_string(), sci(row.t_factor), sci(row.t_solve), sci(row.t_total)])?;
    }
    w.flush()?;

    let mut w = csv::Writer::from_path(&paths[2])?;
    w.write_record(["m", "iteration", "residual"])?;
    for row in &report.rows {
        for (i, r) in row.residuals.iter().enumerate() {
            w.write_record([row.m.to_string(), (i + 1).to_string(), sci(*r)])?;
        }
    }
    w.flush()?;
    Ok(paths)
}

fn parse<T: std::str::FromStr>(s: &str, what: &str) -> Result<T, ReportError> {
    s.trim().parse().map_err(|_| ReportError::Malformed(format!("bad {what} '{s}'")))
}

fn records(path: &Path) -> Result<Vec<csv::StringRecord>, ReportError> {
    let mut r = csv::Reader::from_path(path)?;
    Ok(r.records().collect::<Result<Vec<_>, _>>()?)
}

/// Reads back a report written by [`write_csv`].
pub fn read_csv(dir: &Path, problem: ProblemId) -> Result<ErrorReport, ReportError> {
    let paths = csv_paths(dir, problem);
    let mut rows = Vec::new();
    let mut n = problem.default_n();
    for rec in records(&paths[0])? {
        if rec.len() != 8 {
            return Err(ReportError::Malformed(format!("expected 8 fields, got {}", rec.len())));
        }
        let m: usize = parse(&rec[0], "m")?;
        n = parse(&rec[1], "n")?;
        let status = match &rec[7] {
            "ok" => RowStatus::Ok,
            s => RowStatus::Failed(s.strip_prefix("failed: ").unwrap_or(s).to_string()),
        };
        let errors = if rec[2].is_empty() {
            None
        } else {
            let mut e = [0.0; 5];
            for (j, slot) in e.iter_mut().enumerate() {
                *slot = parse(&rec[2 + j], "error")?;
            }
            Some(e)
        };
        rows.push(ErrorRow { m, errors, t_factor: 0.0, t_solve: 0.0, t_total: 0.0, residuals: Vec::new(), status });
    }
    for rec in records(&paths[1])? {
        let m: usize = parse(&rec[0], "m")?;
        let row = rows.iter_mut().find(|r| r.m == m).ok_or_else(|| ReportError::Malformed(format!("timing for unknown m = {m}")))?;
        row.t_factor = parse(&rec[1], "time")?;
        row.t_solve = parse(&rec[2], "time")?;
        row.t_total = parse(&rec[3], "time")?;
    }
    for rec in records(&paths[2])? {
        let m: usize = parse(&rec[0], "m")?;
        let row = rows.iter_mut().find(|r| r.m == m).ok_or_else(|| ReportError::Malformed(format!("residual for unknown m = {m}")))?;
        row.residuals.push(parse(&rec[2], "residual")?);
    }
    Ok(ErrorReport { problem, n, rows })
}
