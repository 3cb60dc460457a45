use std::fs::File;
use std::io::Write;
use std::path::Path;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::sweep::SweepResult;
use crate::error::{Error, Result};
use crate::gas::GasState;
use crate::kinetic::{micro_distance, moments, ReducedKineticState};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ReportFormat {
    Csv,
    Json,
}

impl FromStr for ReportFormat {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "csv" => Ok(ReportFormat::Csv),
            "json" => Ok(ReportFormat::Json),
            other => Err(Error::Config(format!("unknown report format {other:?}"))),
        }
    }
}

fn csv_error(path: &Path, e: csv::Error) -> Error {
    match e.into_kind() {
        csv::ErrorKind::Io(io) => Error::io(path, io),
        other => Error::io(path, std::io::Error::other(format!("{other:?}"))),
    }
}

/// Writes a sweep report. The CSV has one row per ε with columns
/// `eps, sup_error, l2_error, fitted_order, envelope_ratio`; `fitted_order`
/// is filled on the last row only.
pub fn emit_report(result: &SweepResult, path: &Path, format: ReportFormat) -> Result<()> {
    match format {
        ReportFormat::Json => {
            let mut f = File::create(path).map_err(|e| Error::io(path, e))?;
            serde_json::to_writer_pretty(&mut f, result)?;
            f.write_all(b"\n").map_err(|e| Error::io(path, e))
        }
        ReportFormat::Csv => {
            let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
            w.write_record(["eps", "sup_error", "l2_error", "fitted_order", "envelope_ratio"])
                .map_err(|e| csv_error(path, e))?;
            let n = result.rows.len();
            for (i, r) in result.rows.iter().enumerate() {
                let order = match (i + 1 == n, result.fit) {
                    (true, Some(f)) => f.order.to_string(),
                    _ => String::new(),
                };
                w.write_record([
                    r.eps.to_string(),
                    r.sup_error.to_string(),
                    r.l2_error.to_string(),
                    order,
                    r.envelope_ratio.to_string(),
                ])
                .map_err(|e| csv_error(path, e))?;
            }
            w.flush().map_err(|e| Error::io(path, e))
        }
    }
}

/// Reads a JSON sweep report.
pub fn read_report(path: &Path) -> Result<SweepResult> {
    let text = std::fs::read_to_string(path).map_err(|e| Error::io(path, e))?;
    Ok(serde_json::from_str(&text)?)
}

/// Macroscopic snapshot of a kinetic state in the Eulerian frame.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct MacroSnapshot {
    pub t: f64,
    pub x: Vec<f64>,
    pub rho: Vec<f64>,
    pub u1: Vec<f64>,
    pub theta: Vec<f64>,
    pub e: Vec<f64>,
    /// Distance of each cell from its own local Maxwellian.
    pub micro_norm: Vec<f64>,
}

impl MacroSnapshot {
    pub fn from_state(state: &ReducedKineticState, star: &GasState) -> Result<Self> {
        let m = moments(state)?;
        let micro_norm = micro_distance(state, &m, star)?;
        Ok(Self {
            t: state.time,
            x: state.x_grid.points(),
            rho: m.rho,
            u1: m.u1,
            theta: m.theta,
            e: m.e,
            micro_norm,
        })
    }

    /// Columns `x, rho, u1, theta, E, micro_norm`.
    pub fn write_csv(&self, path: &Path) -> Result<()> {
        let mut w = csv::Writer::from_path(path).map_err(|e| csv_error(path, e))?;
        w.write_record(["x", "rho", "u1", "theta", "E", "micro_norm"])
            .map_err(|e| csv_error(path, e))?;
        for i in 0..self.x.len() {
            let row = [self.x[i], self.rho[i], self.u1[i], self.theta[i], self.e[i], self.micro_norm[i]];
            w.write_record(row.iter().map(|v| v.to_string()))
                .map_err(|e| csv_error(path, e))?;
        }
        w.flush().map_err(|e| Error::io(path, e))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::harness::{SweepFit, SweepRow};

    fn row(eps: f64, err: f64) -> SweepRow {
        SweepRow {
            eps,
            sup_error: err,
            l2_error: 0.5 * err,
            sup_error_composite: 0.1 * err,
            l2_error_composite: 0.05 * err,
            envelope_ratio: err / crate::harness::envelope(eps),
            n_x: 100,
            n_xi: 32,
            samples: 400,
            runtime_s: 1.5,
        }
    }

    fn sample() -> SweepResult {
        SweepResult {
            rows: vec![row(0.02, 0.3), row(0.01, 0.2), row(0.005, 0.15)],
            fit: Some(SweepFit {
                order: 0.5,
                intercept: 0.1,
                residual: 0.01,
            }),
            envelope_spread: Some(1.2),
            refinement: None,
        }
    }

    #[test]
    fn empty_result_gives_header_only_csv() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        emit_report(&SweepResult::default(), &p, ReportFormat::Csv).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        assert_eq!(text, "eps,sup_error,l2_error,fitted_order,envelope_ratio\n");
    }

    #[test]
    fn csv_has_one_row_per_eps_plus_header() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.csv");
        let r = sample();
        emit_report(&r, &p, ReportFormat::Csv).unwrap();
        let text = std::fs::read_to_string(&p).unwrap();
        let lines: Vec<&str> = text.lines().collect();
        assert_eq!(lines.len(), r.rows.len() + 1);
        assert!(lines[1].split(',').nth(3).unwrap().is_empty());
        assert_eq!(lines[3].split(',').nth(3).unwrap(), "0.5");
    }

    #[test]
    fn json_round_trip() {
        let dir = tempfile::tempdir().unwrap();
        let p = dir.path().join("s.json");
        let r = sample();
        emit_report(&r, &p, ReportFormat::Json).unwrap();
        assert_eq!(read_report(&p).unwrap(), r);
    }

    #[test]
    fn io_errors_carry_the_path() {
        let p = Path::new("/nonexistent-dir/s.csv");
        let e = emit_report(&sample(), p, ReportFormat::Csv).unwrap_err();
        assert!(e.to_string().contains("/nonexistent-dir/s.csv"), "{e}");
    }
}
