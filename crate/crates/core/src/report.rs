//! Serialization of outer logs and run summaries.
//!
//! Floats are written in Rust's shortest round-trip form, so identical runs
//! produce byte-identical files.

use std::fs;
use std::io::Write;
use std::path::{Path, PathBuf};

use serde::Serialize;

use crate::auglag::{OuterLog, RunOutcome, SolverParams, StepCounts};
use crate::diagnostics::KktReport;
use crate::error::Result;

pub const LOG_COLUMNS: [&str; 11] =
    ["k", "n", "alpha", "rho", "R", "step_class", "inner_iters", "feas", "compl", "stop_residual", "err_u_L2"];

pub const ERROR_COLUMNS: [&str; 6] = ["k", "alpha", "step_class", "err_u_L2", "err_y_L2", "err_y_over_alpha"];

fn opt(v: Option<f64>) -> String {
    v.map(|x| x.to_string()).unwrap_or_default()
}

/// One row per outer iteration.
pub fn write_log<W: Write>(log: &OuterLog, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(LOG_COLUMNS)?;
    for r in &log.records {
        w.write_record([
            r.k.to_string(),
            r.n.to_string(),
            r.alpha.to_string(),
            r.rho.to_string(),
            r.r.to_string(),
            r.step_class.as_str().to_string(),
            r.inner_iters.to_string(),
            r.feas.to_string(),
            r.compl.to_string(),
            r.stop_residual.to_string(),
            opt(r.err_u_l2),
        ])?;
    }
    w.flush()?;
    Ok(())
}

/// Errors against the exact solution over successful and intermediate steps.
pub fn write_error_curve<W: Write>(log: &OuterLog, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(ERROR_COLUMNS)?;
    for r in log.advancing().filter(|r| r.err_u_l2.is_some()) {
        w.write_record([
            r.k.to_string(),
            r.alpha.to_string(),
            r.step_class.as_str().to_string(),
            opt(r.err_u_l2),
            opt(r.err_y_l2),
            opt(r.err_y_over_alpha),
        ])?;
    }
    w.flush()?;
    Ok(())
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct FinalValues {
    pub alpha: f64,
    pub rho: f64,
    pub stop_residual: f64,
    #[serde(rename = "err_u_L2")]
    pub err_u_l2: Option<f64>,
}

#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Summary {
    pub problem: String,
    pub resolution: usize,
    pub params: SolverParams,
    pub counts: StepCounts,
    #[serde(rename = "final")]
    pub final_values: FinalValues,
    pub converged: bool,
    pub outer_iterations: usize,
    pub kkt: KktReport,
}

impl Summary {
    pub fn new(problem: &str, resolution: usize, params: &SolverParams, out: &RunOutcome) -> Self {
        Self {
            problem: problem.to_string(),
            resolution,
            params: *params,
            counts: out.log.counts(),
            final_values: FinalValues {
                alpha: out.alpha,
                rho: out.rho,
                stop_residual: out.stop_residual,
                err_u_l2: out.err_u_l2,
            },
            converged: out.converged,
            outer_iterations: out.log.len(),
            kkt: out.kkt,
        }
    }

    pub fn to_json(&self) -> Result<String> {
        Ok(serde_json::to_string_pretty(self)?)
    }
}

/// Paths written by [`write_run`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RunFiles {
    pub log: PathBuf,
    pub summary: PathBuf,
    pub error_curve: Option<PathBuf>,
}

/// Writes `<stem>_log.csv`, `<stem>_summary.json` and, when requested and the
/// run carries errors against an exact solution, `<stem>_error_vs_alpha.csv`
/// into `dir`. The directory is created if missing.
pub fn write_run(dir: &Path, stem: &str, summary: &Summary, out: &RunOutcome, error_curve: bool) -> Result<RunFiles> {
    fs::create_dir_all(dir)?;
    let log = dir.join(format!("{stem}_log.csv"));
    write_log(&out.log, fs::File::create(&log)?)?;
    let summary_path = dir.join(format!("{stem}_summary.json"));
    fs::write(&summary_path, summary.to_json()? + "\n")?;
    let error_curve = if error_curve && out.err_u_l2.is_some() {
        let path = dir.join(format!("{stem}_error_vs_alpha.csv"));
        write_error_curve(&out.log, fs::File::create(&path)?)?;
        Some(path)
    } else {
        None
    };
    Ok(RunFiles { log, summary: summary_path, error_curve })
}
