//! Command-line driver: configuration resolution and output emission.

pub mod config;

use std::path::PathBuf;

use auglag_core::auglag::{run_batch, BatchJob, RunOutcome};
use auglag_core::problems::{self, ExactFields};
use auglag_core::report::{write_run, RunFiles, Summary};
use auglag_core::Discretization;
use thiserror::Error;

pub use config::{resolve, Cli, ConfigError, RunConfig};

#[derive(Debug, Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("run `{name}` failed: {source}")]
    Solve { name: String, source: auglag_core::Error },
    #[error("cannot write results to {path}: {source}")]
    Output { path: PathBuf, source: auglag_core::Error },
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Config(_) => 2,
            CliError::Solve { .. } => 1,
            CliError::Output { .. } => 3,
        }
    }
}

pub struct InstanceReport {
    pub name: String,
    pub summary: Summary,
    pub files: RunFiles,
}

/// Runs every instance of `config` (concurrently in batch mode) and writes
/// one set of output files per instance.
pub fn run_and_emit(config: &RunConfig) -> Result<Vec<InstanceReport>, CliError> {
    let instances = config.instances()?;
    let mut discs = Vec::with_capacity(instances.len());
    let mut exacts: Vec<Option<ExactFields>> = Vec::with_capacity(instances.len());
    for (_, spec) in &instances {
        let grid = spec.domain.grid(config.cells).map_err(ConfigError::from)?;
        let disc = Discretization::with_tolerance(spec, grid, config.params.tol_lin).map_err(ConfigError::from)?;
        exacts.push(if spec.has_exact() {
            Some(problems::eval_exact(spec, &disc.grid).map_err(ConfigError::from)?)
        } else {
            None
        });
        discs.push(disc);
    }
    let jobs: Vec<BatchJob<'_>> = discs
        .iter()
        .zip(&exacts)
        .map(|(disc, exact)| BatchJob { disc, exact: exact.as_ref(), params: config.params })
        .collect();
    let outcomes = run_batch(&jobs);

    let mut reports = Vec::with_capacity(outcomes.len());
    for ((name, _), outcome) in instances.into_iter().zip(outcomes) {
        let out: RunOutcome = outcome.map_err(|source| CliError::Solve { name: name.clone(), source })?;
        let summary = Summary::new(&config.problem, config.cells, &config.params, &out);
        let files = write_run(&config.out, &name, &summary, &out, config.plot_data)
            .map_err(|source| CliError::Output { path: config.out.clone(), source })?;
        reports.push(InstanceReport { name, summary, files });
    }
    Ok(reports)
}
