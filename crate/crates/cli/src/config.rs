use std::collections::BTreeMap;
use std::path::{Path, PathBuf};
use std::str::FromStr;

use auglag_core::auglag::SolverParams;
use auglag_core::problems::{self, Domain, ProblemSpec};
use clap::Parser;
use thiserror::Error;

/// Name of the configuration-file problem with constant data.
pub const CONSTANT_PROBLEM: &str = "constant";
pub const MIN_RESOLUTION: usize = 4;
pub const DEFAULT_CELLS_1D: usize = 4096;
pub const DEFAULT_CELLS_2D: usize = 128;

#[derive(Debug, Error)]
pub enum ConfigError {
    #[error("invalid value for `{key}`: {reason}")]
    Invalid { key: String, reason: String },
    #[error("unknown configuration key `{0}`")]
    UnknownKey(String),
    #[error("config file line {line}: expected `key = value`")]
    Syntax { line: usize },
    #[error("cannot read config file {path}: {source}")]
    Read { path: PathBuf, source: std::io::Error },
    #[error(transparent)]
    Core(#[from] auglag_core::Error),
}

fn invalid(key: &str, reason: impl Into<String>) -> ConfigError {
    ConfigError::Invalid { key: key.to_string(), reason: reason.into() }
}

/// Solve a sparse, state-constrained elliptic control problem and write
/// its outer-iteration log, summary and error curve.
#[derive(Clone, Debug, Default, Parser)]
#[command(name = "auglag", version)]
pub struct Cli {
    /// example1, example2_rect, example3, tikhonov_sanity or constant
    #[arg(long)]
    pub problem: Option<String>,
    /// Cells per axis (default 4096 in 1D, 128 in 2D)
    #[arg(long)]
    pub cells: Option<usize>,
    #[arg(long)]
    pub alpha1: Option<f64>,
    #[arg(long)]
    pub rho1: Option<f64>,
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub omega: Option<f64>,
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long)]
    pub eps: Option<f64>,
    #[arg(long = "eps-i")]
    pub eps_i: Option<f64>,
    /// Sparsity weight override
    #[arg(long)]
    pub beta: Option<f64>,
    /// Comma-separated sparsity weights, one independent run each
    #[arg(long = "batch-beta", value_delimiter = ',')]
    pub batch_beta: Option<Vec<f64>>,
    /// Output directory
    #[arg(long, env = "AUGLAG_OUT")]
    pub out: Option<PathBuf>,
    /// Flat `key = value` file; flags take precedence
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long = "max-outer")]
    pub max_outer: Option<usize>,
    #[arg(long = "max-inner")]
    pub max_inner: Option<usize>,
    /// Skip the error-vs-α data file
    #[arg(long = "no-plot-data")]
    pub no_plot_data: bool,
}

/// Constant data of the configuration-file problem.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct ConstantData {
    pub dim: usize,
    pub lower: f64,
    pub upper: f64,
    pub obstacle: f64,
    pub target: f64,
    pub source: f64,
}

impl Default for ConstantData {
    fn default() -> Self {
        Self { dim: 1, lower: -1.0, upper: 1.0, obstacle: 1.0, target: 0.0, source: 0.0 }
    }
}

#[derive(Clone, Debug, PartialEq)]
pub struct RunConfig {
    pub problem: String,
    pub cells: usize,
    pub params: SolverParams,
    pub beta: Option<f64>,
    pub batch_beta: Vec<f64>,
    pub out: PathBuf,
    pub plot_data: bool,
    pub constant: ConstantData,
}

impl RunConfig {
    /// Problem instances to run: one per batch weight, or a single one.
    pub fn instances(&self) -> Result<Vec<(String, ProblemSpec)>, ConfigError> {
        if self.batch_beta.is_empty() {
            return Ok(vec![(self.problem.clone(), self.spec(self.beta)?)]);
        }
        self.batch_beta.iter().map(|&b| Ok((format!("{}_beta{b}", self.problem), self.spec(Some(b))?))).collect()
    }

    fn spec(&self, beta: Option<f64>) -> Result<ProblemSpec, ConfigError> {
        if let Some(b) = beta {
            if !(b.is_finite() && b > 0.0) {
                return Err(invalid("beta", "β must be positive"));
            }
        }
        if self.problem == CONSTANT_PROBLEM {
            let c = &self.constant;
            let domain = match c.dim {
                1 => Domain::Interval { lower: 0.0, upper: 1.0 },
                _ => Domain::Rectangle { x: (0.0, 1.0), y: (0.0, 1.0) },
            };
            return Ok(ProblemSpec::constant(
                CONSTANT_PROBLEM,
                domain,
                c.lower,
                c.upper,
                beta.unwrap_or(0.1),
                c.obstacle,
                c.target,
                c.source,
            ));
        }
        Ok(problems::by_name(&self.problem, beta)?)
    }
}

fn parse_value<T: FromStr>(key: &str, raw: &str) -> Result<T, ConfigError>
where
    T::Err: std::fmt::Display,
{
    raw.trim().parse().map_err(|e: T::Err| invalid(key, e.to_string()))
}

/// Reads a flat `key = value` file. Blank lines and `#` comments are skipped;
/// keys may use `-` or `_`.
pub fn read_config_file(path: &Path) -> Result<BTreeMap<String, String>, ConfigError> {
    let text =
        std::fs::read_to_string(path).map_err(|source| ConfigError::Read { path: path.to_path_buf(), source })?;
    parse_config_text(&text)
}

pub fn parse_config_text(text: &str) -> Result<BTreeMap<String, String>, ConfigError> {
    let mut map = BTreeMap::new();
    for (i, line) in text.lines().enumerate() {
        let line = line.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let (k, v) = line.split_once('=').ok_or(ConfigError::Syntax { line: i + 1 })?;
        map.insert(k.trim().replace('-', "_"), v.trim().to_string());
    }
    Ok(map)
}

/// Merges defaults, the optional config file and the flags, in increasing
/// precedence, and validates the result.
pub fn resolve(cli: &Cli) -> Result<RunConfig, ConfigError> {
    let file = match &cli.config {
        Some(path) => read_config_file(path)?,
        None => BTreeMap::new(),
    };
    let mut p = SolverParams::default();
    let mut constant = ConstantData::default();
    let mut problem = "example1".to_string();
    let mut cells = None;
    let mut beta = None;
    let mut batch_beta = Vec::new();
    let mut out = PathBuf::from("out");
    let mut plot_data = true;

    for (key, raw) in file {
        let k = key.as_str();
        match k {
            "problem" => problem = raw,
            "cells" => cells = Some(parse_value(k, &raw)?),
            "alpha1" => p.alpha1 = parse_value(k, &raw)?,
            "rho1" => p.rho1 = parse_value(k, &raw)?,
            "theta" => p.theta = parse_value(k, &raw)?,
            "omega" => p.omega = parse_value(k, &raw)?,
            "tau" => p.tau = parse_value(k, &raw)?,
            "eps" => p.eps = parse_value(k, &raw)?,
            "eps_i" => p.eps_i = parse_value(k, &raw)?,
            "max_outer" => p.max_outer = parse_value(k, &raw)?,
            "max_inner" => p.max_inner = parse_value(k, &raw)?,
            "beta" => beta = Some(parse_value(k, &raw)?),
            "batch_beta" => {
                batch_beta = raw.split(',').map(|s| parse_value(k, s)).collect::<Result<_, _>>()?;
            }
            "out" => out = PathBuf::from(raw),
            "plot_data" => plot_data = parse_value(k, &raw)?,
            "dim" => constant.dim = parse_value(k, &raw)?,
            "lower" => constant.lower = parse_value(k, &raw)?,
            "upper" => constant.upper = parse_value(k, &raw)?,
            "obstacle" => constant.obstacle = parse_value(k, &raw)?,
            "target" => constant.target = parse_value(k, &raw)?,
            "source" => constant.source = parse_value(k, &raw)?,
            _ => return Err(ConfigError::UnknownKey(key)),
        }
    }

    if let Some(v) = &cli.problem {
        problem = v.clone();
    }
    cells = cli.cells.or(cells);
    p.alpha1 = cli.alpha1.unwrap_or(p.alpha1);
    p.rho1 = cli.rho1.unwrap_or(p.rho1);
    p.theta = cli.theta.unwrap_or(p.theta);
    p.omega = cli.omega.unwrap_or(p.omega);
    p.tau = cli.tau.unwrap_or(p.tau);
    p.eps = cli.eps.unwrap_or(p.eps);
    p.eps_i = cli.eps_i.unwrap_or(p.eps_i);
    p.max_outer = cli.max_outer.unwrap_or(p.max_outer);
    p.max_inner = cli.max_inner.unwrap_or(p.max_inner);
    beta = cli.beta.or(beta);
    if let Some(b) = &cli.batch_beta {
        batch_beta = b.clone();
    }
    if let Some(o) = &cli.out {
        out = o.clone();
    }
    if cli.no_plot_data {
        plot_data = false;
    }

    p.validate()?;
    if !matches!(constant.dim, 1 | 2) {
        return Err(invalid("dim", "dimension must be 1 or 2"));
    }
    let dim = if problem == CONSTANT_PROBLEM { constant.dim } else { problems::by_name(&problem, None)?.domain.dim() };
    let cells = cells.unwrap_or(if dim == 1 { DEFAULT_CELLS_1D } else { DEFAULT_CELLS_2D });
    if cells < MIN_RESOLUTION {
        return Err(invalid("cells", format!("resolution must be at least {MIN_RESOLUTION}")));
    }
    let config = RunConfig { problem, cells, params: p, beta, batch_beta, out, plot_data, constant };
    config.instances()?;
    Ok(config)
}
