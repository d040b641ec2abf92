//! Outer augmented Lagrange loop with Tikhonov decay.
//!
//! Each outer step solves one subproblem, forms the multiplier candidate
//! `μ̄ = (μ + ρ(y − ψ))₊` and the measure `R = (feas + compl)/α`, and then
//! takes one of three branches: a successful step (sufficient decrease of
//! `R` against the last successful value) shrinks `α` and accepts `μ̄`; an
//! intermediate step (feasibility and complementarity already small) does the
//! same without moving the reference value; otherwise `ρ` grows.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::diagnostics::{error_vs_exact, kkt_report, KktReport};
use crate::discrete::Discretization;
use crate::error::{Error, Result};
use crate::pde::{Grid, GridFunction, TOL_LIN};
use crate::problems::ExactFields;
use crate::subproblem::{
    inner_solve, prox_gradient_globalize, Iterate, SubproblemResult, GLOBALIZATION_TOL, MAX_INNER_ITERATIONS,
};

/// Proximal-gradient iterations run from `u = 0` before the first subproblem.
pub const BURN_IN_ITERATIONS: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SolverParams {
    pub alpha1: f64,
    pub rho1: f64,
    pub theta: f64,
    pub omega: f64,
    pub tau: f64,
    pub eps: f64,
    pub eps_i: f64,
    pub r0_plus: f64,
    pub max_outer: usize,
    pub max_inner: usize,
    pub tol_lin: f64,
}

impl Default for SolverParams {
    fn default() -> Self {
        Self {
            alpha1: 1.0,
            rho1: 100.0,
            theta: 5.0,
            omega: 0.75,
            tau: 0.8,
            eps: 1e-6,
            eps_i: 5e-7,
            r0_plus: 1e12,
            max_outer: 200,
            max_inner: MAX_INNER_ITERATIONS,
            tol_lin: TOL_LIN,
        }
    }
}

fn bad(key: &'static str, reason: &str) -> Error {
    Error::InvalidParameter { key, reason: reason.to_string() }
}

impl SolverParams {
    pub fn validate(&self) -> Result<()> {
        let finite_pos = |v: f64| v.is_finite() && v > 0.0;
        if !finite_pos(self.alpha1) {
            return Err(bad("alpha1", "α₁ must be positive"));
        }
        if !finite_pos(self.rho1) {
            return Err(bad("rho1", "ρ₁ must be positive"));
        }
        if !(self.theta.is_finite() && self.theta > 1.0) {
            return Err(bad("theta", "θ must be greater than 1"));
        }
        if !(self.omega > 0.0 && self.omega < 1.0) {
            return Err(bad("omega", "ω must lie in (0,1)"));
        }
        if !(self.tau > 0.0 && self.tau < 1.0) {
            return Err(bad("tau", "τ must lie in (0,1)"));
        }
        if !finite_pos(self.eps) {
            return Err(bad("eps", "ε must be positive"));
        }
        if !(self.eps_i > 0.0 && self.eps_i < self.eps) {
            return Err(bad("eps_i", "ε_I must lie in (0, ε)"));
        }
        if self.r0_plus.is_nan() || self.r0_plus <= 0.0 {
            return Err(bad("r0_plus", "R₀⁺ must be positive"));
        }
        if self.max_outer == 0 {
            return Err(bad("max_outer", "at least one outer iteration is required"));
        }
        if self.max_inner == 0 {
            return Err(bad("max_inner", "at least one inner iteration is required"));
        }
        if !finite_pos(self.tol_lin) {
            return Err(bad("tol_lin", "linear tolerance must be positive"));
        }
        Ok(())
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum StepClass {
    Successful,
    Intermediate,
    NotSuccessful,
}

impl StepClass {
    pub fn as_str(self) -> &'static str {
        match self {
            StepClass::Successful => "successful",
            StepClass::Intermediate => "intermediate",
            StepClass::NotSuccessful => "not_successful",
        }
    }

    /// Successful and intermediate steps both advance the recorded iterate.
    pub fn advances(self) -> bool {
        self != StepClass::NotSuccessful
    }
}

/// One outer iteration. `alpha` and `rho` are the values the subproblem was
/// solved with.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OuterRecord {
    pub k: usize,
    /// Successful steps so far, this one included.
    pub n: usize,
    pub alpha: f64,
    pub rho: f64,
    #[serde(rename = "R")]
    pub r: f64,
    pub step_class: StepClass,
    pub inner_iters: usize,
    pub feas: f64,
    pub compl: f64,
    pub stop_residual: f64,
    #[serde(rename = "err_u_L2")]
    pub err_u_l2: Option<f64>,
    pub err_y_l2: Option<f64>,
    /// `‖y − ȳ‖² / α`.
    pub err_y_over_alpha: Option<f64>,
    pub globalized: bool,
}

#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct OuterLog {
    pub records: Vec<OuterRecord>,
}

#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, Serialize, Deserialize)]
pub struct StepCounts {
    pub successful: usize,
    pub intermediate: usize,
    pub not_successful: usize,
}

impl StepCounts {
    pub fn total(&self) -> usize {
        self.successful + self.intermediate + self.not_successful
    }
}

impl OuterLog {
    pub fn len(&self) -> usize {
        self.records.len()
    }

    pub fn is_empty(&self) -> bool {
        self.records.is_empty()
    }

    pub fn counts(&self) -> StepCounts {
        let mut c = StepCounts::default();
        for r in &self.records {
            match r.step_class {
                StepClass::Successful => c.successful += 1,
                StepClass::Intermediate => c.intermediate += 1,
                StepClass::NotSuccessful => c.not_successful += 1,
            }
        }
        c
    }

    pub fn successful(&self) -> impl Iterator<Item = &OuterRecord> {
        self.records.iter().filter(|r| r.step_class == StepClass::Successful)
    }

    /// Records of successful and intermediate steps.
    pub fn advancing(&self) -> impl Iterator<Item = &OuterRecord> {
        self.records.iter().filter(|r| r.step_class.advances())
    }
}

/// `(R, feas, compl)` with `feas = max (y − ψ)₊`, `compl = |(μ, ψ − y)_h|`
/// and `R = (feas + compl)/α`.
pub fn feasibility_measure(grid: &Grid, y: &[f64], mu: &[f64], psi: &[f64], alpha: f64) -> (f64, f64, f64) {
    let gap: Vec<f64> = psi.iter().zip(y).map(|(p, y)| p - y).collect();
    let feas = gap.iter().fold(0.0_f64, |m, &g| m.max(-g));
    let compl = grid.inner(mu, &gap).abs();
    ((feas + compl) / alpha, feas, compl)
}

/// `(μ + ρ(y − ψ))₊`.
pub fn multiplier_update(mu: &[f64], y: &[f64], psi: &[f64], rho: f64) -> GridFunction {
    GridFunction(mu.iter().zip(y.iter().zip(psi)).map(|(&m, (&y, &p))| (m + rho * (y - p)).max(0.0)).collect())
}

/// `‖u − P(u − (p + βλ))‖_h + max (y − ψ)₊ + |(μ, y − ψ)_h|`.
pub fn stopping_residual(disc: &Discretization, it: &Iterate) -> f64 {
    let step: Vec<f64> = (0..disc.len()).map(|i| it.u[i] - (it.p[i] + disc.beta * it.lambda[i])).collect();
    let proj = disc.project_box(&step);
    let diff: Vec<f64> = it.u.iter().zip(proj.iter()).map(|(a, b)| a - b).collect();
    let (_, feas, compl) = feasibility_measure(&disc.grid, &it.y, &it.mu, &disc.obstacle, 1.0);
    disc.grid.norm_l2(&diff) + feas + compl
}

#[derive(Clone, Debug)]
pub struct RunOutcome {
    /// Last subproblem solution.
    pub result: SubproblemResult,
    pub log: OuterLog,
    pub converged: bool,
    /// `α` and `ρ` of the last subproblem.
    pub alpha: f64,
    pub rho: f64,
    pub stop_residual: f64,
    pub kkt: KktReport,
    pub err_u_l2: Option<f64>,
    /// `R⁺` values of the successful steps, in order.
    pub r_plus: Vec<f64>,
}

/// Runs the outer loop until the stopping residual drops to `ε` or the
/// iteration cap is reached.
pub fn run(disc: &Discretization, params: &SolverParams, exact: Option<&ExactFields>) -> Result<RunOutcome> {
    params.validate()?;
    disc.require_positive_beta()?;
    let n_nodes = disc.len();
    let mut alpha = params.alpha1;
    let mut rho = params.rho1;
    let mut mu = disc.grid.zeros();
    let mut r_ref = params.r0_plus;
    let mut n = 0;

    let burn = prox_gradient_globalize(
        disc,
        alpha,
        rho,
        &mu,
        &vec![0.0; n_nodes],
        BURN_IN_ITERATIONS,
        GLOBALIZATION_TOL * alpha,
    )?;
    let mut start_u = burn.u;
    let mut start_p = burn.p;

    let mut log = OuterLog::default();
    let mut r_plus = Vec::new();
    let mut last: Option<(SubproblemResult, f64, f64, f64)> = None;
    let mut converged = false;

    for k in 1..=params.max_outer {
        let res = inner_solve(disc, alpha, rho, &mu, &start_u, &start_p, params.max_inner)?;
        let (alpha_k, rho_k) = (alpha, rho);
        let mu_bar = multiplier_update(&mu, &res.iterate.y, &disc.obstacle, rho);
        let (r, feas, compl) = feasibility_measure(&disc.grid, &res.iterate.y, &mu_bar, &disc.obstacle, alpha);
        let stop = stopping_residual(disc, &res.iterate);

        let class = if !res.converged {
            StepClass::NotSuccessful
        } else if r <= params.tau * r_ref {
            StepClass::Successful
        } else if feas + compl < params.eps_i {
            StepClass::Intermediate
        } else {
            StepClass::NotSuccessful
        };
        match class {
            StepClass::Successful => {
                n += 1;
                r_ref = r;
                r_plus.push(r);
                alpha *= params.omega;
                mu = mu_bar;
            }
            StepClass::Intermediate => {
                alpha *= params.omega;
                mu = mu_bar;
            }
            StepClass::NotSuccessful => rho *= params.theta,
        }

        let errors = exact.map(|ex| error_vs_exact(disc, &res.iterate.u, &res.iterate.y, ex, Some(alpha_k)));
        log.records.push(OuterRecord {
            k,
            n,
            alpha: alpha_k,
            rho: rho_k,
            r,
            step_class: class,
            inner_iters: res.inner_iterations,
            feas,
            compl,
            stop_residual: stop,
            err_u_l2: errors.map(|e| e.err_u_l2),
            err_y_l2: errors.map(|e| e.err_y_l2),
            err_y_over_alpha: errors.and_then(|e| e.err_y_over_alpha),
            globalized: res.globalized,
        });

        if res.converged {
            start_u = res.iterate.u.clone();
            start_p = res.iterate.p.clone();
        }
        let done = res.converged && stop <= params.eps;
        last = Some((res, alpha_k, rho_k, stop));
        if done {
            converged = true;
            break;
        }
    }

    let (result, alpha, rho, stop_residual) = last.expect("at least one outer iteration");
    let kkt = kkt_report(disc, &result.iterate, alpha);
    let err_u_l2 = exact.map(|ex| error_vs_exact(disc, &result.iterate.u, &result.iterate.y, ex, None).err_u_l2);
    Ok(RunOutcome { result, log, converged, alpha, rho, stop_residual, kkt, err_u_l2, r_plus })
}

/// One instance of a batch.
pub struct BatchJob<'a> {
    pub disc: &'a Discretization,
    pub exact: Option<&'a ExactFields>,
    pub params: SolverParams,
}

/// Runs independent instances concurrently; results keep the input order.
pub fn run_batch(jobs: &[BatchJob<'_>]) -> Vec<Result<RunOutcome>> {
    jobs.par_iter().map(|j| run(j.disc, &j.params, j.exact)).collect()
}
