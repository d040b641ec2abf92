//! Primal-dual interior-point solver for the subproblem.
//!
//! The nonsmooth terms are lifted into constraints: `t ≥ |u|` carries the
//! `L¹` term and a slack `σ ≥ max(0, y − ψ + μ/ρ)` carries the shifted
//! penalty, since `(μ + ρ(y − ψ))₊² / (2ρ) = min ρσ²/2` over such `σ`. The
//! result is a convex quadratic program
//!
//! ```text
//!   min  ½|y − y_d|² + α/2 |u|² + β Σt + ρ/2 |σ|²
//!   s.t. A y = u + f,  u_a ≤ u ≤ u_b,  t ≥ ±u,  σ ≥ 0,  σ ≥ y − ψ + μ/ρ
//! ```
//!
//! solved with Mehrotra's predictor-corrector method. After eliminating the
//! node-local unknowns each Newton step is a block system in `(y, p)` with the
//! same structure as the active-set step.

use super::kkt::BlockFactor;
use crate::discrete::Discretization;
use crate::error::{Error, Result};
use crate::pde::GridFunction;

pub const INTERIOR_MAX_ITERATIONS: usize = 150;
const STEP_FRACTION: f64 = 0.995;
const PRIMAL_TOL: f64 = 1e-12;
const DUAL_TOL: f64 = 1e-8;
const GAP_TOL: f64 = 1e-13;
const CONSTRAINTS: usize = 6;

#[derive(Clone, Debug)]
pub struct InteriorOutcome {
    pub u: GridFunction,
    pub y: GridFunction,
    pub p: GridFunction,
    /// Multiplier of the shifted state constraint, `(μ + ρ(y − ψ))₊` at the
    /// solution.
    pub mu: GridFunction,
    pub iterations: usize,
    /// Average complementarity at exit.
    pub gap: f64,
    pub converged: bool,
}

struct State {
    u: Vec<f64>,
    t: Vec<f64>,
    s: Vec<f64>,
    y: Vec<f64>,
    p: Vec<f64>,
    z: [Vec<f64>; CONSTRAINTS],
}

struct Step {
    u: Vec<f64>,
    t: Vec<f64>,
    s: Vec<f64>,
    y: Vec<f64>,
    p: Vec<f64>,
    z: [Vec<f64>; CONSTRAINTS],
    g: [Vec<f64>; CONSTRAINTS],
}

struct Problem<'a> {
    disc: &'a Discretization,
    alpha: f64,
    rho: f64,
    /// `ψ − μ/ρ`, the threshold of the penalty slack.
    shift: Vec<f64>,
}

impl Problem<'_> {
    fn slacks(&self, st: &State) -> [Vec<f64>; CONSTRAINTS] {
        let d = self.disc;
        let n = d.len();
        let mut g: [Vec<f64>; CONSTRAINTS] = Default::default();
        for v in g.iter_mut() {
            v.resize(n, 0.0);
        }
        for i in 0..n {
            g[0][i] = st.u[i] - d.lower[i];
            g[1][i] = d.upper[i] - st.u[i];
            g[2][i] = st.t[i] - st.u[i];
            g[3][i] = st.t[i] + st.u[i];
            g[4][i] = st.s[i];
            g[5][i] = st.s[i] - st.y[i] + self.shift[i];
        }
        g
    }

    /// Residuals `(r_y, r_u, r_t, r_σ, r_e)` of stationarity and the state equation.
    fn residuals(&self, st: &State) -> [Vec<f64>; 5] {
        let d = self.disc;
        let n = d.len();
        let ap = d.op.apply(&st.p);
        let ay = d.op.apply(&st.y);
        let z = &st.z;
        let mut r: [Vec<f64>; 5] = Default::default();
        for v in r.iter_mut() {
            v.resize(n, 0.0);
        }
        for i in 0..n {
            r[0][i] = st.y[i] - d.target[i] + z[5][i] - ap[i];
            r[1][i] = self.alpha * st.u[i] + st.p[i] - z[0][i] + z[1][i] + z[2][i] - z[3][i];
            r[2][i] = d.beta - z[2][i] - z[3][i];
            r[3][i] = self.rho * st.s[i] - z[4][i] - z[5][i];
            r[4][i] = ay[i] - st.u[i] - d.source[i];
        }
        r
    }

    /// Reduced Newton matrix at the current point.
    fn newton_matrix(&self, st: &State, g: &[Vec<f64>; CONSTRAINTS]) -> Result<BlockFactor<'_>> {
        let n = self.disc.len();
        let mut state_diag = vec![0.0; n];
        let mut control_diag = vec![0.0; n];
        for i in 0..n {
            let dk = |k: usize| st.z[k][i] / g[k][i];
            let (d1, d2, d3, d4, d5, d6) = (dk(0), dk(1), dk(2), dk(3), dk(4), dk(5));
            let hu = self.alpha + d1 + d2 + 4.0 * d3 * d4 / (d3 + d4);
            state_diag[i] = 1.0 + d6 * (self.rho + d5) / (self.rho + d5 + d6);
            control_diag[i] = 1.0 / hu;
        }
        BlockFactor::new(self.disc, &state_diag, &control_diag)
    }

    /// Newton direction for complementarity residuals `rc`.
    fn direction(
        &self,
        factor: &BlockFactor<'_>,
        st: &State,
        g: &[Vec<f64>; CONSTRAINTS],
        r: &[Vec<f64>; 5],
        rc: &[Vec<f64>; CONSTRAINTS],
    ) -> Result<Step> {
        let d = self.disc;
        let n = d.len();
        let mut b = vec![0.0; 2 * n];
        let mut gu = vec![0.0; n];
        let mut hu = vec![0.0; n];
        let mut ct = vec![0.0; n];
        let mut cs = vec![0.0; n];
        let mut hs = vec![0.0; n];
        let dk = |k: usize, i: usize| st.z[k][i] / g[k][i];
        let ak = |k: usize, i: usize| rc[k][i] / g[k][i];
        for i in 0..n {
            let (d1, d2, d3, d4, d5, d6) = (dk(0, i), dk(1, i), dk(2, i), dk(3, i), dk(4, i), dk(5, i));
            let (a1, a2, a3, a4, a5, a6) = (ak(0, i), ak(1, i), ak(2, i), ak(3, i), ak(4, i), ak(5, i));
            ct[i] = (-r[2][i] - a3 - a4) / (d3 + d4);
            hu[i] = self.alpha + d1 + d2 + 4.0 * d3 * d4 / (d3 + d4);
            gu[i] = -r[1][i] - a1 + a2 + a3 - a4 - (d4 - d3) * ct[i];
            hs[i] = self.rho + d5 + d6;
            cs[i] = (-r[3][i] - a5 - a6) / hs[i];
            b[2 * i] = -r[0][i] + a6 + d6 * cs[i];
            b[2 * i + 1] = -r[4][i] + gu[i] / hu[i];
        }
        let (x, _) = factor.solve(&b, d.op.tol_lin())?;

        let mut step = Step {
            u: vec![0.0; n],
            t: vec![0.0; n],
            s: vec![0.0; n],
            y: vec![0.0; n],
            p: vec![0.0; n],
            z: Default::default(),
            g: Default::default(),
        };
        for k in 0..CONSTRAINTS {
            step.z[k] = vec![0.0; n];
            step.g[k] = vec![0.0; n];
        }
        for i in 0..n {
            let (dy, dp) = (x[2 * i], x[2 * i + 1]);
            let du = (gu[i] - dp) / hu[i];
            let (d3, d4, d6) = (dk(2, i), dk(3, i), dk(5, i));
            let dt = ct[i] - (d4 - d3) / (d3 + d4) * du;
            let ds = cs[i] + d6 / hs[i] * dy;
            step.y[i] = dy;
            step.p[i] = dp;
            step.u[i] = du;
            step.t[i] = dt;
            step.s[i] = ds;
            let dg = [du, -du, dt - du, dt + du, ds, ds - dy];
            for k in 0..CONSTRAINTS {
                step.g[k][i] = dg[k];
                step.z[k][i] = -ak(k, i) - dk(k, i) * dg[k];
            }
        }
        Ok(step)
    }
}

fn max_step(v: &[Vec<f64>; CONSTRAINTS], dv: &[Vec<f64>; CONSTRAINTS]) -> f64 {
    let mut t = 1.0_f64;
    for k in 0..CONSTRAINTS {
        for (x, dx) in v[k].iter().zip(&dv[k]) {
            if *dx < 0.0 {
                t = t.min(-x / dx);
            }
        }
    }
    t
}

fn mean_gap(z: &[Vec<f64>; CONSTRAINTS], g: &[Vec<f64>; CONSTRAINTS]) -> f64 {
    let mut sum = 0.0;
    let mut count = 0;
    for k in 0..CONSTRAINTS {
        for (a, b) in z[k].iter().zip(&g[k]) {
            sum += a * b;
            count += 1;
        }
    }
    sum / count as f64
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

/// Interior-point solve of the subproblem started near `start`.
pub fn interior_point_solve(
    disc: &Discretization,
    alpha: f64,
    rho: f64,
    mu: &[f64],
    start: &[f64],
    max_iterations: usize,
) -> Result<InteriorOutcome> {
    disc.require_positive_beta()?;
    disc.grid.check(start)?;
    disc.grid.check(mu)?;
    let n = disc.len();
    if (0..n).any(|i| disc.upper[i] <= disc.lower[i]) {
        return Err(Error::InvalidProblem("the control box has empty interior".into()));
    }
    let prob = Problem { disc, alpha, rho, shift: (0..n).map(|i| disc.obstacle[i] - mu[i] / rho).collect() };

    let u: Vec<f64> = (0..n)
        .map(|i| {
            let margin = 0.05 * (disc.upper[i] - disc.lower[i]);
            start[i].clamp(disc.lower[i] + margin, disc.upper[i] - margin)
        })
        .collect();
    let y = disc.state(&u)?.into_inner();
    let t: Vec<f64> = u.iter().map(|v| v.abs() + 1.0).collect();
    let s: Vec<f64> = (0..n).map(|i| (y[i] - prob.shift[i]).max(0.0) + 1.0).collect();
    let z: [Vec<f64>; CONSTRAINTS] = std::array::from_fn(|k| {
        let v = if k == 2 || k == 3 { 0.5 * disc.beta } else { 1.0 };
        vec![v; n]
    });
    let rhs: Vec<f64> = (0..n).map(|i| y[i] - disc.target[i] + z[5][i]).collect();
    let p = disc.op.solve_adjoint(&rhs)?.into_inner();
    let mut st = State { u, t, s, y, p, z };

    let a_norm = disc.op.norm_inf();
    let mut iterations = 0;
    let mut converged = false;
    let mut gap;
    loop {
        let g = prob.slacks(&st);
        let r = prob.residuals(&st);
        gap = mean_gap(&st.z, &g);
        let scale_y = a_norm * max_abs(&st.p) + max_abs(&st.y) + max_abs(&disc.target) + max_abs(&st.z[5]);
        let scale_e = a_norm * max_abs(&st.y) + max_abs(&st.u) + max_abs(&disc.source);
        let scale_u = max_abs(&st.p) + alpha * max_abs(&st.u) + disc.beta;
        let scale_s = rho * max_abs(&st.s) + max_abs(&st.z[5]) + max_abs(&st.z[4]);
        let primal = max_abs(&r[4]) / scale_e.max(1.0);
        let dual = (max_abs(&r[0]) / scale_y.max(1.0))
            .max(max_abs(&r[1]) / scale_u.max(1.0))
            .max(max_abs(&r[2]) / disc.beta.max(1.0))
            .max(max_abs(&r[3]) / scale_s.max(1.0));
        if primal <= PRIMAL_TOL && dual <= DUAL_TOL && gap <= GAP_TOL {
            converged = true;
            break;
        }
        // slacks that round to zero leave no room for another interior step
        let exhausted = g.iter().any(|v| v.iter().any(|&x| x <= 0.0));
        if exhausted || iterations >= max_iterations {
            break;
        }
        iterations += 1;

        let rc_aff: [Vec<f64>; CONSTRAINTS] =
            std::array::from_fn(|k| st.z[k].iter().zip(&g[k]).map(|(a, b)| a * b).collect());
        let factor = prob.newton_matrix(&st, &g)?;
        let aff = prob.direction(&factor, &st, &g, &r, &rc_aff)?;
        let t_aff = max_step(&g, &aff.g).min(max_step(&st.z, &aff.z));
        let z_aff: [Vec<f64>; CONSTRAINTS] =
            std::array::from_fn(|k| st.z[k].iter().zip(&aff.z[k]).map(|(a, b)| a + t_aff * b).collect());
        let g_aff: [Vec<f64>; CONSTRAINTS] =
            std::array::from_fn(|k| g[k].iter().zip(&aff.g[k]).map(|(a, b)| a + t_aff * b).collect());
        let sigma = (mean_gap(&z_aff, &g_aff) / gap).powi(3).min(1.0);

        let rc: [Vec<f64>; CONSTRAINTS] = std::array::from_fn(|k| {
            (0..n).map(|i| st.z[k][i] * g[k][i] + aff.z[k][i] * aff.g[k][i] - sigma * gap).collect()
        });
        let dir = prob.direction(&factor, &st, &g, &r, &rc)?;
        let step = (STEP_FRACTION * max_step(&g, &dir.g).min(max_step(&st.z, &dir.z))).min(1.0);
        for i in 0..n {
            st.u[i] += step * dir.u[i];
            st.t[i] += step * dir.t[i];
            st.s[i] += step * dir.s[i];
            st.y[i] += step * dir.y[i];
            st.p[i] += step * dir.p[i];
        }
        for k in 0..CONSTRAINTS {
            for i in 0..n {
                st.z[k][i] += step * dir.z[k][i];
            }
        }
    }
    let mu_out = GridFunction(st.z[5].clone());
    Ok(InteriorOutcome {
        u: GridFunction(st.u),
        y: GridFunction(st.y),
        p: GridFunction(st.p),
        mu: mu_out,
        iterations,
        gap,
        converged,
    })
}
