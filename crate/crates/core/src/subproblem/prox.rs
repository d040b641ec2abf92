use super::objective;
use crate::discrete::Discretization;
use crate::error::Result;
use crate::pde::GridFunction;

/// Iteration cap used by the outer driver when the active-set method stalls.
pub const GLOBALIZATION_MAX_ITERATIONS: usize = 20_000;
/// Fixed-point tolerance for globalization, multiplied by `α`.
pub const GLOBALIZATION_TOL: f64 = 1e-10;

const SUFFICIENT_DECREASE: f64 = 1e-4;
const MAX_BACKTRACKS: usize = 60;

/// Proximal map of `s (β‖·‖₁ + I_[u_a, u_b])`: soft-threshold by `sβ`, then clip.
pub fn prox_l1_box(v: f64, threshold: f64, lower: f64, upper: f64) -> f64 {
    let soft = if v > threshold {
        v - threshold
    } else if v < -threshold {
        v + threshold
    } else {
        0.0
    };
    soft.clamp(lower, upper)
}

#[derive(Clone, Debug)]
pub struct ProxOutcome {
    pub u: GridFunction,
    pub y: GridFunction,
    pub p: GridFunction,
    pub objective: f64,
    /// `‖u − prox(u − s∇F(u))‖_h` at the last step size.
    pub residual: f64,
    pub step: f64,
    pub iterations: usize,
}

struct Point {
    u: GridFunction,
    y: GridFunction,
    p: GridFunction,
    value: f64,
}

pub(super) fn adjoint_at(disc: &Discretization, y: &[f64], rho: f64, mu: &[f64]) -> Result<GridFunction> {
    let rhs: Vec<f64> = (0..disc.len())
        .map(|i| {
            let m = (mu[i] + rho * (y[i] - disc.obstacle[i])).max(0.0);
            y[i] - disc.target[i] + m
        })
        .collect();
    disc.op.solve_adjoint(&rhs)
}

fn evaluate(disc: &Discretization, u: GridFunction, alpha: f64, rho: f64, mu: &[f64]) -> Result<Point> {
    let y = disc.state(&u)?;
    let value = objective(disc, &u, &y, alpha, rho, mu);
    let p = adjoint_at(disc, &y, rho, mu)?;
    Ok(Point { u, y, p, value })
}

/// Proximal-gradient iteration on the subproblem objective.
///
/// The smooth part (tracking, Tikhonov and penalty terms) has gradient
/// `p + αu`; the nonsmooth part `β‖u‖₁ + I_[u_a,u_b]` is handled by its
/// proximal map. Steps are halved until `J(u⁺) ≤ J(u) − c/s ‖u⁺ − u‖²`, so
/// accepted iterates never increase the objective.
pub fn prox_gradient_globalize(
    disc: &Discretization,
    alpha: f64,
    rho: f64,
    mu: &[f64],
    start: &[f64],
    max_iterations: usize,
    tol: f64,
) -> Result<ProxOutcome> {
    disc.grid.check(start)?;
    let grid = &disc.grid;
    let mut cur = evaluate(disc, disc.project_box(start), alpha, rho, mu)?;

    // Lipschitz bound of the smooth gradient: ‖A⁻¹‖²(1 + ρ [penalty active]) + α
    let active = (0..disc.len()).any(|i| mu[i] + rho * (cur.y[i] - disc.obstacle[i]) > 0.0);
    let inv = 1.0 / disc.op.lambda_min();
    let mut step = 1.0 / (alpha + inv * inv * (1.0 + if active { rho } else { 0.0 }));

    let mut residual = f64::INFINITY;
    let mut iterations = 0;
    while iterations < max_iterations {
        let mut accepted = None;
        for _ in 0..MAX_BACKTRACKS {
            let cand: Vec<f64> = (0..disc.len())
                .map(|i| {
                    let g = cur.p[i] + alpha * cur.u[i];
                    prox_l1_box(cur.u[i] - step * g, step * disc.beta, disc.lower[i], disc.upper[i])
                })
                .collect();
            let diff: Vec<f64> = cand.iter().zip(cur.u.iter()).map(|(a, b)| a - b).collect();
            residual = grid.norm_l2(&diff);
            if residual <= tol {
                break;
            }
            let y = disc.state(&cand)?;
            let value = objective(disc, &cand, &y, alpha, rho, mu);
            if value <= cur.value - SUFFICIENT_DECREASE / step * residual * residual {
                accepted = Some((GridFunction(cand), y, value));
                break;
            }
            step *= 0.5;
        }
        let Some((u, y, value)) = accepted else { break };
        let p = adjoint_at(disc, &y, rho, mu)?;
        cur = Point { u, y, p, value };
        iterations += 1;
    }
    Ok(ProxOutcome { u: cur.u, y: cur.y, p: cur.p, objective: cur.value, residual, step, iterations })
}
