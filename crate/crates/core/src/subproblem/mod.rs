//! The augmented Lagrange subproblem
//!
//! ```text
//!   min  ½‖y − y_d‖² + β‖u‖₁ + α/2 ‖u‖² + P(y, ρ, μ)   s.t.  y = S u,  u_a ≤ u ≤ u_b
//! ```
//!
//! solved by a primal-dual active-set method. When that method cycles, an
//! interior-point solve of an equivalent quadratic program takes over and
//! the active-set method is restarted from its solution; a
//! proximal-gradient iteration provides the initial warm start.

mod inner;
mod interior;
mod kkt;
mod prox;
mod sets;

pub use inner::{active_set_solve, inner_solve, SubproblemMethod, SubproblemResult, MAX_INNER_ITERATIONS};
pub use interior::{interior_point_solve, InteriorOutcome, INTERIOR_MAX_ITERATIONS};
pub(crate) use kkt::SchurPattern;
pub use kkt::{solve_kkt_on_sets, KktSolution};
pub use prox::{prox_gradient_globalize, prox_l1_box, ProxOutcome, GLOBALIZATION_MAX_ITERATIONS, GLOBALIZATION_TOL};
pub use sets::{classify_sets, ActiveSets, ControlSet};

use serde::Serialize;

use crate::discrete::Discretization;
use crate::pde::{Grid, GridFunction};

/// Control, state, adjoint, multiplier and subgradient of one solution.
#[derive(Clone, Debug, PartialEq, Serialize)]
pub struct Iterate {
    pub u: GridFunction,
    pub y: GridFunction,
    pub p: GridFunction,
    pub mu: GridFunction,
    pub lambda: GridFunction,
}

/// Shifted penalty `P(y, ρ, μ) = 1/(2ρ) ∫ ((μ + ρ(y − ψ))₊)² − μ²`.
pub fn penalty_value(grid: &Grid, y: &[f64], rho: f64, mu: &[f64], psi: &[f64]) -> f64 {
    let sum: f64 = y
        .iter()
        .zip(mu.iter().zip(psi))
        .map(|(&y, (&m, &psi))| {
            let t = (m + rho * (y - psi)).max(0.0);
            t * t - m * m
        })
        .sum();
    grid.weight() * sum / (2.0 * rho)
}

/// `J_ρ^α(y, u, μ)` evaluated with the grid quadrature.
pub fn objective(disc: &Discretization, u: &[f64], y: &[f64], alpha: f64, rho: f64, mu: &[f64]) -> f64 {
    let g = &disc.grid;
    let misfit: Vec<f64> = y.iter().zip(disc.target.iter()).map(|(a, b)| a - b).collect();
    0.5 * g.inner(&misfit, &misfit)
        + disc.beta * g.norm_l1(u)
        + 0.5 * alpha * g.inner(u, u)
        + penalty_value(g, y, rho, mu, &disc.obstacle)
}
