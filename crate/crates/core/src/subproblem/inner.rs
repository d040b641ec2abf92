use std::collections::hash_map::DefaultHasher;
use std::collections::HashSet;
use std::hash::{Hash, Hasher};

use super::interior::{interior_point_solve, InteriorOutcome, INTERIOR_MAX_ITERATIONS};
use super::kkt::solve_kkt_on_sets;
use super::sets::classify_sets;
use super::sets::ActiveSets;
use super::Iterate;
use crate::discrete::Discretization;
use crate::error::Result;
use crate::pde::GridFunction;

/// Default cap on active-set iterations per subproblem.
pub const MAX_INNER_ITERATIONS: usize = 50;

/// How a subproblem solution was obtained.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SubproblemMethod {
    ActiveSet,
    InteriorPoint,
}

#[derive(Clone, Debug)]
pub struct SubproblemResult {
    pub iterate: Iterate,
    pub xi: GridFunction,
    pub inner_iterations: usize,
    pub converged: bool,
    /// Set when the active-set method revisited an earlier configuration.
    pub cycled: bool,
    pub sets: ActiveSets,
    pub method: SubproblemMethod,
    /// Set when the interior-point fallback was needed.
    pub globalized: bool,
}

fn fingerprint(sets: &ActiveSets) -> u64 {
    let mut h = DefaultHasher::new();
    sets.hash(&mut h);
    h.finish()
}

fn positive_part_update(disc: &Discretization, y: &[f64], rho: f64, mu: &[f64]) -> GridFunction {
    GridFunction(
        y.iter()
            .zip(mu.iter().zip(disc.obstacle.iter()))
            .map(|(&y, (&m, &psi))| (m + rho * (y - psi)).max(0.0))
            .collect(),
    )
}

/// Primal-dual active-set iteration for the augmented Lagrange subproblem
/// with fixed `α`, `ρ` and shift `μ`, without any fallback.
///
/// Starting from `(u, p)`, sets are classified, the linear system is solved
/// on them, and the loop stops once all sets reproduce themselves. A
/// revisited configuration ends the loop early as not converged. The
/// returned `iterate.mu` is the updated multiplier `(μ + ρ(y − ψ))₊` and
/// `iterate.lambda = P_[−1,1](ξ/β)`.
pub fn active_set_solve(
    disc: &Discretization,
    alpha: f64,
    rho: f64,
    mu: &[f64],
    start_u: &[f64],
    start_p: &[f64],
    max_iterations: usize,
) -> Result<SubproblemResult> {
    disc.require_positive_beta()?;
    disc.grid.check(start_u)?;
    disc.grid.check(start_p)?;
    disc.grid.check(mu)?;
    let y0 = disc.state(start_u)?;
    let mut sets = classify_sets(disc, start_p, &y0, mu, alpha, rho);
    let mut seen = HashSet::from([fingerprint(&sets)]);
    let mut iterations = 0;
    loop {
        let sol = solve_kkt_on_sets(disc, &sets, alpha, rho, mu)?;
        iterations += 1;
        let next = classify_sets(disc, &sol.p, &sol.y, mu, alpha, rho);
        let converged = next == sets;
        let cycled = !converged && !seen.insert(fingerprint(&next));
        if converged || cycled || iterations >= max_iterations {
            let lambda = sol.xi.map(|x| (x / disc.beta).clamp(-1.0, 1.0));
            let mu_out = positive_part_update(disc, &sol.y, rho, mu);
            return Ok(SubproblemResult {
                iterate: Iterate { u: sol.u, y: sol.y, p: sol.p, mu: mu_out, lambda },
                xi: sol.xi,
                inner_iterations: iterations,
                converged,
                cycled,
                sets: next,
                method: SubproblemMethod::ActiveSet,
                globalized: false,
            });
        }
        sets = next;
    }
}

impl SubproblemResult {
    /// Wraps an interior-point solution: `ξ = −p − αu`, `λ = P_[−1,1](ξ/β)`.
    pub fn from_interior(disc: &Discretization, alpha: f64, rho: f64, mu: &[f64], ip: InteriorOutcome) -> Self {
        let xi = GridFunction((0..disc.len()).map(|i| -ip.p[i] - alpha * ip.u[i]).collect());
        let lambda = xi.map(|x| (x / disc.beta).clamp(-1.0, 1.0));
        let mu_out = positive_part_update(disc, &ip.y, rho, mu);
        let sets = classify_sets(disc, &ip.p, &ip.y, mu, alpha, rho);
        SubproblemResult {
            iterate: Iterate { u: ip.u, y: ip.y, p: ip.p, mu: mu_out, lambda },
            xi,
            inner_iterations: ip.iterations,
            converged: ip.converged,
            cycled: false,
            sets,
            method: SubproblemMethod::InteriorPoint,
            globalized: true,
        }
    }
}

/// Solves the subproblem: active-set iteration from `(start_u, start_p)`;
/// if it does not settle, an interior-point solve followed by one more
/// active-set run from its solution. When that last run does not settle
/// either, the interior-point solution is returned. `inner_iterations`
/// counts active-set iterations of both runs.
pub fn inner_solve(
    disc: &Discretization,
    alpha: f64,
    rho: f64,
    mu: &[f64],
    start_u: &[f64],
    start_p: &[f64],
    max_iterations: usize,
) -> Result<SubproblemResult> {
    let first = active_set_solve(disc, alpha, rho, mu, start_u, start_p, max_iterations)?;
    if first.converged {
        return Ok(first);
    }
    let ip = match interior_point_solve(disc, alpha, rho, mu, start_u, INTERIOR_MAX_ITERATIONS) {
        Ok(ip) if ip.converged => ip,
        _ => return Ok(SubproblemResult { globalized: true, ..first }),
    };
    let second = active_set_solve(disc, alpha, rho, mu, &ip.u, &ip.p, max_iterations)?;
    let inner_iterations = first.inner_iterations + second.inner_iterations;
    let result = if second.converged {
        SubproblemResult { globalized: true, ..second }
    } else {
        SubproblemResult::from_interior(disc, alpha, rho, mu, ip)
    };
    Ok(SubproblemResult { inner_iterations, ..result })
}
