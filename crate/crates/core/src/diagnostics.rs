//! Residuals of the optimality system, errors against exact solutions and
//! sparsity statistics.

use serde::{Deserialize, Serialize};

use crate::discrete::Discretization;
use crate::pde::{backward_error, GridFunction};
use crate::problems::ExactFields;
use crate::subproblem::Iterate;

/// Default threshold below which a control value counts as zero (or at a bound).
pub const U_TOL: f64 = 1e-8;

#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct KktReport {
    /// Normwise backward error of `A y = u + f`.
    pub state_residual: f64,
    /// Normwise backward error of `A p = y − y_d + μ`.
    pub adjoint_residual: f64,
    /// `‖u − P_[u_a,u_b](u − (p + αu + βλ))‖_h`.
    pub projection_residual: f64,
    /// `max dist(λ, [−1, 1])`.
    pub lambda_violation: f64,
    /// `|(μ, y − ψ)_h|`.
    pub complementarity: f64,
    /// `max (y − ψ)₊`.
    pub feasibility: f64,
    /// Fraction of the domain where `|u| ≤ U_TOL`.
    pub sparsity_fraction: f64,
}

fn max_abs(v: &[f64]) -> f64 {
    v.iter().fold(0.0, |m, x| m.max(x.abs()))
}

pub fn kkt_report(disc: &Discretization, it: &Iterate, alpha: f64) -> KktReport {
    let grid = &disc.grid;
    let n = disc.len();
    let a_norm = disc.op.norm_inf();

    let ay = disc.op.apply(&it.y);
    let rhs_state: Vec<f64> = (0..n).map(|i| it.u[i] + disc.source[i]).collect();
    let r: Vec<f64> = (0..n).map(|i| rhs_state[i] - ay[i]).collect();
    let state_residual = backward_error(&r, a_norm, &it.y, &rhs_state);

    let ap = disc.op.apply(&it.p);
    let r: Vec<f64> = (0..n).map(|i| it.y[i] - disc.target[i] + it.mu[i] - ap[i]).collect();
    let scale = a_norm * max_abs(&it.p) + max_abs(&it.y) + max_abs(&disc.target) + max_abs(&it.mu);
    let adjoint_residual = if scale > 0.0 { max_abs(&r) / scale } else { max_abs(&r) };

    let step: Vec<f64> = (0..n).map(|i| it.u[i] - (it.p[i] + alpha * it.u[i] + disc.beta * it.lambda[i])).collect();
    let projected = disc.project_box(&step);
    let diff: Vec<f64> = it.u.iter().zip(projected.iter()).map(|(a, b)| a - b).collect();

    let gap: Vec<f64> = it.y.iter().zip(disc.obstacle.iter()).map(|(y, psi)| y - psi).collect();
    KktReport {
        state_residual,
        adjoint_residual,
        projection_residual: grid.norm_l2(&diff),
        lambda_violation: it.lambda.iter().fold(0.0, |m, l| m.max(l.abs() - 1.0)),
        complementarity: grid.inner(&it.mu, &gap).abs(),
        feasibility: gap.iter().fold(0.0, |m, &g| m.max(g)),
        sparsity_fraction: sparsity_profile(&it.u, &disc.lower, &disc.upper, U_TOL).fraction_zero,
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExactErrors {
    pub err_u_l2: f64,
    pub err_y_l2: f64,
    /// `‖y − ȳ‖² / α`, when `α` is supplied.
    pub err_y_over_alpha: Option<f64>,
}

pub fn error_vs_exact(
    disc: &Discretization,
    u: &[f64],
    y: &[f64],
    exact: &ExactFields,
    alpha: Option<f64>,
) -> ExactErrors {
    let g = &disc.grid;
    let du: Vec<f64> = u.iter().zip(exact.control.iter()).map(|(a, b)| a - b).collect();
    let dy: Vec<f64> = y.iter().zip(exact.state.iter()).map(|(a, b)| a - b).collect();
    let err_y_l2 = g.norm_l2(&dy);
    ExactErrors { err_u_l2: g.norm_l2(&du), err_y_l2, err_y_over_alpha: alpha.map(|a| err_y_l2 * err_y_l2 / a) }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SparsityProfile {
    pub fraction_zero: f64,
    pub fraction_lower: f64,
    pub fraction_upper: f64,
}

pub fn sparsity_profile(u: &[f64], lower: &[f64], upper: &[f64], u_tol: f64) -> SparsityProfile {
    let n = u.len().max(1) as f64;
    let count = |pred: &dyn Fn(usize) -> bool| (0..u.len()).filter(|&i| pred(i)).count() as f64 / n;
    SparsityProfile {
        fraction_zero: count(&|i| u[i].abs() <= u_tol),
        fraction_lower: count(&|i| u[i] <= lower[i] + u_tol),
        fraction_upper: count(&|i| u[i] >= upper[i] - u_tol),
    }
}

/// Fraction of nodes whose value lies within `tol` of one of `levels`.
pub fn fraction_near(u: &GridFunction, levels: &[f64], tol: f64) -> f64 {
    let hits = u.iter().filter(|&&v| levels.iter().any(|l| (v - l).abs() <= tol)).count();
    hits as f64 / u.len().max(1) as f64
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::problems::{self, Domain, ProblemSpec};

    fn zero_problem() -> Discretization {
        let dom = Domain::Interval { lower: 0.0, upper: 1.0 };
        let spec = ProblemSpec::constant("zero", dom, -1.0, 1.0, 1.0, 0.0, 0.0, 0.0);
        Discretization::new(&spec, dom.grid(16).unwrap()).unwrap()
    }

    fn zero_iterate(d: &Discretization) -> Iterate {
        let z = d.grid.zeros();
        Iterate { u: z.clone(), y: z.clone(), p: z.clone(), mu: z.clone(), lambda: z }
    }

    #[test]
    fn zero_problem_has_zero_residuals() {
        let d = zero_problem();
        let r = kkt_report(&d, &zero_iterate(&d), 0.5);
        assert_eq!(r.state_residual, 0.0);
        assert_eq!(r.adjoint_residual, 0.0);
        assert_eq!(r.projection_residual, 0.0);
        assert_eq!(r.lambda_violation, 0.0);
        assert_eq!(r.complementarity, 0.0);
        assert_eq!(r.feasibility, 0.0);
        assert_eq!(r.sparsity_fraction, 1.0);
    }

    #[test]
    fn lambda_out_of_range() {
        let d = zero_problem();
        let mut it = zero_iterate(&d);
        it.lambda[3] = 2.0;
        assert_eq!(kkt_report(&d, &it, 0.5).lambda_violation, 1.0);
    }

    #[test]
    fn errors_against_exact() {
        let spec = problems::example1();
        let d = Discretization::new(&spec, spec.domain.grid(64).unwrap()).unwrap();
        let ex = problems::eval_exact(&spec, &d.grid).unwrap();
        let e = error_vs_exact(&d, &ex.control, &ex.state, &ex, Some(0.1));
        assert_eq!(e.err_u_l2, 0.0);
        assert_eq!(e.err_y_l2, 0.0);
        assert_eq!(e.err_y_over_alpha, Some(0.0));
    }

    #[test]
    fn unit_perturbation_on_unit_domain() {
        let d = zero_problem();
        let z = d.grid.zeros();
        let ex = ExactFields { control: z.clone(), state: z.clone(), adjoint: z.clone(), multiplier: z };
        let one = d.grid.constant(1.0);
        let e = error_vs_exact(&d, &one, &ex.state, &ex, None);
        assert!((e.err_u_l2 - 1.0).abs() < 1e-14);
        assert_eq!(e.err_y_over_alpha, None);
    }

    #[test]
    fn sparsity_of_simple_controls() {
        let lo = vec![-1.0; 4];
        let hi = vec![1.0; 4];
        let s = sparsity_profile(&[0.0; 4], &lo, &hi, U_TOL);
        assert_eq!(s.fraction_zero, 1.0);
        let s = sparsity_profile(&[1.0; 4], &lo, &hi, U_TOL);
        assert_eq!(s.fraction_upper, 1.0);
        assert_eq!(s.fraction_zero, 0.0);
        let s = sparsity_profile(&[-1.0, 0.0, 0.5, 1.0], &lo, &hi, U_TOL);
        assert_eq!((s.fraction_lower, s.fraction_zero, s.fraction_upper), (0.25, 0.25, 0.25));
    }

    #[test]
    fn example1_exact_control_is_one_third_sparse() {
        // off-set: [−1,−8/9] ∪ [−4/9,−2/9] ∪ [2/9,4/9] ∪ [8/9,1], total length 2/3 of 2
        let spec = problems::example1();
        let g = spec.domain.grid(4096).unwrap();
        let ex = problems::eval_exact(&spec, &g).unwrap();
        let s = sparsity_profile(&ex.control, &vec![-1.0; g.len()], &vec![1.0; g.len()], U_TOL);
        assert!((s.fraction_zero - 1.0 / 3.0).abs() < 1e-3, "{}", s.fraction_zero);
        assert_eq!(fraction_near(&ex.control, &[-1.0, 0.0, 1.0], 0.0), 1.0);
    }
}
