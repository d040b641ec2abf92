mod common;

use auglag_core::diagnostics::kkt_report;
use auglag_core::problems::{self, ExactFields};
use auglag_core::subproblem::{objective, Iterate};
use auglag_core::{Discretization, ProblemSpec};
use common::*;

fn exact_on(spec: &ProblemSpec, cells: usize) -> (Discretization, ExactFields) {
    let d = Discretization::new(spec, spec.domain.grid(cells).unwrap()).unwrap();
    let ex = problems::eval_exact(spec, &d.grid).unwrap();
    (d, ex)
}

/// Max-norm errors of discrete state and adjoint solves driven by the exact data.
fn solve_errors(d: &Discretization, ex: &ExactFields) -> (f64, f64) {
    let y = d.op.solve_state(&ex.control, &d.source).unwrap();
    let rhs: Vec<f64> = (0..d.len()).map(|i| ex.state[i] - d.target[i] + ex.multiplier[i]).collect();
    let p = d.op.solve_adjoint(&rhs).unwrap();
    (max_abs_diff(&y, &ex.state), max_abs_diff(&p, &ex.adjoint))
}

#[test]
fn example1_bundle_is_second_order_consistent() {
    let spec = problems::example1();
    let res: Vec<(f64, f64)> = [128, 256, 512]
        .iter()
        .map(|&c| {
            let (d, ex) = exact_on(&spec, c);
            solve_errors(&d, &ex)
        })
        .collect();
    for w in res.windows(2) {
        assert!((w[0].0 / w[1].0).log2() > 1.8, "state {res:?}");
        assert!((w[0].1 / w[1].1).log2() > 1.8, "adjoint {res:?}");
    }
}

#[test]
fn example1_projection_identity_away_from_switching_points() {
    let spec = problems::example1();
    let (d, ex) = exact_on(&spec, 1024);
    let h = d.grid.h();
    let mut checked = 0;
    for i in 0..d.len() {
        let p = ex.adjoint[i];
        if (p.abs() - d.beta).abs() <= 10.0 * h {
            continue;
        }
        let lambda = (-p / d.beta).clamp(-1.0, 1.0);
        let projected = (ex.control[i] - (p + d.beta * lambda)).clamp(d.lower[i], d.upper[i]);
        assert_eq!(projected, ex.control[i], "node {i}");
        checked += 1;
    }
    assert!(checked > d.len() * 9 / 10);
}

#[test]
fn example1_multiplier_lives_on_the_contact_set() {
    let spec = problems::example1();
    let (d, ex) = exact_on(&spec, 2048);
    for i in 0..d.len() {
        let x = d.grid.point(i)[0];
        assert!(ex.multiplier[i] >= 0.0);
        assert!(ex.state[i] <= d.obstacle[i] + 1e-14);
        if ex.multiplier[i] > 0.0 {
            assert!((ex.state[i] - d.obstacle[i]).abs() < 1e-14, "x = {x}");
            assert!(x.abs() < 0.75);
        }
    }
    let z = d.grid.zeros();
    let it = Iterate {
        u: ex.control.clone(),
        y: ex.state.clone(),
        p: ex.adjoint.clone(),
        mu: ex.multiplier.clone(),
        lambda: z,
    };
    let r = kkt_report(&d, &it, 1.0);
    assert!(r.complementarity < 1e-14);
    assert!(r.feasibility < 1e-14);
}

#[test]
fn example1_objective_matches_independent_quadrature() {
    let spec = problems::example1();
    let (d, ex) = exact_on(&spec, 4096);
    let (alpha, rho) = (1e-4, 1e2);
    let got = objective(&d, &ex.control, &ex.state, alpha, rho, &ex.multiplier);
    let w = d.grid.weight();
    let mut terms: Vec<f64> = (0..d.len())
        .map(|i| {
            let (u, y, m) = (ex.control[i], ex.state[i], ex.multiplier[i]);
            let pen = ((m + rho * (y - d.obstacle[i])).max(0.0).powi(2) - m * m) / (2.0 * rho);
            w * (0.5 * (y - d.target[i]).powi(2) + d.beta * u.abs() + 0.5 * alpha * u * u + pen)
        })
        .collect();
    terms.sort_by(|a, b| a.abs().total_cmp(&b.abs()));
    let want: f64 = terms.iter().sum();
    assert!((got - want).abs() <= 1e-8 * want.abs(), "{got} vs {want}");
}

#[test]
fn example2_rect_bundle_is_consistent() {
    let spec = problems::example2_rect(0.0);
    let res: Vec<(f64, f64)> = [32, 64, 128]
        .iter()
        .map(|&c| {
            let (d, ex) = exact_on(&spec, c);
            solve_errors(&d, &ex)
        })
        .collect();
    for w in res.windows(2) {
        assert!((w[0].0 / w[1].0).log2() > 1.5, "state {res:?}");
        assert!((w[0].1 / w[1].1).log2() > 1.5, "adjoint {res:?}");
    }
}

#[test]
fn every_named_problem_discretizes() {
    for name in problems::PROBLEM_NAMES {
        let spec = problems::by_name(name, None).unwrap();
        let d = Discretization::new(&spec, spec.domain.grid(8).unwrap()).unwrap();
        assert!(d.beta > 0.0, "{name}");
        assert!(d.lower.iter().all(|&a| a <= 0.0));
        assert!(d.upper.iter().all(|&b| b >= 0.0));
    }
}
