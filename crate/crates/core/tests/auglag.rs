mod common;

use auglag_core::auglag::{run, OuterLog, SolverParams, StepClass};
use auglag_core::problems;
use auglag_core::Discretization;
use common::*;

fn disc(name: &str, cells: usize) -> Discretization {
    let spec = problems::by_name(name, None).unwrap();
    Discretization::new(&spec, spec.domain.grid(cells).unwrap()).unwrap()
}

fn check_log_invariants(log: &OuterLog, p: &SolverParams) {
    let mut last_r = p.r0_plus;
    let mut successes = 0;
    for (i, r) in log.records.iter().enumerate() {
        assert_eq!(r.k, i + 1);
        assert!(r.r >= 0.0 && r.feas >= 0.0 && r.compl >= 0.0);
        if r.step_class == StepClass::Successful {
            assert!(r.r <= p.tau * last_r);
            last_r = r.r;
            successes += 1;
        }
        assert_eq!(r.n, successes);
    }
    for w in log.records.windows(2) {
        let (a, b) = (&w[0], &w[1]);
        if a.step_class.advances() {
            assert_eq!(b.alpha, a.alpha * p.omega);
            assert_eq!(b.rho, a.rho);
        } else {
            assert_eq!(b.alpha, a.alpha);
            assert_eq!(b.rho, a.rho * p.theta);
        }
    }
}

#[test]
fn sanity_run_matches_prox_oracle() {
    let d = disc("tikhonov_sanity", 16);
    let p = SolverParams::default();
    let out = run(&d, &p, None).unwrap();
    assert!(out.converged);
    assert!(out.log.records.iter().all(|r| r.rho == p.rho1));
    assert!(out.result.iterate.mu.iter().all(|&m| m == 0.0));
    check_log_invariants(&out.log, &p);

    let oracle = DenseProblem::from_disc(&d).solve(out.alpha, out.rho, &vec![0.0; d.len()], 1e-12, 2_000_000);
    assert!(oracle.residual <= 1e-12, "oracle residual {}", oracle.residual);
    let diff: Vec<f64> = (0..d.len()).map(|i| out.result.iterate.u[i] - oracle.u[i]).collect();
    assert!(d.grid.norm_l2(&diff) <= 1e-6, "{}", d.grid.norm_l2(&diff));
}

#[test]
fn example1_coarse_run_respects_invariants() {
    let d = disc("example1", 256);
    let p = SolverParams::default();
    let out = run(&d, &p, None).unwrap();
    assert!(out.converged);
    check_log_invariants(&out.log, &p);
    assert!(out.stop_residual <= p.eps);
    assert!(out.kkt.feasibility <= 1e-6);
    assert!(out.kkt.complementarity <= 1e-6);
    assert!(out.result.iterate.mu.iter().all(|&m| m >= 0.0));
    for w in out.r_plus.windows(2) {
        assert!(w[1] <= p.tau * w[0]);
    }
}

#[test]
fn example3_coarse_run_respects_invariants() {
    let d = disc("example3", 16);
    let p = SolverParams { alpha1: 0.1, theta: 10.0, ..Default::default() };
    let out = run(&d, &p, None).unwrap();
    assert!(out.converged);
    check_log_invariants(&out.log, &p);
    assert!(out.kkt.projection_residual <= 1e-8);
}

#[test]
fn runs_are_deterministic() {
    let d = disc("example1", 128);
    let p = SolverParams::default();
    let a = run(&d, &p, None).unwrap();
    let b = run(&d, &p, None).unwrap();
    assert_eq!(a.log, b.log);
    assert_eq!(a.result.iterate.u, b.result.iterate.u);
}

#[test]
fn iteration_cap_reports_non_convergence() {
    let d = disc("example1", 64);
    let p = SolverParams { max_outer: 2, ..Default::default() };
    let out = run(&d, &p, None).unwrap();
    assert!(!out.converged);
    assert_eq!(out.log.len(), 2);
}
