mod common;

use std::f64::consts::PI;

use auglag_core::pde::laplacian;
use auglag_core::{problems, EllipticOperator, Grid, GridFunction};
use common::*;
use faer::{Mat, Side};
use proptest::prelude::*;

fn eigenvalues(a: &[Vec<f64>]) -> Vec<f64> {
    let n = a.len();
    let m = Mat::<f64>::from_fn(n, n, |i, j| a[i][j]);
    let mut ev = m.self_adjoint_eigenvalues(Side::Lower).unwrap();
    ev.sort_by(f64::total_cmp);
    ev
}

fn observed_orders(errors: &[f64]) -> Vec<f64> {
    errors.windows(2).map(|w| (w[0] / w[1]).log2()).collect()
}

fn sine_errors_1d(adjoint: bool) -> Vec<f64> {
    [16, 32, 64]
        .iter()
        .map(|&cells| {
            let g = Grid::interval(0.0, 1.0, cells).unwrap();
            let op = EllipticOperator::assemble(&g).unwrap();
            let rhs = g.sample(|p| PI * PI * (PI * p[0]).sin());
            let exact = g.sample(|p| (PI * p[0]).sin());
            let y = if adjoint { op.solve_adjoint(&rhs).unwrap() } else { op.solve_state(&rhs, &g.zeros()).unwrap() };
            g.norm_max(&y.sub(&exact))
        })
        .collect()
}

#[test]
fn state_solve_is_second_order() {
    for order in observed_orders(&sine_errors_1d(false)) {
        assert!((order - 2.0).abs() <= 0.1, "order {order}");
    }
}

#[test]
fn adjoint_solve_is_second_order() {
    for order in observed_orders(&sine_errors_1d(true)) {
        assert!((order - 2.0).abs() <= 0.1, "order {order}");
    }
}

#[test]
fn two_dimensional_solve_is_second_order() {
    let errors: Vec<f64> = [8, 16, 32]
        .iter()
        .map(|&cells| {
            let g = Grid::rectangle((0.0, 1.0), (0.0, 1.0), cells, cells).unwrap();
            let op = EllipticOperator::assemble(&g).unwrap();
            let rhs = g.sample(|p| 2.0 * PI * PI * (PI * p[0]).sin() * (PI * p[1]).sin());
            let exact = g.sample(|p| (PI * p[0]).sin() * (PI * p[1]).sin());
            g.norm_max(&op.solve_adjoint(&rhs).unwrap().sub(&exact))
        })
        .collect();
    for order in observed_orders(&errors) {
        assert!((order - 2.0).abs() <= 0.1, "order {order}");
    }
}

#[test]
fn example1_state_from_exact_control() {
    let spec = problems::example1();
    let errors: Vec<f64> = [64, 128, 256]
        .iter()
        .map(|&cells| {
            let g = spec.domain.grid(cells).unwrap();
            let op = EllipticOperator::assemble(&g).unwrap();
            let ex = problems::eval_exact(&spec, &g).unwrap();
            let y = op.solve_state(&ex.control, &g.sample(&*spec.source)).unwrap();
            g.norm_max(&y.sub(&ex.state))
        })
        .collect();
    assert!(errors[2] < 1e-3, "{errors:?}");
    for order in observed_orders(&errors) {
        assert!(order > 1.8, "order {order} from {errors:?}");
    }
}

#[test]
fn small_stencils() {
    let g = Grid::interval(0.0, 1.0, 4).unwrap();
    let a = laplacian(&g).to_dense();
    assert_eq!(a, dense_laplacian(&g));
    let g = Grid::rectangle((0.0, 1.0), (0.0, 1.0), 3, 3).unwrap();
    let a = laplacian(&g).to_dense();
    for (i, row) in a.iter().enumerate() {
        assert!((row[i] - 36.0).abs() < 1e-12);
    }
    assert!((a[0][1] + 9.0).abs() < 1e-12);
    assert!((a[0][2] + 9.0).abs() < 1e-12);
    assert_eq!(a[0][3], 0.0);
}

#[test]
fn three_node_eigenvalues() {
    let g = Grid::interval(0.0, 1.0, 4).unwrap();
    let ev = eigenvalues(&laplacian(&g).to_dense());
    let s = 16.0 * 2f64.sqrt();
    for (got, want) in ev.iter().zip([32.0 - s, 32.0, 32.0 + s]) {
        assert!((got - want).abs() < 1e-10, "{got} vs {want}");
    }
}

#[test]
fn operators_are_symmetric_positive_definite() {
    for g in [
        Grid::interval(0.0, 1.0, 9).unwrap(),
        Grid::interval(-1.0, 1.0, 12).unwrap(),
        Grid::rectangle((0.0, 1.0), (0.0, 2.0), 5, 4).unwrap(),
    ] {
        let a = laplacian(&g).to_dense();
        for (i, row) in a.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                assert_eq!(*v, a[j][i]);
            }
        }
        let ev = eigenvalues(&a);
        assert!(ev[0] > 0.0);
        let op = EllipticOperator::assemble(&g).unwrap();
        assert!((op.lambda_min() - ev[0]).abs() < 1e-9 * ev[0]);
    }
}

#[test]
fn weights_sum_to_domain_measure() {
    for g in [
        Grid::interval(-1.0, 1.0, 4096).unwrap(),
        Grid::rectangle((0.0, 1.0), (0.0, 1.0), 128, 128).unwrap(),
        Grid::rectangle((-2.0, 2.0), (-2.0, 2.0), 64, 64).unwrap(),
    ] {
        let total: f64 = g.points().map(|_| g.weight()).sum();
        assert!((total / g.measure() - 1.0).abs() <= 1e-12);
    }
}

#[test]
fn solver_matches_dense_elimination() {
    let g = Grid::rectangle((0.0, 1.0), (0.0, 1.0), 7, 6).unwrap();
    let op = EllipticOperator::assemble(&g).unwrap();
    let b = g.sample(|p| (3.0 * p[0]).cos() + p[1] * p[1]);
    let x = op.solve(&b).unwrap();
    assert!(max_abs_diff(&x, &solve_dense(&dense_laplacian(&g), &b)) < 1e-12);
}

proptest! {
    #[test]
    fn discrete_self_adjointness(a in prop::collection::vec(-1.0f64..1.0, 17), b in prop::collection::vec(-1.0f64..1.0, 17)) {
        let g = Grid::interval(0.0, 1.0, 18).unwrap();
        let op = EllipticOperator::assemble(&g).unwrap();
        let sa = op.solve_state(&a, &g.zeros()).unwrap();
        let sb = op.solve_adjoint(&b).unwrap();
        let lhs = g.inner(&sa, &b);
        let rhs = g.inner(&a, &sb);
        prop_assert!((lhs - rhs).abs() <= 1e-10 * g.norm_l2(&a) * g.norm_l2(&b) + 1e-300);
    }

    #[test]
    fn nonnegative_data_gives_nonnegative_state(v in prop::collection::vec(0.0f64..1.0, 25)) {
        let g = Grid::rectangle((0.0, 1.0), (0.0, 1.0), 6, 6).unwrap();
        let op = EllipticOperator::assemble(&g).unwrap();
        let y = op.solve_state(&GridFunction::new(v), &g.zeros()).unwrap();
        prop_assert!(y.iter().all(|&x| x >= 0.0));
    }

    #[test]
    fn nonnegative_data_gives_nonnegative_state_1d(v in prop::collection::vec(0.0f64..1.0, 31)) {
        let g = Grid::interval(0.0, 1.0, 32).unwrap();
        let op = EllipticOperator::assemble(&g).unwrap();
        let y = op.solve_state(&g.zeros(), &v).unwrap();
        prop_assert!(y.iter().all(|&x| x >= 0.0));
    }
}
