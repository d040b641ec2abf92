use std::hint::black_box;

use auglag_bench::fixture;
use auglag_core::subproblem::{classify_sets, inner_solve, solve_kkt_on_sets};
use criterion::{criterion_group, criterion_main, BenchmarkId, Criterion};

fn state_solve(c: &mut Criterion) {
    let mut g = c.benchmark_group("state_solve");
    for (name, cells) in [("example1", 4096), ("example3", 64), ("example3", 128)] {
        let d = fixture(name, cells);
        let u = d.grid.constant(0.5);
        g.bench_with_input(BenchmarkId::new(name, cells), &d, |b, d| {
            b.iter(|| d.op.solve_state(black_box(&u), &d.source).unwrap())
        });
    }
    g.finish();
}

fn kkt_solve(c: &mut Criterion) {
    let mut g = c.benchmark_group("kkt_solve");
    g.sample_size(20);
    for (name, cells) in [("example1", 4096), ("example3", 64)] {
        let d = fixture(name, cells);
        let z = d.grid.zeros();
        let (alpha, rho) = (1e-2, 1e4);
        let first = inner_solve(&d, alpha, rho, &z, &z, &z, 50).unwrap();
        let sets = classify_sets(&d, &first.iterate.p, &first.iterate.y, &z, alpha, rho);
        g.bench_with_input(BenchmarkId::new(name, cells), &d, |b, d| {
            b.iter(|| solve_kkt_on_sets(d, black_box(&sets), alpha, rho, &z).unwrap())
        });
    }
    g.finish();
}

fn inner(c: &mut Criterion) {
    let mut g = c.benchmark_group("inner_solve");
    g.sample_size(10);
    for (name, cells) in [("example1", 1024), ("example3", 32)] {
        let d = fixture(name, cells);
        let z = d.grid.zeros();
        g.bench_with_input(BenchmarkId::new(name, cells), &d, |b, d| {
            b.iter(|| inner_solve(d, black_box(0.1), 1e3, &z, &z, &z, 50).unwrap())
        });
    }
    g.finish();
}

criterion_group!(benches, state_solve, kkt_solve, inner);
criterion_main!(benches);
