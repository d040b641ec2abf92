//! Dense reference implementations used as independent oracles.
#![allow(dead_code, clippy::needless_range_loop)]

use std::sync::Arc;

use auglag_core::problems::{constant, Domain, Field, ProblemSpec};
use auglag_core::{Discretization, Grid, Point};

/// Dense `−Δ` with Dirichlet elimination, built directly from the grid axes.
pub fn dense_laplacian(grid: &Grid) -> Vec<Vec<f64>> {
    let n = grid.len();
    let ax = grid.axis(0);
    let (nx, hx) = (ax.nodes(), ax.spacing());
    let (ny, hy) = if grid.dim() == 2 { (grid.axis(1).nodes(), grid.axis(1).spacing()) } else { (1, f64::INFINITY) };
    let mut a = vec![vec![0.0; n]; n];
    for j in 0..ny {
        for i in 0..nx {
            let k = j * nx + i;
            a[k][k] = 2.0 / (hx * hx) + if grid.dim() == 2 { 2.0 / (hy * hy) } else { 0.0 };
            if i > 0 {
                a[k][k - 1] = -1.0 / (hx * hx);
            }
            if i + 1 < nx {
                a[k][k + 1] = -1.0 / (hx * hx);
            }
            if j > 0 {
                a[k][k - nx] = -1.0 / (hy * hy);
            }
            if j + 1 < ny {
                a[k][k + nx] = -1.0 / (hy * hy);
            }
        }
    }
    a
}

/// Gaussian elimination with partial pivoting.
pub fn solve_dense(a: &[Vec<f64>], b: &[f64]) -> Vec<f64> {
    let n = b.len();
    let mut m: Vec<Vec<f64>> = a.iter().zip(b).map(|(r, &v)| r.iter().copied().chain([v]).collect()).collect();
    for c in 0..n {
        let piv = (c..n).max_by(|&i, &j| m[i][c].abs().total_cmp(&m[j][c].abs())).unwrap();
        m.swap(c, piv);
        assert!(m[c][c] != 0.0, "singular dense system");
        for r in c + 1..n {
            let f = m[r][c] / m[c][c];
            for k in c..=n {
                m[r][k] -= f * m[c][k];
            }
        }
    }
    let mut x = vec![0.0; n];
    for r in (0..n).rev() {
        let s: f64 = (r + 1..n).map(|k| m[r][k] * x[k]).sum();
        x[r] = (m[r][n] - s) / m[r][r];
    }
    x
}

pub fn inverse(a: &[Vec<f64>]) -> Vec<Vec<f64>> {
    let n = a.len();
    let cols: Vec<Vec<f64>> =
        (0..n).map(|j| solve_dense(a, &(0..n).map(|i| if i == j { 1.0 } else { 0.0 }).collect::<Vec<_>>())).collect();
    (0..n).map(|i| (0..n).map(|j| cols[j][i]).collect()).collect()
}

pub fn matvec(a: &[Vec<f64>], x: &[f64]) -> Vec<f64> {
    a.iter().map(|r| r.iter().zip(x).map(|(a, b)| a * b).sum()).collect()
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| m.max((x - y).abs()))
}

/// Field that returns `values[k]` at the `k`-th interior node of a uniform
/// grid on `(0, 1)` with `cells` cells.
pub fn nodal_field(values: Vec<f64>, cells: usize) -> Field {
    Arc::new(move |p: Point| {
        let k = (p[0] * cells as f64).round() as usize;
        values[k - 1]
    })
}

/// Problem on `(0, 1)` with nodal target and source.
pub fn nodal_spec(cells: usize, beta: f64, obstacle: f64, target: Vec<f64>, source: Vec<f64>) -> ProblemSpec {
    ProblemSpec {
        name: "nodal".into(),
        domain: Domain::Interval { lower: 0.0, upper: 1.0 },
        lower: constant(-1.0),
        upper: constant(1.0),
        beta,
        obstacle: constant(obstacle),
        target: nodal_field(target, cells),
        source: nodal_field(source, cells),
        exact: None,
    }
}

/// The reduced subproblem `min_u F(u) + β‖u‖₁ + ι_[u_a,u_b](u)` in dense form.
pub struct DenseProblem {
    pub solution_operator: Vec<Vec<f64>>,
    pub weight: f64,
    pub lower: Vec<f64>,
    pub upper: Vec<f64>,
    pub beta: f64,
    pub obstacle: Vec<f64>,
    pub target: Vec<f64>,
    pub source: Vec<f64>,
}

pub struct OracleSolution {
    pub u: Vec<f64>,
    pub y: Vec<f64>,
    pub p: Vec<f64>,
    pub residual: f64,
    pub iterations: usize,
}

impl DenseProblem {
    pub fn from_disc(d: &Discretization) -> Self {
        Self {
            solution_operator: inverse(&dense_laplacian(&d.grid)),
            weight: d.grid.weight(),
            lower: d.lower.to_vec(),
            upper: d.upper.to_vec(),
            beta: d.beta,
            obstacle: d.obstacle.to_vec(),
            target: d.target.to_vec(),
            source: d.source.to_vec(),
        }
    }

    pub fn state(&self, u: &[f64]) -> Vec<f64> {
        let rhs: Vec<f64> = u.iter().zip(&self.source).map(|(a, b)| a + b).collect();
        matvec(&self.solution_operator, &rhs)
    }

    fn adjoint(&self, y: &[f64], rho: f64, mu: &[f64]) -> Vec<f64> {
        let rhs: Vec<f64> =
            (0..y.len()).map(|i| y[i] - self.target[i] + (mu[i] + rho * (y[i] - self.obstacle[i])).max(0.0)).collect();
        matvec(&self.solution_operator, &rhs)
    }

    fn prox(&self, v: &[f64], step: f64) -> Vec<f64> {
        (0..v.len())
            .map(|i| {
                let t = self.beta * step;
                let s = v[i].signum() * (v[i].abs() - t).max(0.0);
                s.clamp(self.lower[i], self.upper[i])
            })
            .collect()
    }

    fn spectral_norm(&self) -> f64 {
        let n = self.solution_operator.len();
        let mut x = vec![1.0; n];
        let mut lam = 0.0;
        for _ in 0..500 {
            let y = matvec(&self.solution_operator, &x);
            lam = y.iter().map(|v| v * v).sum::<f64>().sqrt() / x.iter().map(|v| v * v).sum::<f64>().sqrt();
            let nrm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            x = y.iter().map(|v| v / nrm).collect();
        }
        lam
    }

    /// Accelerated proximal gradient with adaptive restart, run until the
    /// fixed-point residual `‖u − prox(u − s∇F(u))‖_h / s` drops below `tol`.
    pub fn solve(&self, alpha: f64, rho: f64, mu: &[f64], tol: f64, max_iterations: usize) -> OracleSolution {
        let n = self.lower.len();
        let norm = self.spectral_norm();
        let step = 1.0 / (alpha + norm * norm * (1.0 + rho));
        let grad = |u: &[f64]| -> Vec<f64> {
            let y = self.state(u);
            let p = self.adjoint(&y, rho, mu);
            (0..n).map(|i| p[i] + alpha * u[i]).collect()
        };
        let mut u = vec![0.0; n];
        let mut v = u.clone();
        let mut t = 1.0_f64;
        let mut residual = f64::INFINITY;
        let mut iterations = 0;
        while iterations < max_iterations {
            iterations += 1;
            let g = grad(&v);
            let trial: Vec<f64> = (0..n).map(|i| v[i] - step * g[i]).collect();
            let next = self.prox(&trial, step);
            let t_next = 0.5 * (1.0 + (1.0 + 4.0 * t * t).sqrt());
            let restart = (0..n).map(|i| (v[i] - next[i]) * (next[i] - u[i])).sum::<f64>() > 0.0;
            if restart {
                t = 1.0;
                v = next.clone();
            } else {
                v = (0..n).map(|i| next[i] + (t - 1.0) / t_next * (next[i] - u[i])).collect();
                t = t_next;
            }
            u = next;
            if iterations % 10 == 0 {
                let g = grad(&u);
                let trial: Vec<f64> = (0..n).map(|i| u[i] - step * g[i]).collect();
                let pu = self.prox(&trial, step);
                residual = (self.weight * (0..n).map(|i| (u[i] - pu[i]).powi(2)).sum::<f64>()).sqrt() / step;
                if residual <= tol {
                    break;
                }
            }
        }
        let y = self.state(&u);
        let p = self.adjoint(&y, rho, mu);
        OracleSolution { u, y, p, residual, iterations }
    }
}
