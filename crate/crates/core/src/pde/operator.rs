use std::f64::consts::PI;
use std::fmt;

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Llt;
use faer::{Mat, Side};

use super::banded::SymTridiagonal;
use super::grid::{Grid, GridFunction};
use super::sparse::{backward_error, CsrMatrix};
use crate::error::{Error, Result};

/// Default backward-error tolerance for linear solves.
pub const TOL_LIN: f64 = 1e-12;

const MAX_REFINEMENT_STEPS: usize = 3;

enum Factor {
    Tridiagonal(SymTridiagonal),
    Sparse(Llt<usize, f64>),
}

/// Finite-difference `−Δ` with homogeneous Dirichlet conditions, together
/// with its Cholesky factorization.
///
/// The matrix is symmetric, so the adjoint solve reuses the state factorization.
pub struct EllipticOperator {
    grid: Grid,
    matrix: CsrMatrix,
    norm_inf: f64,
    factor: Factor,
    tol_lin: f64,
}

impl fmt::Debug for EllipticOperator {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("EllipticOperator")
            .field("grid", &self.grid)
            .field("nnz", &self.matrix.nnz())
            .field("tol_lin", &self.tol_lin)
            .finish()
    }
}

/// Assembles the 3-point (1D) or 5-point (2D) Laplacian on `grid`.
pub fn laplacian(grid: &Grid) -> CsrMatrix {
    let n = grid.len();
    let mut entries = Vec::with_capacity(5 * n);
    let nx = grid.axis(0).nodes();
    let ny = if grid.dim() == 2 { grid.axis(1).nodes() } else { 1 };
    let cx = 1.0 / grid.axis(0).spacing().powi(2);
    let cy = if grid.dim() == 2 { 1.0 / grid.axis(1).spacing().powi(2) } else { 0.0 };
    for j in 0..ny {
        for i in 0..nx {
            let k = grid.index(i, j);
            entries.push((k, k, 2.0 * cx + 2.0 * cy));
            if i > 0 {
                entries.push((k, k - 1, -cx));
            }
            if i + 1 < nx {
                entries.push((k, k + 1, -cx));
            }
            if j > 0 {
                entries.push((k, k - nx, -cy));
            }
            if j + 1 < ny {
                entries.push((k, k + nx, -cy));
            }
        }
    }
    CsrMatrix::from_triplets(n, entries)
}

impl EllipticOperator {
    pub fn assemble(grid: &Grid) -> Result<Self> {
        Self::with_tolerance(grid, TOL_LIN)
    }

    pub fn with_tolerance(grid: &Grid, tol_lin: f64) -> Result<Self> {
        let matrix = laplacian(grid);
        let factor = if grid.dim() == 1 {
            let n = grid.len();
            let diag: Vec<f64> = (0..n).map(|i| matrix.get(i, i)).collect();
            let off: Vec<f64> = (0..n - 1).map(|i| matrix.get(i + 1, i)).collect();
            Factor::Tridiagonal(SymTridiagonal::factor(&diag, &off)?)
        } else {
            let llt = matrix.to_faer()?.sp_cholesky(Side::Lower).map_err(|e| Error::Factorization(format!("{e:?}")))?;
            Factor::Sparse(llt)
        };
        Ok(Self { grid: grid.clone(), norm_inf: matrix.norm_inf(), matrix, factor, tol_lin })
    }

    pub fn grid(&self) -> &Grid {
        &self.grid
    }

    pub fn matrix(&self) -> &CsrMatrix {
        &self.matrix
    }

    pub fn tol_lin(&self) -> f64 {
        self.tol_lin
    }

    pub fn norm_inf(&self) -> f64 {
        self.norm_inf
    }

    pub fn apply(&self, x: &[f64]) -> GridFunction {
        GridFunction(self.matrix.mul_vec(x))
    }

    /// Smallest eigenvalue of the discrete operator (closed form for the
    /// uniform-grid Laplacian).
    pub fn lambda_min(&self) -> f64 {
        self.grid
            .axes()
            .iter()
            .map(|a| {
                let h = a.spacing();
                4.0 / (h * h) * (PI * h / (2.0 * a.length())).sin().powi(2)
            })
            .sum()
    }

    fn raw_solve(&self, b: &mut [f64]) {
        match &self.factor {
            Factor::Tridiagonal(t) => t.solve_in_place(b),
            Factor::Sparse(llt) => {
                let rhs = Mat::<f64>::from_fn(b.len(), 1, |i, _| b[i]);
                let x = llt.solve(&rhs);
                for (i, v) in b.iter_mut().enumerate() {
                    *v = x[(i, 0)];
                }
            }
        }
    }

    /// Solves `A x = b` and verifies the normwise backward error, refining
    /// iteratively if needed.
    pub fn solve(&self, b: &[f64]) -> Result<GridFunction> {
        self.grid.check(b)?;
        if b.iter().all(|&v| v == 0.0) {
            return Ok(self.grid.zeros());
        }
        let mut x = b.to_vec();
        self.raw_solve(&mut x);
        let mut err = f64::INFINITY;
        for _ in 0..=MAX_REFINEMENT_STEPS {
            let ax = self.matrix.mul_vec(&x);
            let mut r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
            err = backward_error(&r, self.norm_inf, &x, b);
            if err <= self.tol_lin {
                return Ok(GridFunction(x));
            }
            self.raw_solve(&mut r);
            for (xi, di) in x.iter_mut().zip(&r) {
                *xi += di;
            }
        }
        Err(Error::LinearSolve { residual: err, tol: self.tol_lin })
    }

    /// State equation `A y = u + f`.
    pub fn solve_state(&self, u: &[f64], f: &[f64]) -> Result<GridFunction> {
        self.grid.check(u)?;
        self.grid.check(f)?;
        let rhs: Vec<f64> = u.iter().zip(f).map(|(a, b)| a + b).collect();
        self.solve(&rhs)
    }

    /// Adjoint equation `A* p = rhs`; `A* = A` for this operator.
    pub fn solve_adjoint(&self, rhs: &[f64]) -> Result<GridFunction> {
        self.solve(rhs)
    }
}
