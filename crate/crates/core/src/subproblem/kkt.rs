//! Linear system of one active-set step.
//!
//! For fixed sets the optimality system becomes linear in `(y, p)`:
//!
//! ```text
//!   (I + ρ χ_Y) y − A p = y_d − χ_Y (μ − ρ ψ)      adjoint, μ_out eliminated
//!   A y + (1/α) χ_I p   = f + g                     state, u eliminated
//! ```
//!
//! with `χ_Y` the penalty mask, `χ_I` the two smooth branches, and `g` the
//! fixed control (or `−ξ/α` on the branches). Unknowns are interleaved
//! `[y_0, p_0, y_1, p_1, …]`, which keeps the 1D matrix banded. In 2D the
//! state block is eliminated and the SPD Schur complement
//! `A D⁻¹ A + E` is factored by sparse Cholesky.

use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::{Llt, SymbolicLlt};
use faer::sparse::{SparseColMatRef, SymbolicSparseColMat};
use faer::{Mat, Side};

use super::sets::{ActiveSets, ControlSet};
use crate::discrete::Discretization;
use crate::error::{Error, Result};
use crate::pde::{backward_error, BandMatrix, CsrMatrix, GridFunction};

const MAX_REFINEMENT_STEPS: usize = 3;

/// Solution of the linear system for one set configuration.
#[derive(Clone, Debug)]
pub struct KktSolution {
    pub u: GridFunction,
    pub y: GridFunction,
    pub p: GridFunction,
    pub xi: GridFunction,
    /// `μ + ρ(y − ψ)` on the penalty mask, zero elsewhere.
    pub mu: GridFunction,
}

fn entries(disc: &Discretization, state_diag: &[f64], control_diag: &[f64]) -> Vec<(usize, usize, f64)> {
    let a = disc.op.matrix();
    let mut out = Vec::with_capacity(2 * a.nnz() + 2 * disc.len());
    for i in 0..disc.len() {
        out.push((2 * i, 2 * i, state_diag[i]));
        out.push((2 * i + 1, 2 * i + 1, control_diag[i]));
        for (j, v) in a.row(i) {
            out.push((2 * i, 2 * j + 1, -v));
            out.push((2 * i + 1, 2 * j, v));
        }
    }
    out
}

fn rhs(disc: &Discretization, sets: &ActiveSets, alpha: f64, rho: f64, mu: &[f64]) -> Vec<f64> {
    let beta = disc.beta;
    let mut b = vec![0.0; 2 * disc.len()];
    for i in 0..disc.len() {
        b[2 * i] = disc.target[i] - if sets.penalty[i] { mu[i] - rho * disc.obstacle[i] } else { 0.0 };
        let g = match sets.control[i] {
            ControlSet::Lower => disc.lower[i],
            ControlSet::Zero => 0.0,
            ControlSet::Upper => disc.upper[i],
            ControlSet::NegativeBranch => beta / alpha,
            ControlSet::PositiveBranch => -beta / alpha,
        };
        b[2 * i + 1] = disc.source[i] + g;
    }
    b
}

trait Factored {
    fn solve_in_place(&self, b: &mut [f64]);
}

impl Factored for crate::pde::BandLu {
    fn solve_in_place(&self, b: &mut [f64]) {
        crate::pde::BandLu::solve_in_place(self, b)
    }
}

/// Lower-triangular sparsity pattern of `A D⁻¹ A + E`, which does not
/// depend on the diagonals, with the factorization analysis.
pub(crate) struct SchurPattern {
    symbolic: SymbolicSparseColMat<usize>,
    llt: SymbolicLlt<usize>,
    /// `(value slot, k, a_ik a_kj)` for every product term.
    terms: Vec<(usize, usize, f64)>,
    diag_slot: Vec<usize>,
}

impl std::fmt::Debug for SchurPattern {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SchurPattern").field("nnz", &self.diag_slot.len()).finish()
    }
}

impl SchurPattern {
    fn new(a: &CsrMatrix) -> Result<Self> {
        let n = a.n();
        let mut col_ptr = vec![0usize];
        let mut row_idx = Vec::new();
        let mut terms = Vec::new();
        let mut diag_slot = Vec::with_capacity(n);
        for c in 0..n {
            let mut rows: Vec<usize> =
                a.row(c).flat_map(|(k, _)| a.row(k).map(|(r, _)| r)).filter(|&r| r >= c).collect();
            rows.sort_unstable();
            rows.dedup();
            let start = row_idx.len();
            diag_slot.push(start);
            for (k, ack) in a.row(c) {
                for (r, akr) in a.row(k) {
                    if r >= c {
                        let slot = start + rows.binary_search(&r).unwrap();
                        terms.push((slot, k, ack * akr));
                    }
                }
            }
            row_idx.extend_from_slice(&rows);
            col_ptr.push(row_idx.len());
        }
        let symbolic = SymbolicSparseColMat::new_checked(n, n, col_ptr, None, row_idx);
        let llt =
            SymbolicLlt::try_new(symbolic.as_ref(), Side::Lower).map_err(|e| Error::Factorization(format!("{e:?}")))?;
        Ok(Self { symbolic, llt, terms, diag_slot })
    }

    fn factor(&self, state_diag: &[f64], control_diag: &[f64]) -> Result<Llt<usize, f64>> {
        let mut vals = vec![0.0; self.symbolic.row_idx().len()];
        for &(slot, k, v) in &self.terms {
            vals[slot] += v / state_diag[k];
        }
        for (i, &slot) in self.diag_slot.iter().enumerate() {
            vals[slot] += control_diag[i];
        }
        let m = SparseColMatRef::new(self.symbolic.as_ref(), &vals);
        Llt::try_new_with_symbolic(self.llt.clone(), m, Side::Lower).map_err(|_| Error::SingularKkt)
    }
}

pub(crate) struct SchurFactor<'a> {
    llt: Llt<usize, f64>,
    a: &'a CsrMatrix,
    state_diag: Vec<f64>,
}

impl Factored for SchurFactor<'_> {
    fn solve_in_place(&self, b: &mut [f64]) {
        let n = self.state_diag.len();
        let scaled: Vec<f64> = (0..n).map(|i| b[2 * i] / self.state_diag[i]).collect();
        let a_scaled = self.a.mul_vec(&scaled);
        let rhs = Mat::<f64>::from_fn(n, 1, |i, _| b[2 * i + 1] - a_scaled[i]);
        let p = self.llt.solve(&rhs);
        let p: Vec<f64> = (0..n).map(|i| p[(i, 0)]).collect();
        let ap = self.a.mul_vec(&p);
        for i in 0..n {
            b[2 * i] = (b[2 * i] + ap[i]) / self.state_diag[i];
            b[2 * i + 1] = p[i];
        }
    }
}

/// `[D y − A p, A y + E p]` for interleaved `x`.
fn block_mul(a: &CsrMatrix, state_diag: &[f64], control_diag: &[f64], x: &[f64]) -> Vec<f64> {
    let n = state_diag.len();
    let y: Vec<f64> = (0..n).map(|i| x[2 * i]).collect();
    let p: Vec<f64> = (0..n).map(|i| x[2 * i + 1]).collect();
    let ay = a.mul_vec(&y);
    let ap = a.mul_vec(&p);
    let mut out = vec![0.0; 2 * n];
    for i in 0..n {
        out[2 * i] = state_diag[i] * y[i] - ap[i];
        out[2 * i + 1] = ay[i] + control_diag[i] * p[i];
    }
    out
}

/// Solves, refines and returns the solution with its backward error.
fn refine(
    lu: &impl Factored,
    mul: impl Fn(&[f64]) -> Vec<f64>,
    norm: f64,
    b: &[f64],
    tol: f64,
) -> Result<(Vec<f64>, f64)> {
    let mut x = b.to_vec();
    lu.solve_in_place(&mut x);
    let mut best = (x.clone(), f64::INFINITY);
    for step in 0..=MAX_REFINEMENT_STEPS {
        if x.iter().any(|v| !v.is_finite()) {
            return Err(Error::SingularKkt);
        }
        let ax = mul(&x);
        let mut r: Vec<f64> = b.iter().zip(&ax).map(|(b, a)| b - a).collect();
        let err = backward_error(&r, norm, &x, b);
        if err < best.1 {
            best = (x.clone(), err);
        }
        if err <= tol || step == MAX_REFINEMENT_STEPS {
            break;
        }
        lu.solve_in_place(&mut r);
        for (xi, di) in x.iter_mut().zip(&r) {
            *xi += di;
        }
    }
    Ok(best)
}

/// Factorization of the interleaved block system
///
/// ```text
///   D y − A p = b_y
///   A y + E p = b_p
/// ```
///
/// with diagonal `D > 0` and `E ≥ 0`, unknowns ordered `[y_0, p_0, y_1, …]`.
pub(crate) enum BlockFactor<'a> {
    Band { matrix: BandMatrix, lu: crate::pde::BandLu },
    Schur { factor: SchurFactor<'a>, control_diag: Vec<f64>, norm: f64 },
}

impl<'a> BlockFactor<'a> {
    pub(crate) fn new(disc: &'a Discretization, state_diag: &[f64], control_diag: &[f64]) -> Result<Self> {
        if disc.grid.dim() == 1 {
            let mut matrix = BandMatrix::zeros(2 * disc.len(), 3, 3);
            for (i, j, v) in entries(disc, state_diag, control_diag) {
                matrix.add(i, j, v);
            }
            let lu = matrix.clone().factor().map_err(|_| Error::SingularKkt)?;
            Ok(Self::Band { matrix, lu })
        } else {
            let a = disc.op.matrix();
            let pattern = match disc.schur_pattern.get() {
                Some(p) => p,
                None => {
                    let p = SchurPattern::new(a)?;
                    disc.schur_pattern.get_or_init(|| p)
                }
            };
            let llt = pattern.factor(state_diag, control_diag)?;
            let norm = (0..disc.len())
                .map(|i| state_diag[i].abs().max(control_diag[i].abs()) + a.row(i).map(|(_, v)| v.abs()).sum::<f64>())
                .fold(0.0, f64::max);
            Ok(Self::Schur {
                factor: SchurFactor { llt, a, state_diag: state_diag.to_vec() },
                control_diag: control_diag.to_vec(),
                norm,
            })
        }
    }

    /// Solves with iterative refinement; returns the solution and its
    /// normwise backward error, leaving the acceptance decision to the caller.
    pub(crate) fn solve(&self, b: &[f64], tol: f64) -> Result<(Vec<f64>, f64)> {
        match self {
            Self::Band { matrix, lu } => refine(lu, |x| matrix.mul_vec(x), matrix.norm_inf(), b, tol),
            Self::Schur { factor, control_diag, norm } => {
                refine(factor, |x| block_mul(factor.a, &factor.state_diag, control_diag, x), *norm, b, tol)
            }
        }
    }
}

fn solve_system(disc: &Discretization, sets: &ActiveSets, alpha: f64, rho: f64, b: &[f64]) -> Result<Vec<f64>> {
    let tol = disc.op.tol_lin();
    let state_diag: Vec<f64> = sets.penalty.iter().map(|&m| if m { 1.0 + rho } else { 1.0 }).collect();
    let control_diag: Vec<f64> = sets.control.iter().map(|c| if c.is_fixed() { 0.0 } else { 1.0 / alpha }).collect();
    let (x, err) = BlockFactor::new(disc, &state_diag, &control_diag)?.solve(b, tol)?;
    if err <= tol {
        Ok(x)
    } else {
        Err(Error::LinearSolve { residual: err, tol })
    }
}

/// Solves the optimality system with the control and penalty sets frozen.
pub fn solve_kkt_on_sets(
    disc: &Discretization,
    sets: &ActiveSets,
    alpha: f64,
    rho: f64,
    mu: &[f64],
) -> Result<KktSolution> {
    let n = disc.len();
    debug_assert_eq!(sets.len(), n);
    let b = rhs(disc, sets, alpha, rho, mu);
    let z = solve_system(disc, sets, alpha, rho, &b)?;
    let y: Vec<f64> = (0..n).map(|i| z[2 * i]).collect();
    let p: Vec<f64> = (0..n).map(|i| z[2 * i + 1]).collect();
    let beta = disc.beta;
    let mut u = vec![0.0; n];
    let mut xi = vec![0.0; n];
    let mut mu_out = vec![0.0; n];
    for i in 0..n {
        match sets.control[i] {
            ControlSet::NegativeBranch => {
                xi[i] = -beta;
                u[i] = -(p[i] + xi[i]) / alpha;
            }
            ControlSet::PositiveBranch => {
                xi[i] = beta;
                u[i] = -(p[i] + xi[i]) / alpha;
            }
            fixed => {
                u[i] = match fixed {
                    ControlSet::Lower => disc.lower[i],
                    ControlSet::Upper => disc.upper[i],
                    _ => 0.0,
                };
                xi[i] = -p[i] - alpha * u[i];
            }
        }
        if sets.penalty[i] {
            mu_out[i] = mu[i] + rho * (y[i] - disc.obstacle[i]);
        }
    }
    Ok(KktSolution {
        u: GridFunction(u),
        y: GridFunction(y),
        p: GridFunction(p),
        xi: GridFunction(xi),
        mu: GridFunction(mu_out),
    })
}
