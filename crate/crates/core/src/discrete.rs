use std::sync::OnceLock;

use crate::error::{Error, Result};
use crate::pde::{EllipticOperator, Grid, GridFunction, TOL_LIN};
use crate::problems::ProblemSpec;
use crate::subproblem::SchurPattern;

/// A problem sampled on a grid, with the assembled and factored operator.
#[derive(Debug)]
pub struct Discretization {
    pub name: String,
    pub grid: Grid,
    pub op: EllipticOperator,
    pub lower: GridFunction,
    pub upper: GridFunction,
    pub beta: f64,
    pub obstacle: GridFunction,
    pub target: GridFunction,
    pub source: GridFunction,
    /// Cached structure of the 2D Schur complement.
    pub(crate) schur_pattern: OnceLock<SchurPattern>,
}

impl Discretization {
    pub fn new(spec: &ProblemSpec, grid: Grid) -> Result<Self> {
        Self::with_tolerance(spec, grid, TOL_LIN)
    }

    pub fn with_tolerance(spec: &ProblemSpec, grid: Grid, tol_lin: f64) -> Result<Self> {
        spec.validate(&grid)?;
        let op = EllipticOperator::with_tolerance(&grid, tol_lin)?;
        Ok(Self {
            name: spec.name.clone(),
            lower: grid.sample(&*spec.lower),
            upper: grid.sample(&*spec.upper),
            beta: spec.beta,
            obstacle: grid.sample(&*spec.obstacle),
            target: grid.sample(&*spec.target),
            source: grid.sample(&*spec.source),
            op,
            grid,
            schur_pattern: OnceLock::new(),
        })
    }

    /// The active-set method needs `β > 0`.
    pub fn require_positive_beta(&self) -> Result<()> {
        if self.beta > 0.0 {
            Ok(())
        } else {
            Err(Error::InvalidProblem(format!("the solver needs β > 0, `{}` has β = {}", self.name, self.beta)))
        }
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// `y = S u`: solves `A y = u + f`.
    pub fn state(&self, u: &[f64]) -> Result<GridFunction> {
        self.op.solve_state(u, &self.source)
    }

    /// Pointwise projection onto `[u_a, u_b]`.
    pub fn project_box(&self, v: &[f64]) -> GridFunction {
        GridFunction(
            v.iter().zip(self.lower.iter().zip(self.upper.iter())).map(|(&x, (&a, &b))| x.clamp(a, b)).collect(),
        )
    }
}
