//! Uniform-grid discretization of `−Δ` with homogeneous Dirichlet data and
//! the state / adjoint solves built on it.

mod banded;
mod grid;
mod operator;
mod sparse;

pub use banded::{BandLu, BandMatrix, SymTridiagonal};
pub use grid::{Axis, Grid, GridFunction, Point};
pub use operator::{laplacian, EllipticOperator, TOL_LIN};
pub use sparse::{backward_error, CsrMatrix};
