#![allow(clippy::needless_range_loop)]

pub mod auglag;
pub mod diagnostics;
pub mod discrete;
pub mod error;
pub mod pde;
pub mod problems;
pub mod report;
pub mod subproblem;

pub use discrete::Discretization;
pub use error::{Error, Result};
pub use pde::{EllipticOperator, Grid, GridFunction, Point};
pub use problems::{ProblemSpec, PROBLEM_NAMES};
