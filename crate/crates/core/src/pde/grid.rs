use std::ops::{Deref, DerefMut};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point in the domain. One-dimensional grids leave the second coordinate at zero.
pub type Point = [f64; 2];

/// One coordinate direction of a uniform grid: `cells` equal cells on `[lower, upper]`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Axis {
    pub lower: f64,
    pub upper: f64,
    pub cells: usize,
}

impl Axis {
    pub fn new(lower: f64, upper: f64, cells: usize) -> Self {
        Self { lower, upper, cells }
    }

    pub fn length(&self) -> f64 {
        self.upper - self.lower
    }

    pub fn spacing(&self) -> f64 {
        self.length() / self.cells as f64
    }

    /// Number of interior nodes (boundary nodes are eliminated).
    pub fn nodes(&self) -> usize {
        self.cells.saturating_sub(1)
    }

    /// Coordinate of interior node `i` (zero based).
    pub fn coord(&self, i: usize) -> f64 {
        self.lower + (i + 1) as f64 * self.spacing()
    }
}

/// Uniform finite-difference grid on an interval or a rectangle.
///
/// Only interior nodes carry unknowns; homogeneous Dirichlet values on the
/// boundary are eliminated. Every node carries the same quadrature weight
/// `|Ω| / #nodes`, so weights sum to the domain measure and the discrete
/// inner product commutes with the (symmetric) difference operator.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Grid {
    axes: Vec<Axis>,
}

impl Grid {
    pub fn interval(lower: f64, upper: f64, cells: usize) -> Result<Self> {
        Self::new(vec![Axis::new(lower, upper, cells)])
    }

    pub fn rectangle(x: (f64, f64), y: (f64, f64), cells_x: usize, cells_y: usize) -> Result<Self> {
        Self::new(vec![Axis::new(x.0, x.1, cells_x), Axis::new(y.0, y.1, cells_y)])
    }

    pub fn new(axes: Vec<Axis>) -> Result<Self> {
        if axes.is_empty() || axes.len() > 2 {
            return Err(Error::InvalidGrid(format!("dimension must be 1 or 2, got {}", axes.len())));
        }
        for (k, axis) in axes.iter().enumerate() {
            if !(axis.lower.is_finite() && axis.upper.is_finite()) || axis.upper <= axis.lower {
                return Err(Error::InvalidGrid(format!(
                    "axis {k}: need lower < upper, got [{}, {}]",
                    axis.lower, axis.upper
                )));
            }
            if axis.nodes() < 1 {
                return Err(Error::InvalidGrid(format!(
                    "axis {k}: need at least 1 interior node, got {}",
                    axis.nodes()
                )));
            }
        }
        Ok(Self { axes })
    }

    pub fn dim(&self) -> usize {
        self.axes.len()
    }

    pub fn axes(&self) -> &[Axis] {
        &self.axes
    }

    pub fn axis(&self, k: usize) -> &Axis {
        &self.axes[k]
    }

    /// Total number of interior nodes.
    pub fn len(&self) -> usize {
        self.axes.iter().map(Axis::nodes).product()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }

    /// Smallest spacing over all axes.
    pub fn h(&self) -> f64 {
        self.axes.iter().map(Axis::spacing).fold(f64::INFINITY, f64::min)
    }

    pub fn measure(&self) -> f64 {
        self.axes.iter().map(Axis::length).product()
    }

    pub fn weight(&self) -> f64 {
        self.measure() / self.len() as f64
    }

    /// Linear index of node `(i, j)`; x runs fastest.
    pub fn index(&self, i: usize, j: usize) -> usize {
        i + j * self.axes[0].nodes()
    }

    pub fn point(&self, idx: usize) -> Point {
        let nx = self.axes[0].nodes();
        match self.axes.len() {
            1 => [self.axes[0].coord(idx), 0.0],
            _ => [self.axes[0].coord(idx % nx), self.axes[1].coord(idx / nx)],
        }
    }

    pub fn points(&self) -> impl Iterator<Item = Point> + '_ {
        (0..self.len()).map(|i| self.point(i))
    }

    pub fn sample(&self, f: impl Fn(Point) -> f64) -> GridFunction {
        GridFunction(self.points().map(f).collect())
    }

    pub fn constant(&self, value: f64) -> GridFunction {
        GridFunction(vec![value; self.len()])
    }

    pub fn zeros(&self) -> GridFunction {
        self.constant(0.0)
    }

    /// `(a, b)_h = Σ w a_i b_i`.
    pub fn inner(&self, a: &[f64], b: &[f64]) -> f64 {
        debug_assert_eq!(a.len(), b.len());
        self.weight() * a.iter().zip(b).map(|(x, y)| x * y).sum::<f64>()
    }

    pub fn norm_l2(&self, a: &[f64]) -> f64 {
        self.inner(a, a).sqrt()
    }

    pub fn norm_l1(&self, a: &[f64]) -> f64 {
        self.weight() * a.iter().map(|x| x.abs()).sum::<f64>()
    }

    /// Discrete `C(Ω̄)` norm: maximum modulus over interior nodes.
    pub fn norm_max(&self, a: &[f64]) -> f64 {
        a.iter().fold(0.0, |m, x| m.max(x.abs()))
    }

    pub fn check(&self, v: &[f64]) -> Result<()> {
        if v.len() == self.len() {
            Ok(())
        } else {
            Err(Error::LengthMismatch { expected: self.len(), actual: v.len() })
        }
    }
}

/// Nodal values over the interior nodes of a [`Grid`].
#[derive(Clone, Debug, Default, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct GridFunction(pub Vec<f64>);

impl GridFunction {
    pub fn new(values: Vec<f64>) -> Self {
        Self(values)
    }

    pub fn into_inner(self) -> Vec<f64> {
        self.0
    }

    pub fn map(&self, f: impl Fn(f64) -> f64) -> Self {
        Self(self.0.iter().map(|&x| f(x)).collect())
    }

    pub fn zip_map(&self, other: &[f64], f: impl Fn(f64, f64) -> f64) -> Self {
        debug_assert_eq!(self.len(), other.len());
        Self(self.0.iter().zip(other).map(|(&a, &b)| f(a, b)).collect())
    }

    pub fn add(&self, other: &[f64]) -> Self {
        self.zip_map(other, |a, b| a + b)
    }

    pub fn sub(&self, other: &[f64]) -> Self {
        self.zip_map(other, |a, b| a - b)
    }
}

impl Deref for GridFunction {
    type Target = [f64];
    fn deref(&self) -> &[f64] {
        &self.0
    }
}

impl DerefMut for GridFunction {
    fn deref_mut(&mut self) -> &mut [f64] {
        &mut self.0
    }
}

impl From<Vec<f64>> for GridFunction {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}
