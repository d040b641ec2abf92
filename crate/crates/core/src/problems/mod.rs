//! Benchmark problem instances and their closed-form solutions.

pub mod example1;
pub mod example2;

use std::f64::consts::PI;
use std::fmt;
use std::sync::Arc;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::pde::{Grid, GridFunction, Point};

/// A scalar field evaluated pointwise.
pub type Field = Arc<dyn Fn(Point) -> f64 + Send + Sync>;

pub fn constant(value: f64) -> Field {
    Arc::new(move |_| value)
}

/// Names accepted by [`by_name`].
pub const PROBLEM_NAMES: [&str; 4] = ["example1", "example2_rect", "example3", "tikhonov_sanity"];

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum Domain {
    Interval { lower: f64, upper: f64 },
    Rectangle { x: (f64, f64), y: (f64, f64) },
}

impl Domain {
    /// Uniform grid with `cells` cells along every axis.
    pub fn grid(&self, cells: usize) -> Result<Grid> {
        match *self {
            Domain::Interval { lower, upper } => Grid::interval(lower, upper, cells),
            Domain::Rectangle { x, y } => Grid::rectangle(x, y, cells, cells),
        }
    }

    pub fn dim(&self) -> usize {
        match self {
            Domain::Interval { .. } => 1,
            Domain::Rectangle { .. } => 2,
        }
    }
}

/// Closed-form optimal control, state, adjoint and multiplier.
#[derive(Clone)]
pub struct ExactSolution {
    pub control: Field,
    pub state: Field,
    pub adjoint: Field,
    pub multiplier: Field,
}

/// Exact solution sampled on a grid.
#[derive(Clone, Debug, PartialEq)]
pub struct ExactFields {
    pub control: GridFunction,
    pub state: GridFunction,
    pub adjoint: GridFunction,
    pub multiplier: GridFunction,
}

/// `min ½‖y − y_d‖² + β‖u‖_{L¹}` subject to `−Δy = u + f`, `y ≤ ψ`, `u_a ≤ u ≤ u_b`.
#[derive(Clone)]
pub struct ProblemSpec {
    pub name: String,
    pub domain: Domain,
    pub lower: Field,
    pub upper: Field,
    pub beta: f64,
    pub obstacle: Field,
    pub target: Field,
    pub source: Field,
    pub exact: Option<ExactSolution>,
}

impl fmt::Debug for ProblemSpec {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("ProblemSpec")
            .field("name", &self.name)
            .field("domain", &self.domain)
            .field("beta", &self.beta)
            .field("exact", &self.exact.is_some())
            .finish_non_exhaustive()
    }
}

impl ProblemSpec {
    /// A problem whose data are all constants; used for configuration-file problems.
    #[allow(clippy::too_many_arguments)]
    pub fn constant(
        name: impl Into<String>,
        domain: Domain,
        lower: f64,
        upper: f64,
        beta: f64,
        obstacle: f64,
        target: f64,
        source: f64,
    ) -> Self {
        Self {
            name: name.into(),
            domain,
            lower: constant(lower),
            upper: constant(upper),
            beta,
            obstacle: constant(obstacle),
            target: constant(target),
            source: constant(source),
            exact: None,
        }
    }

    pub fn with_beta(mut self, beta: f64) -> Self {
        self.beta = beta;
        self
    }

    pub fn has_exact(&self) -> bool {
        self.exact.is_some()
    }

    /// Checks `β ≥ 0`, `u_a ≤ 0 ≤ u_b` and finiteness of `ψ` at the nodes of `grid`.
    pub fn validate(&self, grid: &Grid) -> Result<()> {
        if !(self.beta >= 0.0 && self.beta.is_finite()) {
            return Err(Error::InvalidProblem(format!("β must be ≥ 0, got {}", self.beta)));
        }
        if grid.dim() != self.domain.dim() {
            return Err(Error::InvalidProblem(format!(
                "{}-dimensional problem on a {}-dimensional grid",
                self.domain.dim(),
                grid.dim()
            )));
        }
        for x in grid.points() {
            let (a, b) = ((self.lower)(x), (self.upper)(x));
            if !(a <= 0.0 && 0.0 <= b) {
                return Err(Error::InvalidProblem(format!("need u_a ≤ 0 ≤ u_b, got [{a}, {b}] at {x:?}")));
            }
            if !(self.obstacle)(x).is_finite() {
                return Err(Error::InvalidProblem(format!("ψ is not finite at {x:?}")));
            }
        }
        Ok(())
    }
}

/// Bang-bang-off example on `(−1, 1)` with `u ∈ [−1, 1]`, `β = 1`, `ψ ≡ 1`.
pub fn example1() -> ProblemSpec {
    let f = |g: fn(f64) -> f64| -> Field { Arc::new(move |p: Point| g(p[0])) };
    ProblemSpec {
        name: "example1".into(),
        domain: Domain::Interval { lower: -1.0, upper: 1.0 },
        lower: constant(-1.0),
        upper: constant(1.0),
        beta: 1.0,
        obstacle: constant(1.0),
        target: f(example1::target),
        source: f(example1::source),
        exact: Some(ExactSolution {
            control: f(example1::control),
            state: f(example1::state),
            adjoint: f(example1::adjoint),
            multiplier: f(example1::multiplier),
        }),
    }
}

/// The two-dimensional bang-bang-off construction on `[−2, 2]²`.
///
/// The closed forms solve the problem only for `β = 0`, so the exact bundle
/// is attached only in that case.
pub fn example2_rect(beta: f64) -> ProblemSpec {
    let exact = (beta == 0.0).then(|| ExactSolution {
        control: Arc::new(example2::control),
        state: Arc::new(example2::state),
        adjoint: Arc::new(example2::adjoint),
        multiplier: Arc::new(example2::multiplier),
    });
    ProblemSpec {
        name: "example2_rect".into(),
        domain: Domain::Rectangle { x: (-2.0, 2.0), y: (-2.0, 2.0) },
        lower: constant(-1.0),
        upper: constant(1.0),
        beta,
        obstacle: constant(1.0),
        target: Arc::new(example2::target),
        source: Arc::new(example2::source),
        exact,
    }
}

/// Unit square, `ψ ≡ 0.01`, `y_d = sin(πx) sin(πy) / 2π`, `β = 10⁻³`; no known solution.
pub fn example3() -> ProblemSpec {
    ProblemSpec {
        name: "example3".into(),
        domain: Domain::Rectangle { x: (0.0, 1.0), y: (0.0, 1.0) },
        lower: constant(-1.0),
        upper: constant(1.0),
        beta: 1e-3,
        obstacle: constant(0.01),
        target: Arc::new(|p: Point| (PI * p[0]).sin() * (PI * p[1]).sin() / (2.0 * PI)),
        source: constant(0.0),
        exact: None,
    }
}

/// Obstacle far above any reachable state, so the state constraint never
/// binds and the solution reduces to the box/L¹ Tikhonov problem.
pub const SANITY_OBSTACLE: f64 = 1e6;
pub const SANITY_BETA: f64 = 1e-2;

/// Sanity problem on `(0, 1)` with target `y_d(x) = sin(πx) / 5`.
pub fn unconstrained_tikhonov() -> ProblemSpec {
    unconstrained_tikhonov_with(Arc::new(|p: Point| 0.2 * (PI * p[0]).sin()))
}

pub fn unconstrained_tikhonov_with(target: Field) -> ProblemSpec {
    ProblemSpec {
        name: "tikhonov_sanity".into(),
        domain: Domain::Interval { lower: 0.0, upper: 1.0 },
        lower: constant(-1.0),
        upper: constant(1.0),
        beta: SANITY_BETA,
        obstacle: constant(SANITY_OBSTACLE),
        target,
        source: constant(0.0),
        exact: None,
    }
}

/// Looks a problem up by its CLI name. `beta` overrides the default weight.
pub fn by_name(name: &str, beta: Option<f64>) -> Result<ProblemSpec> {
    let spec = match name {
        "example1" => example1(),
        "example2_rect" => example2_rect(beta.unwrap_or(0.1)),
        "example3" => example3(),
        "tikhonov_sanity" => unconstrained_tikhonov(),
        other => {
            return Err(Error::InvalidProblem(format!(
                "unknown problem `{other}` (expected one of {})",
                PROBLEM_NAMES.join(", ")
            )))
        }
    };
    Ok(match beta {
        Some(b) if name != "example2_rect" => {
            // the exact bundle is only valid for the built-in weight
            let mut s = spec.with_beta(b);
            if name == "example1" && b != 1.0 {
                s.exact = None;
            }
            s
        }
        _ => spec,
    })
}

/// Samples the exact solution at the interior nodes of `grid`.
pub fn eval_exact(spec: &ProblemSpec, grid: &Grid) -> Result<ExactFields> {
    let exact = spec.exact.as_ref().ok_or_else(|| Error::NoExactSolution(spec.name.clone()))?;
    Ok(ExactFields {
        control: grid.sample(&*exact.control),
        state: grid.sample(&*exact.state),
        adjoint: grid.sample(&*exact.adjoint),
        multiplier: grid.sample(&*exact.multiplier),
    })
}
