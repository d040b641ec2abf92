//! Bang-bang-off control on `(−1, 1)` with a known solution.
//!
//! The exact state touches the obstacle `ψ ≡ 1` on `[−3/4, 3/4]`, where the
//! multiplier is a smooth bump. `f` and `y_d` are chosen so that the closed
//! forms satisfy the optimality system.

use std::f64::consts::PI;

const CONTACT: f64 = 0.75;
const K: f64 = 1.5 * PI;

pub fn state(x: f64) -> f64 {
    let a = x.abs();
    if a <= CONTACT {
        1.0
    } else {
        28.0 - 108.0 * a + 144.0 * a * a - 64.0 * a * a * a
    }
}

pub fn state_d(x: f64) -> f64 {
    let a = x.abs();
    if a <= CONTACT {
        0.0
    } else {
        x.signum() * (-108.0 + 288.0 * a - 192.0 * a * a)
    }
}

pub fn state_dd(x: f64) -> f64 {
    let a = x.abs();
    if a <= CONTACT {
        0.0
    } else {
        288.0 - 384.0 * a
    }
}

pub fn adjoint(x: f64) -> f64 {
    -2.0 * (K * x).cos()
}

pub fn adjoint_d(x: f64) -> f64 {
    2.0 * K * (K * x).sin()
}

pub fn adjoint_dd(x: f64) -> f64 {
    2.0 * K * K * (K * x).cos()
}

/// Takes values in `{−1, 0, 1}`; zero on the closed "off" intervals.
pub fn control(x: f64) -> f64 {
    let a = x.abs();
    if a < 2.0 / 9.0 {
        1.0
    } else if a <= 4.0 / 9.0 {
        0.0
    } else if a < 8.0 / 9.0 {
        -1.0
    } else {
        0.0
    }
}

pub fn multiplier(x: f64) -> f64 {
    let s = 4.0 * x / 3.0;
    if x.abs() < CONTACT {
        (-1.0 / (1.0 - s * s)).exp()
    } else {
        0.0
    }
}

/// `f = −ȳ'' − ū`.
pub fn source(x: f64) -> f64 {
    -state_dd(x) - control(x)
}

/// `y_d = p̄'' + ȳ + μ̄`.
pub fn target(x: f64) -> f64 {
    adjoint_dd(x) + state(x) + multiplier(x)
}
