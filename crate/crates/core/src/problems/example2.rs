//! Two-dimensional bang-bang-off construction, posed on the square `[−2, 2]²`.
//!
//! The radial blends vanish with two derivatives at `r = 2`, so every closed
//! form is continued by zero outside the disk of radius 2. The closed forms
//! satisfy the optimality system for `β = 0` only.

/// Quintic blend from the plateau `ȳ = 1` (`r ≤ 1`) down to `0` at `r = 2`.
fn blend(r: f64) -> f64 {
    32.0 - 120.0 * r + 180.0 * r.powi(2) - 130.0 * r.powi(3) + 45.0 * r.powi(4) - 6.0 * r.powi(5)
}

fn blend_d(r: f64) -> f64 {
    -120.0 + 360.0 * r - 390.0 * r.powi(2) + 180.0 * r.powi(3) - 30.0 * r.powi(4)
}

fn blend_dd(r: f64) -> f64 {
    360.0 - 780.0 * r + 540.0 * r.powi(2) - 120.0 * r.powi(3)
}

/// Radial cutoff applied to the oscillating adjoint.
fn cutoff(r: f64) -> f64 {
    1.0 - 1.25 * r.powi(3) + 0.9375 * r.powi(4) - 0.1875 * r.powi(5)
}

/// `c'(r) / r`, regular at the origin.
fn cutoff_d_over_r(r: f64) -> f64 {
    -3.75 * r + 3.75 * r * r - 0.9375 * r.powi(3)
}

fn cutoff_dd(r: f64) -> f64 {
    -7.5 * r + 11.25 * r * r - 3.75 * r.powi(3)
}

fn radius(p: [f64; 2]) -> f64 {
    p[0].hypot(p[1])
}

pub fn state(p: [f64; 2]) -> f64 {
    let r = radius(p);
    if r < 1.0 {
        1.0
    } else if r < 2.0 {
        blend(r)
    } else {
        0.0
    }
}

pub fn state_grad(p: [f64; 2]) -> [f64; 2] {
    let r = radius(p);
    if (1.0..2.0).contains(&r) {
        let g = blend_d(r) / r;
        [g * p[0], g * p[1]]
    } else {
        [0.0, 0.0]
    }
}

pub fn state_laplacian(p: [f64; 2]) -> f64 {
    let r = radius(p);
    if (1.0..2.0).contains(&r) {
        blend_dd(r) + blend_d(r) / r
    } else {
        0.0
    }
}

pub fn adjoint(p: [f64; 2]) -> f64 {
    let r = radius(p);
    if r < 2.0 {
        p[0].sin() * p[1].sin() * cutoff(r)
    } else {
        0.0
    }
}

pub fn adjoint_grad(p: [f64; 2]) -> [f64; 2] {
    let r = radius(p);
    if r >= 2.0 {
        return [0.0, 0.0];
    }
    let (sx, cx) = p[0].sin_cos();
    let (sy, cy) = p[1].sin_cos();
    let c = cutoff(r);
    let g = cutoff_d_over_r(r) * sx * sy;
    [c * cx * sy + g * p[0], c * sx * cy + g * p[1]]
}

pub fn adjoint_laplacian(p: [f64; 2]) -> f64 {
    let r = radius(p);
    if r >= 2.0 {
        return 0.0;
    }
    let (sx, cx) = p[0].sin_cos();
    let (sy, cy) = p[1].sin_cos();
    let s = sx * sy;
    let c = cutoff(r);
    let cr = cutoff_d_over_r(r);
    // Δ(s c) = c Δs + 2 ∇s·∇c + s Δc, with Δs = −2s and Δc = c'' + c'/r
    -2.0 * s * c + 2.0 * cr * (p[0] * cx * sy + p[1] * sx * cy) + s * (cutoff_dd(r) + cr)
}

/// `ū = −sign(p̄)`, zero where `p̄` vanishes.
pub fn control(p: [f64; 2]) -> f64 {
    let v = adjoint(p);
    if v > 0.0 {
        -1.0
    } else if v < 0.0 {
        1.0
    } else {
        0.0
    }
}

pub fn multiplier(p: [f64; 2]) -> f64 {
    let r = radius(p);
    if r < 1.0 {
        (-1.0 / (1.0 - r * r)).exp()
    } else {
        0.0
    }
}

pub fn source(p: [f64; 2]) -> f64 {
    -state_laplacian(p) - control(p)
}

pub fn target(p: [f64; 2]) -> f64 {
    adjoint_laplacian(p) + state(p) + multiplier(p)
}
