//! Scalar radius functions, the shell circuit, candidate weight functions
//! and the falsifier.
//!
//! For `rho` in `[beta_n, 1]`:
//!
//! * `eta_n(rho) = alpha_{n+1} - sqrt(rho^2 - beta_n^2)` is the norm of the
//!   apex completing a maximal set whose other `n` points sit at norm `rho`
//!   around the origin;
//! * `mu_n(rho) = 1 - eta_n(rho)` and `nu_n(rho) = rho - mu_n(rho)`.

mod chain;
mod circuit;
mod falsify;

pub use chain::chain_connect;
pub use circuit::{
    bridge_point, circle_intersections, corner_angle_for, corner_norm, shell_circuit,
    shell_circuit_with, sin_owa_closed_form, sin_owh_closed_form, triangle_angle, wrap as wrap_angle, Arc, CircuitPlan, LinkMove, P2,
};
pub use falsify::{
    falsify, falsify_with_threshold, frame_weight_sum, sphere_frame, Domain, FalsifyReport, Verdict, WeightFn,
    DISPROOF_THRESHOLD, SPHERE_RADIUS,
};

use crate::error::{Error, Result};
use crate::simplex::{circumradius, perpendicular_height};

/// Slack accepted at either end of `[beta_n, 1]` before clamping.
const CLAMP_SLACK: f64 = 1e-9;

fn check_n(n: usize) -> Result<()> {
    if n < 1 {
        return Err(Error::InvalidN(n));
    }
    Ok(())
}

fn clamp_radius(n: usize, rho: f64) -> Result<f64> {
    check_n(n)?;
    let lo = circumradius(n);
    if !(rho >= lo - CLAMP_SLACK && rho <= 1.0 + CLAMP_SLACK) {
        return Err(Error::RadiusOutOfRange { rho, lo, hi: 1.0 });
    }
    Ok(rho.clamp(lo, 1.0))
}

/// `eta_n(rho) = alpha_{n+1} - sqrt(rho^2 - beta_n^2)`.
pub fn eta(n: usize, rho: f64) -> Result<f64> {
    let rho = clamp_radius(n, rho)?;
    let b = circumradius(n);
    Ok(perpendicular_height(n + 1) - (rho * rho - b * b).max(0.0).sqrt())
}

/// `mu_n(rho) = 1 - eta_n(rho)`.
pub fn mu(n: usize, rho: f64) -> Result<f64> {
    Ok(1.0 - eta(n, rho)?)
}

/// `nu_n(rho) = rho - mu_n(rho)`.
pub fn nu(n: usize, rho: f64) -> Result<f64> {
    let r = clamp_radius(n, rho)?;
    Ok(r - mu(n, r)?)
}

/// Bisection on an increasing function over `[lo, hi]`.
fn bisect_increasing(f: impl Fn(f64) -> f64, target: f64, mut lo: f64, mut hi: f64) -> f64 {
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if f(mid) < target {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    // Return whichever endpoint is closer in value.
    if (f(lo) - target).abs() <= (f(hi) - target).abs() {
        lo
    } else {
        hi
    }
}

/// Solves `mu_n(rho) = t` for `rho` in `[beta_n, 1]` by bisection.
pub fn mu_inverse(n: usize, t: f64) -> Result<f64> {
    check_n(n)?;
    let lo_t = 1.0 - perpendicular_height(n + 1);
    if !(t >= lo_t - CLAMP_SLACK && t <= 1.0 + CLAMP_SLACK) {
        return Err(Error::TargetOutOfRange { t, lo: lo_t, hi: 1.0 });
    }
    let f = |r: f64| 1.0 - (perpendicular_height(n + 1) - (r * r - circumradius(n).powi(2)).max(0.0).sqrt());
    Ok(bisect_increasing(f, t.clamp(lo_t, 1.0), circumradius(n), 1.0))
}

/// Solves `eta_n(rho) = t` for `rho` in `[floor, 1]` by bisection.
///
/// This is the radius at which `n` companions of a point of norm `t` sit in a
/// maximal set containing the origin in its hull.
pub fn eta_inverse(n: usize, t: f64, floor: f64) -> Result<f64> {
    let floor = clamp_radius(n, floor)?;
    let top = eta(n, floor)?;
    if !(t >= -CLAMP_SLACK && t <= top + CLAMP_SLACK) {
        return Err(Error::RadiusSolveFailure { target: t });
    }
    let t = t.clamp(0.0, top);
    // -eta is increasing.
    let f = |r: f64| -(perpendicular_height(n + 1) - (r * r - circumradius(n).powi(2)).max(0.0).sqrt());
    Ok(bisect_increasing(f, -t, floor, 1.0))
}

/// Radius of the outer annulus on which circuit links force constancy:
/// `(1/sqrt2) (1 + sqrt(4 + 4/n) - sqrt(3 + 4/n))`.
pub fn lambda_shell(n: usize) -> Result<f64> {
    if n < 2 {
        return Err(Error::InvalidN(n));
    }
    let nf = n as f64;
    Ok(std::f64::consts::FRAC_1_SQRT_2 * (1.0 + (4.0 + 4.0 / nf).sqrt() - (3.0 + 4.0 / nf).sqrt()))
}
