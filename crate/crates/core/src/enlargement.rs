//! Enlarging standard equilateral sets inside the ball to maximal ones, and
//! the centre bounds that keep each new point in the ball.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{orthonormal_span, tie_break_direction, Point};
use crate::simplex::{circumradius, perpendicular_height, EquilateralSet};
use crate::tolerance::Tolerance;

/// Threshold below which `a = (I - P_N) c` is treated as zero.
pub const ZERO_OFFSET: f64 = 1e-10;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EnlargeStep {
    /// Size of the set before the step.
    pub k: usize,
    /// Dimension of `N = span{x_i - c}`.
    pub subspace_dim: usize,
    pub a: Point,
    pub u: Point,
    pub new_point: Point,
}

#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct EnlargeTrace {
    pub steps: Vec<EnlargeStep>,
}

/// Checks distances and the in-ball condition. Returns the output
/// tolerance: `eps_eq`, widened tenfold if some input norm lies in
/// `(1, 1 + eps_eq]`.
fn check_input(s: &EquilateralSet, tol: &Tolerance) -> Result<f64> {
    let err = s.max_distance_error();
    if err > tol.eps_eq {
        return Err(Error::InvalidSet(format!("pairwise distance error {err:e}")));
    }
    let mut eps = tol.eps_eq;
    for (index, p) in s.points().iter().enumerate() {
        let norm = p.norm();
        if norm > 1.0 + tol.eps_eq {
            return Err(Error::NotInBall { index, norm });
        }
        if norm > 1.0 {
            eps = 10.0 * tol.eps_eq;
        }
    }
    Ok(eps)
}

/// Adds `x_{k+1} = c - alpha_{k+1} v`, where `c` is the centre, `N` the span
/// of `x_i - c`, `a = (I - P_N) c` and `v = a / |a|` (or the tie-break unit
/// vector of `N^perp` when `a = 0`).
pub fn enlarge_step(s: &EquilateralSet, tol: &Tolerance) -> Result<(EquilateralSet, EnlargeStep)> {
    let n = s.n();
    let k = s.len();
    if k >= n + 1 {
        return Err(Error::AlreadyMaximal { n, k });
    }
    let eps = check_input(s, tol)?;
    let c = s.mean();
    let diffs: Vec<Point> = s.points().iter().map(|p| p - &c).collect();
    let span = orthonormal_span(&diffs);
    let mut a = c.clone();
    for f in &span {
        a = a.add_scaled(-a.dot(f), f);
    }
    let v = if a.norm() > ZERO_OFFSET {
        a.normalized().expect("nonzero")
    } else {
        tie_break_direction(&span, n)?
    };
    let u = v.scale(-perpendicular_height(k + 1));
    let x = &c + &u;
    let norm = x.norm();
    if norm > 1.0 + eps {
        return Err(Error::NotInBall { index: k, norm });
    }
    let mut out = s.clone();
    out.push(x.clone());
    let err = out.max_distance_error();
    if err > eps {
        return Err(Error::InvalidSet(format!("enlarged set has distance error {err:e}")));
    }
    Ok((
        out,
        EnlargeStep {
            k,
            subspace_dim: span.len(),
            a,
            u,
            new_point: x,
        },
    ))
}

/// Repeats [`enlarge_step`] until the set has `n + 1` points.
pub fn enlarge_to_maximal(s: &EquilateralSet, tol: &Tolerance) -> Result<(EquilateralSet, EnlargeTrace)> {
    check_input(s, tol)?;
    let mut cur = s.clone();
    let mut trace = EnlargeTrace::default();
    while cur.len() < cur.n() + 1 {
        let (next, step) = enlarge_step(&cur, tol)?;
        trace.steps.push(step);
        cur = next;
    }
    Ok((cur, trace))
}

/// A valid in-ball set is maximal exactly when it has `n + 1` points.
pub fn is_maximal(s: &EquilateralSet, tol: &Tolerance) -> Result<bool> {
    check_input(s, tol)?;
    Ok(s.len() == s.n() + 1)
}

/// `(|c|, bound)` with bound `alpha_{k+1}` for `k <= n` and `beta_{n+1}` for
/// maximal sets.
pub fn center_norm_bound(s: &EquilateralSet, tol: &Tolerance) -> Result<(f64, f64)> {
    check_input(s, tol)?;
    let k = s.len();
    let bound = if k == s.n() + 1 {
        circumradius(k)
    } else {
        perpendicular_height(k + 1)
    };
    Ok((s.mean().norm(), bound))
}

/// Membership of `x` in `K = {<x, v> <= 1/2, <x, x_i> >= 0 for i >= 2}`,
/// where `v = x_2 + ... + x_{n+1}` for a centred maximal set. Also returns
/// `<x, v>`.
pub fn k_region_test(x: &Point, s: &EquilateralSet, tol: &Tolerance) -> Result<(bool, f64)> {
    let n = s.n();
    if x.dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: x.dim(),
        });
    }
    if s.len() != n + 1 {
        return Err(Error::InvalidSet(format!("expected {} points, got {}", n + 1, s.len())));
    }
    let c = s.mean().norm();
    if c > tol.eps_eq {
        return Err(Error::NotCentered { norm: c });
    }
    let rest = &s.points()[1..];
    let v = rest.iter().fold(Point::zeros(n), |acc, p| &acc + p);
    let ip = x.dot(&v);
    let member = ip <= 0.5 + tol.eps_eq && rest.iter().all(|p| x.dot(p) >= -tol.eps_eq);
    Ok((member, ip))
}
