//! Clearance of a pair of points.
//!
//! For `a != b` in the ball let `N = (b - a)^perp` and `x0 = (a + b)/2`.
//! `gamma^M(a, b)` is the largest `r` such that the ball of radius `r` about
//! `x0` inside `M ∩ N` stays in the unit ball; `gamma(a, b)` takes `M = R^n`.

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    check_dims, gaussian_vector, orthonormal_complement, section2d, Frame, Point,
    DEPENDENCE_RESIDUAL,
};
use crate::simplex::{canonical_simplex, circumradius, perpendicular_height, EquilateralSet};
use crate::tolerance::Tolerance;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GammaResult {
    pub value: f64,
    /// Unit vector in N along which the ball about the midpoint first hits
    /// the sphere.
    pub direction: Point,
    pub midpoint: Point,
}

fn check_pair(a: &Point, b: &Point, tol: &Tolerance) -> Result<usize> {
    let n = a.dim();
    check_dims(std::slice::from_ref(b), n)?;
    if n < 2 {
        return Err(Error::InvalidN(n));
    }
    if a.distance(b) <= tol.eps_eq {
        return Err(Error::DegenerateInput("gamma needs a != b".into()));
    }
    for p in [a, b] {
        if p.norm() > 1.0 + tol.eps_eq {
            return Err(Error::OutsideBall { norm: p.norm() });
        }
    }
    Ok(n)
}

/// Closed form `r = -p + sqrt(p^2 + 1 - |x0|^2)` with `p = <x0, u>`, where
/// `u` is the unit vector of the plane through `a, b` orthogonal to `b - a`
/// with `<u, a + b> >= 0`.
pub fn gamma(a: &Point, b: &Point, tol: &Tolerance) -> Result<GammaResult> {
    check_pair(a, b, tol)?;
    let x0 = Point::mean(&[a.clone(), b.clone()]);
    let e = (b - a).normalized().expect("a != b");
    let perp = x0.add_scaled(-x0.dot(&e), &e);
    let u = match perp.normalized().filter(|_| perp.norm() > DEPENDENCE_RESIDUAL) {
        Some(u) => u,
        None => {
            // x0 is parallel to b - a (or zero): any in-plane normal works.
            let sec = section2d(a, b)?;
            sec.basis()
                .iter()
                .map(|f| f.add_scaled(-f.dot(&e), &e))
                .max_by(|p, q| p.norm().total_cmp(&q.norm()))
                .and_then(|v| v.normalized())
                .expect("section spans a normal to b - a")
        }
    };
    let p = x0.dot(&u).max(0.0);
    let value = -p + (p * p + (1.0 - x0.norm_sq()).max(0.0)).sqrt();
    Ok(GammaResult {
        value,
        direction: u,
        midpoint: x0,
    })
}

/// Seed of the direction net used by [`gamma_bruteforce`].
const NET_SEED: u64 = 0x5eed_6a33;

/// Directions sampled per dimension of `M ∩ N`.
pub const NET_PER_DIM: usize = 2048;

/// Orthonormal basis of `M ∩ (b - a)^perp`.
pub fn subspace_intersection(m: &Frame, a: &Point, b: &Point) -> Result<Frame> {
    let e = (b - a).normalized().ok_or_else(|| Error::DegenerateInput("a = b".into()))?;
    let k = m.rank();
    let coords = Point::new(m.coordinates(&e));
    if coords.norm() <= DEPENDENCE_RESIDUAL {
        return Ok(m.clone());
    }
    if k == 1 {
        return Err(Error::EmptyIntersection);
    }
    let inner = orthonormal_complement(&[coords], k)?;
    Ok(Frame::from_orthonormal(
        inner.basis().iter().map(|c| m.embed(c.coords())).collect(),
    ))
}

/// Direct evaluation of `gamma^M(a, b)` on a grid of step `grid_step`.
///
/// The maximum of `|x0 + r d|` over a set of unit directions `d` is reached
/// at the direction with the largest `<x0, d>`, since
/// `|x0 + r d|^2 = |x0|^2 + r^2 + 2 r <x0, d>`. The directions are a seeded
/// symmetric net in `M ∩ N` plus the projection of `x0` onto that subspace.
/// Returns the largest grid value `r` for which every sampled direction stays
/// within `1 + eps_eq`.
pub fn gamma_bruteforce(a: &Point, b: &Point, m: &Frame, grid_step: f64) -> Result<f64> {
    let tol = Tolerance::default();
    let n = check_pair(a, b, &tol)?;
    if m.ambient_dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: m.ambient_dim(),
        });
    }
    if !(grid_step > 0.0 && grid_step.is_finite()) {
        return Err(Error::InvalidTolerance(format!("grid_step = {grid_step}")));
    }
    let sub = subspace_intersection(m, a, b)?;
    let d = sub.rank();
    let x0 = Point::mean(&[a.clone(), b.clone()]);
    let mut rng = ChaCha8Rng::seed_from_u64(NET_SEED ^ d as u64);
    let mut best: f64 = 0.0;
    for _ in 0..NET_PER_DIM * d {
        let Some(c) = gaussian_vector(d, &mut rng).normalized() else {
            continue;
        };
        let dir = sub.embed(c.coords());
        best = best.max(x0.dot(&dir).abs());
    }
    let worst = sub.embed(&sub.coordinates(&x0));
    if let Some(w) = worst.normalized() {
        best = best.max(x0.dot(&w));
    }
    let x0sq = x0.norm_sq();
    let limit = (1.0 + tol.eps_eq).powi(2);
    let fits = |j: u64| {
        let r = j as f64 * grid_step;
        x0sq + r * r + 2.0 * r * best <= limit
    };
    // Largest admissible grid index by bisection; fits(0) always holds.
    let (mut lo, mut hi) = (0u64, (2.0 / grid_step).ceil() as u64 + 1);
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if fits(mid) {
            lo = mid;
        } else {
            hi = mid;
        }
    }
    Ok(lo as f64 * grid_step)
}

/// Distance tolerance for the `|b - a| = 2 alpha_{n+1}` precondition of
/// [`gamma1_link`].
pub const LINK_DISTANCE_TOL: f64 = 1e-7;

/// Two maximal sets `{a, x_1..x_n}` and `{b, x_1..x_n}` sharing `n` points.
///
/// The shared points form a regular simplex of circumradius `beta_n` about
/// the midpoint inside `(b - a)^perp`, oriented with one vertex opposite the
/// clearance direction so the others stay as far from the sphere as
/// possible.
pub fn gamma1_link(a: &Point, b: &Point, tol: &Tolerance) -> Result<(EquilateralSet, EquilateralSet)> {
    let g = gamma(a, b, tol)?;
    let n = a.dim();
    let reach = 2.0 * perpendicular_height(n + 1);
    let dist = a.distance(b);
    if (dist - reach).abs() > LINK_DISTANCE_TOL {
        return Err(Error::PreconditionDistance {
            expected: reach,
            found: dist,
        });
    }
    let bn = circumradius(n);
    if g.value < bn - tol.eps_eq {
        return Err(Error::PreconditionClearance {
            gamma: g.value,
            required: bn,
        });
    }
    // Re-orthogonalize against b - a so that the shared points are exactly
    // equidistant from both ends.
    let ab = (b - a).scale(1.0 / dist);
    let mut u = g.direction.clone();
    for _ in 0..2 {
        u = u.add_scaled(-u.dot(&ab), &ab);
    }
    let u = &u.scale(1.0 / u.norm());
    let mid = a.add_scaled(0.5, &(b - a));
    let mut offsets = vec![u.scale(-bn)];
    if n > 2 {
        let rest = orthonormal_complement(&[b - a, u.clone()], n)?;
        let base = canonical_simplex(n - 2, n - 1)?;
        let along = bn / (n - 1) as f64;
        for t in base.points() {
            offsets.push(rest.embed(t.coords()).add_scaled(along, u));
        }
    } else {
        offsets.push(u.scale(bn));
    }
    let mut shared = Vec::with_capacity(n);
    for (i, off) in offsets.iter().enumerate() {
        let off = off.scale(bn / off.norm());
        let x = &mid + &off;
        if x.norm() > 1.0 + tol.eps_eq {
            return Err(Error::NotInBall {
                index: i,
                norm: x.norm(),
            });
        }
        shared.push(x);
    }
    let mut first = vec![a.clone()];
    first.extend(shared.iter().cloned());
    let mut second = vec![b.clone()];
    second.extend(shared);
    Ok((
        EquilateralSet::new(first, tol)?,
        EquilateralSet::new(second, tol)?,
    ))
}
