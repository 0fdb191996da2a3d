use crate::error::{Error, Result};
use crate::geometry::{check_dims, tie_break_direction, Point};
use crate::simplex::perpendicular_height;
use crate::tolerance::Tolerance;

/// Waypoints from `x` to `y` in R^n, consecutive ones at distance
/// `2 alpha_{n+1}`.
///
/// Straight hops along `y - x` bring the remaining gap into `(0, 4 alpha]`;
/// the gap is then closed with one hop, or with two hops through the apex of
/// an isosceles triangle over the gap.
pub fn chain_connect(x: &Point, y: &Point, n: usize) -> Result<Vec<Point>> {
    if n < 2 {
        return Err(Error::InvalidN(n));
    }
    check_dims(&[x.clone(), y.clone()], n)?;
    let eps = Tolerance::default().eps_eq;
    let h = 2.0 * perpendicular_height(n + 1);
    let d = x.distance(y);
    if d <= eps {
        return Err(Error::DegenerateInput("chain_connect needs x != y".into()));
    }
    let dir = (y - x).scale(1.0 / d);
    let straight = ((d / h).ceil() as usize).saturating_sub(2);
    let mut out = vec![x.clone()];
    for i in 1..=straight {
        out.push(x.add_scaled(i as f64 * h, &dir));
    }
    let start = out.last().unwrap().clone();
    let rem = d - straight as f64 * h;
    if (rem - h).abs() <= eps {
        out.push(y.clone());
        return Ok(out);
    }
    let half = 0.5 * rem.min(2.0 * h);
    let offset = (h * h - half * half).max(0.0).sqrt();
    let mid = start.add_scaled(half, &dir);
    let apex = if offset > 0.0 {
        mid.add_scaled(offset, &tie_break_direction(&[dir], n)?)
    } else {
        mid
    };
    out.push(apex);
    out.push(y.clone());
    Ok(out)
}
