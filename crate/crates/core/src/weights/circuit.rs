//! The shell circuit in a two-dimensional section of the ball.
//!
//! In section coordinates the quadruple `w, x, y, z` sits on the unit circle
//! at angles `-90, 180, 90, 0` degrees (plus a rotation). Circles of radius
//! `2 alpha_{n+1}` about consecutive quadruple points meet inside the disc at
//! the corners `a, b, c, d`, and arcs of the same radius about the corners
//! close up into a circuit through the quadruple. Every point of an arc is
//! at distance `2 alpha_{n+1}` from the arc's centre.

use std::f64::consts::{PI, SQRT_2};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::gamma::gamma;
use crate::geometry::{Frame, Point};
use crate::simplex::{circumradius, perpendicular_height};
use crate::tolerance::Tolerance;

/// A point of the section plane.
pub type P2 = [f64; 2];

fn sub(a: P2, b: P2) -> P2 {
    [a[0] - b[0], a[1] - b[1]]
}

fn norm(a: P2) -> f64 {
    a[0].hypot(a[1])
}

fn rotate(p: P2, angle: f64) -> P2 {
    let (s, c) = angle.sin_cos();
    [c * p[0] - s * p[1], s * p[0] + c * p[1]]
}

fn polar(r: f64, theta: f64) -> P2 {
    [r * theta.cos(), r * theta.sin()]
}

fn angle_of(p: P2) -> f64 {
    p[1].atan2(p[0])
}

/// Sine of the angle at `vertex` between the rays to `p` and `q`.
fn sin_angle(vertex: P2, p: P2, q: P2) -> f64 {
    let u = sub(p, vertex);
    let v = sub(q, vertex);
    (u[0] * v[1] - u[1] * v[0]).abs() / (norm(u) * norm(v))
}

/// Wraps an angle into `(-pi, pi]`.
pub fn wrap(theta: f64) -> f64 {
    let t = theta.rem_euclid(2.0 * PI);
    if t > PI {
        t - 2.0 * PI
    } else {
        t
    }
}

/// Intersection points of two circles (zero, one or two of them).
pub fn circle_intersections(c1: P2, r1: f64, c2: P2, r2: f64) -> Vec<P2> {
    let d = sub(c2, c1);
    let dist = norm(d);
    if dist == 0.0 || dist > r1 + r2 || dist < (r1 - r2).abs() {
        return Vec::new();
    }
    let along = (r1 * r1 - r2 * r2 + dist * dist) / (2.0 * dist);
    let h = (r1 * r1 - along * along).max(0.0).sqrt();
    let ex = [d[0] / dist, d[1] / dist];
    let base = [c1[0] + along * ex[0], c1[1] + along * ex[1]];
    let off = [-ex[1] * h, ex[0] * h];
    if h == 0.0 {
        vec![base]
    } else {
        vec![
            [base[0] + off[0], base[1] + off[1]],
            [base[0] - off[0], base[1] - off[1]],
        ]
    }
}

/// Intersection inside the closed unit disc with the smallest norm.
fn inner_intersection(c1: P2, r1: f64, c2: P2, r2: f64) -> Option<P2> {
    circle_intersections(c1, r1, c2, r2)
        .into_iter()
        .filter(|p| norm(*p) <= 1.0 + 1e-12)
        .min_by(|p, q| norm(*p).total_cmp(&norm(*q)))
}

/// `|oa|`, the common norm of the four corners:
/// `sqrt2 * (-1 + sqrt(8 alpha^2 - 1)) / 2`.
pub fn corner_norm(n: usize) -> f64 {
    let a = perpendicular_height(n + 1);
    SQRT_2 * (-1.0 + (8.0 * a * a - 1.0).sqrt()) / 2.0
}

/// Angle between the sides `a` and `b` of a triangle whose third side is
/// `c`, via Kahan's stable form of Heron's formula and `atan2`, which stays
/// accurate for nearly degenerate triangles where `acos` does not.
pub fn triangle_angle(a: f64, b: f64, c: f64) -> f64 {
    let mut s = [a, b, c];
    s.sort_by(|x, y| y.total_cmp(x));
    let [p, q, r] = s;
    let prod = (p + (q + r)) * (r - (p - q)) * (r + (p - q)) * (p + (q - r));
    let area4 = prod.max(0.0).sqrt();
    // sin = area4 / (2 a b) and cos = (a^2 + b^2 - c^2) / (2 a b).
    area4.atan2(a * a + b * b - c * c)
}

/// Angle of the corner whose arc passes through the point at polar
/// coordinates `(r, theta)`, for `lambda_n <= r <= 1`.
///
/// The corner lies at norm [`corner_norm`]; the returned angle is the
/// counter-clockwise solution of `|p - corner| = 2 alpha_{n+1}`.
pub fn corner_angle_for(n: usize, r: f64, theta: f64) -> f64 {
    let s = corner_norm(n);
    let reach = 2.0 * perpendicular_height(n + 1);
    wrap(theta + triangle_angle(r, s, reach))
}

/// The point where the arcs about the corners at angles `phi1` and `phi2`
/// cross inside the disc. Requires `|phi2 - phi1| < pi/2`.
pub fn bridge_point(n: usize, phi1: f64, phi2: f64) -> P2 {
    let s = corner_norm(n);
    let reach = 2.0 * perpendicular_height(n + 1);
    let half = 0.5 * wrap(phi2 - phi1);
    let t = -s * half.cos() + (reach * reach - (s * half.sin()).powi(2)).sqrt();
    polar(t, phi1 + half + PI)
}

/// An arc of a circle, from `theta_start` counter-clockwise to `theta_end`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Arc {
    pub label: String,
    pub center: P2,
    pub radius: f64,
    pub theta_start: f64,
    pub theta_end: f64,
}

impl Arc {
    /// The arc about `center` between `p1` and `p2` that passes through the
    /// direction `toward` (seen from the centre).
    fn through(label: &str, center: P2, radius: f64, p1: P2, p2: P2, toward: P2) -> Self {
        let mid = angle_of(toward);
        let a1 = wrap(angle_of(sub(p1, center)) - mid).abs();
        let a2 = wrap(angle_of(sub(p2, center)) - mid).abs();
        let half = a1.max(a2);
        Self {
            label: label.to_string(),
            center,
            radius,
            theta_start: mid - half,
            theta_end: mid + half,
        }
    }

    pub fn point_at(&self, fraction: f64) -> P2 {
        let th = self.theta_start + fraction * (self.theta_end - self.theta_start);
        let p = polar(self.radius, th);
        [self.center[0] + p[0], self.center[1] + p[1]]
    }

    /// Whether `p` is on the arc (within `eps` in radius and angle).
    pub fn contains(&self, p: P2, eps: f64) -> bool {
        let d = sub(p, self.center);
        if (norm(d) - self.radius).abs() > eps {
            return false;
        }
        let offset = (angle_of(d) - self.theta_start).rem_euclid(2.0 * PI);
        let span = self.theta_end - self.theta_start;
        offset <= span + eps || offset >= 2.0 * PI - eps
    }
}

/// A pair of points at distance `2 alpha_{n+1}` whose clearance has been
/// re-checked, so that they may be joined by two maximal sets sharing `n`
/// points.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LinkMove {
    pub from: Point,
    pub to: Point,
    pub gamma: f64,
}

/// The quadruple, corners, arcs and verified link moves of one circuit.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CircuitPlan {
    pub n: usize,
    pub rotation_angle: f64,
    pub section: Frame,
    /// `w, x, y, z` in section coordinates.
    pub quadruple: [P2; 4],
    /// `a, b, c, d` in section coordinates.
    pub corners: [P2; 4],
    /// Arcs about `w, x, y, z` followed by the circuit arcs about `a, b, c, d`.
    pub arcs: Vec<Arc>,
    pub link_moves: Vec<LinkMove>,
    pub sin_owa: f64,
    pub sin_owh: f64,
}

impl CircuitPlan {
    /// The four circuit arcs `C_a, C_b, C_c, C_d`.
    pub fn circuit_arcs(&self) -> &[Arc] {
        &self.arcs[4..]
    }

    pub fn embed(&self, p: P2) -> Point {
        self.section.embed(&p)
    }

    /// A point shared by the circuits of `self` and `other` (same section),
    /// if one exists.
    pub fn intersection(&self, other: &CircuitPlan) -> Option<P2> {
        for a1 in self.circuit_arcs() {
            for a2 in other.circuit_arcs() {
                for p in circle_intersections(a1.center, a1.radius, a2.center, a2.radius) {
                    if norm(p) <= 1.0 + 1e-12 && a1.contains(p, 1e-9) && a2.contains(p, 1e-9) {
                        return Some(p);
                    }
                }
            }
        }
        None
    }
}

/// `sin(owa) = (sqrt(3 + 1/(n+1)) - sqrt(1 - 1/(n+1))) / (2 sqrt2)`.
pub fn sin_owa_closed_form(n: usize) -> f64 {
    let m = (n + 1) as f64;
    ((3.0 + 1.0 / m).sqrt() - (1.0 - 1.0 / m).sqrt()) / (2.0 * SQRT_2)
}

/// `sin(owh) = (sqrt(3 + 3/n) - sqrt(1 - 1/n)) / (2 sqrt2)`.
pub fn sin_owh_closed_form(n: usize) -> f64 {
    let m = n as f64;
    ((3.0 + 3.0 / m).sqrt() - (1.0 - 1.0 / m).sqrt()) / (2.0 * SQRT_2)
}

/// Default number of waypoint intervals per circuit arc.
pub const WAYPOINTS_PER_ARC: usize = 8;

/// Builds the circuit for the quadruple rotated by `rotation_angle` inside
/// `section`, with [`WAYPOINTS_PER_ARC`] link moves per arc.
pub fn shell_circuit(n: usize, section: &Frame, rotation_angle: f64) -> Result<CircuitPlan> {
    shell_circuit_with(n, section, rotation_angle, WAYPOINTS_PER_ARC)
}

pub fn shell_circuit_with(
    n: usize,
    section: &Frame,
    rotation_angle: f64,
    per_arc: usize,
) -> Result<CircuitPlan> {
    if n < 2 {
        return Err(Error::InvalidN(n));
    }
    if section.rank() != 2 {
        return Err(Error::DegenerateInput(format!(
            "section must be two-dimensional, got rank {}",
            section.rank()
        )));
    }
    if section.ambient_dim() != n {
        return Err(Error::DimensionMismatch {
            expected: n,
            found: section.ambient_dim(),
        });
    }
    let reach = 2.0 * perpendicular_height(n + 1);
    let quad = [[0.0, -1.0], [-1.0, 0.0], [0.0, 1.0], [1.0, 0.0]].map(|p| rotate(p, rotation_angle));
    let mut corners = [[0.0; 2]; 4];
    for i in 0..4 {
        corners[i] = inner_intersection(quad[i], reach, quad[(i + 1) % 4], reach).ok_or_else(|| {
            Error::DegenerateInput(format!("arcs about quadruple points {i} and {} miss", (i + 1) % 4))
        })?;
    }

    let mut arcs = Vec::with_capacity(8);
    for (i, label) in ["C_w", "C_x", "C_y", "C_z"].iter().enumerate() {
        // Corners on the arc about quad[i] are the ones shared with its neighbours.
        let prev = corners[(i + 3) % 4];
        let next = corners[i];
        arcs.push(Arc::through(label, quad[i], reach, prev, next, [-quad[i][0], -quad[i][1]]));
    }
    for (i, label) in ["C_a", "C_b", "C_c", "C_d"].iter().enumerate() {
        let c = corners[i];
        arcs.push(Arc::through(label, c, reach, quad[i], quad[(i + 1) % 4], [-c[0], -c[1]]));
    }

    let tol = Tolerance::default();
    let required = circumradius(n);
    let mut link_moves = Vec::new();
    for arc in &arcs[4..] {
        let center = section.embed(&arc.center);
        for j in 0..=per_arc {
            let p = section.embed(&arc.point_at(j as f64 / per_arc as f64));
            let g = gamma(&p, &center, &tol)?.value;
            if g < required - tol.eps_eq {
                return Err(Error::ClearanceFailure {
                    index: link_moves.len(),
                    gamma: g,
                    required,
                });
            }
            link_moves.push(LinkMove {
                from: p,
                to: center.clone(),
                gamma: g,
            });
        }
    }

    // The auxiliary point g sits on the unit circle 60 degrees from w; the
    // unit circle about g meets C_w inside the disc at h.
    let w = quad[0];
    let g = rotate([3f64.sqrt() / 2.0, -0.5], rotation_angle);
    let h = inner_intersection(g, 1.0, w, reach)
        .ok_or_else(|| Error::DegenerateInput("unit circle about g misses C_w".into()))?;
    let sin_owa = sin_angle(w, [0.0, 0.0], corners[0]);
    let sin_owh = sin_angle(w, [0.0, 0.0], h);

    Ok(CircuitPlan {
        n,
        rotation_angle,
        section: section.clone(),
        quadruple: quad,
        corners,
        arcs,
        link_moves,
        sin_owa,
        sin_owh,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::weights::lambda_shell;

    #[test]
    fn corner_matches_closed_form_n2() {
        let plan = shell_circuit(2, &Frame::identity(2), 0.0).unwrap();
        let want = (5f64.sqrt() - 1.0) / 2.0;
        assert!((plan.corners[0][0] - want).abs() < 1e-12);
        assert!((plan.corners[0][1] - want).abs() < 1e-12);
        assert!((plan.corners[0][0] - 0.6180).abs() < 1e-4);
    }

    #[test]
    fn corners_and_lambda_for_all_n() {
        for n in 2..=64 {
            let sec = crate::geometry::section2d(&Point::axis(n, 0), &Point::axis(n, 1)).unwrap();
            let plan = shell_circuit_with(n, &sec, 0.0, 2).unwrap();
            let a = perpendicular_height(n + 1);
            let c = (-1.0 + (8.0 * a * a - 1.0).sqrt()) / 2.0;
            assert!((plan.corners[0][0] - c).abs() < 1e-12);
            assert!((plan.corners[0][1] - c).abs() < 1e-12);
            let lam = 2.0 * a - norm(plan.corners[0]);
            assert!((lambda_shell(n).unwrap() - lam).abs() < 1e-12);
            assert!((corner_norm(n) - norm(plan.corners[0])).abs() < 1e-12);
            for k in 0..4 {
                assert!((plan.corners[k][0].abs() - c).abs() < 1e-12);
                assert!((plan.corners[k][1].abs() - c).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn sines_match_closed_forms() {
        for n in 2..=64 {
            let sec = crate::geometry::section2d(&Point::axis(n, 0), &Point::axis(n, 1)).unwrap();
            let plan = shell_circuit_with(n, &sec, 0.3, 1).unwrap();
            assert!((plan.sin_owa - sin_owa_closed_form(n)).abs() < 1e-12, "n={n}");
            assert!((plan.sin_owh - sin_owh_closed_form(n)).abs() < 1e-12, "n={n}");
            assert!(plan.sin_owa <= plan.sin_owh);
        }
    }

    #[test]
    fn link_moves_have_exact_reach_and_clearance() {
        for n in 2..=6 {
            let sec = crate::geometry::section2d(&Point::axis(n, 0), &Point::axis(n, n - 1)).unwrap();
            let plan = shell_circuit_with(n, &sec, 0.7, 32).unwrap();
            let reach = 2.0 * perpendicular_height(n + 1);
            assert_eq!(plan.link_moves.len(), 4 * 33);
            for m in &plan.link_moves {
                assert!((m.from.distance(&m.to) - reach).abs() < 1e-12);
                assert!(m.gamma >= circumradius(n) - 1e-9);
                assert!(m.from.norm() <= 1.0 + 1e-12);
            }
            // The arcs close up through the quadruple.
            for (i, arc) in plan.circuit_arcs().iter().enumerate() {
                let p0 = arc.point_at(0.0);
                let p1 = arc.point_at(1.0);
                let ends = [plan.quadruple[i], plan.quadruple[(i + 1) % 4]];
                for p in [p0, p1] {
                    assert!(ends.iter().any(|q| norm(sub(p, *q)) < 1e-12));
                }
                // The innermost point of the arc sits at radius lambda.
                let inner = arc.point_at(0.5);
                assert!((norm(inner) - lambda_shell(n).unwrap()).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn corner_angle_and_bridge() {
        let n = 3;
        let reach = 2.0 * perpendicular_height(n + 1);
        let s = corner_norm(n);
        for &(r, th) in &[(lambda_shell(n).unwrap(), 0.2), (0.95, -2.0), (1.0, 3.0)] {
            let phi = corner_angle_for(n, r, th);
            let d = norm(sub(polar(r, th), polar(s, phi)));
            assert!((d - reach).abs() < 1e-12);
        }
        for (a, b, c) in [(3.0, 4.0, 5.0), (1.0, 1.0, 1.0), (1.0, 2.0, 3.0), (2.0, 1.0, 1.0 - 1e-12)] {
            let want = ((a * a + b * b - c * c) / (2.0 * a * b) as f64).clamp(-1.0, 1.0).acos();
            assert!((triangle_angle(a, b, c) - want).abs() < 1e-5);
        }
        for &(p1, p2) in &[(0.0, 1.0), (2.0, 1.1), (3.0, -3.0)] {
            let b = bridge_point(n, p1, p2);
            assert!((norm(sub(b, polar(s, p1))) - reach).abs() < 1e-12);
            assert!((norm(sub(b, polar(s, p2))) - reach).abs() < 1e-12);
            assert!(norm(b) <= 1.0);
        }
    }

    #[test]
    fn rotated_circuits_intersect() {
        use rand::{Rng, SeedableRng};
        let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(9);
        let sec = Frame::identity(2);
        for _ in 0..50 {
            let base = rng.random_range(0.0..2.0 * PI);
            let delta = rng.random_range(1e-3..PI / 2.0 - 1e-3);
            let c1 = shell_circuit_with(2, &sec, base, 1).unwrap();
            let c2 = shell_circuit_with(2, &sec, base + delta, 1).unwrap();
            let p = c1.intersection(&c2).expect("circuits must meet");
            let on = |c: &CircuitPlan| c.circuit_arcs().iter().any(|a| a.contains(p, 1e-6));
            assert!(on(&c1) && on(&c2));
        }
    }

    #[test]
    fn rejects_bad_sections() {
        assert!(matches!(
            shell_circuit(3, &Frame::identity(3), 0.0),
            Err(Error::DegenerateInput(_))
        ));
        assert!(matches!(shell_circuit(1, &Frame::identity(2), 0.0), Err(Error::InvalidN(1))));
    }
}
