//! Certificate generation.
//!
//! Every derived point `q` gets relations forcing `f(q) = f(s0)` for a fixed
//! anchor `s0` in the shell ("delta" points) or `f(q) = W - n f(s0)` ("core"
//! points):
//!
//! * shell points (`|q| >= lambda_n`) are joined to `s0` through the corners
//!   and bridge points of a circuit in the plane of `q` and `s0`;
//! * points just inside the shell are joined by one gamma1 link to a shell
//!   point in the same plane, when some partner has enough clearance;
//! * otherwise `q` is completed, together with `v = -((1 - |q|)/|q|) q`, to a
//!   maximal set whose other points lie further out, and `v` is a core point;
//! * a core point `z` is completed by a cap extension whose companions lie
//!   further out.
//!
//! Each level of the radius schedule only relies on levels above it, so the
//! recursion terminates. A point at the final radius is derived both ways,
//! which yields `W = (n + 1) f(s0)` and makes core points delta points.

use std::collections::{HashMap, HashSet};
use std::f64::consts::FRAC_PI_3;

use serde::{Deserialize, Serialize};

use super::{Certificate, GeneratorParams, CERTIFICATE_VERSION};
use crate::enlargement::enlarge_to_maximal;
use crate::error::{Error, Result};
use crate::gamma::{gamma, gamma1_link};
use crate::geometry::{check_dims, section2d, Frame, Point};
use crate::simplex::{cap_extension, circumradius, perpendicular_height, EquilateralSet};
use crate::tolerance::Tolerance;
use crate::weights::{
    corner_angle_for, corner_norm, eta, eta_inverse, lambda_shell, mu, nu,
    triangle_angle, P2,
};

/// Points within this distance below `lambda_n` are still routed through
/// the circuit.
const SHELL_SLACK: f64 = 1e-9;

/// Clearance margin demanded of a hop partner at generation time.
const HOP_MARGIN: f64 = 1e-6;

/// Clearance margin demanded when the schedule declares a band hop-covered.
const SCAN_MARGIN: f64 = 1e-3;

/// Radii sampled per hop band while building the schedule.
const SCAN_POINTS: usize = 400;

/// Largest angle between consecutive corners in a circuit walk. Bridge
/// points exist for any angle below a right angle.
const MAX_CORNER_STEP: f64 = FRAC_PI_3;

/// Lower bound of the added-point norm window in a theorem step.
const STEP_WINDOW_SLACK: f64 = 1e-7;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum StepKind {
    /// The shell radius `lambda_n`.
    Shell,
    /// Lower end of a band covered by single gamma1 links into the shell.
    Hop,
    /// `max(mu_n(rho), beta_{n+1} - epsilon)` for the previous radius `rho`.
    Step,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GeneratorConfig {
    /// Defaults to [`default_epsilon`].
    pub epsilon: Option<f64>,
    pub tolerance: Tolerance,
}

impl Default for GeneratorConfig {
    fn default() -> Self {
        Self {
            epsilon: None,
            tolerance: Tolerance::default(),
        }
    }
}

/// `0.5 * min(nu_n(lambda_n), beta_{n+1} - beta_n)`.
pub fn default_epsilon(n: usize) -> Result<f64> {
    Ok(0.5 * epsilon_bound(n)?)
}

fn epsilon_bound(n: usize) -> Result<f64> {
    let lam = lambda_shell(n)?;
    Ok(nu(n, lam)?.min(circumradius(n + 1) - circumradius(n)))
}

fn polar(r: f64, theta: f64) -> P2 {
    [r * theta.cos(), r * theta.sin()]
}

/// Best single gamma1 link from `(r, 0)` into the shell: returns the partner
/// norm `t`, its polar angle and the clearance.
fn best_hop(n: usize, r: f64) -> Option<(f64, f64, f64)> {
    let reach = 2.0 * perpendicular_height(n + 1);
    let lam = lambda_shell(n).ok()?;
    let lo = lam.max(reach - r);
    if r <= 0.0 || lo > 1.0 {
        return None;
    }
    let angle = |t: f64| triangle_angle(r, t, reach);
    let tol = Tolerance::default();
    let clearance = |t: f64| {
        let a = Point::new(vec![r, 0.0]);
        let b = Point::new(polar(t, angle(t)).to_vec());
        gamma(&a, &b, &tol).map_or(f64::NEG_INFINITY, |g| g.value)
    };
    const GRID: usize = 64;
    let ts: Vec<f64> = (0..=GRID).map(|i| lo + (1.0 - lo) * i as f64 / GRID as f64).collect();
    let (mut best, mut best_g) = (0, f64::NEG_INFINITY);
    for (i, &t) in ts.iter().enumerate() {
        let g = clearance(t);
        if g > best_g {
            best = i;
            best_g = g;
        }
    }
    // Golden-section refinement around the best grid point.
    let (mut a, mut b) = (ts[best.saturating_sub(1)], ts[(best + 1).min(GRID)]);
    let phi = 0.5 * (5f64.sqrt() - 1.0);
    for _ in 0..60 {
        let c = b - phi * (b - a);
        let d = a + phi * (b - a);
        if clearance(c) >= clearance(d) {
            b = d;
        } else {
            a = c;
        }
    }
    let mut t = 0.5 * (a + b);
    let mut g = clearance(t);
    if best_g > g {
        t = ts[best];
        g = best_g;
    }
    Some((t, angle(t), g))
}

fn hop_ok(n: usize, r: f64, margin: f64) -> bool {
    best_hop(n, r).is_some_and(|(_, _, g)| g >= circumradius(n) + margin)
}

/// Lowest radius down to which every sampled radius in `[floor, c)` has a
/// hop partner with clearance margin [`SCAN_MARGIN`].
fn hop_band(n: usize, c: f64, floor: f64) -> f64 {
    if c <= floor {
        return c;
    }
    let step = (c - floor) / SCAN_POINTS as f64;
    let mut low = c;
    for i in 1..=SCAN_POINTS {
        let r = if i == SCAN_POINTS { floor } else { c - i as f64 * step };
        if !hop_ok(n, r, SCAN_MARGIN) {
            break;
        }
        low = r;
    }
    low
}

/// The radius schedule: `lambda_n`, followed by the lower ends of hop bands
/// and theorem steps, ending at or below `beta_{n+1}`.
pub fn rho_schedule(n: usize, epsilon: f64) -> Result<Vec<(f64, StepKind)>> {
    let lam = lambda_shell(n)?;
    let bound = epsilon_bound(n)?;
    if !(epsilon > 0.0 && epsilon < bound) {
        return Err(Error::InvalidTolerance(format!(
            "epsilon = {epsilon} must lie in (0, {bound})"
        )));
    }
    let target = circumradius(n + 1);
    let last = target - epsilon;
    let hop_floor = (2.0 * perpendicular_height(n + 1) - 1.0).max(last);
    let mut out = vec![(lam, StepKind::Shell)];
    let mut c = lam;
    while c > target {
        let h = hop_band(n, c, hop_floor);
        if h < c {
            c = h;
            out.push((c, StepKind::Hop));
            continue;
        }
        c = mu(n, c)?.max(last);
        out.push((c, StepKind::Step));
        if out.len() > 100_000 {
            return Err(Error::GenerationFailure {
                stage: "schedule",
                detail: "schedule does not reach beta_{n+1}".into(),
            });
        }
    }
    Ok(out)
}

/// Output of [`theorem_step_relation`].
#[derive(Debug, Clone, PartialEq)]
pub struct StepOutcome {
    /// The maximal set `{u, v, x_1, ..., x_{n-1}}`.
    pub set: EquilateralSet,
    pub v: Point,
    pub companions: Vec<Point>,
    /// Whether each companion has norm at least `rho0`.
    pub in_annulus: Vec<bool>,
    /// Largest deviation from `|x_i|^2 = 3/4 + (|u| - 1/2)^2`.
    pub norm_identity_error: f64,
}

/// For `mu_n(rho0) <= |u| <= rho0`, builds `v = -((1 - |u|)/|u|) u` (so
/// `|u - v| = 1`) and enlarges `{u, v}` to a maximal set whose added points
/// have norm at least `rho0`.
pub fn theorem_step_relation(u: &Point, rho0: f64, n: usize, tol: &Tolerance) -> Result<StepOutcome> {
    check_dims(std::slice::from_ref(u), n)?;
    let lam = lambda_shell(n)?;
    let bn = circumradius(n);
    if !(rho0 >= bn - tol.eps_eq && rho0 <= lam + tol.eps_eq) {
        return Err(Error::RadiusOutOfRange { rho: rho0, lo: bn, hi: lam });
    }
    let r = u.norm();
    let floor = mu(n, rho0)?;
    if !(r >= floor - tol.eps_eq && r <= rho0 + tol.eps_eq) {
        return Err(Error::NormWindowViolation { norm: r, floor });
    }
    let v = u.scale(-(1.0 - r) / r);
    let vn = v.norm();
    if !(vn >= 1.0 - rho0 - tol.eps_eq && vn <= eta(n, rho0)? + tol.eps_eq) {
        return Err(Error::NormWindowViolation {
            norm: vn,
            floor: 1.0 - rho0,
        });
    }
    let pair = EquilateralSet::new(vec![u.clone(), v.clone()], tol)?;
    let (set, _) = enlarge_to_maximal(&pair, tol)?;
    let companions = set.points()[2..].to_vec();
    let expected = 0.75 + (r - 0.5) * (r - 0.5);
    let mut norm_identity_error: f64 = 0.0;
    for c in &companions {
        if c.norm() < rho0 - STEP_WINDOW_SLACK {
            return Err(Error::NormWindowViolation {
                norm: c.norm(),
                floor: rho0,
            });
        }
        norm_identity_error = norm_identity_error.max((c.norm_sq() - expected).abs());
    }
    let in_annulus = companions.iter().map(|c| c.norm() >= rho0 - tol.eps_eq).collect();
    Ok(StepOutcome {
        set,
        v,
        companions,
        in_annulus,
        norm_identity_error,
    })
}

/// For `|z| <= eta_n(rho0)`, solves `eta_n(rho) = |z|` on `[rho0, 1]` and
/// returns the cap-extension set `{z, x_1, ..., x_n}` with its companions,
/// all of norm `rho`.
pub fn constant_lemma_relation(
    z: &Point,
    rho0: f64,
    n: usize,
    tol: &Tolerance,
) -> Result<(EquilateralSet, Vec<Point>)> {
    check_dims(std::slice::from_ref(z), n)?;
    let rho = eta_inverse(n, z.norm(), rho0)?;
    let companions = cap_extension(z, rho, tol)?.into_points();
    let mut pts = vec![z.clone()];
    pts.extend(companions.iter().cloned());
    Ok((EquilateralSet::new(pts, tol)?, companions))
}

fn at_stage<T>(stage: &'static str, r: Result<T>) -> Result<T> {
    r.map_err(|e| match e {
        Error::GenerationFailure { .. } => e,
        other => Error::GenerationFailure {
            stage,
            detail: other.to_string(),
        },
    })
}

struct Builder {
    n: usize,
    tol: Tolerance,
    lambda: f64,
    corner: f64,
    schedule: Vec<(f64, StepKind)>,
    rho_final: f64,
    anchor: Point,
    anchor_id: usize,
    points: Vec<Point>,
    index: HashMap<Vec<u64>, usize>,
    sets: Vec<Vec<usize>>,
    seen_sets: HashSet<Vec<usize>>,
    delta_done: HashSet<usize>,
    core_done: HashSet<usize>,
    closed: bool,
}

impl Builder {
    fn id(&mut self, p: &Point) -> usize {
        let key: Vec<u64> = p.coords().iter().map(|c| (c + 0.0).to_bits()).collect();
        if let Some(&i) = self.index.get(&key) {
            return i;
        }
        self.points.push(p.clone());
        self.index.insert(key, self.points.len() - 1);
        self.points.len() - 1
    }

    fn add_set(&mut self, s: &EquilateralSet) {
        let ids: Vec<usize> = s.points().iter().map(|p| self.id(p)).collect();
        let mut key = ids.clone();
        key.sort_unstable();
        if self.seen_sets.insert(key) {
            self.sets.push(ids);
        }
    }

    fn link(&mut self, stage: &'static str, a: &Point, b: &Point) -> Result<()> {
        let (s1, s2) = at_stage(stage, gamma1_link(a, b, &self.tol))?;
        self.add_set(&s1);
        self.add_set(&s2);
        Ok(())
    }

    fn plane(&self, q: &Point) -> Result<Frame> {
        at_stage("plane", section2d(q, &self.anchor))
    }

    fn derive_delta(&mut self, q: &Point) -> Result<()> {
        let id = self.id(q);
        if id == self.anchor_id || !self.delta_done.insert(id) {
            return Ok(());
        }
        let r = q.norm();
        if r >= self.lambda - SHELL_SLACK {
            return self.shell_link(q);
        }
        if let Some(b) = self.hop_partner(q)? {
            self.link("hop", q, &b)?;
            return self.derive_delta(&b);
        }
        let rho0 = self
            .schedule
            .iter()
            .rev()
            .map(|&(c, _)| c)
            .find(|&c| c >= r - SHELL_SLACK)
            .ok_or_else(|| Error::GenerationFailure {
                stage: "step",
                detail: format!("no schedule radius above |q| = {r}"),
            })?;
        let out = at_stage("step", theorem_step_relation(q, rho0, self.n, &self.tol))?;
        self.add_set(&out.set);
        self.derive_core(&out.v, rho0)?;
        for c in &out.companions {
            self.derive_delta(c)?;
        }
        Ok(())
    }

    fn derive_core(&mut self, z: &Point, rho0: f64) -> Result<()> {
        let id = self.id(z);
        if !self.core_done.insert(id) {
            return Ok(());
        }
        let (set, companions) = at_stage("core", constant_lemma_relation(z, rho0, self.n, &self.tol))?;
        self.add_set(&set);
        for c in &companions {
            self.derive_delta(c)?;
        }
        Ok(())
    }

    fn hop_partner(&self, q: &Point) -> Result<Option<Point>> {
        let r = q.norm();
        let Some((t, angle, g)) = best_hop(self.n, r) else {
            return Ok(None);
        };
        if g < circumradius(self.n) + HOP_MARGIN {
            return Ok(None);
        }
        let plane = self.plane(q)?;
        let q2 = plane.coordinates(q);
        let theta = q2[1].atan2(q2[0]);
        Ok(Some(plane.embed(&polar(t, theta + angle))))
    }

    /// Joins a shell point to the anchor: `q` to its corner, the corners to
    /// one another through bridge points, and the anchor's corner to the
    /// anchor.
    fn shell_link(&mut self, q: &Point) -> Result<()> {
        let plane = self.plane(q)?;
        let n = self.n;
        let angle_of = |p: &Point| {
            let c = plane.coordinates(p);
            corner_angle_for(n, p.norm(), c[1].atan2(c[0]))
        };
        let phi_q = angle_of(q);
        let phi_s = angle_of(&self.anchor);
        let s = self.corner;
        let reach = 2.0 * perpendicular_height(n + 1);
        // Corners are snapped to lie exactly `reach` away from the point they
        // link, since the angle round trip loses accuracy near tangency.
        let snap = |from: P2, phi: f64| {
            let c = polar(s, phi);
            let d = [c[0] - from[0], c[1] - from[1]];
            let len = d[0].hypot(d[1]);
            [from[0] + reach * d[0] / len, from[1] + reach * d[1] / len]
        };
        let to2 = |p: &Point| {
            let c = plane.coordinates(p);
            [c[0], c[1]]
        };
        let q2 = to2(q);
        let s2 = to2(&self.anchor);
        let delta = crate::weights::wrap_angle(phi_s - phi_q);
        let steps = (delta.abs() / MAX_CORNER_STEP).ceil() as usize;
        let mut corners: Vec<P2> = vec![snap(q2, phi_q)];
        corners.extend((1..steps).map(|j| polar(s, phi_q + delta * j as f64 / steps as f64)));
        corners.push(snap(s2, phi_s));
        self.link("shell", q, &plane.embed(&corners[0]))?;
        let anchor = self.anchor.clone();
        self.link("shell", &anchor, &plane.embed(&corners[corners.len() - 1]))?;
        for w in corners.windows(2) {
            let Some(apex) = bridge_apex(w[0], w[1], reach) else {
                continue;
            };
            let bridge = plane.embed(&apex);
            self.link("bridge", &bridge, &plane.embed(&w[0]))?;
            self.link("bridge", &bridge, &plane.embed(&w[1]))?;
        }
        Ok(())
    }

    /// Derives the final-radius point both ways, giving `W = (n+1) f(s0)`.
    fn close(&mut self) -> Result<()> {
        if self.closed {
            return Ok(());
        }
        self.closed = true;
        let p = Point::axis(self.n, 0).scale(self.rho_final);
        self.derive_delta(&p)?;
        let rho = self.rho_final;
        self.derive_core(&p, rho)
    }

    fn claim(&mut self, x: &Point) -> Result<()> {
        if x.norm() >= self.rho_final {
            self.derive_delta(x)
        } else {
            let rho = self.rho_final;
            self.derive_core(x, rho)?;
            self.close()
        }
    }
}

/// The point at distance `reach` from both `a` and `b` on the side of the
/// segment facing the origin; `None` when `a` and `b` coincide.
fn bridge_apex(a: P2, b: P2, reach: f64) -> Option<P2> {
    let d = [b[0] - a[0], b[1] - a[1]];
    let len = d[0].hypot(d[1]);
    if len < 1e-12 {
        return None;
    }
    let m = [0.5 * (a[0] + b[0]), 0.5 * (a[1] + b[1])];
    let mut perp = [-d[1] / len, d[0] / len];
    if perp[0] * m[0] + perp[1] * m[1] > 0.0 {
        perp = [-perp[0], -perp[1]];
    }
    let h = (reach * reach - 0.25 * len * len).max(0.0).sqrt();
    Some([m[0] + h * perp[0], m[1] + h * perp[1]])
}

/// Certificate for `f(x) = f(y)` with default parameters.
pub fn generate_equality_certificate(x: &Point, y: &Point, n: usize) -> Result<Certificate> {
    generate_with(x, y, n, &GeneratorConfig::default())
}

pub fn generate_with(x: &Point, y: &Point, n: usize, config: &GeneratorConfig) -> Result<Certificate> {
    let tol = config.tolerance;
    tol.validate()?;
    if n < 2 {
        return Err(Error::InvalidN(n));
    }
    check_dims(&[x.clone(), y.clone()], n)?;
    for p in [x, y] {
        if !p.is_finite() || p.norm() > 1.0 + tol.eps_eq {
            return Err(Error::OutsideBall { norm: p.norm() });
        }
    }
    let epsilon = match config.epsilon {
        Some(e) => e,
        None => default_epsilon(n)?,
    };
    let schedule = rho_schedule(n, epsilon)?;
    let params = GeneratorParams {
        epsilon,
        shell_rho_schedule: schedule.iter().map(|&(c, _)| c).collect(),
    };
    if x == y {
        return Ok(Certificate {
            version: CERTIFICATE_VERSION,
            n,
            tolerance: tol,
            points: vec![x.clone()],
            sets: Vec::new(),
            claim: (0, 0),
            generator_params: params,
        });
    }
    let lambda = lambda_shell(n)?;
    let anchor = Point::axis(n, 0).scale(0.5 * (lambda + 1.0));
    let mut b = Builder {
        n,
        tol,
        lambda,
        corner: corner_norm(n),
        rho_final: schedule.last().expect("nonempty").0,
        schedule,
        anchor: anchor.clone(),
        anchor_id: 0,
        points: Vec::new(),
        index: HashMap::new(),
        sets: Vec::new(),
        seen_sets: HashSet::new(),
        delta_done: HashSet::new(),
        core_done: HashSet::new(),
        closed: false,
    };
    let ix = b.id(x);
    let iy = b.id(y);
    b.anchor_id = b.id(&anchor);
    b.claim(x)?;
    b.claim(y)?;
    Ok(Certificate {
        version: CERTIFICATE_VERSION,
        n,
        tolerance: tol,
        points: b.points,
        sets: b.sets,
        claim: (ix, iy),
        generator_params: params,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn schedules_reach_the_fixed_point() {
        for n in 2..=8 {
            let eps = default_epsilon(n).unwrap();
            let s = rho_schedule(n, eps).unwrap();
            let last = s.last().unwrap().0;
            assert!(last <= circumradius(n + 1) && last >= circumradius(n + 1) - eps - 1e-15);
            assert!(last >= circumradius(n));
            for w in s.windows(2) {
                assert!(w[1].0 < w[0].0, "n={n}: {s:?}");
            }
        }
    }

    #[test]
    fn step_endpoint_and_planar_example() {
        let n = 2;
        let rho0 = 0.85;
        let u = Point::new(vec![rho0, 0.0]);
        let out = theorem_step_relation(&u, rho0, n, &tol()).unwrap();
        assert!((out.v.norm() - (1.0 - rho0)).abs() < 1e-15);
        // |u| = 0.8 lies below mu_2(0.85) ~ 0.8214, outside the window for
        // rho0 = 0.85; the same construction runs with rho0 = 0.8 and its
        // added points still clear 0.85.
        let u = Point::new(vec![0.8, 0.0]);
        assert!(matches!(
            theorem_step_relation(&u, rho0, n, &tol()),
            Err(Error::NormWindowViolation { .. })
        ));
        let out = theorem_step_relation(&u, 0.8, n, &tol()).unwrap();
        assert!(out.v.distance(&Point::new(vec![-0.2, 0.0])) < 1e-15);
        let w = Point::mean(&[u.clone(), out.v.clone()]);
        for c in &out.companions {
            assert!(c.norm() >= rho0);
            assert!((c.distance(&w).powi(2) - 0.75).abs() < 1e-12);
        }
        assert!(out.norm_identity_error < 1e-12);
        assert!(out.in_annulus.iter().all(|&b| b));
    }

    #[test]
    fn step_rejects_out_of_window() {
        let u = Point::new(vec![0.3, 0.0]);
        assert!(matches!(
            theorem_step_relation(&u, 0.85, 2, &tol()),
            Err(Error::NormWindowViolation { .. })
        ));
    }

    #[test]
    fn constant_relation_examples() {
        let (set, comps) = constant_lemma_relation(&Point::zeros(3), 0.7, 3, &tol()).unwrap();
        assert_eq!(set.len(), 4);
        for c in &comps {
            assert!((c.norm() - 1.0).abs() < 1e-12);
        }
        let b3 = circumradius(3);
        let z = Point::new(vec![0.0, b3]);
        let (_, comps) = constant_lemma_relation(&z, b3, 2, &tol()).unwrap();
        for c in &comps {
            assert!((c.norm() - b3).abs() < 1e-9);
        }
        let z = Point::new(vec![0.1, 0.0, 0.0]);
        let (set, comps) = constant_lemma_relation(&z, 0.8, 3, &tol()).unwrap();
        let rho = comps[0].norm();
        assert!(rho >= 0.8);
        for c in &comps {
            assert!((c.norm() - rho).abs() < 1e-9);
        }
        assert!(set.max_distance_error() < 1e-9);
        assert!(matches!(
            constant_lemma_relation(&Point::new(vec![0.9, 0.0, 0.0]), 0.8, 3, &tol()),
            Err(Error::RadiusSolveFailure { .. })
        ));
    }

    #[test]
    fn reflexive_claim_has_no_sets() {
        let x = Point::new(vec![0.1, 0.2]);
        let c = generate_equality_certificate(&x, &x, 2).unwrap();
        assert!(c.sets.is_empty());
        assert_eq!(c.claim, (0, 0));
    }
}
