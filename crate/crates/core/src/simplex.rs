//! Standard equilateral sets (regular unit simplices) and their constants.
//!
//! For a standard equilateral set of size `k` the circumradius is
//! `beta(k) = sqrt((k-1)/(2k))`, and a point completing it to size `k+1`
//! sits at distance `alpha(k+1) = sqrt((k+1)/(2k))` from its centre.

use rand::SeedableRng;
use rand::Rng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{
    check_dims, orthonormal_complement, random_orthonormal_basis, tie_break_direction,
    uniform_in_ball, Point,
};
use crate::tolerance::Tolerance;
use crate::weights::eta;

/// Circumradius of a standard equilateral set of size `k`.
pub fn beta(k: usize) -> Result<f64> {
    if k < 1 {
        return Err(Error::InvalidK(k));
    }
    Ok(circumradius(k))
}

/// Perpendicular height `alpha_m`, the distance from the `m`-th point of a
/// standard equilateral set to the centre of the other `m - 1`.
pub fn alpha(m: usize) -> Result<f64> {
    if m < 2 {
        return Err(Error::InvalidK(m));
    }
    Ok(perpendicular_height(m))
}

pub(crate) fn circumradius(k: usize) -> f64 {
    debug_assert!(k >= 1);
    let k = k as f64;
    ((k - 1.0) / (2.0 * k)).sqrt()
}

pub(crate) fn perpendicular_height(m: usize) -> f64 {
    debug_assert!(m >= 2);
    let m = m as f64;
    (m / (2.0 * (m - 1.0))).sqrt()
}

/// A list of points of R^n with all pairwise distances equal to 1.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct EquilateralSet {
    points: Vec<Point>,
    n: usize,
}

/// Centre and circumradius of an equilateral set.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SetStats {
    pub center: Point,
    pub radius: f64,
    pub is_maximal: bool,
}

impl EquilateralSet {
    /// Validates dimensions, size and pairwise distances.
    pub fn new(points: Vec<Point>, tol: &Tolerance) -> Result<Self> {
        let s = Self::from_points(points)?;
        if let Some((i, j, d)) = s.worst_pair() {
            if (d - 1.0).abs() > tol.eps_eq {
                return Err(Error::InvalidSet(format!("|p{i} - p{j}| = {d}")));
            }
        }
        Ok(s)
    }

    /// Checks shape (nonempty, uniform dimension, at most n+1 points) but not
    /// distances.
    pub fn from_points(points: Vec<Point>) -> Result<Self> {
        let Some(first) = points.first() else {
            return Err(Error::InvalidSet("empty point list".into()));
        };
        let n = first.dim();
        if n == 0 {
            return Err(Error::InvalidN(0));
        }
        check_dims(&points, n)?;
        if points.len() > n + 1 {
            return Err(Error::TooLarge { n, k: points.len() });
        }
        Ok(Self { points, n })
    }

    pub fn points(&self) -> &[Point] {
        &self.points
    }

    pub fn into_points(self) -> Vec<Point> {
        self.points
    }

    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }

    /// Ambient dimension.
    pub fn n(&self) -> usize {
        self.n
    }

    /// Pair whose distance deviates most from 1.
    pub fn worst_pair(&self) -> Option<(usize, usize, f64)> {
        let mut worst: Option<(usize, usize, f64)> = None;
        for i in 0..self.points.len() {
            for j in i + 1..self.points.len() {
                let d = self.points[i].distance(&self.points[j]);
                if worst.is_none_or(|(_, _, w)| (d - 1.0).abs() > (w - 1.0).abs()) {
                    worst = Some((i, j, d));
                }
            }
        }
        worst
    }

    /// Largest deviation of a pairwise distance from 1.
    pub fn max_distance_error(&self) -> f64 {
        self.worst_pair().map_or(0.0, |(_, _, d)| (d - 1.0).abs())
    }

    pub fn max_norm(&self) -> f64 {
        self.points.iter().map(Point::norm).fold(0.0, f64::max)
    }

    /// All points within the closed unit ball, up to `eps`.
    pub fn is_in_ball(&self, eps: f64) -> bool {
        self.max_norm() <= 1.0 + eps
    }

    pub fn mean(&self) -> Point {
        Point::mean(&self.points)
    }

    pub(crate) fn push(&mut self, p: Point) {
        debug_assert_eq!(p.dim(), self.n);
        self.points.push(p);
    }
}

/// Centre, circumradius and maximality of a valid set.
pub fn center(s: &EquilateralSet, tol: &Tolerance) -> Result<SetStats> {
    let err = s.max_distance_error();
    if err > tol.eps_eq {
        return Err(Error::InvalidSet(format!("pairwise distance error {err:e}")));
    }
    let c = s.mean();
    let radii: Vec<f64> = s.points().iter().map(|p| p.distance(&c)).collect();
    let radius = radii[0];
    if radii.iter().any(|r| (r - radius).abs() > tol.eps_eq) {
        return Err(Error::InvalidSet("points are not equidistant from the centre".into()));
    }
    Ok(SetStats {
        center: c,
        radius,
        is_maximal: s.len() == s.n() + 1,
    })
}

/// The standard equilateral set of size `k` in R^n, centred at the origin.
///
/// Built by repeatedly lifting: the current centred set occupies the first
/// `j - 1` coordinates, a new apex is placed on coordinate `j` at height
/// `alpha(j + 1)` above the centre, and everything is recentred.
pub fn canonical_simplex(n: usize, k: usize) -> Result<EquilateralSet> {
    if n == 0 {
        return Err(Error::InvalidN(0));
    }
    if k == 0 {
        return Err(Error::InvalidK(0));
    }
    if k > n + 1 {
        return Err(Error::TooLarge { n, k });
    }
    let mut pts: Vec<Vec<f64>> = vec![vec![0.0; n]];
    for j in 1..k {
        let mut apex = vec![0.0; n];
        apex[j - 1] = perpendicular_height(j + 1);
        pts.push(apex);
        // The previous points were centred, so the new mean is apex/(j+1).
        let shift = perpendicular_height(j + 1) / (j + 1) as f64;
        for p in pts.iter_mut() {
            p[j - 1] -= shift;
        }
    }
    EquilateralSet::from_points(pts.into_iter().map(Point).collect())
}

/// True iff all pairwise distances are within `tol.eps_eq` of 1 and, when
/// `in_ball`, all norms are at most `1 + tol.eps_eq`.
pub fn is_standard_equilateral(points: &[Point], in_ball: bool, tol: &Tolerance) -> Result<bool> {
    let Some(first) = points.first() else {
        return Err(Error::InvalidSet("empty point list".into()));
    };
    check_dims(points, first.dim())?;
    for i in 0..points.len() {
        if in_ball && points[i].norm() > 1.0 + tol.eps_eq {
            return Ok(false);
        }
        for j in i + 1..points.len() {
            if (points[i].distance(&points[j]) - 1.0).abs() > tol.eps_eq {
                return Ok(false);
            }
        }
    }
    Ok(true)
}

/// Gram matrix of the difference vectors `p_{i+1} - p_1`.
pub fn difference_gram(s: &EquilateralSet) -> Vec<Vec<f64>> {
    let p = s.points();
    let diffs: Vec<Point> = p[1..].iter().map(|q| q - &p[0]).collect();
    diffs
        .iter()
        .map(|u| diffs.iter().map(|v| u.dot(v)).collect())
        .collect()
}

/// Pivot floor below which the difference Gram matrix counts as singular.
pub const GRAM_PIVOT_FLOOR: f64 = 1e-10;

/// True iff the difference vectors are linearly independent, decided by the
/// LDL^T pivots of their Gram matrix.
pub fn affine_independence_check(s: &EquilateralSet) -> Result<bool> {
    if s.len() < 2 {
        return Err(Error::InvalidSet("need at least two points".into()));
    }
    let mut g = difference_gram(s);
    let m = g.len();
    for k in 0..m {
        let pivot = g[k][k];
        if !(pivot > GRAM_PIVOT_FLOOR) {
            return Ok(false);
        }
        for i in k + 1..m {
            let f = g[i][k] / pivot;
            for j in k..m {
                g[i][j] -= f * g[k][j];
            }
        }
    }
    Ok(true)
}

/// Given `x` with `|x| = eta_n(rho)`, returns `n` points of norm `rho`, each
/// at distance 1 from `x` and from one another. Together with `x` they form
/// a maximal standard equilateral set in the ball.
pub fn cap_extension(x: &Point, rho: f64, tol: &Tolerance) -> Result<EquilateralSet> {
    let n = x.dim();
    if n < 2 {
        return Err(Error::InvalidN(n));
    }
    let lo = circumradius(n);
    if !(rho >= lo - tol.eps_eq && rho <= 1.0 + tol.eps_eq) {
        return Err(Error::RadiusOutOfRange { rho, lo, hi: 1.0 });
    }
    let rho = rho.clamp(lo, 1.0);
    let expected = eta(n, rho)?;
    let found = x.norm();
    if (found - expected).abs() > 10.0 * tol.eps_eq {
        return Err(Error::NormMismatch { expected, found });
    }
    let dir = match x.normalized() {
        Some(d) => d,
        None => tie_break_direction(&[], n)?,
    };
    let perp = orthonormal_complement(std::slice::from_ref(&dir), n)?;
    let base = canonical_simplex(n - 1, n)?;
    let drop = (rho * rho - lo * lo).max(0.0).sqrt();
    let pts = base
        .points()
        .iter()
        .map(|u| perp.embed(u.coords()).add_scaled(-drop, &dir))
        .collect();
    EquilateralSet::from_points(pts)
}

/// Rejection sampler for maximal standard equilateral sets inside B^n.
///
/// A draw is a uniformly random orthogonal image of the canonical simplex,
/// translated by a vector uniform in the ball of radius `max_translation`,
/// accepted once every vertex lies in the closed unit ball.
#[derive(Debug, Clone)]
pub struct MaximalSetSampler {
    pub n: usize,
    pub max_translation: f64,
    pub max_attempts: u64,
}

impl MaximalSetSampler {
    pub fn new(n: usize) -> Self {
        Self {
            n,
            max_translation: circumradius(n + 1),
            max_attempts: 1_000_000,
        }
    }

    /// Returns the sampled set and the number of attempts used.
    pub fn sample<R: Rng + ?Sized>(&self, rng: &mut R) -> Result<(EquilateralSet, u64)> {
        sample_translated_simplex(self.n, self.n + 1, self.max_translation, self.max_attempts, rng)
    }
}

/// Random maximal standard equilateral set in B^n, deterministic per seed.
pub fn sample_maximal_set(n: usize, seed: u64) -> Result<EquilateralSet> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    MaximalSetSampler::new(n).sample(&mut rng).map(|(s, _)| s)
}

/// Random standard equilateral set of size `k` inside B^n: a random
/// orthogonal image of the canonical simplex translated uniformly within
/// radius `alpha(k+1)`, rejected until every vertex lies in the ball.
pub fn sample_in_ball_set<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<EquilateralSet> {
    if k == n + 1 {
        return MaximalSetSampler::new(n).sample(rng).map(|(s, _)| s);
    }
    sample_translated_simplex(n, k, perpendicular_height(k + 1), 1_000_000, rng).map(|(s, _)| s)
}

fn sample_translated_simplex<R: Rng + ?Sized>(
    n: usize,
    k: usize,
    max_translation: f64,
    max_attempts: u64,
    rng: &mut R,
) -> Result<(EquilateralSet, u64)> {
    let base = canonical_simplex(n, k)?;
    // Orthogonal maps preserve norms, so R(v + t) is accepted iff v + t is;
    // drawing t first and R afterwards yields the same distribution.
    for attempt in 1..=max_attempts {
        let t = uniform_in_ball(n, max_translation, rng);
        let moved: Vec<Point> = base.points().iter().map(|v| v + &t).collect();
        if moved.iter().all(|p| p.norm() <= 1.0) {
            let rot = random_orthonormal_basis(n, rng);
            let pts = moved.iter().map(|p| rot.embed(p.coords())).collect();
            return Ok((EquilateralSet::from_points(pts)?, attempt));
        }
    }
    Err(Error::SamplingFailure {
        attempts: max_attempts,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::random_orthonormal_basis;

    fn tol() -> Tolerance {
        Tolerance::default()
    }

    #[test]
    fn beta_values() {
        assert_eq!(beta(1).unwrap(), 0.0);
        assert_eq!(beta(2).unwrap(), 0.5);
        assert_eq!(beta(0), Err(Error::InvalidK(0)));
        // Radius of an explicit unit tetrahedron.
        let s = 0.5f64.sqrt();
        let tet = [
            Point(vec![s, 0.0, 0.0, 0.0]),
            Point(vec![0.0, s, 0.0, 0.0]),
            Point(vec![0.0, 0.0, s, 0.0]),
            Point(vec![0.0, 0.0, 0.0, s]),
        ];
        let c = Point::mean(&tet);
        let measured = tet[0].distance(&c);
        assert!((measured - 0.6123724356957945).abs() < 1e-15);
        assert!((beta(4).unwrap() - measured).abs() < 1e-15);
        for k in 1..64 {
            assert!(beta(k + 1).unwrap() > beta(k).unwrap());
            assert!(beta(k).unwrap() < std::f64::consts::FRAC_1_SQRT_2);
        }
    }

    #[test]
    fn alpha_values() {
        assert_eq!(alpha(2).unwrap(), 1.0);
        assert_eq!(alpha(1), Err(Error::InvalidK(1)));
        // Height of the unit triangle (0,0),(1,0),(1/2, sqrt3/2) over its base midpoint.
        let apex = Point(vec![0.5, 3f64.sqrt() / 2.0]);
        let h = apex.distance(&Point(vec![0.5, 0.0]));
        assert!((alpha(3).unwrap() - h).abs() < 1e-15);
        assert!((alpha(3).unwrap() - 0.8660254037844386).abs() < 1e-15);
        for m in 2..=64 {
            let a = alpha(m).unwrap();
            let b = beta(m - 1).unwrap();
            assert!((a * a + b * b - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn canonical_examples() {
        let seg = canonical_simplex(1, 2).unwrap();
        assert_eq!(seg.points(), &[Point(vec![-0.5]), Point(vec![0.5])]);

        let tri = canonical_simplex(2, 3).unwrap();
        assert!(tri.max_distance_error() < 1e-15);
        for p in tri.points() {
            assert!((p.norm() - (1.0f64 / 3.0).sqrt()).abs() < 1e-15);
        }
        assert!(tri.mean().norm() < 1e-15);

        let big = canonical_simplex(8, 9).unwrap();
        assert!(big.max_distance_error() < 1e-12);

        assert_eq!(canonical_simplex(2, 4), Err(Error::TooLarge { n: 2, k: 4 }));
        assert_eq!(canonical_simplex(3, 4).unwrap(), canonical_simplex(3, 4).unwrap());
    }

    #[test]
    fn center_examples() {
        let s = EquilateralSet::new(
            vec![Point(vec![0.0, 0.0, 0.0]), Point(vec![1.0, 0.0, 0.0])],
            &tol(),
        )
        .unwrap();
        let st = center(&s, &tol()).unwrap();
        assert_eq!(st.center, Point(vec![0.5, 0.0, 0.0]));
        assert_eq!(st.radius, 0.5);
        assert!(!st.is_maximal);

        let st = center(&canonical_simplex(2, 3).unwrap(), &tol()).unwrap();
        assert!((st.radius - beta(3).unwrap()).abs() < 1e-15);
        assert!(st.is_maximal);

        let single = EquilateralSet::new(vec![Point(vec![0.3, 0.1])], &tol()).unwrap();
        assert_eq!(center(&single, &tol()).unwrap().radius, 0.0);

        let bad = EquilateralSet::from_points(vec![Point(vec![0.0]), Point(vec![2.0])]).unwrap();
        assert!(matches!(center(&bad, &tol()), Err(Error::InvalidSet(_))));
    }

    #[test]
    fn membership_examples() {
        let t = tol();
        let ok = [Point(vec![0.0, 0.0]), Point(vec![1.0, 0.0])];
        assert!(is_standard_equilateral(&ok, true, &t).unwrap());
        let far = [Point(vec![0.0, 0.0]), Point(vec![1.5, 0.0])];
        assert!(!is_standard_equilateral(&far, false, &t).unwrap());
        let out = [Point(vec![0.9, 0.0]), Point(vec![0.9, 1.0])];
        assert!(is_standard_equilateral(&out, false, &t).unwrap());
        assert!(!is_standard_equilateral(&out, true, &t).unwrap());
        let mixed = [Point(vec![0.0, 0.0]), Point(vec![1.0])];
        assert!(matches!(
            is_standard_equilateral(&mixed, false, &t),
            Err(Error::DimensionMismatch { .. })
        ));
    }

    #[test]
    fn affine_independence_examples() {
        assert!(affine_independence_check(&canonical_simplex(3, 4).unwrap()).unwrap());
        let mut pts = canonical_simplex(3, 3).unwrap().into_points();
        pts.push(pts[1].clone());
        let dup = EquilateralSet::from_points(pts).unwrap();
        assert!(!affine_independence_check(&dup).unwrap());
        let g = difference_gram(&canonical_simplex(5, 6).unwrap());
        for (i, row) in g.iter().enumerate() {
            for (j, v) in row.iter().enumerate() {
                let want = if i == j { 1.0 } else { 0.5 };
                assert!((v - want).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn cap_extension_examples() {
        let t = tol();
        // n = 2 at rho = beta_2 = 1/2: |x| = alpha_3, companions in x^perp.
        let x = Point(vec![0.0, alpha(3).unwrap()]);
        let caps = cap_extension(&x, 0.5, &t).unwrap();
        assert_eq!(caps.len(), 2);
        for c in caps.points() {
            assert!(c.dot(&x).abs() < 1e-12);
            assert!((c.norm() - 0.5).abs() < 1e-12);
            assert!((c.distance(&x) - 1.0).abs() < 1e-12);
        }
        assert!(caps.max_distance_error() < 1e-12);

        // n = 3, rho = 0.8.
        let r = eta(3, 0.8).unwrap();
        let x = Point(vec![0.0, r * 0.6, r * 0.8]);
        let caps = cap_extension(&x, 0.8, &t).unwrap();
        let mut all = caps.points().to_vec();
        all.push(x.clone());
        assert!(is_standard_equilateral(&all, true, &t).unwrap());
        for c in caps.points() {
            assert!((c.norm() - 0.8).abs() < 1e-9);
        }

        // rho = 1, x = 0: companions on the unit sphere.
        let caps = cap_extension(&Point::zeros(4), 1.0, &t).unwrap();
        assert!(caps.max_distance_error() < 1e-12);
        for c in caps.points() {
            assert!((c.norm() - 1.0).abs() < 1e-12);
        }

        assert!(matches!(
            cap_extension(&Point(vec![0.0, 0.3]), 0.8, &t),
            Err(Error::NormMismatch { .. })
        ));
        assert!(matches!(
            cap_extension(&Point(vec![0.0, 0.3]), 0.2, &t),
            Err(Error::RadiusOutOfRange { .. })
        ));
    }

    #[test]
    fn sampler_outputs_are_maximal_in_ball() {
        let t = tol();
        for n in 1..=6 {
            for seed in 0..20 {
                let s = sample_maximal_set(n, seed).unwrap();
                assert_eq!(s.len(), n + 1);
                assert!(is_standard_equilateral(s.points(), true, &t).unwrap());
                assert!(s.mean().norm() <= beta(n + 1).unwrap() + t.eps_eq);
            }
        }
        assert_eq!(sample_maximal_set(4, 9).unwrap(), sample_maximal_set(4, 9).unwrap());
    }

    #[test]
    fn sampler_without_translation_always_accepts() {
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        let sampler = MaximalSetSampler {
            max_translation: 0.0,
            ..MaximalSetSampler::new(5)
        };
        for _ in 0..50 {
            let (_, attempts) = sampler.sample(&mut rng).unwrap();
            assert_eq!(attempts, 1);
        }
    }

    #[test]
    fn rotated_simplices_stay_independent() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 2..=8 {
            let base = canonical_simplex(n, n + 1).unwrap();
            for _ in 0..100 {
                let r = random_orthonormal_basis(n, &mut rng);
                let pts = base.points().iter().map(|p| r.embed(p.coords())).collect();
                let s = EquilateralSet::new(pts, &tol()).unwrap();
                assert!(affine_independence_check(&s).unwrap());
            }
        }
    }
}
