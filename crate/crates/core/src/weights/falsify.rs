use std::fmt;
use std::sync::Arc;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{random_orthonormal_basis, Point};
use crate::simplex::{is_standard_equilateral, EquilateralSet, MaximalSetSampler};
use crate::tolerance::Tolerance;

/// Spread above which the falsifier reports a disproof.
pub const DISPROOF_THRESHOLD: f64 = 1e-6;

/// Radius of the sphere on which orthonormal bases become maximal
/// equilateral sets.
pub const SPHERE_RADIUS: f64 = std::f64::consts::FRAC_1_SQRT_2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Domain {
    Ball,
    /// The sphere of radius `1/sqrt2`.
    Sphere,
}

/// A candidate weight function.
#[derive(Clone)]
pub struct WeightFn {
    evaluator: Arc<dyn Fn(&Point) -> f64 + Send + Sync>,
    pub declared_weight: Option<f64>,
    pub domain: Domain,
}

impl fmt::Debug for WeightFn {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.debug_struct("WeightFn")
            .field("declared_weight", &self.declared_weight)
            .field("domain", &self.domain)
            .finish_non_exhaustive()
    }
}

impl WeightFn {
    pub fn new(evaluator: impl Fn(&Point) -> f64 + Send + Sync + 'static) -> Self {
        Self {
            evaluator: Arc::new(evaluator),
            declared_weight: None,
            domain: Domain::Ball,
        }
    }

    pub fn on_sphere(mut self) -> Self {
        self.domain = Domain::Sphere;
        self
    }

    pub fn with_weight(mut self, w: f64) -> Self {
        self.declared_weight = Some(w);
        self
    }

    /// Evaluates `f`, re-projecting onto the sphere in sphere mode.
    pub fn eval(&self, p: &Point) -> Result<f64> {
        let v = match self.domain {
            Domain::Ball => (self.evaluator)(p),
            Domain::Sphere => {
                let q = p
                    .normalized()
                    .ok_or_else(|| Error::EvaluationFailure("zero point in sphere mode".into()))?
                    .scale(SPHERE_RADIUS);
                (self.evaluator)(&q)
            }
        };
        if !v.is_finite() {
            return Err(Error::EvaluationFailure(format!("f({:?}) = {v}", p.coords())));
        }
        Ok(v)
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Verdict {
    Consistent,
    Disproved,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct FalsifyReport {
    pub n: usize,
    pub samples: usize,
    pub domain: Domain,
    pub spread: f64,
    /// Indices of the samples with the smallest and largest sums.
    pub witness: (usize, usize),
    pub witness_sets: (Vec<Point>, Vec<Point>),
    pub witness_sums: (f64, f64),
    /// Mean of the sampled sums.
    pub empirical_weight: f64,
    /// Largest `|sum - W|` when a weight was declared.
    pub declared_deviation: Option<f64>,
    pub threshold: f64,
    pub verdict: Verdict,
}

/// `n` orthonormal vectors scaled to the sphere of radius `1/sqrt2`.
pub fn sphere_frame<R: rand::Rng + ?Sized>(n: usize, rng: &mut R) -> EquilateralSet {
    let basis = random_orthonormal_basis(n, rng);
    let pts = basis.basis().iter().map(|b| b.scale(SPHERE_RADIUS)).collect();
    EquilateralSet::from_points(pts).expect("n points in R^n")
}

/// Samples maximal sets, sums `f` over each and reports the spread of the
/// sums, with [`DISPROOF_THRESHOLD`] as the disproof threshold.
pub fn falsify(f: &WeightFn, n: usize, samples: usize, seed: u64) -> Result<FalsifyReport> {
    falsify_with_threshold(f, n, samples, seed, DISPROOF_THRESHOLD)
}

pub fn falsify_with_threshold(
    f: &WeightFn,
    n: usize,
    samples: usize,
    seed: u64,
    threshold: f64,
) -> Result<FalsifyReport> {
    if n < 1 {
        return Err(Error::InvalidN(n));
    }
    if samples < 2 {
        return Err(Error::DegenerateInput(format!("samples = {samples} must be at least 2")));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let sampler = MaximalSetSampler::new(n);
    let mut sets = Vec::with_capacity(samples);
    let mut sums = Vec::with_capacity(samples);
    for _ in 0..samples {
        let set = match f.domain {
            Domain::Ball => sampler.sample(&mut rng)?.0,
            Domain::Sphere => sphere_frame(n, &mut rng),
        };
        let mut total = 0.0;
        for p in set.points() {
            total += f.eval(p)?;
        }
        sums.push(total);
        sets.push(set);
    }
    // Strict comparisons keep the lowest index on ties.
    let (mut lo, mut hi) = (0, 0);
    for (i, &s) in sums.iter().enumerate() {
        if s < sums[lo] {
            lo = i;
        }
        if s > sums[hi] {
            hi = i;
        }
    }
    let spread = sums[hi] - sums[lo];
    let empirical_weight = sums.iter().sum::<f64>() / samples as f64;
    let declared_deviation = f
        .declared_weight
        .map(|w| sums.iter().map(|s| (s - w).abs()).fold(0.0, f64::max));
    let disproved = spread > threshold || declared_deviation.is_some_and(|d| d > threshold);
    Ok(FalsifyReport {
        n,
        samples,
        domain: f.domain,
        spread,
        witness: (lo, hi),
        witness_sets: (sets[lo].points().to_vec(), sets[hi].points().to_vec()),
        witness_sums: (sums[lo], sums[hi]),
        empirical_weight,
        declared_deviation,
        threshold,
        verdict: if disproved {
            Verdict::Disproved
        } else {
            Verdict::Consistent
        },
    })
}

/// Sums `<T u, u>` over a random orthonormal basis rescaled to the sphere of
/// radius `1/sqrt2`. Returns the sum and `tr(T)/2`.
pub fn frame_weight_sum(t: &[Vec<f64>], seed: u64) -> Result<(f64, f64)> {
    let n = t.len();
    if n == 0 {
        return Err(Error::InvalidN(0));
    }
    let tol = Tolerance::default();
    let mut asym: f64 = 0.0;
    for (i, row) in t.iter().enumerate() {
        if row.len() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: row.len(),
            });
        }
        for j in 0..n {
            asym = asym.max((row[j] - t[j][i]).abs());
        }
    }
    if asym > tol.eps_eq {
        return Err(Error::NotSymmetric(asym));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let frame = sphere_frame(n, &mut rng);
    if !is_standard_equilateral(frame.points(), true, &tol)? {
        return Err(Error::InvalidSet(format!(
            "rescaled basis has distance error {:e}",
            frame.max_distance_error()
        )));
    }
    let quad = |u: &Point| -> f64 {
        (0..n)
            .map(|i| u[i] * (0..n).map(|j| t[i][j] * u[j]).sum::<f64>())
            .sum()
    };
    let sum = frame.points().iter().map(quad).sum();
    let trace: f64 = (0..n).map(|i| t[i][i]).sum();
    Ok((sum, trace / 2.0))
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::Rng;

    #[test]
    fn constant_function_is_consistent() {
        for n in 2..=5 {
            let f = WeightFn::new(|_| 0.25);
            let r = falsify(&f, n, 200, 1).unwrap();
            assert!(r.spread < 1e-12);
            assert!((r.empirical_weight - 0.25 * (n + 1) as f64).abs() < 1e-12);
            assert_eq!(r.verdict, Verdict::Consistent);
        }
    }

    #[test]
    fn squared_norm_is_disproved() {
        let f = WeightFn::new(|p| p.norm_sq());
        let r = falsify(&f, 3, 1000, 7).unwrap();
        assert!(r.spread > 0.01);
        assert_eq!(r.verdict, Verdict::Disproved);
        let sum = |s: &[Point]| s.iter().map(Point::norm_sq).sum::<f64>();
        assert!((sum(&r.witness_sets.1) - sum(&r.witness_sets.0) - r.spread).abs() < 1e-12);
    }

    #[test]
    fn declared_weight_mismatch_is_disproof() {
        let f = WeightFn::new(|_| 1.0).with_weight(3.5);
        let r = falsify(&f, 2, 10, 0).unwrap();
        assert_eq!(r.verdict, Verdict::Disproved);
        assert!(r.spread < 1e-12);
    }

    #[test]
    fn non_finite_values_fail() {
        let f = WeightFn::new(|p| 1.0 / (p[0] - p[0]));
        assert!(matches!(falsify(&f, 2, 5, 0), Err(Error::EvaluationFailure(_))));
        assert!(falsify(&WeightFn::new(|_| 0.0), 2, 1, 0).is_err());
    }

    #[test]
    fn sphere_mode_quadratic_forms() {
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        for n in 3..=6 {
            let mut t = vec![vec![0.0; n]; n];
            for i in 0..n {
                for j in 0..=i {
                    let v: f64 = rng.random_range(-1.0..1.0);
                    t[i][j] = v;
                    t[j][i] = v;
                }
            }
            let tc = t.clone();
            let f = WeightFn::new(move |u: &Point| {
                (0..n).map(|i| u[i] * (0..n).map(|j| tc[i][j] * u[j]).sum::<f64>()).sum()
            })
            .on_sphere();
            let r = falsify(&f, n, 100, 3).unwrap();
            assert!(r.spread < 1e-9);
            let trace: f64 = (0..n).map(|i| t[i][i]).sum();
            assert!((r.empirical_weight - trace / 2.0).abs() < 1e-9);
        }
    }

    #[test]
    fn frame_sum_examples() {
        let id: Vec<Vec<f64>> = (0..3).map(|i| (0..3).map(|j| f64::from(i == j)).collect()).collect();
        let (s, e) = frame_weight_sum(&id, 4).unwrap();
        assert!((s - 1.5).abs() < 1e-12 && e == 1.5);
        let (s, e) = frame_weight_sum(&vec![vec![0.0; 4]; 4], 4).unwrap();
        assert!(s.abs() < 1e-15 && e == 0.0);
        let bad = vec![vec![0.0, 1.0], vec![0.0, 0.0]];
        assert!(matches!(frame_weight_sum(&bad, 0), Err(Error::NotSymmetric(_))));
    }

    #[test]
    fn sphere_distance_orthogonality_equivalence() {
        let mut rng = ChaCha8Rng::seed_from_u64(8);
        for n in 2..=6 {
            for i in 0..2000 {
                let u = crate::geometry::uniform_on_sphere(n, &mut rng).scale(SPHERE_RADIUS);
                // Every other pair is made orthogonal on purpose.
                let v = if i % 2 == 0 {
                    crate::geometry::uniform_on_sphere(n, &mut rng).scale(SPHERE_RADIUS)
                } else {
                    let w = crate::geometry::uniform_on_sphere(n, &mut rng);
                    let w = w.add_scaled(-w.dot(&u) / u.norm_sq(), &u);
                    w.normalized().unwrap().scale(SPHERE_RADIUS)
                };
                let dist_ok = (u.distance(&v) - 1.0).abs() < 1e-9;
                let orth = u.dot(&v).abs() < 1e-9;
                assert_eq!(dist_ok, orth);
            }
        }
    }
}
