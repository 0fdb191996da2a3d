//! Dense vectors and orthonormal frames in R^n.
//!
//! Everything here is dimension-generic. Orthonormalization is modified
//! Gram-Schmidt with a second re-orthogonalization pass; whenever an
//! "arbitrary" orthogonal direction is required, the canonical axes
//! e_1, e_2, ... are scanned in index order and the first one with a
//! residual of at least [`TIE_BREAK_RESIDUAL`] is taken.

use std::ops::{Add, Index, Neg, Sub};

use rand::Rng;
use rand_distr::{Distribution, StandardNormal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::tolerance::Tolerance;

/// A direction is treated as dependent on a basis when its residual after
/// projection falls below this value.
pub const DEPENDENCE_RESIDUAL: f64 = 1e-10;

/// Minimal residual for a canonical axis to be accepted by the tie-break.
pub const TIE_BREAK_RESIDUAL: f64 = 1e-6;

/// A point (or vector) of R^n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(transparent)]
pub struct Point(pub Vec<f64>);

impl Point {
    pub fn new(coords: Vec<f64>) -> Self {
        Self(coords)
    }

    pub fn zeros(n: usize) -> Self {
        Self(vec![0.0; n])
    }

    /// Canonical basis vector e_{i+1} of R^n.
    pub fn axis(n: usize, i: usize) -> Self {
        let mut v = vec![0.0; n];
        v[i] = 1.0;
        Self(v)
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn coords(&self) -> &[f64] {
        &self.0
    }

    pub fn is_finite(&self) -> bool {
        self.0.iter().all(|c| c.is_finite())
    }

    pub fn dot(&self, other: &Point) -> f64 {
        debug_assert_eq!(self.dim(), other.dim());
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn norm_sq(&self) -> f64 {
        self.dot(self)
    }

    pub fn norm(&self) -> f64 {
        self.norm_sq().sqrt()
    }

    pub fn distance(&self, other: &Point) -> f64 {
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| (a - b) * (a - b))
            .sum::<f64>()
            .sqrt()
    }

    pub fn scale(&self, s: f64) -> Point {
        Point(self.0.iter().map(|c| c * s).collect())
    }

    /// `self + s * other`.
    pub fn add_scaled(&self, s: f64, other: &Point) -> Point {
        Point(self.0.iter().zip(&other.0).map(|(a, b)| a + s * b).collect())
    }

    fn axpy_in_place(&mut self, s: f64, other: &Point) {
        for (a, b) in self.0.iter_mut().zip(&other.0) {
            *a += s * b;
        }
    }

    /// Unit vector in the direction of `self`, or `None` for (near) zero.
    pub fn normalized(&self) -> Option<Point> {
        let r = self.norm();
        (r > DEPENDENCE_RESIDUAL).then(|| self.scale(1.0 / r))
    }

    /// Arithmetic mean of a nonempty list of points of equal dimension.
    pub fn mean(points: &[Point]) -> Point {
        let n = points[0].dim();
        let mut acc = Point::zeros(n);
        for p in points {
            acc.axpy_in_place(1.0, p);
        }
        acc.scale(1.0 / points.len() as f64)
    }
}

impl Index<usize> for Point {
    type Output = f64;
    fn index(&self, i: usize) -> &f64 {
        &self.0[i]
    }
}

impl Add for &Point {
    type Output = Point;
    fn add(self, rhs: &Point) -> Point {
        self.add_scaled(1.0, rhs)
    }
}

impl Sub for &Point {
    type Output = Point;
    fn sub(self, rhs: &Point) -> Point {
        self.add_scaled(-1.0, rhs)
    }
}

impl Neg for &Point {
    type Output = Point;
    fn neg(self) -> Point {
        self.scale(-1.0)
    }
}

impl From<Vec<f64>> for Point {
    fn from(v: Vec<f64>) -> Self {
        Self(v)
    }
}

/// Verifies that all points share dimension `n`.
pub fn check_dims(points: &[Point], n: usize) -> Result<()> {
    for p in points {
        if p.dim() != n {
            return Err(Error::DimensionMismatch {
                expected: n,
                found: p.dim(),
            });
        }
    }
    Ok(())
}

/// An orthonormal list of vectors spanning a subspace of R^n.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Frame {
    basis: Vec<Point>,
}

impl Frame {
    /// Builds a frame after checking orthonormality within `tol.eps_eq`.
    pub fn new(basis: Vec<Point>, tol: &Tolerance) -> Result<Self> {
        let Some(first) = basis.first() else {
            return Err(Error::DegenerateInput("empty frame".into()));
        };
        let n = first.dim();
        check_dims(&basis, n)?;
        if basis.len() > n {
            return Err(Error::DegenerateInput(format!(
                "{} vectors cannot be orthonormal in R^{n}",
                basis.len()
            )));
        }
        for (i, u) in basis.iter().enumerate() {
            for (j, v) in basis.iter().enumerate().skip(i) {
                let target = if i == j { 1.0 } else { 0.0 };
                let err = (u.dot(v) - target).abs();
                if err > tol.eps_eq {
                    return Err(Error::DegenerateInput(format!(
                        "<f{i}, f{j}> deviates from delta by {err:e}"
                    )));
                }
            }
        }
        Ok(Self { basis })
    }

    pub(crate) fn from_orthonormal(basis: Vec<Point>) -> Self {
        debug_assert!(!basis.is_empty());
        Self { basis }
    }

    /// The full canonical basis of R^n.
    pub fn identity(n: usize) -> Self {
        Self::from_orthonormal((0..n).map(|i| Point::axis(n, i)).collect())
    }

    pub fn basis(&self) -> &[Point] {
        &self.basis
    }

    /// Number of basis vectors.
    pub fn rank(&self) -> usize {
        self.basis.len()
    }

    /// Ambient dimension.
    pub fn ambient_dim(&self) -> usize {
        self.basis[0].dim()
    }

    /// Inner products of `x` with each basis vector.
    pub fn coordinates(&self, x: &Point) -> Vec<f64> {
        self.basis.iter().map(|f| f.dot(x)).collect()
    }

    /// `sum_i c_i f_i`.
    pub fn embed(&self, coeffs: &[f64]) -> Point {
        debug_assert_eq!(coeffs.len(), self.rank());
        let mut out = Point::zeros(self.ambient_dim());
        for (c, f) in coeffs.iter().zip(&self.basis) {
            out.axpy_in_place(*c, f);
        }
        out
    }
}

/// Subtracts from `v` its projection onto the orthonormal list `basis`,
/// twice (classical re-orthogonalization).
fn reject_from(v: &Point, basis: &[Point]) -> Point {
    let mut r = v.clone();
    for _ in 0..2 {
        for f in basis {
            let c = f.dot(&r);
            r.axpy_in_place(-c, f);
        }
    }
    r
}

/// Modified Gram-Schmidt: appends to `basis` every vector of `vectors` whose
/// residual is at least `threshold`.
fn extend_orthonormal(basis: &mut Vec<Point>, vectors: &[Point], threshold: f64) {
    for v in vectors {
        let r = reject_from(v, basis);
        let len = r.norm();
        if len >= threshold {
            basis.push(r.scale(1.0 / len));
        }
    }
}

/// Fills `basis` with canonical axes (scanned in index order) until it has
/// `target` vectors.
fn fill_with_axes(basis: &mut Vec<Point>, n: usize, target: usize) {
    for i in 0..n {
        if basis.len() >= target {
            break;
        }
        extend_orthonormal(basis, &[Point::axis(n, i)], TIE_BREAK_RESIDUAL);
    }
}

/// Orthonormal basis of the span of `vectors`.
pub fn orthonormal_span(vectors: &[Point]) -> Vec<Point> {
    let mut basis = Vec::new();
    extend_orthonormal(&mut basis, vectors, DEPENDENCE_RESIDUAL);
    basis
}

/// Orthonormal basis of the orthogonal complement of span(`vectors`) in R^n.
pub fn orthonormal_complement(vectors: &[Point], n: usize) -> Result<Frame> {
    check_dims(vectors, n)?;
    let mut basis = orthonormal_span(vectors);
    let d = basis.len();
    if d >= n {
        return Err(Error::FullSpan);
    }
    fill_with_axes(&mut basis, n, n);
    Ok(Frame::from_orthonormal(basis.split_off(d)))
}

/// First unit vector orthogonal to `vectors` under the canonical-axis
/// tie-break.
pub fn tie_break_direction(vectors: &[Point], n: usize) -> Result<Point> {
    let frame = orthonormal_complement(vectors, n)?;
    Ok(frame.basis[0].clone())
}

/// Orthogonal projection of `x` onto span(F).
pub fn project(x: &Point, frame: &Frame) -> Result<Point> {
    if x.dim() != frame.ambient_dim() {
        return Err(Error::DimensionMismatch {
            expected: frame.ambient_dim(),
            found: x.dim(),
        });
    }
    Ok(frame.embed(&frame.coordinates(x)))
}

/// A two-dimensional orthonormal frame whose span contains `a` and `b`.
pub fn section2d(a: &Point, b: &Point) -> Result<Frame> {
    let n = a.dim();
    check_dims(std::slice::from_ref(b), n)?;
    if n < 2 {
        return Err(Error::InvalidN(n));
    }
    if a.distance(b) <= crate::tolerance::Tolerance::default().eps_eq {
        return Err(Error::DegenerateInput("section2d needs a != b".into()));
    }
    let mut basis = orthonormal_span(&[a.clone(), b.clone()]);
    fill_with_axes(&mut basis, n, 2);
    Ok(Frame::from_orthonormal(basis))
}

/// Standard normal vector in R^n.
pub fn gaussian_vector<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Point {
    Point((0..n).map(|_| StandardNormal.sample(rng)).collect())
}

/// Haar-distributed orthonormal basis of R^n (orthonormalized Gaussian
/// matrix).
pub fn random_orthonormal_basis<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Frame {
    let mut basis: Vec<Point> = Vec::with_capacity(n);
    while basis.len() < n {
        let g = gaussian_vector(n, rng);
        // Rejection of near-dependent draws keeps the result Haar.
        extend_orthonormal(&mut basis, &[g], 1e-3);
    }
    Frame::from_orthonormal(basis)
}

/// Uniform point in the ball of radius `radius` in R^n.
pub fn uniform_in_ball<R: Rng + ?Sized>(n: usize, radius: f64, rng: &mut R) -> Point {
    loop {
        let g = gaussian_vector(n, rng);
        if let Some(dir) = g.normalized() {
            let u: f64 = rng.random();
            return dir.scale(radius * u.powf(1.0 / n as f64));
        }
    }
}

/// Uniform point on the unit sphere of R^n.
pub fn uniform_on_sphere<R: Rng + ?Sized>(n: usize, rng: &mut R) -> Point {
    loop {
        if let Some(dir) = gaussian_vector(n, rng).normalized() {
            return dir;
        }
    }
}
