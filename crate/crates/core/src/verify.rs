//! Property suites, one per acceptance criterion, each reporting its number
//! of checks, failures and worst-case slack (bound minus measured value;
//! negative means violated).

use std::f64::consts::FRAC_1_SQRT_2;
use std::time::Instant;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};

use crate::certify::{check_certificate, generate_equality_certificate, Certificate, GeneratorParams, CERTIFICATE_VERSION};
use crate::enlargement::{center_norm_bound, enlarge_to_maximal, k_region_test};
use crate::error::Error;
use crate::gamma::{gamma, gamma_bruteforce};
use crate::geometry::{gaussian_vector, random_orthonormal_basis, section2d, uniform_in_ball, uniform_on_sphere, Frame, Point};
use crate::simplex::{alpha, beta, canonical_simplex, cap_extension, sample_in_ball_set, EquilateralSet};
use crate::tolerance::Tolerance;
use crate::weights::{
    corner_norm, eta, falsify, frame_weight_sum, lambda_shell, shell_circuit_with, sin_owa_closed_form,
    sin_owh_closed_form, Verdict, WeightFn,
};

/// Amount by which every bound of a suite is tightened when a violation is
/// injected.
pub const INJECTED_SHIFT: f64 = 1.0;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Suite {
    Constants,
    Enlargement,
    CenterBounds,
    KRegion,
    GammaOracle,
    ShellGeometry,
    EtaMuNu,
    Certificates,
    Falsifier,
    NegativeControls,
}

impl Suite {
    pub const ALL: [Suite; 10] = [
        Suite::Constants,
        Suite::Enlargement,
        Suite::CenterBounds,
        Suite::KRegion,
        Suite::GammaOracle,
        Suite::ShellGeometry,
        Suite::EtaMuNu,
        Suite::Certificates,
        Suite::Falsifier,
        Suite::NegativeControls,
    ];

    pub fn name(self) -> &'static str {
        match self {
            Suite::Constants => "constants",
            Suite::Enlargement => "enlargement",
            Suite::CenterBounds => "center_bounds",
            Suite::KRegion => "k_region",
            Suite::GammaOracle => "gamma_oracle",
            Suite::ShellGeometry => "shell_geometry",
            Suite::EtaMuNu => "eta_mu_nu",
            Suite::Certificates => "certificates",
            Suite::Falsifier => "falsifier",
            Suite::NegativeControls => "negative_controls",
        }
    }

    pub fn from_name(name: &str) -> Option<Suite> {
        Suite::ALL.into_iter().find(|s| s.name() == name)
    }
}

/// Sample counts and dimension cap. The defaults are the acceptance sizes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyConfig {
    pub seed: u64,
    /// Upper end of every dimension range is capped at this value.
    pub n_max: usize,
    pub enlarge_seeds: usize,
    pub center_samples: usize,
    pub k_region_samples: usize,
    pub gamma_pairs: usize,
    pub gamma_nested: usize,
    pub cap_triples: usize,
    pub cert_pairs: usize,
    pub soundness_assignments: usize,
    pub falsify_samples: usize,
    pub frames: usize,
    pub inject_violation: Option<Suite>,
}

impl Default for VerifyConfig {
    fn default() -> Self {
        Self {
            seed: 0,
            n_max: 64,
            enlarge_seeds: 1000,
            center_samples: 10_000,
            k_region_samples: 100_000,
            gamma_pairs: 1000,
            gamma_nested: 200,
            cap_triples: 1000,
            cert_pairs: 100,
            soundness_assignments: 100,
            falsify_samples: 1000,
            frames: 100,
            inject_violation: None,
        }
    }
}

impl VerifyConfig {
    /// Small counts for smoke runs.
    pub fn quick(seed: u64) -> Self {
        Self {
            seed,
            enlarge_seeds: 20,
            center_samples: 200,
            k_region_samples: 500,
            gamma_pairs: 10,
            gamma_nested: 10,
            cap_triples: 50,
            cert_pairs: 2,
            soundness_assignments: 10,
            frames: 10,
            ..Self::default()
        }
    }

    fn range(&self, lo: usize, hi: usize) -> std::ops::RangeInclusive<usize> {
        lo..=hi.min(self.n_max).max(lo)
    }

    fn rng(&self, suite: Suite, salt: u64) -> ChaCha8Rng {
        let tag = suite as u64 + 1;
        ChaCha8Rng::seed_from_u64(self.seed ^ tag.wrapping_mul(0x9e37_79b9_7f4a_7c15) ^ salt.wrapping_mul(0xbf58_476d_1ce4_e5b9))
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SuiteReport {
    pub name: String,
    pub passed: bool,
    pub checks: usize,
    pub failures: usize,
    /// Smallest slack over all checks.
    pub worst_slack: f64,
    pub elapsed_secs: f64,
    /// First few failure descriptions.
    pub detail: Vec<String>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub seed: u64,
    pub passed: bool,
    pub suites: Vec<SuiteReport>,
}

const MAX_DETAIL: usize = 8;

struct Tally {
    suite: Suite,
    checks: usize,
    failures: usize,
    worst: f64,
    shift: f64,
    detail: Vec<String>,
    start: Instant,
}

impl Tally {
    fn new(suite: Suite, cfg: &VerifyConfig) -> Self {
        Self {
            suite,
            checks: 0,
            failures: 0,
            worst: f64::INFINITY,
            shift: if cfg.inject_violation == Some(suite) { INJECTED_SHIFT } else { 0.0 },
            detail: Vec::new(),
            start: Instant::now(),
        }
    }

    fn check(&mut self, slack: f64, what: impl FnOnce() -> String) {
        self.checks += 1;
        let s = slack - self.shift;
        if s < self.worst || s.is_nan() {
            self.worst = s;
        }
        if !(s >= 0.0) {
            self.failures += 1;
            if self.detail.len() < MAX_DETAIL {
                self.detail.push(format!("{} (slack {s:e})", what()));
            }
        }
    }

    /// A yes/no check; it does not enter the worst slack.
    fn require(&mut self, ok: bool, what: impl FnOnce() -> String) {
        if ok && self.shift == 0.0 {
            self.checks += 1;
        } else {
            self.fail(what());
        }
    }

    fn fail(&mut self, what: String) {
        self.checks += 1;
        self.failures += 1;
        if self.detail.len() < MAX_DETAIL {
            self.detail.push(what);
        }
    }

    fn elapsed(&self) -> f64 {
        self.start.elapsed().as_secs_f64()
    }

    fn finish(self) -> SuiteReport {
        SuiteReport {
            name: self.suite.name().to_string(),
            passed: self.failures == 0 && self.checks > 0,
            checks: self.checks,
            failures: self.failures,
            worst_slack: if self.worst.is_finite() { self.worst } else { 0.0 },
            elapsed_secs: self.elapsed(),
            detail: self.detail,
        }
    }
}

pub fn run_suite(suite: Suite, cfg: &VerifyConfig) -> SuiteReport {
    let mut t = Tally::new(suite, cfg);
    match suite {
        Suite::Constants => constants(cfg, &mut t),
        Suite::Enlargement => enlargement(cfg, &mut t),
        Suite::CenterBounds => center_bounds(cfg, &mut t),
        Suite::KRegion => k_region(cfg, &mut t),
        Suite::GammaOracle => gamma_oracle(cfg, &mut t),
        Suite::ShellGeometry => shell_geometry(cfg, &mut t),
        Suite::EtaMuNu => eta_mu_nu(cfg, &mut t),
        Suite::Certificates => certificates(cfg, &mut t),
        Suite::Falsifier => falsifier(cfg, &mut t),
        Suite::NegativeControls => negative_controls(cfg, &mut t),
    }
    t.finish()
}

pub fn verify_all(cfg: &VerifyConfig) -> VerifyReport {
    let suites: Vec<SuiteReport> = Suite::ALL.iter().map(|&s| run_suite(s, cfg)).collect();
    VerifyReport {
        seed: cfg.seed,
        passed: suites.iter().all(|s| s.passed),
        suites,
    }
}

fn constants(cfg: &VerifyConfig, t: &mut Tally) {
    const TOL: f64 = 1e-12;
    for k in cfg.range(1, 64) {
        // Scaled coordinate vectors e_i / sqrt2 are pairwise at distance 1.
        let basis: Vec<Point> = (0..=k).map(|i| Point::axis(k + 1, i).scale(FRAC_1_SQRT_2)).collect();
        let c = Point::mean(&basis[..k]);
        let b = beta(k).expect("k >= 1");
        let a = alpha(k + 1).expect("k + 1 >= 2");
        t.check(TOL - (basis[0].distance(&c) - b).abs(), || format!("beta_{k} by centre distance"));
        t.check(TOL - (basis[k].distance(&c) - a).abs(), || format!("alpha_{} by apex height", k + 1));
        // The library's own construction measures the same.
        match canonical_simplex(k, k + 1) {
            Ok(s) => {
                let p = s.points();
                let c = Point::mean(&p[..k]);
                t.check(TOL - (p[0].distance(&c) - b).abs(), || format!("canonical beta_{k}"));
                t.check(TOL - (p[k].distance(&c) - a).abs(), || format!("canonical alpha_{}", k + 1));
            }
            Err(e) => t.fail(format!("canonical_simplex({k}, {}): {e}", k + 1)),
        }
    }
    let secs = t.elapsed();
    t.check(1.0 - secs, || format!("runtime {secs:.3}s"));
}

fn enlargement(cfg: &VerifyConfig, t: &mut Tally) {
    let tol = Tolerance::default();
    for n in cfg.range(2, 8) {
        let mut rng = cfg.rng(Suite::Enlargement, n as u64);
        for i in 0..cfg.enlarge_seeds {
            let k = rng.random_range(1..=n + 1);
            let seed = match sample_in_ball_set(n, k, &mut rng) {
                Ok(s) => s,
                Err(e) => {
                    t.fail(format!("n={n} sample {i}: {e}"));
                    continue;
                }
            };
            match enlarge_to_maximal(&seed, &tol) {
                Ok((full, _)) => {
                    t.require(full.len() == n + 1, || {
                        format!("n={n} sample {i}: size {}", full.len())
                    });
                    t.check(1e-9 - full.max_distance_error(), || format!("n={n} sample {i}: distances"));
                    t.check(1.0 + 1e-9 - full.max_norm(), || format!("n={n} sample {i}: norms"));
                }
                Err(e) => t.fail(format!("n={n} sample {i}: {e}")),
            }
        }
    }
    let secs = t.elapsed();
    t.check(30.0 - secs, || format!("runtime {secs:.1}s"));
}

fn center_bounds(cfg: &VerifyConfig, t: &mut Tally) {
    let tol = Tolerance::default();
    for n in cfg.range(2, 6) {
        let mut rng = cfg.rng(Suite::CenterBounds, n as u64);
        for i in 0..cfg.center_samples {
            let k = rng.random_range(1..=n + 1);
            let res = sample_in_ball_set(n, k, &mut rng).and_then(|s| center_norm_bound(&s, &tol));
            match res {
                Ok((c, bound)) => t.check(bound + 1e-9 - c, || format!("n={n} k={k} sample {i}: |c| = {c}")),
                Err(e) => t.fail(format!("n={n} sample {i}: {e}")),
            }
        }
    }
}

/// Randomly rotated maximal set centred at the origin.
fn centred_maximal(n: usize, rng: &mut ChaCha8Rng) -> EquilateralSet {
    let rot = random_orthonormal_basis(n, rng);
    let base = canonical_simplex(n, n + 1).expect("n >= 1");
    let pts = base.points().iter().map(|p| rot.embed(p.coords())).collect();
    EquilateralSet::from_points(pts).expect("rotated simplex")
}

fn k_region(cfg: &VerifyConfig, t: &mut Tally) {
    let tol = Tolerance::default();
    for n in cfg.range(2, 6) {
        let mut rng = cfg.rng(Suite::KRegion, n as u64);
        let s = centred_maximal(n, &mut rng);
        let p = s.points();
        let mut extreme = vec![Point::zeros(n)];
        extreme.extend(p[1..].iter().map(|q| q - &p[0]));
        for i in 0..cfg.k_region_samples {
            let w: Vec<f64> = (0..extreme.len()).map(|_| -(1.0 - rng.random::<f64>()).ln()).collect();
            let total: f64 = w.iter().sum();
            let x = extreme
                .iter()
                .zip(&w)
                .fold(Point::zeros(n), |acc, (e, wi)| acc.add_scaled(wi / total, e));
            t.check(1.0 + 1e-9 - x.norm(), || format!("n={n} combination {i}: |x| = {}", x.norm()));
        }
        // The cone <x, x_i> >= 0 (i >= 2) is generated by the rays x_j - x_1,
        // where the bound is attained at norm 1; half the draws use sparse
        // coefficients to land on its faces.
        let mut accepted = 0;
        let mut attempts = 0usize;
        while accepted < cfg.k_region_samples && attempts < 10 * cfg.k_region_samples {
            attempts += 1;
            let sparse = rng.random_bool(0.5);
            let mut x = Point::zeros(n);
            for e in &extreme[1..] {
                let c = if sparse && rng.random_bool(0.5) { 0.0 } else { rng.random::<f64>() };
                x = x.add_scaled(c, e);
            }
            let Some(dir) = x.normalized() else {
                continue;
            };
            let r = rng.random_range(1.0..2.0);
            let x = dir.scale(r);
            if p[1..].iter().any(|q| x.dot(q) < -1e-12) {
                continue;
            }
            accepted += 1;
            match k_region_test(&x, &s, &tol) {
                Ok((_, ip)) => t.check(ip - (0.5 - 1e-9), || format!("n={n}: <x, v> = {ip} at |x| = {r}")),
                Err(e) => t.fail(format!("n={n}: {e}")),
            }
        }
        if accepted < cfg.k_region_samples {
            t.fail(format!("n={n}: only {accepted} constrained samples accepted"));
        }
    }
}

fn gamma_oracle(cfg: &VerifyConfig, t: &mut Tally) {
    let tol = Tolerance::default();
    for n in cfg.range(2, 6) {
        let mut rng = cfg.rng(Suite::GammaOracle, n as u64);
        let full = Frame::identity(n);
        for i in 0..cfg.gamma_pairs {
            let a = uniform_in_ball(n, 1.0, &mut rng);
            let b = uniform_in_ball(n, 1.0, &mut rng);
            let res = gamma(&a, &b, &tol).and_then(|g| Ok((g.value, gamma_bruteforce(&a, &b, &full, 1e-4)?)));
            match res {
                Ok((closed, brute)) => t.check(2e-4 - (closed - brute).abs(), || {
                    format!("n={n} pair {i}: closed {closed} vs brute {brute}")
                }),
                Err(e) => t.fail(format!("n={n} pair {i}: {e}")),
            }
        }
    }
    let mut rng = cfg.rng(Suite::GammaOracle, 0);
    let dims: Vec<usize> = cfg.range(3, 6).collect();
    for i in 0..cfg.gamma_nested {
        let n = dims[i % dims.len()];
        let a = uniform_in_ball(n, 1.0, &mut rng);
        let b = uniform_in_ball(n, 1.0, &mut rng);
        let rot = random_orthonormal_basis(n, &mut rng);
        let k1 = rng.random_range(2..n);
        let k2 = rng.random_range(k1 + 1..=n);
        let res = Frame::new(rot.basis()[..k1].to_vec(), &tol)
            .and_then(|m1| Ok((m1, Frame::new(rot.basis()[..k2].to_vec(), &tol)?)))
            .and_then(|(m1, m2)| Ok((gamma_bruteforce(&a, &b, &m1, 1e-4)?, gamma_bruteforce(&a, &b, &m2, 1e-4)?)));
        match res {
            // A larger subspace has more directions to fit, so less clearance.
            Ok((g1, g2)) => t.check(g1 - g2 + 1e-4, || format!("nested {i}: {g1} < {g2}")),
            Err(e) => t.fail(format!("nested {i}: {e}")),
        }
    }
    let secs = t.elapsed();
    t.check(120.0 - secs, || format!("runtime {secs:.1}s"));
}

fn shell_geometry(cfg: &VerifyConfig, t: &mut Tally) {
    const TOL: f64 = 1e-12;
    for n in cfg.range(2, 64) {
        let plan = section2d(&Point::axis(n, 0), &Point::axis(n, 1)).and_then(|sec| shell_circuit_with(n, &sec, 0.0, 4));
        let plan = match plan {
            Ok(p) => p,
            Err(e) => {
                t.fail(format!("n={n}: {e}"));
                continue;
            }
        };
        let a = alpha(n + 1).expect("n >= 1");
        let c = (-1.0 + (8.0 * a * a - 1.0).sqrt()) / 2.0;
        for (k, corner) in plan.corners.iter().enumerate() {
            t.check(TOL - (corner[0].abs() - c).abs(), || format!("n={n} corner {k} x"));
            t.check(TOL - (corner[1].abs() - c).abs(), || format!("n={n} corner {k} y"));
        }
        let oa = plan.corners[0][0].hypot(plan.corners[0][1]);
        t.check(TOL - (oa - corner_norm(n)).abs(), || format!("n={n} |oa|"));
        let lam = lambda_shell(n).expect("n >= 2");
        t.check(TOL - (lam - (2.0 * a - oa)).abs(), || format!("n={n} lambda"));
        t.check(plan.sin_owh - plan.sin_owa, || format!("n={n} sin owa > sin owh"));
        t.check(TOL - (plan.sin_owa - sin_owa_closed_form(n)).abs(), || format!("n={n} sin owa"));
        t.check(TOL - (plan.sin_owh - sin_owh_closed_form(n)).abs(), || format!("n={n} sin owh"));
    }
}

fn eta_mu_nu(cfg: &VerifyConfig, t: &mut Tally) {
    let tol = Tolerance::default();
    for n in cfg.range(2, 64) {
        let b = beta(n + 1).expect("n >= 1");
        match eta(n, b) {
            Ok(e) => t.check(1e-12 - (e - b).abs(), || format!("n={n}: eta(beta) = {e}")),
            Err(e) => t.fail(format!("n={n}: {e}")),
        }
    }
    let mut rng = cfg.rng(Suite::EtaMuNu, 0);
    let dims: Vec<usize> = cfg.range(2, 8).collect();
    for i in 0..cfg.cap_triples {
        let n = dims[rng.random_range(0..dims.len())];
        let lo = beta(n).expect("n >= 1");
        let rho = rng.random_range(lo..=1.0);
        let dir = uniform_on_sphere(n, &mut rng);
        let res = eta(n, rho).and_then(|h| {
            let x = dir.scale(h);
            Ok((cap_extension(&x, rho, &tol)?, x))
        });
        let (set, x) = match res {
            Ok(v) => v,
            Err(e) => {
                t.fail(format!("triple {i} (n={n}, rho={rho}): {e}"));
                continue;
            }
        };
        t.require(set.len() == n, || format!("triple {i}: {} companions", set.len()));
        let mut worst: f64 = 0.0;
        for (j, p) in set.points().iter().enumerate() {
            worst = worst.max((p.norm() - rho).abs());
            worst = worst.max((p.distance(&x) - 1.0).abs());
            for q in &set.points()[j + 1..] {
                worst = worst.max((p.distance(q) - 1.0).abs());
            }
        }
        t.check(1e-9 - worst, || format!("triple {i} (n={n}, rho={rho}): error {worst:e}"));
    }
}

/// `count` random solutions of the set equations of `cert` (one value per
/// point plus `W`), by reduced row echelon form of the system with random
/// values on the free variables. Independent of the checker's factorization.
pub fn feasible_assignments<R: Rng + ?Sized>(cert: &Certificate, count: usize, rng: &mut R) -> Vec<Vec<f64>> {
    let np = cert.points.len();
    let w = np;
    let cols = np + 1;
    let mut a: Vec<Vec<f64>> = cert
        .sets
        .iter()
        .map(|s| {
            let mut row = vec![0.0; cols];
            for &id in s {
                row[id] += 1.0;
            }
            row[w] = -1.0;
            row
        })
        .collect();
    let mut pivots = Vec::new();
    let mut r = 0;
    for c in 0..cols {
        if r == a.len() {
            break;
        }
        let (best, mag) = (r..a.len()).map(|i| (i, a[i][c].abs())).fold((r, 0.0), |b, x| if x.1 > b.1 { x } else { b });
        if mag < 1e-9 {
            continue;
        }
        a.swap(r, best);
        let p = a[r][c];
        for v in a[r].iter_mut() {
            *v /= p;
        }
        let pivot_row = a[r].clone();
        for (i, row) in a.iter_mut().enumerate() {
            let f = row[c];
            if i != r && f != 0.0 {
                for (x, y) in row.iter_mut().zip(&pivot_row) {
                    if *y != 0.0 {
                        *x -= f * y;
                    }
                }
                row[c] = 0.0;
            }
        }
        pivots.push(c);
        r += 1;
    }
    let mut is_pivot = vec![false; cols];
    for &c in &pivots {
        is_pivot[c] = true;
    }
    (0..count)
        .map(|_| {
            let mut f: Vec<f64> = (0..cols)
                .map(|c| if is_pivot[c] { 0.0 } else { gaussian_vector(1, rng).0[0] })
                .collect();
            for (row, &c) in a.iter().zip(&pivots) {
                let s: f64 = (0..cols).filter(|&j| !is_pivot[j]).map(|j| row[j] * f[j]).sum();
                f[c] = -s;
            }
            f
        })
        .collect()
}

/// Largest `|sum_{i in set} f(p_i) - W|` over the sets of `cert`.
pub fn assignment_residual(cert: &Certificate, f: &[f64]) -> f64 {
    let w = f[cert.points.len()];
    cert.sets
        .iter()
        .map(|s| (s.iter().map(|&i| f[i]).sum::<f64>() - w).abs())
        .fold(0.0, f64::max)
}

fn certificates(cfg: &VerifyConfig, t: &mut Tally) {
    let tol = Tolerance::default();
    for n in cfg.range(2, 4) {
        let mut rng = cfg.rng(Suite::Certificates, n as u64);
        for i in 0..cfg.cert_pairs {
            let x = uniform_in_ball(n, 1.0, &mut rng);
            let y = uniform_in_ball(n, 1.0, &mut rng);
            let start = Instant::now();
            let cert = match generate_equality_certificate(&x, &y, n) {
                Ok(c) => c,
                Err(e) => {
                    t.fail(format!("n={n} pair {i}: {e}"));
                    continue;
                }
            };
            let report = check_certificate(&cert, &tol);
            let secs = start.elapsed().as_secs_f64();
            match report {
                Ok(r) => t.check(1e-8 - r.residual, || format!("n={n} pair {i}: residual {}", r.residual)),
                Err(e) => {
                    t.fail(format!("n={n} pair {i}: rejected: {e}"));
                    continue;
                }
            }
            t.check(5000.0 - cert.sets.len() as f64, || format!("n={n} pair {i}: {} sets", cert.sets.len()));
            t.check(10.0 - secs, || format!("n={n} pair {i}: {secs:.2}s"));
            let (ix, iy) = cert.claim;
            for f in feasible_assignments(&cert, cfg.soundness_assignments, &mut rng) {
                let res = assignment_residual(&cert, &f);
                t.check(1e-8 - res, || format!("n={n} pair {i}: assignment residual {res:e}"));
                let d = (f[ix] - f[iy]).abs();
                t.check(1e-6 - d, || format!("n={n} pair {i}: |f(x) - f(y)| = {d:e}"));
            }
        }
    }
}

fn falsifier(cfg: &VerifyConfig, t: &mut Tally) {
    let seed = cfg.seed;
    match falsify(&WeightFn::new(|x: &Point| x.norm_sq()), 3, cfg.falsify_samples, seed) {
        Ok(r) => {
            t.check(r.spread - 0.01, || format!("|x|^2 spread {}", r.spread));
            t.require(r.verdict == Verdict::Disproved, || "|x|^2 not disproved".into());
        }
        Err(e) => t.fail(format!("|x|^2: {e}")),
    }
    match falsify(&WeightFn::new(|_: &Point| 1.0), 3, cfg.falsify_samples, seed) {
        Ok(r) => {
            t.check(1e-12 - r.spread, || format!("constant spread {}", r.spread));
            t.require(r.verdict == Verdict::Consistent, || "constant disproved".into());
        }
        Err(e) => t.fail(format!("constant: {e}")),
    }
    for n in cfg.range(3, 6) {
        let mut rng = cfg.rng(Suite::Falsifier, n as u64);
        for i in 0..cfg.frames {
            let g: Vec<Vec<f64>> = (0..n).map(|_| gaussian_vector(n, &mut rng).0).collect();
            let sym: Vec<Vec<f64>> = (0..n)
                .map(|r| (0..n).map(|c| 0.5 * (g[r][c] + g[c][r])).collect())
                .collect();
            match frame_weight_sum(&sym, rng.random()) {
                Ok((sum, half_trace)) => t.check(1e-9 - (sum - half_trace).abs(), || {
                    format!("n={n} frame {i}: {sum} vs {half_trace}")
                }),
                Err(e) => t.fail(format!("n={n} frame {i}: {e}")),
            }
        }
    }
}

fn negative_controls(cfg: &VerifyConfig, t: &mut Tally) {
    let tol = Tolerance::default();
    let mut rng = cfg.rng(Suite::NegativeControls, 0);
    let pairs = [
        (2, vec![0.9, 0.0], vec![0.0, 0.9]),
        (3, vec![0.0, 0.0, 0.0], vec![0.95, 0.0, 0.0]),
    ];
    for (n, x, y) in pairs {
        if n > cfg.n_max.max(2) {
            continue;
        }
        let cert = match generate_equality_certificate(&Point::new(x), &Point::new(y), n) {
            Ok(c) => c,
            Err(e) => {
                t.fail(format!("n={n}: generation failed: {e}"));
                continue;
            }
        };
        let mut used = vec![false; cert.points.len()];
        for &id in cert.sets.iter().flatten() {
            used[id] = true;
        }
        for id in (0..cert.points.len()).filter(|&i| used[i]) {
            let mut bad = cert.clone();
            let kick = uniform_on_sphere(n, &mut rng).scale(1e-3);
            bad.points[id] = &bad.points[id] + &kick;
            match check_certificate(&bad, &tol) {
                Err(Error::SetInvalid { violation, .. }) => {
                    t.check(violation - tol.eps_eq, || format!("n={n} point {id}: violation {violation:e}"))
                }
                other => t.fail(format!("n={n} point {id} tampered: {other:?}")),
            }
        }
    }
    for n in cfg.range(2, 4) {
        let set = canonical_simplex(n, n + 1).expect("n >= 1");
        let cert = Certificate {
            version: CERTIFICATE_VERSION,
            n,
            tolerance: tol,
            points: set.into_points(),
            sets: vec![(0..=n).collect()],
            claim: (0, 1),
            generator_params: GeneratorParams {
                epsilon: 0.0,
                shell_rho_schedule: vec![],
            },
        };
        match check_certificate(&cert, &tol) {
            Err(Error::ClaimNotImplied { residual }) => {
                t.check(residual - tol.eps_rank, || format!("n={n} single set residual {residual:e}"))
            }
            other => t.fail(format!("n={n} single set: {other:?}")),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn suite_names_round_trip() {
        for s in Suite::ALL {
            assert_eq!(Suite::from_name(s.name()), Some(s));
        }
        assert_eq!(Suite::from_name("nope"), None);
    }

    #[test]
    fn quick_run_passes() {
        let r = verify_all(&VerifyConfig::quick(7));
        for s in &r.suites {
            assert!(s.passed, "{s:?}");
        }
        assert_eq!(r.suites.len(), 10);
    }

    #[test]
    fn injected_violation_fails_only_its_suite() {
        let mut cfg = VerifyConfig::quick(3);
        cfg.inject_violation = Some(Suite::CenterBounds);
        let bad = run_suite(Suite::CenterBounds, &cfg);
        assert!(!bad.passed && bad.failures == bad.checks);
        assert!(run_suite(Suite::Constants, &cfg).passed);
    }

    #[test]
    fn assignments_solve_the_link_system() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let cert = generate_equality_certificate(&Point::new(vec![0.9, 0.0]), &Point::new(vec![0.0, 0.9]), 2).unwrap();
        for f in feasible_assignments(&cert, 5, &mut rng) {
            assert!(assignment_residual(&cert, &f) < 1e-10);
        }
    }
}
