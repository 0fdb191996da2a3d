//! Independent certificate checker.
//!
//! Each set gives the row `sum_{i in set} f(p_i) - W = 0`. The claim holds
//! for every solution iff `e_x - e_y` lies in the row space, which is decided
//! by a Householder QR factorization with column pivoting of the transposed
//! system.

use serde::{Deserialize, Serialize};

use super::Certificate;
use crate::error::{Error, Result};
use crate::tolerance::Tolerance;

/// Remaining column norm below which a column counts as dependent.
const PIVOT_FLOOR: f64 = 1e-9;

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckReport {
    pub accepted: bool,
    pub residual: f64,
    pub rank: usize,
    pub sets_checked: usize,
    pub points: usize,
    pub worst_distance_error: f64,
    pub max_norm: f64,
}

fn validate_structure(cert: &Certificate) -> Result<()> {
    let n = cert.n;
    if n == 0 {
        return Err(Error::MalformedCertificate("n = 0".into()));
    }
    for (i, p) in cert.points.iter().enumerate() {
        if p.dim() != n {
            return Err(Error::MalformedCertificate(format!(
                "point {i} has dimension {}, expected {n}",
                p.dim()
            )));
        }
        if !p.is_finite() {
            return Err(Error::MalformedCertificate(format!("point {i} is not finite")));
        }
    }
    let np = cert.points.len();
    let (x, y) = cert.claim;
    if x >= np || y >= np {
        return Err(Error::MalformedCertificate(format!(
            "claim ({x}, {y}) refers past {np} points"
        )));
    }
    for (i, s) in cert.sets.iter().enumerate() {
        if s.len() != n + 1 {
            return Err(Error::MalformedCertificate(format!(
                "set {i} has {} points, a maximal set has {}",
                s.len(),
                n + 1
            )));
        }
        if let Some(&bad) = s.iter().find(|&&id| id >= np) {
            return Err(Error::MalformedCertificate(format!("set {i} refers to point {bad}")));
        }
    }
    Ok(())
}

/// Householder QR with column pivoting of the matrix whose columns are
/// `cols`; applies the reflections to `target` and returns the rank.
fn pivoted_qr_residual(cols: &mut [Vec<f64>], target: &mut [f64]) -> usize {
    let rows = target.len();
    let m = cols.len();
    let mut rank = 0;
    for k in 0..rows.min(m) {
        let mut best = (k, -1.0);
        for (j, c) in cols.iter().enumerate().skip(k) {
            let nrm: f64 = c[k..].iter().map(|v| v * v).sum();
            if nrm > best.1 {
                best = (j, nrm);
            }
        }
        let norm = best.1.max(0.0).sqrt();
        if norm <= PIVOT_FLOOR {
            break;
        }
        cols.swap(k, best.0);
        let (head, tail) = cols.split_at_mut(k + 1);
        let col = &mut head[k];
        let alpha = if col[k] > 0.0 { -norm } else { norm };
        let mut v: Vec<f64> = col[k..].to_vec();
        v[0] -= alpha;
        let vv: f64 = v.iter().map(|x| x * x).sum();
        col[k] = alpha;
        for x in &mut col[k + 1..] {
            *x = 0.0;
        }
        if vv > 0.0 {
            let reflect = |c: &mut [f64]| {
                let dot: f64 = v.iter().zip(c.iter()).map(|(a, b)| a * b).sum();
                if dot != 0.0 {
                    let s = 2.0 * dot / vv;
                    for (ci, vi) in c.iter_mut().zip(&v) {
                        *ci -= s * vi;
                    }
                }
            };
            for c in tail.iter_mut() {
                reflect(&mut c[k..]);
            }
            reflect(&mut target[k..]);
        }
        rank += 1;
    }
    rank
}

/// Re-verifies every set and decides whether the set equations imply
/// `f(x) = f(y)`.
pub fn check_certificate(cert: &Certificate, tol: &Tolerance) -> Result<CheckReport> {
    tol.validate()?;
    validate_structure(cert)?;
    let mut worst_distance_error: f64 = 0.0;
    let mut max_norm: f64 = 0.0;
    for (index, s) in cert.sets.iter().enumerate() {
        let mut violation: f64 = 0.0;
        for (a, &i) in s.iter().enumerate() {
            let p = &cert.points[i];
            max_norm = max_norm.max(p.norm());
            violation = violation.max(p.norm() - 1.0);
            for &j in &s[a + 1..] {
                let err = (p.distance(&cert.points[j]) - 1.0).abs();
                worst_distance_error = worst_distance_error.max(err);
                violation = violation.max(err);
            }
        }
        if violation > tol.eps_eq {
            return Err(Error::SetInvalid { index, violation });
        }
    }
    let (x, y) = cert.claim;
    let mut report = CheckReport {
        accepted: true,
        residual: 0.0,
        rank: 0,
        sets_checked: cert.sets.len(),
        points: cert.points.len(),
        worst_distance_error,
        max_norm,
    };
    if x == y {
        return Ok(report);
    }
    // Compact variable numbering: points that occur, then W.
    let mut var = vec![usize::MAX; cert.points.len()];
    let mut next = 0;
    for &id in cert.sets.iter().flatten().chain([x, y].iter()) {
        if var[id] == usize::MAX {
            var[id] = next;
            next += 1;
        }
    }
    let w = next;
    let rows = next + 1;
    let mut cols: Vec<Vec<f64>> = cert
        .sets
        .iter()
        .map(|s| {
            let mut c = vec![0.0; rows];
            for &id in s {
                c[var[id]] += 1.0;
            }
            c[w] = -1.0;
            c
        })
        .collect();
    let mut target = vec![0.0; rows];
    target[var[x]] = 1.0;
    target[var[y]] = -1.0;
    let rank = pivoted_qr_residual(&mut cols, &mut target);
    let residual = target[rank..].iter().map(|v| v * v).sum::<f64>().sqrt();
    report.rank = rank;
    report.residual = residual;
    if residual >= tol.eps_rank {
        return Err(Error::ClaimNotImplied { residual });
    }
    Ok(report)
}
