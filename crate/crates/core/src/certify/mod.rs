//! Equality certificates: finite lists of maximal standard equilateral sets
//! whose sum equations imply `f(x) = f(y)` for every equilateral weight `f`.

mod check;
mod generate;

pub use check::{check_certificate, CheckReport};
pub use generate::{
    constant_lemma_relation, default_epsilon, generate_equality_certificate, generate_with,
    rho_schedule, theorem_step_relation, GeneratorConfig, StepKind, StepOutcome,
};

use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::Point;
use crate::json;
use crate::tolerance::Tolerance;

/// Format version written into every certificate.
pub const CERTIFICATE_VERSION: u32 = 1;

/// A linear relation `sum_i c_i f(p_i) = w * W`.
#[derive(Debug, Clone, Default, PartialEq, Serialize, Deserialize)]
pub struct Relation {
    pub terms: BTreeMap<usize, f64>,
    pub rhs_w_coeff: f64,
}

impl Relation {
    /// The row of one set: every point with coefficient 1, equal to `W`.
    pub fn from_set(ids: &[usize]) -> Self {
        let mut terms = BTreeMap::new();
        for &i in ids {
            *terms.entry(i).or_insert(0.0) += 1.0;
        }
        Self {
            terms,
            rhs_w_coeff: 1.0,
        }
    }

    /// `self + c * other`, dropping zero coefficients.
    pub fn add_scaled(&self, c: f64, other: &Relation) -> Relation {
        let mut terms = self.terms.clone();
        for (&i, &v) in &other.terms {
            *terms.entry(i).or_insert(0.0) += c * v;
        }
        terms.retain(|_, v| *v != 0.0);
        Relation {
            terms,
            rhs_w_coeff: self.rhs_w_coeff + c * other.rhs_w_coeff,
        }
    }

    /// Whether this is `f(x) - f(y) = 0` (up to sign).
    pub fn is_equality(&self, x: usize, y: usize) -> bool {
        if self.rhs_w_coeff != 0.0 || self.terms.len() != 2 {
            return false;
        }
        match (self.terms.get(&x), self.terms.get(&y)) {
            (Some(&a), Some(&b)) => a == -b && a != 0.0,
            _ => false,
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct GeneratorParams {
    pub epsilon: f64,
    pub shell_rho_schedule: Vec<f64>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Certificate {
    pub version: u32,
    pub n: usize,
    pub tolerance: Tolerance,
    pub points: Vec<Point>,
    /// Each set lists `n + 1` indices into `points`.
    pub sets: Vec<Vec<usize>>,
    pub claim: (usize, usize),
    pub generator_params: GeneratorParams,
}

impl Certificate {
    pub fn relations(&self) -> Vec<Relation> {
        self.sets.iter().map(|s| Relation::from_set(s)).collect()
    }

    /// JSON text with every coordinate printed to 17 significant digits.
    pub fn to_json(&self) -> Result<String> {
        json::to_string(self)
    }

    pub fn from_json(text: &str) -> Result<Self> {
        serde_json::from_str(text).map_err(|e| Error::MalformedCertificate(e.to_string()))
    }
}
