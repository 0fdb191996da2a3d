use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Numerical thresholds shared by every check.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Tolerance {
    /// Equality of distances and norms.
    pub eps_eq: f64,
    /// Residual threshold for the row-space test.
    pub eps_rank: f64,
    /// Resolution of brute-force grid searches.
    pub grid_step: f64,
}

impl Default for Tolerance {
    fn default() -> Self {
        Self {
            eps_eq: 1e-9,
            eps_rank: 1e-8,
            grid_step: 1e-4,
        }
    }
}

impl Tolerance {
    pub fn new(eps_eq: f64, eps_rank: f64, grid_step: f64) -> Result<Self> {
        let t = Self {
            eps_eq,
            eps_rank,
            grid_step,
        };
        t.validate()?;
        Ok(t)
    }

    pub fn validate(&self) -> Result<()> {
        let fields = [
            ("eps_eq", self.eps_eq),
            ("eps_rank", self.eps_rank),
            ("grid_step", self.grid_step),
        ];
        for (name, v) in fields {
            if !(v.is_finite() && v > 0.0) {
                return Err(Error::InvalidTolerance(format!("{name} = {v} must be positive")));
            }
        }
        if self.eps_eq >= self.grid_step {
            return Err(Error::InvalidTolerance(format!(
                "eps_eq = {} must be below grid_step = {}",
                self.eps_eq, self.grid_step
            )));
        }
        Ok(())
    }

    /// Same thresholds with `eps_eq` replaced.
    pub fn with_eps(mut self, eps_eq: f64) -> Result<Self> {
        self.eps_eq = eps_eq;
        self.validate()?;
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults_are_valid() {
        Tolerance::default().validate().unwrap();
    }

    #[test]
    fn rejects_nonpositive_and_inverted() {
        assert!(Tolerance::new(0.0, 1e-8, 1e-4).is_err());
        assert!(Tolerance::new(1e-9, -1.0, 1e-4).is_err());
        assert!(Tolerance::new(1e-3, 1e-8, 1e-4).is_err());
        assert!(Tolerance::new(f64::NAN, 1e-8, 1e-4).is_err());
    }
}
