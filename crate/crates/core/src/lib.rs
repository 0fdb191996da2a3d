//! Standard equilateral sets in the closed unit ball of R^n, and the
//! machinery showing that every equilateral weight on the ball is constant:
//! closed-form constants with brute-force cross-checks, a falsifier for
//! candidate weights, and a generator and checker for equality certificates.

pub mod certify;
pub mod enlargement;
pub mod error;
pub mod gamma;
pub mod geometry;
pub mod json;
pub mod simplex;
pub mod tolerance;
pub mod verify;
pub mod weights;

pub use error::{Error, Result};
pub use geometry::{Frame, Point};
pub use simplex::{alpha, beta, EquilateralSet};
pub use tolerance::Tolerance;
