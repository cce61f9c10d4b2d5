//! Independent numerical oracles for the classical partition functions.

pub mod contour;
pub mod gauss;
pub mod montecarlo;
pub mod quadrature;
pub mod rng;

use serde::Serialize;

use crate::error::{Error, Result};

pub use contour::{contour_tail_bound, z_cpn_contour, z_cpn_residue};
pub use montecarlo::{sphere_average, z_cpn_montecarlo, z_cqn_exponential_mc};
pub use quadrature::{cpn_orthant_integral, z_cpn_quadrature, z_cqn_quadrature};

/// Knobs shared by the integrators.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IntegratorConfig {
    /// Relative refinement tolerance for quadrature; absolute tail budget for the contour.
    pub tol: f64,
    /// Cap on integrand evaluations for deterministic rules.
    pub max_evals: u64,
    /// Root seed of the Monte-Carlo streams.
    pub seed: u64,
    /// Half-width Λ of the truncated λ-line.
    pub lambda_cutoff: f64,
    /// Monte-Carlo sample count.
    pub samples: u64,
}

impl Default for IntegratorConfig {
    fn default() -> Self {
        Self { tol: 1e-10, max_evals: 100_000_000, seed: 0, lambda_cutoff: 1e4, samples: 1_000_000 }
    }
}

impl IntegratorConfig {
    pub fn validate(self) -> Result<Self> {
        if self.tol.is_nan() || self.tol <= 0.0 {
            return Err(Error::InvalidParameter(format!("tol must be positive, got {}", self.tol)));
        }
        if self.max_evals == 0 {
            return Err(Error::InvalidParameter("max_evals must be positive".into()));
        }
        if !(self.lambda_cutoff > 0.0 && self.lambda_cutoff.is_finite()) {
            return Err(Error::InvalidParameter(format!(
                "lambda_cutoff must be positive, got {}",
                self.lambda_cutoff
            )));
        }
        Ok(self)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn config_validation() {
        assert!(IntegratorConfig::default().validate().is_ok());
        assert!(IntegratorConfig { tol: 0.0, ..Default::default() }.validate().is_err());
        assert!(IntegratorConfig { max_evals: 0, ..Default::default() }.validate().is_err());
        assert!(IntegratorConfig { lambda_cutoff: -1.0, ..Default::default() }.validate().is_err());
    }
}
