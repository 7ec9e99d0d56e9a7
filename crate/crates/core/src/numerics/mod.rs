//! Special functions and quadrature shared by the rest of the crate.

pub mod bessel;
pub mod gamma;
pub mod incomplete_gamma;
pub mod quadrature;
pub mod zeta;

pub use bessel::{bessel_k, bessel_k_imag, bessel_k_scaled, BesselK};
pub use gamma::{gamma, gamma_r, gamma_real, ln_gamma, ln_gamma_r, ln_gamma_real};
pub use incomplete_gamma::{ln_upper_incomplete_gamma, upper_incomplete_gamma};
pub use quadrature::{
    integrate, CompensatedComplex, CompensatedSum, Domain, Estimate, GaussLegendre, QuadratureSpec,
    Scheme,
};
pub use zeta::{completed_zeta, dirichlet_beta, hurwitz_zeta, zeta};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// Environment variable that overrides the default number of working digits.
pub const PRECISION_ENV: &str = "PERIOD_MOMENTS_PRECISION";

/// Working precision and tolerance targets.
///
/// Arithmetic is binary64 throughout (double-double in a few sensitive
/// spots). `working_digits` sets the truncation horizon of tail bounds
/// (10^-digits, floored at the binary64 unit roundoff); the tolerances are
/// what individual checks compare against.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Precision {
    pub working_digits: u32,
    pub target_abs_tol: f64,
    pub target_rel_tol: f64,
}

impl Default for Precision {
    fn default() -> Self {
        Self {
            working_digits: 40,
            target_abs_tol: 1e-14,
            target_rel_tol: 1e-12,
        }
    }
}

impl Precision {
    pub fn new(working_digits: u32, target_abs_tol: f64, target_rel_tol: f64) -> Result<Self> {
        let p = Self {
            working_digits,
            target_abs_tol,
            target_rel_tol,
        };
        p.validate()?;
        Ok(p)
    }

    /// Default precision with `PERIOD_MOMENTS_PRECISION` applied if set.
    pub fn from_env() -> Result<Self> {
        let mut p = Self::default();
        if let Ok(v) = std::env::var(PRECISION_ENV) {
            p.working_digits = v.trim().parse().map_err(|_| {
                Error::Domain(format!("{PRECISION_ENV}={v} is not a positive integer"))
            })?;
        }
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.target_abs_tol > 0.0) || !(self.target_rel_tol > 0.0) {
            return Err(Error::Domain("tolerances must be positive".into()));
        }
        let implied = (-self.target_rel_tol.log10()).ceil().max(0.0) as u32;
        if self.working_digits == 0 || self.working_digits < 2 * implied {
            return Err(Error::Domain(format!(
                "working_digits {} is below twice the {} digits implied by rel_tol {:e}",
                self.working_digits, implied, self.target_rel_tol
            )));
        }
        Ok(())
    }

    /// Relative size below which series tails are dropped.
    pub fn tail_eps(&self) -> f64 {
        10f64
            .powi(-(self.working_digits as i32))
            .max(f64::EPSILON * 0.25)
    }
}

/// Map over a slice, in parallel when the `parallel` feature is on. Output
/// order always matches input order.
#[cfg(feature = "parallel")]
pub(crate) fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    use rayon::prelude::*;
    items.par_iter().map(f).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_precision_is_valid() {
        let p = Precision::default();
        assert!(p.validate().is_ok());
        assert_eq!(p.working_digits, 40);
    }

    #[test]
    fn rejects_bad_precision() {
        assert!(Precision::new(10, 1e-14, 1e-12).is_err());
        assert!(Precision::new(40, 0.0, 1e-12).is_err());
        assert!(Precision::new(40, 1e-3, -1.0).is_err());
        assert!(Precision::new(24, 1e-3, 1e-12).is_ok());
    }
}

#[cfg(not(feature = "parallel"))]
pub(crate) fn par_map<T: Sync, R: Send>(items: &[T], f: impl Fn(&T) -> R + Sync + Send) -> Vec<R> {
    items.iter().map(f).collect()
}
