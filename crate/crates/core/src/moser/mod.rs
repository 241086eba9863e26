//! Constants of the Moser/De Giorgi chain and an empirical harness for the
//! level-set lemmas.
//!
//! Every closed-form constant carries one generic absolute constant `c`
//! ([`AbsConstant`], default 1). Constants that are astronomically small
//! (`beta_2`, `beta_0`, `hat beta_2`) are only ever returned as logarithms.

mod constants;
mod harness;
mod ledger;
mod level_sets;
mod thresholds;

use serde::{Deserialize, Serialize};

use crate::criterion::CriterionError;
use crate::geometry::GeometryError;

pub use constants::{
    const_beta0_log, const_beta2_log2, const_c1, const_c1_prime, const_hatbeta2_bound, const_kappa0_delta0,
    const_mu_star, const_s, const_theta0, Beta0Log, Beta2Log2, HatBeta2,
};
pub use harness::{g_trace, swirl_to_pi, verify_growth_lemmas, GrowthInputs, LemmaRow, LemmaStatus, VerifyReport, LEMMAS};
pub use ledger::{Entry, MoserConstants, MoserInputs};
pub use level_sets::{level_sets, LevelSetReport};
pub use thresholds::{const_thresholds, Threshold, Thresholds};

#[derive(Debug, thiserror::Error)]
pub enum MoserError {
    #[error("domain error: {0}")]
    Domain(String),
    #[error("R = {r} is above the threshold {threshold} ({detail})")]
    Precondition { threshold: &'static str, r: f64, detail: String },
    #[error("integer constant does not fit: {0}")]
    Overflow(String),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error(transparent)]
    Criterion(#[from] CriterionError),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// The unnamed absolute constant shared by all formulas.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(try_from = "f64", into = "f64")]
pub struct AbsConstant(f64);

impl AbsConstant {
    pub fn new(c: f64) -> Result<Self, MoserError> {
        if c > 0.0 && c.is_finite() {
            Ok(Self(c))
        } else {
            Err(MoserError::Domain(format!("absolute constant must be positive, got {c}")))
        }
    }

    pub fn get(self) -> f64 {
        self.0
    }
}

impl Default for AbsConstant {
    fn default() -> Self {
        Self(1.0)
    }
}

impl TryFrom<f64> for AbsConstant {
    type Error = MoserError;
    fn try_from(c: f64) -> Result<Self, MoserError> {
        Self::new(c)
    }
}

impl From<AbsConstant> for f64 {
    fn from(c: AbsConstant) -> f64 {
        c.0
    }
}

/// `floor(x) + 1`, treating `x` within `1e-12` relative of an integer as
/// that integer so that exact products are not lost to rounding.
pub(crate) fn entier_plus_one(x: f64, what: &str) -> Result<u64, MoserError> {
    if !(x >= 0.0) || !x.is_finite() {
        return Err(MoserError::Domain(format!("{what}: argument {x}")));
    }
    let near = x.round();
    let x = if (x - near).abs() <= 1e-12 * x.max(1.0) { near } else { x.floor() };
    if x >= 2f64.powi(53) {
        return Err(MoserError::Overflow(format!("{what} = {x} + 1")));
    }
    Ok(x as u64 + 1)
}
