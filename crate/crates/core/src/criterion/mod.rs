//! Scale-invariant quantities of the velocity on parabolic cylinders and the
//! supercritical gauge they are compared against.
//!
//! For an axis point `z0` and radius `R`, with `Q(z0, R)` the standard cylinder:
//!
//! * `f(R) = R^{-1/2} ( int ( int |v|^3 dx )^{4/3} dt )^{3/4}`
//! * `M(R) = R^{-1/2} ( int int |v|^{10/3} dx dt )^{3/10}`
//! * `g(R) = max(1, c_* (ln sqrt(ln(1/R)))^alpha)`

mod energy;
mod norms;
mod scan;

use serde::{Deserialize, Serialize};

use crate::geometry::GeometryError;

pub use energy::{energy_inequality_residual, energy_inequality_trace, EnergyBump, EnergySample};
pub use norms::{eval_f, eval_m, eval_sigma0, NormProbe};
pub use scan::{scan_condition, CriterionReport, ProbeRecord};

/// Largest admissible gauge exponent.
pub const ALPHA_MAX: f64 = 1.0 / 224.0;

/// Largest radius at which the gauge is defined.
pub const R_MAX: f64 = 2.0 / 3.0;

#[derive(Debug, thiserror::Error)]
pub enum CriterionError {
    #[error("gauge parameters: {0}")]
    Gauge(String),
    #[error("radius {0} outside (0, 2/3]")]
    Radius(f64),
    #[error("contract violation: {0}")]
    Contract(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct GaugeParams {
    pub c_star: f64,
    pub alpha: f64,
}

impl Default for GaugeParams {
    fn default() -> Self {
        Self { c_star: 1.0, alpha: ALPHA_MAX }
    }
}

impl GaugeParams {
    pub fn new(c_star: f64, alpha: f64) -> Result<Self, CriterionError> {
        let p = Self { c_star, alpha };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<(), CriterionError> {
        if !(self.c_star > 0.0) || !self.c_star.is_finite() {
            return Err(CriterionError::Gauge(format!("c_star must be positive, got {}", self.c_star)));
        }
        if !(self.alpha > 0.0 && self.alpha <= ALPHA_MAX) {
            return Err(CriterionError::Gauge(format!("alpha must satisfy 0 < alpha <= 1/224, got {}", self.alpha)));
        }
        Ok(())
    }
}

/// `ln sqrt(ln(1/R))`, the argument of the gauge power; `None` when the
/// inner logarithm is not positive.
pub fn gauge_log(r: f64) -> Option<f64> {
    let inner = (1.0 / r).ln();
    (inner > 0.0).then(|| 0.5 * inner.ln())
}

/// The gauge `g(R)`, clamped below by one.
pub fn eval_g(r: f64, params: &GaugeParams) -> Result<f64, CriterionError> {
    if !(r > 0.0 && r <= R_MAX) {
        return Err(CriterionError::Radius(r));
    }
    Ok(match gauge_log(r) {
        Some(l) if l > 0.0 => (params.c_star * l.powf(params.alpha)).max(1.0),
        _ => 1.0,
    })
}
