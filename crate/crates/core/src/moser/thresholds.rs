//! Radius thresholds below which the smallness conditions of the chain hold.
//!
//! Each condition is evaluated in `y = ln ln(1/R)`, which keeps radii far
//! below `f64::MIN_POSITIVE` reachable. A threshold is the smallest `y`
//! beyond which the condition holds on the whole scanned range
//! `[ln ln 6, Y_MAX]`; it is located by a uniform scan followed by bisection.

use std::fmt;

use serde::{Deserialize, Serialize};

use super::{AbsConstant, MoserError};
use crate::criterion::GaugeParams;

const Y_MAX: f64 = 700.0;
const SCAN: usize = 4096;
const BISECT: usize = 200;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "status", rename_all = "snake_case")]
pub enum Threshold {
    Value { r: f64, ln_ln_inv: f64 },
    /// The radius underflows `f64`; only `ln ln(1/R*)` is known.
    BelowRepresentable { ln_ln_inv: f64 },
    /// The condition fails at `ln ln(1/R) = Y_MAX`.
    Unattainable,
}

impl Threshold {
    pub fn ln_ln_inv(&self) -> Option<f64> {
        match *self {
            Threshold::Value { ln_ln_inv, .. } | Threshold::BelowRepresentable { ln_ln_inv } => Some(ln_ln_inv),
            Threshold::Unattainable => None,
        }
    }

    pub fn radius(&self) -> Option<f64> {
        match *self {
            Threshold::Value { r, .. } => Some(r),
            _ => None,
        }
    }

    /// Whether `r` lies at or below the threshold.
    pub fn admits(&self, r: f64) -> bool {
        match self.ln_ln_inv() {
            Some(y) => r > 0.0 && r < 1.0 && (1.0 / r).ln().ln() >= y,
            None => false,
        }
    }

    fn from_y(y: f64) -> Self {
        let r = (-y.exp()).exp();
        if r >= f64::MIN_POSITIVE {
            Threshold::Value { r, ln_ln_inv: y }
        } else {
            Threshold::BelowRepresentable { ln_ln_inv: y }
        }
    }

    fn smaller(a: Self, b: Self) -> Self {
        match (a.ln_ln_inv(), b.ln_ln_inv()) {
            (Some(x), Some(y)) => {
                if x >= y {
                    a
                } else {
                    b
                }
            }
            _ => Threshold::Unattainable,
        }
    }
}

impl fmt::Display for Threshold {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Threshold::Value { r, .. } => write!(f, "R* = {r:e}"),
            Threshold::BelowRepresentable { ln_ln_inv } => {
                write!(f, "threshold below representable scale, ln ln(1/R*) = {ln_ln_inv}")
            }
            Threshold::Unattainable => write!(f, "no radius with ln ln(1/R) <= {Y_MAX} satisfies the condition"),
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Thresholds {
    /// `(1 / (c g(2r)))^{4/3} <= theta` for all `r <= R*_1`.
    pub r1: Threshold,
    /// `min(R*_1, R*_3, R*_4)`.
    pub r2: Threshold,
    /// `ln sqrt(ln(1/(2R))) >= 1`.
    pub r3: Threshold,
    /// `c1(c_*) L^{239 alpha/3 - 1} <= 1` with `L = ln sqrt(ln 1/R)`, `c1(c_*) = c^42 c_*^{239/3}`.
    pub r4: Threshold,
    /// `2 c(M0, c_*) L^{224 alpha - 1} <= 1` and `c(M0, c_*) L^{224 alpha} >= alpha ln L`,
    /// with `c(M0, c_*) = c M0 c_*^{224}`.
    pub r5: Threshold,
}

fn gauge_from_ln_inv(ln_inv: f64, p: &GaugeParams) -> f64 {
    if ln_inv <= 1.0 {
        return 1.0;
    }
    let l = 0.5 * ln_inv.ln();
    (p.c_star * l.powf(p.alpha)).max(1.0)
}

fn locate(holds: impl Fn(f64) -> bool) -> Threshold {
    let y_min = 6f64.ln().ln();
    let ys: Vec<f64> = (0..=SCAN).map(|k| y_min + (Y_MAX - y_min) * k as f64 / SCAN as f64).collect();
    let last_fail = match ys.iter().rposition(|&y| !holds(y)) {
        None => return Threshold::Value { r: 1.0 / 6.0, ln_ln_inv: y_min },
        Some(k) if k == SCAN => return Threshold::Unattainable,
        Some(k) => k,
    };
    let (mut lo, mut hi) = (ys[last_fail], ys[last_fail + 1]);
    for _ in 0..BISECT {
        let mid = 0.5 * (lo + hi);
        if mid <= lo || mid >= hi {
            break;
        }
        if holds(mid) {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    Threshold::from_y(hi)
}

/// All five thresholds, each capped at `1/6`.
pub fn const_thresholds(gauge: &GaugeParams, theta: f64, m0: f64, c: AbsConstant) -> Result<Thresholds, MoserError> {
    gauge.validate()?;
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(MoserError::Domain(format!("theta must lie in (0, 1], got {theta}")));
    }
    if !(m0 >= 1.0 && m0.is_finite()) {
        return Err(MoserError::Domain(format!("M0 must be at least 1, got {m0}")));
    }
    let cv = c.get();
    let ln2 = std::f64::consts::LN_2;
    let a = gauge.alpha;

    let r1 = locate(|y| {
        let g = gauge_from_ln_inv(y.exp() - ln2, gauge);
        (1.0 / (cv * g)).powf(4.0 / 3.0) <= theta
    });
    let r3 = locate(|y| 0.5 * (y.exp() - ln2).ln() >= 1.0);
    let c4 = cv.powi(42) * gauge.c_star.powf(239.0 / 3.0);
    let r4 = locate(|y| c4 * (0.5 * y).powf(239.0 * a / 3.0 - 1.0) <= 1.0);
    let c5 = cv * m0 * gauge.c_star.powi(224);
    let r5 = locate(|y| {
        let l = 0.5 * y;
        2.0 * c5 * l.powf(224.0 * a - 1.0) <= 1.0 && c5 * l.powf(224.0 * a) >= a * l.ln()
    });
    let r2 = Threshold::smaller(Threshold::smaller(r1, r3), r4);
    Ok(Thresholds { r1, r2, r3, r4, r5 })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn clamped_gauge_gives_the_cap() {
        let t = const_thresholds(&GaugeParams::default(), 1.0, 1.0, AbsConstant::default()).unwrap();
        assert_eq!(t.r1.radius(), Some(1.0 / 6.0));
    }

    #[test]
    fn closed_form_thresholds() {
        let t = const_thresholds(&GaugeParams::default(), 1.0, 1.0, AbsConstant::default()).unwrap();
        // R*_3 = exp(-e^2)/2, R*_4 = exp(-e^2).
        assert_relative_eq!(t.r3.radius().unwrap(), 3.089_894_946_655_467_493e-4, max_relative = 1e-12);
        assert_relative_eq!(t.r4.radius().unwrap(), 6.179_789_893_310_934_986e-4, max_relative = 1e-12);
        assert_eq!(t.r2, t.r3);
        assert!(t.r2.admits(1e-4));
        assert!(!t.r2.admits(1e-3));
    }

    #[test]
    fn critical_alpha_needs_small_constant() {
        let g = GaugeParams::default();
        let t = const_thresholds(&g, 1.0, 1.0, AbsConstant::default()).unwrap();
        assert_eq!(t.r5, Threshold::Unattainable);
        let t = const_thresholds(&g, 1.0, 1.0, AbsConstant::new(0.25).unwrap()).unwrap();
        assert_eq!(t.r5.radius(), Some(1.0 / 6.0));
    }

    #[test]
    fn underflowing_threshold_and_reproducibility() {
        let g = GaugeParams::new(1.0, 1.0 / 448.0).unwrap();
        let c = AbsConstant::new(1.05).unwrap();
        let a = const_thresholds(&g, 1.0, 1.0, c).unwrap();
        let b = const_thresholds(&g, 1.0, 1.0, c).unwrap();
        assert_eq!(format!("{a:?}"), format!("{b:?}"));
        // c^42 L^{-0.82} <= 1 needs L >= 12, i.e. ln(1/R) near 3e10.
        assert!(matches!(a.r4, Threshold::BelowRepresentable { .. }));
        let y = a.r4.ln_ln_inv().unwrap();
        let expo = 239.0 / (3.0 * 448.0) - 1.0;
        assert_relative_eq!(1.05f64.powi(42) * (0.5 * y).powf(expo), 1.0, max_relative = 1e-9);
    }
}
