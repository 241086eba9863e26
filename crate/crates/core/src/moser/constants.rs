//! Closed-form constants. All are pure functions of their arguments.

use serde::{Deserialize, Serialize};

use super::thresholds::{const_thresholds, Threshold};
use super::{entier_plus_one, AbsConstant, MoserError};
use crate::criterion::{eval_g, GaugeParams};

fn domain(msg: String) -> MoserError {
    MoserError::Domain(msg)
}

fn positive(name: &str, x: f64) -> Result<(), MoserError> {
    if x > 0.0 && x.is_finite() {
        Ok(())
    } else {
        Err(domain(format!("{name} must be positive, got {x}")))
    }
}

/// Sup-bound constant of the Moser iteration:
/// `c / (tau - tau1)^{16/3} (1 + (tau - tau1)/sqrt(gamma - gamma1) + (gamma1 tau1^3)^{-1/10} M)^3`.
pub fn const_c1(tau1: f64, tau: f64, gamma1: f64, gamma: f64, m2r: f64, c: AbsConstant) -> Result<f64, MoserError> {
    if !(0.0 < tau1 && tau1 < tau && tau < 2.0) {
        return Err(domain(format!("need 0 < tau1 < tau < 2, got tau1={tau1}, tau={tau}")));
    }
    if !(0.0 < gamma1 && gamma1 < gamma && gamma < 4.0) {
        return Err(domain(format!("need 0 < gamma1 < gamma < 4, got gamma1={gamma1}, gamma={gamma}")));
    }
    if !(m2r >= 0.0 && m2r.is_finite()) {
        return Err(domain(format!("M(2R) must be nonnegative, got {m2r}")));
    }
    let gap = tau - tau1;
    let inner = 1.0 + gap / (gamma - gamma1).sqrt() + (1.0 / (gamma1 * tau1.powi(3))).powf(0.1) * m2r;
    Ok(c.get() / gap.powf(16.0 / 3.0) * inner.powi(3))
}

/// The same bound on `Q^{1-s, theta/2}` inside `Q^{1, theta}`:
/// `c / (1 - s)^{16/3} (1 + (theta s^3)^{-1/10} M)^3`.
pub fn const_c1_prime(shrink: f64, theta: f64, m2r: f64, c: AbsConstant) -> Result<f64, MoserError> {
    if !(shrink > 0.0 && shrink < 1.0) {
        return Err(domain(format!("shrink factor must lie in (0, 1), got {shrink}")));
    }
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(domain(format!("theta must lie in (0, 1], got {theta}")));
    }
    if !(m2r >= 0.0 && m2r.is_finite()) {
        return Err(domain(format!("M(2R) must be nonnegative, got {m2r}")));
    }
    let inner = 1.0 + (1.0 / (theta * shrink.powi(3))).powf(0.1) * m2r;
    Ok(c.get() / (1.0 - shrink).powf(16.0 / 3.0) * inner.powi(3))
}

/// Largest admissible small-measure fraction, `(2 c1)^{-10/3}`.
pub fn const_mu_star(c1: f64) -> Result<f64, MoserError> {
    positive("c1", c1)?;
    Ok((2.0 * c1).powf(-10.0 / 3.0))
}

/// Persistence time `min(1, (c delta^6 / (1 + delta^2 f))^{4/3})`.
pub fn const_theta0(delta0: f64, f2r: f64, c: AbsConstant) -> Result<f64, MoserError> {
    if !(delta0 > 0.0 && delta0 <= 1.0) {
        return Err(domain(format!("delta0 must lie in (0, 1], got {delta0}")));
    }
    if !(f2r >= 0.0 && f2r.is_finite()) {
        return Err(domain(format!("f(2R) must be nonnegative, got {f2r}")));
    }
    let x = c.get() * delta0.powi(6) / (1.0 + delta0 * delta0 * f2r);
    Ok(x.powf(4.0 / 3.0).min(1.0))
}

/// Number of halvings `entier(c (1 + f) / (delta1^2 mu1^2 theta1)) + 1`.
pub fn const_s(delta1: f64, mu1: f64, theta1: f64, f2r: f64, c: AbsConstant) -> Result<u64, MoserError> {
    positive("delta1", delta1)?;
    positive("mu1", mu1)?;
    positive("theta1", theta1)?;
    if !(f2r >= 0.0 && f2r.is_finite()) {
        return Err(domain(format!("f(2R) must be nonnegative, got {f2r}")));
    }
    let x = c.get() * (1.0 + f2r) / (delta1 * delta1 * mu1 * mu1 * theta1);
    entier_plus_one(x, "s")
}

/// `log2 beta_2 = -magnitude - log2 6`, kept as its two parts.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Beta2Log2 {
    /// `c (1 - sigma)^{-40} sigma^{-6} g^{25}`.
    pub magnitude: f64,
    /// `log2 6`.
    pub offset: f64,
}

impl Beta2Log2 {
    pub fn value(&self) -> f64 {
        -self.magnitude - self.offset
    }

    pub fn ln(&self) -> f64 {
        self.value() * std::f64::consts::LN_2
    }
}

/// Pointwise lower-bound factor `beta_2 = 2^{-c (1-sigma)^{-40} sigma^{-6} g^{25}} / 6`.
pub fn const_beta2_log2(sigma: f64, g2r: f64, c: AbsConstant) -> Result<Beta2Log2, MoserError> {
    if !(sigma > 0.0 && sigma < 1.0) {
        return Err(domain(format!("sigma must lie in (0, 1), got {sigma}")));
    }
    if !(g2r >= 1.0 && g2r.is_finite()) {
        return Err(domain(format!("g(2R) must be at least 1, got {g2r}")));
    }
    let magnitude = c.get() * (1.0 - sigma).powi(-40) * sigma.powi(-6) * g2r.powi(25);
    Ok(Beta2Log2 { magnitude, offset: 6f64.log2() })
}

/// `kappa_0 = c / (1 + f)` and `delta_0 = (c / (M0 (1 + f)))^{9/4}`.
pub fn const_kappa0_delta0(f2r: f64, m0: f64, c: AbsConstant) -> Result<(f64, f64), MoserError> {
    if !(f2r >= 0.0 && f2r.is_finite()) {
        return Err(domain(format!("f(2R) must be nonnegative, got {f2r}")));
    }
    if !(m0 >= 1.0 && m0.is_finite()) {
        return Err(domain(format!("M0 must be at least 1, got {m0}")));
    }
    let kappa0 = c.get() / (1.0 + f2r);
    let delta0 = (c.get() / (m0 * (1.0 + f2r))).powf(9.0 / 4.0);
    Ok((kappa0, delta0))
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct HatBeta2 {
    /// `(ln 1/R)^{-1/2} alpha ln ln sqrt(ln 1/R)`.
    pub value: f64,
    /// Set when `ln sqrt(ln 1/R) = 1` to within `1e-12`, where the bound is 0.
    pub degenerate: bool,
}

/// Lower bound `(ln 1/R)^{-1/2} ln (ln sqrt(ln 1/R))^alpha` for the
/// contraction factor of the oscillation step.
pub fn const_hatbeta2_bound(r: f64, alpha: f64) -> Result<HatBeta2, MoserError> {
    if !(r > 0.0 && r < 1.0) {
        return Err(domain(format!("R must lie in (0, 1), got {r}")));
    }
    if !(alpha >= 0.0 && alpha.is_finite()) {
        return Err(domain(format!("alpha must be nonnegative, got {alpha}")));
    }
    let lr = (1.0 / r).ln();
    let l = 0.5 * lr.ln();
    if !(l > 0.0) {
        return Err(domain(format!("ln sqrt(ln 1/R) = {l} is not positive at R = {r}")));
    }
    let degenerate = (l - 1.0).abs() <= 1e-12;
    let value = if degenerate { 0.0 } else { alpha * l.ln() / lr.sqrt() };
    Ok(HatBeta2 { value, degenerate })
}

/// Lower bounds for `ln beta_0` over a long time interval.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Beta0Log {
    /// Number of short steps `entier((9/8) |t| / (theta~ R^2)) + 1`.
    pub n: u64,
    /// `theta~ = (c / g(4R/3))^{4/3}`.
    pub theta_tilde: f64,
    /// `sum_{i<N} (-ln 6 - c N^40 g^25(2 (1 - i/(3N)) R))`.
    pub chain: f64,
    /// `-c1(c_*) (ln sqrt(ln 1/R))^{239 alpha / 3}` with `c1(c_*) = c^42 c_*^{239/3}`.
    pub collapsed: f64,
    /// `-(1/2) ln ln(1/R)`.
    pub target: f64,
    pub chain_meets_target: bool,
    pub collapsed_meets_target: bool,
}

/// `N` and the two lower bounds for `ln beta_0`, compared against
/// `-(1/2) ln ln(1/R)`. Requires `R` at or below the combined threshold
/// `R*_2` and `-R^2 <= t_bar <= -theta R^2`.
pub fn const_beta0_log(r: f64, t_bar: f64, theta: f64, gauge: &GaugeParams, c: AbsConstant) -> Result<Beta0Log, MoserError> {
    gauge.validate()?;
    if !(theta > 0.0 && theta <= 1.0) {
        return Err(domain(format!("theta must lie in (0, 1], got {theta}")));
    }
    if !(r > 0.0 && r <= 1.0 / 6.0) {
        return Err(domain(format!("R must lie in (0, 1/6], got {r}")));
    }
    let r2 = r * r;
    let tol = 1e-12 * r2;
    if !(t_bar >= -r2 - tol && t_bar <= -theta * r2 + tol) {
        return Err(domain(format!("t_bar = {t_bar} outside [-R^2, -theta R^2] = [{}, {}]", -r2, -theta * r2)));
    }
    let th = const_thresholds(gauge, theta, 1.0, c)?;
    let y = (1.0 / r).ln().ln();
    match th.r2 {
        Threshold::Unattainable => {
            return Err(MoserError::Precondition { threshold: "R*_2", r, detail: "no admissible radius".into() })
        }
        t if y < t.ln_ln_inv().unwrap_or(f64::INFINITY) => {
            return Err(MoserError::Precondition { threshold: "R*_2", r, detail: format!("{t}") })
        }
        _ => {}
    }

    let cv = c.get();
    let theta_tilde = (cv / eval_g(4.0 * r / 3.0, gauge)?).powf(4.0 / 3.0);
    let n = entier_plus_one(1.125 * t_bar.abs() / (theta_tilde * r2), "N")?;
    let nf = n as f64;
    let ln6 = 6f64.ln();
    let mut chain = 0.0;
    for i in 0..n {
        let ri = 2.0 * (1.0 - i as f64 / (3.0 * nf)) * r;
        chain += -ln6 - cv * nf.powi(40) * eval_g(ri, gauge)?.powi(25);
    }
    let l = 0.5 * y;
    let c1 = cv.powi(42) * gauge.c_star.powf(239.0 / 3.0);
    let collapsed = -c1 * l.powf(239.0 * gauge.alpha / 3.0);
    let target = -l;
    Ok(Beta0Log {
        n,
        theta_tilde,
        chain,
        collapsed,
        target,
        chain_meets_target: chain >= target,
        collapsed_meets_target: collapsed >= target,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    fn one() -> AbsConstant {
        AbsConstant::default()
    }

    #[test]
    fn c1_example_and_linearity() {
        let v = const_c1(0.5, 1.0, 0.5, 1.0, 0.0, one()).unwrap();
        assert_relative_eq!(v, 200.574_340_423_307_855_312_282, max_relative = 1e-12);
        let two = const_c1(0.5, 1.0, 0.5, 1.0, 0.0, AbsConstant::new(2.0).unwrap()).unwrap();
        assert_relative_eq!(two, 2.0 * v, max_relative = 1e-15);
        assert!(const_c1(1.0, 0.5, 0.5, 1.0, 0.0, one()).is_err());
        assert!(const_c1(0.5, 1.0, 0.5, 4.0, 0.0, one()).is_err());
    }

    #[test]
    fn c1_prime_example() {
        let v = const_c1_prime(0.5, 1.0, 1.0, one()).unwrap();
        assert_relative_eq!(v, 447.792_024_685_625_400_018_425, max_relative = 1e-12);
    }

    #[test]
    fn small_examples() {
        assert_eq!(const_mu_star(0.5).unwrap(), 1.0);
        assert_relative_eq!(const_mu_star(1.0).unwrap(), 0.099_212_565_748_012_467_171_98, max_relative = 1e-12);
        assert_eq!(const_theta0(1.0, 0.0, one()).unwrap(), 1.0);
        assert_relative_eq!(const_theta0(0.5, 1.0, one()).unwrap(), 0.002_900_993_021_007_986_807_756, max_relative = 1e-12);
        assert_eq!(const_s(1.0, 1.0, 1.0, 0.0, one()).unwrap(), 2);
        assert_eq!(const_s(1.0 / 3.0, 0.1, 0.5, 1.0, one()).unwrap(), 3601);
        assert_eq!(const_kappa0_delta0(0.0, 1.0, one()).unwrap(), (1.0, 1.0));
        let (k, d) = const_kappa0_delta0(1.0, 2.0, one()).unwrap();
        assert_eq!(k, 0.5);
        assert_relative_eq!(d, 0.044_194_173_824_159_220_275_05, max_relative = 1e-12);
    }

    #[test]
    fn beta2_exponent_arithmetic() {
        let b = const_beta2_log2(0.5, 1.0, one()).unwrap();
        assert_eq!(b.magnitude, 2f64.powi(46));
        assert_eq!(b.offset, 6f64.log2());
        let tiny = const_beta2_log2(0.5, 1.0, AbsConstant::new(1e-300).unwrap()).unwrap();
        assert_relative_eq!(tiny.value(), -(6f64.log2()), max_relative = 1e-12);
        assert!(const_beta2_log2(0.5, 1.5, one()).unwrap().value() < b.value());
    }

    #[test]
    fn hatbeta2_boundary_and_sign() {
        let r = (-std::f64::consts::E.powi(2)).exp();
        let b = const_hatbeta2_bound(r, 1.0 / 224.0).unwrap();
        assert!(b.degenerate);
        assert_eq!(b.value, 0.0);
        assert!(const_hatbeta2_bound(1e-10, 1.0 / 224.0).unwrap().value > 0.0);
        assert_eq!(const_hatbeta2_bound(1e-10, 0.0).unwrap().value, 0.0);
        assert!(const_hatbeta2_bound(0.5, 1.0 / 224.0).is_err());
    }

    #[test]
    fn beta0_example() {
        let g = GaugeParams::default();
        let r = 1e-4;
        let b = const_beta0_log(r, -r * r, 1.0, &g, one()).unwrap();
        assert_eq!(b.n, 2);
        assert_relative_eq!(b.theta_tilde, 0.999_463_762_217_268_455_767_7, max_relative = 1e-12);
        assert_relative_eq!(b.chain, -2_217_149_738_820.080_400_364_568_8, max_relative = 1e-12);
        assert_relative_eq!(b.collapsed, -1.037_867_874_922_877_032_169_55, max_relative = 1e-12);
        assert_relative_eq!(b.target, -1.110_163_403_183_923_209_318_84, max_relative = 1e-12);
        assert!(b.collapsed_meets_target);
        assert!(!b.chain_meets_target);
        let err = const_beta0_log(0.01, -1e-4, 1.0, &g, one()).unwrap_err();
        assert!(matches!(err, MoserError::Precondition { threshold: "R*_2", .. }));
    }
}
