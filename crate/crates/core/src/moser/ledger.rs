use serde::{Deserialize, Serialize};

use super::constants::{
    const_beta0_log, const_beta2_log2, const_c1, const_c1_prime, const_hatbeta2_bound, const_kappa0_delta0,
    const_mu_star, const_s, const_theta0, Beta0Log, Beta2Log2, HatBeta2,
};
use super::thresholds::{const_thresholds, Thresholds};
use super::{AbsConstant, MoserError};
use crate::criterion::GaugeParams;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct MoserInputs {
    pub tau1: f64,
    pub tau: f64,
    pub gamma1: f64,
    pub gamma: f64,
    pub theta: f64,
    pub sigma_frac: f64,
    pub delta0: f64,
    pub delta1: f64,
    pub mu1: f64,
    pub m0: f64,
    pub k_r: f64,
    pub f2r: f64,
    pub m2r: f64,
    pub g2r: f64,
    pub r: f64,
    /// Defaults to `-R^2`.
    pub t_bar: Option<f64>,
    pub c: AbsConstant,
    pub gauge: GaugeParams,
}

impl Default for MoserInputs {
    fn default() -> Self {
        Self {
            tau1: 0.5,
            tau: 1.0,
            gamma1: 0.5,
            gamma: 1.0,
            theta: 1.0,
            sigma_frac: 0.5,
            delta0: 0.5,
            delta1: 1.0 / 3.0,
            mu1: 0.1,
            m0: 1.0,
            k_r: 1.0,
            f2r: 0.0,
            m2r: 0.0,
            g2r: 1.0,
            r: 1e-4,
            t_bar: None,
            c: AbsConstant::default(),
            gauge: GaugeParams::default(),
        }
    }
}

/// A value or the reason it could not be computed.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct Entry<T> {
    pub value: Option<T>,
    pub error: Option<String>,
}

impl<T> From<Result<T, MoserError>> for Entry<T> {
    fn from(r: Result<T, MoserError>) -> Self {
        match r {
            Ok(v) => Self { value: Some(v), error: None },
            Err(e) => Self { value: None, error: Some(e.to_string()) },
        }
    }
}

impl<T> Entry<T> {
    pub fn ok(&self) -> Option<&T> {
        self.value.as_ref()
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MoserConstants {
    pub inputs: MoserInputs,
    pub c1: Entry<f64>,
    pub c1_prime: Entry<f64>,
    pub mu_star: Entry<f64>,
    pub kappa0: Entry<f64>,
    pub delta0_out: Entry<f64>,
    pub theta0: Entry<f64>,
    pub s: Entry<u64>,
    /// `log2 beta_2`.
    pub beta2_log2: Entry<Beta2Log2>,
    /// Lower bounds for `ln beta_0`, with `N`.
    pub beta0_log: Entry<Beta0Log>,
    /// Lower bound for `hat beta_2` (not exponentiated; the bound is itself small).
    pub hatbeta2: Entry<HatBeta2>,
    pub thresholds: Entry<Thresholds>,
    /// Entries carried as logarithms.
    pub log_space: Vec<String>,
}

impl MoserConstants {
    pub fn compute(inputs: &MoserInputs) -> Self {
        let p = inputs;
        let c1 = const_c1(p.tau1, p.tau, p.gamma1, p.gamma, p.m2r, p.c);
        let mu_star = c1.as_ref().map_err(|e| MoserError::Domain(e.to_string())).and_then(|&v| const_mu_star(v));
        let kd = const_kappa0_delta0(p.f2r, p.m0, p.c);
        let t_bar = p.t_bar.unwrap_or(-p.r * p.r);
        Self {
            inputs: p.clone(),
            c1: c1.into(),
            c1_prime: const_c1_prime(p.sigma_frac, p.theta, p.m2r, p.c).into(),
            mu_star: mu_star.into(),
            kappa0: kd.as_ref().map(|v| v.0).map_err(|e| MoserError::Domain(e.to_string())).into(),
            delta0_out: kd.map(|v| v.1).into(),
            theta0: const_theta0(p.delta0, p.f2r, p.c).into(),
            s: const_s(p.delta1, p.mu1, p.theta, p.f2r, p.c).into(),
            beta2_log2: const_beta2_log2(p.sigma_frac, p.g2r, p.c).into(),
            beta0_log: const_beta0_log(p.r, t_bar, p.theta, &p.gauge, p.c).into(),
            hatbeta2: const_hatbeta2_bound(p.r, p.gauge.alpha).into(),
            thresholds: const_thresholds(&p.gauge, p.theta, p.m0, p.c).into(),
            log_space: vec!["beta2_log2".into(), "beta0_log".into()],
        }
    }

    /// Flat `(column, value)` pairs; empty strings for missing values.
    pub fn columns(&self) -> Vec<(&'static str, String)> {
        fn num<T: ToString>(e: &Entry<T>) -> String {
            e.value.as_ref().map(|v| v.to_string()).unwrap_or_default()
        }
        fn th(t: Option<&Thresholds>, f: impl Fn(&Thresholds) -> super::Threshold) -> String {
            t.map(|t| match f(t).ln_ln_inv() {
                Some(y) => y.to_string(),
                None => "inf".into(),
            })
            .unwrap_or_default()
        }
        let p = &self.inputs;
        let b0 = self.beta0_log.ok();
        let t = self.thresholds.ok();
        let errors: Vec<String> = [
            ("c1", &self.c1.error),
            ("c1_prime", &self.c1_prime.error),
            ("mu_star", &self.mu_star.error),
            ("delta0_out", &self.delta0_out.error),
            ("theta0", &self.theta0.error),
            ("s", &self.s.error),
            ("beta2_log2", &self.beta2_log2.error),
            ("beta0_log", &self.beta0_log.error),
            ("hatbeta2", &self.hatbeta2.error),
            ("thresholds", &self.thresholds.error),
        ]
        .into_iter()
        .filter_map(|(k, e)| e.as_ref().map(|e| format!("{k}: {e}")))
        .collect();
        vec![
            ("tau1", p.tau1.to_string()),
            ("tau", p.tau.to_string()),
            ("gamma1", p.gamma1.to_string()),
            ("gamma", p.gamma.to_string()),
            ("theta", p.theta.to_string()),
            ("sigma_frac", p.sigma_frac.to_string()),
            ("delta0", p.delta0.to_string()),
            ("delta1", p.delta1.to_string()),
            ("mu1", p.mu1.to_string()),
            ("m0", p.m0.to_string()),
            ("k_r", p.k_r.to_string()),
            ("f2r", p.f2r.to_string()),
            ("m2r", p.m2r.to_string()),
            ("g2r", p.g2r.to_string()),
            ("r", p.r.to_string()),
            ("c", p.c.get().to_string()),
            ("c_star", p.gauge.c_star.to_string()),
            ("alpha", p.gauge.alpha.to_string()),
            ("c1", num(&self.c1)),
            ("c1_prime", num(&self.c1_prime)),
            ("mu_star", num(&self.mu_star)),
            ("kappa0", num(&self.kappa0)),
            ("delta0_out", num(&self.delta0_out)),
            ("theta0", num(&self.theta0)),
            ("s", num(&self.s)),
            ("beta2_log2", self.beta2_log2.ok().map(|b| b.value().to_string()).unwrap_or_default()),
            ("n", b0.map(|b| b.n.to_string()).unwrap_or_default()),
            ("beta0_log_chain", b0.map(|b| b.chain.to_string()).unwrap_or_default()),
            ("beta0_log_collapsed", b0.map(|b| b.collapsed.to_string()).unwrap_or_default()),
            ("beta0_log_target", b0.map(|b| b.target.to_string()).unwrap_or_default()),
            ("hatbeta2", self.hatbeta2.ok().map(|b| b.value.to_string()).unwrap_or_default()),
            ("lnln_r1", th(t, |t| t.r1)),
            ("lnln_r2", th(t, |t| t.r2)),
            ("lnln_r3", th(t, |t| t.r3)),
            ("lnln_r4", th(t, |t| t.r4)),
            ("lnln_r5", th(t, |t| t.r5)),
            ("error", errors.join("; ")),
        ]
    }
}
