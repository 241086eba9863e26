//! Numerical check of the growth lemmas on a nonnegative field `pi` sampled
//! on `Q(2R)` with top `center`.
//!
//! Each row evaluates a hypothesis and a conclusion. Hypotheses are tested
//! as stated; conclusions get one boundary-cell layer of slack on measures
//! and a relative `1e-9` slack on pointwise bounds. A row fails only when
//! its hypothesis holds and its conclusion does not.

use std::collections::BTreeMap;

use ndarray::Array2;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::constants::{const_beta2_log2, const_c1, const_kappa0_delta0, const_mu_star, const_s, const_theta0};
use super::level_sets::level_sets;
use super::thresholds::const_thresholds;
use super::{AbsConstant, MoserError, MoserInputs};
use crate::criterion::{eval_g, GaugeParams, NormProbe};
use crate::geometry::{
    integrate_lp, spatial_weights, time_weights, times_in, AxisPoint, CylGrid, FieldKind, ParabolicCylinder,
    Snapshot, SnapshotSeries, SpatialCylinder,
};
use crate::oscillation::measure_osc;

const POINT_TOL: f64 = 1e-9;
const MAX_TRACE: usize = 12;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct GrowthInputs {
    /// Top centre of `Q(2R)`.
    pub center: AxisPoint,
    pub r: f64,
    pub kind: FieldKind,
    /// Defaults to the minimum of `pi` on the axis inside `Q(2R)`.
    pub k_r: Option<f64>,
    /// Constant parameters; `r`, `k_r`, `f2r`, `m2r` and `g2r` are replaced
    /// by the probe values.
    pub params: MoserInputs,
    /// Number of terms of the iteration trace, at most 12.
    pub trace: usize,
}

impl GrowthInputs {
    pub fn new(center: AxisPoint, r: f64) -> Self {
        Self {
            center,
            r,
            kind: FieldKind::Scalar,
            k_r: None,
            params: MoserInputs { m0: 2.0, ..MoserInputs::default() },
            trace: 0,
        }
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum LemmaStatus {
    Pass,
    Fail,
    /// Hypothesis does not hold.
    Vacuous,
    Skipped,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaRow {
    pub lemma: String,
    pub status: LemmaStatus,
    pub hypothesis_holds: Option<bool>,
    pub conclusion_holds: Option<bool>,
    pub margins: BTreeMap<String, f64>,
    pub reason: Option<String>,
}

impl LemmaRow {
    fn evaluated(lemma: &str, hyp: bool, concl: bool, margins: &[(&str, f64)]) -> Self {
        let status = match (hyp, concl) {
            (false, _) => LemmaStatus::Vacuous,
            (true, true) => LemmaStatus::Pass,
            (true, false) => LemmaStatus::Fail,
        };
        Self {
            lemma: lemma.into(),
            status,
            hypothesis_holds: Some(hyp),
            conclusion_holds: Some(concl),
            margins: margins.iter().map(|&(k, v)| (k.to_string(), v)).collect(),
            reason: None,
        }
    }

    pub fn skipped(lemma: &str, reason: impl Into<String>) -> Self {
        Self {
            lemma: lemma.into(),
            status: LemmaStatus::Skipped,
            hypothesis_holds: None,
            conclusion_holds: None,
            margins: BTreeMap::new(),
            reason: Some(reason.into()),
        }
    }

    pub fn failed(&self) -> bool {
        self.status == LemmaStatus::Fail
    }
}

pub const LEMMAS: [&str; 7] = [
    "sup_bound",
    "small_measure_pointwise",
    "measure_persistence",
    "measure_shrinking",
    "pointwise_propagation",
    "long_time_propagation",
    "level_set_time",
];

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct VerifyReport {
    pub center: AxisPoint,
    pub r: f64,
    pub k_r: f64,
    pub f2r: f64,
    pub m2r: f64,
    pub g2r: f64,
    pub axis_bound_holds: bool,
    pub rows: Vec<LemmaRow>,
    pub failures: usize,
    pub g_trace: Option<Vec<f64>>,
}

struct Probe<'a> {
    grid: &'a CylGrid,
    times: Vec<f64>,
    pi: Vec<&'a Array2<f64>>,
    top: AxisPoint,
    r: f64,
    k: f64,
    h: f64,
}

impl Probe<'_> {
    fn ball(&self, radius: f64) -> SpatialCylinder {
        SpatialCylinder::centered(self.top.x3, radius)
    }

    /// One layer of cells around `C(radius)`.
    fn slack(&self, radius: f64) -> f64 {
        self.ball(radius).volume() * 3.0 * self.h / radius
    }

    /// Minimum over the closed `C(radius) x [t_lo, t_hi]` nodes.
    fn min_over(&self, radius: f64, t_lo: f64, t_hi: f64) -> Option<f64> {
        let g = self.grid;
        let tol_r = 1e-9 * g.h_rho;
        let tol_z = 1e-9 * g.h_z;
        let mut m = f64::INFINITY;
        for k in times_in(&self.times, t_lo, t_hi) {
            let a = self.pi[k];
            for i in (0..=g.n_rho).take_while(|&i| g.rho(i) <= radius + tol_r) {
                for j in 0..=g.n_z {
                    if (g.z(j) - self.top.x3).abs() <= radius + tol_z {
                        m = m.min(a[[i, j]]);
                    }
                }
            }
        }
        m.is_finite().then_some(m)
    }

    fn axis_min(&self, radius: f64, t_lo: f64, t_hi: f64) -> Option<f64> {
        let g = self.grid;
        let tol_z = 1e-9 * g.h_z;
        let mut m = f64::INFINITY;
        for k in times_in(&self.times, t_lo, t_hi) {
            for j in 0..=g.n_z {
                if (g.z(j) - self.top.x3).abs() <= radius + tol_z {
                    m = m.min(self.pi[k][[0, j]]);
                }
            }
        }
        m.is_finite().then_some(m)
    }

    fn max_over(&self, radius: f64, t_lo: f64, t_hi: f64) -> f64 {
        let g = self.grid;
        let tol_r = 1e-9 * g.h_rho;
        let tol_z = 1e-9 * g.h_z;
        let mut m = f64::NEG_INFINITY;
        for k in times_in(&self.times, t_lo, t_hi) {
            for i in (0..=g.n_rho).take_while(|&i| g.rho(i) <= radius + tol_r) {
                for j in 0..=g.n_z {
                    if (g.z(j) - self.top.x3).abs() <= radius + tol_z {
                        m = m.max(self.pi[k][[i, j]]);
                    }
                }
            }
        }
        m
    }

    /// `|{x in C(radius) : pred(pi(x, t_k))}|`.
    fn measure_at(&self, k: usize, radius: f64, pred: impl Fn(f64) -> bool) -> Result<f64, MoserError> {
        Ok(spatial_weights(self.grid, &self.ball(radius))?.measure_where(self.pi[k], pred))
    }

    /// Space-time measure over `C(radius) x [t_lo, t_hi]`.
    fn measure_between(&self, radius: f64, t_lo: f64, t_hi: f64, pred: impl Fn(f64) -> bool) -> Result<f64, MoserError> {
        let sw = spatial_weights(self.grid, &self.ball(radius))?;
        Ok(time_weights(&self.times, t_lo, t_hi)?
            .into_iter()
            .map(|(k, w)| w * sw.measure_where(self.pi[k], &pred))
            .sum())
    }

    fn nearest(&self, t: f64) -> usize {
        (0..self.times.len())
            .min_by(|&a, &b| (self.times[a] - t).abs().total_cmp(&(self.times[b] - t).abs()))
            .unwrap_or(0)
    }
}

fn ln_or_neg_inf(x: f64) -> f64 {
    if x > 0.0 {
        x.ln()
    } else {
        f64::NEG_INFINITY
    }
}

type Check = Box<dyn Fn(&Probe) -> Result<LemmaRow, MoserError> + Send + Sync>;

fn checks(p: &MoserInputs, c: AbsConstant, gauge: GaugeParams) -> Vec<(&'static str, Check)> {
    let p = p.clone();
    let (p1, p2, p3, p4, p5, p6, p7) = (p.clone(), p.clone(), p.clone(), p.clone(), p.clone(), p.clone(), p);
    vec![
        (
            LEMMAS[0],
            Box::new(move |q: &Probe| {
                let (r, t0) = (q.r, q.top.t);
                let c1 = const_c1(p1.tau1, p1.tau, p1.gamma1, p1.gamma, p1.m2r, c)?;
                let min = q.min_over(p1.tau1 * r, t0 - p1.gamma1 * r * r, t0).unwrap_or(q.k);
                let sup = (q.k - min).max(0.0);
                let trunc: Vec<Array2<f64>> = q.pi.iter().map(|a| a.mapv(|v| (q.k - v).max(0.0))).collect();
                let outer = ParabolicCylinder::new(q.top, r, p1.tau, p1.gamma)?;
                let norm = integrate_lp(q.grid, &q.times, &trunc, &outer.spatial(), outer.t_start(), t0, 10.0 / 3.0, 10.0 / 3.0)?;
                let mean = norm / outer.measure().powf(0.3);
                let bound = c1 * mean;
                let ok = sup <= bound + POINT_TOL * q.k;
                Ok(LemmaRow::evaluated(LEMMAS[0], true, ok, &[("sup", sup), ("bound", bound), ("c1", c1)]))
            }) as Check,
        ),
        (
            LEMMAS[1],
            Box::new(move |q: &Probe| {
                let (r, t0) = (q.r, q.top.t);
                let (l1, l, th) = (p2.tau1, p2.tau, p2.theta);
                let mu = const_mu_star(const_c1(l1, l, 0.5 * th, th, p2.m2r, c)?)?;
                let outer = ParabolicCylinder::new(q.top, r, l, th)?;
                let low = q.measure_between(l * r, outer.t_start(), t0, |v| v < q.k)?;
                let hyp = low < mu * outer.measure();
                let min = q.min_over(l1 * r, t0 - 0.5 * th * r * r, t0).unwrap_or(f64::INFINITY);
                let ok = min >= 0.5 * q.k * (1.0 - POINT_TOL);
                Ok(LemmaRow::evaluated(
                    LEMMAS[1],
                    hyp,
                    ok,
                    &[("low_fraction", low / outer.measure()), ("mu_star", mu), ("min", min), ("half_k", 0.5 * q.k)],
                ))
            }),
        ),
        (
            LEMMAS[2],
            Box::new(move |q: &Probe| {
                let (r, t0) = (q.r, q.top.t);
                let d0 = p3.delta0;
                let th0 = const_theta0(d0, p3.f2r, c)?;
                let start = q.nearest(t0 - th0 * r * r);
                let ball = q.ball(r).volume();
                let initial = q.measure_at(start, r, |v| v >= q.k)?;
                let hyp = initial > d0 * ball;
                let mut worst = f64::INFINITY;
                for k in times_in(&q.times, q.times[start], t0) {
                    worst = worst.min(q.measure_at(k, r, |v| v >= d0 * q.k / 3.0)?);
                }
                let ok = worst > d0 / 3.0 * ball - q.slack(r);
                Ok(LemmaRow::evaluated(
                    LEMMAS[2],
                    hyp,
                    ok,
                    &[("theta0", th0), ("initial_fraction", initial / ball), ("worst_fraction", worst / ball)],
                ))
            }),
        ),
        (
            LEMMAS[3],
            Box::new(move |q: &Probe| {
                let (r, t0) = (q.r, q.top.t);
                let (d1, m1, th1) = (p4.delta1, p4.mu1, p4.theta);
                let s = const_s(d1, m1, th1, p4.f2r, c)?;
                let ball = q.ball(r).volume();
                let mut hyp = true;
                let mut least = f64::INFINITY;
                for k in times_in(&q.times, t0 - th1 * r * r, t0) {
                    let m = q.measure_at(k, r, |v| v >= q.k)?;
                    least = least.min(m);
                    hyp &= m >= d1 * ball;
                }
                let level = (-(s as f64)).exp2() * q.k;
                let cyl = ParabolicCylinder::new(q.top, r, 1.0, th1)?;
                let low = q.measure_between(r, cyl.t_start(), t0, |v| v < level)?;
                let ok = low <= m1 * cyl.measure() + q.slack(r) * cyl.duration();
                Ok(LemmaRow::evaluated(
                    LEMMAS[3],
                    hyp,
                    ok,
                    &[("s", s as f64), ("least_fraction", least / ball), ("low_fraction", low / cyl.measure())],
                ))
            }),
        ),
        (
            LEMMAS[4],
            Box::new(move |q: &Probe| {
                let (r, t0) = (q.r, q.top.t);
                let th0 = (c.get() / eval_g(2.0 * r, &gauge)?).powf(4.0 / 3.0).min(1.0);
                let kb = q.nearest(t0 - r * r);
                let tb = q.times[kb];
                let k2 = q.min_over(r, tb, tb).unwrap_or(0.0);
                let b2 = const_beta2_log2(p5.sigma_frac, p5.g2r, c)?;
                let hyp = k2 > 0.0;
                let min = q.min_over(p5.sigma_frac * r, tb, (tb + th0 * r * r).min(t0)).unwrap_or(f64::INFINITY);
                let lhs = ln_or_neg_inf(min);
                let rhs = b2.ln() + ln_or_neg_inf(k2);
                let ok = lhs >= rhs;
                Ok(LemmaRow::evaluated(LEMMAS[4], hyp, ok, &[("ln_min", lhs), ("ln_bound", rhs), ("log2_beta2", b2.value())]))
            }),
        ),
        (
            LEMMAS[5],
            Box::new(move |q: &Probe| {
                let (r, t0) = (q.r, q.top.t);
                let th = const_thresholds(&gauge, p6.theta, p6.m0, c)?;
                let kb = q.nearest(t0 - r * r);
                let tb = q.times[kb];
                let rel = (tb - t0) / (r * r);
                let k = q.min_over(r, tb, tb).unwrap_or(0.0);
                let hyp = th.r2.admits(r) && k > 0.0 && rel >= -1.0 - 1e-9 && rel <= -p6.theta + 1e-9;
                let min = q.min_over(2.0 * r / 3.0, tb, t0).unwrap_or(f64::INFINITY);
                let lnln = if r < 1.0 { (1.0 / r).ln().ln() } else { f64::NAN };
                let lhs = ln_or_neg_inf(min);
                let rhs = ln_or_neg_inf(k) - 0.5 * lnln;
                let ok = lhs >= rhs - POINT_TOL;
                Ok(LemmaRow::evaluated(
                    LEMMAS[5],
                    hyp,
                    ok,
                    &[("ln_min", lhs), ("ln_bound", rhs), ("lnln_threshold", th.r2.ln_ln_inv().unwrap_or(f64::INFINITY))],
                ))
            }),
        ),
        (
            LEMMAS[6],
            Box::new(move |q: &Probe| {
                let r = q.r;
                let (kappa0, delta0) = const_kappa0_delta0(p7.f2r, p7.m0, c)?;
                let top = q.max_over(2.0 * r, q.top.t - 4.0 * r * r, q.top.t);
                let hyp = top <= p7.m0 * q.k * (1.0 + POINT_TOL);
                let rep = q.level_sets(kappa0)?;
                let ok = rep.measure_at_t_bar >= delta0 * rep.ball - q.slack(r);
                Ok(LemmaRow::evaluated(
                    LEMMAS[6],
                    hyp,
                    ok && rep.mean_value_holds(),
                    &[
                        ("kappa0", kappa0),
                        ("delta0", delta0),
                        ("fraction_at_t_bar", rep.measure_at_t_bar / rep.ball),
                        ("t_bar", rep.t_bar),
                    ],
                ))
            }),
        ),
    ]
}

impl Probe<'_> {
    fn level_sets(&self, kappa: f64) -> Result<super::LevelSetReport, MoserError> {
        let snaps: Vec<Snapshot> = self
            .times
            .iter()
            .zip(&self.pi)
            .map(|(&t, a)| Snapshot::new(t).with(FieldKind::Scalar, (*a).clone()))
            .collect();
        let series = SnapshotSeries::new(std::sync::Arc::new(self.grid.clone()), snaps)?;
        level_sets(&series, FieldKind::Scalar, self.top, self.r, kappa, self.k)
    }
}

/// Runs every lemma check on the `inputs.kind` field of `series`.
///
/// Negative values inside `Q(2R)` or a nonpositive `k_R` are contract
/// errors. When the axis lower bound `pi >= k_R` fails, every row is skipped.
pub fn verify_growth_lemmas(series: &SnapshotSeries, inputs: &GrowthInputs) -> Result<VerifyReport, MoserError> {
    let r = inputs.r;
    let top = inputs.center;
    if !(r > 0.0 && r <= 1.0 / 3.0) {
        return Err(MoserError::Domain(format!("R must lie in (0, 1/3], got {r}")));
    }
    let grid = &*series.grid;
    let pi = series
        .snapshots
        .iter()
        .map(|s| s.require(inputs.kind))
        .collect::<Result<Vec<_>, _>>()?;
    let mut probe = Probe {
        grid,
        times: series.times(),
        pi,
        top,
        r,
        k: 0.0,
        h: grid.h_rho.max(grid.h_z),
    };
    let (t_lo, t_hi) = (top.t - 4.0 * r * r, top.t);
    time_weights(&probe.times, t_lo, t_hi)?;
    spatial_weights(grid, &probe.ball(2.0 * r))?;
    let min = probe.min_over(2.0 * r, t_lo, t_hi).ok_or_else(|| MoserError::Contract("no samples in Q(2R)".into()))?;
    let axis = probe.axis_min(2.0 * r, t_lo, t_hi).unwrap_or(f64::NAN);
    let k = inputs.k_r.unwrap_or(axis);
    if !(k > 0.0 && k.is_finite()) {
        return Err(MoserError::Contract(format!("k_R must be positive, got {k}")));
    }
    if min < -1e-12 * k {
        return Err(MoserError::Contract(format!("field takes the negative value {min} in Q(2R)")));
    }
    probe.k = k;

    let has_velocity = series.snapshots.iter().all(|s| s.get(FieldKind::VRho).is_some());
    let (f2r, m2r) = if has_velocity && 2.0 * r <= crate::criterion::R_MAX {
        let np = NormProbe::new(series)?;
        (np.f(top, 2.0 * r)?, np.m(top, 2.0 * r)?)
    } else {
        (0.0, 0.0)
    };
    let gauge = inputs.params.gauge;
    let g2r = eval_g(2.0 * r, &gauge)?;
    let params = MoserInputs { r, k_r: k, f2r, m2r, g2r, ..inputs.params.clone() };
    let c = params.c;

    let axis_bound_holds = axis >= k * (1.0 - POINT_TOL);
    let rows: Vec<LemmaRow> = if axis_bound_holds {
        checks(&params, c, gauge)
            .par_iter()
            .map(|(name, f)| f(&probe).unwrap_or_else(|e| LemmaRow::skipped(name, e.to_string())))
            .collect()
    } else {
        LEMMAS
            .iter()
            .map(|name| LemmaRow::skipped(name, format!("axis lower bound fails: min {axis} < k_R = {k}")))
            .collect()
    };
    let g_trace = if inputs.trace > 0 {
        Some(g_trace(series, inputs.kind, top, r, k, &params, inputs.trace)?)
    } else {
        None
    };
    Ok(VerifyReport {
        center: top,
        r,
        k_r: k,
        f2r,
        m2r,
        g2r,
        axis_bound_holds,
        failures: rows.iter().filter(|r| r.failed()).count(),
        rows,
        g_trace,
    })
}

/// `G_i = ( (t_i r_i^3)^{-1} int int (k - pi)_+^{5 m_i / 2} )^{2 / (5 m_i)}` on
/// `C(r_i) x ]t0 - t_i, t0[`, with `m_i = (4/3)^i`,
/// `r_i = tau1 R + (tau - tau1) R 2^{1-i}`, `t_i = gamma1 R^2 + (gamma - gamma1) R^2 4^{1-i}`.
pub fn g_trace(
    series: &SnapshotSeries,
    kind: FieldKind,
    top: AxisPoint,
    r: f64,
    k: f64,
    p: &MoserInputs,
    count: usize,
) -> Result<Vec<f64>, MoserError> {
    if count == 0 || count > MAX_TRACE {
        return Err(MoserError::Domain(format!("trace length must lie in 1..={MAX_TRACE}, got {count}")));
    }
    let trunc: Vec<Array2<f64>> = series
        .snapshots
        .iter()
        .map(|s| s.require(kind).map(|a| a.mapv(|v| (k - v).max(0.0))))
        .collect::<Result<_, _>>()?;
    let times = series.times();
    (1..=count)
        .map(|i| {
            let ri = p.tau1 * r + (p.tau - p.tau1) * r * 2f64.powi(1 - i as i32);
            let ti = (p.gamma1 + (p.gamma - p.gamma1) * 4f64.powi(1 - i as i32)) * r * r;
            let exponent = 2.5 * (4.0f64 / 3.0).powi(i as i32);
            let cyl = SpatialCylinder::centered(top.x3, ri);
            let norm = integrate_lp(&series.grid, &times, &trunc, &cyl, top.t - ti, top.t, exponent, exponent)?;
            Ok(norm / (ti * ri.powi(3)).powf(1.0 / exponent))
        })
        .collect()
}

/// Nonnegative `pi` built from the swirl on `Q(2R)`: `M - sigma` when
/// `upper`, else `sigma - m`, with `k_R` half the oscillation.
pub fn swirl_to_pi(series: &SnapshotSeries, top: AxisPoint, r: f64, upper: bool) -> Result<(SnapshotSeries, f64), MoserError> {
    let q = ParabolicCylinder::standard(top, 2.0 * r)?;
    let osc = measure_osc(series, &q).map_err(|e| MoserError::Contract(e.to_string()))?;
    let snaps = series
        .snapshots
        .iter()
        .map(|s| {
            let sigma = s.require(FieldKind::Swirl)?;
            let pi = if upper { sigma.mapv(|v| osc.sup - v) } else { sigma.mapv(|v| v - osc.inf) };
            Ok(s.clone().with(FieldKind::Scalar, pi))
        })
        .collect::<Result<Vec<_>, MoserError>>()?;
    Ok((SnapshotSeries::new(series.grid.clone(), snaps)?, 0.5 * osc.osc))
}
