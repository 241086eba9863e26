//! Oscillation of the swirl over nested parabolic cylinders centred on the
//! axis, its power-law decay, the maximum principle, and the contraction
//! product `eta_k = prod (1 - beta_i / 2)`.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::geometry::{check_margin, times_in, AxisPoint, FieldKind, GeometryError, ParabolicCylinder, SnapshotSeries};

#[derive(Debug, thiserror::Error)]
pub enum OscError {
    #[error("no samples of the swirl inside {0:?}")]
    Empty(ParabolicCylinder),
    #[error("radius {r} is below the resolvable scale {min}")]
    SubGrid { r: f64, min: f64 },
    #[error("contraction factor {0} outside (0, 1]")]
    Beta(f64),
    #[error("{0}")]
    Contract(String),
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscRecord {
    pub center: AxisPoint,
    pub r: f64,
    pub sup: f64,
    pub inf: f64,
    pub osc: f64,
}

/// Nodal sup and inf of the swirl over the closed cylinder `q`.
pub fn measure_osc(series: &SnapshotSeries, q: &ParabolicCylinder) -> Result<OscRecord, OscError> {
    let g = &*series.grid;
    let spatial = q.spatial();
    check_margin(g, &spatial)?;
    let a = spatial.radius;
    let tol_r = 1e-9 * g.h_rho;
    let tol_z = 1e-9 * g.h_z;
    let rows: Vec<usize> = (0..=g.n_rho).filter(|&i| g.rho(i) <= a + tol_r).collect();
    let cols: Vec<usize> = (0..=g.n_z).filter(|&j| (g.z(j) - spatial.x3).abs() <= a + tol_z).collect();
    let times = series.times();
    let levels = times_in(&times, q.t_start(), q.t_end());
    let (mut sup, mut inf) = (f64::NEG_INFINITY, f64::INFINITY);
    for k in levels {
        let s = series.snapshots[k].require(FieldKind::Swirl)?;
        for &i in &rows {
            for &j in &cols {
                let v = s[[i, j]];
                sup = sup.max(v);
                inf = inf.min(v);
            }
        }
    }
    if !(sup >= inf) {
        return Err(OscError::Empty(*q));
    }
    Ok(OscRecord { center: q.center, r: q.radius, sup, inf, osc: sup - inf })
}

/// Records at `r_max 2^{-j}` down to `r_min`, largest first.
pub fn dyadic_scan(series: &SnapshotSeries, center: AxisPoint, r_min: f64, r_max: f64) -> Result<Vec<OscRecord>, OscError> {
    let g = &*series.grid;
    let min = 4.0 * g.h_rho.max(g.h_z);
    if r_min < min * (1.0 - 1e-12) {
        return Err(OscError::SubGrid { r: r_min, min });
    }
    let mut radii = Vec::new();
    let mut r = r_max;
    while r >= r_min * (1.0 - 1e-12) {
        radii.push(r);
        r *= 0.5;
    }
    radii
        .par_iter()
        .map(|&r| measure_osc(series, &ParabolicCylinder::standard(center, r)?))
        .collect()
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DecayFit {
    /// The reference radius `R`; oscillations are compared on `r / 2R`.
    pub reference_r: f64,
    pub radii: Vec<f64>,
    /// Prefactor, relative to the oscillation on `Q(2R)` when that record
    /// is present.
    pub c1: f64,
    pub c2: f64,
    /// Standard error of the fitted exponent.
    pub c2_stderr: f64,
    /// Root-mean-square residual of the log-log fit.
    pub residual: f64,
    /// Largest exponent for which `osc(r) <= 2 (r/2R)^e osc(2R)` holds on
    /// every record.
    pub envelope_c2: Option<f64>,
    /// Radii where `osc(r) > 2 (r/2R)^{c2} osc(2R)`.
    pub flagged: Vec<f64>,
    /// Set when fewer than four records have positive oscillation.
    pub degenerate: bool,
}

fn reference_osc(records: &[OscRecord], reference_r: f64) -> Option<f64> {
    records
        .iter()
        .find(|r| (r.r - 2.0 * reference_r).abs() <= 1e-12 * reference_r)
        .map(|r| r.osc)
        .filter(|&o| o > 0.0)
}

/// Radii violating `osc(r) <= prefactor (r/2R)^exponent osc(2R)`; needs the
/// record at `r = 2R`.
pub fn envelope_violations(records: &[OscRecord], reference_r: f64, exponent: f64, prefactor: f64) -> Option<Vec<f64>> {
    let top = reference_osc(records, reference_r)?;
    Some(
        records
            .iter()
            .filter(|r| r.osc > prefactor * (r.r / (2.0 * reference_r)).powf(exponent) * top * (1.0 + 1e-12))
            .map(|r| r.r)
            .collect(),
    )
}

/// Least squares of `ln osc` against `ln(r / 2R)`.
pub fn fit_decay(records: &[OscRecord], reference_r: f64) -> DecayFit {
    let pts: Vec<(f64, f64)> = records
        .iter()
        .filter(|r| r.osc > 0.0)
        .map(|r| ((r.r / (2.0 * reference_r)).ln(), r.osc.ln()))
        .collect();
    let radii = records.iter().map(|r| r.r).collect();
    if pts.len() < 4 {
        return DecayFit {
            reference_r,
            radii,
            c1: f64::NAN,
            c2: f64::NAN,
            c2_stderr: f64::NAN,
            residual: f64::NAN,
            envelope_c2: None,
            flagged: Vec::new(),
            degenerate: true,
        };
    }
    let n = pts.len() as f64;
    let mx = pts.iter().map(|p| p.0).sum::<f64>() / n;
    let my = pts.iter().map(|p| p.1).sum::<f64>() / n;
    let sxx: f64 = pts.iter().map(|p| (p.0 - mx).powi(2)).sum();
    let sxy: f64 = pts.iter().map(|p| (p.0 - mx) * (p.1 - my)).sum();
    let slope = sxy / sxx;
    let intercept = my - slope * mx;
    let ssr: f64 = pts.iter().map(|p| (p.1 - intercept - slope * p.0).powi(2)).sum();
    let top = reference_osc(records, reference_r);
    let c1 = intercept.exp() / top.unwrap_or(1.0);
    let envelope_c2 = top.and_then(|top| {
        records
            .iter()
            .filter(|r| r.r < 2.0 * reference_r * (1.0 - 1e-12))
            .map(|r| {
                if r.osc <= 0.0 {
                    f64::INFINITY
                } else {
                    (r.osc / (2.0 * top)).ln() / (r.r / (2.0 * reference_r)).ln()
                }
            })
            .reduce(f64::min)
    });
    DecayFit {
        reference_r,
        radii,
        c1,
        c2: slope,
        c2_stderr: (ssr / (n - 2.0).max(1.0) / sxx).sqrt(),
        residual: (ssr / n).sqrt(),
        envelope_c2,
        flagged: envelope_violations(records, reference_r, slope, 2.0).unwrap_or_default(),
        degenerate: false,
    }
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct MaxPrincipleReport {
    pub sigma0: f64,
    pub tol_rel: f64,
    pub times: Vec<f64>,
    pub sup_abs: Vec<f64>,
    pub first_violation: Option<f64>,
    pub violations: usize,
}

/// Flags every time with `sup |sigma| > sigma0 (1 + tol_rel)`. Without an
/// explicit `sigma0` the supremum of the first snapshot is used.
pub fn max_principle_monitor(series: &SnapshotSeries, sigma0: Option<f64>, tol_rel: f64) -> Result<MaxPrincipleReport, OscError> {
    let sup_abs = series
        .snapshots
        .iter()
        .map(|s| Ok(s.require(FieldKind::Swirl)?.iter().fold(0.0, |m: f64, v| m.max(v.abs()))))
        .collect::<Result<Vec<_>, GeometryError>>()?;
    let sigma0 = match sigma0 {
        Some(v) => v,
        None => *sup_abs.first().ok_or_else(|| OscError::Contract("empty snapshot series".into()))?,
    };
    let times = series.times();
    let bound = sigma0 * (1.0 + tol_rel);
    let bad: Vec<usize> = (0..sup_abs.len()).filter(|&k| sup_abs[k] > bound).collect();
    Ok(MaxPrincipleReport {
        sigma0,
        tol_rel,
        first_violation: bad.first().map(|&k| times[k]),
        violations: bad.len(),
        times,
        sup_abs,
    })
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct OscIteration {
    pub betas: Vec<f64>,
    /// `ln eta_k`.
    pub ln_eta: f64,
    pub eta: f64,
    /// `-(1/2) sum beta_i`, from `ln(1 - x) <= -x`.
    pub linear_bound: f64,
    /// Present for `beta(r) = c / ln(1/r)`: the geometric rate
    /// `-c (k+1) ln 2` and whether `ln eta_k` respects it.
    pub geometric_claim: Option<f64>,
    pub geometric_claim_holds: Option<bool>,
    /// Present for `beta(r) = c / ln(1/r)`: the integral comparison
    /// `-(c / (4 ln 2)) ln((ln(1/R) + (2k+3) ln 2) / (ln(1/R) + ln 2))`,
    /// a valid upper bound for `ln eta_k`.
    pub integral_bound: Option<f64>,
}

/// `eta_k = prod_{i=0}^{k} (1 - beta_i / 2)` in log space.
pub fn iterate_osc_bound(betas: &[f64]) -> Result<OscIteration, OscError> {
    if let Some(&b) = betas.iter().find(|&&b| !(b > 0.0 && b <= 1.0)) {
        return Err(OscError::Beta(b));
    }
    if betas.is_empty() {
        return Err(OscError::Contract("no contraction factors".into()));
    }
    let ln_eta: f64 = betas.iter().map(|b| (-0.5 * b).ln_1p()).sum();
    Ok(OscIteration {
        betas: betas.to_vec(),
        ln_eta,
        eta: ln_eta.exp(),
        linear_bound: -0.5 * betas.iter().sum::<f64>(),
        geometric_claim: None,
        geometric_claim_holds: None,
        integral_bound: None,
    })
}

/// [`iterate_osc_bound`] with `beta_i = c / ln(1/r_i)`, `r_i = R / 2^{2i+1}`.
pub fn iterate_log_contraction(c: f64, r: f64, k: usize) -> Result<OscIteration, OscError> {
    if !(c > 0.0) || !(r > 0.0 && r < 1.0) {
        return Err(OscError::Contract(format!("c={c}, R={r}")));
    }
    let l0 = (1.0 / r).ln();
    let ln2 = std::f64::consts::LN_2;
    let betas: Vec<f64> = (0..=k).map(|i| c / (l0 + (2 * i + 1) as f64 * ln2)).collect();
    let mut it = iterate_osc_bound(&betas)?;
    let claim = -c * (k + 1) as f64 * ln2;
    it.geometric_claim = Some(claim);
    it.geometric_claim_holds = Some(it.ln_eta <= claim);
    it.integral_bound = Some(-(c / (4.0 * ln2)) * ((l0 + (2 * k + 3) as f64 * ln2) / (l0 + ln2)).ln());
    Ok(it)
}
