use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use super::norms::{eval_sigma0, NormProbe};
use super::{eval_g, CriterionError, GaugeParams};
use crate::geometry::{AxisPoint, SnapshotSeries};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProbeRecord {
    pub probe: AxisPoint,
    pub r: f64,
    pub f: f64,
    pub m: f64,
    pub g: f64,
    /// `g - (f + M)`.
    pub margin: f64,
    pub pass: bool,
}

#[derive(Clone, Debug, Serialize, Deserialize)]
pub struct CriterionReport {
    pub gauge: GaugeParams,
    /// Sorted by radius, then by probe position and time.
    pub records: Vec<ProbeRecord>,
    pub worst_margin: f64,
    pub all_pass: bool,
    /// The failing record at the largest radius, if any.
    pub first_failure: Option<ProbeRecord>,
    pub sigma0: Option<f64>,
}

impl CriterionReport {
    pub fn to_csv(&self) -> String {
        let mut out = String::from("probe_x3,probe_t,r,f,m,g,margin,pass\n");
        for r in &self.records {
            out.push_str(&format!(
                "{},{},{},{},{},{},{},{}\n",
                r.probe.x3, r.probe.t, r.r, r.f, r.m, r.g, r.margin, r.pass
            ));
        }
        out
    }
}

/// Evaluates `f + M <= g` at every probe and radius.
pub fn scan_condition(
    series: &SnapshotSeries,
    probes: &[AxisPoint],
    radii: &[f64],
    params: &GaugeParams,
) -> Result<CriterionReport, CriterionError> {
    params.validate()?;
    let norms = NormProbe::new(series)?;
    let pairs: Vec<(AxisPoint, f64)> = probes.iter().flat_map(|&p| radii.iter().map(move |&r| (p, r))).collect();
    let mut records = pairs
        .par_iter()
        .map(|&(probe, r)| {
            let f = norms.f(probe, r)?;
            let m = norms.m(probe, r)?;
            let g = eval_g(r, params)?;
            let margin = g - (f + m);
            Ok(ProbeRecord { probe, r, f, m, g, margin, pass: margin >= 0.0 })
        })
        .collect::<Result<Vec<_>, CriterionError>>()?;
    records.sort_by(|a, b| {
        a.r.total_cmp(&b.r).then(a.probe.x3.total_cmp(&b.probe.x3)).then(a.probe.t.total_cmp(&b.probe.t))
    });
    let worst_margin = records.iter().map(|r| r.margin).fold(f64::INFINITY, f64::min);
    let first_failure = records.iter().rev().find(|r| !r.pass).copied();
    let sigma0 = series.first().ok().and_then(|s| eval_sigma0(&series.grid, s).ok());
    Ok(CriterionReport {
        gauge: *params,
        all_pass: worst_margin >= 0.0,
        worst_margin,
        first_failure,
        records,
        sigma0,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CylGrid, FieldKind, Snapshot};
    use ndarray::Array2;
    use std::sync::Arc;

    fn series(u: f64) -> SnapshotSeries {
        let g = Arc::new(CylGrid::cylinder(1.0, 32, 32).unwrap());
        let snaps = (0..=4)
            .map(|k| {
                let vp = Array2::from_shape_fn(g.shape(), |(i, _)| u * g.rho(i));
                let z = Array2::zeros(g.shape());
                Snapshot::new(k as f64 * 0.25).with(FieldKind::VRho, z.clone()).with(FieldKind::VPhi, vp).with(FieldKind::V3, z)
            })
            .collect();
        SnapshotSeries::new(g, snaps).unwrap()
    }

    #[test]
    fn zero_field_passes_with_margin_g() {
        let s = series(0.0);
        let rep = scan_condition(&s, &[AxisPoint::new(0.0, 1.0)], &[0.5, 0.25, 0.125], &GaugeParams::default()).unwrap();
        assert!(rep.all_pass);
        assert!(rep.records.iter().all(|r| r.margin == r.g && r.g >= 1.0));
        assert!(rep.records.windows(2).all(|w| w[0].r <= w[1].r));
        assert_eq!(rep.sigma0, Some(0.0));
    }

    #[test]
    fn strong_field_fails_first_at_largest_radius() {
        let s = series(40.0);
        let rep = scan_condition(&s, &[AxisPoint::new(0.0, 1.0)], &[0.5, 0.25, 0.125, 0.0625], &GaugeParams::default()).unwrap();
        assert!(!rep.all_pass);
        assert_eq!(rep.first_failure.unwrap().r, 0.5);
        assert_eq!(rep.all_pass, rep.worst_margin >= 0.0);
        assert!(rep.to_csv().lines().count() == 5);
    }
}
