use std::sync::Arc;

use ndarray::Array2;

use super::CriterionError;
use crate::geometry::{integrate_lp, AxisPoint, CylGrid, FieldKind, Snapshot, SnapshotSeries, SpatialCylinder};

/// `|v|` at every snapshot, computed once and probed many times.
#[derive(Clone, Debug)]
pub struct NormProbe {
    grid: Arc<CylGrid>,
    times: Vec<f64>,
    speeds: Vec<Array2<f64>>,
}

impl NormProbe {
    pub fn new(series: &SnapshotSeries) -> Result<Self, CriterionError> {
        Ok(Self { grid: series.grid.clone(), times: series.times(), speeds: series.speeds()? })
    }

    fn mixed(&self, z0: AxisPoint, r: f64, p: f64, q: f64) -> Result<f64, CriterionError> {
        if !(r > 0.0) {
            return Err(CriterionError::Radius(r));
        }
        let cyl = SpatialCylinder::centered(z0.x3, r);
        Ok(integrate_lp(&self.grid, &self.times, &self.speeds, &cyl, z0.t - r * r, z0.t, p, q)?)
    }

    /// `f(R; z0)`; degree-3 homogeneous in `v`.
    pub fn f(&self, z0: AxisPoint, r: f64) -> Result<f64, CriterionError> {
        Ok(self.mixed(z0, r, 3.0, 4.0)?.powi(3) / r.sqrt())
    }

    /// `M(R; z0)`; degree-1 homogeneous in `v`.
    pub fn m(&self, z0: AxisPoint, r: f64) -> Result<f64, CriterionError> {
        Ok(self.mixed(z0, r, 10.0 / 3.0, 10.0 / 3.0)? / r.sqrt())
    }
}

pub fn eval_f(series: &SnapshotSeries, z0: AxisPoint, r: f64) -> Result<f64, CriterionError> {
    NormProbe::new(series)?.f(z0, r)
}

pub fn eval_m(series: &SnapshotSeries, z0: AxisPoint, r: f64) -> Result<f64, CriterionError> {
    NormProbe::new(series)?.m(z0, r)
}

/// `sup |rho v_phi|` over the grid.
pub fn eval_sigma0(grid: &CylGrid, initial: &Snapshot) -> Result<f64, CriterionError> {
    let vp = initial.require(FieldKind::VPhi)?;
    let mut m: f64 = 0.0;
    for ((i, _), v) in vp.indexed_iter() {
        m = m.max((grid.rho(i) * v).abs());
    }
    Ok(m)
}
