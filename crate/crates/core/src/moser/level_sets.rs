//! Super-level sets `e_kappa(t) = {x in C(R) : pi(x, t) >= kappa k_R}` and
//! their space-time union over `]t0 - R^2, t0 - 3R^2/4[`.

use serde::{Deserialize, Serialize};

use super::MoserError;
use crate::geometry::{spatial_weights, time_weights, AxisPoint, FieldKind, SnapshotSeries, SpatialCylinder};

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LevelSetReport {
    pub kappa: f64,
    pub k_r: f64,
    pub center: AxisPoint,
    pub r: f64,
    /// Snapshot times carrying weight in the window.
    pub times: Vec<f64>,
    /// `|e_kappa(t)|` at those times.
    pub measures: Vec<f64>,
    /// `|e_kappa(t)| / |C(R)|`.
    pub fractions: Vec<f64>,
    /// `|E_kappa|`.
    pub space_time: f64,
    /// `|E_kappa| / |Q^{1,1/4}(R)|`.
    pub space_time_fraction: f64,
    /// Quadrature measure of `C(R)`.
    pub ball: f64,
    pub t_bar: f64,
    pub measure_at_t_bar: f64,
}

impl LevelSetReport {
    /// `|e(t_bar)| R^2 / 4 >= |E|`.
    pub fn mean_value_holds(&self) -> bool {
        self.measure_at_t_bar * 0.25 * self.r * self.r >= self.space_time * (1.0 - 1e-12)
    }
}

/// Level-set measures of the `kind` field of `series` on `C(R)` around
/// `center.x3`, over the window `[center.t - R^2, center.t - 3R^2/4]`.
pub fn level_sets(
    series: &SnapshotSeries,
    kind: FieldKind,
    center: AxisPoint,
    r: f64,
    kappa: f64,
    k_r: f64,
) -> Result<LevelSetReport, MoserError> {
    if !(k_r > 0.0 && k_r.is_finite()) {
        return Err(MoserError::Contract(format!("k_R must be positive, got {k_r}")));
    }
    if !(r > 0.0) || !(kappa >= 0.0) {
        return Err(MoserError::Domain(format!("R = {r}, kappa = {kappa}")));
    }
    let cyl = SpatialCylinder::centered(center.x3, r);
    let sw = spatial_weights(&series.grid, &cyl)?;
    let all_times = series.times();
    let r2 = r * r;
    let tw = time_weights(&all_times, center.t - r2, center.t - 0.75 * r2)?;
    let level = kappa * k_r;
    let floor = -1e-12 * k_r;
    let ball = sw.total();

    let mut times = Vec::with_capacity(tw.len());
    let mut measures = Vec::with_capacity(tw.len());
    let mut space_time = 0.0;
    for &(k, w) in &tw {
        let pi = series.snapshots[k].require(kind)?;
        if let Some((i, j)) = sw.nodes().find(|&(i, j)| pi[[i, j]] < floor) {
            return Err(MoserError::Contract(format!(
                "negative value {} at node ({i}, {j}), t = {}",
                pi[[i, j]],
                all_times[k]
            )));
        }
        let m = sw.measure_where(pi, |v| v >= level);
        times.push(all_times[k]);
        measures.push(m);
        space_time += w * m;
    }
    let best = (0..measures.len())
        .max_by(|&a, &b| measures[a].total_cmp(&measures[b]).then(b.cmp(&a)))
        .ok_or_else(|| MoserError::Contract("no snapshots in the window".into()))?;
    Ok(LevelSetReport {
        kappa,
        k_r,
        center,
        r,
        fractions: measures.iter().map(|m| m / ball).collect(),
        t_bar: times[best],
        measure_at_t_bar: measures[best],
        times,
        measures,
        space_time,
        space_time_fraction: space_time / (0.25 * r2 * ball),
        ball,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::{CylGrid, Snapshot};
    use ndarray::Array2;
    use std::sync::Arc;

    fn series(n: usize, f: impl Fn(f64, f64, f64) -> f64) -> SnapshotSeries {
        let g = Arc::new(CylGrid::cylinder(1.0, n, 2 * n).unwrap());
        let snaps = (0..=16)
            .map(|k| {
                let t = -1.0 + k as f64 / 16.0;
                let a = Array2::from_shape_fn(g.shape(), |(i, j)| f(g.rho(i), g.z(j), t));
                Snapshot::new(t).with(FieldKind::Scalar, a)
            })
            .collect();
        SnapshotSeries::new(g, snaps).unwrap()
    }

    #[test]
    fn full_empty_and_annulus() {
        let o = AxisPoint::new(0.0, 0.0);
        let s = series(64, |_, _, _| 2.0);
        let full = level_sets(&s, FieldKind::Scalar, o, 0.5, 1.0, 2.0).unwrap();
        assert!(full.fractions.iter().all(|&f| (f - 1.0).abs() < 1e-14));
        assert!((full.space_time_fraction - 1.0).abs() < 1e-12);
        let empty = level_sets(&s, FieldKind::Scalar, o, 0.5, 1.5, 2.0).unwrap();
        assert!(empty.fractions.iter().all(|&f| f == 0.0));

        let n = 128;
        let r = 0.5;
        let s = series(n, |rho, _, _| rho * rho / (r * r));
        let rep = level_sets(&s, FieldKind::Scalar, o, r, 0.25, 1.0).unwrap();
        let h = 1.0 / n as f64;
        for f in &rep.fractions {
            assert!((f - 0.75).abs() <= h / r, "{f}");
        }
        assert!(rep.mean_value_holds());
    }

    #[test]
    fn mean_value_on_moving_level_set() {
        let o = AxisPoint::new(0.0, 0.0);
        let s = series(64, |rho, z, t| (rho + z.abs() + 2.0 * t + 2.0).max(0.0));
        let rep = level_sets(&s, FieldKind::Scalar, o, 0.75, 0.5, 1.0).unwrap();
        assert!(rep.mean_value_holds());
        assert!(rep.measures.iter().all(|&m| m >= 0.0 && m <= rep.ball));
        assert!(rep.space_time <= 0.25 * 0.75 * 0.75 * rep.ball * (1.0 + 1e-12));
    }

    #[test]
    fn negative_values_are_a_contract_error() {
        let s = series(32, |_, _, _| -1.0);
        let e = level_sets(&s, FieldKind::Scalar, AxisPoint::new(0.0, 0.0), 0.5, 0.5, 1.0).unwrap_err();
        assert!(matches!(e, MoserError::Contract(_)));
    }
}
