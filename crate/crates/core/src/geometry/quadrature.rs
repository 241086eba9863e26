//! Composite midpoint quadrature on dual cells with the `2 pi rho` Jacobian.
//!
//! Each node owns the dual cell `[rho_i - h/2, rho_i + h/2] x [z_j - h/2, z_j + h/2]`.
//! A region clips these cells, and the node is weighted by the exact
//! axisymmetric volume of the clipped part, `pi (b^2 - a^2) (d - c)`. Time
//! integrals use the same construction on the snapshot times.

use std::f64::consts::PI;

use ndarray::Array2;

use super::{CylGrid, GeometryError, SpatialCylinder};

const EDGE_TOL: f64 = 1e-9;

/// Nonzero quadrature weights of a spatial region, factored as radial area
/// times axial length.
#[derive(Clone, Debug)]
pub struct SpatialWeights {
    pub radial: Vec<(usize, f64)>,
    pub axial: Vec<(usize, f64)>,
}

impl SpatialWeights {
    pub fn total(&self) -> f64 {
        let a: f64 = self.radial.iter().map(|(_, w)| w).sum();
        let b: f64 = self.axial.iter().map(|(_, w)| w).sum();
        a * b
    }

    /// `sum_ij w_ij g(values_ij)`.
    pub fn integrate(&self, values: &Array2<f64>, g: impl Fn(f64) -> f64) -> f64 {
        let mut acc = 0.0;
        for &(i, wr) in &self.radial {
            let mut row = 0.0;
            for &(j, wz) in &self.axial {
                row += wz * g(values[[i, j]]);
            }
            acc += wr * row;
        }
        acc
    }

    /// Measure of the nodes where `pred` holds.
    pub fn measure_where(&self, values: &Array2<f64>, pred: impl Fn(f64) -> bool) -> f64 {
        self.integrate(values, |v| if pred(v) { 1.0 } else { 0.0 })
    }

    /// Node indices whose dual cell meets the region.
    pub fn nodes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.radial
            .iter()
            .flat_map(move |&(i, _)| self.axial.iter().map(move |&(j, _)| (i, j)))
    }
}

fn overlap(a: f64, b: f64, c: f64, d: f64) -> Option<(f64, f64)> {
    let lo = a.max(c);
    let hi = b.min(d);
    (hi > lo).then_some((lo, hi))
}

/// Checks the one-cell margin between a region and the outer boundaries.
pub fn check_margin(grid: &CylGrid, cyl: &SpatialCylinder) -> Result<(), GeometryError> {
    let tol_r = EDGE_TOL * grid.h_rho;
    let tol_z = EDGE_TOL * grid.h_z;
    if cyl.radius > grid.rho_max - grid.h_rho + tol_r
        || cyl.x3 - cyl.half_height < grid.z_min + grid.h_z - tol_z
        || cyl.x3 + cyl.half_height > grid.z_max - grid.h_z + tol_z
    {
        return Err(GeometryError::OutsideDomain(format!(
            "cylinder rho<{}, |x3-{}|<{} needs one cell of margin inside rho<={}, z in [{}, {}]",
            cyl.radius, cyl.x3, cyl.half_height, grid.rho_max, grid.z_min, grid.z_max
        )));
    }
    Ok(())
}

/// Clipped dual-cell weights of `cyl` on `grid`.
pub fn spatial_weights(grid: &CylGrid, cyl: &SpatialCylinder) -> Result<SpatialWeights, GeometryError> {
    check_margin(grid, cyl)?;
    let radial = (0..=grid.n_rho)
        .filter_map(|i| {
            let (a, b) = grid.rho_cell(i);
            overlap(a, b, 0.0, cyl.radius).map(|(lo, hi)| (i, PI * (hi * hi - lo * lo)))
        })
        .collect();
    let axial = (0..=grid.n_z)
        .filter_map(|j| {
            let (c, d) = grid.z_cell(j);
            overlap(c, d, cyl.x3 - cyl.half_height, cyl.x3 + cyl.half_height).map(|(lo, hi)| (j, hi - lo))
        })
        .collect();
    Ok(SpatialWeights { radial, axial })
}

/// Weights of the window `[a, b]` on the dual intervals of `times`
/// (sorted ascending). The window must lie inside `[times[0], times[last]]`.
pub fn time_weights(times: &[f64], a: f64, b: f64) -> Result<Vec<(usize, f64)>, GeometryError> {
    let n = times.len();
    if n == 0 {
        return Err(GeometryError::OutsideDomain("no time levels".into()));
    }
    let scale = (times[n - 1] - times[0]).abs().max(b - a).max(1e-300);
    let tol = EDGE_TOL * scale;
    if a < times[0] - tol || b > times[n - 1] + tol || b < a {
        return Err(GeometryError::OutsideDomain(format!(
            "time window [{a}, {b}] not covered by snapshots [{}, {}]",
            times[0],
            times[n - 1]
        )));
    }
    if n == 1 {
        return Ok(vec![(0, 0.0)]);
    }
    Ok((0..n)
        .filter_map(|k| {
            let lo = if k == 0 { times[0] } else { 0.5 * (times[k - 1] + times[k]) };
            let hi = if k == n - 1 { times[n - 1] } else { 0.5 * (times[k] + times[k + 1]) };
            overlap(lo, hi, a, b).map(|(l, h)| (k, h - l))
        })
        .collect())
}

/// Indices of the time levels inside `[a, b]`, inclusive up to rounding.
pub fn times_in(times: &[f64], a: f64, b: f64) -> Vec<usize> {
    let tol = EDGE_TOL * (b - a).abs().max(1e-12);
    (0..times.len())
        .filter(|&k| times[k] >= a - tol && times[k] <= b + tol)
        .collect()
}

/// Mixed Lebesgue norm `( int ( int |f|^p dx )^{q/p} dt )^{1/q}` of nodal
/// samples over `cyl x [t_start, t_end]`.
pub fn integrate_lp(
    grid: &CylGrid,
    times: &[f64],
    values: &[Array2<f64>],
    cyl: &SpatialCylinder,
    t_start: f64,
    t_end: f64,
    p_space: f64,
    p_time: f64,
) -> Result<f64, GeometryError> {
    if times.len() != values.len() {
        return Err(GeometryError::OutsideDomain(format!(
            "{} times for {} samples",
            times.len(),
            values.len()
        )));
    }
    if !(p_space >= 1.0 && p_time >= 1.0) {
        return Err(GeometryError::InvalidRegion(format!("exponents p={p_space}, q={p_time}")));
    }
    let sw = spatial_weights(grid, cyl)?;
    let tw = time_weights(times, t_start, t_end)?;
    let mut acc = 0.0;
    for (k, w) in tw {
        let inner = sw.integrate(&values[k], |v| v.abs().powf(p_space));
        acc += w * inner.powf(p_time / p_space);
    }
    Ok(acc.powf(1.0 / p_time))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn grid() -> CylGrid {
        CylGrid::cylinder(1.0, 64, 64).unwrap()
    }

    #[test]
    fn constant_integrand_is_exact() {
        let g = grid();
        let c = SpatialCylinder::centered(0.1, 0.37);
        let w = spatial_weights(&g, &c).unwrap();
        assert!((w.total() - c.volume()).abs() < 1e-14);
    }

    #[test]
    fn time_weights_sum_to_window() {
        let times: Vec<f64> = (0..11).map(|k| k as f64 * 0.1).collect();
        let w = time_weights(&times, 0.23, 0.81).unwrap();
        let total: f64 = w.iter().map(|(_, x)| x).sum();
        assert!((total - 0.58).abs() < 1e-14);
        assert!(time_weights(&times, -0.1, 0.5).is_err());
        assert!(time_weights(&times, 0.5, 1.2).is_err());
    }

    #[test]
    fn margin_enforced() {
        let g = grid();
        assert!(spatial_weights(&g, &SpatialCylinder::centered(0.0, 1.0)).is_err());
        assert!(spatial_weights(&g, &SpatialCylinder::centered(0.5, 0.5)).is_err());
        assert!(spatial_weights(&g, &SpatialCylinder::centered(0.0, 1.0 - 2.0 / 64.0)).is_ok());
    }

    #[test]
    fn zero_integrand() {
        let g = grid();
        let v = vec![Array2::zeros(g.shape()); 3];
        let n = integrate_lp(&g, &[0.0, 0.5, 1.0], &v, &SpatialCylinder::centered(0.0, 0.5), 0.75, 1.0, 3.0, 4.0).unwrap();
        assert_eq!(n, 0.0);
    }

    #[test]
    fn linear_in_z_exact_on_aligned_region() {
        // Region faces on dual-cell faces: z in [-0.5 + h/2 - h/2, ...].
        let g = grid();
        let h = g.h_z;
        let c = SpatialCylinder { x3: 0.0, radius: 0.5 + 0.5 * g.h_rho, half_height: 0.5 + 0.5 * h };
        let vals = Array2::from_shape_fn(g.shape(), |(_, j)| 2.0 + g.z(j));
        let w = spatial_weights(&g, &c).unwrap();
        let got = w.integrate(&vals, |v| v);
        // int (2 + z) over the cylinder = 2 |C|, odd part cancels.
        assert!((got - 2.0 * c.volume()).abs() < 1e-13);
    }
}
