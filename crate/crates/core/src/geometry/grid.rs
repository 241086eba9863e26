use serde::{Deserialize, Serialize};

use super::GeometryError;

/// Uniform axisymmetric `(rho, z)` grid with a time axis.
///
/// Radial nodes sit at `rho_i = i * h_rho` for `i = 0..=n_rho`, so the first
/// node line is the symmetry axis. Axial nodes sit at `z_j = z_min + j * h_z`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct CylGrid {
    pub rho_max: f64,
    pub z_min: f64,
    pub z_max: f64,
    pub n_rho: usize,
    pub n_z: usize,
    pub h_rho: f64,
    pub h_z: f64,
    pub dt: f64,
    pub t_start: f64,
    pub t_end: f64,
}

impl CylGrid {
    pub fn new(rho_max: f64, z_min: f64, z_max: f64, n_rho: usize, n_z: usize) -> Result<Self, GeometryError> {
        if !(rho_max > 0.0) || !(z_max > z_min) || n_rho < 4 || n_z < 4 {
            return Err(GeometryError::InvalidGrid(format!(
                "rho_max={rho_max}, z=[{z_min},{z_max}], n_rho={n_rho}, n_z={n_z}"
            )));
        }
        Ok(Self {
            rho_max,
            z_min,
            z_max,
            n_rho,
            n_z,
            h_rho: rho_max / n_rho as f64,
            h_z: (z_max - z_min) / n_z as f64,
            dt: 0.0,
            t_start: 0.0,
            t_end: 0.0,
        })
    }

    /// Grid on the cross-section of `C(r) = {|x'| < r, |x3| < r}`.
    pub fn cylinder(radius: f64, n_rho: usize, n_z: usize) -> Result<Self, GeometryError> {
        Self::new(radius, -radius, radius, n_rho, n_z)
    }

    pub fn with_time_axis(mut self, dt: f64, t_start: f64, t_end: f64) -> Result<Self, GeometryError> {
        if !(dt > 0.0) || !(t_end >= t_start) {
            return Err(GeometryError::InvalidGrid(format!("dt={dt}, t=[{t_start},{t_end}]")));
        }
        self.dt = dt;
        self.t_start = t_start;
        self.t_end = t_end;
        Ok(self)
    }

    /// Shape of a nodal array, `(n_rho + 1, n_z + 1)`.
    pub fn shape(&self) -> (usize, usize) {
        (self.n_rho + 1, self.n_z + 1)
    }

    #[inline]
    pub fn rho(&self, i: usize) -> f64 {
        i as f64 * self.h_rho
    }

    #[inline]
    pub fn z(&self, j: usize) -> f64 {
        self.z_min + j as f64 * self.h_z
    }

    pub fn h_min(&self) -> f64 {
        self.h_rho.min(self.h_z)
    }

    /// Nodal index of the closest node to `rho`.
    pub fn rho_index(&self, rho: f64) -> usize {
        ((rho / self.h_rho).round().max(0.0) as usize).min(self.n_rho)
    }

    pub fn z_index(&self, z: f64) -> usize {
        (((z - self.z_min) / self.h_z).round().max(0.0) as usize).min(self.n_z)
    }

    /// Spatial parts agree (time axis is ignored).
    pub fn same_space(&self, other: &CylGrid) -> bool {
        self.n_rho == other.n_rho
            && self.n_z == other.n_z
            && self.h_rho == other.h_rho
            && self.h_z == other.h_z
            && self.z_min == other.z_min
    }

    /// Radial extent of the dual cell around node `i`, clipped to `[0, rho_max]`.
    pub fn rho_cell(&self, i: usize) -> (f64, f64) {
        let r = self.rho(i);
        ((r - 0.5 * self.h_rho).max(0.0), (r + 0.5 * self.h_rho).min(self.rho_max))
    }

    pub fn z_cell(&self, j: usize) -> (f64, f64) {
        let z = self.z(j);
        ((z - 0.5 * self.h_z).max(self.z_min), (z + 0.5 * self.h_z).min(self.z_max))
    }

    /// Volume `2 pi rho h_rho h_z` of every dual cell, axis and boundary cells clipped.
    pub fn cell_volumes(&self) -> ndarray::Array2<f64> {
        let (nr, nz) = self.shape();
        ndarray::Array2::from_shape_fn((nr, nz), |(i, j)| {
            let (a, b) = self.rho_cell(i);
            let (c, d) = self.z_cell(j);
            std::f64::consts::PI * (b * b - a * a) * (d - c)
        })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn spacing_and_axis() {
        let g = CylGrid::cylinder(1.0, 128, 128).unwrap();
        assert_eq!(g.h_rho, 1.0 / 128.0);
        assert_eq!(g.h_z, 2.0 / 128.0);
        assert_eq!(g.rho(0), 0.0);
        assert_eq!(g.z(64), 0.0);
        assert_eq!(g.shape(), (129, 129));
    }

    #[test]
    fn rejects_degenerate() {
        assert!(CylGrid::new(0.0, -1.0, 1.0, 8, 8).is_err());
        assert!(CylGrid::new(1.0, 1.0, 1.0, 8, 8).is_err());
        assert!(CylGrid::cylinder(1.0, 8, 8).unwrap().with_time_axis(-1.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn cell_volumes_sum_to_domain() {
        let g = CylGrid::new(2.0, -1.0, 3.0, 17, 9).unwrap();
        let total: f64 = g.cell_volumes().sum();
        let exact = std::f64::consts::PI * 4.0 * 4.0;
        assert!((total - exact).abs() < 1e-12 * exact);
    }
}
