//! Exact discrete projection on the collocated grid.
//!
//! The divergence `D` is the conservative centred stencil
//! `(rho_{i+1} u_{i+1} - rho_{i-1} u_{i-1}) / (2 h rho_i) + (w_{j+1} - w_{j-1}) / (2 h_z)`
//! with `2 u_1 / h` on the axis. The gradient is its negative adjoint in the
//! volume-weighted inner product, `G = -W^{-1} D^T W`, so `K = D W^{-1} D^T` is
//! symmetric positive semidefinite and the corrected velocity satisfies
//! `|D u| <= tol` once conjugate gradients converge.
//!
//! Pressure nodes are `i in 0..n_rho`, `j in 1..n_z`; free velocity nodes are
//! the same for `v_3`, and `i >= 1` for `v_rho`. Everything on the outer ring
//! is Dirichlet data.

use std::sync::Arc;

use ndarray::Array2;

use super::SolverError;
use crate::geometry::CylGrid;

#[derive(Clone, Debug)]
pub struct Projector {
    grid: Arc<CylGrid>,
    /// Volume weight per radial index in units of `pi h_rho^2 h_z`.
    weight: Vec<f64>,
    inv_diag: Array2<f64>,
    warm: Array2<f64>,
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ProjectionReport {
    pub iterations: usize,
    pub divergence: f64,
}

impl Projector {
    pub fn new(grid: Arc<CylGrid>) -> Self {
        let n = grid.n_rho;
        let nz = grid.n_z;
        let weight: Vec<f64> = (0..=n).map(|i| if i == 0 { 0.5 } else { 2.0 * i as f64 }).collect();
        let (hr, hz) = (grid.h_rho, grid.h_z);
        let mut inv_diag = Array2::zeros(grid.shape());
        for i in 0..n {
            for j in 1..nz {
                let mut d = 0.0;
                if i + 1 < n {
                    let c = if i == 0 { 2.0 / hr } else { (i + 1) as f64 / (2.0 * hr * i as f64) };
                    d += c * c / weight[i + 1];
                }
                if i >= 2 {
                    let c = (i - 1) as f64 / (2.0 * hr * i as f64);
                    d += c * c / weight[i - 1];
                }
                let cz = 1.0 / (2.0 * hz);
                if j >= 2 {
                    d += cz * cz / weight[i];
                }
                if j + 2 <= nz {
                    d += cz * cz / weight[i];
                }
                inv_diag[[i, j]] = if d > 0.0 { 1.0 / d } else { 0.0 };
            }
        }
        let warm = Array2::zeros(grid.shape());
        Self { grid, weight, inv_diag, warm }
    }

    /// `D u` on pressure nodes (zero elsewhere), including boundary data.
    pub fn divergence(&self, u_r: &Array2<f64>, u_z: &Array2<f64>, out: &mut Array2<f64>) -> f64 {
        let g = &*self.grid;
        let (n, nz) = (g.n_rho, g.n_z);
        let (hr, hz) = (g.h_rho, g.h_z);
        out.fill(0.0);
        let mut m: f64 = 0.0;
        for i in 0..n {
            for j in 1..nz {
                let radial = if i == 0 {
                    2.0 * u_r[[1, j]] / hr
                } else {
                    let fi = i as f64;
                    ((fi + 1.0) * u_r[[i + 1, j]] - (fi - 1.0) * u_r[[i - 1, j]]) / (2.0 * hr * fi)
                };
                let d = radial + (u_z[[i, j + 1]] - u_z[[i, j - 1]]) / (2.0 * hz);
                out[[i, j]] = d;
                m = m.max(d.abs());
            }
        }
        m
    }

    /// `W^{-1} D^T y` on free velocity nodes.
    fn adjoint(&self, y: &Array2<f64>, gr: &mut Array2<f64>, gz: &mut Array2<f64>) {
        let g = &*self.grid;
        let (n, nz) = (g.n_rho, g.n_z);
        let (hr, hz) = (g.h_rho, g.h_z);
        gr.fill(0.0);
        gz.fill(0.0);
        for m in 1..n {
            for j in 1..nz {
                let from_inner = if m == 1 {
                    2.0 / hr * y[[0, j]]
                } else {
                    m as f64 / (2.0 * hr * (m - 1) as f64) * y[[m - 1, j]]
                };
                let from_outer = if m + 1 < n { -(m as f64) / (2.0 * hr * (m + 1) as f64) * y[[m + 1, j]] } else { 0.0 };
                gr[[m, j]] = (from_inner + from_outer) / self.weight[m];
            }
        }
        let cz = 1.0 / (2.0 * hz);
        for m in 0..n {
            for j in 1..nz {
                let below = if j >= 2 { cz * y[[m, j - 1]] } else { 0.0 };
                let above = if j + 2 <= nz { -cz * y[[m, j + 1]] } else { 0.0 };
                gz[[m, j]] = (below + above) / self.weight[m];
            }
        }
    }

    fn apply_k(&self, y: &Array2<f64>, gr: &mut Array2<f64>, gz: &mut Array2<f64>, out: &mut Array2<f64>) {
        self.adjoint(y, gr, gz);
        self.divergence(gr, gz, out);
    }

    /// Projects `(u_r, u_z)` onto discretely solenoidal fields and adds the
    /// pressure increment to `q`.
    pub fn project(
        &mut self,
        u_r: &mut Array2<f64>,
        u_z: &mut Array2<f64>,
        q: &mut Array2<f64>,
        dt: f64,
        tol: f64,
        max_iters: usize,
    ) -> Result<ProjectionReport, SolverError> {
        let shape = self.grid.shape();
        let mut div = Array2::zeros(shape);
        let initial = self.divergence(u_r, u_z, &mut div);
        if initial <= tol {
            return Ok(ProjectionReport { iterations: 0, divergence: initial });
        }
        let target = 0.5 * tol / dt;
        let b = div.mapv(|d| -d / dt);
        let mut y = self.warm.clone();
        let mut gr = Array2::zeros(shape);
        let mut gz = Array2::zeros(shape);
        let mut kp = Array2::zeros(shape);
        self.apply_k(&y, &mut gr, &mut gz, &mut kp);
        let mut r = &b - &kp;
        let max_abs = |a: &Array2<f64>| a.iter().fold(0.0f64, |m, v| m.max(v.abs()));
        if max_abs(&r) > max_abs(&b) {
            // A stale warm start is worse than none.
            y.fill(0.0);
            r.assign(&b);
        }
        let mut z = &r * &self.inv_diag;
        let mut p = z.clone();
        let mut rz: f64 = (&r * &z).sum();
        let mut iters = 0;
        while max_abs(&r) > target {
            if iters >= max_iters {
                return Err(SolverError::PressureSolve { iters, residual: max_abs(&r) * dt });
            }
            self.apply_k(&p, &mut gr, &mut gz, &mut kp);
            let pkp: f64 = (&p * &kp).sum();
            if !(pkp > 0.0) {
                break;
            }
            let alpha = rz / pkp;
            y.scaled_add(alpha, &p);
            r.scaled_add(-alpha, &kp);
            z = &r * &self.inv_diag;
            let rz_new: f64 = (&r * &z).sum();
            let beta = rz_new / rz;
            rz = rz_new;
            p = &z + &(beta * &p);
            iters += 1;
        }
        self.adjoint(&y, &mut gr, &mut gz);
        u_r.scaled_add(dt, &gr);
        u_z.scaled_add(dt, &gz);
        let g = &*self.grid;
        for i in 0..g.n_rho {
            for j in 1..g.n_z {
                q[[i, j]] += y[[i, j]] / self.weight[i];
            }
        }
        self.warm = y;
        let residual = self.divergence(u_r, u_z, &mut div);
        if residual > tol {
            return Err(SolverError::PressureSolve { iters, residual });
        }
        Ok(ProjectionReport { iterations: iters, divergence: residual })
    }
}
