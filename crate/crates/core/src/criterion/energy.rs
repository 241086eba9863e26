//! A posteriori check of the local energy inequality with one fixed bump.
//!
//! `phi(x, t) = (psi(x) tau(t))^2` with `psi = (1 - |x - x0|^2 / a^2)_+` and
//! `tau(t) = 4 (t - T1)(T3 - t) / (T3 - T1)^2` clipped at zero,
//! `T3 = T2 + (T2 - T1)/2`. So `phi` is `C^1`, nonnegative, and vanishes at
//! `t = T1` and beyond `T3`.
//!
//! At each snapshot time `t` in `]T1, T2]` the residual is
//! `int_{T1}^t int [|v|^2 (phi_t + Delta phi) + v.grad phi (|v|^2 + 2q)]
//!  - int phi |v|^2 (t) - 2 int_{T1}^t int phi |grad v|^2`.

use serde::{Deserialize, Serialize};

use super::CriterionError;
use crate::geometry::{
    d_rho_even, d_rho_odd, d_z, spatial_weights, CylGrid, FieldKind, ParabolicCylinder, Snapshot, SnapshotSeries,
    SpatialCylinder,
};

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergyBump {
    pub x3: f64,
    pub radius: f64,
    pub t_start: f64,
    pub t_end: f64,
}

impl EnergyBump {
    /// Bump with spatial support in the ball inscribed in `C(x0, lambda r)`
    /// and time window `[t0 - mu r^2, t0]`.
    pub fn from_cylinder(q: &ParabolicCylinder) -> Self {
        Self { x3: q.center.x3, radius: q.spatial_radius(), t_start: q.t_start(), t_end: q.t_end() }
    }

    fn t_far(&self) -> f64 {
        self.t_end + 0.5 * (self.t_end - self.t_start)
    }

    /// `(tau, tau')`.
    fn taper(&self, t: f64) -> (f64, f64) {
        let (a, b) = (self.t_start, self.t_far());
        if t <= a || t >= b {
            return (0.0, 0.0);
        }
        let n = 4.0 / ((b - a) * (b - a));
        (n * (t - a) * (b - t), n * (a + b - 2.0 * t))
    }

    /// `(psi^2, d_rho psi^2, d_z psi^2, Delta psi^2)` at `(rho, z)`.
    fn spatial(&self, rho: f64, z: f64) -> [f64; 4] {
        let a2 = self.radius * self.radius;
        let dz = z - self.x3;
        let r2 = rho * rho + dz * dz;
        let u = 1.0 - r2 / a2;
        if u <= 0.0 {
            return [0.0; 4];
        }
        [u * u, -4.0 * u * rho / a2, -4.0 * u * dz / a2, 8.0 * r2 / (a2 * a2) - 12.0 * u / a2]
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct EnergySample {
    pub t: f64,
    pub lhs: f64,
    pub rhs: f64,
    pub residual: f64,
}

/// Per-time spatial integrals `(int phi |v|^2, int phi |grad v|^2, rhs integrand)`.
fn spatial_terms(grid: &CylGrid, snap: &Snapshot, bump: &EnergyBump, region: &SpatialCylinder) -> Result<[f64; 3], CriterionError> {
    let need = |k: FieldKind| {
        snap.get(k).ok_or_else(|| CriterionError::Contract(format!("snapshot at t={} has no {} field", snap.time, k.name())))
    };
    let (vr, vp, v3, q) = (need(FieldKind::VRho)?, need(FieldKind::VPhi)?, need(FieldKind::V3)?, need(FieldKind::Pressure)?);
    let sw = spatial_weights(grid, region)?;
    let (tau, dtau) = bump.taper(snap.time);
    let mut acc = [0.0; 3];
    for &(i, wr) in &sw.radial {
        let rho = grid.rho(i);
        for &(j, wz) in &sw.axial {
            let [psi, dpr, dpz, _] = bump.spatial(rho, grid.z(j));
            if psi == 0.0 {
                continue;
            }
            let w = wr * wz;
            let (a, b, c) = (vr[[i, j]], vp[[i, j]], v3[[i, j]]);
            let speed2 = a * a + b * b + c * c;
            let hoop = |f: &ndarray::Array2<f64>, v: f64| if i == 0 { d_rho_odd(f, grid, 0, j) } else { v / rho };
            let (ar, az) = (d_rho_odd(vr, grid, i, j), d_z(vr, grid, i, j));
            let (br, bz) = (d_rho_odd(vp, grid, i, j), d_z(vp, grid, i, j));
            let (cr, cz) = (d_rho_even(v3, grid, i, j), d_z(v3, grid, i, j));
            let grad2 = ar * ar + az * az + hoop(vr, a).powi(2) + br * br + bz * bz + hoop(vp, b).powi(2) + cr * cr + cz * cz;
            // int |v|^2 Delta phi = -int grad |v|^2 . grad phi; the right side
            // has a continuous integrand, `Delta phi` jumps on the sphere.
            let grad_speed2 = (2.0 * (a * ar + b * br + c * cr), 2.0 * (a * az + b * bz + c * cz));
            let t2 = tau * tau;
            let phi = psi * t2;
            let phi_t = psi * 2.0 * tau * dtau;
            let flux = (a * dpr + c * dpz) * t2;
            acc[0] += w * phi * speed2;
            acc[1] += w * phi * grad2;
            acc[2] += w * (speed2 * phi_t - t2 * (grad_speed2.0 * dpr + grad_speed2.1 * dpz) + flux * (speed2 + 2.0 * q[[i, j]]));
        }
    }
    Ok(acc)
}

/// Left and right sides at every snapshot time in `]T1, T2]`.
pub fn energy_inequality_trace(series: &SnapshotSeries, bump: &EnergyBump) -> Result<Vec<EnergySample>, CriterionError> {
    if !(bump.radius > 0.0) || !(bump.t_end > bump.t_start) {
        return Err(CriterionError::Contract(format!("degenerate bump {bump:?}")));
    }
    let times = series.times();
    let tol = 1e-12 * (bump.t_end - bump.t_start);
    if times.is_empty() || times[0] > bump.t_start + tol || *times.last().unwrap() < bump.t_end - tol {
        return Err(crate::geometry::GeometryError::OutsideDomain(format!(
            "bump window [{}, {}] not covered by snapshots",
            bump.t_start, bump.t_end
        ))
        .into());
    }
    let region = SpatialCylinder::centered(bump.x3, bump.radius);
    let mut out = Vec::new();
    // The time integrands vanish at T1 because tau does.
    let (mut t_prev, mut d_prev, mut r_prev) = (bump.t_start, 0.0, 0.0);
    let (mut d_int, mut r_int) = (0.0, 0.0);
    for snap in &series.snapshots {
        if snap.time <= bump.t_start + tol || snap.time > bump.t_end + tol {
            continue;
        }
        let [e, d, r] = spatial_terms(&series.grid, snap, bump, &region)?;
        let dt = snap.time - t_prev;
        d_int += 0.5 * dt * (d + d_prev);
        r_int += 0.5 * dt * (r + r_prev);
        (t_prev, d_prev, r_prev) = (snap.time, d, r);
        let lhs = e + 2.0 * d_int;
        out.push(EnergySample { t: snap.time, lhs, rhs: r_int, residual: r_int - lhs });
    }
    if out.is_empty() {
        return Err(CriterionError::Contract("no snapshot inside the bump window".into()));
    }
    Ok(out)
}

/// Smallest `rhs - lhs` over the snapshot times of the window.
pub fn energy_inequality_residual(series: &SnapshotSeries, bump: &EnergyBump) -> Result<f64, CriterionError> {
    Ok(energy_inequality_trace(series, bump)?.iter().map(|s| s.residual).fold(f64::INFINITY, f64::min))
}
