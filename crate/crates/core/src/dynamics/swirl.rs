//! The swirl equation `d_t sigma + (v_rho + 2/rho) d_rho sigma + v_3 d_z sigma - Delta sigma = 0`.
//!
//! Only off-axis interior nodes evolve. The first off-axis row reads the
//! axis value `sigma = 0` through its centred stencil; the drift `2/rho` is
//! never formed at `rho = 0`. Under the step limit the update is a convex
//! combination of neighbours, so the discrete maximum principle holds.

use ndarray::Array2;

use super::{SolverConfig, SolverError};
use crate::geometry::{CylGrid, Field, FieldKind, GeometryError};

/// `-(v_rho + 2/rho) d_rho sigma - v_3 d_z sigma + Delta sigma` on
/// `1 <= i < n_rho`, `1 <= j < n_z`; zero elsewhere.
pub(crate) fn swirl_rhs(g: &CylGrid, sigma: &Array2<f64>, v_rho: &Array2<f64>, v_3: &Array2<f64>, out: &mut Array2<f64>) {
    let (hr, hz) = (g.h_rho, g.h_z);
    out.fill(0.0);
    for i in 1..g.n_rho {
        let r = g.rho(i);
        for j in 1..g.n_z {
            let s = sigma[[i, j]];
            let (sm, sp) = (sigma[[i - 1, j]], sigma[[i + 1, j]]);
            let (zm, zp) = (sigma[[i, j - 1]], sigma[[i, j + 1]]);
            let ds_r = (sp - sm) / (2.0 * hr);
            let ds_z = (zp - zm) / (2.0 * hz);
            let lap = (sp - 2.0 * s + sm) / (hr * hr) + ds_r / r + (zp - 2.0 * s + zm) / (hz * hz);
            out[[i, j]] = lap - (v_rho[[i, j]] + 2.0 / r) * ds_r - v_3[[i, j]] * ds_z;
        }
    }
}

fn transport_speed(v_rho: &Array2<f64>, v_3: &Array2<f64>) -> f64 {
    let mut m: f64 = 0.0;
    ndarray::Zip::from(v_rho).and(v_3).for_each(|a, b| m = m.max(a.hypot(*b)));
    m
}

fn check_axis(sigma: &Field) -> Result<(), SolverError> {
    let v = sigma.axis_violation();
    if v > 0.0 {
        return Err(SolverError::AxisCondition { kind: FieldKind::Swirl, value: v });
    }
    Ok(())
}

/// Advances `sigma` by `cfg.dt` with Heun's method, holding the outer-ring
/// values and the axis value fixed.
pub fn step_swirl(sigma: &Field, v_rho: &Field, v_3: &Field, cfg: &SolverConfig) -> Result<Field, SolverError> {
    if sigma.kind() != FieldKind::Swirl {
        return Err(GeometryError::KindMismatch { op: "step_swirl", found: sigma.kind() }.into());
    }
    check_axis(sigma)?;
    let g = sigma.grid().clone();
    for f in [v_rho, v_3] {
        if !f.grid().same_space(&g) {
            return Err(GeometryError::ShapeMismatch { expected: g.shape(), found: f.grid().shape() }.into());
        }
    }
    let (vr, v3) = (v_rho.values(), v_3.values());
    let limit = cfg.dt_limit_swirl(&g, transport_speed(vr, v3));
    if cfg.dt > limit * (1.0 + 1e-12) {
        return Err(SolverError::StepSize { dt: cfg.dt, limit, what: "swirl drift" });
    }
    let dt = cfg.dt;
    let s0 = sigma.values();
    let mut k1 = Array2::zeros(g.shape());
    swirl_rhs(&g, s0, vr, v3, &mut k1);
    let s1 = s0 + &(dt * &k1);
    let mut k2 = Array2::zeros(g.shape());
    swirl_rhs(&g, &s1, vr, v3, &mut k2);
    let next = s0 + &((0.5 * dt) * (&k1 + &k2));
    Ok(Field::new(g, FieldKind::Swirl, sigma.time() + dt, next)?)
}

/// `max |d_t sigma + (v_rho + 2/rho) d_rho sigma + v_3 d_z sigma - Delta sigma|`
/// over off-axis interior nodes, with the time derivative supplied
/// (zero for steady data).
pub fn swirl_residual(g: &CylGrid, sigma: &Array2<f64>, dsigma_dt: Option<&Array2<f64>>, v_rho: &Array2<f64>, v_3: &Array2<f64>) -> f64 {
    let mut f = Array2::zeros(g.shape());
    swirl_rhs(g, sigma, v_rho, v_3, &mut f);
    let mut m: f64 = 0.0;
    for i in 1..g.n_rho {
        for j in 1..g.n_z {
            let dt = dsigma_dt.map_or(0.0, |d| d[[i, j]]);
            m = m.max((dt - f[[i, j]]).abs());
        }
    }
    m
}

/// `sigma = rho v_phi` nodewise.
pub fn sigma_from_vphi(v_phi: &Field) -> Result<Field, GeometryError> {
    if v_phi.kind() != FieldKind::VPhi {
        return Err(GeometryError::KindMismatch { op: "sigma_from_vphi", found: v_phi.kind() });
    }
    let g = v_phi.grid().clone();
    let vals = Array2::from_shape_fn(g.shape(), |(i, j)| g.rho(i) * v_phi.values()[[i, j]]);
    Field::new(g, FieldKind::Swirl, v_phi.time(), vals)
}

/// `v_phi = sigma / rho` off the axis, zero on it.
pub fn vphi_from_sigma(sigma: &Field) -> Result<Field, GeometryError> {
    if sigma.kind() != FieldKind::Swirl {
        return Err(GeometryError::KindMismatch { op: "vphi_from_sigma", found: sigma.kind() });
    }
    let g = sigma.grid().clone();
    let vals = Array2::from_shape_fn(g.shape(), |(i, j)| if i == 0 { 0.0 } else { sigma.values()[[i, j]] / g.rho(i) });
    Field::new(g, FieldKind::VPhi, sigma.time(), vals)
}

/// `max |sigma - rho v_phi|`: agreement between the evolved swirl and the
/// swirl implied by the evolved azimuthal velocity.
pub fn swirl_consistency(v_phi: &Field, sigma: &Field) -> Result<f64, GeometryError> {
    let implied = sigma_from_vphi(v_phi)?;
    if sigma.kind() != FieldKind::Swirl {
        return Err(GeometryError::KindMismatch { op: "swirl_consistency", found: sigma.kind() });
    }
    Ok((implied.values() - sigma.values()).iter().fold(0.0, |m: f64, v| m.max(v.abs())))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::dynamics::{ExactSolution, LambOseen};
    use std::sync::Arc;

    #[test]
    fn rho_squared_is_steady_to_round_off() {
        let g = Arc::new(CylGrid::cylinder(1.0, 64, 64).unwrap());
        let sigma = Array2::from_shape_fn(g.shape(), |(i, _)| g.rho(i).powi(2));
        let z = Array2::zeros(g.shape());
        assert!(swirl_residual(&g, &sigma, None, &z, &z) < 1e-9);
    }

    #[test]
    fn lamb_oseen_residual_is_second_order() {
        let lo = LambOseen { circulation: 2.0 * std::f64::consts::PI, t_shift: 1.0 };
        let res = |n: usize| {
            let g = CylGrid::new(4.0, -0.5, 0.5, n, 8).unwrap();
            let s = Array2::from_shape_fn(g.shape(), |(i, _)| lo.swirl(g.rho(i), 0.0, 0.0));
            // d_t sigma = -a s e^{-s} / t~ with s = rho^2/(4 t~), t~ = 1.
            let ds = Array2::from_shape_fn(g.shape(), |(i, _)| {
                let x = g.rho(i).powi(2) / 4.0;
                -lo.amplitude() * x * (-x).exp()
            });
            let z = Array2::zeros(g.shape());
            swirl_residual(&g, &s, Some(&ds), &z, &z)
        };
        let (a, b, c) = (res(32), res(64), res(128));
        let p1 = (a / b).log2();
        let p2 = (b / c).log2();
        assert!((1.9..=2.1).contains(&p1) && (1.9..=2.1).contains(&p2), "{p1} {p2}");
    }

    #[test]
    fn round_trip_off_axis() {
        let g = Arc::new(CylGrid::cylinder(1.0, 16, 8).unwrap());
        let vp = Field::from_fn(g.clone(), FieldKind::VPhi, 0.0, |r, z| r * (1.0 + z * z));
        let s = sigma_from_vphi(&vp).unwrap();
        let back = vphi_from_sigma(&s).unwrap();
        for i in 1..=g.n_rho {
            for j in 0..=g.n_z {
                assert!((back.values()[[i, j]] - vp.values()[[i, j]]).abs() < 1e-15);
            }
        }
        assert!(swirl_consistency(&vp, &s).unwrap() == 0.0);
    }

    #[test]
    fn nonzero_axis_is_rejected() {
        let g = Arc::new(CylGrid::cylinder(1.0, 16, 8).unwrap());
        let s = Field::from_fn(g.clone(), FieldKind::Swirl, 0.0, |_, _| 1.0);
        let z = Field::zeros(g.clone(), FieldKind::VRho, 0.0);
        let w = Field::zeros(g, FieldKind::V3, 0.0);
        let cfg = SolverConfig { dt: 1e-5, ..Default::default() };
        assert!(matches!(step_swirl(&s, &z, &w, &cfg), Err(SolverError::AxisCondition { .. })));
    }
}
