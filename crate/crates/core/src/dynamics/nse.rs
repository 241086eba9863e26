//! Momentum predictor and projection step.

use std::sync::Arc;

use ndarray::{Array2, Zip};

use super::projection::Projector;
use super::scenario::Boundary;
use super::swirl::swirl_rhs;
use super::{FlowState, SolverConfig, SolverError, VISCOSITY};
use crate::geometry::{d_rho_even, d_z, laplacian_at, CylGrid};

#[derive(Clone, Copy, Debug, Default, serde::Serialize, serde::Deserialize)]
pub struct StepReport {
    pub time: f64,
    pub dt: f64,
    pub max_speed: f64,
    pub divergence: f64,
    pub pressure_iters: usize,
    pub kinetic_energy: f64,
    pub sigma_max: f64,
}

/// `(1/2) int |v|^2 dx` by the nodal dual-cell rule.
pub fn kinetic_energy(s: &FlowState) -> f64 {
    let w = s.grid.cell_volumes();
    let mut e = 0.0;
    Zip::from(&w).and(&s.v_rho).and(&s.v_phi).and(&s.v_3).for_each(|w, a, b, c| {
        e += w * (a * a + b * b + c * c);
    });
    0.5 * e
}

/// Stateful stepper: keeps the projector's warm start between steps.
#[derive(Clone, Debug)]
pub struct NseSolver {
    grid: Arc<CylGrid>,
    cfg: SolverConfig,
    boundary: Boundary,
    projector: Projector,
}

impl NseSolver {
    pub fn new(grid: Arc<CylGrid>, cfg: SolverConfig, boundary: Boundary) -> Result<Self, SolverError> {
        cfg.validate()?;
        let projector = Projector::new(grid.clone());
        Ok(Self { grid, cfg, boundary, projector })
    }

    pub fn config(&self) -> &SolverConfig {
        &self.cfg
    }

    pub fn boundary(&self) -> &Boundary {
        &self.boundary
    }

    /// Discrete divergence of the state's velocity on pressure nodes.
    pub fn divergence(&self, s: &FlowState) -> f64 {
        let mut out = Array2::zeros(self.grid.shape());
        self.projector.divergence(&s.v_rho, &s.v_3, &mut out)
    }

    /// Advances `s` by one step of size `cfg.dt`, velocity, pressure and swirl.
    pub fn step(&mut self, s: &mut FlowState) -> Result<StepReport, SolverError> {
        let dt = self.cfg.dt;
        let speed = s.max_speed();
        let limit = self.cfg.dt_limit(&self.grid, speed);
        if dt > limit * (1.0 + 1e-12) {
            return Err(SolverError::StepSize { dt, limit, what: "momentum" });
        }
        let limit = self.cfg.dt_limit_swirl(&self.grid, speed);
        if dt > limit * (1.0 + 1e-12) {
            return Err(SolverError::StepSize { dt, limit, what: "swirl drift" });
        }
        let div_in = self.divergence(s);
        if div_in > self.cfg.pressure_tol {
            return Err(SolverError::NotSolenoidal { residual: div_in, tol: self.cfg.pressure_tol });
        }
        let t_next = s.time + dt;
        let shape = self.grid.shape();

        let mut k1 = [Array2::zeros(shape), Array2::zeros(shape), Array2::zeros(shape)];
        momentum_rhs(s, &mut k1);
        let mut stage = s.clone();
        stage.v_rho.scaled_add(dt, &k1[0]);
        stage.v_phi.scaled_add(dt, &k1[1]);
        stage.v_3.scaled_add(dt, &k1[2]);
        self.boundary.apply(&mut stage, t_next);
        let mut k2 = [Array2::zeros(shape), Array2::zeros(shape), Array2::zeros(shape)];
        momentum_rhs(&stage, &mut k2);

        let mut next = s.clone();
        next.time = t_next;
        for (v, (a, b)) in [&mut next.v_rho, &mut next.v_phi, &mut next.v_3].into_iter().zip(k1.iter().zip(&k2)) {
            v.scaled_add(0.5 * dt, a);
            v.scaled_add(0.5 * dt, b);
        }
        self.boundary.apply(&mut next, t_next);
        let rep = self
            .projector
            .project(&mut next.v_rho, &mut next.v_3, &mut next.q, dt, self.cfg.pressure_tol, self.cfg.max_pressure_iters)?;
        self.fill_boundary_pressure(&mut next.q, t_next);

        // Swirl: Heun with the time-centred velocity.
        let v_rho_mid = (&s.v_rho + &next.v_rho) * 0.5;
        let v_3_mid = (&s.v_3 + &next.v_3) * 0.5;
        let mut ks1 = Array2::zeros(shape);
        swirl_rhs(&self.grid, &s.sigma, &v_rho_mid, &v_3_mid, &mut ks1);
        let mut sig1 = next.sigma.clone();
        copy_interior(&self.grid, &(&s.sigma + &(dt * &ks1)), &mut sig1);
        let mut ks2 = Array2::zeros(shape);
        swirl_rhs(&self.grid, &sig1, &v_rho_mid, &v_3_mid, &mut ks2);
        let sig = &s.sigma + &((0.5 * dt) * (&ks1 + &ks2));
        copy_interior(&self.grid, &sig, &mut next.sigma);

        *s = next;
        Ok(StepReport {
            time: s.time,
            dt,
            max_speed: s.max_speed(),
            divergence: rep.divergence,
            pressure_iters: rep.iterations,
            kinetic_energy: kinetic_energy(s),
            sigma_max: s.sigma.iter().fold(0.0, |m: f64, v| m.max(v.abs())),
        })
    }

    fn fill_boundary_pressure(&self, q: &mut Array2<f64>, t: f64) {
        let g = &*self.grid;
        let (n, nz) = (g.n_rho, g.n_z);
        if self.boundary.exact().is_some() {
            for j in 0..=nz {
                q[[n, j]] = self.boundary.pressure(g.rho(n), g.z(j), t).unwrap_or(0.0);
            }
            for i in 0..n {
                q[[i, 0]] = self.boundary.pressure(g.rho(i), g.z(0), t).unwrap_or(0.0);
                q[[i, nz]] = self.boundary.pressure(g.rho(i), g.z(nz), t).unwrap_or(0.0);
            }
            return;
        }
        let extrap = |a: f64, b: f64, c: f64| 3.0 * a - 3.0 * b + c;
        for i in 0..n {
            q[[i, 0]] = extrap(q[[i, 1]], q[[i, 2]], q[[i, 3]]);
            q[[i, nz]] = extrap(q[[i, nz - 1]], q[[i, nz - 2]], q[[i, nz - 3]]);
        }
        for j in 0..=nz {
            q[[n, j]] = extrap(q[[n - 1, j]], q[[n - 2, j]], q[[n - 3, j]]);
        }
    }
}

fn copy_interior(g: &CylGrid, src: &Array2<f64>, dst: &mut Array2<f64>) {
    for i in 1..g.n_rho {
        for j in 1..g.n_z {
            dst[[i, j]] = src[[i, j]];
        }
    }
}

/// Right-hand side of the momentum equations on free nodes; zero elsewhere.
fn momentum_rhs(s: &FlowState, out: &mut [Array2<f64>; 3]) {
    let g = &*s.grid;
    let (n, nz) = (g.n_rho, g.n_z);
    for o in out.iter_mut() {
        o.fill(0.0);
    }
    let (vr, vp, v3, q) = (&s.v_rho, &s.v_phi, &s.v_3, &s.q);
    for j in 1..nz {
        // axis: only v_3 evolves
        let adv = v3[[0, j]] * d_z(v3, g, 0, j);
        out[2][[0, j]] = -adv - d_z(q, g, 0, j) + VISCOSITY * laplacian_at(v3, g, 0, j);
        for i in 1..n {
            let r = g.rho(i);
            let (a, w) = (vr[[i, j]], v3[[i, j]]);
            let adv = |f: &Array2<f64>| a * d_rho_even(f, g, i, j) + w * d_z(f, g, i, j);
            let p = vp[[i, j]];
            out[0][[i, j]] = -adv(vr) + p * p / r - d_rho_even(q, g, i, j)
                + VISCOSITY * (laplacian_at(vr, g, i, j) - a / (r * r));
            out[1][[i, j]] = -adv(vp) - a * p / r + VISCOSITY * (laplacian_at(vp, g, i, j) - p / (r * r));
            out[2][[i, j]] = -adv(v3) - d_z(q, g, i, j) + VISCOSITY * laplacian_at(v3, g, i, j);
        }
    }
}

/// One step from `state` with a fresh solver. Prefer [`NseSolver`] for runs.
pub fn step_nse(state: &FlowState, cfg: &SolverConfig, boundary: &Boundary) -> Result<(FlowState, StepReport), SolverError> {
    let mut solver = NseSolver::new(state.grid.clone(), cfg.clone(), boundary.clone())?;
    let mut next = state.clone();
    let rep = solver.step(&mut next)?;
    Ok((next, rep))
}
