//! Explicit time integration of the axisymmetric Navier-Stokes system and of
//! the swirl equation `d_t sigma + (v + 2 x'/|x'|^2) . grad sigma - Delta sigma = 0`.
//!
//! Viscosity is fixed to one. The momentum predictor is Heun's RK2 on the
//! collocated grid; the projection solves the discrete `div grad` system
//! exactly (to `pressure_tol`) with preconditioned conjugate gradients.

mod exact;
mod nse;
mod projection;
mod run;
mod scenario;
mod swirl;

use std::sync::Arc;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use crate::geometry::{CylGrid, FieldKind, GeometryError, Snapshot};

pub use exact::{e1_difference, ExactSolution, LambOseen, RigidRotation, ZeroFlow};
pub use nse::{kinetic_energy, step_nse, NseSolver, StepReport};
pub use projection::Projector;
pub use run::{run_scenario, RunOutput, StepStats};
pub use scenario::{Boundary, Scenario, ScenarioSpec};
pub use swirl::{sigma_from_vphi, step_swirl, swirl_consistency, swirl_residual, vphi_from_sigma};

/// Kinematic viscosity, fixed by the normalisation of the equations.
pub const VISCOSITY: f64 = 1.0;

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SolverConfig {
    pub dt: f64,
    pub t_end: f64,
    pub cfl_safety: f64,
    pub pressure_tol: f64,
    pub max_pressure_iters: usize,
}

impl Default for SolverConfig {
    fn default() -> Self {
        Self { dt: 1e-4, t_end: 0.1, cfl_safety: 1.0, pressure_tol: 1e-10, max_pressure_iters: 20_000 }
    }
}

impl SolverConfig {
    /// Largest admissible step, `cfl_safety * min(h^2/4, h/max|v|)`.
    pub fn dt_limit(&self, grid: &CylGrid, max_speed: f64) -> f64 {
        let h = grid.h_min();
        let diffusive = h * h / 4.0;
        let advective = if max_speed > 0.0 { h / max_speed } else { f64::INFINITY };
        self.cfl_safety * diffusive.min(advective)
    }

    /// As [`Self::dt_limit`], with the singular drift `2/rho` evaluated at
    /// the first off-axis node added to the transport speed.
    pub fn dt_limit_swirl(&self, grid: &CylGrid, max_speed: f64) -> f64 {
        let h = grid.h_min();
        let drift = max_speed + 2.0 / grid.h_rho;
        self.cfl_safety * (h * h / 4.0).min(h / drift)
    }

    /// Steps needed to reach `t_end`.
    pub fn n_steps(&self) -> usize {
        (self.t_end / self.dt).round() as usize
    }

    pub fn validate(&self) -> Result<(), SolverError> {
        if !(self.dt > 0.0) || !(self.t_end >= 0.0) || !(self.cfl_safety > 0.0 && self.cfl_safety <= 1.0) || !(self.pressure_tol > 0.0) {
            return Err(SolverError::Config(format!("{self:?}")));
        }
        Ok(())
    }
}

#[derive(Debug, thiserror::Error)]
pub enum SolverError {
    #[error("invalid solver configuration: {0}")]
    Config(String),
    #[error("time step {dt} exceeds the stability limit {limit} ({what})")]
    StepSize { dt: f64, limit: f64, what: &'static str },
    #[error("pressure solve did not converge in {iters} iterations (divergence residual {residual:e})")]
    PressureSolve { iters: usize, residual: f64 },
    #[error("input velocity is not solenoidal: divergence {residual:e} > tolerance {tol:e}")]
    NotSolenoidal { residual: f64, tol: f64 },
    #[error("axis condition violated for {kind:?}: {value:e}")]
    AxisCondition { kind: FieldKind, value: f64 },
    #[error("at step {step}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<SolverError>,
    },
    #[error(transparent)]
    Geometry(#[from] GeometryError),
}

/// Velocity, pressure and swirl at one time level.
#[derive(Clone, Debug)]
pub struct FlowState {
    pub grid: Arc<CylGrid>,
    pub time: f64,
    pub v_rho: Array2<f64>,
    pub v_phi: Array2<f64>,
    pub v_3: Array2<f64>,
    pub q: Array2<f64>,
    pub sigma: Array2<f64>,
}

impl FlowState {
    pub fn zeros(grid: Arc<CylGrid>, time: f64) -> Self {
        let z = Array2::zeros(grid.shape());
        Self { grid, time, v_rho: z.clone(), v_phi: z.clone(), v_3: z.clone(), q: z.clone(), sigma: z }
    }

    /// Samples an exact solution at every node.
    pub fn from_exact(grid: Arc<CylGrid>, time: f64, exact: &dyn ExactSolution) -> Self {
        let mut s = Self::zeros(grid.clone(), time);
        for i in 0..=grid.n_rho {
            for j in 0..=grid.n_z {
                let (r, z) = (grid.rho(i), grid.z(j));
                let v = exact.velocity(r, z, time);
                s.v_rho[[i, j]] = v[0];
                s.v_phi[[i, j]] = v[1];
                s.v_3[[i, j]] = v[2];
                s.q[[i, j]] = exact.pressure(r, z, time);
                s.sigma[[i, j]] = exact.swirl(r, z, time);
            }
        }
        s.v_rho.row_mut(0).fill(0.0);
        s.v_phi.row_mut(0).fill(0.0);
        s.sigma.row_mut(0).fill(0.0);
        s
    }

    pub fn max_speed(&self) -> f64 {
        let mut m: f64 = 0.0;
        ndarray::Zip::from(&self.v_rho).and(&self.v_phi).and(&self.v_3).for_each(|a, b, c| {
            m = m.max((a * a + b * b + c * c).sqrt());
        });
        m
    }

    pub fn to_snapshot(&self) -> Snapshot {
        Snapshot::new(self.time)
            .with(FieldKind::VRho, self.v_rho.clone())
            .with(FieldKind::VPhi, self.v_phi.clone())
            .with(FieldKind::V3, self.v_3.clone())
            .with(FieldKind::Pressure, self.q.clone())
            .with(FieldKind::Swirl, self.sigma.clone())
    }

    pub fn from_snapshot(grid: Arc<CylGrid>, snap: &Snapshot) -> Result<Self, GeometryError> {
        Ok(Self {
            grid,
            time: snap.time,
            v_rho: snap.require(FieldKind::VRho)?.clone(),
            v_phi: snap.require(FieldKind::VPhi)?.clone(),
            v_3: snap.require(FieldKind::V3)?.clone(),
            q: snap.require(FieldKind::Pressure)?.clone(),
            sigma: snap.require(FieldKind::Swirl)?.clone(),
        })
    }
}
