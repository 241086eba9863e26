//! Named initial/boundary setups.

use std::sync::Arc;

use serde::{Deserialize, Serialize};

use super::exact::{ExactSolution, LambOseen, RigidRotation, ZeroFlow};
use super::FlowState;
use crate::geometry::CylGrid;

/// Serializable scenario selector.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "name", rename_all = "snake_case")]
pub enum ScenarioSpec {
    Zero,
    RigidRotation {
        #[serde(default = "one")]
        omega: f64,
    },
    LambOseen {
        #[serde(default = "two_pi")]
        circulation: f64,
        #[serde(default = "one")]
        t_shift: f64,
    },
}

fn one() -> f64 {
    1.0
}

fn two_pi() -> f64 {
    2.0 * std::f64::consts::PI
}

impl ScenarioSpec {
    pub fn name(&self) -> &'static str {
        match self {
            Self::Zero => "zero",
            Self::RigidRotation { .. } => "rigid_rotation",
            Self::LambOseen { .. } => "lamb_oseen",
        }
    }

    pub fn exact(&self) -> Arc<dyn ExactSolution> {
        match *self {
            Self::Zero => Arc::new(ZeroFlow),
            Self::RigidRotation { omega } => Arc::new(RigidRotation { omega }),
            Self::LambOseen { circulation, t_shift } => Arc::new(LambOseen { circulation, t_shift }),
        }
    }

    pub fn build(&self, grid: Arc<CylGrid>) -> Scenario {
        let exact = self.exact();
        let initial = FlowState::from_exact(grid, 0.0, exact.as_ref());
        Scenario { name: self.name().to_string(), initial, exact: Some(exact.clone()), boundary: Boundary::Exact(exact) }
    }
}

/// Outer-ring prescription. The axis conditions `v_rho = v_phi = sigma = 0`
/// are always imposed.
#[derive(Clone, Debug)]
pub enum Boundary {
    /// Dirichlet data from a closed-form solution.
    Exact(Arc<dyn ExactSolution>),
    NoSlip,
}

impl Boundary {
    /// Overwrites outer-ring and axis values of `s` at time `t`. Pressure is
    /// left alone.
    pub fn apply(&self, s: &mut FlowState, t: f64) {
        let g = s.grid.clone();
        let (n, nz) = (g.n_rho, g.n_z);
        let mut set = |i: usize, j: usize| {
            let (v, sig) = match self {
                Self::Exact(e) => {
                    let (r, z) = (g.rho(i), g.z(j));
                    (e.velocity(r, z, t), e.swirl(r, z, t))
                }
                Self::NoSlip => ([0.0; 3], 0.0),
            };
            s.v_rho[[i, j]] = v[0];
            s.v_phi[[i, j]] = v[1];
            s.v_3[[i, j]] = v[2];
            s.sigma[[i, j]] = sig;
        };
        for j in 0..=nz {
            set(n, j);
        }
        for i in 0..n {
            set(i, 0);
            set(i, nz);
        }
        s.v_rho.row_mut(0).fill(0.0);
        s.v_phi.row_mut(0).fill(0.0);
        s.sigma.row_mut(0).fill(0.0);
    }

    /// Pressure on the outer ring, if prescribed.
    pub fn pressure(&self, rho: f64, z: f64, t: f64) -> Option<f64> {
        match self {
            Self::Exact(e) => Some(e.pressure(rho, z, t)),
            Self::NoSlip => None,
        }
    }

    pub fn exact(&self) -> Option<&Arc<dyn ExactSolution>> {
        match self {
            Self::Exact(e) => Some(e),
            Self::NoSlip => None,
        }
    }
}

#[derive(Clone, Debug)]
pub struct Scenario {
    pub name: String,
    pub initial: FlowState,
    pub exact: Option<Arc<dyn ExactSolution>>,
    pub boundary: Boundary,
}

impl Scenario {
    /// A scenario without a closed-form evaluator, held by no-slip walls.
    pub fn custom(name: impl Into<String>, initial: FlowState) -> Self {
        Self { name: name.into(), initial, exact: None, boundary: Boundary::NoSlip }
    }

    pub fn grid(&self) -> &Arc<CylGrid> {
        &self.initial.grid
    }

    /// `sup |rho v_phi|` of the initial data.
    pub fn sigma0(&self) -> f64 {
        self.initial.sigma.iter().fold(0.0, |m: f64, v| m.max(v.abs()))
    }
}
