use std::sync::Arc;

use ndarray::Array2;
use serde::{Deserialize, Serialize};

use super::{CylGrid, GeometryError};

/// What a nodal array represents. The axis conditions depend on it.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum FieldKind {
    VRho,
    VPhi,
    V3,
    Pressure,
    Swirl,
    Scalar,
}

impl FieldKind {
    pub const ALL: [FieldKind; 6] = [
        FieldKind::VRho,
        FieldKind::VPhi,
        FieldKind::V3,
        FieldKind::Pressure,
        FieldKind::Swirl,
        FieldKind::Scalar,
    ];

    pub fn code(self) -> u8 {
        match self {
            FieldKind::VRho => 0,
            FieldKind::VPhi => 1,
            FieldKind::V3 => 2,
            FieldKind::Pressure => 3,
            FieldKind::Swirl => 4,
            FieldKind::Scalar => 5,
        }
    }

    pub fn from_code(code: u8) -> Option<Self> {
        Self::ALL.into_iter().find(|k| k.code() == code)
    }

    pub fn name(self) -> &'static str {
        match self {
            FieldKind::VRho => "v_rho",
            FieldKind::VPhi => "v_phi",
            FieldKind::V3 => "v_3",
            FieldKind::Pressure => "pressure",
            FieldKind::Swirl => "swirl",
            FieldKind::Scalar => "scalar",
        }
    }

    /// Kinds that vanish on the axis: `v_rho`, `v_phi` and `sigma = rho v_phi`.
    pub fn vanishes_on_axis(self) -> bool {
        matches!(self, FieldKind::VRho | FieldKind::VPhi | FieldKind::Swirl)
    }

    /// Scalars in the axisymmetric sense (even in rho), which the scalar
    /// Laplacian and gradient accept.
    pub fn is_scalar_like(self) -> bool {
        matches!(
            self,
            FieldKind::V3 | FieldKind::Pressure | FieldKind::Swirl | FieldKind::Scalar
        )
    }
}

/// Nodal samples of one quantity on a grid at one time level.
#[derive(Clone, Debug)]
pub struct Field {
    grid: Arc<CylGrid>,
    kind: FieldKind,
    time: f64,
    values: Array2<f64>,
}

impl Field {
    pub fn new(grid: Arc<CylGrid>, kind: FieldKind, time: f64, values: Array2<f64>) -> Result<Self, GeometryError> {
        if values.dim() != grid.shape() {
            return Err(GeometryError::ShapeMismatch {
                expected: grid.shape(),
                found: values.dim(),
            });
        }
        Ok(Self { grid, kind, time, values })
    }

    pub fn zeros(grid: Arc<CylGrid>, kind: FieldKind, time: f64) -> Self {
        let values = Array2::zeros(grid.shape());
        Self { grid, kind, time, values }
    }

    /// Samples `f(rho, z)` at every node.
    pub fn from_fn(grid: Arc<CylGrid>, kind: FieldKind, time: f64, f: impl Fn(f64, f64) -> f64) -> Self {
        let values = Array2::from_shape_fn(grid.shape(), |(i, j)| f(grid.rho(i), grid.z(j)));
        Self { grid, kind, time, values }
    }

    pub fn grid(&self) -> &Arc<CylGrid> {
        &self.grid
    }

    pub fn kind(&self) -> FieldKind {
        self.kind
    }

    pub fn time(&self) -> f64 {
        self.time
    }

    pub fn values(&self) -> &Array2<f64> {
        &self.values
    }

    pub fn values_mut(&mut self) -> &mut Array2<f64> {
        &mut self.values
    }

    pub fn into_values(self) -> Array2<f64> {
        self.values
    }

    pub fn with_kind(mut self, kind: FieldKind) -> Self {
        self.kind = kind;
        self
    }

    /// Largest violation of the axis condition for this kind. For `v_3`
    /// and scalars this is the one-sided estimate of `|d_rho f|` on the axis.
    pub fn axis_violation(&self) -> f64 {
        let nz = self.grid.n_z + 1;
        let h = self.grid.h_rho;
        (0..nz)
            .map(|j| {
                if self.kind.vanishes_on_axis() {
                    self.values[[0, j]].abs()
                } else {
                    let (f0, f1, f2) = (self.values[[0, j]], self.values[[1, j]], self.values[[2, j]]);
                    ((-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h)).abs()
                }
            })
            .fold(0.0, f64::max)
    }

    /// Zeroes the axis row for kinds that vanish there.
    pub fn enforce_axis(&mut self) {
        if self.kind.vanishes_on_axis() {
            self.values.row_mut(0).fill(0.0);
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    pub fn scaled(&self, factor: f64) -> Self {
        Self {
            grid: self.grid.clone(),
            kind: self.kind,
            time: self.time,
            values: &self.values * factor,
        }
    }
}
