//! Cylindrical grids, parabolic cylinders, nodal fields and the discrete
//! calculus and quadrature built on them.

mod calculus;
mod cylinder;
mod field;
mod grid;
mod quadrature;
mod snapshot;

pub use calculus::{cyl_gradient, cyl_laplacian, d_rho_even, d_rho_odd, d_z, d_zz, divergence, laplacian_at};
pub use cylinder::{cyl_volume, AnnularCylinder, AxisPoint, ParabolicCylinder, SpatialCylinder};
pub use field::{Field, FieldKind};
pub use grid::CylGrid;
pub use quadrature::{check_margin, integrate_lp, spatial_weights, time_weights, times_in, SpatialWeights};
pub use snapshot::{
    decode_snapshot, encode_snapshot, read_snapshot, write_snapshot, Sidecar, SidecarEntry, Snapshot, SnapshotSeries,
    SIDECAR,
};

#[derive(Debug, thiserror::Error)]
pub enum GeometryError {
    #[error("invalid grid: {0}")]
    InvalidGrid(String),
    #[error("invalid region: {0}")]
    InvalidRegion(String),
    #[error("array shape {found:?} does not match grid shape {expected:?}")]
    ShapeMismatch { expected: (usize, usize), found: (usize, usize) },
    #[error("{op} cannot act on a {found:?} field")]
    KindMismatch { op: &'static str, found: FieldKind },
    #[error("outside the sampled domain: {0}")]
    OutsideDomain(String),
    #[error("snapshot at t={time} has no {kind:?} field")]
    MissingField { kind: FieldKind, time: f64 },
    #[error("malformed snapshot: {0}")]
    Format(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
