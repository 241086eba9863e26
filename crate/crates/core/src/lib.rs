//! Numerical laboratory for axisymmetric incompressible Navier-Stokes flow.
//!
//! * [`geometry`]: grids, parabolic cylinders, fields, quadrature, snapshot files.
//! * [`dynamics`]: explicit projection solver and the swirl equation with
//!   its singular drift `2 x'/|x'|^2`, plus exact scenarios.
//! * [`criterion`]: the scale-invariant quantities `f`, `M`, the gauge `g`
//!   and the local energy inequality.
//! * [`oscillation`]: oscillation of the swirl over nested cylinders and
//!   its decay law.
//! * [`moser`]: constants of the Moser/De Giorgi chain and a harness that
//!   checks the level-set lemmas on solved fields.

pub mod criterion;
pub mod dynamics;
pub mod geometry;
pub mod moser;
pub mod oscillation;
pub mod tolerances;

pub use geometry::{AxisPoint, CylGrid, Field, FieldKind, ParabolicCylinder, Snapshot, SnapshotSeries};
