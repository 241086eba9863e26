//! Second-order finite differences in axisymmetric cylindrical coordinates.
//!
//! Interior nodes use centred stencils. On the axis the even extension
//! `f(-h) = f(h)` gives `d_rho f = 0` and `Delta f = 4 (f_1 - f_0)/h^2 + d_zz f`,
//! the L'Hopital limit `2 d_rho^2 f + d_zz f`. Outer boundary nodes use
//! one-sided second-order stencils. Nothing divides by `rho` on the axis.

use ndarray::Array2;

use super::{CylGrid, Field, FieldKind, GeometryError};

#[inline]
fn d1_one_sided(f0: f64, f1: f64, f2: f64, h: f64) -> f64 {
    (-3.0 * f0 + 4.0 * f1 - f2) / (2.0 * h)
}

#[inline]
fn d2_one_sided(f0: f64, f1: f64, f2: f64, f3: f64, h: f64) -> f64 {
    (2.0 * f0 - 5.0 * f1 + 4.0 * f2 - f3) / (h * h)
}

/// `d_rho f` at node `(i, j)` for an even-in-rho field.
pub fn d_rho_even(f: &Array2<f64>, g: &CylGrid, i: usize, j: usize) -> f64 {
    let h = g.h_rho;
    let n = g.n_rho;
    if i == 0 {
        0.0
    } else if i == n {
        -d1_one_sided(f[[n, j]], f[[n - 1, j]], f[[n - 2, j]], h)
    } else {
        (f[[i + 1, j]] - f[[i - 1, j]]) / (2.0 * h)
    }
}

/// `d_rho f` for a field odd in rho (`v_rho`, `v_phi`): on the axis the odd
/// extension gives `f_1 / h`.
pub fn d_rho_odd(f: &Array2<f64>, g: &CylGrid, i: usize, j: usize) -> f64 {
    if i == 0 {
        f[[1, j]] / g.h_rho
    } else {
        d_rho_even(f, g, i, j)
    }
}

pub fn d_z(f: &Array2<f64>, g: &CylGrid, i: usize, j: usize) -> f64 {
    let h = g.h_z;
    let n = g.n_z;
    if j == 0 {
        d1_one_sided(f[[i, 0]], f[[i, 1]], f[[i, 2]], h)
    } else if j == n {
        -d1_one_sided(f[[i, n]], f[[i, n - 1]], f[[i, n - 2]], h)
    } else {
        (f[[i, j + 1]] - f[[i, j - 1]]) / (2.0 * h)
    }
}

pub fn d_zz(f: &Array2<f64>, g: &CylGrid, i: usize, j: usize) -> f64 {
    let h = g.h_z;
    let n = g.n_z;
    if j == 0 {
        d2_one_sided(f[[i, 0]], f[[i, 1]], f[[i, 2]], f[[i, 3]], h)
    } else if j == n {
        d2_one_sided(f[[i, n]], f[[i, n - 1]], f[[i, n - 2]], f[[i, n - 3]], h)
    } else {
        (f[[i, j + 1]] - 2.0 * f[[i, j]] + f[[i, j - 1]]) / (h * h)
    }
}

/// Axisymmetric scalar Laplacian `f_rr + f_r / rho + f_zz` at one node.
pub fn laplacian_at(f: &Array2<f64>, g: &CylGrid, i: usize, j: usize) -> f64 {
    let h = g.h_rho;
    let n = g.n_rho;
    let radial = if i == 0 {
        4.0 * (f[[1, j]] - f[[0, j]]) / (h * h)
    } else if i == n {
        d2_one_sided(f[[n, j]], f[[n - 1, j]], f[[n - 2, j]], f[[n - 3, j]], h) + d_rho_even(f, g, n, j) / g.rho(n)
    } else {
        (f[[i + 1, j]] - 2.0 * f[[i, j]] + f[[i - 1, j]]) / (h * h) + (f[[i + 1, j]] - f[[i - 1, j]]) / (2.0 * h * g.rho(i))
    };
    radial + d_zz(f, g, i, j)
}

fn require_scalar(f: &Field) -> Result<(), GeometryError> {
    if f.kind().is_scalar_like() {
        Ok(())
    } else {
        Err(GeometryError::KindMismatch {
            op: "scalar operator",
            found: f.kind(),
        })
    }
}

/// `Delta f = d_rr f + (1/rho) d_r f + d_zz f`.
pub fn cyl_laplacian(f: &Field) -> Result<Field, GeometryError> {
    require_scalar(f)?;
    let g = f.grid().clone();
    let v = f.values();
    let out = Array2::from_shape_fn(g.shape(), |(i, j)| laplacian_at(v, &g, i, j));
    Field::new(g, FieldKind::Scalar, f.time(), out)
}

/// `(d_rho f, d_z f)`.
pub fn cyl_gradient(f: &Field) -> Result<(Field, Field), GeometryError> {
    require_scalar(f)?;
    let g = f.grid().clone();
    let v = f.values();
    let dr = Array2::from_shape_fn(g.shape(), |(i, j)| d_rho_even(v, &g, i, j));
    let dz = Array2::from_shape_fn(g.shape(), |(i, j)| d_z(v, &g, i, j));
    Ok((
        Field::new(g.clone(), FieldKind::VRho, f.time(), dr)?,
        Field::new(g, FieldKind::V3, f.time(), dz)?,
    ))
}

/// Nodal divergence `d_rho v_rho + v_rho / rho + d_z v_3`; on the axis
/// `2 d_rho v_rho + d_z v_3`.
pub fn divergence(v_rho: &Field, v_3: &Field) -> Result<Field, GeometryError> {
    if v_rho.kind() != FieldKind::VRho {
        return Err(GeometryError::KindMismatch { op: "divergence (radial)", found: v_rho.kind() });
    }
    if v_3.kind() != FieldKind::V3 {
        return Err(GeometryError::KindMismatch { op: "divergence (axial)", found: v_3.kind() });
    }
    if !v_rho.grid().same_space(v_3.grid()) {
        return Err(GeometryError::ShapeMismatch { expected: v_rho.grid().shape(), found: v_3.grid().shape() });
    }
    let g = v_rho.grid().clone();
    let (ur, uz) = (v_rho.values(), v_3.values());
    let out = Array2::from_shape_fn(g.shape(), |(i, j)| {
        let radial = if i == 0 {
            2.0 * d_rho_odd(ur, &g, 0, j)
        } else {
            d_rho_even(ur, &g, i, j) + ur[[i, j]] / g.rho(i)
        };
        radial + d_z(uz, &g, i, j)
    });
    Field::new(g, FieldKind::Scalar, v_rho.time(), out)
}
