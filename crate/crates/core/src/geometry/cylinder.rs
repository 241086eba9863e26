use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::GeometryError;

/// A space-time point `(0, 0, x3, t)` on the symmetry axis.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AxisPoint {
    pub x3: f64,
    pub t: f64,
}

impl AxisPoint {
    pub fn new(x3: f64, t: f64) -> Self {
        Self { x3, t }
    }
}

/// `Q^{lambda,mu}(z0, r) = C(x0, lambda r) x ]t0 - mu r^2, t0[` with `x0` on the axis.
///
/// The spatial part is the finite cylinder `|x'| < lambda r`, `|x3 - x03| < lambda r`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ParabolicCylinder {
    pub center: AxisPoint,
    pub radius: f64,
    pub lambda: f64,
    pub mu: f64,
}

impl ParabolicCylinder {
    pub fn new(center: AxisPoint, radius: f64, lambda: f64, mu: f64) -> Result<Self, GeometryError> {
        if !(radius >= 0.0) || !(lambda > 0.0) || !(mu > 0.0) {
            return Err(GeometryError::InvalidRegion(format!(
                "r={radius}, lambda={lambda}, mu={mu}"
            )));
        }
        Ok(Self { center, radius, lambda, mu })
    }

    /// The standard cylinder `Q(z0, r) = Q^{1,1}(z0, r)`.
    pub fn standard(center: AxisPoint, radius: f64) -> Result<Self, GeometryError> {
        Self::new(center, radius, 1.0, 1.0)
    }

    /// Radius (and half-height) of the spatial part.
    pub fn spatial_radius(&self) -> f64 {
        self.lambda * self.radius
    }

    pub fn t_start(&self) -> f64 {
        self.center.t - self.mu * self.radius * self.radius
    }

    pub fn t_end(&self) -> f64 {
        self.center.t
    }

    pub fn duration(&self) -> f64 {
        self.mu * self.radius * self.radius
    }

    pub fn spatial(&self) -> SpatialCylinder {
        SpatialCylinder {
            x3: self.center.x3,
            radius: self.spatial_radius(),
            half_height: self.spatial_radius(),
        }
    }

    /// `|C(x0, lambda r)|`.
    pub fn volume(&self) -> f64 {
        self.spatial().volume()
    }

    /// `|Q^{lambda,mu}(r)|`, the space-time measure.
    pub fn measure(&self) -> f64 {
        self.volume() * self.duration()
    }

    pub fn contains(&self, rho: f64, x3: f64, t: f64) -> bool {
        self.spatial().contains(rho, x3) && t > self.t_start() && t < self.t_end()
    }
}

/// Spatial cylinder `|x'| < radius`, `|x3 - x03| < half_height`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SpatialCylinder {
    pub x3: f64,
    pub radius: f64,
    pub half_height: f64,
}

impl SpatialCylinder {
    pub fn centered(x3: f64, radius: f64) -> Self {
        Self { x3, radius, half_height: radius }
    }

    pub fn volume(&self) -> f64 {
        PI * self.radius * self.radius * 2.0 * self.half_height
    }

    pub fn contains(&self, rho: f64, x3: f64) -> bool {
        rho < self.radius && (x3 - self.x3).abs() < self.half_height
    }
}

/// `P(a, b; h) = {a < |x'| < b, |x3 - x03| < h}` over a time window.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct AnnularCylinder {
    pub inner: f64,
    pub outer: f64,
    pub half_height: f64,
    pub x3: f64,
    pub t_start: f64,
    pub t_end: f64,
}

impl AnnularCylinder {
    pub fn new(inner: f64, outer: f64, half_height: f64, x3: f64, t_start: f64, t_end: f64) -> Result<Self, GeometryError> {
        if !(inner >= 0.0 && outer > inner && half_height > 0.0 && t_end >= t_start) {
            return Err(GeometryError::InvalidRegion(format!(
                "P({inner},{outer};{half_height}) over [{t_start},{t_end}]"
            )));
        }
        Ok(Self { inner, outer, half_height, x3, t_start, t_end })
    }

    pub fn volume(&self) -> f64 {
        PI * (self.outer * self.outer - self.inner * self.inner) * 2.0 * self.half_height
    }

    pub fn measure(&self) -> f64 {
        self.volume() * (self.t_end - self.t_start)
    }

    pub fn contains(&self, rho: f64, x3: f64) -> bool {
        rho > self.inner && rho < self.outer && (x3 - self.x3).abs() < self.half_height
    }
}

/// Volume of a spatial cylinder, or space-time measure of a parabolic one.
pub fn cyl_volume(c: &ParabolicCylinder) -> (f64, f64) {
    (c.volume(), c.measure())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn unit_cylinder_volume() {
        let c = SpatialCylinder::centered(0.0, 1.0);
        assert!((c.volume() - 2.0 * PI).abs() < 1e-15);
    }

    #[test]
    fn degenerate_radius() {
        let q = ParabolicCylinder::standard(AxisPoint::new(0.0, 0.0), 0.0).unwrap();
        assert_eq!(cyl_volume(&q), (0.0, 0.0));
    }

    #[test]
    fn rejects_bad_scales() {
        let o = AxisPoint::new(0.0, 0.0);
        assert!(ParabolicCylinder::new(o, 1.0, 0.0, 1.0).is_err());
        assert!(ParabolicCylinder::new(o, -1.0, 1.0, 1.0).is_err());
        assert!(AnnularCylinder::new(0.5, 0.2, 1.0, 0.0, 0.0, 1.0).is_err());
    }

    #[test]
    fn annulus_reduces_to_cylinder() {
        let p = AnnularCylinder::new(0.0, 0.5, 0.5, 0.0, 0.0, 1.0).unwrap();
        assert_eq!(p.volume(), SpatialCylinder::centered(0.0, 0.5).volume());
    }
}
