//! Closed-form solutions used as oracles and boundary data.

use std::f64::consts::{LN_2, PI};

/// An exact axisymmetric solution `(v_rho, v_phi, v_3, q)` of the
/// Navier-Stokes system with unit viscosity.
pub trait ExactSolution: Send + Sync + std::fmt::Debug {
    fn name(&self) -> &'static str;

    /// `[v_rho, v_phi, v_3]` at `(rho, z, t)`.
    fn velocity(&self, rho: f64, z: f64, t: f64) -> [f64; 3];

    fn pressure(&self, rho: f64, z: f64, t: f64) -> f64;

    /// `sigma = rho v_phi`.
    fn swirl(&self, rho: f64, z: f64, t: f64) -> f64 {
        rho * self.velocity(rho, z, t)[1]
    }
}

#[derive(Clone, Copy, Debug, Default)]
pub struct ZeroFlow;

impl ExactSolution for ZeroFlow {
    fn name(&self) -> &'static str {
        "zero"
    }

    fn velocity(&self, _: f64, _: f64, _: f64) -> [f64; 3] {
        [0.0; 3]
    }

    fn pressure(&self, _: f64, _: f64, _: f64) -> f64 {
        0.0
    }
}

/// `v_phi = omega rho`, `q = omega^2 rho^2 / 2`: steady.
#[derive(Clone, Copy, Debug)]
pub struct RigidRotation {
    pub omega: f64,
}

impl ExactSolution for RigidRotation {
    fn name(&self) -> &'static str {
        "rigid_rotation"
    }

    fn velocity(&self, rho: f64, _: f64, _: f64) -> [f64; 3] {
        [0.0, self.omega * rho, 0.0]
    }

    fn pressure(&self, rho: f64, _: f64, _: f64) -> f64 {
        0.5 * self.omega * self.omega * rho * rho
    }

    fn swirl(&self, rho: f64, _: f64, _: f64) -> f64 {
        self.omega * rho * rho
    }
}

/// Lamb-Oseen vortex `v_phi = Gamma/(2 pi rho) (1 - exp(-rho^2 / (4 (t + t0))))`.
///
/// The pressure vanishes at infinity:
/// `q = -(a^2 / (8 s_t)) [ (1 - e^{-s})^2 / s + 2 (E1(s) - E1(2s)) ]`,
/// with `a = Gamma / 2 pi`, `s_t = t + t0`, `s = rho^2 / (4 s_t)`.
#[derive(Clone, Copy, Debug)]
pub struct LambOseen {
    pub circulation: f64,
    pub t_shift: f64,
}

impl LambOseen {
    pub fn amplitude(&self) -> f64 {
        self.circulation / (2.0 * PI)
    }
}

impl ExactSolution for LambOseen {
    fn name(&self) -> &'static str {
        "lamb_oseen"
    }

    fn velocity(&self, rho: f64, z: f64, t: f64) -> [f64; 3] {
        if rho == 0.0 {
            return [0.0; 3];
        }
        [0.0, self.swirl(rho, z, t) / rho, 0.0]
    }

    fn pressure(&self, rho: f64, _: f64, t: f64) -> f64 {
        let a = self.amplitude();
        let st = t + self.t_shift;
        let s = rho * rho / (4.0 * st);
        let core = if s == 0.0 { 0.0 } else { (-s).exp_m1().powi(2) / s };
        -(a * a / (8.0 * st)) * (core + 2.0 * e1_difference(s))
    }

    fn swirl(&self, rho: f64, _: f64, t: f64) -> f64 {
        let st = t + self.t_shift;
        -self.amplitude() * (-rho * rho / (4.0 * st)).exp_m1()
    }
}

/// `E1(s) - E1(2s) = int_s^{2s} e^{-u}/u du`, `ln 2` at `s = 0`.
pub fn e1_difference(s: f64) -> f64 {
    if s <= 0.5 {
        // ln 2 + sum_{n>=1} (-1)^{n+1} (1 - 2^n) s^n / (n n!)
        let mut sum = LN_2;
        let mut term = 1.0; // s^n / n!
        let mut pow2 = 1.0;
        for n in 1..60 {
            term *= s / n as f64;
            pow2 *= 2.0;
            let sign = if n % 2 == 1 { 1.0 } else { -1.0 };
            let add = sign * (1.0 - pow2) * term / n as f64;
            sum += add;
            if add.abs() < 1e-18 * sum.abs() {
                break;
            }
        }
        sum
    } else {
        // Composite Simpson in log-variable u = s e^x, x in [0, ln 2]:
        // integrand e^{-u}/u du = e^{-s e^x} dx.
        let n = 2048;
        let h = LN_2 / n as f64;
        let f = |x: f64| (-s * x.exp()).exp();
        let mut acc = f(0.0) + f(LN_2);
        for k in 1..n {
            acc += if k % 2 == 1 { 4.0 } else { 2.0 } * f(k as f64 * h);
        }
        acc * h / 3.0
    }
}
