//! Benchmark problems on the unit square.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::mesh::Point;
use crate::scheme::{ExactSolution, Problem};

/// Manufactured solution with
/// `φ(a,b,t) = −sin²(πa) sin(πb) [sin(π(a+t)) + 3 sin(π(a+2b+t))]`,
/// `u = (φ(x,y,t), −φ(y,x,t))`, `p = sin(π(x+2y) + 1 + t)`.
#[derive(Debug, Clone, Copy)]
pub struct Example1 {
    nu: f64,
}

/// `φ` and its partial derivatives at one point.
#[derive(Debug, Clone, Copy)]
struct Phi {
    v: f64,
    a: f64,
    b: f64,
    t: f64,
    aa: f64,
    bb: f64,
}

fn phi(a: f64, b: f64, t: f64) -> Phi {
    let s_a = (PI * a).sin();
    let big_s = s_a * s_a;
    let big_s1 = PI * (2.0 * PI * a).sin();
    let big_s2 = 2.0 * PI * PI * (2.0 * PI * a).cos();
    let s = (PI * b).sin();
    let s1 = PI * (PI * b).cos();
    let s2 = -PI * PI * s;

    let (sin1, cos1) = (PI * (a + t)).sin_cos();
    let (sin2, cos2) = (PI * (a + 2.0 * b + t)).sin_cos();
    let g = sin1 + 3.0 * sin2;
    let g_a = PI * cos1 + 3.0 * PI * cos2;
    let g_aa = -PI * PI * (sin1 + 3.0 * sin2);
    let g_b = 6.0 * PI * cos2;
    let g_bb = -12.0 * PI * PI * sin2;

    Phi {
        v: -big_s * s * g,
        a: -(big_s1 * s * g + big_s * s * g_a),
        b: -(big_s * s1 * g + big_s * s * g_b),
        t: -big_s * s * g_a,
        aa: -(big_s2 * s * g + 2.0 * big_s1 * s * g_a + big_s * s * g_aa),
        bb: -(big_s * s2 * g + 2.0 * big_s * s1 * g_b + big_s * s * g_bb),
    }
}

impl Example1 {
    pub fn new(nu: f64) -> Result<Self> {
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::invalid(format!("viscosity must be positive, got {nu}")));
        }
        Ok(Example1 { nu })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }

    /// `[c][d] = ∂_d u_c`.
    pub fn velocity_grad(&self, x: Point, t: f64) -> [[f64; 2]; 2] {
        let p = phi(x[0], x[1], t);
        let q = phi(x[1], x[0], t);
        [[p.a, p.b], [-q.b, -q.a]]
    }

    pub fn force_at(&self, x: Point, t: f64) -> [f64; 2] {
        let p = phi(x[0], x[1], t);
        let q = phi(x[1], x[0], t);
        let u = [p.v, -q.v];
        let grad = [[p.a, p.b], [-q.b, -q.a]];
        let dt = [p.t, -q.t];
        let lap = [p.aa + p.bb, -(q.bb + q.aa)];
        let c = (PI * (x[0] + 2.0 * x[1]) + 1.0 + t).cos();
        let grad_p = [PI * c, 2.0 * PI * c];
        let mut f = [0.0; 2];
        for k in 0..2 {
            f[k] = dt[k] + u[0] * grad[k][0] + u[1] * grad[k][1] - self.nu * lap[k] + grad_p[k];
        }
        f
    }
}

impl ExactSolution for Example1 {
    fn velocity(&self, x: Point, t: f64) -> [f64; 2] {
        [phi(x[0], x[1], t).v, -phi(x[1], x[0], t).v]
    }

    fn pressure(&self, x: Point, t: f64) -> f64 {
        (PI * (x[0] + 2.0 * x[1]) + 1.0 + t).sin()
    }
}

impl Problem for Example1 {
    fn name(&self) -> &str {
        "example1"
    }

    fn force(&self, x: Point, t: f64) -> [f64; 2] {
        self.force_at(x, t)
    }

    fn boundary_velocity(&self, _: Point, _: f64) -> [f64; 2] {
        [0.0, 0.0]
    }

    fn initial_velocity(&self, x: Point) -> [f64; 2] {
        self.velocity(x, 0.0)
    }

    fn initial_velocity_grad(&self, x: Point) -> [[f64; 2]; 2] {
        self.velocity_grad(x, 0.0)
    }

    fn exact(&self) -> Option<&dyn ExactSolution> {
        Some(self)
    }
}

/// Lid-driven cavity with the continuous lid profile `g₁ = 4x(1−x)` on
/// `y = 1`, no-slip elsewhere, `f = 0`, `u⁰ = 0`.
#[derive(Debug, Clone, Copy)]
pub struct Cavity {
    nu: f64,
}

/// Tolerance for recognizing lid points.
const LID_TOL: f64 = 1e-12;

impl Cavity {
    pub fn new(nu: f64) -> Result<Self> {
        if !(nu > 0.0 && nu.is_finite()) {
            return Err(Error::invalid(format!("viscosity must be positive, got {nu}")));
        }
        Ok(Cavity { nu })
    }

    pub fn nu(&self) -> f64 {
        self.nu
    }
}

impl Problem for Cavity {
    fn name(&self) -> &str {
        "cavity"
    }

    fn force(&self, _: Point, _: f64) -> [f64; 2] {
        [0.0, 0.0]
    }

    fn boundary_velocity(&self, x: Point, _: f64) -> [f64; 2] {
        if (x[1] - 1.0).abs() <= LID_TOL {
            [4.0 * x[0] * (1.0 - x[0]), 0.0]
        } else {
            [0.0, 0.0]
        }
    }

    fn initial_velocity(&self, _: Point) -> [f64; 2] {
        [0.0, 0.0]
    }

    fn initial_velocity_grad(&self, _: Point) -> [[f64; 2]; 2] {
        [[0.0; 2]; 2]
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::{Rng, SeedableRng};
    use rand_chacha::ChaCha8Rng;

    #[test]
    fn example1_vanishes_on_boundary() {
        let ex = Example1::new(0.01).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..100 {
            let s: f64 = rng.gen();
            let t: f64 = rng.gen_range(0.0..2.0);
            let x = match rng.gen_range(0..4) {
                0 => [s, 0.0],
                1 => [1.0, s],
                2 => [s, 1.0],
                _ => [0.0, s],
            };
            let u = ex.velocity(x, t);
            assert!(u[0].abs() < 1e-14 && u[1].abs() < 1e-14, "{x:?} {u:?}");
        }
    }

    #[test]
    fn analytic_gradient_matches_differences() {
        let ex = Example1::new(0.01).unwrap();
        let e = 1e-6;
        for &(x, t) in &[([0.3, 0.7], 0.2), ([0.81, 0.14], 0.9)] {
            let g = ex.velocity_grad(x, t);
            for d in 0..2 {
                let mut xp = x;
                let mut xm = x;
                xp[d] += e;
                xm[d] -= e;
                let (up, um) = (ex.velocity(xp, t), ex.velocity(xm, t));
                for c in 0..2 {
                    assert!(((up[c] - um[c]) / (2.0 * e) - g[c][d]).abs() < 1e-7);
                }
            }
        }
    }

    #[test]
    fn cavity_lid_is_continuous() {
        let c = Cavity::new(1e-4).unwrap();
        assert_eq!(c.boundary_velocity([0.0, 1.0], 0.0), [0.0, 0.0]);
        assert_eq!(c.boundary_velocity([1.0, 1.0], 0.0), [0.0, 0.0]);
        assert_eq!(c.boundary_velocity([0.5, 1.0], 3.0), [1.0, 0.0]);
        assert_eq!(c.boundary_velocity([0.5, 0.0], 3.0), [0.0, 0.0]);
        assert!(Cavity::new(0.0).is_err());
    }
}
