use std::sync::Arc;

use super::{assemble_divergence, assemble_stiffness, pressure_mean_row, SaddleSystem};
use crate::error::Result;
use crate::fem::quadrature::DUNAVANT16;
use crate::fem::{pressure_values, velocity_gradients, FESpace, Field, Role, MAX_LOCAL};
use crate::mesh::Point;

/// Data `(w, r)` to project.
pub enum ProjectionSource<'a> {
    Discrete {
        velocity: &'a Field,
        pressure: &'a Field,
    },
    /// Closed-form data; `velocity_grad[c][d] = ∂_d w_c`.
    Analytic {
        velocity: &'a dyn Fn(Point) -> [f64; 2],
        velocity_grad: &'a dyn Fn(Point) -> [[f64; 2]; 2],
        pressure: &'a dyn Fn(Point) -> f64,
    },
}

/// Discrete pair `(ŵ, r̂)` with `a(ŵ,v)+b(v,r̂) = a(w,v)+b(v,r)` for all
/// `v ∈ V_h` and `b(ŵ,q) = b(w,q)` for all `q ∈ Q_h`, `r̂` of zero mean.
pub struct StokesProjector {
    space: Arc<FESpace>,
    nu: f64,
    system: SaddleSystem,
}

impl StokesProjector {
    pub fn new(space: Arc<FESpace>, nu: f64) -> Result<Self> {
        let a = assemble_stiffness(&space, nu)?;
        let b = assemble_divergence(&space);
        let system = SaddleSystem::new(a, b, pressure_mean_row(&space), space.dirichlet_mask())?;
        Ok(StokesProjector { space, nu, system })
    }

    pub fn system(&self) -> &SaddleSystem {
        &self.system
    }

    pub fn project(&self, source: &ProjectionSource<'_>) -> Result<(Field, Field)> {
        let space = &*self.space;
        let (f, g, boundary) = match source {
            ProjectionSource::Discrete { velocity, pressure } => {
                space.check_field(velocity)?;
                space.check_field(pressure)?;
                let a = self.system.velocity_block();
                let b = self.system.divergence();
                let mut f = a.mul_vec(&velocity.coeffs);
                let bt_r = b.mul_vec_transpose(&pressure.coeffs);
                f.iter_mut().zip(&bt_r).for_each(|(x, y)| *x += y);
                (f, b.mul_vec(&velocity.coeffs), velocity.coeffs.clone())
            }
            ProjectionSource::Analytic {
                velocity,
                velocity_grad,
                pressure,
            } => {
                let (f, g) = self.analytic_functionals(*velocity_grad, *pressure);
                (f, g, space.interpolate_velocity(velocity).coeffs)
            }
        };
        let sol = self.system.solve(&f, &g, &boundary)?;
        Ok((
            Field::new(Role::Velocity, sol.velocity),
            Field::new(Role::Pressure, sol.pressure),
        ))
    }

    fn analytic_functionals(&self, grad_w: &dyn Fn(Point) -> [[f64; 2]; 2], r: &dyn Fn(Point) -> f64) -> (Vec<f64>, Vec<f64>) {
        let space = &*self.space;
        let n = space.n_scalar();
        let mut f = vec![0.0; 2 * n];
        let mut g = vec![0.0; space.n_pressure()];
        let mut grad = [[0.0; 2]; MAX_LOCAL];
        let mut psi = [0.0; MAX_LOCAL];
        for t in 0..space.mesh().num_triangles() {
            let geom = space.geometry(t);
            let vdofs = space.local_velocity_dofs(t);
            let pdofs = space.local_pressure_dofs(t);
            for (lam, w) in &DUNAVANT16.points {
                let x = geom.point(*lam);
                let gw = grad_w(x);
                let rx = r(x);
                let div_w = gw[0][0] + gw[1][1];
                let weight = geom.area * w;
                let m = velocity_gradients(space.pair(), *lam, geom, &mut grad);
                for k in 0..m {
                    for c in 0..2 {
                        let a = self.nu * (gw[c][0] * grad[k][0] + gw[c][1] * grad[k][1]);
                        // b(φ, r) = −∫ r ∂_c φ_c
                        f[c * n + vdofs[k]] += weight * (a - rx * grad[k][c]);
                    }
                }
                pressure_values(*lam, &mut psi);
                for q in 0..3 {
                    g[pdofs[q]] -= weight * div_w * psi[q];
                }
            }
        }
        (f, g)
    }
}

pub fn stokes_projection(space: Arc<FESpace>, nu: f64, source: &ProjectionSource<'_>) -> Result<(Field, Field)> {
    StokesProjector::new(space, nu)?.project(source)
}
