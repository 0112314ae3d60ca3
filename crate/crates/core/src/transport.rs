//! The composite transport term `∫ (u_prev ∘ X₁(w)) · φ_i dx`.
//!
//! [`assemble_composite_exact`] uses a piecewise-linear `w`, which makes the
//! foot map affine per element; the integral then splits into polynomial
//! integrals over clip polygons and is computed exactly.
//! [`assemble_composite_quadrature`] evaluates the composite function at the
//! points of a fixed rule instead, with the full velocity in the foot map.

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::quadrature::{QuadratureRule, DUNAVANT16};
use crate::fem::{sup_grad_p1, velocity_values, FESpace, Field, P1Field, MAX_LOCAL};
use crate::geometry::{find_overlaps, foot_map_on_element, polygon_quadrature, ClipPolygon};

/// Partition deficit (relative to the element area) tolerated before the
/// exact assembler reports a geometry inconsistency.
pub const AREA_PARTITION_TOL: f64 = 1e-8;

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CflReport {
    /// `dt · |Π¹w|_{1,∞}`.
    pub dt_times_grad: f64,
    /// `dt_times_grad < 1`: the foot map is a bijection of the domain.
    pub bijective_ok: bool,
    /// `dt_times_grad ≤ 1/4`: element Jacobians lie in `[1/2, 3/2]`.
    pub jacobian_ok: bool,
    /// `dt / (c0 · h^{1/2})`, informational.
    pub step_vs_h: f64,
}

pub fn check_admissibility(space: &FESpace, w: &P1Field, dt: f64, h: f64, c0_user: f64) -> CflReport {
    let dt_times_grad = dt * sup_grad_p1(space, w);
    CflReport {
        dt_times_grad,
        bijective_ok: dt_times_grad < 1.0,
        jacobian_ok: dt_times_grad <= 0.25,
        step_vs_h: dt / (c0_user * h.sqrt()),
    }
}

type LocalContribution = ([f64; MAX_LOCAL], [f64; MAX_LOCAL]);

fn scatter(space: &FESpace, local: &[LocalContribution]) -> Vec<f64> {
    let n = space.n_scalar();
    let mut r = vec![0.0; space.n_velocity()];
    for (t, (rx, ry)) in local.iter().enumerate() {
        for (k, &s) in space.local_velocity_dofs(t).iter().enumerate() {
            r[s] += rx[k];
            r[n + s] += ry[k];
        }
    }
    r
}

/// Exact `r_i = ∫_Ω (u_prev ∘ X₁(w)) · φ_i dx` for piecewise-linear `w`.
///
/// Contributions are computed per source element in parallel and summed
/// in element order, so the result does not depend on the thread count.
pub fn assemble_composite_exact(space: &FESpace, u_prev: &Field, w: &P1Field, dt: f64) -> Result<Vec<f64>> {
    space.check_field(u_prev)?;
    if !(dt > 0.0) {
        return Err(Error::invalid(format!("time step must be positive, got {dt}")));
    }
    let mesh = space.mesh();
    let local = (0..mesh.num_triangles())
        .into_par_iter()
        .map_init(
            || mesh.locator(),
            |locator, t| -> Result<LocalContribution> {
                let geom0 = space.geometry(t);
                let map = foot_map_on_element(mesh, geom0, w, dt, t)?;
                locator.set_hint(t);
                let pieces = find_overlaps(mesh, t, &map, locator)?;
                let covered: f64 = pieces.iter().map(ClipPolygon::area).sum();
                let deficit = (covered - geom0.area).abs() / geom0.area;
                if deficit > AREA_PARTITION_TOL {
                    return Err(Error::GeometryConsistency { element: t, deficit });
                }

                let mut rx = [0.0; MAX_LOCAL];
                let mut ry = [0.0; MAX_LOCAL];
                let mut phi = [0.0; MAX_LOCAL];
                for piece in &pieces {
                    let geom1 = space.geometry(piece.target_element);
                    polygon_quadrature(&piece.vertices, &DUNAVANT16, |x, weight| {
                        let u = space.eval_velocity(&u_prev.coeffs, piece.target_element, geom1.barycentric(map.apply(x)));
                        let n = velocity_values(space.pair(), geom0.barycentric(x), &mut phi);
                        for k in 0..n {
                            rx[k] += weight * phi[k] * u[0];
                            ry[k] += weight * phi[k] * u[1];
                        }
                    });
                }
                Ok((rx, ry))
            },
        )
        .collect::<Result<Vec<_>>>()?;
    Ok(scatter(space, &local))
}

/// `r_i = Σ_K |K| Σ_q ω_q u_prev(X₁(w)(a_q)) · φ_i(a_q)` with the full
/// velocity `w` in the foot map.
///
/// Feet leaving the domain are projected onto the bounding box (the
/// boundary for the unit square) and `u_prev` is evaluated there.
pub fn assemble_composite_quadrature(
    space: &FESpace,
    u_prev: &Field,
    w_full: &Field,
    dt: f64,
    rule: &QuadratureRule,
) -> Result<Vec<f64>> {
    space.check_field(u_prev)?;
    space.check_field(w_full)?;
    if !(dt > 0.0) {
        return Err(Error::invalid(format!("time step must be positive, got {dt}")));
    }
    let mesh = space.mesh();
    let [lo, hi] = mesh.bbox();
    let local = (0..mesh.num_triangles())
        .into_par_iter()
        .map_init(
            || mesh.locator(),
            |locator, t| -> Result<LocalContribution> {
                let geom = space.geometry(t);
                let mut rx = [0.0; MAX_LOCAL];
                let mut ry = [0.0; MAX_LOCAL];
                let mut phi = [0.0; MAX_LOCAL];
                for (lam, omega) in &rule.points {
                    let x = geom.point(*lam);
                    let w = space.eval_velocity(&w_full.coeffs, t, *lam);
                    let foot = [
                        (x[0] - dt * w[0]).clamp(lo[0], hi[0]),
                        (x[1] - dt * w[1]).clamp(lo[1], hi[1]),
                    ];
                    locator.set_hint(t);
                    let loc = locator.locate(foot)?;
                    let u = space.eval_velocity(&u_prev.coeffs, loc.element, loc.barycentric);
                    let n = velocity_values(space.pair(), *lam, &mut phi);
                    let weight = geom.area * omega;
                    for k in 0..n {
                        rx[k] += weight * phi[k] * u[0];
                        ry[k] += weight * phi[k] * u[1];
                    }
                }
                Ok((rx, ry))
            },
        )
        .collect::<Result<Vec<_>>>()?;
    Ok(scatter(space, &local))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::{ElementPair, Role};
    use crate::mesh::{generate_structured_unit_square, Pattern};
    use std::sync::Arc;

    fn space(n: usize, pair: ElementPair) -> FESpace {
        let mesh = Arc::new(generate_structured_unit_square(n, Pattern::Right).unwrap());
        FESpace::new(mesh, pair).unwrap()
    }

    #[test]
    fn report_flags() {
        let s = space(4, ElementPair::TaylorHood);
        let zero = P1Field::zeros(s.mesh().num_vertices());
        let r = check_admissibility(&s, &zero, 0.1, 0.25, 1.0);
        assert_eq!(r.dt_times_grad, 0.0);
        assert!(r.bijective_ok && r.jacobian_ok);

        // w = (x, 0): Frobenius gradient norm 1
        let w = s.p1_linearize(&s.interpolate_velocity(|p| [p[0], 0.0]));
        let r = check_admissibility(&s, &w, 0.25, 0.25, 1.0);
        assert!((r.dt_times_grad - 0.25).abs() < 1e-14);
        assert!(r.jacobian_ok);
        let r = check_admissibility(&s, &w, 0.5, 0.25, 1.0);
        assert!(!r.jacobian_ok && r.bijective_ok);
    }

    #[test]
    fn zero_previous_velocity_gives_zero() {
        for pair in [ElementPair::TaylorHood, ElementPair::Mini] {
            let s = space(3, pair);
            let u = Field::zeros(&s, Role::Velocity);
            let w = s.p1_linearize(&s.interpolate_velocity(|p| {
                let b = p[0] * (1.0 - p[0]) * p[1] * (1.0 - p[1]);
                [b, -b]
            }));
            let r = assemble_composite_exact(&s, &u, &w, 0.05).unwrap();
            assert!(r.iter().all(|&v| v == 0.0));
            let wf = s.from_p1(&w);
            let q = assemble_composite_quadrature(&s, &u, &wf, 0.05, &crate::fem::quadrature::HMS7).unwrap();
            assert!(q.iter().all(|&v| v == 0.0));
        }
    }

    #[test]
    fn nonpositive_step_rejected() {
        let s = space(2, ElementPair::TaylorHood);
        let u = Field::zeros(&s, Role::Velocity);
        let w = P1Field::zeros(s.mesh().num_vertices());
        assert!(assemble_composite_exact(&s, &u, &w, 0.0).is_err());
    }
}
