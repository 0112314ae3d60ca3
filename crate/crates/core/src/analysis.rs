//! Discrete norms, relative errors against exact solutions and observed
//! convergence orders.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::fem::quadrature::DUNAVANT16;
use crate::fem::{FESpace, Field, Role};
use crate::scheme::RunHistory;

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum NormKind {
    L2,
    /// `|·|₁`, the L² norm of the gradient.
    H1Semi,
}

/// Exact L² norm or H¹ seminorm of a finite element function.
pub fn field_norm(space: &FESpace, field: &Field, kind: NormKind) -> f64 {
    let mut sum = 0.0;
    for t in 0..space.mesh().num_triangles() {
        let geom = space.geometry(t);
        for (lam, w) in &DUNAVANT16.points {
            let v = match (field.role, kind) {
                (Role::Velocity, NormKind::L2) => {
                    let u = space.eval_velocity(&field.coeffs, t, *lam);
                    u[0] * u[0] + u[1] * u[1]
                }
                (Role::Velocity, NormKind::H1Semi) => {
                    let g = space.eval_velocity_grad(&field.coeffs, t, *lam);
                    g[0][0].powi(2) + g[0][1].powi(2) + g[1][0].powi(2) + g[1][1].powi(2)
                }
                (Role::Pressure, NormKind::L2) => space.eval_pressure(&field.coeffs, t, *lam).powi(2),
                (Role::Pressure, NormKind::H1Semi) => {
                    let [i, j, k] = space.local_pressure_dofs(t);
                    let c = &field.coeffs;
                    let g = &geom.grad_lambda;
                    let gx = c[i] * g[0][0] + c[j] * g[1][0] + c[k] * g[2][0];
                    let gy = c[i] * g[0][1] + c[j] * g[1][1] + c[k] * g[2][1];
                    gx * gx + gy * gy
                }
            };
            sum += geom.area * w * v;
        }
    }
    sum.sqrt()
}

/// Norms of `Π_h φ − φ_h` and of `Π_h φ` at one time level.
#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct StepErrors {
    pub velocity_h1_diff: f64,
    pub velocity_h1_ref: f64,
    pub velocity_l2_diff: f64,
    pub velocity_l2_ref: f64,
    pub pressure_l2_diff: f64,
    pub pressure_l2_ref: f64,
}

/// Relative errors of one run.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ErrorEntry {
    pub n: usize,
    pub h: f64,
    pub dt: f64,
    /// `E_{ℓ∞(H¹₀)}(u)`, seminorm reading.
    pub velocity_linf_h1: f64,
    /// `E_{ℓ²(L²)}(p)`.
    pub pressure_l2_l2: f64,
    /// `E_{ℓ∞(L²)}(u)`.
    pub velocity_linf_l2: f64,
}

/// Relative errors `E_X = ‖Π_h φ − φ_h‖_X / ‖Π_h φ‖_X` from captured step errors.
///
/// ℓ∞ maximizes over `n = 0..=N_T`; the pressure ℓ² sum runs over
/// `n = 1..=N_T` with weight `dt`.
pub fn relative_error_series(history: &RunHistory, n_div: usize, h: f64) -> Result<ErrorEntry> {
    let errs: Vec<&StepErrors> = history.records.iter().filter_map(|r| r.errors.as_ref()).collect();
    if errs.len() != history.records.len() || errs.is_empty() {
        return Err(Error::invalid("history does not carry per-step errors for every step"));
    }
    let dt = history.dt;
    let max = |f: fn(&StepErrors) -> f64| errs.iter().map(|e| f(e)).fold(0.0, f64::max);
    let l2 = |f: fn(&StepErrors) -> f64| (dt * errs.iter().skip(1).map(|e| f(e).powi(2)).sum::<f64>()).sqrt();

    let ratio = |num: f64, den: f64, what: &str| {
        if den > 0.0 {
            Ok(num / den)
        } else {
            Err(Error::DegenerateExact(format!("{what} of the exact solution vanishes")))
        }
    };
    Ok(ErrorEntry {
        n: n_div,
        h,
        dt,
        velocity_linf_h1: ratio(max(|e| e.velocity_h1_diff), max(|e| e.velocity_h1_ref), "velocity H1 norm")?,
        pressure_l2_l2: ratio(l2(|e| e.pressure_l2_diff), l2(|e| e.pressure_l2_ref), "pressure L2 norm")?,
        velocity_linf_l2: ratio(max(|e| e.velocity_l2_diff), max(|e| e.velocity_l2_ref), "velocity L2 norm")?,
    })
}

/// Pairwise orders `log(E_i/E_{i+1}) / log(h_i/h_{i+1})`.
pub fn observed_orders(h: &[f64], e: &[f64]) -> Result<Vec<f64>> {
    if h.len() != e.len() || h.len() < 2 {
        return Err(Error::invalid("need at least two (h, E) pairs"));
    }
    let decreasing = h.windows(2).all(|w| w[1] < w[0]);
    let increasing = h.windows(2).all(|w| w[1] > w[0]);
    if !(decreasing || increasing) {
        return Err(Error::invalid("mesh sizes must be distinct and monotone"));
    }
    Ok(h.windows(2)
        .zip(e.windows(2))
        .map(|(hw, ew)| (ew[0] / ew[1]).ln() / (hw[0] / hw[1]).ln())
        .collect())
}

/// Orders of the three error quantities along a sweep.
#[derive(Debug, Clone, PartialEq)]
pub struct SeriesOrders {
    pub velocity_linf_h1: Vec<f64>,
    pub pressure_l2_l2: Vec<f64>,
    pub velocity_linf_l2: Vec<f64>,
}

pub fn series_orders(entries: &[ErrorEntry]) -> Result<SeriesOrders> {
    let h: Vec<f64> = entries.iter().map(|e| e.h).collect();
    let col = |f: fn(&ErrorEntry) -> f64| entries.iter().map(f).collect::<Vec<_>>();
    Ok(SeriesOrders {
        velocity_linf_h1: observed_orders(&h, &col(|e| e.velocity_linf_h1))?,
        pressure_l2_l2: observed_orders(&h, &col(|e| e.pressure_l2_l2))?,
        velocity_linf_l2: observed_orders(&h, &col(|e| e.velocity_linf_l2))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::ElementPair;
    use crate::mesh::{generate_structured_unit_square, Pattern};
    use std::sync::Arc;

    fn space(pair: ElementPair) -> FESpace {
        let mesh = Arc::new(generate_structured_unit_square(4, Pattern::Right).unwrap());
        FESpace::new(mesh, pair).unwrap()
    }

    #[test]
    fn norms_of_simple_fields() {
        for pair in [ElementPair::TaylorHood, ElementPair::Mini] {
            let s = space(pair);
            assert_eq!(field_norm(&s, &Field::zeros(&s, Role::Velocity), NormKind::L2), 0.0);
            let c = s.interpolate_pressure(|_| -2.0, false);
            assert!((field_norm(&s, &c, NormKind::L2) - 2.0).abs() < 1e-14);
            let x = s.interpolate_velocity(|p| [p[0], 0.0]);
            assert!((field_norm(&s, &x, NormKind::H1Semi) - 1.0).abs() < 1e-14);
        }
    }

    #[test]
    fn orders_from_exact_ratios() {
        let o = observed_orders(&[1.0 / 8.0, 1.0 / 16.0], &[4e-2, 1e-2]).unwrap();
        assert!((o[0] - 2.0).abs() < 1e-14);
        let o = observed_orders(&[1.0 / 45.0, 1.0 / 64.0], &[1.29e-2, 6.39e-3]).unwrap();
        assert!((o[0] - 1.99).abs() < 0.005, "{}", o[0]);
        let h = [0.5, 0.25, 0.2, 0.1];
        let e: Vec<f64> = h.iter().map(|x: &f64| 3.7 * x.powf(2.6)).collect();
        for o in observed_orders(&h, &e).unwrap() {
            assert!((o - 2.6).abs() < 1e-12);
        }
    }

    #[test]
    fn nonmonotone_sizes_rejected() {
        assert!(observed_orders(&[0.1, 0.2, 0.05], &[1.0, 2.0, 3.0]).is_err());
        assert!(observed_orders(&[0.1, 0.1], &[1.0, 2.0]).is_err());
        assert!(observed_orders(&[0.1], &[1.0]).is_err());
    }
}
