//! Reference shape functions in barycentric form.
//!
//! Local velocity DOFs: P2 uses the three vertices then the midpoints of
//! local edges 0, 1, 2 (edge `k` is opposite vertex `k`); P1+ uses the three
//! vertices then the bubble `27 λ0 λ1 λ2`. Pressure is P1 on the vertices.

use arrayvec::ArrayVec;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::mesh::{signed_area, Point};

pub const MAX_LOCAL: usize = 6;

pub type LocalValues = ArrayVec<f64, MAX_LOCAL>;
pub type LocalGradients = ArrayVec<[f64; 2], MAX_LOCAL>;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub enum ElementPair {
    /// P2 velocity / P1 pressure.
    #[serde(rename = "p2p1")]
    TaylorHood,
    /// P1 + cubic bubble velocity / P1 pressure.
    #[serde(rename = "p1bp1")]
    Mini,
}

impl ElementPair {
    pub fn velocity_dofs_per_element(self) -> usize {
        match self {
            ElementPair::TaylorHood => 6,
            ElementPair::Mini => 4,
        }
    }

    pub fn pressure_dofs_per_element(self) -> usize {
        3
    }

    /// Polynomial degree of the velocity shape functions.
    pub fn velocity_degree(self) -> usize {
        match self {
            ElementPair::TaylorHood => 2,
            ElementPair::Mini => 3,
        }
    }
}

impl std::fmt::Display for ElementPair {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ElementPair::TaylorHood => "p2p1",
            ElementPair::Mini => "p1bp1",
        })
    }
}

impl std::str::FromStr for ElementPair {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "p2p1" | "taylor-hood" => Ok(ElementPair::TaylorHood),
            "p1bp1" | "mini" => Ok(ElementPair::Mini),
            other => Err(Error::invalid(format!("unknown element pair '{other}'"))),
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Role {
    Velocity,
    Pressure,
}

/// Affine triangle data needed to pull gradients back from barycentric form.
#[derive(Debug, Clone, Copy)]
pub struct ElementGeometry {
    pub corners: [Point; 3],
    pub area: f64,
    pub grad_lambda: [[f64; 2]; 3],
}

impl ElementGeometry {
    pub fn new(corners: [Point; 3], element: usize) -> Result<Self> {
        let area = signed_area(corners[0], corners[1], corners[2]);
        if !(area.abs() > 1e-300) || !area.is_finite() {
            return Err(Error::SingularGeometry { element, area });
        }
        let mut grad_lambda = [[0.0; 2]; 3];
        for (i, g) in grad_lambda.iter_mut().enumerate() {
            let p = corners[(i + 1) % 3];
            let q = corners[(i + 2) % 3];
            *g = [(p[1] - q[1]) / (2.0 * area), (q[0] - p[0]) / (2.0 * area)];
        }
        Ok(ElementGeometry {
            corners,
            area,
            grad_lambda,
        })
    }

    pub fn point(&self, lam: [f64; 3]) -> Point {
        let c = &self.corners;
        [
            lam[0] * c[0][0] + lam[1] * c[1][0] + lam[2] * c[2][0],
            lam[0] * c[0][1] + lam[1] * c[1][1] + lam[2] * c[2][1],
        ]
    }

    pub fn barycentric(&self, p: Point) -> [f64; 3] {
        let c = &self.corners;
        [
            signed_area(p, c[1], c[2]) / self.area,
            signed_area(c[0], p, c[2]) / self.area,
            signed_area(c[0], c[1], p) / self.area,
        ]
    }
}

fn check_barycentric(lam: [f64; 3]) -> Result<()> {
    let sum: f64 = lam.iter().sum();
    if lam.iter().any(|&l| l < -1e-12 || !l.is_finite()) || (sum - 1.0).abs() > 1e-12 {
        return Err(Error::invalid(format!("invalid barycentric point {lam:?}")));
    }
    Ok(())
}

/// Values of all local shape functions of `role` at a barycentric point.
pub fn eval_basis(pair: ElementPair, role: Role, lam: [f64; 3]) -> Result<LocalValues> {
    check_barycentric(lam)?;
    let mut out = [0.0; MAX_LOCAL];
    let n = match role {
        Role::Velocity => velocity_values(pair, lam, &mut out),
        Role::Pressure => pressure_values(lam, &mut out),
    };
    Ok(out[..n].iter().copied().collect())
}

/// Physical gradients of all local shape functions of `role`.
pub fn eval_basis_grad(
    pair: ElementPair,
    role: Role,
    lam: [f64; 3],
    geom: &ElementGeometry,
) -> Result<LocalGradients> {
    check_barycentric(lam)?;
    let mut out = [[0.0; 2]; MAX_LOCAL];
    let n = match role {
        Role::Velocity => velocity_gradients(pair, lam, geom, &mut out),
        Role::Pressure => {
            out[..3].copy_from_slice(&geom.grad_lambda);
            3
        }
    };
    Ok(out[..n].iter().copied().collect())
}

#[inline]
pub(crate) fn pressure_values(lam: [f64; 3], out: &mut [f64; MAX_LOCAL]) -> usize {
    out[..3].copy_from_slice(&lam);
    3
}

#[inline]
pub(crate) fn velocity_values(pair: ElementPair, l: [f64; 3], out: &mut [f64; MAX_LOCAL]) -> usize {
    match pair {
        ElementPair::TaylorHood => {
            for i in 0..3 {
                out[i] = l[i] * (2.0 * l[i] - 1.0);
            }
            out[3] = 4.0 * l[1] * l[2];
            out[4] = 4.0 * l[2] * l[0];
            out[5] = 4.0 * l[0] * l[1];
            6
        }
        ElementPair::Mini => {
            out[..3].copy_from_slice(&l);
            out[3] = 27.0 * l[0] * l[1] * l[2];
            4
        }
    }
}

#[inline]
pub(crate) fn velocity_gradients(
    pair: ElementPair,
    l: [f64; 3],
    geom: &ElementGeometry,
    out: &mut [[f64; 2]; MAX_LOCAL],
) -> usize {
    let g = &geom.grad_lambda;
    let comb = |a: f64, ga: [f64; 2], b: f64, gb: [f64; 2]| [a * ga[0] + b * gb[0], a * ga[1] + b * gb[1]];
    match pair {
        ElementPair::TaylorHood => {
            for i in 0..3 {
                let s = 4.0 * l[i] - 1.0;
                out[i] = [s * g[i][0], s * g[i][1]];
            }
            for k in 0..3 {
                let (i, j) = ((k + 1) % 3, (k + 2) % 3);
                out[3 + k] = comb(4.0 * l[j], g[i], 4.0 * l[i], g[j]);
            }
            6
        }
        ElementPair::Mini => {
            out[..3].copy_from_slice(g);
            let mut b = [0.0; 2];
            for d in 0..2 {
                b[d] = 27.0 * (l[1] * l[2] * g[0][d] + l[2] * l[0] * g[1][d] + l[0] * l[1] * g[2][d]);
            }
            out[3] = b;
            4
        }
    }
}
