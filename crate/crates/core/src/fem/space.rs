use std::sync::Arc;

use arrayvec::ArrayVec;

use super::basis::{
    pressure_values, velocity_gradients, velocity_values, ElementGeometry, ElementPair, Role, MAX_LOCAL,
};
use crate::error::{Error, Result};
use crate::mesh::{Mesh, Point};

/// Mesh entity carrying a scalar velocity DOF.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Entity {
    Vertex(usize),
    Edge(usize),
    Bubble(usize),
}

/// Mixed velocity/pressure space on a mesh.
///
/// Velocity coefficients are stored component-blocked: all x-components,
/// then all y-components. Within a component, scalar DOFs run over vertices,
/// then edges (P2) or element bubbles (P1+). Pressure DOFs are vertex values.
#[derive(Debug, Clone)]
pub struct FESpace {
    mesh: Arc<Mesh>,
    pair: ElementPair,
    n_scalar: usize,
    geometry: Vec<ElementGeometry>,
    dirichlet: Vec<bool>,
}

impl FESpace {
    pub fn new(mesh: Arc<Mesh>, pair: ElementPair) -> Result<Self> {
        let nv = mesh.num_vertices();
        let n_scalar = match pair {
            ElementPair::TaylorHood => nv + mesh.num_edges(),
            ElementPair::Mini => nv + mesh.num_triangles(),
        };
        let geometry = (0..mesh.num_triangles())
            .map(|t| ElementGeometry::new(mesh.corners(t), t))
            .collect::<Result<Vec<_>>>()?;
        let mut dirichlet = vec![false; n_scalar];
        for v in 0..nv {
            dirichlet[v] = mesh.is_boundary_vertex(v);
        }
        if pair == ElementPair::TaylorHood {
            for e in 0..mesh.num_edges() {
                dirichlet[nv + e] = mesh.is_boundary_edge(e);
            }
        }
        Ok(FESpace {
            mesh,
            pair,
            n_scalar,
            geometry,
            dirichlet,
        })
    }

    pub fn mesh(&self) -> &Mesh {
        &self.mesh
    }

    pub fn mesh_arc(&self) -> &Arc<Mesh> {
        &self.mesh
    }

    pub fn pair(&self) -> ElementPair {
        self.pair
    }

    /// Scalar velocity DOFs per component.
    pub fn n_scalar(&self) -> usize {
        self.n_scalar
    }

    pub fn n_velocity(&self) -> usize {
        2 * self.n_scalar
    }

    pub fn n_pressure(&self) -> usize {
        self.mesh.num_vertices()
    }

    pub fn geometry(&self, t: usize) -> &ElementGeometry {
        &self.geometry[t]
    }

    /// Global scalar DOF ids of element `t`, in local basis order.
    pub fn local_velocity_dofs(&self, t: usize) -> ArrayVec<usize, MAX_LOCAL> {
        let tri = self.mesh.triangle(t);
        let nv = self.mesh.num_vertices();
        let mut out: ArrayVec<usize, MAX_LOCAL> = tri.iter().copied().collect();
        match self.pair {
            ElementPair::TaylorHood => out.extend(self.mesh.triangle_edges(t).iter().map(|e| nv + e)),
            ElementPair::Mini => out.push(nv + t),
        }
        out
    }

    pub fn local_pressure_dofs(&self, t: usize) -> [usize; 3] {
        self.mesh.triangle(t)
    }

    /// Entity and component of a global velocity DOF.
    pub fn velocity_dof_entity(&self, dof: usize) -> (Entity, usize) {
        let comp = dof / self.n_scalar;
        let s = dof % self.n_scalar;
        let nv = self.mesh.num_vertices();
        let entity = if s < nv {
            Entity::Vertex(s)
        } else if self.pair == ElementPair::TaylorHood {
            Entity::Edge(s - nv)
        } else {
            Entity::Bubble(s - nv)
        };
        (entity, comp)
    }

    /// Nodal position of a scalar velocity DOF (centroid for bubbles).
    pub fn scalar_dof_point(&self, s: usize) -> Point {
        match self.velocity_dof_entity(s).0 {
            Entity::Vertex(v) => self.mesh.vertex(v),
            Entity::Edge(e) => self.mesh.edge_midpoint(e),
            Entity::Bubble(t) => self.mesh.centroid(t),
        }
    }

    /// Dirichlet flag per global velocity DOF (both components).
    pub fn dirichlet_mask(&self) -> Vec<bool> {
        let mut m = self.dirichlet.clone();
        m.extend_from_slice(&self.dirichlet);
        m
    }

    pub fn is_dirichlet_scalar(&self, s: usize) -> bool {
        self.dirichlet[s]
    }

    /// Velocity of the field `coeffs` at barycentric point `lam` of element `t`.
    pub fn eval_velocity(&self, coeffs: &[f64], t: usize, lam: [f64; 3]) -> [f64; 2] {
        let dofs = self.local_velocity_dofs(t);
        let mut phi = [0.0; MAX_LOCAL];
        velocity_values(self.pair, lam, &mut phi);
        let mut u = [0.0; 2];
        for (k, &s) in dofs.iter().enumerate() {
            u[0] += coeffs[s] * phi[k];
            u[1] += coeffs[self.n_scalar + s] * phi[k];
        }
        u
    }

    /// Velocity gradient `[[∂x u, ∂y u], [∂x v, ∂y v]]` at a barycentric point.
    pub fn eval_velocity_grad(&self, coeffs: &[f64], t: usize, lam: [f64; 3]) -> [[f64; 2]; 2] {
        let dofs = self.local_velocity_dofs(t);
        let mut g = [[0.0; 2]; MAX_LOCAL];
        velocity_gradients(self.pair, lam, &self.geometry[t], &mut g);
        let mut out = [[0.0; 2]; 2];
        for (k, &s) in dofs.iter().enumerate() {
            for d in 0..2 {
                out[0][d] += coeffs[s] * g[k][d];
                out[1][d] += coeffs[self.n_scalar + s] * g[k][d];
            }
        }
        out
    }

    pub fn eval_pressure(&self, coeffs: &[f64], t: usize, lam: [f64; 3]) -> f64 {
        let mut phi = [0.0; MAX_LOCAL];
        pressure_values(lam, &mut phi);
        self.local_pressure_dofs(t)
            .iter()
            .enumerate()
            .map(|(k, &v)| coeffs[v] * phi[k])
            .sum()
    }

    /// Exact `∫_Ω p_h / |Ω|` for a P1 pressure.
    pub fn pressure_mean(&self, coeffs: &[f64]) -> f64 {
        let mut integral = 0.0;
        let mut area = 0.0;
        for t in 0..self.mesh.num_triangles() {
            let a = self.geometry[t].area;
            let [i, j, k] = self.mesh.triangle(t);
            integral += a * (coeffs[i] + coeffs[j] + coeffs[k]) / 3.0;
            area += a;
        }
        integral / area
    }

    /// Lagrange interpolant of a vector function; bubble coefficients are zero.
    pub fn interpolate_velocity(&self, f: impl Fn(Point) -> [f64; 2]) -> Field {
        let mut coeffs = vec![0.0; self.n_velocity()];
        for s in 0..self.n_scalar {
            if let Entity::Bubble(_) = self.velocity_dof_entity(s).0 {
                continue;
            }
            let v = f(self.scalar_dof_point(s));
            coeffs[s] = v[0];
            coeffs[self.n_scalar + s] = v[1];
        }
        Field::new(Role::Velocity, coeffs)
    }

    /// Vertex interpolant of a scalar function, optionally shifted to zero mean.
    pub fn interpolate_pressure(&self, f: impl Fn(Point) -> f64, remove_mean: bool) -> Field {
        let mut coeffs: Vec<f64> = self.mesh.vertices().iter().map(|&p| f(p)).collect();
        if remove_mean {
            let m = self.pressure_mean(&coeffs);
            coeffs.iter_mut().for_each(|c| *c -= m);
        }
        Field::new(Role::Pressure, coeffs)
    }

    pub fn check_field(&self, field: &Field) -> Result<()> {
        let expected = match field.role {
            Role::Velocity => self.n_velocity(),
            Role::Pressure => self.n_pressure(),
        };
        if field.coeffs.len() != expected {
            return Err(Error::invalid(format!(
                "{:?} field has {} coefficients, space expects {expected}",
                field.role,
                field.coeffs.len()
            )));
        }
        Ok(())
    }

    /// Vertex-value linearization `Π¹ u_h`: the continuous piecewise-linear
    /// field agreeing with `u_h` at mesh vertices.
    pub fn p1_linearize(&self, u: &Field) -> P1Field {
        let n = self.n_scalar;
        let values = (0..self.mesh.num_vertices())
            .map(|v| [u.coeffs[v], u.coeffs[n + v]])
            .collect();
        P1Field { values }
    }

    /// Embeds a P1 field back into the velocity space.
    pub fn from_p1(&self, w: &P1Field) -> Field {
        let nv = self.mesh.num_vertices();
        let mut coeffs = vec![0.0; self.n_velocity()];
        for (v, val) in w.values.iter().enumerate() {
            coeffs[v] = val[0];
            coeffs[self.n_scalar + v] = val[1];
        }
        if self.pair == ElementPair::TaylorHood {
            for (e, [a, b]) in self.mesh.edges().iter().enumerate() {
                for c in 0..2 {
                    coeffs[c * self.n_scalar + nv + e] = 0.5 * (w.values[*a][c] + w.values[*b][c]);
                }
            }
        }
        Field::new(Role::Velocity, coeffs)
    }
}

/// Coefficient vector of a velocity or pressure unknown.
#[derive(Debug, Clone, PartialEq)]
pub struct Field {
    pub role: Role,
    pub coeffs: Vec<f64>,
    pub time: Option<f64>,
}

impl Field {
    pub fn new(role: Role, coeffs: Vec<f64>) -> Self {
        Field {
            role,
            coeffs,
            time: None,
        }
    }

    pub fn zeros(space: &FESpace, role: Role) -> Self {
        let n = match role {
            Role::Velocity => space.n_velocity(),
            Role::Pressure => space.n_pressure(),
        };
        Field::new(role, vec![0.0; n])
    }

    pub fn at_time(mut self, t: f64) -> Self {
        self.time = Some(t);
        self
    }
}

/// Continuous piecewise-linear vector field given by its vertex values.
#[derive(Debug, Clone, PartialEq)]
pub struct P1Field {
    pub values: Vec<[f64; 2]>,
}

impl P1Field {
    pub fn zeros(nv: usize) -> Self {
        P1Field {
            values: vec![[0.0; 2]; nv],
        }
    }

    /// Constant gradient on element `t`: `grad[c][d] = ∂_d w_c`.
    pub fn gradient(&self, mesh: &Mesh, geom: &ElementGeometry, t: usize) -> [[f64; 2]; 2] {
        let tri = mesh.triangle(t);
        let mut g = [[0.0; 2]; 2];
        for (i, &v) in tri.iter().enumerate() {
            for c in 0..2 {
                for d in 0..2 {
                    g[c][d] += self.values[v][c] * geom.grad_lambda[i][d];
                }
            }
        }
        g
    }

    pub fn eval(&self, mesh: &Mesh, t: usize, lam: [f64; 3]) -> [f64; 2] {
        let tri = mesh.triangle(t);
        let mut w = [0.0; 2];
        for i in 0..3 {
            for c in 0..2 {
                w[c] += lam[i] * self.values[tri[i]][c];
            }
        }
        w
    }

    pub fn max_abs(&self) -> f64 {
        self.values
            .iter()
            .map(|v| v[0].hypot(v[1]))
            .fold(0.0, f64::max)
    }
}

/// `|w|_{1,∞}`: largest element-wise Frobenius norm of the gradient.
pub fn sup_grad_p1(space: &FESpace, w: &P1Field) -> f64 {
    let mesh = space.mesh();
    (0..mesh.num_triangles())
        .map(|t| {
            let g = w.gradient(mesh, space.geometry(t), t);
            (g[0][0].powi(2) + g[0][1].powi(2) + g[1][0].powi(2) + g[1][1].powi(2)).sqrt()
        })
        .fold(0.0, f64::max)
}
