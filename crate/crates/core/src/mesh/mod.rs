//! Conforming triangulations of a planar polygonal domain.
//!
//! A [`Mesh`] owns its vertex coordinates and counterclockwise triangles and
//! derives the edge table, per-edge neighbor relation and boundary markers
//! on construction. It is immutable afterwards.

mod io;
mod locate;
mod structured;

use std::collections::HashMap;

pub use io::{load_mesh, read_mesh, write_mesh};
pub use locate::{Locator, PointLocation};
pub use structured::{generate_structured_unit_square, Pattern};

use crate::error::{Error, Result};

pub type Point = [f64; 2];

#[derive(Debug, Clone)]
pub struct Mesh {
    vertices: Vec<Point>,
    triangles: Vec<[usize; 3]>,
    /// Edge `e` joins `edges[e][0] < edges[e][1]`.
    edges: Vec<[usize; 2]>,
    /// Local edge `k` of a triangle is the one opposite its local vertex `k`.
    triangle_edges: Vec<[usize; 3]>,
    neighbors: Vec<[Option<usize>; 3]>,
    boundary_vertex: Vec<bool>,
    boundary_edge: Vec<bool>,
    vertex_triangles: Vec<Vec<usize>>,
    h_param: f64,
    bbox: [Point; 2],
}

impl Mesh {
    /// Builds a mesh from raw connectivity.
    ///
    /// Clockwise triangles are reoriented. `boundary_flags`, when given, are
    /// OR-ed with the topological boundary. `h_param` defaults to the
    /// longest edge.
    pub fn new(
        vertices: Vec<Point>,
        mut triangles: Vec<[usize; 3]>,
        boundary_flags: Option<Vec<bool>>,
        h_param: Option<f64>,
    ) -> Result<Self> {
        if vertices.len() < 3 || triangles.is_empty() {
            return Err(Error::invalid("mesh needs at least 3 vertices and 1 triangle"));
        }
        for (k, tri) in triangles.iter_mut().enumerate() {
            if tri.iter().any(|&v| v >= vertices.len()) {
                return Err(Error::invalid(format!("triangle {k} references a missing vertex")));
            }
            let area = signed_area(vertices[tri[0]], vertices[tri[1]], vertices[tri[2]]);
            if area == 0.0 || !area.is_finite() {
                return Err(Error::SingularGeometry { element: k, area });
            }
            if area < 0.0 {
                tri.swap(1, 2);
            }
        }

        let mut edge_ids: HashMap<(usize, usize), usize> = HashMap::new();
        let mut edges = Vec::new();
        let mut edge_owners: Vec<Vec<(usize, usize)>> = Vec::new();
        let mut triangle_edges = Vec::with_capacity(triangles.len());
        for (t, tri) in triangles.iter().enumerate() {
            let mut local = [0; 3];
            for (k, slot) in local.iter_mut().enumerate() {
                let a = tri[(k + 1) % 3];
                let b = tri[(k + 2) % 3];
                let key = (a.min(b), a.max(b));
                let id = *edge_ids.entry(key).or_insert_with(|| {
                    edges.push([key.0, key.1]);
                    edge_owners.push(Vec::new());
                    edges.len() - 1
                });
                edge_owners[id].push((t, k));
                *slot = id;
            }
            triangle_edges.push(local);
        }

        let mut neighbors = vec![[None; 3]; triangles.len()];
        let mut boundary_edge = vec![false; edges.len()];
        let mut boundary_vertex = vec![false; vertices.len()];
        for (e, owners) in edge_owners.iter().enumerate() {
            match owners.as_slice() {
                [_] => {
                    boundary_edge[e] = true;
                    boundary_vertex[edges[e][0]] = true;
                    boundary_vertex[edges[e][1]] = true;
                }
                [(t0, k0), (t1, k1)] => {
                    neighbors[*t0][*k0] = Some(*t1);
                    neighbors[*t1][*k1] = Some(*t0);
                }
                _ => {
                    return Err(Error::invalid(format!(
                        "non-conforming mesh: edge {:?} shared by {} triangles",
                        edges[e],
                        owners.len()
                    )))
                }
            }
        }
        if let Some(flags) = boundary_flags {
            if flags.len() != vertices.len() {
                return Err(Error::invalid("boundary flag count does not match vertex count"));
            }
            for (b, f) in boundary_vertex.iter_mut().zip(flags) {
                *b |= f;
            }
        }

        let mut vertex_triangles = vec![Vec::new(); vertices.len()];
        for (t, tri) in triangles.iter().enumerate() {
            for &v in tri {
                vertex_triangles[v].push(t);
            }
        }

        let mut lo = [f64::INFINITY; 2];
        let mut hi = [f64::NEG_INFINITY; 2];
        for p in &vertices {
            for d in 0..2 {
                lo[d] = lo[d].min(p[d]);
                hi[d] = hi[d].max(p[d]);
            }
        }

        let mut mesh = Mesh {
            vertices,
            triangles,
            edges,
            triangle_edges,
            neighbors,
            boundary_vertex,
            boundary_edge,
            vertex_triangles,
            h_param: 0.0,
            bbox: [lo, hi],
        };
        mesh.h_param = match h_param {
            Some(h) => h,
            None => mesh.quality().h_max,
        };
        Ok(mesh)
    }

    pub fn num_vertices(&self) -> usize {
        self.vertices.len()
    }

    pub fn num_triangles(&self) -> usize {
        self.triangles.len()
    }

    pub fn num_edges(&self) -> usize {
        self.edges.len()
    }

    pub fn vertices(&self) -> &[Point] {
        &self.vertices
    }

    pub fn vertex(&self, v: usize) -> Point {
        self.vertices[v]
    }

    pub fn triangles(&self) -> &[[usize; 3]] {
        &self.triangles
    }

    pub fn triangle(&self, t: usize) -> [usize; 3] {
        self.triangles[t]
    }

    pub fn edges(&self) -> &[[usize; 2]] {
        &self.edges
    }

    pub fn triangle_edges(&self, t: usize) -> [usize; 3] {
        self.triangle_edges[t]
    }

    /// Neighbor across local edge `k` (opposite local vertex `k`).
    pub fn neighbor(&self, t: usize, k: usize) -> Option<usize> {
        self.neighbors[t][k]
    }

    pub fn neighbors(&self, t: usize) -> [Option<usize>; 3] {
        self.neighbors[t]
    }

    pub fn is_boundary_vertex(&self, v: usize) -> bool {
        self.boundary_vertex[v]
    }

    pub fn is_boundary_edge(&self, e: usize) -> bool {
        self.boundary_edge[e]
    }

    pub fn boundary_vertices(&self) -> &[bool] {
        &self.boundary_vertex
    }

    pub fn vertex_triangles(&self, v: usize) -> &[usize] {
        &self.vertex_triangles[v]
    }

    pub fn h_param(&self) -> f64 {
        self.h_param
    }

    /// Axis-aligned bounding box `[lower, upper]` of the vertex set.
    pub fn bbox(&self) -> [Point; 2] {
        self.bbox
    }

    pub fn corners(&self, t: usize) -> [Point; 3] {
        let [a, b, c] = self.triangles[t];
        [self.vertices[a], self.vertices[b], self.vertices[c]]
    }

    pub fn area(&self, t: usize) -> f64 {
        let [a, b, c] = self.corners(t);
        signed_area(a, b, c)
    }

    pub fn total_area(&self) -> f64 {
        (0..self.num_triangles()).map(|t| self.area(t)).sum()
    }

    pub fn centroid(&self, t: usize) -> Point {
        let [a, b, c] = self.corners(t);
        [(a[0] + b[0] + c[0]) / 3.0, (a[1] + b[1] + c[1]) / 3.0]
    }

    pub fn edge_midpoint(&self, e: usize) -> Point {
        let [a, b] = self.edges[e];
        let (pa, pb) = (self.vertices[a], self.vertices[b]);
        [0.5 * (pa[0] + pb[0]), 0.5 * (pa[1] + pb[1])]
    }

    /// Largest element diameter and largest diameter/inradius ratio.
    pub fn quality(&self) -> MeshQuality {
        let mut h_max = 0.0f64;
        let mut shape_ratio = 0.0f64;
        for t in 0..self.num_triangles() {
            let [a, b, c] = self.corners(t);
            let lengths = [dist(b, c), dist(c, a), dist(a, b)];
            let diam = lengths.iter().cloned().fold(0.0, f64::max);
            let perimeter: f64 = lengths.iter().sum();
            let inradius = 2.0 * signed_area(a, b, c) / perimeter;
            h_max = h_max.max(diam);
            shape_ratio = shape_ratio.max(diam / inradius);
        }
        MeshQuality { h_max, shape_ratio }
    }

    pub fn locator(&self) -> Locator<'_> {
        Locator::new(self)
    }

    /// One-shot point location. Hot loops should keep a [`Locator`].
    pub fn locate(&self, p: Point) -> Result<PointLocation> {
        self.locator().locate(p)
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct MeshQuality {
    pub h_max: f64,
    pub shape_ratio: f64,
}

pub fn signed_area(a: Point, b: Point, c: Point) -> f64 {
    0.5 * ((b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]))
}

fn dist(a: Point, b: Point) -> f64 {
    ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn equilateral_shape_ratio() {
        let s3 = 3f64.sqrt();
        let mesh = Mesh::new(
            vec![[0.0, 0.0], [1.0, 0.0], [0.5, 0.5 * s3]],
            vec![[0, 1, 2]],
            None,
            None,
        )
        .unwrap();
        let q = mesh.quality();
        assert!((q.shape_ratio - 2.0 * s3).abs() < 1e-12);
        assert!((q.h_max - 1.0).abs() < 1e-15);
    }

    #[test]
    fn clockwise_input_is_reoriented() {
        let mesh = Mesh::new(
            vec![[0.0, 0.0], [0.0, 1.0], [1.0, 0.0]],
            vec![[0, 1, 2]],
            None,
            None,
        )
        .unwrap();
        assert!(mesh.area(0) > 0.0);
        assert!(mesh.boundary_vertices().iter().all(|&b| b));
    }

    #[test]
    fn degenerate_triangle_rejected() {
        let err = Mesh::new(
            vec![[0.0, 0.0], [1.0, 0.0], [2.0, 0.0]],
            vec![[0, 1, 2]],
            None,
            None,
        )
        .unwrap_err();
        assert!(matches!(err, Error::SingularGeometry { element: 0, .. }));
    }

    #[test]
    fn non_conforming_rejected() {
        // three triangles on one edge
        let err = Mesh::new(
            vec![[0.0, 0.0], [1.0, 0.0], [0.5, 1.0], [0.5, -1.0], [0.5, 2.0]],
            vec![[0, 1, 2], [0, 3, 1], [0, 1, 4]],
            None,
            None,
        )
        .unwrap_err();
        assert!(matches!(err, Error::InvalidArgument(_)));
    }
}
