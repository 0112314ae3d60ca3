use super::{signed_area, Mesh, Point};
use crate::error::{Error, Result};

/// Barycentric tolerance for containment.
const INSIDE_TOL: f64 = 1e-12;

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PointLocation {
    pub element: usize,
    /// Nonnegative, summing to one.
    pub barycentric: [f64; 3],
}

/// Walking point locator with a per-caller start cache.
///
/// The walk moves across the edge with the most negative barycentric
/// coordinate. It falls back to a linear scan when it hits the boundary or
/// exceeds its step budget. Ties on shared edges and vertices resolve to the
/// lowest element id.
#[derive(Debug, Clone)]
pub struct Locator<'m> {
    mesh: &'m Mesh,
    last: usize,
    max_steps: usize,
}

impl<'m> Locator<'m> {
    pub fn new(mesh: &'m Mesh) -> Self {
        let max_steps = 4 * (mesh.num_triangles() as f64).sqrt() as usize + 16;
        Locator {
            mesh,
            last: 0,
            max_steps,
        }
    }

    pub fn with_hint(mut self, element: usize) -> Self {
        self.set_hint(element);
        self
    }

    pub fn set_hint(&mut self, element: usize) {
        if element < self.mesh.num_triangles() {
            self.last = element;
        }
    }

    pub fn locate(&mut self, p: Point) -> Result<PointLocation> {
        if !p[0].is_finite() || !p[1].is_finite() {
            return Err(Error::OutOfDomain { x: p[0], y: p[1] });
        }
        let found = self.walk(p).or_else(|| self.scan(p));
        match found {
            Some(t) => {
                let t = self.lowest_containing(t, p);
                self.last = t;
                Ok(PointLocation {
                    element: t,
                    barycentric: clamp(barycentric(self.mesh, t, p)),
                })
            }
            None => Err(Error::OutOfDomain { x: p[0], y: p[1] }),
        }
    }

    fn walk(&self, p: Point) -> Option<usize> {
        let mut t = self.last;
        for _ in 0..self.max_steps {
            let lam = barycentric(self.mesh, t, p);
            let (k, min) = lam
                .iter()
                .enumerate()
                .fold((0, f64::INFINITY), |acc, (k, &l)| if l < acc.1 { (k, l) } else { acc });
            if min >= -INSIDE_TOL {
                return Some(t);
            }
            t = self.mesh.neighbor(t, k)?;
        }
        None
    }

    fn scan(&self, p: Point) -> Option<usize> {
        (0..self.mesh.num_triangles()).find(|&t| contains(self.mesh, t, p))
    }

    fn lowest_containing(&self, t: usize, p: Point) -> usize {
        let lam = barycentric(self.mesh, t, p);
        if lam.iter().all(|&l| l > INSIDE_TOL) {
            return t;
        }
        // on an edge or vertex: every containing element touches a vertex of t
        let mut best = t;
        for &v in &self.mesh.triangle(t) {
            for &s in self.mesh.vertex_triangles(v) {
                if s < best && contains(self.mesh, s, p) {
                    best = s;
                }
            }
        }
        best
    }
}

pub(crate) fn barycentric(mesh: &Mesh, t: usize, p: Point) -> [f64; 3] {
    let [a, b, c] = mesh.corners(t);
    let area = signed_area(a, b, c);
    [
        signed_area(p, b, c) / area,
        signed_area(a, p, c) / area,
        signed_area(a, b, p) / area,
    ]
}

fn contains(mesh: &Mesh, t: usize, p: Point) -> bool {
    barycentric(mesh, t, p).iter().all(|&l| l >= -INSIDE_TOL)
}

fn clamp(lam: [f64; 3]) -> [f64; 3] {
    let c = lam.map(|l| l.max(0.0));
    let s: f64 = c.iter().sum();
    c.map(|l| l / s)
}
