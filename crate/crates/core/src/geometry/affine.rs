use crate::error::{Error, Result};
use crate::fem::{ElementGeometry, P1Field};
use crate::mesh::{Mesh, Point};

/// `x ↦ matrix·x + offset`, the foot map restricted to one source element.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct AffineMap {
    pub matrix: [[f64; 2]; 2],
    pub offset: [f64; 2],
    pub source_element: usize,
}

impl AffineMap {
    pub fn identity(source_element: usize) -> Self {
        AffineMap {
            matrix: [[1.0, 0.0], [0.0, 1.0]],
            offset: [0.0, 0.0],
            source_element,
        }
    }

    pub fn translation(shift: [f64; 2], source_element: usize) -> Self {
        AffineMap {
            offset: shift,
            ..AffineMap::identity(source_element)
        }
    }

    #[inline]
    pub fn apply(&self, x: Point) -> Point {
        let m = &self.matrix;
        [
            m[0][0] * x[0] + m[0][1] * x[1] + self.offset[0],
            m[1][0] * x[0] + m[1][1] * x[1] + self.offset[1],
        ]
    }

    pub fn det(&self) -> f64 {
        let m = &self.matrix;
        m[0][0] * m[1][1] - m[0][1] * m[1][0]
    }
}

/// Affine foot map `x − dt·w(x)` on element `t` for a piecewise-linear `w`.
///
/// Agrees with the pointwise map at the three vertices, hence on the whole
/// element.
pub fn foot_map_on_element(
    mesh: &Mesh,
    geom: &ElementGeometry,
    w: &P1Field,
    dt: f64,
    t: usize,
) -> Result<AffineMap> {
    if !(geom.area.abs() > 1e-300) {
        return Err(Error::SingularGeometry {
            element: t,
            area: geom.area,
        });
    }
    let grad = w.gradient(mesh, geom, t);
    let matrix = [
        [1.0 - dt * grad[0][0], -dt * grad[0][1]],
        [-dt * grad[1][0], 1.0 - dt * grad[1][1]],
    ];
    let v0 = mesh.triangle(t)[0];
    let x0 = mesh.vertex(v0);
    let w0 = w.values[v0];
    let offset = [
        x0[0] - dt * w0[0] - (matrix[0][0] * x0[0] + matrix[0][1] * x0[1]),
        x0[1] - dt * w0[1] - (matrix[1][0] * x0[0] + matrix[1][1] * x0[1]),
    ];
    Ok(AffineMap {
        matrix,
        offset,
        source_element: t,
    })
}
