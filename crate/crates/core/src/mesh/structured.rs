use std::fmt;
use std::str::FromStr;

use serde::{Deserialize, Serialize};

use super::Mesh;
use crate::error::{Error, Result};

/// Splitting of each grid square into triangles.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Pattern {
    /// Two right triangles per square, diagonal from lower-left to upper-right.
    Right,
    /// Four triangles per square meeting at an added center vertex.
    Crisscross,
}

impl fmt::Display for Pattern {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Pattern::Right => "right",
            Pattern::Crisscross => "crisscross",
        })
    }
}

impl FromStr for Pattern {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "right" => Ok(Pattern::Right),
            "crisscross" => Ok(Pattern::Crisscross),
            other => Err(Error::invalid(format!("unknown mesh pattern '{other}'"))),
        }
    }
}

/// Uniform triangulation of the unit square with `n` divisions per side.
///
/// Grid vertex `(i, j)` has index `j * (n + 1) + i`; crisscross centers
/// follow all grid vertices in the same row-major order. `h_param` is `1/n`.
pub fn generate_structured_unit_square(n: usize, pattern: Pattern) -> Result<Mesh> {
    if n < 2 {
        return Err(Error::invalid(format!("division number must be >= 2, got {n}")));
    }
    let h = 1.0 / n as f64;
    let grid = |i: usize, j: usize| j * (n + 1) + i;

    let mut vertices = Vec::with_capacity((n + 1) * (n + 1));
    for j in 0..=n {
        for i in 0..=n {
            // i as f64 / n keeps the far side exactly at 1.0
            vertices.push([i as f64 / n as f64, j as f64 / n as f64]);
        }
    }

    let mut triangles = Vec::new();
    match pattern {
        Pattern::Right => {
            for j in 0..n {
                for i in 0..n {
                    let (v00, v10, v11, v01) =
                        (grid(i, j), grid(i + 1, j), grid(i + 1, j + 1), grid(i, j + 1));
                    triangles.push([v00, v10, v11]);
                    triangles.push([v00, v11, v01]);
                }
            }
        }
        Pattern::Crisscross => {
            let base = vertices.len();
            for j in 0..n {
                for i in 0..n {
                    vertices.push([(i as f64 + 0.5) * h, (j as f64 + 0.5) * h]);
                }
            }
            for j in 0..n {
                for i in 0..n {
                    let c = base + j * n + i;
                    let (v00, v10, v11, v01) =
                        (grid(i, j), grid(i + 1, j), grid(i + 1, j + 1), grid(i, j + 1));
                    triangles.push([v00, v10, c]);
                    triangles.push([v10, v11, c]);
                    triangles.push([v11, v01, c]);
                    triangles.push([v01, v00, c]);
                }
            }
        }
    }
    Mesh::new(vertices, triangles, None, Some(h))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn right_n2_counts() {
        let m = generate_structured_unit_square(2, Pattern::Right).unwrap();
        assert_eq!(m.num_vertices(), 9);
        assert_eq!(m.num_triangles(), 8);
        assert!((m.total_area() - 1.0).abs() < 1e-12);
        assert!((m.quality().h_max - 0.5f64.sqrt()).abs() < 1e-15);
    }

    #[test]
    fn h_param_is_inverse_division() {
        let m = generate_structured_unit_square(16, Pattern::Right).unwrap();
        assert_eq!(m.h_param(), 0.0625);
    }

    #[test]
    fn crisscross_every_triangle_has_interior_vertex() {
        let m = generate_structured_unit_square(4, Pattern::Crisscross).unwrap();
        assert_eq!(m.num_triangles(), 64);
        for t in 0..m.num_triangles() {
            let interior = m.triangle(t).iter().any(|&v| {
                let [x, y] = m.vertex(v);
                x > 0.0 && x < 1.0 && y > 0.0 && y < 1.0
            });
            assert!(interior, "triangle {t}");
        }
    }

    #[test]
    fn right_pattern_corner_triangles_lack_interior_vertex() {
        let m = generate_structured_unit_square(4, Pattern::Right).unwrap();
        let all_boundary = (0..m.num_triangles())
            .filter(|&t| m.triangle(t).iter().all(|&v| m.is_boundary_vertex(v)))
            .count();
        assert_eq!(all_boundary, 2);
    }

    #[test]
    fn shape_ratio_is_scale_invariant() {
        let a = generate_structured_unit_square(2, Pattern::Right).unwrap().quality();
        let b = generate_structured_unit_square(16, Pattern::Right).unwrap().quality();
        assert!((a.shape_ratio - b.shape_ratio).abs() < 1e-12);
        assert!((a.shape_ratio - (2.0 + 2.0 * 2f64.sqrt())).abs() < 1e-12);
    }

    #[test]
    fn too_coarse_rejected() {
        assert!(generate_structured_unit_square(1, Pattern::Right).is_err());
    }
}
