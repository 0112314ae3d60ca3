use arrayvec::ArrayVec;

use super::AffineMap;
use crate::error::{Error, Result};
use crate::mesh::{signed_area, Point};

/// A triangle clipped by three half-planes has at most six vertices.
pub const MAX_CLIP_VERTICES: usize = 8;

/// Slivers below this fraction of the source area are dropped.
pub const SLIVER_AREA_FRACTION: f64 = 1e-14;
/// Vertex merge distance relative to the source diameter.
pub const DEDUP_FRACTION: f64 = 1e-13;

pub type PolygonVertices = ArrayVec<Point, MAX_CLIP_VERTICES>;

/// Convex polygon `K0 ∩ F⁻¹(K1)`, counterclockwise.
#[derive(Debug, Clone, PartialEq)]
pub struct ClipPolygon {
    pub vertices: PolygonVertices,
    pub source_element: usize,
    pub target_element: usize,
}

impl ClipPolygon {
    pub fn area(&self) -> f64 {
        polygon_area(&self.vertices)
    }
}

pub fn polygon_area(v: &[Point]) -> f64 {
    let n = v.len();
    if n < 3 {
        return 0.0;
    }
    let mut s = 0.0;
    for i in 0..n {
        let (a, b) = (v[i], v[(i + 1) % n]);
        s += a[0] * b[1] - b[0] * a[1];
    }
    0.5 * s
}

/// Clips triangle `k0` against the preimage of triangle `k1` under `map`.
///
/// Each side of `k1` pulls back to a half-plane `λ_j(F(x)) ≥ 0`; the
/// polygon is cut successively against the three of them, with crossing
/// points found by linear interpolation of the (affine) barycentric values.
/// Returns `None` when the intersection is empty or a sliver.
pub fn clip(k0: [Point; 3], map: &AffineMap, k1: [Point; 3], target_element: usize) -> Result<Option<ClipPolygon>> {
    let det = map.det();
    if !(det.abs() > 1e-14) {
        return Err(Error::SingularMap {
            element: map.source_element,
            det,
        });
    }
    let area0 = signed_area(k0[0], k0[1], k0[2]).abs();
    let area1 = signed_area(k1[0], k1[1], k1[2]);
    let diam = diameter(&k0);

    let mut poly: PolygonVertices = k0.iter().copied().collect();
    let mut next = PolygonVertices::new();
    for j in 0..3 {
        let (p, q) = (k1[(j + 1) % 3], k1[(j + 2) % 3]);
        let level = |x: Point| signed_area(map.apply(x), p, q) / area1;
        let values: ArrayVec<f64, MAX_CLIP_VERTICES> = poly.iter().map(|&x| level(x)).collect();
        next.clear();
        let n = poly.len();
        for i in 0..n {
            let (a, b) = (poly[i], poly[(i + 1) % n]);
            let (la, lb) = (values[i], values[(i + 1) % n]);
            if la >= 0.0 {
                next.push(a);
            }
            if (la >= 0.0) != (lb >= 0.0) {
                let s = la / (la - lb);
                next.push([a[0] + s * (b[0] - a[0]), a[1] + s * (b[1] - a[1])]);
            }
        }
        dedup(&mut next, DEDUP_FRACTION * diam);
        if next.len() < 3 {
            return Ok(None);
        }
        std::mem::swap(&mut poly, &mut next);
    }
    if polygon_area(&poly) <= SLIVER_AREA_FRACTION * area0 {
        return Ok(None);
    }
    Ok(Some(ClipPolygon {
        vertices: poly,
        source_element: map.source_element,
        target_element,
    }))
}

fn dedup(v: &mut PolygonVertices, tol: f64) {
    let close = |a: Point, b: Point| (a[0] - b[0]).abs() <= tol && (a[1] - b[1]).abs() <= tol;
    let mut out = PolygonVertices::new();
    for &p in v.iter() {
        if out.last().is_none_or(|&q| !close(p, q)) {
            out.push(p);
        }
    }
    while out.len() > 1 && close(out[0], *out.last().unwrap()) {
        out.pop();
    }
    *v = out;
}

fn diameter(k: &[Point; 3]) -> f64 {
    let d = |a: Point, b: Point| ((a[0] - b[0]).powi(2) + (a[1] - b[1]).powi(2)).sqrt();
    d(k[0], k[1]).max(d(k[1], k[2])).max(d(k[2], k[0]))
}
