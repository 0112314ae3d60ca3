use super::{clip, AffineMap, ClipPolygon};
use crate::error::{Error, Result};
use crate::mesh::{Locator, Mesh, Point};

/// Image vertices may leave the domain by this much before it is an error.
pub const SNAP_TOL: f64 = 1e-12;

/// All positive-area pieces `K0 ∩ F⁻¹(K1)` over target elements `K1`.
///
/// The search starts at the element containing the image of the centroid
/// and walks the neighbor graph, visiting elements whose bounding box meets
/// the bounding box of `F(K0)`. Elements meeting the image with positive
/// area form an edge-connected set, so the walk reaches all of them.
pub fn find_overlaps(mesh: &Mesh, source: usize, map: &AffineMap, locator: &mut Locator<'_>) -> Result<Vec<ClipPolygon>> {
    let k0 = mesh.corners(source);
    let image = k0.map(|x| map.apply(x));
    let [lo, hi] = mesh.bbox();
    for p in &image {
        if p[0] < lo[0] - SNAP_TOL || p[0] > hi[0] + SNAP_TOL || p[1] < lo[1] - SNAP_TOL || p[1] > hi[1] + SNAP_TOL {
            return Err(Error::Admissibility { element: source });
        }
    }
    let centroid = [
        (image[0][0] + image[1][0] + image[2][0]) / 3.0,
        (image[0][1] + image[1][1] + image[2][1]) / 3.0,
    ];
    let start = locator
        .locate(snap(centroid, lo, hi))
        .map_err(|_| Error::Admissibility { element: source })?
        .element;

    let eps = SNAP_TOL * (1.0 + mesh.h_param());
    let mut ilo = [f64::INFINITY; 2];
    let mut ihi = [f64::NEG_INFINITY; 2];
    for p in &image {
        for d in 0..2 {
            ilo[d] = ilo[d].min(p[d] - eps);
            ihi[d] = ihi[d].max(p[d] + eps);
        }
    }
    let meets_image = |t: usize| {
        let c = mesh.corners(t);
        (0..2).all(|d| {
            let tmin = c[0][d].min(c[1][d]).min(c[2][d]);
            let tmax = c[0][d].max(c[1][d]).max(c[2][d]);
            tmin <= ihi[d] && tmax >= ilo[d]
        })
    };

    let mut visited = vec![start];
    let mut queue = vec![start];
    let mut pieces = Vec::new();
    while let Some(t) = queue.pop() {
        if let Some(piece) = clip(k0, map, mesh.corners(t), t)? {
            pieces.push(piece);
        }
        for n in mesh.neighbors(t).into_iter().flatten() {
            if !visited.contains(&n) && meets_image(n) {
                visited.push(n);
                queue.push(n);
            }
        }
    }
    pieces.sort_by_key(|p| p.target_element);
    Ok(pieces)
}

fn snap(p: Point, lo: Point, hi: Point) -> Point {
    [p[0].clamp(lo[0], hi[0]), p[1].clamp(lo[1], hi[1])]
}
