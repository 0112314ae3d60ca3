//! Element-wise affine foot maps, triangle/preimage clipping and exact
//! polynomial integration over the resulting convex polygons.

mod affine;
mod clip;
mod integrate;
mod overlap;

pub use affine::{foot_map_on_element, AffineMap};
pub use clip::{clip, polygon_area, ClipPolygon, PolygonVertices, DEDUP_FRACTION, SLIVER_AREA_FRACTION};
pub use integrate::{integrate_poly_product, polygon_quadrature};
pub use overlap::{find_overlaps, SNAP_TOL};
