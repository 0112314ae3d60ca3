use super::{AffineMap, ClipPolygon};
use crate::error::{Error, Result};
use crate::fem::quadrature::{QuadratureRule, DUNAVANT16};
use crate::mesh::{signed_area, Point};

/// Visits quadrature points of a convex polygon.
///
/// The polygon is fanned from its vertex average and `rule` is applied on
/// every sub-triangle; `visit` receives each physical point and its weight.
pub fn polygon_quadrature(vertices: &[Point], rule: &QuadratureRule, mut visit: impl FnMut(Point, f64)) {
    let n = vertices.len();
    if n < 3 {
        return;
    }
    let mut c = [0.0; 2];
    for v in vertices {
        c[0] += v[0];
        c[1] += v[1];
    }
    c[0] /= n as f64;
    c[1] /= n as f64;
    for i in 0..n {
        let (a, b) = (vertices[i], vertices[(i + 1) % n]);
        let area = signed_area(c, a, b);
        if area == 0.0 {
            continue;
        }
        for (lam, w) in &rule.points {
            let x = [
                lam[0] * c[0] + lam[1] * a[0] + lam[2] * b[0],
                lam[0] * c[1] + lam[1] * a[1] + lam[2] * b[1],
            ];
            visit(x, area * w);
        }
    }
}

/// `∫_E (g_target ∘ F) · g_source dx` for polynomials of the given degrees.
///
/// Exact up to rounding while `target_degree + source_degree` does not exceed
/// the degree of the sub-triangle rule.
pub fn integrate_poly_product(
    polygon: &ClipPolygon,
    map: &AffineMap,
    g_target: impl Fn(Point) -> f64,
    target_degree: usize,
    g_source: impl Fn(Point) -> f64,
    source_degree: usize,
) -> Result<f64> {
    let rule = &*DUNAVANT16;
    let required = target_degree + source_degree;
    if required > rule.degree {
        return Err(Error::QuadratureDegree {
            required,
            available: rule.degree,
        });
    }
    let mut sum = 0.0;
    polygon_quadrature(&polygon.vertices, rule, |x, w| {
        sum += w * g_target(map.apply(x)) * g_source(x);
    });
    Ok(sum)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::geometry::clip;

    const UNIT: [Point; 3] = [[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]];

    fn whole(k: [Point; 3]) -> ClipPolygon {
        clip(k, &AffineMap::identity(0), k, 0).unwrap().unwrap()
    }

    #[test]
    fn area_and_first_moment() {
        let e = whole(UNIT);
        let id = AffineMap::identity(0);
        let area = integrate_poly_product(&e, &id, |_| 1.0, 0, |_| 1.0, 0).unwrap();
        assert!((area - 0.5).abs() < 1e-15);
        let mx = integrate_poly_product(&e, &id, |y| y[0], 1, |_| 1.0, 0).unwrap();
        assert!((mx - 1.0 / 6.0).abs() < 1e-15);
    }

    #[test]
    fn monomial_moments_over_unit_triangle() {
        // ∫ x^a y^b over the unit triangle = a! b! / (a+b+2)!
        let fact = |n: u32| (1..=n).map(f64::from).product::<f64>();
        let e = whole(UNIT);
        let id = AffineMap::identity(0);
        for a in 0..=8u32 {
            for b in 0..=(8 - a) {
                let (ta, sb) = (a as i32, b as i32);
                let got = integrate_poly_product(&e, &id, |y| y[0].powi(ta), a as usize, |x| x[1].powi(sb), b as usize)
                    .unwrap();
                let exact = fact(a) * fact(b) / fact(a + b + 2);
                assert!((got - exact).abs() <= 1e-13 * exact, "x^{a} y^{b}: {got} vs {exact}");
            }
        }
    }

    #[test]
    fn too_high_degree_is_a_configuration_error() {
        let e = whole(UNIT);
        let err = integrate_poly_product(&e, &AffineMap::identity(0), |_| 1.0, 5, |_| 1.0, 4).unwrap_err();
        assert!(matches!(err, Error::QuadratureDegree { required: 9, available: 8 }));
    }
}
