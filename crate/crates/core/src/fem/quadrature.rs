//! Symmetric quadrature rules on triangles.
//!
//! Points are barycentric; weights sum to one, so a rule approximates
//! `∫_K g ≈ |K| Σ w_q g(a_q)`.

use std::sync::LazyLock;

#[derive(Debug, Clone)]
pub struct QuadratureRule {
    pub name: &'static str,
    /// Highest total polynomial degree integrated exactly.
    pub degree: usize,
    pub points: Vec<([f64; 3], f64)>,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.points.len()
    }

    pub fn is_empty(&self) -> bool {
        self.points.is_empty()
    }
}

fn orbit_centroid(w: f64, out: &mut Vec<([f64; 3], f64)>) {
    out.push(([1.0 / 3.0; 3], w));
}

fn orbit_21(a: f64, w: f64, out: &mut Vec<([f64; 3], f64)>) {
    let b = 1.0 - 2.0 * a;
    out.push(([a, a, b], w));
    out.push(([a, b, a], w));
    out.push(([b, a, a], w));
}

fn orbit_111(a: f64, b: f64, w: f64, out: &mut Vec<([f64; 3], f64)>) {
    let c = 1.0 - a - b;
    for p in [[a, b, c], [a, c, b], [b, a, c], [b, c, a], [c, a, b], [c, b, a]] {
        out.push((p, w));
    }
}

/// 3-point edge-midpoint rule, degree 2.
pub static MIDPOINT3: LazyLock<QuadratureRule> = LazyLock::new(|| {
    let mut points = Vec::new();
    orbit_21(0.5, 1.0 / 3.0, &mut points);
    QuadratureRule {
        name: "midpoint-3",
        degree: 2,
        points,
    }
});

/// Hammer–Marlowe–Stroud seven-point rule, degree 5.
pub static HMS7: LazyLock<QuadratureRule> = LazyLock::new(|| {
    let s15 = 15f64.sqrt();
    let mut points = Vec::new();
    orbit_centroid(9.0 / 40.0, &mut points);
    orbit_21((6.0 - s15) / 21.0, (155.0 - s15) / 1200.0, &mut points);
    orbit_21((6.0 + s15) / 21.0, (155.0 + s15) / 1200.0, &mut points);
    QuadratureRule {
        name: "hms-7",
        degree: 5,
        points,
    }
});

/// Dunavant sixteen-point rule, degree 8.
pub static DUNAVANT16: LazyLock<QuadratureRule> = LazyLock::new(|| {
    let mut points = Vec::new();
    orbit_centroid(0.144_315_607_677_787, &mut points);
    orbit_21(0.459_292_588_292_723, 0.095_091_634_267_285, &mut points);
    orbit_21(0.170_569_307_751_760, 0.103_217_370_534_718, &mut points);
    orbit_21(0.050_547_228_317_031, 0.032_458_497_623_198, &mut points);
    orbit_111(0.008_394_777_409_958, 0.263_112_829_634_638, 0.027_230_314_174_435, &mut points);
    QuadratureRule {
        name: "dunavant-16",
        degree: 8,
        points,
    }
});

#[cfg(test)]
mod tests {
    use super::*;

    fn factorial(n: u32) -> f64 {
        (1..=n).map(f64::from).product()
    }

    /// ∫_K λ0^a λ1^b λ2^c / |K| = 2 a! b! c! / (a+b+c+2)!
    fn exact_moment(a: u32, b: u32, c: u32) -> f64 {
        2.0 * factorial(a) * factorial(b) * factorial(c) / factorial(a + b + c + 2)
    }

    fn check_rule(rule: &QuadratureRule, tol: f64) {
        let wsum: f64 = rule.points.iter().map(|p| p.1).sum();
        assert!((wsum - 1.0).abs() < tol, "{}: weights sum {wsum}", rule.name);
        let d = rule.degree as u32;
        for a in 0..=d {
            for b in 0..=(d - a) {
                for c in 0..=(d - a - b) {
                    let q: f64 = rule
                        .points
                        .iter()
                        .map(|(l, w)| w * l[0].powi(a as i32) * l[1].powi(b as i32) * l[2].powi(c as i32))
                        .sum();
                    let e = exact_moment(a, b, c);
                    assert!((q - e).abs() <= tol * e.max(1e-3), "{} moment ({a},{b},{c}): {q} vs {e}", rule.name);
                }
            }
        }
    }

    #[test]
    fn midpoint_is_degree_two() {
        check_rule(&MIDPOINT3, 1e-15);
    }

    #[test]
    fn hms7_integrates_all_monomials_to_degree_five() {
        check_rule(&HMS7, 1e-14);
        // and not degree 6
        let q: f64 = HMS7.points.iter().map(|(l, w)| w * l[0].powi(6)).sum();
        assert!((q - exact_moment(6, 0, 0)).abs() > 1e-6);
    }

    #[test]
    fn dunavant16_integrates_all_monomials_to_degree_eight() {
        // published coefficients carry 15 digits
        check_rule(&DUNAVANT16, 1e-13);
    }
}
