use super::SparseMatrix;
use crate::error::{Error, Result};
use crate::fem::quadrature::DUNAVANT16;
use crate::fem::{pressure_values, velocity_gradients, velocity_values, FESpace, MAX_LOCAL};
use crate::mesh::Point;

/// Velocity mass matrix `M_ij = ∫ φ_j · φ_i`, block diagonal in components.
pub fn assemble_mass(space: &FESpace) -> SparseMatrix {
    let n = space.n_scalar();
    let mut trip = Vec::new();
    let mut phi = [0.0; MAX_LOCAL];
    for t in 0..space.mesh().num_triangles() {
        let geom = space.geometry(t);
        let dofs = space.local_velocity_dofs(t);
        let mut local = [[0.0; MAX_LOCAL]; MAX_LOCAL];
        for (lam, w) in &DUNAVANT16.points {
            let m = velocity_values(space.pair(), *lam, &mut phi);
            for i in 0..m {
                for j in i..m {
                    local[i][j] += geom.area * w * phi[i] * phi[j];
                }
            }
        }
        for (i, &si) in dofs.iter().enumerate() {
            for (j, &sj) in dofs.iter().enumerate() {
                let v = if j >= i { local[i][j] } else { local[j][i] };
                trip.push((si, sj, v));
                trip.push((n + si, n + sj, v));
            }
        }
    }
    SparseMatrix::from_triplets(2 * n, 2 * n, &trip)
}

/// Scalar P1 mass matrix on the pressure space.
pub fn assemble_pressure_mass(space: &FESpace) -> SparseMatrix {
    let mesh = space.mesh();
    let mut trip = Vec::new();
    for t in 0..mesh.num_triangles() {
        let a = space.geometry(t).area;
        let dofs = space.local_pressure_dofs(t);
        for i in 0..3 {
            for j in 0..3 {
                trip.push((dofs[i], dofs[j], a * if i == j { 2.0 } else { 1.0 } / 12.0));
            }
        }
    }
    let np = space.n_pressure();
    SparseMatrix::from_triplets(np, np, &trip)
}

/// Vector Laplacian `A_ij = ν ∫ ∇φ_j : ∇φ_i`.
pub fn assemble_stiffness(space: &FESpace, nu: f64) -> Result<SparseMatrix> {
    if !(nu > 0.0) {
        return Err(Error::invalid(format!("viscosity must be positive, got {nu}")));
    }
    let n = space.n_scalar();
    let mut trip = Vec::new();
    let mut grad = [[0.0; 2]; MAX_LOCAL];
    for t in 0..space.mesh().num_triangles() {
        let geom = space.geometry(t);
        let dofs = space.local_velocity_dofs(t);
        let mut local = [[0.0; MAX_LOCAL]; MAX_LOCAL];
        for (lam, w) in &DUNAVANT16.points {
            let m = velocity_gradients(space.pair(), *lam, geom, &mut grad);
            for i in 0..m {
                for j in i..m {
                    local[i][j] += nu * geom.area * w * (grad[i][0] * grad[j][0] + grad[i][1] * grad[j][1]);
                }
            }
        }
        for (i, &si) in dofs.iter().enumerate() {
            for (j, &sj) in dofs.iter().enumerate() {
                let v = if j >= i { local[i][j] } else { local[j][i] };
                trip.push((si, sj, v));
                trip.push((n + si, n + sj, v));
            }
        }
    }
    Ok(SparseMatrix::from_triplets(2 * n, 2 * n, &trip))
}

/// Divergence operator `B_qj = −∫ ψ_q ∇·φ_j` (pressure rows, velocity columns).
pub fn assemble_divergence(space: &FESpace) -> SparseMatrix {
    let n = space.n_scalar();
    let mut trip = Vec::new();
    let mut grad = [[0.0; 2]; MAX_LOCAL];
    let mut psi = [0.0; MAX_LOCAL];
    for t in 0..space.mesh().num_triangles() {
        let geom = space.geometry(t);
        let vdofs = space.local_velocity_dofs(t);
        let pdofs = space.local_pressure_dofs(t);
        let mut local = [[[0.0; 2]; MAX_LOCAL]; 3];
        for (lam, w) in &DUNAVANT16.points {
            let m = velocity_gradients(space.pair(), *lam, geom, &mut grad);
            pressure_values(*lam, &mut psi);
            for q in 0..3 {
                for j in 0..m {
                    for c in 0..2 {
                        local[q][j][c] -= geom.area * w * psi[q] * grad[j][c];
                    }
                }
            }
        }
        for (q, &pq) in pdofs.iter().enumerate() {
            for (j, &sj) in vdofs.iter().enumerate() {
                trip.push((pq, sj, local[q][j][0]));
                trip.push((pq, n + sj, local[q][j][1]));
            }
        }
    }
    SparseMatrix::from_triplets(space.n_pressure(), 2 * n, &trip)
}

/// Load vector `r_i = ∫ f(·, t) · φ_i` with the degree-8 rule.
pub fn assemble_load(space: &FESpace, f: impl Fn(Point, f64) -> [f64; 2], t: f64) -> Vec<f64> {
    let n = space.n_scalar();
    let mut r = vec![0.0; 2 * n];
    let mut phi = [0.0; MAX_LOCAL];
    for k in 0..space.mesh().num_triangles() {
        let geom = space.geometry(k);
        let dofs = space.local_velocity_dofs(k);
        for (lam, w) in &DUNAVANT16.points {
            let fx = f(geom.point(*lam), t);
            let m = velocity_values(space.pair(), *lam, &mut phi);
            for i in 0..m {
                r[dofs[i]] += geom.area * w * phi[i] * fx[0];
                r[n + dofs[i]] += geom.area * w * phi[i] * fx[1];
            }
        }
    }
    r
}

/// `m_q = ∫ ψ_q`, the row of the zero-mean pressure constraint.
pub fn pressure_mean_row(space: &FESpace) -> Vec<f64> {
    let mut m = vec![0.0; space.n_pressure()];
    for t in 0..space.mesh().num_triangles() {
        let a = space.geometry(t).area;
        for &v in &space.local_pressure_dofs(t) {
            m[v] += a / 3.0;
        }
    }
    m
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fem::ElementPair;
    use crate::mesh::{generate_structured_unit_square, Mesh, Pattern};
    use std::sync::Arc;

    fn space(n: usize, pair: ElementPair) -> FESpace {
        let mesh = Arc::new(generate_structured_unit_square(n, Pattern::Right).unwrap());
        FESpace::new(mesh, pair).unwrap()
    }

    #[test]
    fn mass_sums_to_domain_area() {
        for pair in [ElementPair::TaylorHood, ElementPair::Mini] {
            let s = space(3, pair);
            let m = assemble_mass(&s);
            let n = s.n_scalar();
            // the bubble is not part of the partition of unity
            let nodal = match pair {
                ElementPair::TaylorHood => n,
                ElementPair::Mini => s.mesh().num_vertices(),
            };
            let ones: Vec<f64> = (0..2 * n).map(|i| if i < nodal { 1.0 } else { 0.0 }).collect();
            let total: f64 = m.mul_vec(&ones).iter().zip(&ones).map(|(a, b)| a * b).sum();
            assert!((total - 1.0).abs() < 1e-13, "{pair}: {total}");
            assert_eq!(m.asymmetry(), 0.0);
        }
    }

    #[test]
    fn p1_reference_mass() {
        let mesh = Mesh::new(vec![[0.0, 0.0], [1.0, 0.0], [0.0, 1.0]], vec![[0, 1, 2]], None, None).unwrap();
        let s = FESpace::new(Arc::new(mesh), ElementPair::Mini).unwrap();
        let m = assemble_pressure_mass(&s);
        for i in 0..3 {
            for j in 0..3 {
                let expected = 0.5 / 12.0 * if i == j { 2.0 } else { 1.0 };
                assert!((m.get(i, j) - expected).abs() < 1e-16);
            }
        }
    }

    #[test]
    fn stiffness_kernel_and_linearity() {
        let s = space(3, ElementPair::TaylorHood);
        let a = assemble_stiffness(&s, 0.7).unwrap();
        let ones = vec![1.0; s.n_velocity()];
        assert!(a.mul_vec(&ones).iter().all(|v| v.abs() < 1e-12));
        let a2 = assemble_stiffness(&s, 1.4).unwrap();
        for (i, j, v) in a.iter() {
            assert!((a2.get(i, j) - 2.0 * v).abs() <= 1e-15 * v.abs().max(1.0));
        }
        assert!(assemble_stiffness(&s, 0.0).is_err());
        assert!(assemble_stiffness(&s, -1.0).is_err());
    }

    #[test]
    fn divergence_of_constant_field_vanishes() {
        for pair in [ElementPair::TaylorHood, ElementPair::Mini] {
            let s = space(4, pair);
            let b = assemble_divergence(&s);
            let c = s.interpolate_velocity(|_| [0.3, -1.2]);
            assert!(b.mul_vec(&c.coeffs).iter().all(|v| v.abs() < 1e-14));
        }
    }

    #[test]
    fn load_partition_of_unity() {
        let s = space(3, ElementPair::TaylorHood);
        let zero = assemble_load(&s, |_, _| [0.0, 0.0], 0.0);
        assert!(zero.iter().all(|&v| v == 0.0));
        let r = assemble_load(&s, |_, _| [1.0, 0.0], 0.0);
        let sx: f64 = r[..s.n_scalar()].iter().sum();
        let sy: f64 = r[s.n_scalar()..].iter().sum();
        assert!((sx - 1.0).abs() < 1e-12 && sy == 0.0);
    }

    #[test]
    fn mean_row_sums_to_area() {
        let s = space(5, ElementPair::Mini);
        let m = pressure_mean_row(&s);
        assert!((m.iter().sum::<f64>() - 1.0).abs() < 1e-14);
    }
}
