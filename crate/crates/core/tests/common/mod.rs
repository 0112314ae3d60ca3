//! Reference computations shared by the integration tests. None of these
//! use the clipping, overlap search, quadrature tables or saddle solver of
//! the library.

#![allow(dead_code)]

use std::sync::Arc;

use charfem::fem::{eval_basis, ElementPair, FESpace, Field, P1Field, Role};
use charfem::mesh::{generate_structured_unit_square, Mesh, Pattern};
use nalgebra::{DMatrix, DVector};
use rand::Rng;
use rand_chacha::ChaCha8Rng;

pub type Point = [f64; 2];

pub fn space(n: usize, pattern: Pattern, pair: ElementPair) -> Arc<FESpace> {
    let mesh = Arc::new(generate_structured_unit_square(n, pattern).unwrap());
    Arc::new(FESpace::new(mesh, pair).unwrap())
}

/// Gauss–Legendre nodes and weights on `[0, 1]`.
pub fn gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    let mut out = Vec::with_capacity(n);
    for i in 0..n {
        let mut x = (std::f64::consts::PI * (i as f64 + 0.75) / (n as f64 + 0.5)).cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (mut p0, mut p1) = (1.0, x);
            for k in 2..=n {
                let p2 = ((2 * k - 1) as f64 * x * p1 - (k - 1) as f64 * p0) / k as f64;
                p0 = p1;
                p1 = p2;
            }
            let p = if n == 0 { 1.0 } else { p1 };
            dp = n as f64 * (x * p - p0) / (x * x - 1.0);
            let dx = p / dp;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        out.push(((1.0 - x) / 2.0, 1.0 / ((1.0 - x * x) * dp * dp)));
    }
    out
}

/// Collapsed tensor Gauss rule on the triangle `t`; exact up to degree `2n − 2`.
pub fn duffy_rule(t: [Point; 3], n: usize) -> Vec<(Point, f64)> {
    let gl = gauss_legendre(n);
    let area = tri_area(t).abs();
    let mut out = Vec::with_capacity(n * n);
    for &(xi, wx) in &gl {
        for &(eta, wy) in &gl {
            let s = xi;
            let r = (1.0 - xi) * eta;
            let p = [
                t[0][0] + s * (t[1][0] - t[0][0]) + r * (t[2][0] - t[0][0]),
                t[0][1] + s * (t[1][1] - t[0][1]) + r * (t[2][1] - t[0][1]),
            ];
            out.push((p, 2.0 * area * wx * wy * (1.0 - xi)));
        }
    }
    out
}

pub fn tri_area(t: [Point; 3]) -> f64 {
    0.5 * ((t[1][0] - t[0][0]) * (t[2][1] - t[0][1]) - (t[2][0] - t[0][0]) * (t[1][1] - t[0][1]))
}

pub fn bary(t: [Point; 3], p: Point) -> [f64; 3] {
    let a = tri_area(t);
    let l1 = tri_area([t[0], p, t[2]]) / a;
    let l2 = tri_area([t[0], t[1], p]) / a;
    [1.0 - l1 - l2, l1, l2]
}

fn clamp_bary(l: [f64; 3]) -> [f64; 3] {
    let c = l.map(|v| v.max(0.0));
    let s: f64 = c.iter().sum();
    c.map(|v| v / s)
}

/// Brute-force point location, trying `hint` first.
pub fn find_element(mesh: &Mesh, p: Point, hint: usize, tol: f64) -> Option<usize> {
    let inside = |t: usize| bary(mesh.corners(t), p).iter().all(|&l| l >= -tol);
    if inside(hint) {
        return Some(hint);
    }
    (0..mesh.num_triangles()).find(|&t| inside(t))
}

/// Random P1 field vanishing on the boundary, scaled so that
/// `dt · |w|_{1,∞} = target` with `dt = 1`.
pub fn random_admissible_p1(space: &FESpace, rng: &mut ChaCha8Rng, target: f64) -> P1Field {
    let mesh = space.mesh();
    let mut w = P1Field::zeros(mesh.num_vertices());
    for v in 0..mesh.num_vertices() {
        if !mesh.is_boundary_vertex(v) {
            w.values[v] = [rng.gen_range(-1.0..1.0), rng.gen_range(-1.0..1.0)];
        }
    }
    let g = sup_grad_oracle(mesh, &w);
    for v in &mut w.values {
        v[0] *= target / g;
        v[1] *= target / g;
    }
    w
}

/// Frobenius gradient norm per element, from vertex values directly.
pub fn grad_oracle(mesh: &Mesh, w: &P1Field, t: usize) -> [[f64; 2]; 2] {
    let [a, b, c] = mesh.corners(t);
    let [ia, ib, ic] = mesh.triangle(t);
    let det = (b[0] - a[0]) * (c[1] - a[1]) - (c[0] - a[0]) * (b[1] - a[1]);
    let mut g = [[0.0; 2]; 2];
    for comp in 0..2 {
        let (da, db) = (w.values[ib][comp] - w.values[ia][comp], w.values[ic][comp] - w.values[ia][comp]);
        g[comp][0] = (da * (c[1] - a[1]) - db * (b[1] - a[1])) / det;
        g[comp][1] = (db * (b[0] - a[0]) - da * (c[0] - a[0])) / det;
    }
    g
}

pub fn sup_grad_oracle(mesh: &Mesh, w: &P1Field) -> f64 {
    (0..mesh.num_triangles())
        .map(|t| {
            let g = grad_oracle(mesh, w, t);
            (g[0][0].powi(2) + g[0][1].powi(2) + g[1][0].powi(2) + g[1][1].powi(2)).sqrt()
        })
        .fold(0.0, f64::max)
}

/// Interpolant of a random smooth trigonometric field.
pub fn random_smooth_field(space: &FESpace, rng: &mut ChaCha8Rng) -> Field {
    let c: [f64; 8] = std::array::from_fn(|_| rng.gen_range(-1.0..1.0));
    space.interpolate_velocity(move |p| {
        [
            c[0] * (2.0 * p[0] + c[1]).sin() + c[2] * (1.5 * p[1] - c[3]).cos(),
            c[4] * (1.7 * p[0] * p[1] + c[5]).cos() + c[6] * (p[0] - 2.0 * p[1] + c[7]).sin(),
        ]
    })
}

/// `∫_Ω (u ∘ (x − dt w(x))) · φ_i` by recursive 4-way subdivision of every
/// element until the image of a piece lies in a single element, or `depth`
/// is reached (then each quadrature point is located separately).
pub fn composite_by_subdivision(space: &FESpace, u: &Field, w: &P1Field, dt: f64, depth: usize) -> Vec<f64> {
    let mesh = space.mesh();
    let n = space.n_scalar();
    let pair = space.pair();
    let mut r = vec![0.0; 2 * n];
    for t in 0..mesh.num_triangles() {
        let k0 = mesh.corners(t);
        let tri = mesh.triangle(t);
        let dofs = space.local_velocity_dofs(t);
        let foot = |x: Point| {
            let l = bary(k0, x);
            let mut y = x;
            for i in 0..3 {
                y[0] -= dt * l[i] * w.values[tri[i]][0];
                y[1] -= dt * l[i] * w.values[tri[i]][1];
            }
            y
        };
        let mut acc = vec![[0.0; 2]; dofs.len()];
        let mut stack = vec![(k0, 0usize, t)];
        while let Some((s, level, hint)) = stack.pop() {
            let img = s.map(foot);
            let centroid = [(img[0][0] + img[1][0] + img[2][0]) / 3.0, (img[0][1] + img[1][1] + img[2][1]) / 3.0];
            let e = find_element(mesh, centroid, hint, 1e-12).expect("image inside the domain");
            let ke = mesh.corners(e);
            let whole = img.iter().all(|&q| bary(ke, q).iter().all(|&l| l >= -1e-14));
            if whole || level == depth {
                for (x, wq) in duffy_rule(s, 5) {
                    let y = foot(x);
                    let el = if whole { e } else { find_element(mesh, y, e, 1e-12).unwrap() };
                    let uy = space.eval_velocity(&u.coeffs, el, clamp_bary(bary(mesh.corners(el), y)));
                    let phi = eval_basis(pair, Role::Velocity, clamp_bary(bary(k0, x))).unwrap();
                    for (k, ph) in phi.iter().enumerate() {
                        acc[k][0] += wq * ph * uy[0];
                        acc[k][1] += wq * ph * uy[1];
                    }
                }
            } else {
                let m = |a: Point, b: Point| [(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0];
                let (m01, m12, m20) = (m(s[0], s[1]), m(s[1], s[2]), m(s[2], s[0]));
                for child in [[s[0], m01, m20], [m01, s[1], m12], [m20, m12, s[2]], [m12, m20, m01]] {
                    stack.push((child, level + 1, e));
                }
            }
        }
        for (k, &d) in dofs.iter().enumerate() {
            r[d] += acc[k][0];
            r[n + d] += acc[k][1];
        }
    }
    r
}

pub fn sparse_to_dense(m: &charfem::system::SparseMatrix) -> DMatrix<f64> {
    let mut d = DMatrix::zeros(m.nrows(), m.ncols());
    for (i, j, v) in m.iter() {
        d[(i, j)] += v;
    }
    d
}

/// Smallest nonzero generalized eigenvalue `β²` of `B S⁻¹ Bᵀ q = β² M_p q`,
/// with `S` the H¹ Gram matrix on interior velocity DOFs.
pub fn inf_sup_constant(space: &FESpace) -> f64 {
    let s_full = sparse_to_dense(&charfem::system::assemble_stiffness(space, 1.0).unwrap());
    let b_full = sparse_to_dense(&charfem::system::assemble_divergence(space));
    let mp = sparse_to_dense(&charfem::system::assemble_pressure_mass(space));
    let interior: Vec<usize> = space
        .dirichlet_mask()
        .iter()
        .enumerate()
        .filter(|(_, &d)| !d)
        .map(|(i, _)| i)
        .collect();
    let s = s_full.select_rows(&interior).select_columns(&interior);
    let b = b_full.select_columns(&interior);
    let chol = s.cholesky().expect("H1 Gram matrix is positive definite");
    let sinv_bt = chol.solve(&b.transpose());
    let schur = &b * sinv_bt;
    let lp = mp.cholesky().expect("pressure mass is positive definite");
    let l = lp.l();
    let linv = l.clone().try_inverse().unwrap();
    let c = &linv * schur * linv.transpose();
    let c = (&c + c.transpose()) * 0.5;
    let mut ev: Vec<f64> = c.symmetric_eigenvalues().iter().copied().collect();
    ev.sort_by(|a, b| a.partial_cmp(b).unwrap());
    assert!(ev[0].abs() < 1e-8 * ev[ev.len() - 1], "constant pressure mode expected, got {}", ev[0]);
    ev[1].sqrt()
}

/// Dense solve of the interior-reduced system
/// `[K Bᵀ 0; B 0 m; 0 mᵀ 0]` with Dirichlet values `g`.
pub fn dense_saddle_solve(
    k: &DMatrix<f64>,
    b: &DMatrix<f64>,
    mean: &[f64],
    dirichlet: &[bool],
    f: &[f64],
    g: &[f64],
) -> (Vec<f64>, Vec<f64>) {
    let nu = k.nrows();
    let np = b.nrows();
    let free: Vec<usize> = (0..nu).filter(|&i| !dirichlet[i]).collect();
    let fixed: Vec<usize> = (0..nu).filter(|&i| dirichlet[i]).collect();
    let nf = free.len();
    let n = nf + np + 1;
    let mut a = DMatrix::zeros(n, n);
    let mut rhs = DVector::zeros(n);
    for (ii, &i) in free.iter().enumerate() {
        for (jj, &j) in free.iter().enumerate() {
            a[(ii, jj)] = k[(i, j)];
        }
        rhs[ii] = f[i] - fixed.iter().map(|&j| k[(i, j)] * g[j]).sum::<f64>();
    }
    for q in 0..np {
        for (jj, &j) in free.iter().enumerate() {
            a[(nf + q, jj)] = b[(q, j)];
            a[(jj, nf + q)] = b[(q, j)];
        }
        a[(nf + q, n - 1)] = mean[q];
        a[(n - 1, nf + q)] = mean[q];
        rhs[nf + q] = -fixed.iter().map(|&j| b[(q, j)] * g[j]).sum::<f64>();
    }
    let x = a.lu().solve(&rhs).expect("nonsingular saddle system");
    let mut u = g.to_vec();
    for (ii, &i) in free.iter().enumerate() {
        u[i] = x[ii];
    }
    for &i in &fixed {
        u[i] = g[i];
    }
    (u, (0..np).map(|q| x[nf + q]).collect())
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len());
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

pub fn max_abs(a: &[f64]) -> f64 {
    a.iter().fold(0.0, |m, x| m.max(x.abs()))
}
