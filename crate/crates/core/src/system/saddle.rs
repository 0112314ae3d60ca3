use faer::linalg::solvers::Solve;
use faer::sparse::linalg::solvers::Lu;
use faer::sparse::{SparseColMat, Triplet};
use faer::Mat;

use super::SparseMatrix;
use crate::error::{Error, Result};

/// Relative residual accepted from the direct solve.
pub const RESIDUAL_TOL: f64 = 1e-10;
const REFINEMENT_STEPS: usize = 3;

/// Factored constrained system
///
/// ```text
/// [ K   Bᵀ  0 ] [u]   [f]
/// [ B   0   m ] [p] = [g]
/// [ 0   mᵀ  0 ] [λ]   [0]
/// ```
///
/// with Dirichlet velocity DOFs eliminated symmetrically (identity rows and
/// columns, lifting moved to the right-hand side). The last row pins the
/// pressure mean to zero.
pub struct SaddleSystem {
    velocity_block: SparseMatrix,
    divergence: SparseMatrix,
    mean_row: Vec<f64>,
    dirichlet: Vec<bool>,
    matrix: SparseMatrix,
    lu: Lu<usize, f64>,
}

#[derive(Debug, Clone)]
pub struct SaddleSolution {
    pub velocity: Vec<f64>,
    pub pressure: Vec<f64>,
    pub multiplier: f64,
    /// `‖b − Kx‖ / ‖b‖` of the constrained system.
    pub relative_residual: f64,
}

impl std::fmt::Debug for SaddleSystem {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("SaddleSystem")
            .field("n_velocity", &self.n_velocity())
            .field("n_pressure", &self.n_pressure())
            .field("nnz", &self.matrix.nnz())
            .finish()
    }
}

impl SaddleSystem {
    pub fn new(velocity_block: SparseMatrix, divergence: SparseMatrix, mean_row: Vec<f64>, dirichlet: Vec<bool>) -> Result<Self> {
        let nu = velocity_block.nrows();
        let np = divergence.nrows();
        if velocity_block.ncols() != nu || divergence.ncols() != nu || mean_row.len() != np || dirichlet.len() != nu {
            return Err(Error::invalid("inconsistent saddle-point block dimensions"));
        }
        let n = nu + np + 1;
        let mut trip = Vec::with_capacity(velocity_block.nnz() + 2 * divergence.nnz() + 2 * np + nu);
        for (i, j, v) in velocity_block.iter() {
            if !dirichlet[i] && !dirichlet[j] {
                trip.push((i, j, v));
            }
        }
        for (d, _) in dirichlet.iter().enumerate().filter(|(_, &b)| b) {
            trip.push((d, d, 1.0));
        }
        for (q, j, v) in divergence.iter() {
            if !dirichlet[j] {
                trip.push((nu + q, j, v));
                trip.push((j, nu + q, v));
            }
        }
        for (q, &m) in mean_row.iter().enumerate() {
            trip.push((nu + q, n - 1, m));
            trip.push((n - 1, nu + q, m));
        }
        let matrix = SparseMatrix::from_triplets(n, n, &trip);

        let entries: Vec<Triplet<usize, usize, f64>> = matrix.iter().map(|(i, j, v)| Triplet::new(i, j, v)).collect();
        let csc = SparseColMat::<usize, f64>::try_new_from_triplets(n, n, &entries).map_err(|e| Error::SolverFailure {
            reason: format!("sparse matrix construction: {e:?}"),
            residual: f64::NAN,
        })?;
        let lu = csc.sp_lu().map_err(|e| Error::SolverFailure {
            reason: format!("LU factorization: {e:?}"),
            residual: f64::NAN,
        })?;
        Ok(SaddleSystem {
            velocity_block,
            divergence,
            mean_row,
            dirichlet,
            matrix,
            lu,
        })
    }

    pub fn n_velocity(&self) -> usize {
        self.velocity_block.nrows()
    }

    pub fn n_pressure(&self) -> usize {
        self.divergence.nrows()
    }

    /// Full constrained matrix (symmetric by construction).
    pub fn matrix(&self) -> &SparseMatrix {
        &self.matrix
    }

    pub fn velocity_block(&self) -> &SparseMatrix {
        &self.velocity_block
    }

    pub fn divergence(&self) -> &SparseMatrix {
        &self.divergence
    }

    pub fn mean_row(&self) -> &[f64] {
        &self.mean_row
    }

    pub fn dirichlet(&self) -> &[bool] {
        &self.dirichlet
    }

    /// Solves with velocity load `f`, divergence data `g` and Dirichlet values
    /// `boundary` (read only at Dirichlet DOFs).
    pub fn solve(&self, f: &[f64], g: &[f64], boundary: &[f64]) -> Result<SaddleSolution> {
        let (nu, np) = (self.n_velocity(), self.n_pressure());
        if f.len() != nu || g.len() != np || boundary.len() != nu {
            return Err(Error::invalid("right-hand side dimensions do not match the system"));
        }
        let n = nu + np + 1;
        let lift: Vec<f64> = (0..nu).map(|j| if self.dirichlet[j] { boundary[j] } else { 0.0 }).collect();
        let k_lift = self.velocity_block.mul_vec(&lift);
        let b_lift = self.divergence.mul_vec(&lift);

        let mut rhs = vec![0.0; n];
        for i in 0..nu {
            rhs[i] = if self.dirichlet[i] { boundary[i] } else { f[i] - k_lift[i] };
        }
        for q in 0..np {
            rhs[nu + q] = g[q] - b_lift[q];
        }

        let rhs_norm = norm(&rhs);
        let mut x = self.lu_solve(&rhs);
        let mut rel = residual_norm(&self.matrix, &x, &rhs) / rhs_norm.max(f64::MIN_POSITIVE);
        for _ in 0..REFINEMENT_STEPS {
            if rel <= RESIDUAL_TOL * 1e-2 || rhs_norm == 0.0 {
                break;
            }
            let r: Vec<f64> = self.matrix.mul_vec(&x).iter().zip(&rhs).map(|(kx, b)| b - kx).collect();
            let dx = self.lu_solve(&r);
            x.iter_mut().zip(&dx).for_each(|(xi, di)| *xi += di);
            rel = residual_norm(&self.matrix, &x, &rhs) / rhs_norm;
        }
        if rhs_norm == 0.0 {
            rel = 0.0;
        }
        if !(rel <= RESIDUAL_TOL) {
            return Err(Error::SolverFailure {
                reason: "residual above tolerance after iterative refinement".into(),
                residual: rel,
            });
        }
        Ok(SaddleSolution {
            velocity: x[..nu].to_vec(),
            pressure: x[nu..nu + np].to_vec(),
            multiplier: x[n - 1],
            relative_residual: rel,
        })
    }

    fn lu_solve(&self, rhs: &[f64]) -> Vec<f64> {
        let mut b = Mat::from_fn(rhs.len(), 1, |i, _| rhs[i]);
        self.lu.solve_in_place(b.as_mut());
        (0..rhs.len()).map(|i| b[(i, 0)]).collect()
    }
}

fn norm(v: &[f64]) -> f64 {
    v.iter().map(|x| x * x).sum::<f64>().sqrt()
}

fn residual_norm(m: &SparseMatrix, x: &[f64], b: &[f64]) -> f64 {
    let kx = m.mul_vec(x);
    norm(&kx.iter().zip(b).map(|(a, c)| a - c).collect::<Vec<_>>())
}
