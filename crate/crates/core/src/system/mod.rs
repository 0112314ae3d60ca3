//! Mass, stiffness and divergence operators, the constrained saddle-point
//! solve and the Stokes projection.

mod assemble;
mod saddle;
mod sparse;
mod stokes;

pub use assemble::{
    assemble_divergence, assemble_load, assemble_mass, assemble_pressure_mass, assemble_stiffness, pressure_mean_row,
};
pub use saddle::{SaddleSolution, SaddleSystem, RESIDUAL_TOL};
pub use sparse::SparseMatrix;
pub use stokes::{stokes_projection, ProjectionSource, StokesProjector};
