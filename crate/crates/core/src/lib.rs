//! Lagrange–Galerkin mixed finite elements for the incompressible
//! Navier–Stokes equations in two dimensions.
//!
//! The transport term `(u_h^{n-1} ∘ X₁(w), v_h)` is integrated exactly when
//! the foot map uses the vertex-linearized velocity ([`transport::assemble_composite_exact`]),
//! or with a fixed quadrature rule for the conventional scheme
//! ([`transport::assemble_composite_quadrature`]).

pub mod error;
pub mod fem;
pub mod geometry;
pub mod analysis;
pub mod app;
pub mod mesh;
pub mod system;
pub mod scheme;
pub mod transport;

pub use error::{Error, Result};
