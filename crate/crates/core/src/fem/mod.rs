//! Mixed finite element spaces (Taylor–Hood P2/P1 and MINI P1+/P1).

mod basis;
pub mod quadrature;
mod space;

pub use basis::{
    eval_basis, eval_basis_grad, ElementGeometry, ElementPair, LocalGradients, LocalValues, Role, MAX_LOCAL,
};
pub(crate) use basis::{pressure_values, velocity_gradients, velocity_values};
pub use quadrature::QuadratureRule;
pub use space::{sup_grad_p1, Entity, FESpace, Field, P1Field};
