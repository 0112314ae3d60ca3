use std::path::PathBuf;

use crate::transport::CflReport;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("point ({x}, {y}) lies outside the domain")]
    OutOfDomain { x: f64, y: f64 },

    #[error("element {element} is degenerate (signed area {area:e})")]
    SingularGeometry { element: usize, area: f64 },

    #[error("affine map on element {element} is not invertible (det {det:e})")]
    SingularMap { element: usize, det: f64 },

    #[error("foot map image of element {element} leaves the domain (CFL/bijectivity violated)")]
    Admissibility { element: usize },

    #[error("overlap areas of element {element} miss its area by {deficit:e} (relative)")]
    GeometryConsistency { element: usize, deficit: f64 },

    #[error("quadrature rule of degree {available} cannot integrate degree {required} exactly")]
    QuadratureDegree { required: usize, available: usize },

    #[error("step {step} rejected: dt*|w|_1,inf = {} exceeds 1/4", .report.dt_times_grad)]
    StepRejected { step: usize, report: CflReport },

    #[error("linear solver failed: {reason} (relative residual {residual:e})")]
    SolverFailure { reason: String, residual: f64 },

    #[error("discrete divergence {divergence:e} exceeds tolerance at step {step}")]
    Incompressibility { step: usize, divergence: f64 },

    #[error("degenerate exact solution: {0}")]
    DegenerateExact(String),

    #[error("run failed at step {step}: {source}")]
    AtStep {
        step: usize,
        #[source]
        source: Box<Error>,
    },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("parse error: {0}")]
    Parse(String),
}

impl Error {
    pub fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidArgument(msg.into())
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// Innermost error, looking through step annotations.
    pub fn root(&self) -> &Error {
        match self {
            Error::AtStep { source, .. } => source.root(),
            other => other,
        }
    }
}
