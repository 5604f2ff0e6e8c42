use std::path::PathBuf;

use thiserror::Error;

/// Errors produced anywhere in the pipeline.
#[derive(Debug, Error)]
pub enum RdaError {
    #[error("parse error at line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error("mesh contains no volume elements")]
    EmptyMesh,

    #[error("face {vertices:?} is shared by more than two elements")]
    NonManifold { vertices: Vec<usize> },

    #[error("field has {got} components, expected {expected}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("no quadrature rule of exactness {0} (maximum supported is {max})", max = crate::poly::MAX_EXACTNESS)]
    UnsupportedDegree(usize),

    #[error("patch of element {element} is not unisolvent: numerical rank {rank} < {required}")]
    DeficientPatch {
        element: usize,
        rank: usize,
        required: usize,
    },

    #[error("system matrix is not positive definite (penalty too small?)")]
    NonSpd,

    #[error("no convergence after {iterations} iterations (relative residual {residual:e})")]
    NoConvergence { iterations: usize, residual: f64 },

    #[error("two records share the same mesh size h = {0}")]
    DegenerateH(f64),

    #[error("invalid configuration: {0}")]
    InvalidConfig(String),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<RdaError>,
    },

    #[error("I/O error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },
}

impl RdaError {
    pub(crate) fn parse(line: usize, message: impl Into<String>) -> Self {
        RdaError::Parse {
            line,
            message: message.into(),
        }
    }

    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        RdaError::Io {
            path: path.into(),
            source,
        }
    }

    /// Wraps an error with the name of the pipeline stage it came from.
    pub fn in_stage(self, stage: &'static str) -> Self {
        RdaError::Stage {
            stage,
            source: Box::new(self),
        }
    }
}

pub type Result<T, E = RdaError> = std::result::Result<T, E>;
