use ess_core::EssError;
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum EllipticError {
    #[error("invalid argument: {0}")]
    Argument(String),

    #[error("invalid permeability field: {0}")]
    InvalidField(String),

    #[error("conjugate gradients did not converge in {iterations} iterations (relative residual {residual:e})")]
    SolverFailure { iterations: usize, residual: f64 },

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error(transparent)]
    Core(#[from] EssError),
}

pub type Result<T> = std::result::Result<T, EllipticError>;
