use thiserror::Error;

use num_complex::Complex64 as C64;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("singular parameters: {0}")]
    SingularParameters(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("singular linear system ({context})")]
    SingularSystem { context: String },

    #[error("square-root branch is ambiguous for C6/lambda = {ratio}")]
    BranchAmbiguity { ratio: C64 },

    #[error("quadrature did not converge: estimate {error:.3e} after {nodes} nodes ({context})")]
    Quadrature { context: String, error: f64, nodes: usize },

    #[error("generator bug: {0}")]
    Generator(String),

    #[error("matrix c is ill-conditioned (cond = {cond:.3e}) at {point}")]
    IllConditioned { cond: f64, point: String },

    #[error("eigenvector matrix is near-defective (cond = {cond:.3e}); perturb the parameters")]
    Defective { cond: f64 },

    #[error("eigendecomposition failed: {0}")]
    Eigen(String),

    #[error("self-consistent solve failed after {iterations} iterations, residual {residual:.3e}")]
    NonConvergence { iterations: usize, residual: f64, v: [C64; 4] },

    #[error("extrapolation did not converge: {0}")]
    Extrapolation(String),

    #[error("undefined observable: {0}")]
    Undefined(String),

    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T> = std::result::Result<T, Error>;
