use thiserror::Error;

use crate::qm::Operator;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("matrix is not square ({rows}x{cols})")]
    NotSquare { rows: usize, cols: usize },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("invalid density matrix: {0}")]
    InvalidDensityMatrix(String),

    #[error("measurement set is incomplete: completeness defect {defect:e}")]
    IncompleteMeasurementSet { defect: f64 },

    #[error("hamiltonian is not hermitian: defect {defect:e}")]
    NonHermitianHamiltonian { defect: f64 },

    #[error("jump rate at index {index} is negative or non-finite ({rate})")]
    NegativeRate { index: usize, rate: f64 },

    #[error("index {index} out of range for dimension {dim}")]
    IndexOutOfRange { index: usize, dim: usize },

    #[error("vector of length {len} is not a superket of dimension {dim}")]
    BadSuperKetLength { len: usize, dim: usize },

    #[error("size {0} is not a perfect square")]
    NotPerfectSquare(usize),

    #[error("jordan chain construction failed: {0}")]
    ChainConstructionFailed(String),

    #[error("generator is unstable: max Re(lambda) = {max_re:e}")]
    Unstable { max_re: f64 },

    #[error("steady state is not unique: {} modes with zero real part", basis.len())]
    NonUniqueSteadyState { basis: Vec<Operator> },

    #[error("map is not completely positive: choi eigenvalue {eigenvalue:e}")]
    NotCompletelyPositive { eigenvalue: f64 },

    #[error("choi matrix is not hermitian: defect {defect:e}")]
    NotHermitianChoi { defect: f64 },

    #[error("operation requires a unitary liouvillian")]
    NonUnitaryKind,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("{path}: {reason}")]
    Schema { path: String, reason: String },

    #[error("{path}: expected {expected}, found {found}")]
    ShapeMismatch {
        path: String,
        expected: String,
        found: String,
    },

    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
