use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("shape error: {0}")]
    Shape(String),

    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("site {site} out of range for a {n}-qubit register")]
    SiteOutOfRange { site: usize, n: usize },

    #[error("matrix is not symplectic")]
    NotSymplectic,

    #[error("Pauli string is not supported on the gate's sites")]
    SupportMismatch,

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("window starting at site {start} with width {k} does not fit in {n} sites")]
    WindowOutOfRange { start: usize, k: usize, n: usize },

    #[error("circuit contains non-Clifford rotations; use the dense simulator")]
    NonClifford,

    #[error("resource guard: {0}")]
    ResourceGuard(String),

    #[error("internal consistency failure: {0}")]
    Consistency(String),

    #[error("parse error: {0}")]
    Parse(String),

    #[error("input is not unitary: {0}")]
    NonUnitary(String),
}

pub type Result<T> = std::result::Result<T, Error>;
