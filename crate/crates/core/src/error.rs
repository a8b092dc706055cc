use thiserror::Error;

#[derive(Error, Debug, Clone, PartialEq)]
pub enum Error {
    #[error("invalid mesh: {0}")]
    InvalidMesh(String),
    #[error("element degree {degree} not supported on a {dim}D mesh (max {max})")]
    UnsupportedDegree { degree: usize, dim: usize, max: usize },
    #[error("no quadrature rule of order {0} is available")]
    UnsupportedQuadrature(usize),
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },
    #[error("coefficient vector belongs to a different mesh or degree")]
    SpaceMismatch,
    #[error("matrix is numerically singular at pivot {0}")]
    Singular(usize),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("sample outside the Hölder disk: |z| = {modulus} > epsilon = {epsilon}")]
    OutsideHolderDisk { modulus: f64, epsilon: f64 },
    #[error("missing derivative callback: {0}")]
    MissingDerivative(&'static str),
    #[error("sequence overflowed at index {0}")]
    Overflow(usize),
    #[error("io error: {0}")]
    Io(String),
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
