use thiserror::Error;

/// Errors raised across the simulation toolkit.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),
    #[error("matrix is not unitary (deviation {0:.3e})")]
    NotUnitary(f64),
    #[error("matrix is not Hermitian (deviation {0:.3e})")]
    NotHermitian(f64),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("invalid qubit targets: {0}")]
    BadTargets(String),
    #[error("negative eigenvalue {0:.3e} below clipping threshold")]
    NegativeEigenvalue(f64),
    #[error("eigendecomposition did not converge after {0} sweeps")]
    NoConvergence(usize),
    #[error("empty qubit set")]
    EmptyQubitSet,
    #[error("malformed circuit: {0}")]
    MalformedCircuit(String),
    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("shots must be at least 1")]
    ZeroShots,
    #[error("invalid argument: {0}")]
    InvalidArgument(String),
    #[error("calibration error: {0}")]
    Calibration(String),
    #[error("no calibration for qubit {0}")]
    MissingCalibration(usize),
    #[error("no CNOT calibration for pair ({0}, {1})")]
    MissingCnotCalibration(usize, usize),
    #[error("missing Pauli expectation for {0}")]
    MissingExpectation(String),
    #[error("Pauli expectation for {0} out of range: {1}")]
    ExpectationOutOfRange(String, f64),
    #[error("need ≥ 2 values, got {0}")]
    TooFewValues(usize),
    #[error("two-qubit gate on non-edge ({0}, {1})")]
    NonEdgeGate(usize, usize),
    #[error("routing: {0}")]
    Routing(String),
    #[error("I/O error: {0}")]
    Io(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
