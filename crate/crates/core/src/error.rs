use thiserror::Error;

/// Errors raised across the crate.
#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("size {requested} exceeds the supported maximum of {max}")]
    TooLarge { requested: usize, max: usize },

    #[error("index {index} out of range for {len} rebits")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("generators are linearly dependent")]
    DependentGenerators,

    #[error("generators do not commute")]
    NonCommuting,

    #[error("subspace is not isotropic")]
    NotIsotropic,

    #[error("inconsistent signs: the group contains -I")]
    InconsistentSigns,

    #[error("operator is not symmetric (label outside the real observable set)")]
    NotSymmetric,

    #[error("operator {0} has an imaginary coefficient")]
    Imaginary(String),

    #[error("operator {0} is not a pure X or pure Z observable")]
    NotInO(String),

    #[error("gate {0} is not available in this mode")]
    UnsupportedGate(String),

    #[error("invalid density matrix: {0}")]
    InvalidDensity(String),

    #[error("state is not normalized (norm^2 = {0})")]
    NotNormalized(f64),

    #[error("measurement outcome has zero probability")]
    ZeroProbability,

    #[error("negative quasi-probability {value} at phase point {point}")]
    NegativeTable { value: f64, point: usize },

    #[error("whitelist violation: {0}")]
    WhitelistViolation(String),

    #[error("rebit {0} is not in a product state with the rest of the register")]
    NotProduct(usize),

    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },

    #[error("{0}")]
    Invalid(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn parse_err(line: usize, msg: impl Into<String>) -> Error {
    Error::Parse {
        line,
        msg: msg.into(),
    }
}
