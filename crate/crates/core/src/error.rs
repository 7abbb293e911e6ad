use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("classifiers are bound to different domains")]
    DomainMismatch,
    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },
    #[error("invalid domain: {0}")]
    InvalidDomain(String),
    #[error("invalid classifier: {0}")]
    InvalidClassifier(String),
    #[error("invalid probability {value} at position {index}")]
    InvalidProbability { index: usize, value: f64 },
    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),
    #[error("invalid loss table: {0}")]
    InvalidLoss(String),
    #[error("sample index {index} out of range for domain of size {m}")]
    InvalidIndex { index: usize, m: usize },
    #[error("hypothesis class is empty")]
    EmptyClass,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("enumeration cap exceeded: m = {m}, cap = {cap}")]
    CapExceeded { m: usize, cap: usize },
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("linear program failed: {0}")]
    Lp(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("parse: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
