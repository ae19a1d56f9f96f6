use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("DimMismatch: expected dimension {expected}, got {got}")]
    DimMismatch { expected: usize, got: usize },
    #[error("NonFinite: coordinate {index} is not finite")]
    NonFinite { index: usize },
    #[error("EmptyTrace")]
    EmptyTrace,
    #[error("InvalidArgument: {0}")]
    InvalidArgument(String),
    #[error("BadSet: {0}")]
    BadSet(String),
    #[error("SampleOutsideSet: sample {index} is not a member of the set")]
    SampleOutsideSet { index: usize },
    #[error("BadOperator: {0}")]
    BadOperator(String),
    #[error("NotAFixedPoint: point {index} (residual {residual:e})")]
    NotAFixedPoint { index: usize, residual: f64 },
    #[error("EmptySchedule")]
    EmptySchedule,
    #[error("BadSchedule: {0}")]
    BadSchedule(String),
    #[error("InitOutsideDomain")]
    InitOutsideDomain,
    #[error("AnchorOutsideDomain")]
    AnchorOutsideDomain,
    #[error("NoAnchors")]
    NoAnchors,
    #[error("NotFejer")]
    NotFejer,
    #[error("FejerBoundExceeded: |x_{index}| = {norm} exceeds bound {bound}")]
    FejerBoundExceeded { index: usize, norm: f64, bound: f64 },
    #[error("WrongTraceKind: expected a {expected} trace")]
    WrongTraceKind { expected: &'static str },
    #[error("ConfigMismatch: {0}")]
    ConfigMismatch(String),
    #[error("ParseError at line {line}: {message}")]
    Parse { line: usize, message: String },
    #[error("ValidationError: {path}: {message}")]
    Validation { path: String, message: String },
    #[error("WriteError: {0}")]
    Write(String),
}

impl Error {
    pub(crate) fn dims(expected: usize, got: usize) -> Result<()> {
        if expected == got {
            Ok(())
        } else {
            Err(Error::DimMismatch { expected, got })
        }
    }

    pub(crate) fn validation(path: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Validation {
            path: path.into(),
            message: message.into(),
        }
    }
}
