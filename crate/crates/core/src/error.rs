use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum Error {
    #[error("syntax error at position {pos}: {message}")]
    Parse { pos: usize, message: String },

    #[error("division by the zero polynomial")]
    DivisionByZero,

    #[error("operation undefined for the zero polynomial: {0}")]
    ZeroPolynomial(&'static str),

    #[error("invalid triple: {0}")]
    InvalidTriple(String),

    #[error("triple is not in standard form")]
    NotStandard,

    #[error("arc construction failed: {0}")]
    Arc(String),

    #[error("numeric tolerance failure: {0}")]
    Numeric(String),

    #[error("invalid argument: {0}")]
    InvalidArgument(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
