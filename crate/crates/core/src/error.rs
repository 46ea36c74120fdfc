use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

/// Everything that can go wrong while parsing, loading or evaluating.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("pole: {0}")]
    Pole(String),

    #[error("division by zero: {0}")]
    DivisionByZero(String),

    #[error("type error: {0}")]
    Type(String),

    #[error("unbound variable `{0}`")]
    UnboundVariable(String),

    #[error("syntax error at byte {offset}: expected {}", expected.join(" | "))]
    Syntax {
        offset: usize,
        expected: Vec<String>,
    },

    #[error("`{name}` takes {expected} argument(s), got {found}")]
    Arity {
        name: String,
        expected: usize,
        found: usize,
    },

    #[error("format error: {0}")]
    Format(String),

    #[error("shape error: {0}")]
    Shape(String),

    #[error("negative exponent {exponent} at k = {k}")]
    NegativeExponent { k: i64, exponent: i64 },

    #[error("io error: {0}")]
    Io(String),
}

impl Error {
    /// Attach the summation index at which an evaluation failed.
    pub fn at_k(self, k: i64) -> Error {
        match self {
            Error::Pole(m) => Error::Pole(format!("{m} (at k = {k})")),
            Error::DivisionByZero(m) => Error::DivisionByZero(format!("{m} (at k = {k})")),
            other => other,
        }
    }
}

impl From<std::io::Error> for Error {
    fn from(e: std::io::Error) -> Self {
        Error::Io(e.to_string())
    }
}
