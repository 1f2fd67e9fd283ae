use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("syntax error at offset {pos}: {msg}")]
    Syntax { pos: usize, msg: String },

    #[error("syntax error on line {line}: {msg}")]
    Line { line: usize, msg: String },

    #[error("type error at {at}: {msg}")]
    Type { at: String, msg: String },

    #[error("unbound proof variable {0}")]
    Unbound(String),

    #[error("outside the supported fragment: {0}")]
    Fragment(String),

    #[error("invalid input: {0}")]
    Invalid(String),
}

impl Error {
    pub(crate) fn shifted(self, by: usize) -> Self {
        match self {
            Error::Syntax { pos, msg } => Error::Syntax { pos: pos + by, msg },
            e => e,
        }
    }
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
