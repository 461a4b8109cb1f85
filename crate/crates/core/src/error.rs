use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid input: {0}")]
    InvalidInput(String),

    /// No exactly balanced colouring exists when `C(n, 2)` is odd.
    #[error("n = {n} gives C(n,2) = {edges} edges, which is odd; a balanced colouring needs n = 0 or 1 (mod 4)")]
    Parity { n: usize, edges: usize },

    #[error("sign search failed after {samples} samples (found non-positive: {found_neg}, non-negative: {found_pos})")]
    SignSearchFailure {
        samples: usize,
        found_neg: bool,
        found_pos: bool,
    },

    /// The enumeration would exceed its budget; nothing was computed.
    #[error("enumeration refused: {needed} extensions exceed budget {budget}")]
    Refused { needed: u128, budget: u128 },

    #[error("precondition not met: {0}")]
    Precondition(String),

    #[error("parse error on line {line}: {message}")]
    Parse { line: usize, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }

    pub(crate) fn parse(line: usize, msg: impl Into<String>) -> Self {
        Error::Parse {
            line,
            message: msg.into(),
        }
    }
}
