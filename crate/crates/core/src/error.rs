use thiserror::Error;

/// Errors raised by every certlab module.
#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },

    #[error("{what} must be at least {min}, got {got}")]
    TooSmall {
        what: &'static str,
        min: usize,
        got: usize,
    },

    #[error("{what} must be at most {max}, got {got}")]
    TooLarge {
        what: &'static str,
        max: usize,
        got: usize,
    },

    #[error("malformed deck: {0}")]
    MalformedDeck(String),

    #[error("inconsistent card: {0}")]
    InconsistentCard(String),

    #[error("inconsistent deck: {0}")]
    InconsistentDeck(String),

    #[error("no reconstruction found after {candidates} candidate(s)")]
    NoReconstruction { candidates: usize },

    #[error("every feasible reattachment exceeds the ambiguity cap {cap}")]
    Ambiguous { cap: u64 },

    #[error("not a Latin square: {0}")]
    InvalidLatin(String),

    #[error("invalid trade: {0}")]
    InvalidTrade(String),

    #[error("order {0} is odd; sign-reversing maps need even order")]
    OddOrder(usize),

    #[error("illegal move: {0}")]
    IllegalMove(String),

    #[error("unknown feature key `{0}`")]
    UnknownFeature(String),

    #[error("missing feature key `{0}`")]
    MissingFeature(String),

    #[error("generation failed: {0}")]
    Generation(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
