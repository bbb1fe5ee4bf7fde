//! Error taxonomy shared across the crate.
//!
//! The split mirrors how failures surface at the process boundary:
//! parameter problems, violated mathematical invariants, and size limits
//! are distinct outcomes and map to distinct exit codes in the CLI.

use thiserror::Error;

/// Crate-wide result alias.
pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// Construction parameters describe a degenerate or unsupported chain.
    #[error("degenerate chain: {0}")]
    DegenerateChain(String),

    /// A parameter is outside its documented range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    /// Input data violates a structural invariant (shape, stochasticity).
    #[error("invalid chain data: {0}")]
    InvalidChain(String),

    /// The chain is reducible or periodic; quantization needs ergodicity.
    #[error("chain is not ergodic: {0}")]
    NotErgodic(String),

    /// The requested object exceeds a configured size cap.
    #[error("capacity exceeded: {what} needs {needed}, cap is {cap}")]
    CapacityExceeded {
        what: &'static str,
        needed: usize,
        cap: usize,
    },

    /// Malformed JSON input.
    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    /// File I/O failure (CLI paths).
    #[error("io: {0}")]
    Io(#[from] std::io::Error),
}
