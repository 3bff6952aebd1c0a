use thiserror::Error;

/// Errors shared by every solver in the crate.
///
/// The split mirrors how callers react: `Shape`/`Index` are programming
/// errors in the inputs, `Domain` means the instance violates a model
/// constraint, `TooLarge` means a deliberate size cap was hit (the exact
/// solvers are exponential by necessity).
#[derive(Debug, Error)]
pub enum Error {
    #[error("profile has {got} entries but the network has {expected} edges")]
    Shape { expected: usize, got: usize },

    #[error("edge index {index} out of range for a network with {edges} edges")]
    Index { index: usize, edges: usize },

    #[error("{0}")]
    Domain(String),

    #[error("{what} exceeds the cap of {cap} (got {got}); {hint}")]
    TooLarge {
        what: &'static str,
        cap: u64,
        got: u64,
        hint: &'static str,
    },

    #[error("{0}")]
    Parse(String),

    #[error("internal invariant violated: {0}")]
    Internal(String),
}

impl Error {
    pub fn domain(msg: impl Into<String>) -> Self {
        Error::Domain(msg.into())
    }
}

pub type Result<T> = std::result::Result<T, Error>;
