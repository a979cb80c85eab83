use thiserror::Error;

/// Errors raised by the algebra, module, frame and classification layers.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Shapes, ranks or signatures do not line up.
    #[error("structural error: {0}")]
    Structural(String),

    /// The operation is well-formed but its mathematical precondition fails.
    #[error("domain error: {0}")]
    Domain(String),

    /// Two independent decision procedures that must agree did not.
    #[error("internal consistency violation in {invariant}: {detail}")]
    Inconsistent { invariant: String, detail: String },

    /// A generator could not satisfy its contract.
    #[error("generation failed: {0}")]
    Generation(String),
}

pub type Result<T> = std::result::Result<T, Error>;

pub(crate) fn structural(msg: impl Into<String>) -> Error {
    Error::Structural(msg.into())
}
