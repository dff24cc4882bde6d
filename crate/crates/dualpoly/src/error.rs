//! Error type shared by every constructor and oracle in the crate.

use alloc::string::String;

/// Failure modes of constructions, oracles and certificate checks.
///
/// Precondition failures are reported separately from certificate failures:
/// a rejected precondition means the construction is not claimed for the
/// given parameters, whereas a failed certificate means a claimed property
/// did not hold and indicates a bug.
#[derive(Debug, Clone, PartialEq, Eq, thiserror::Error)]
pub enum Error {
    /// Two operands live in spaces of different dimension.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch {
        /// Dimension of the left operand.
        left: usize,
        /// Dimension of the right operand.
        right: usize,
    },
    /// An operation that needs a particular domain kind got another one.
    #[error("unsupported domain: {0}")]
    Domain(String),
    /// A stated precondition of a construction does not hold.
    #[error("precondition violated in {stage}: {detail}")]
    Precondition {
        /// Name of the construction or pipeline stage.
        stage: &'static str,
        /// Human-readable description of the violated inequality.
        detail: String,
    },
    /// A property claimed by a certificate failed its exact re-check.
    #[error("certificate check failed in {stage}: {detail}")]
    Certificate {
        /// Name of the construction whose certificate failed.
        stage: &'static str,
        /// The invariant that failed.
        detail: String,
    },
    /// Parameters would produce a table beyond the dense operating limit.
    #[error("size limit exceeded: {0}")]
    TooLarge(String),
    /// A linear program was found unbounded where a finite value was needed.
    #[error("linear program unbounded")]
    Unbounded,
    /// A bounded search ran out of budget.
    #[error("search exhausted: {0}")]
    SearchExhausted(String),
    /// A value could not be parsed.
    #[error("parse error: {0}")]
    Parse(String),
    /// Malformed input that is not covered by the cases above.
    #[error("invalid input: {0}")]
    Invalid(String),
}

/// Crate-wide result alias.
pub type Result<T> = core::result::Result<T, Error>;

impl Error {
    /// Shorthand for a precondition failure.
    pub fn pre(stage: &'static str, detail: impl Into<String>) -> Self {
        Error::Precondition { stage, detail: detail.into() }
    }

    /// Shorthand for a certificate failure.
    pub fn cert(stage: &'static str, detail: impl Into<String>) -> Self {
        Error::Certificate { stage, detail: detail.into() }
    }
}
