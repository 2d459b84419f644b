use thiserror::Error;

use crate::equation::ParseError;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("domain error: {0}")]
    Domain(String),

    #[error("q must be different from 0 and 1")]
    InvalidQ,

    #[error("overflow while evaluating {0}")]
    Overflow(String),

    #[error(transparent)]
    Parse(#[from] ParseError),

    #[error("invalid equation: {0}")]
    InvalidEquation(String),

    #[error("inconsistent initial part: {0}")]
    InconsistentInitialPart(String),

    #[error("all A_k zero: the linear part of F along phi0 has no leading term")]
    AllLeadingZero,

    #[error("exponent {exponent} is not representable within the search bound {bound}")]
    NotRepresentable { exponent: String, bound: u32 },

    #[error("root finding did not converge after {iterations} iterations")]
    RootsNotConverged {
        iterations: usize,
        partial: Vec<rug::Complex>,
    },

    #[error("small divisor underflow at m = {index}: |L(q^lambda q^m)| = {magnitude}")]
    SmallDivisor { index: String, magnitude: String },

    #[error("root a = 0 cannot be scanned (ln 0 is undefined); the hypothesis L(0) != 0 is required")]
    ZeroRoot,

    #[error("guardrail exceeded: {0}")]
    Guardrail(String),

    #[error("precision exhausted after {depth} partial quotients; at least {bits_needed} bits needed")]
    PrecisionExhausted { depth: usize, bits_needed: u32 },

    #[error("need at least {needed} samples, got {got}")]
    TooFewSamples { needed: usize, got: usize },

    #[error("unknown example `{0}` (expected ex1, ex2 or ex3)")]
    UnknownExample(String),

    #[error("malformed input: {0}")]
    Malformed(String),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Errors that signal a violated mathematical hypothesis rather than bad usage.
    pub fn is_hypothesis_violation(&self) -> bool {
        matches!(
            self,
            Error::SmallDivisor { .. }
                | Error::ZeroRoot
                | Error::AllLeadingZero
                | Error::InconsistentInitialPart(_)
        )
    }
}
