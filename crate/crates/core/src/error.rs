use thiserror::Error;

/// Errors raised by the protocol simulators and the experiment harness.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("modulus mismatch: {0} vs {1}")]
    ModulusMismatch(u64, u64),
    #[error("{0} is not a prime modulus")]
    NotPrime(u64),
    #[error("modulus {0} is outside the supported range [2, 2^32)")]
    ModulusOutOfRange(u64),
    #[error("zero has no multiplicative inverse")]
    ZeroInverse,
    #[error("variable {0} is not bound")]
    UnboundVariable(String),
    #[error("variable {0} does not occur in this polynomial")]
    UnknownVariable(String),
    #[error("restriction must bind a non-empty strict subset of the variables")]
    InvalidRestriction,
    #[error("monomial {0} violates the degree bounds or support of the polynomial")]
    InvalidMonomial(String),
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("length mismatch: expected {expected}, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("state is not normalised (squared norm {0})")]
    NotNormalised(f64),
    #[error("unknown signer identity {0}")]
    UnknownSigner(u64),
    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParameter { name: &'static str, reason: String },
    #[error("thresholds must satisfy s_a < s_v (got s_a = {s_a}, s_v = {s_v})")]
    ThresholdOrder { s_a: f64, s_v: f64 },
    #[error("key exchange has already been performed")]
    AlreadySymmetrised,
    #[error("key exchange has not been performed yet")]
    NotSymmetrised,
    #[error("one-time key has already been used")]
    KeyConsumed,
    #[error("expected {expected} public-key copies per recipient, got {actual}")]
    CopyCount { expected: usize, actual: usize },
    #[error("certification impossible: {0}")]
    Certification(String),
    #[error("bound is vacuous for these parameters: {0}")]
    VacuousBound(String),
    #[error("{attack} attack is not supported for protocol {protocol}")]
    Unsupported {
        protocol: &'static str,
        attack: &'static str,
    },
    #[error("at least {min} votes are required, got {actual}")]
    TooFewVotes { min: usize, actual: usize },
    #[error("sweep grid is too large: {runs} runs exceeds the cap of {cap}")]
    SweepTooLarge { runs: usize, cap: usize },
    #[error("i/o error: {0}")]
    Io(String),
    #[error("configuration error: {0}")]
    Config(String),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;

pub(crate) fn invalid(name: &'static str, reason: impl Into<String>) -> Error {
    Error::InvalidParameter {
        name,
        reason: reason.into(),
    }
}
