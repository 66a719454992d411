use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),

    #[error("p^N does not fit the residue word (p = {p}, N = {precision})")]
    PrecisionTooLarge { p: u64, precision: u32 },

    #[error("element is not a unit")]
    NotAUnit,

    #[error("{which} is not Eisenstein: {reason}")]
    NotEisenstein { which: &'static str, reason: String },

    #[error("the supplied image of the uniformizer is not a root of E_L")]
    SigmaNotARoot,

    #[error("the supplied automorphism does not have order p: {0}")]
    SigmaWrongOrder(String),

    #[error("precision exhausted: {0}")]
    PrecisionExhausted(String),

    #[error("projected term count {projected} exceeds the limit {limit}")]
    ResourceLimit { projected: u128, limit: u128 },

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("the right-hand side is not in the image")]
    NoSolution,

    #[error("trace-zero sampling gave up at level {level}")]
    SamplingExhausted { level: usize },

    #[error("restriction map is nonzero on {vector}")]
    PropositionViolated { vector: String },

    #[error("level-1 cohomology is unstable across precisions: {0}")]
    Unstable(String),

    #[error("cross-check failed: {0}")]
    CrossCheckFailed(String),

    #[error("polynomial has non-integral coefficients: {0}")]
    NotIntegral(String),

    #[error("invalid extension spec: {0}")]
    InvalidSpec(String),
}
