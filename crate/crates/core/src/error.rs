use thiserror::Error;

/// Errors shared by every module of the crate.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("p = {0} is not prime")]
    NonPrimeP(u64),

    #[error("modulus is not irreducible over F_{p}: divisible by a factor of degree {factor_degree}")]
    ReducibleModulus { p: u64, factor_degree: usize },

    #[error("unsupported size: {0}")]
    UnsupportedSize(String),

    #[error("size budget exceeded: {what} needs {needed}, cap is {cap}")]
    SizeBudgetExceeded {
        what: &'static str,
        needed: u128,
        cap: u128,
    },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("degree too large: degree {degree} exceeds bound {bound}")]
    DegreeTooLarge { degree: usize, bound: usize },

    #[error("epsilon {0} out of range (0, 1/2)")]
    EpsilonOutOfRange(f64),

    #[error("no admissible slot for monomial {0:?} under the degree threshold")]
    NoAdmissibleSlot(Vec<u32>),

    #[error("arity mismatch: equation has {expected} slots, tuple has {got}")]
    ArityMismatch { expected: usize, got: usize },

    #[error("invalid equation: {0}")]
    InvalidEquation(String),

    #[error("parse error: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
