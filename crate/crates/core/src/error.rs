use thiserror::Error;

/// Errors raised by the algebraic routines.
#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("field mismatch: {0}")]
    FieldMismatch(String),
    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),
    #[error("modulus {0} is not a prime below 2^16")]
    NotPrime(u64),
    #[error("function-field towers deeper than k(t) are not supported")]
    TowerTooDeep,
    #[error("polynomial is inseparable (f' = 0 in characteristic {0})")]
    Inseparable(u64),
    #[error("odd-rank forms in characteristic 2 have no half-discriminant")]
    OddRankChar2,
    #[error("basis vectors are linearly dependent")]
    DependentBasis,
    #[error("vector lies in the radical of the polar form")]
    InRadical,
    #[error("vector is not isotropic")]
    NotIsotropic,
    #[error("rank {rank} exceeds the cap {cap} for {what}")]
    RankCap {
        what: &'static str,
        rank: usize,
        cap: usize,
    },
    #[error("characteristic {0} is too small for the trace-form criterion on dimension {1}")]
    CharacteristicTooSmall(u64, usize),
    #[error("center has unexpected shape: {0}")]
    UnexpectedCenter(String),
    #[error("wrong rank: expected {expected}, got {got}")]
    WrongRank { expected: usize, got: usize },
    #[error("discriminant form is not squarefree")]
    NotSquarefree,
    #[error("enumeration budget exceeded: {0}")]
    BudgetExceeded(String),
    #[error("unsupported: {0}")]
    Unsupported(String),
    #[error("parse error at position {pos}: {msg}")]
    Parse { pos: usize, msg: String },
    #[error("invariant falsified: {0}")]
    Falsified(String),
}

pub type Result<T> = std::result::Result<T, Error>;
