use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("{0} is not a fundamental discriminant")]
    NotFundamental(i64),

    #[error("domain error: {0}")]
    Domain(String),

    #[error("discriminant mismatch: {0} vs {1}")]
    DiscriminantMismatch(i64, i64),

    #[error("modulus {m_f} is not coprime to the finite places of S ({prime})")]
    ModulusMeetsS { m_f: u64, prime: u64 },

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("local norm index at p={p} did not stabilize below truncation level {cap}")]
    NoStabilization { p: u64, cap: u32 },

    #[error("budget exceeded: {0}")]
    Budget(String),

    #[error("generator set is not stable under the Galois action")]
    NotGaloisStable,

    #[error("formula violation: {0}")]
    FormulaViolation(String),

    #[error("oracle cache: {0}")]
    Cache(String),
}
