use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("variable count mismatch: {left} vs {right}")]
    VarCountMismatch { left: usize, right: usize },

    #[error("division by the zero polynomial")]
    DivisionByZero,

    #[error("{0}")]
    Domain(String),

    #[error("structural error: {0}")]
    Structural(String),

    #[error("recurrent law violated at step {step}: remainder leading term {leading_term}")]
    RecurrentLawViolated { step: usize, leading_term: String },
}

pub type Result<T> = std::result::Result<T, Error>;
