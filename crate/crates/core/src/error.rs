use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("division by zero")]
    DivisionByZero,

    #[error("invalid rational literal {0:?}")]
    InvalidLiteral(String),

    #[error("derivation index {index} out of range for a ring with {m} derivations")]
    DerivationOutOfRange { index: usize, m: usize },

    #[error("ring context mismatch: {0}")]
    ContextMismatch(String),

    #[error("polynomial has no derivatives (it is a constant)")]
    Constant,

    #[error("set is not weak d-triangular: {0}")]
    NotWeakTriangular(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("parse error at line {line}, column {column}: {message}")]
    Parse {
        line: usize,
        column: usize,
        message: String,
    },

    #[error("polynomial is not linear homogeneous in a single indeterminate: {0}")]
    NotLinear(String),

    #[error("step budget of {budget} exhausted")]
    BudgetExhausted {
        budget: usize,
        partial: Box<crate::decompose::PartialRun>,
    },

    #[error("bound computation exceeds the index limit {limit}")]
    BoundTooLarge { limit: u64 },

    #[error("antichain search space too large: {0}")]
    SearchSpaceOverflow(String),
}
