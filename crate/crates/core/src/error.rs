use thiserror::Error;

pub type Result<T> = std::result::Result<T, ModelError>;

/// Structural errors raised by the in-memory API.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("variable {var} lists itself as a parent")]
    SelfParent { var: String },
    #[error("variable {var} has no empty parent set with weight zero")]
    MissingEmptyParentSet { var: String },
    #[error("variable {var} has a non-finite score")]
    NonFiniteScore { var: String },
    #[error("parent id {parent} of variable {var} is out of range")]
    ParentOutOfRange { var: String, parent: usize },
    #[error("duplicate variable name {0}")]
    DuplicateName(String),
    #[error("expected {expected} entries, got {actual}")]
    LengthMismatch { expected: usize, actual: usize },
    #[error("sequence is not a permutation of 0..{0}")]
    NotAPermutation(usize),
    #[error("triple index {index} out of range for variable {var}")]
    TripleOutOfRange { var: String, index: usize },
    #[error("orderings range over different variable sets ({0} vs {1} variables)")]
    VariableSetMismatch(usize, usize),
    #[error("invalid range [{start}, {end}] for {n} variables")]
    InvalidRange { start: usize, end: usize, n: usize },
    #[error("negative in-degree bound {0}")]
    NegativeBound(i64),
    #[error("window radius {0} exceeds the supported maximum of {1}")]
    RadiusTooLarge(usize, usize),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("oracle budget exceeded: {0}")]
    OracleBudget(String),
}
