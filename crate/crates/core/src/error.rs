use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum Error {
    #[error("{0} is not prime")]
    NotPrime(u64),
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    #[error("shape mismatch: {0}")]
    ShapeMismatch(String),
    #[error("element {0} is not a unit")]
    NotUnit(String),
    #[error("structure too large: {size} elements exceeds bound {bound}")]
    TooLarge { size: usize, bound: usize },
    #[error("ring is not local")]
    NotLocal,
    #[error("residue degree {lambda} does not divide {residue_degree}")]
    DegreeMismatch { lambda: u32, residue_degree: u32 },
    #[error("characteristic mismatch: expected p^{expected}, found p^{found} (p = {p})")]
    CharacteristicMismatch { p: u64, expected: u32, found: u32 },
    #[error("map violates the hom condition at entry ({row}, {col})")]
    HomCondition { row: usize, col: usize },
    #[error("not a group: {0}")]
    NotAGroup(String),
    #[error("not a gamma function: {0}")]
    NotGamma(String),
    #[error("subset is not an ideal")]
    NotAnIdeal,
    #[error("brace is not two-sided")]
    NotTwoSided,
    #[error("not a ring homomorphism: {0}")]
    NotAHomomorphism(String),
    #[error("base ring is not a field")]
    BaseNotField,
    #[error("precondition violated: {0}")]
    Precondition(String),
    #[error("search budget exhausted after {nodes} nodes ({found} results so far)")]
    BudgetExhausted { nodes: u64, found: usize },
    #[error("malformed document: {0}")]
    Malformed(String),
}

pub type Result<T> = std::result::Result<T, Error>;
