use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, found {found}")]
    Dimension { expected: usize, found: usize },

    #[error("matrix must have at least one row")]
    Empty,

    #[error("entry ({row}, {col}) is not a max-plus scalar: {value}")]
    InvalidEntry { row: usize, col: usize, value: f64 },

    #[error("no cycles: the associated digraph is acyclic")]
    NoCycles,

    #[error("divergent star: component {component} has cycle mean {lambda} > 0 (node {node})")]
    DivergentStar {
        component: usize,
        node: usize,
        lambda: f64,
    },

    #[error("not definite: maximum cycle mean is {lambda}, expected 0")]
    NotDefinite { lambda: f64 },

    #[error("not a critical-part matrix: {0}")]
    NotCriticalPart(String),

    #[error("overlapping node sets: node {node} belongs to terms {first} and {second}")]
    OverlappingNodeSets {
        node: usize,
        first: usize,
        second: usize,
    },

    #[error("unknown component id {0}")]
    UnknownComponent(usize),

    #[error("node {node} out of range for dimension {n}")]
    NodeOutOfRange { node: usize, n: usize },

    #[error("invalid block shape: {0}")]
    InvalidBlock(String),

    #[error("t = {t} is below the validity threshold {threshold}")]
    BelowThreshold { t: u64, threshold: u64 },

    #[error("not orbit periodic")]
    NotOrbitPeriodic,

    #[error("zero vector: every entry is -inf")]
    ZeroVector,

    #[error("trivial column: node {0} lies in a trivial component")]
    TrivialColumn(usize),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("too large for oracle: n = {n} exceeds the cap {cap}")]
    TooLargeForOracle { n: usize, cap: usize },
}
