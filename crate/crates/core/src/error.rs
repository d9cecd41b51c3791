use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum Error {
    #[error("vertex {vertex} out of range for a graph with {count} vertices")]
    VertexOutOfRange { vertex: usize, count: usize },

    #[error("invalid edge id {0}")]
    InvalidEdge(usize),

    #[error("genus {0} is not supported here (need genus >= {1})")]
    GenusTooSmall(u32, u32),

    #[error("graph record declares genus {declared} but its structure has genus {computed}")]
    GenusMismatch { declared: i64, computed: i64 },

    #[error("not a graph-complex graph: {0}")]
    NotGraphComplexGraph(String),

    #[error("invalid permutation: {0}")]
    InvalidPermutation(String),

    #[error("dimension mismatch: {0}")]
    DimensionMismatch(String),

    #[error("boundary does not square to zero in degree {degree}: {detail}")]
    BoundarySquare { degree: i32, detail: String },

    #[error("relation violated: {0}")]
    RelationViolation(String),

    #[error("boundary crosses the loop/weight splitting: {0}")]
    SplittingViolation(String),

    #[error("non-integral or negative Lie dimension at n = {0}")]
    NonIntegralLieDimension(usize),

    #[error("malformed input: {0}")]
    Parse(String),
}

pub type Result<T> = std::result::Result<T, Error>;
