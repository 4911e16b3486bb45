use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("axis {axis} out of range for dimension {dim}")]
    AxisOutOfRange { axis: usize, dim: usize },
    #[error("truncation order mismatch: {0} vs {1}")]
    TruncationMismatch(usize, usize),
    #[error("arity mismatch: expected {expected}, got {got}")]
    ArityMismatch { expected: usize, got: usize },
    #[error("slot {slot} out of range for arity {arity}")]
    SlotOutOfRange { slot: usize, arity: usize },
    #[error("expected a polyvector of degree {expected}, got degree {got}")]
    WrongDegree { expected: usize, got: usize },
    #[error("bivector has non-constant component at {0:?}")]
    NonConstant(Vec<usize>),
    #[error("structure constants are not skew: c[{i}][{j}][{k}] != -c[{j}][{i}][{k}]")]
    NonSkew { i: usize, j: usize, k: usize },
    #[error("series has a nonzero constant term")]
    NonzeroConstantTerm,
    #[error("star product does not start with the pointwise product")]
    WrongConstantTerm,
    #[error("BCH composition supports truncation order <= {max}, requested {requested}")]
    BchDepth { max: usize, requested: usize },
    #[error("enumeration of {candidates} raw candidates exceeds the guard of {bound} ({formula})")]
    EnumerationGuard { candidates: u128, bound: u128, formula: String },
    #[error("configuration has points closer than the floor {floor}")]
    Coincident { floor: f64 },
    #[error("weight integration requires {0}")]
    WeightPrecondition(String),
    #[error("coincidence guard rejected {rejected} of {samples} samples")]
    RejectionRate { rejected: u64, samples: u64 },
    #[error("missing weights for graphs: {0:?}")]
    MissingWeights(Vec<String>),
    #[error("{0}")]
    Unsupported(String),
    #[error("size guard: {entries} matrix entries exceed {bound}")]
    SizeGuard { entries: u128, bound: u128 },
    #[error("algebra is not {0}")]
    BadAlgebra(String),
    #[error("deformation is not associative at order {0}")]
    NotAssociative(usize),
    #[error("corrupt weight cache: {0}")]
    CorruptCache(String),
    #[error("malformed input: {0}")]
    Parse(String),
    #[error(transparent)]
    Graph(#[from] crate::graphs::GraphError),
    #[error(transparent)]
    Io(#[from] std::io::Error),
    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
