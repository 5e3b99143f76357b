use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("need at least {need} points, got {got}")]
    TooFewPoints { need: usize, got: usize },

    #[error("separation parameter s must be greater than 1, got {0}")]
    InvalidSeparation(f64),

    #[error("deformable spanner constant c must be at least 1, got {0}")]
    InvalidSpannerConstant(f64),

    #[error("set must be nonempty")]
    EmptySet,

    #[error("point {0} is out of range (n = {1})")]
    IdOutOfRange(usize, usize),

    #[error("points {0} and {1} coincide")]
    DuplicatePoint(usize, usize),

    #[error("point {index} has {got} coordinates, expected {expected}")]
    DimensionMismatch {
        index: usize,
        expected: usize,
        got: usize,
    },

    #[error("coordinate or distance is not finite at entry {0}")]
    NonFinite(usize),

    #[error("distance matrix is not square: row {row} has {got} entries, expected {expected}")]
    NotSquare {
        row: usize,
        expected: usize,
        got: usize,
    },

    #[error("distance matrix is not symmetric at ({0}, {1})")]
    Asymmetric(usize, usize),

    #[error("distance matrix has nonzero diagonal at {0}")]
    NonzeroDiagonal(usize),

    #[error("negative distance at ({0}, {1})")]
    NegativeDistance(usize, usize),

    #[error("triangle inequality fails for ({0}, {1}, {2})")]
    TriangleViolation(usize, usize, usize),

    #[error("edge ({0}, {1}) is a self-loop")]
    SelfLoop(usize, usize),

    #[error("edge ({0}, {1}) already present")]
    DuplicateEdge(usize, usize),

    #[error("pair order is invalid: {0}")]
    InvalidOrder(String),

    #[error("no covering pair for ({0}, {1})")]
    MissingCover(usize, usize),

    #[error("covering edge ({0}, {1}) is not in the graph")]
    MissingEdge(usize, usize),

    #[error("protocol violation: {0}")]
    ProtocolViolation(String),

    #[error("node {0} is not present")]
    NodeAbsent(usize),

    #[error("parse error: {0}")]
    Parse(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
