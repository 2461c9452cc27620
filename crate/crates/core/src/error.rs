use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("degenerate direction: vector is orthogonal to root {root}")]
    DegenerateDirection { root: usize },

    #[error("weyl group closure exceeded the cap of {cap} elements")]
    CapExceeded { cap: usize },

    #[error("index {index} out of range 1..={len}")]
    IndexOutOfRange { index: usize, len: usize },

    #[error("point is outside the domain: {0}")]
    Domain(String),

    #[error("wall contact: x·α = {value:e} for root {root}")]
    WallContact { root: usize, value: f64 },

    #[error("finite-difference stencil leaves the smoothness region of the test function")]
    StencilOutsideDomain,

    #[error("transform is not orthogonal (max |θᵀθ − I| = {deviation:e})")]
    NotOrthogonal { deviation: f64 },

    #[error("invalid lift plan: {0}")]
    InvalidPlan(String),

    #[error("unsupported regime: {0}")]
    UnsupportedRegime(String),

    #[error("singular clock: (y·α)² vanished at grid index {index}")]
    SingularClock { index: usize },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("hypothesis not met: {0}")]
    HypothesisNotMet(String),

    #[error("negative control passed, check is vacuous: {0}")]
    VacuousCheck(String),

    #[error("config error at {pointer}: {message}")]
    Config { pointer: String, message: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

pub type Result<T> = std::result::Result<T, Error>;
