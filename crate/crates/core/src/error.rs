use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("matrix is not unitary (deviation {deviation:.3e})")]
    NotUnitary { deviation: f64 },

    #[error("root degree must be at least 1")]
    ZeroRootDegree,

    #[error("wire {wire} out of range for circuit of width {width}")]
    WireOutOfRange { wire: usize, width: usize },

    #[error("control and target share wire {0}")]
    ControlIsTarget(usize),

    #[error("{what} requires {min} or more, got {got}")]
    TooSmall {
        what: &'static str,
        min: usize,
        got: usize,
    },

    #[error("width {width} exceeds the dense-unitary limit of {limit} wires")]
    WidthLimit { width: usize, limit: usize },

    #[error("register width mismatch: expected {expected}, got {got}")]
    WidthMismatch { expected: usize, got: usize },

    #[error("lowering required: circuit contains controlled gates other than CX")]
    LoweringRequired,

    #[error("probability {0} outside [0, 1]")]
    Probability(f64),

    #[error("state is not normalized (norm² = {0})")]
    NotNormalized(f64),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}
