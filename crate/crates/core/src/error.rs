use thiserror::Error;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("point is infeasible (max violation {violation:e} exceeds {tolerance:e})")]
    InfeasiblePoint { violation: f64, tolerance: f64 },

    #[error("biactive set has {count} indices; branch enumeration is capped at {cap}")]
    BiactiveOverflow { count: usize, cap: usize },

    #[error("({a}, {b}) is not in the complementarity set")]
    PointNotInComplementaritySet { a: f64, b: f64 },

    #[error("sampled signs match no NCP sign pattern")]
    InconsistentSigns,

    #[error("non-finite function value or gradient at {point:?}")]
    EvaluationFailure { point: Vec<f64> },

    #[error("inner solver failed at homotopy stage {stage}")]
    InnerSolverFailure { stage: usize },

    #[error("run result is infeasible; certificates require a feasible final point")]
    InfeasibleResult,

    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("instance too large for exhaustive enumeration ({size} > {max})")]
    TooLarge { size: usize, max: usize },

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

pub type Result<T, E = Error> = std::result::Result<T, E>;
