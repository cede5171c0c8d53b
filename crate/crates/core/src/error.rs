use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error("instance too large for enumeration: {combinations} candidate bases exceed the limit of {limit}")]
    TooLarge { combinations: u128, limit: u128 },

    #[error("simplex iteration limit ({0}) reached")]
    IterationLimit(usize),

    #[error("feasible region is unbounded")]
    UnboundedRegion,

    #[error("feasible region is empty")]
    EmptyRegion,

    #[error("Slater condition violated: interior margin {0} is not positive")]
    NoSlaterPoint(f64),

    #[error("privatized program is infeasible; the supplied A_sup/b_inf envelope violates perturbed feasibility")]
    PerturbedInfeasible,

    #[error("privatized program is unbounded")]
    PerturbedUnbounded,

    #[error("solution violates the original constraints (max violation {0:e})")]
    FeasibilityViolated(f64),

    #[error("no non-degenerate trials (all residuals below threshold)")]
    NoValidTrials,

    #[error("division by zero: {0}")]
    ZeroDenominator(&'static str),

    #[error("{0}")]
    Empty(&'static str),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
