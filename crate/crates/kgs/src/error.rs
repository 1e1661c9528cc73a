use thiserror::Error;

/// Errors surfaced by the solver and the experiment drivers.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("invalid parameter: {0}")]
    Parameter(String),

    #[error("fields live on different grids")]
    GridMismatch,

    #[error("inconsistent first-order state: conjugate-pair deviation {max_dev:.3e}")]
    InconsistentState { max_dev: f64 },

    /// Picard iteration stopped contracting; the caller must shrink the interval.
    #[error(
        "interval too long: Picard residual grew for {growth_streak} consecutive \
         iterations (last residual {residual:.3e})"
    )]
    IntervalTooLong { residual: f64, growth_streak: usize },

    #[error("blow-up guard tripped: norm grew by factor {ratio:.3e} at t = {time}")]
    BlowUp { ratio: f64, time: f64 },

    #[error("degenerate sweep: {0}")]
    DegenerateSweep(String),

    #[error("domain error: {0}")]
    Domain(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),
}

impl Error {
    /// Exit code the CLI maps this error to: 2 for configuration problems,
    /// 3 for numerical aborts.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::Parameter(_)
            | Error::Domain(_)
            | Error::DegenerateSweep(_)
            | Error::GridMismatch
            | Error::Json(_)
            | Error::Io(_) => 2,
            _ => 3,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
