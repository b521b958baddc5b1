use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("schedule index {n} out of range for explicit list of length {len}")]
    ScheduleIndexOutOfRange { n: u32, len: usize },

    #[error("time {t} is beyond the computed timeline horizon {horizon}")]
    BeyondTimeline { t: u64, horizon: u64 },

    #[error("state space of {states} states exceeds the cap of {cap}")]
    StateCapExceeded { states: u64, cap: u64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("state {index} has no image under the level embedding")]
    EmbeddingMissing { index: usize },

    #[error("invalid descriptor `{0}`")]
    InvalidDescriptor(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("no closed-form stationary distribution: {0}")]
    NoClosedForm(String),

    #[error("no analytic bound: {0}")]
    NoBound(String),

    #[error("iteration did not converge: residual {residual:e} after {iterations} iterations")]
    NonConvergence { iterations: u64, residual: f64 },

    #[error("unsupported laziness gamma={gamma}: couplings cover gamma = 0 and 1/2 <= gamma < 1")]
    UnsupportedGamma { gamma: f64 },

    #[error("prefix-sum condition violated at phase {phase}")]
    PrefixConditionViolated { phase: u32 },

    #[error("family is not exactly lumpable: {0}")]
    NotLumpable(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    /// Process exit code for the CLI: 2 for configuration errors, 3 for
    /// resource caps, 1 otherwise.
    pub fn exit_code(&self) -> i32 {
        match self {
            Error::InvalidDescriptor(_)
            | Error::InvalidParameter(_)
            | Error::ScheduleIndexOutOfRange { .. }
            | Error::UnsupportedGamma { .. } => 2,
            Error::StateCapExceeded { .. } => 3,
            _ => 1,
        }
    }
}
