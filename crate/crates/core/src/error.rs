use thiserror::Error;

pub type Result<T> = std::result::Result<T, SimError>;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("invalid parameters: {0}")]
    InvalidParams(String),

    #[error("config line {line}: {msg}")]
    Config { line: usize, msg: String },

    #[error("{what} budget of {limit} exceeded at time {time}")]
    Budget {
        what: &'static str,
        limit: usize,
        time: f64,
    },

    #[error("unsupported: {0}")]
    Unsupported(String),

    #[error("window violation: {0}")]
    Window(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("sample too small: need at least {needed}, got {got}")]
    SampleSize { needed: usize, got: usize },

    #[error("unknown experiment `{0}`")]
    UnknownExperiment(String),
}

impl SimError {
    pub fn is_budget(&self) -> bool {
        matches!(self, SimError::Budget { .. })
    }

    pub fn is_validation(&self) -> bool {
        matches!(
            self,
            SimError::InvalidParams(_)
                | SimError::Config { .. }
                | SimError::Precondition(_)
                | SimError::UnknownExperiment(_)
        )
    }
}
