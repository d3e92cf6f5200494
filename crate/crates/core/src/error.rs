use thiserror::Error;

pub type Result<T> = std::result::Result<T, DtcError>;

#[derive(Debug, Error)]
pub enum DtcError {
    #[error("invalid chain specification: {0}")]
    InvalidSpec(String),

    #[error("invalid drive protocol: {0}")]
    InvalidProtocol(String),

    #[error("invalid initial state: {0}")]
    InvalidInitialState(String),

    #[error("site {site} out of range for a chain of {n_sites} sites")]
    SiteOutOfRange { site: usize, n_sites: usize },

    #[error("realization does not match chain: {0}")]
    Mismatch(String),

    #[error("H2I pulse count must be even, got {0}")]
    OddH2ICount(usize),

    #[error("protocol event at period {period} outside [0, {n_periods}]")]
    EventOutOfRange { period: usize, n_periods: usize },

    #[error("trajectory has {available} usable samples, {needed} needed")]
    InsufficientSamples { needed: usize, available: usize },

    #[error("domain error: {0}")]
    Domain(String),

    #[error("eigendecomposition failed for a {dim}x{dim} operator ({diagnostics})")]
    EigenFailure { dim: usize, diagnostics: String },

    #[error("numerical failure: {0}")]
    Numerical(String),

    #[error("invalid sweep plan: {0}")]
    InvalidPlan(String),

    #[error("configuration error: {0}")]
    Config(String),

    #[error(transparent)]
    Io(#[from] std::io::Error),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}

impl DtcError {
    /// Process exit status for the command-line tool.
    pub fn exit_code(&self) -> i32 {
        match self {
            DtcError::EigenFailure { .. }
            | DtcError::Numerical(_)
            | DtcError::InsufficientSamples { .. } => 3,
            DtcError::Io(_) | DtcError::Csv(_) => 1,
            _ => 2,
        }
    }
}
