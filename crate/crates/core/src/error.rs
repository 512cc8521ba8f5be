use thiserror::Error;

/// Errors raised by estimation, interval inversion, ingestion and configuration.
///
/// Every variant carries a stable machine-readable code (see [`PovError::code`])
/// and maps onto a process exit code for the CLI.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum PovError {
    #[error("{required} or more observations at or below the poverty line are required, found {found}")]
    NoPoorObservations { found: usize, required: usize },

    #[error("poor subsample is degenerate (a single observation or zero mean income)")]
    DegenerateSubsample,

    #[error("confidence interval is degenerate: the estimating values are identically zero")]
    DegenerateInterval,

    #[error("zero is not strictly inside the convex hull of the estimating values")]
    Infeasible,

    #[error("Lagrange multiplier solver did not converge after {iterations} iterations")]
    NonConvergence { iterations: usize },

    #[error("invalid sample: {0}")]
    InvalidSample(String),

    #[error("poverty line must be finite and > 0, got {0}")]
    InvalidPovertyLine(f64),

    #[error("alpha must lie in (0, 1), got {0}")]
    InvalidAlpha(f64),

    #[error("distribution puts no mass at or below the poverty line")]
    ZeroPoorMass,

    #[error("invalid distribution: {0}")]
    InvalidDistribution(String),

    #[error("negative incomes on rows {rows:?}")]
    NegativeIncome { rows: Vec<usize> },

    #[error("malformed numbers on rows {rows:?}")]
    MalformedNumber { rows: Vec<usize> },

    #[error("at least 2 observations are required, found {found}")]
    TooFewObservations { found: usize },

    #[error("column {0:?} not found")]
    MissingColumn(String),

    #[error("i/o error: {0}")]
    Io(String),

    #[error("invalid configuration: {0}")]
    Config(String),
}

impl PovError {
    pub fn code(&self) -> &'static str {
        match self {
            PovError::NoPoorObservations { .. } => "NO_POOR_OBSERVATIONS",
            PovError::DegenerateSubsample => "DEGENERATE_SUBSAMPLE",
            PovError::DegenerateInterval => "DEGENERATE_INTERVAL",
            PovError::Infeasible => "INFEASIBLE",
            PovError::NonConvergence { .. } => "NON_CONVERGENCE",
            PovError::InvalidSample(_) => "INVALID_SAMPLE",
            PovError::InvalidPovertyLine(_) => "INVALID_POVERTY_LINE",
            PovError::InvalidAlpha(_) => "INVALID_ALPHA",
            PovError::ZeroPoorMass => "ZERO_POOR_MASS",
            PovError::InvalidDistribution(_) => "INVALID_DISTRIBUTION",
            PovError::NegativeIncome { .. } => "NEGATIVE_INCOME",
            PovError::MalformedNumber { .. } => "MALFORMED_NUMBER",
            PovError::TooFewObservations { .. } => "TOO_FEW_OBSERVATIONS",
            PovError::MissingColumn(_) => "MISSING_COLUMN",
            PovError::Io(_) => "IO_ERROR",
            PovError::Config(_) => "CONFIG_ERROR",
        }
    }

    /// 2 = input data problem, 3 = inference failure, 4 = configuration problem.
    pub fn exit_code(&self) -> i32 {
        match self {
            PovError::NegativeIncome { .. }
            | PovError::MalformedNumber { .. }
            | PovError::TooFewObservations { .. }
            | PovError::MissingColumn(_)
            | PovError::InvalidSample(_)
            | PovError::Io(_) => 2,
            PovError::NoPoorObservations { .. }
            | PovError::DegenerateSubsample
            | PovError::DegenerateInterval
            | PovError::Infeasible
            | PovError::NonConvergence { .. }
            | PovError::ZeroPoorMass => 3,
            PovError::InvalidPovertyLine(_)
            | PovError::InvalidAlpha(_)
            | PovError::InvalidDistribution(_)
            | PovError::Config(_) => 4,
        }
    }
}

pub type Result<T> = std::result::Result<T, PovError>;
