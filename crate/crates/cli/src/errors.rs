//! CLI error type with a stable exit-code mapping:
//! 2 = input/schema error, 3 = domain/degenerate-math error, 4 = internal.

use thiserror::Error;
use vistat_core::metrics::MetricError;
use vistat_core::series::SeriesError;
use vistat_core::statcompare::StatError;
use vistat_core::tgmodel::checkpoint::CheckpointError;
use vistat_core::tgmodel::ModelError;
use vistat_core::visgraph::VisGraphError;

#[derive(Debug, Error)]
pub enum CliError {
    #[error("{0}")]
    Input(String),
    #[error("{0}")]
    Domain(String),
    #[error("internal error: {0}")]
    Internal(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Input(_) => 2,
            CliError::Domain(_) => 3,
            CliError::Internal(_) => 4,
        }
    }

    pub fn input(e: impl std::fmt::Display) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<SeriesError> for CliError {
    fn from(e: SeriesError) -> Self {
        match e {
            SeriesError::DegenerateWindow(_) | SeriesError::InvalidSigma(_) => {
                CliError::Domain(e.to_string())
            }
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<VisGraphError> for CliError {
    fn from(e: VisGraphError) -> Self {
        match e {
            VisGraphError::BadPair { .. } => CliError::Internal(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<MetricError> for CliError {
    fn from(e: MetricError) -> Self {
        match e {
            MetricError::ZeroTarget(_) | MetricError::DegenerateDenominator => {
                CliError::Domain(e.to_string())
            }
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<StatError> for CliError {
    fn from(e: StatError) -> Self {
        match e {
            StatError::Degenerate(_) => CliError::Domain(e.to_string()),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        match e {
            ModelError::NonFiniteGradient(_) | ModelError::BadAdjacency => {
                CliError::Internal(e.to_string())
            }
            ModelError::Graph(g) => g.into(),
            _ => CliError::Input(e.to_string()),
        }
    }
}

impl From<CheckpointError> for CliError {
    fn from(e: CheckpointError) -> Self {
        CliError::Input(e.to_string())
    }
}

impl From<std::io::Error> for CliError {
    fn from(e: std::io::Error) -> Self {
        CliError::Input(e.to_string())
    }
}
