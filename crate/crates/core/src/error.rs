use thiserror::Error;

use crate::state::SubsystemId;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum Error {
    /// Invalid parameters or an ill-formed combination of states.
    #[error("configuration error: {0}")]
    Config(String),

    #[error("subsystem layout mismatch: {left} vs {right}")]
    LayoutMismatch { left: String, right: String },

    #[error("subsystem {0} is not present in the state")]
    MissingSubsystem(SubsystemId),

    /// The post-selected state has (numerically) zero overlap with the
    /// projected state. The raw probability is kept so callers can report it.
    #[error("post-selection impossible{}: probability {probability:e}", stage_suffix(*.stage))]
    PostSelectionImpossible {
        probability: f64,
        stage: Option<usize>,
    },

    #[error("dense dimension {dimension} exceeds the oracle limit {limit}")]
    DimensionGuard { dimension: usize, limit: usize },
}

fn stage_suffix(stage: Option<usize>) -> String {
    match stage {
        Some(s) => format!(" at stage {s}"),
        None => String::new(),
    }
}

impl Error {
    pub(crate) fn config(msg: impl Into<String>) -> Self {
        Error::Config(msg.into())
    }

    /// Attach a stage index to a post-selection failure.
    pub fn at_stage(self, stage: usize) -> Self {
        match self {
            Error::PostSelectionImpossible { probability, .. } => Error::PostSelectionImpossible {
                probability,
                stage: Some(stage),
            },
            other => other,
        }
    }
}

pub type Result<T> = std::result::Result<T, Error>;
