//! Crate-wide error type.

use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid area: x_max ({x_max}) must exceed x_min ({x_min}) and y_max ({y_max}) must exceed y_min ({y_min})")]
    InvalidArea {
        x_min: f64,
        y_min: f64,
        x_max: f64,
        y_max: f64,
    },

    #[error("invalid parameter `{name}`: {reason}")]
    InvalidParam { name: String, reason: String },

    #[error("target placement failed after {attempts} attempts: {reason}")]
    PlacementFailed { attempts: usize, reason: String },

    #[error("flight plan has no waypoints")]
    EmptyPlan,

    #[error("scan list is empty; cannot switch to check mode")]
    EmptyScanList,

    #[error("mission is already complete")]
    MissionComplete,

    #[error("malformed {what}: {reason}")]
    Malformed { what: String, reason: String },

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn param(name: &str, reason: impl Into<String>) -> Self {
        Error::InvalidParam {
            name: name.to_string(),
            reason: reason.into(),
        }
    }

    pub(crate) fn malformed(what: &str, reason: impl std::fmt::Display) -> Self {
        Error::Malformed {
            what: what.to_string(),
            reason: reason.to_string(),
        }
    }
}
