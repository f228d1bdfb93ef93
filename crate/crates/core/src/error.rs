use std::path::PathBuf;

use crate::dynamics::TrajectoryRecord;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("input shape mismatch: expected {expected} values, got {got}")]
    InputShape { expected: usize, got: usize },

    #[error("invalid field: {0}")]
    InvalidField(String),

    #[error("parameter out of range: {0}")]
    Parameter(String),

    #[error("degenerate input: {0}")]
    DegenerateInput(String),

    #[error("precondition violated: {0}")]
    Precondition(String),

    #[error("state is not dealiased: {fraction:.3e} of the energy lies above the retained band")]
    Aliasing { fraction: f64 },

    /// Carries whatever trajectory was recorded before the failure.
    #[error("solution blew up at t = {time}")]
    BlowUp {
        time: f64,
        partial: Option<Box<TrajectoryRecord>>,
    },

    #[error("quadrature did not converge: refinement levels differ by {rel_diff:.3e} (relative)")]
    Quadrature { rel_diff: f64 },

    #[error("outside the quadratic regime: {0}")]
    Regime(String),

    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("serialization error: {0}")]
    Serialize(String),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }
}

impl From<serde_json::Error> for Error {
    fn from(e: serde_json::Error) -> Self {
        Error::Serialize(e.to_string())
    }
}

impl From<csv::Error> for Error {
    fn from(e: csv::Error) -> Self {
        Error::Serialize(e.to_string())
    }
}
