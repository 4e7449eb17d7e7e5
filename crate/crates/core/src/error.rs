use thiserror::Error;

/// Errors produced by the prediction pipeline.
#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("malformed road network: {0}")]
    RoadNetwork(String),

    #[error("unknown traffic object {0}")]
    UnknownObject(u32),

    #[error("maneuver {label} is not allowed on lane {lane}")]
    ManeuverNotAllowed { label: String, lane: String },

    #[error("path tracker diverged for object {object}: lateral error {lateral_error:.2} m at t = {t:.2} s")]
    TrackerDiverged {
        object: u32,
        lateral_error: f64,
        t: f64,
    },

    #[error("sweep moves object {object} off lane {lane} (arc length {s:.2} m outside [0, {length:.2}])")]
    OffLane {
        object: u32,
        lane: String,
        s: f64,
        length: f64,
    },

    #[error("hypothesis weights of object {object} sum to {sum}, expected 1")]
    WeightSum { object: u32, sum: f64 },

    #[error("grid specification mismatch: {0}")]
    GridMismatch(String),

    #[error("feature length mismatch: expected {expected}, got {got}")]
    FeatureLength { expected: usize, got: usize },

    #[error("occupancy probability {0} outside [0, 1]")]
    ProbabilityRange(f64),

    #[error("{context}: {message}")]
    Format { context: String, message: String },

    #[error("cannot access {path}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },
}

impl Error {
    pub(crate) fn format(context: impl Into<String>, message: impl Into<String>) -> Self {
        Error::Format {
            context: context.into(),
            message: message.into(),
        }
    }

    pub(crate) fn io(path: &std::path::Path, source: std::io::Error) -> Self {
        Error::Io {
            path: path.display().to_string(),
            source,
        }
    }

    /// True for rejected parameters (command-line values, configuration,
    /// sweep settings) as opposed to failures while processing data.
    pub fn is_usage(&self) -> bool {
        matches!(self, Error::InvalidParameter(_))
    }
}

pub type Result<T> = std::result::Result<T, Error>;
