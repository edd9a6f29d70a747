use alloc::string::String;

/// Errors reported by the detection pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// An argument violates a precondition (empty input, bad range, ...).
    InvalidInput(String),
    /// A histogram that cannot be normalized (zero L1 norm).
    DegenerateInput { pixel: usize, reason: String },
    /// Ambient-corrected histogram has no positive mass to locate a peak in.
    NoPeak { pixel: usize },
    /// Feature length does not match the model's feature dimension.
    DimensionMismatch { expected: usize, actual: usize },
    /// The model has no calibration scores; fit or calibrate it first.
    Uncalibrated,
    /// The scene geometry places no surface within the sensor's range.
    EmptyScene,
}

impl core::fmt::Display for Error {
    fn fmt(&self, f: &mut core::fmt::Formatter<'_>) -> core::fmt::Result {
        match self {
            Error::InvalidInput(msg) => write!(f, "invalid input: {msg}"),
            Error::DegenerateInput { pixel, reason } => {
                write!(f, "degenerate input at pixel {pixel}: {reason}")
            }
            Error::NoPeak { pixel } => {
                write!(f, "no peak: pixel {pixel} has no positive corrected mass")
            }
            Error::DimensionMismatch { expected, actual } => {
                write!(f, "dimension mismatch: expected {expected}, got {actual}")
            }
            Error::Uncalibrated => write!(f, "model has no calibration scores"),
            Error::EmptyScene => write!(f, "scene is entirely out of sensor range"),
        }
    }
}

impl core::error::Error for Error {}

impl Error {
    pub(crate) fn invalid(msg: impl Into<String>) -> Self {
        Error::InvalidInput(msg.into())
    }
}
