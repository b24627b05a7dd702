use core::fmt;

pub type Result<T> = core::result::Result<T, Error>;

#[derive(Debug, Clone, PartialEq)]
pub enum Error {
    /// A raster with zero width or height.
    EmptyRaster,
    /// Backing buffer does not hold `width * height * channels` values.
    DataLength { expected: usize, found: usize },
    DimensionMismatch {
        expected: (usize, usize),
        found: (usize, usize),
    },
    /// A unit-domain value outside `[0, 1]` or not finite.
    ValueOutOfRange { index: usize, value: f64 },
    /// A mask value other than 0 or 1.
    NonBinary { index: usize, value: u8 },
    /// Negative, NaN or infinite depth.
    InvalidDepth { index: usize, value: f64 },
    InvalidParameter {
        name: &'static str,
        reason: &'static str,
    },
    /// Image smaller than a required window.
    TooSmall {
        min: usize,
        width: usize,
        height: usize,
    },
    /// Two lists that must pair up element-wise have different lengths.
    LengthMismatch { expected: usize, found: usize },
    /// Probability argument of a log-loss at or beyond the open interval (0, 1).
    ProbabilityOutOfRange { name: &'static str, value: f64 },
    InfeasibleSplit {
        samples: usize,
        group_size: usize,
        per_group: usize,
    },
}

impl fmt::Display for Error {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Error::EmptyRaster => write!(f, "raster has zero width or height"),
            Error::DataLength { expected, found } => {
                write!(f, "raster data length {found}, expected {expected}")
            }
            Error::DimensionMismatch { expected, found } => write!(
                f,
                "dimension mismatch: expected {}x{}, found {}x{}",
                expected.0, expected.1, found.0, found.1
            ),
            Error::ValueOutOfRange { index, value } => {
                write!(f, "value {value} at index {index} is outside [0, 1]")
            }
            Error::NonBinary { index, value } => {
                write!(f, "mask value {value} at index {index} is not 0 or 1")
            }
            Error::InvalidDepth { index, value } => {
                write!(
                    f,
                    "depth {value} at index {index} is not finite and non-negative"
                )
            }
            Error::InvalidParameter { name, reason } => write!(f, "invalid {name}: {reason}"),
            Error::TooSmall { min, width, height } => write!(
                f,
                "image {width}x{height} is smaller than the {min}x{min} window"
            ),
            Error::LengthMismatch { expected, found } => {
                write!(f, "expected {expected} entries, found {found}")
            }
            Error::ProbabilityOutOfRange { name, value } => {
                write!(f, "{name} = {value} must lie strictly between 0 and 1")
            }
            Error::InfeasibleSplit {
                samples,
                group_size,
                per_group,
            } => write!(
                f,
                "cannot draw {per_group} per group from {samples} samples in groups of {group_size}"
            ),
        }
    }
}

impl core::error::Error for Error {}
