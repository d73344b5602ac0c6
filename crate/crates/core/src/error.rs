use thiserror::Error;

use crate::touchstone::ParseError;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    /// A parameter is outside the range its formula accepts.
    #[error("invalid {name} = {value:e}: {reason}")]
    Validation {
        name: &'static str,
        value: f64,
        reason: &'static str,
    },

    /// The two TSVs overlap, or are close enough that acosh(p / 2r) falls
    /// below the configured floor.
    #[error("TSV pitch {pitch:e} m too small for radius {radius:e} m (acosh argument {ratio})")]
    GeometryOverlap { pitch: f64, radius: f64, ratio: f64 },

    #[error("degenerate element {element} = {value:e} (below {floor:e})")]
    DegenerateElement {
        element: &'static str,
        value: f64,
        floor: f64,
    },

    #[error("singular nodal matrix at {frequency:e} Hz")]
    SingularNodal { frequency: f64 },

    #[error("Z/S conversion failed at {frequency:e} Hz (condition number {condition:e})")]
    Conversion { frequency: f64, condition: f64 },

    #[error("at {frequency:e} Hz: {source}")]
    AtFrequency {
        frequency: f64,
        #[source]
        source: Box<Error>,
    },

    #[error("invalid frequency grid: {0}")]
    Grid(String),

    #[error("reference impedance differs across sweep: {first} vs {other} Ohm")]
    MixedReference { first: f64, other: f64 },

    /// First-order sideband model is not meaningful at this modulation index.
    #[error(
        "modulation index {beta:.4} is outside the sideband model's validity (must be < {limit})"
    )]
    ModelValidity { beta: f64, limit: f64 },

    #[error("calibration needs at least one reference point")]
    EmptyCalibration,

    #[error("config line {line}: {message}")]
    Config { line: usize, message: String },

    #[error(transparent)]
    Touchstone(#[from] ParseError),

    #[error(transparent)]
    Io(#[from] std::io::Error),
}

impl Error {
    pub(crate) fn at_frequency(self, frequency: f64) -> Self {
        match self {
            Error::AtFrequency { .. } | Error::SingularNodal { .. } | Error::Conversion { .. } => {
                self
            }
            other => Error::AtFrequency {
                frequency,
                source: Box::new(other),
            },
        }
    }

    pub(crate) fn validation(name: &'static str, value: f64, reason: &'static str) -> Self {
        Error::Validation {
            name,
            value,
            reason,
        }
    }
}
