use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("day index {index} out of range for a {num_days}-day calendar")]
    DayOutOfRange { index: usize, num_days: usize },

    #[error("tour has {actual} days but the instance has {expected}")]
    TourLength { expected: usize, actual: usize },

    #[error("city code {code} on day {day} is outside 0..={num_cities}")]
    UnknownCity {
        day: usize,
        code: usize,
        num_cities: usize,
    },

    #[error("invalid instance: {0}")]
    InvalidInstance(String),

    #[error("dimension mismatch: {0}")]
    Dimension(String),

    #[error("unknown venue status token {token:?} (row {row}, column {column})")]
    UnknownStatus {
        token: String,
        row: usize,
        column: usize,
    },

    #[error("cannot merge an empty list of venue availabilities")]
    EmptyMerge,

    #[error("travel limit must be positive, got {0}")]
    TravelLimit(u32),

    #[error("invalid generator parameters: {0}")]
    Generator(String),

    #[error("city order needs {required} days but the calendar has only {available}")]
    PlacementOverflow { required: usize, available: usize },

    #[error("invalid annealing parameters: {0}")]
    AnnealParams(String),

    #[error("temperature must be positive, got {0}")]
    Temperature(f64),

    #[error("no move exists: the tour needs at least one performance and two days")]
    NoMove,

    #[error("enumeration of {count} tours exceeds the cap of {cap}")]
    EnumerationCap { count: u128, cap: u128 },

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("{path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("{path}: {message}")]
    Parse { path: PathBuf, message: String },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn csv(path: impl Into<PathBuf>, source: csv::Error) -> Self {
        Error::Csv {
            path: path.into(),
            source,
        }
    }

    pub(crate) fn parse(path: impl Into<PathBuf>, message: impl Into<String>) -> Self {
        Error::Parse {
            path: path.into(),
            message: message.into(),
        }
    }
}
