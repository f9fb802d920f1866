use chrono::NaiveDate;
use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("row {row}: unknown rating label {label:?}")]
    UnknownLabel { row: usize, label: String },

    #[error("row {row}: bank {bank_id} has conflicting ratings on {date}")]
    ConflictingLabels {
        row: usize,
        bank_id: String,
        date: NaiveDate,
    },

    #[error("row {row}: {message}")]
    MalformedRow { row: usize, message: String },

    #[error("invalid window [{start}, {end}]")]
    InvalidWindow { start: NaiveDate, end: NaiveDate },

    #[error("date {date} outside observation span [{start}, {end}]")]
    OutsideSpan {
        date: NaiveDate,
        start: NaiveDate,
        end: NaiveDate,
    },

    #[error("tau must be at least one day, got {0}")]
    InvalidTau(i64),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("state {state} has {count} transitions but zero exposure")]
    InconsistentCounts { state: usize, count: u64 },

    #[error("matrix contains non-finite entries")]
    NonFinite,

    #[error("invalid matrix: {0}")]
    InvalidMatrix(String),

    #[error("empty sample")]
    EmptySample,

    #[error("invalid scenario: {0}")]
    InvalidScenario(String),

    #[error("invalid panel: {0}")]
    InvalidPanel(String),

    #[error("{path}: {source}")]
    Io {
        path: String,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Toml(#[from] toml::de::Error),
}

impl Error {
    pub(crate) fn io(path: impl AsRef<std::path::Path>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.as_ref().display().to_string(),
            source,
        }
    }
}
