use std::path::PathBuf;

use chrono::NaiveDate;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, thiserror::Error)]
pub enum Error {
    #[error("line {line}: {message}")]
    MalformedRow { line: usize, message: String },

    #[error("duplicate date {0}")]
    DuplicateDate(NaiveDate),

    #[error("invalid bar on {date}: {message}")]
    InvalidBar { date: NaiveDate, message: String },

    #[error("series `{0}` has no bars")]
    EmptySeries(String),

    #[error("no dates common to all input series")]
    EmptyIntersection,

    #[error("column `{0}` not found")]
    MissingColumn(String),

    #[error("column `{name}` has {got} values, expected {expected}")]
    ColumnLength { name: String, expected: usize, got: usize },

    #[error("invalid date split: {0}")]
    InvalidSplit(String),

    #[error("degenerate (constant) columns: {}", .0.join(", "))]
    DegenerateColumns(Vec<String>),

    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },

    #[error("input is constant; correlation is undefined")]
    ZeroVariance,

    #[error("{what}: need more data ({message})")]
    InsufficientData { what: &'static str, message: String },

    #[error("value {value} at index {index} is outside [-1, 1]")]
    OutOfRange { index: usize, value: f64 },

    #[error("true value at index {0} is zero; MAPE undefined")]
    ZeroTrueValue(usize),

    #[error("shape mismatch: {0}")]
    Shape(String),

    #[error("invalid configuration: {0}")]
    Config(String),

    #[error("non-finite gradient in parameter block `{0}`")]
    NonFiniteGradient(&'static str),

    #[error("loss became NaN at epoch {epoch}, batch {batch}")]
    NanLoss { epoch: usize, batch: usize },

    #[error("checkpoint: {0}")]
    Checkpoint(String),

    #[error("HTTP request failed: {0}")]
    Http(String),

    #[error("provider rate limit hit, retry after {retry_after_secs}s: {message}")]
    RateLimited { retry_after_secs: u64, message: String },

    #[error("provider returned an error: {0}")]
    Provider(String),

    #[error("malformed provider payload: {0}")]
    MalformedPayload(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error(transparent)]
    Csv(#[from] csv::Error),

    #[error(transparent)]
    Json(#[from] serde_json::Error),

    #[error("{stage}: {source}")]
    Stage {
        stage: &'static str,
        #[source]
        source: Box<Error>,
    },
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io { path: path.into(), source }
    }

    /// Wraps the error with the name of the pipeline stage that produced it.
    pub fn at_stage(self, stage: &'static str) -> Self {
        Error::Stage { stage, source: Box::new(self) }
    }
}

pub(crate) trait StageExt<T> {
    fn stage(self, stage: &'static str) -> Result<T>;
}

impl<T> StageExt<T> for Result<T> {
    fn stage(self, stage: &'static str) -> Result<T> {
        self.map_err(|e| e.at_stage(stage))
    }
}
