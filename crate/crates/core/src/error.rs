use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("i/o error on {path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("malformed csv in {path}: {source}")]
    Csv {
        path: PathBuf,
        #[source]
        source: csv::Error,
    },

    #[error("no defect column found (looked for {candidates})")]
    MissingTargetColumn { candidates: String },

    #[error("column `{column}` not present in the file")]
    MissingColumn { column: String },

    #[error("row {row}, column `{column}`: cannot parse {value:?} as a finite number")]
    NonNumericFeature { row: usize, column: String, value: String },

    #[error("row {row}: defect count {value:?} is not a nonnegative integer")]
    InvalidDefectCount { row: usize, value: String },

    #[error("dataset `{0}` has no instances")]
    EmptyDataset(String),

    #[error("invalid schema: {0}")]
    InvalidSchema(String),

    #[error("invalid split fractions {0:?}: must be positive and sum to 1")]
    InvalidFractions([f64; 3]),

    #[error("too few instances: {0}")]
    TooFewInstances(String),

    #[error("projects share no feature columns")]
    IncompatibleSchemas,

    #[error("need at least two projects, found {0}")]
    FewerThanTwoProjects(usize),

    #[error("length mismatch: {values} values but {labels} labels")]
    InputMismatch { values: usize, labels: usize },

    #[error("empty input")]
    EmptyInput,

    #[error("training set is empty")]
    EmptyTrainingSet,

    #[error("node {0} is not a leaf")]
    NotALeaf(String),

    #[error("no node at path {0}")]
    UnknownNode(String),

    #[error("feature `{0}` is not in the schema")]
    UnknownFeature(String),

    #[error("schema mismatch: {0}")]
    SchemaMismatch(String),

    #[error("training data contains a single class")]
    SingleClassTraining,

    #[error("forest size must be odd and positive, got {0}")]
    EvenTreeCount(usize),

    #[error("baseline has zero defective instances; improvement is undefined")]
    ZeroBaseline,

    #[error("target project `{0}` must not be part of the bellwether family")]
    TargetInFamily(String),

    #[error("group `{0}` has no samples")]
    EmptyGroup(String),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error("serialization failed: {0}")]
    Json(#[from] serde_json::Error),
}

impl Error {
    pub(crate) fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    /// True for errors caused by bad user input rather than an internal failure.
    pub fn is_input_error(&self) -> bool {
        !matches!(self, Error::Json(_))
    }
}
