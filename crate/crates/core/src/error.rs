use std::path::PathBuf;

use thiserror::Error;

pub type Result<T, E = Error> = std::result::Result<T, E>;

/// Broad failure class, used by the command line to pick an exit code.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ErrorKind {
    /// Bad arguments or configuration.
    Usage,
    /// Input data is malformed or inconsistent.
    Data,
    /// The numerics cannot proceed (degenerate data, empty clusters, ...).
    Numeric,
}

#[derive(Debug, Error)]
pub enum Error {
    #[error("invalid argument: {0}")]
    InvalidArgument(String),

    #[error("{path}: {source}")]
    Io {
        path: PathBuf,
        #[source]
        source: std::io::Error,
    },

    #[error("csv: {0}")]
    Csv(#[from] csv::Error),

    #[error("json: {0}")]
    Json(#[from] serde_json::Error),

    #[error("empty cohort")]
    EmptyCohort,

    #[error("empty curriculum")]
    EmptyCurriculum,

    #[error("course {0} is not part of the curriculum")]
    UnknownCourse(String),

    #[error("duplicate course {0}")]
    DuplicateCourse(String),

    #[error("line {line}: invalid division tag {value:?} (expected lower or upper)")]
    InvalidDivision { line: usize, value: String },

    #[error("malformed curriculum line {line}: {content:?}")]
    MalformedCurriculumLine { line: usize, content: String },

    #[error("missing required column {0}")]
    MissingColumn(String),

    #[error("header mismatch: expected {expected:?}, found {found:?}")]
    HeaderMismatch { expected: Vec<String>, found: Vec<String> },

    #[error("duplicate student_id {0}")]
    DuplicateStudent(String),

    #[error("invalid encoded grade {value} at row {row}, column {col}")]
    InvalidEncodedGrade { row: usize, col: usize, value: f64 },

    #[error("dimension mismatch: expected {expected}, got {got}")]
    DimensionMismatch { expected: usize, got: usize },

    #[error("length mismatch: expected {expected}, got {got}")]
    LengthMismatch { expected: usize, got: usize },

    #[error("insufficient samples: need at least {needed}, got {got}")]
    InsufficientSamples { needed: usize, got: usize },

    #[error("degenerate data: {0}")]
    DegenerateData(String),

    #[error("degenerate labels: {0}")]
    DegenerateLabels(String),

    #[error("cluster {0} is empty")]
    EmptyCluster(usize),

    #[error("cluster index {index} out of range for k = {k}")]
    ClusterIndexOutOfRange { index: usize, k: usize },

    #[error("invalid cohort spec: {0}")]
    InvalidCohortSpec(String),
}

impl Error {
    pub fn io(path: impl Into<PathBuf>, source: std::io::Error) -> Self {
        Error::Io {
            path: path.into(),
            source,
        }
    }

    pub fn kind(&self) -> ErrorKind {
        use Error::*;
        match self {
            InvalidArgument(_) | InvalidCohortSpec(_) => ErrorKind::Usage,
            Io { .. }
            | Csv(_)
            | Json(_)
            | EmptyCohort
            | EmptyCurriculum
            | UnknownCourse(_)
            | DuplicateCourse(_)
            | InvalidDivision { .. }
            | MalformedCurriculumLine { .. }
            | MissingColumn(_)
            | HeaderMismatch { .. }
            | DuplicateStudent(_)
            | InvalidEncodedGrade { .. }
            | DimensionMismatch { .. }
            | LengthMismatch { .. } => ErrorKind::Data,
            InsufficientSamples { .. }
            | DegenerateData(_)
            | DegenerateLabels(_)
            | EmptyCluster(_)
            | ClusterIndexOutOfRange { .. } => ErrorKind::Numeric,
        }
    }

    /// Process exit code: 2 usage/config, 3 data, 4 numeric.
    pub fn exit_code(&self) -> i32 {
        match self.kind() {
            ErrorKind::Usage => 2,
            ErrorKind::Data => 3,
            ErrorKind::Numeric => 4,
        }
    }
}
