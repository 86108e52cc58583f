use thiserror::Error;

pub type Result<T> = std::result::Result<T, Error>;

#[derive(Debug, Error)]
pub enum Error {
    #[error("malformed timestamp {text:?}: {reason}")]
    Timestamp { text: String, reason: &'static str },

    #[error("{file}: missing column {column:?}")]
    MissingColumn { file: &'static str, column: String },

    #[error("{file}: line {line}, column {column}: {message}")]
    Row {
        file: &'static str,
        line: u64,
        column: String,
        message: String,
    },

    #[error("sentence {case_id}/{sent_id} has conflicting speakers: {speakers:?}")]
    ConflictingSpeakers {
        case_id: u32,
        sent_id: u32,
        speakers: Vec<String>,
    },

    #[error("unknown aspect {0:?}")]
    UnknownAspect(String),

    #[error("invalid aspect set {0:?}: None cannot be combined with other aspects")]
    InvalidAspectSet(String),

    #[error("sentence {case_id}/{sent_id} is not covered by any scene")]
    UncoveredSentence { case_id: u32, sent_id: u32 },

    #[error(
        "scene {scene_id}: screenplay line {expected:?} does not match sentence {case_id}/{sent_id} {found:?}"
    )]
    SceneTextMismatch {
        scene_id: u32,
        case_id: u32,
        sent_id: u32,
        expected: String,
        found: String,
    },

    #[error("cardinality mismatch: {left} {left_what} vs {right} {right_what}")]
    Cardinality {
        left_what: &'static str,
        left: usize,
        right_what: &'static str,
        right: usize,
    },

    #[error("duplicate key {0}")]
    DuplicateKey(String),

    #[error("{0}")]
    Validation(String),

    #[error("dimension mismatch: {expected_what} dim {expected}, {found_what} dim {found}")]
    Dimension {
        expected_what: &'static str,
        expected: usize,
        found_what: &'static str,
        found: usize,
    },

    #[error("{file}: line {line}: {message}")]
    Format {
        file: &'static str,
        line: usize,
        message: String,
    },

    #[error("shot {shot_index}: no frames within 2 s of the shot interval")]
    EmptySelection { shot_index: usize },

    #[error("degenerate fit: {0}")]
    DegenerateFit(String),

    #[error("non-finite value in {0}")]
    NonFinite(&'static str),

    #[error("empty input: {0}")]
    EmptyInput(&'static str),

    #[error("invalid parameter: {0}")]
    InvalidParameter(String),

    #[error(transparent)]
    Csv(#[from] csv::Error),
}
