//! Automated semantification: multi-label classification from assay text to
//! `(property, value)` statement labels.
//!
//! The scoring backbone sits behind [`StatementScorer`]. The shipped backbone
//! is [`TrainedModel`]: TF-IDF document vectors scored against one
//! L2-normalized centroid per label, with per-label thresholds calibrated on a
//! held-out split.

mod eval;
mod labels;
mod model;
mod tokenize;

pub use eval::{aggregate, evaluate, holdout, leave_one_out, score_assay, AssayEvaluation, Metrics};
pub use labels::{build_label_space, LabelSpace, StatementLabel, DEFAULT_OMITTED_PROPERTIES, KEY_SEPARATOR};
pub use model::{
    train, Prediction, TermVocabulary, ThresholdSource, TrainConfig, TrainOutcome, TrainedModel, TrainingMetadata,
    DEFAULT_THRESHOLD, MIN_CALIBRATION_POSITIVES, MODEL_FORMAT_VERSION,
};
pub use tokenize::tokenize;

use thiserror::Error;

#[derive(Debug, Error)]
pub enum SemantifierError {
    #[error("corpus is empty")]
    EmptyCorpus,
    #[error("text is empty")]
    EmptyText,
    #[error("assay {0} has empty text")]
    EmptyAssayText(String),
    #[error("invalid statement label: {0}")]
    InvalidLabel(String),
    #[error("invalid configuration: {0}")]
    InvalidConfig(String),
    #[error("top_k must be at least 1")]
    InvalidTopK,
    #[error("model format version {found} is not supported (expected {expected})")]
    VersionMismatch { found: u64, expected: u64 },
    #[error("malformed model file: {0}")]
    MalformedModel(String),
    #[error(transparent)]
    Io(#[from] std::io::Error),
}

/// Text → ranked statement labels.
pub trait StatementScorer: Send + Sync {
    fn label_space(&self) -> &LabelSpace;

    /// Top `top_k` labels by score, each flagged against its threshold.
    /// Text without any usable signal yields an empty list.
    fn predict(&self, text: &str, top_k: usize) -> Result<Vec<Prediction>, SemantifierError>;
}
