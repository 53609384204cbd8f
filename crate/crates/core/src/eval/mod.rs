//! Cross-validation, confusion reporting and the surrogate corpus generator.

mod confusion;
mod crossval;
mod folds;
mod synth;

use thiserror::Error;

pub use confusion::{
    build_confusion, render_confusion_percent, AccuracySummary, ClassRate, ConfusionMatrix, PercentTable,
};
pub use crossval::{
    cross_validate, evaluate, grid_search, render_recognition_table, train_fold, CvReport, RecognitionReport,
    HOLDOUT_FRACTION,
};
pub use folds::{stratified_holdout, stratified_kfold, FoldAssignment};
pub use synth::{synth_corpus, EnvelopeShape, LabeledClip, ProsodyProfile, SynthCorpusSpec};

use crate::svm::SvmError;

#[derive(Debug, Error)]
pub enum EvalError {
    #[error("k must be >= 2, got {0}")]
    InvalidK(usize),
    #[error("class `{class}` has {count} examples, fewer than k = {k}")]
    TooFewPerClass { class: String, count: usize, k: usize },
    #[error("test fraction {0} outside (0, 1)")]
    InvalidSplit(f64),
    #[error("length mismatch: {left} vs {right}")]
    LengthMismatch { left: usize, right: usize },
    #[error("label `{0}` is not in the class list")]
    UnknownLabel(String),
    #[error("confusion matrix has no items")]
    NoItems,
    #[error("malformed percentage table: {0}")]
    MalformedTable(String),
    #[error("invalid corpus spec: {0}")]
    InvalidSpec(String),
    #[error("fold {fold}: {source}")]
    Fold { fold: usize, source: Box<SvmError> },
    #[error(transparent)]
    Svm(#[from] SvmError),
}
