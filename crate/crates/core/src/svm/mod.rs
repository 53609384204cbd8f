//! RBF support vector machines: SMO training, one-vs-one voting, model files.

mod kernel;
mod multiclass;
mod persist;
mod smo;

use thiserror::Error;

pub use kernel::{gram_matrix, rbf_kernel, KernelParams};
pub use multiclass::{predict, train_ovo, vote, MulticlassModel};
pub use persist::{load_model, model_to_string, save_model, FORMAT_VERSION};
pub use smo::{max_kkt_violation, smo_train_binary, solve_dual, BinaryModel, DualSolution, TrainConfig};

use crate::features::FeatureError;

#[derive(Debug, Error)]
pub enum SvmError {
    #[error("no training examples")]
    EmptyInput,
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("binary labels must be -1 or +1, found {0}")]
    InvalidLabel(f64),
    #[error("binary training needs examples of both signs")]
    SingleClassInput,
    #[error("need at least 2 classes, found {0}")]
    TooFewClasses(usize),
    #[error("class label `{0}` must be non-empty without whitespace or commas")]
    BadLabel(String),
    #[error("invalid training configuration: {0}")]
    InvalidConfig(String),
    #[error("SMO did not converge after {iterations} updates")]
    NoConvergence {
        iterations: usize,
        /// Best iterate reached before the budget ran out.
        model: Box<BinaryModel>,
    },
    #[error("training pair {positive} vs {negative}: {source}")]
    Pair {
        positive: String,
        negative: String,
        source: Box<SvmError>,
    },
    #[error("model file version {found} is not supported (expected {supported})")]
    VersionMismatch { found: u32, supported: u32 },
    #[error("corrupt model file: {0}")]
    CorruptModel(String),
    #[error("i/o error: {0}")]
    Io(String),
    #[error(transparent)]
    Feature(#[from] FeatureError),
}
