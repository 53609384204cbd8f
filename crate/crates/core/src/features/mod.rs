//! Energy, pitch, LPCC and MFCC features and their utterance-level assembly.

mod assemble;
mod energy;
mod lpc;
mod matrix;
mod mfcc;
mod pipeline;
mod pitch;
mod scaling;
mod stats;

use std::fmt;
use std::str::FromStr;

use thiserror::Error;

pub use assemble::{assemble_features, Block, FeatureVector};
pub use energy::frame_energy;
pub use lpc::{autocorrelation, levinson_durbin, lpc, lpc_to_lpcc, LpcModel};
pub use matrix::FeatureMatrix;
pub use mfcc::{
    hz_to_mel, mel_filterbank, mel_to_hz, mfcc, MelFilterbank, MfccExtractor, DEFAULT_CEPS, DEFAULT_FILTERS, LOG_FLOOR,
};
pub use pipeline::{extract_clip, FrontendConfig};
pub use pitch::{estimate_pitch, PitchTrack, ENERGY_GATE, VOICING_THRESHOLD};
pub use scaling::{apply_scaling, fit_scaling, ScalingParams};
pub use stats::{stats19, SeriesStats19};

use crate::audio::AudioError;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FeatureError {
    #[error("empty series")]
    EmptySeries,
    #[error("no frames to analyze")]
    NoFrames,
    #[error("invalid band: {0}")]
    InvalidBand(String),
    #[error("LPC order {order} invalid for frame of length {frame_length}")]
    InvalidOrder { order: usize, frame_length: usize },
    #[error("unstable LPC recursion at stage {stage} (k = {k})")]
    FrameUnstable { stage: usize, k: f64 },
    #[error("missing feature block `{0}`")]
    MissingBlock(&'static str),
    #[error("dimension mismatch: expected {expected}, found {found}")]
    DimensionMismatch { expected: usize, found: usize },
    #[error("feature assembly not defined for {0}")]
    UnsupportedModel(ModelId),
    #[error("malformed feature matrix: {0}")]
    MalformedMatrix(String),
    #[error(transparent)]
    Audio(#[from] AudioError),
}

/// Feature combination. `Raw` tags arbitrary-width data that did not come
/// from the speech front-end.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub enum ModelId {
    /// MFCC + LPCC.
    Model1,
    /// MFCC + LPCC + energy + pitch.
    Model2,
    Raw(usize),
}

impl ModelId {
    pub const MODEL1_DIMS: usize = 48;
    pub const MODEL2_DIMS: usize = 86;

    pub fn dims(self) -> usize {
        match self {
            ModelId::Model1 => Self::MODEL1_DIMS,
            ModelId::Model2 => Self::MODEL2_DIMS,
            ModelId::Raw(d) => d,
        }
    }

    pub fn from_dims(dims: usize) -> Self {
        match dims {
            Self::MODEL1_DIMS => ModelId::Model1,
            Self::MODEL2_DIMS => ModelId::Model2,
            d => ModelId::Raw(d),
        }
    }

    pub fn combination(self) -> &'static str {
        match self {
            ModelId::Model1 => "MFCC+LPCC",
            ModelId::Model2 => "MFCC+LPCC+Energy+Pitch",
            ModelId::Raw(_) => "raw",
        }
    }
}

impl fmt::Display for ModelId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ModelId::Model1 => f.write_str("model1"),
            ModelId::Model2 => f.write_str("model2"),
            ModelId::Raw(d) => write!(f, "raw:{d}"),
        }
    }
}

impl FromStr for ModelId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "model1" => Ok(ModelId::Model1),
            "model2" => Ok(ModelId::Model2),
            other => other
                .strip_prefix("raw:")
                .and_then(|d| d.parse().ok())
                .filter(|&d| d > 0)
                .map(ModelId::Raw)
                .ok_or_else(|| format!("unknown model id `{s}`")),
        }
    }
}
