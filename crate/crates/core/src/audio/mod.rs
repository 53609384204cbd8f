//! Audio ingestion and the framing front-end.

mod frame;
mod wav;

pub use frame::{frame_and_window, frame_samples, hamming, FrameMatrix, WindowKind};
pub use wav::{parse_wav, write_wav};

use thiserror::Error;

pub const MIN_SAMPLE_RATE: u32 = 8000;
pub const MAX_SAMPLE_RATE: u32 = 48000;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum AudioError {
    #[error("malformed RIFF/WAVE container: {0}")]
    MalformedRiff(String),
    #[error("unsupported audio format: {0}")]
    UnsupportedFormat(String),
    #[error("audio contains no sample frames")]
    EmptyAudio,
    #[error("pre-emphasis coefficient {0} outside [0, 1)")]
    InvalidAlpha(f64),
    #[error("clip has {samples} samples, fewer than one {frame_length}-sample frame")]
    ClipTooShort { samples: usize, frame_length: usize },
    #[error("invalid framing: {0}")]
    InvalidFraming(String),
}

/// Mono audio normalized to `[-1, 1]`.
#[derive(Debug, Clone, PartialEq)]
pub struct AudioClip {
    pub sample_rate: u32,
    pub samples: Vec<f64>,
    pub source_id: String,
}

impl AudioClip {
    pub fn new(sample_rate: u32, samples: Vec<f64>, source_id: impl Into<String>) -> Self {
        Self {
            sample_rate,
            samples,
            source_id: source_id.into(),
        }
    }

    pub fn duration_secs(&self) -> f64 {
        self.samples.len() as f64 / f64::from(self.sample_rate)
    }
}

/// First-order high-pass: `y[0] = x[0]`, `y[n] = x[n] - alpha * x[n-1]`.
pub fn pre_emphasize(clip: &AudioClip, alpha: f64) -> Result<AudioClip, AudioError> {
    if !(0.0..1.0).contains(&alpha) {
        return Err(AudioError::InvalidAlpha(alpha));
    }
    let x = &clip.samples;
    let mut y = Vec::with_capacity(x.len());
    if let Some(&first) = x.first() {
        y.push(first);
        y.extend(x.windows(2).map(|w| w[1] - alpha * w[0]));
    }
    Ok(AudioClip {
        sample_rate: clip.sample_rate,
        samples: y,
        source_id: clip.source_id.clone(),
    })
}
