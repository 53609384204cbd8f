use crate::audio::{frame_and_window, pre_emphasize, AudioClip, AudioError, WindowKind};

use super::{
    assemble_features, estimate_pitch, frame_energy, lpc, lpc_to_lpcc, FeatureError, FeatureVector, LpcModel,
    MfccExtractor, ModelId, PitchTrack, DEFAULT_FILTERS,
};

/// Front-end and analysis settings for whole-clip extraction.
#[derive(Debug, Clone, PartialEq)]
pub struct FrontendConfig {
    pub pre_emphasis: f64,
    pub frame_ms: f64,
    pub hop_ms: f64,
    pub window: WindowKind,
    /// Pitch runs on the raw clip with longer rectangular frames.
    pub pitch_frame_ms: f64,
    pub pitch_fmin: f64,
    pub pitch_fmax: f64,
    pub lpc_order: usize,
    pub n_ceps: usize,
}

impl Default for FrontendConfig {
    fn default() -> Self {
        Self {
            pre_emphasis: 0.97,
            frame_ms: 25.0,
            hop_ms: 10.0,
            window: WindowKind::Hamming,
            pitch_frame_ms: 40.0,
            pitch_fmin: 60.0,
            pitch_fmax: 400.0,
            lpc_order: 12,
            n_ceps: 12,
        }
    }
}

/// Runs the full analysis chain on one clip.
pub fn extract_clip(clip: &AudioClip, model_id: ModelId, cfg: &FrontendConfig) -> Result<FeatureVector, FeatureError> {
    let emphasized = pre_emphasize(clip, cfg.pre_emphasis)?;
    let frames = frame_and_window(&emphasized, cfg.frame_ms, cfg.hop_ms, cfg.window)?;

    let extractor = MfccExtractor::new(clip.sample_rate, frames.frame_length, DEFAULT_FILTERS, cfg.n_ceps)?;
    let mfcc_frames: Vec<Vec<f64>> = frames.frames.iter().map(|f| extractor.frame(f)).collect();

    // Unstable frames fall back to a flat (all-zero) predictor.
    let lpcc_frames: Vec<Vec<f64>> = frames
        .frames
        .iter()
        .map(|f| {
            let model = match lpc(f, cfg.lpc_order) {
                Ok(m) => m,
                Err(FeatureError::FrameUnstable { .. }) => LpcModel::zero(cfg.lpc_order),
                Err(e) => return Err(e),
            };
            Ok(lpc_to_lpcc(&model, cfg.n_ceps))
        })
        .collect::<Result<_, _>>()?;

    if model_id == ModelId::Model1 {
        return assemble_features(model_id, &mfcc_frames, &lpcc_frames, None, None);
    }

    let energy = frame_energy(&frames)?;
    let pitch = match frame_and_window(clip, cfg.pitch_frame_ms, cfg.hop_ms, WindowKind::Rectangular) {
        Ok(pitch_frames) => estimate_pitch(&pitch_frames, cfg.pitch_fmin, cfg.pitch_fmax)?,
        Err(AudioError::ClipTooShort { .. }) => PitchTrack {
            frames: Vec::new(),
            fmin: cfg.pitch_fmin,
            fmax: cfg.pitch_fmax,
        },
        Err(e) => return Err(e.into()),
    };
    assemble_features(model_id, &mfcc_frames, &lpcc_frames, Some(&energy), Some(&pitch))
}
