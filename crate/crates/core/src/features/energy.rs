use crate::audio::FrameMatrix;

use super::FeatureError;

/// Per-frame energy `sum(x[n]^2)` over the (already windowed) frames.
pub fn frame_energy(frames: &FrameMatrix) -> Result<Vec<f64>, FeatureError> {
    if frames.is_empty() {
        return Err(FeatureError::NoFrames);
    }
    Ok(frames.frames.iter().map(|f| f.iter().map(|x| x * x).sum()).collect())
}
