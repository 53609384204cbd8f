use std::f64::consts::PI;

use super::{AudioClip, AudioError};

#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum WindowKind {
    Hamming,
    Rectangular,
}

/// Equal-length, possibly overlapping analysis frames.
#[derive(Debug, Clone, PartialEq)]
pub struct FrameMatrix {
    pub frames: Vec<Vec<f64>>,
    pub frame_length: usize,
    pub hop: usize,
    pub sample_rate: u32,
    pub window_kind: WindowKind,
}

impl FrameMatrix {
    pub fn len(&self) -> usize {
        self.frames.len()
    }

    pub fn is_empty(&self) -> bool {
        self.frames.is_empty()
    }

    /// Number of frames `floor((n - len) / hop) + 1`, or 0 when `n < len`.
    pub fn count_for(n: usize, frame_length: usize, hop: usize) -> usize {
        if n < frame_length || hop == 0 {
            0
        } else {
            (n - frame_length) / hop + 1
        }
    }
}

/// Hamming weights `0.54 - 0.46 cos(2 pi n / (L - 1))`.
pub fn hamming(len: usize) -> Vec<f64> {
    if len == 1 {
        return vec![1.0];
    }
    let denom = (len - 1) as f64;
    (0..len)
        .map(|n| 0.54 - 0.46 * (2.0 * PI * n as f64 / denom).cos())
        .collect()
}

/// Frames a clip with lengths given in samples.
pub fn frame_samples(
    clip: &AudioClip,
    frame_length: usize,
    hop: usize,
    window_kind: WindowKind,
) -> Result<FrameMatrix, AudioError> {
    if frame_length == 0 || hop == 0 || hop > frame_length {
        return Err(AudioError::InvalidFraming(format!(
            "frame length {frame_length}, hop {hop}"
        )));
    }
    let n = clip.samples.len();
    if n < frame_length {
        return Err(AudioError::ClipTooShort {
            samples: n,
            frame_length,
        });
    }
    let weights = match window_kind {
        WindowKind::Hamming => Some(hamming(frame_length)),
        WindowKind::Rectangular => None,
    };
    let count = FrameMatrix::count_for(n, frame_length, hop);
    let frames = (0..count)
        .map(|i| {
            let seg = &clip.samples[i * hop..i * hop + frame_length];
            match &weights {
                Some(w) => seg.iter().zip(w).map(|(s, w)| s * w).collect(),
                None => seg.to_vec(),
            }
        })
        .collect();
    Ok(FrameMatrix {
        frames,
        frame_length,
        hop,
        sample_rate: clip.sample_rate,
        window_kind,
    })
}

/// Frames a clip with durations in milliseconds, rounded to whole samples.
pub fn frame_and_window(
    clip: &AudioClip,
    frame_ms: f64,
    hop_ms: f64,
    window_kind: WindowKind,
) -> Result<FrameMatrix, AudioError> {
    if !(hop_ms > 0.0 && frame_ms >= hop_ms && frame_ms.is_finite()) {
        return Err(AudioError::InvalidFraming(format!(
            "frame {frame_ms} ms, hop {hop_ms} ms"
        )));
    }
    let rate = f64::from(clip.sample_rate);
    let frame_length = ((frame_ms * rate / 1000.0).round() as usize).max(1);
    let hop = ((hop_ms * rate / 1000.0).round() as usize).clamp(1, frame_length);
    frame_samples(clip, frame_length, hop, window_kind)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ramp(n: usize) -> AudioClip {
        AudioClip::new(16000, (0..n).map(|i| i as f64 / n as f64).collect(), "ramp")
    }

    #[test]
    fn frame_count_formula() {
        let m = frame_samples(&ramp(400), 256, 128, WindowKind::Rectangular).unwrap();
        assert_eq!(m.len(), 2);
        assert_eq!(FrameMatrix::count_for(400, 256, 128), 2);
        assert_eq!(FrameMatrix::count_for(255, 256, 128), 0);
    }

    #[test]
    fn hamming_endpoints() {
        let w = hamming(256);
        assert!((w[0] - 0.08).abs() < 1e-15);
        assert!((w[255] - 0.08).abs() < 1e-12);
    }

    #[test]
    fn second_frame_matches_direct_computation() {
        let clip = ramp(400);
        let m = frame_samples(&clip, 256, 128, WindowKind::Hamming).unwrap();
        for n in 0..256 {
            let w = 0.54 - 0.46 * (2.0 * PI * n as f64 / 255.0).cos();
            let expected = clip.samples[128 + n] * w;
            assert!((m.frames[1][n] - expected).abs() <= 1e-12);
        }
    }

    #[test]
    fn too_short_is_signaled() {
        assert_eq!(
            frame_samples(&ramp(10), 256, 128, WindowKind::Hamming),
            Err(AudioError::ClipTooShort {
                samples: 10,
                frame_length: 256
            })
        );
    }

    #[test]
    fn millisecond_framing() {
        let m = frame_and_window(&ramp(16000), 25.0, 10.0, WindowKind::Hamming).unwrap();
        assert_eq!(m.frame_length, 400);
        assert_eq!(m.hop, 160);
        assert_eq!(m.len(), 98);
        assert!(frame_and_window(&ramp(100), 10.0, 20.0, WindowKind::Hamming).is_err());
    }
}
