//! Frame-wise F0 estimation by normalized autocorrelation.
//!
//! For each frame the normalized autocorrelation
//! `r(t) = sum x[n] x[n+t] / sqrt(sum x[n]^2 * sum x[n+t]^2)` (sums over the
//! overlapping part) is evaluated over the lag band `[rate/fmax, rate/fmin]`.
//! The pitch lag is the shortest-lag local peak reaching 95% of the band
//! maximum, which suppresses sub-harmonic (octave-down) picks. A frame is
//! voiced when that peak is at least [`VOICING_THRESHOLD`] and its energy is
//! at least [`ENERGY_GATE`] times the loudest frame.

use crate::audio::FrameMatrix;

use super::FeatureError;

pub const VOICING_THRESHOLD: f64 = 0.3;
pub const ENERGY_GATE: f64 = 1e-4;
const PEAK_FRACTION: f64 = 0.95;

#[derive(Debug, Clone, PartialEq)]
pub struct PitchTrack {
    /// `Some(f0)` for voiced frames.
    pub frames: Vec<Option<f64>>,
    pub fmin: f64,
    pub fmax: f64,
}

impl PitchTrack {
    pub fn voiced(&self) -> Vec<f64> {
        self.frames.iter().flatten().copied().collect()
    }

    pub fn voiced_count(&self) -> usize {
        self.frames.iter().filter(|f| f.is_some()).count()
    }
}

/// Normalized autocorrelation of `x` at lag `lag`; 0 when either side is silent.
fn normalized_autocorr(x: &[f64], lag: usize) -> f64 {
    let n = x.len() - lag;
    let (mut cross, mut e0, mut e1) = (0.0, 0.0, 0.0);
    for i in 0..n {
        let a = x[i];
        let b = x[i + lag];
        cross += a * b;
        e0 += a * a;
        e1 += b * b;
    }
    let denom = (e0 * e1).sqrt();
    if denom > 0.0 {
        cross / denom
    } else {
        0.0
    }
}

/// Returns `(lag, peak_value)` refined by parabolic interpolation.
fn pick_lag(frame: &[f64], lag_min: usize, lag_max: usize) -> Option<(f64, f64)> {
    let lo = lag_min.saturating_sub(1).max(1);
    let hi = (lag_max + 1).min(frame.len() - 1);
    if lo > hi {
        return None;
    }
    let r: Vec<f64> = (lo..=hi).map(|lag| normalized_autocorr(frame, lag)).collect();
    let at = |lag: usize| r[lag - lo];

    let peaks: Vec<usize> = (lag_min..=lag_max.min(hi))
        .filter(|&lag| {
            let v = at(lag);
            (lag == lo || v >= at(lag - 1)) && (lag == hi || v >= at(lag + 1))
        })
        .collect();
    let best = peaks.iter().map(|&l| at(l)).fold(f64::NEG_INFINITY, f64::max);
    let chosen = *peaks.iter().find(|&&l| at(l) >= PEAK_FRACTION * best)?;

    let peak = at(chosen);
    let mut shift = 0.0;
    if chosen > lo && chosen < hi {
        let (left, right) = (at(chosen - 1), at(chosen + 1));
        let curvature = left - 2.0 * peak + right;
        if curvature < 0.0 {
            shift = (0.5 * (left - right) / curvature).clamp(-0.5, 0.5);
        }
    }
    Some((chosen as f64 + shift, peak))
}

/// Estimates one F0 value (or unvoiced) per frame.
pub fn estimate_pitch(frames: &FrameMatrix, fmin: f64, fmax: f64) -> Result<PitchTrack, FeatureError> {
    let rate = f64::from(frames.sample_rate);
    if !(fmin > 0.0 && fmin < fmax && rate / fmax >= 2.0) {
        return Err(FeatureError::InvalidBand(format!(
            "pitch band [{fmin}, {fmax}] Hz at {rate} Hz"
        )));
    }
    let lag_min = (rate / fmax).floor() as usize;
    let lag_max = (rate / fmin).ceil() as usize;

    let energies: Vec<f64> = frames.frames.iter().map(|f| f.iter().map(|x| x * x).sum()).collect();
    let loudest = energies.iter().copied().fold(0.0, f64::max);

    let track = frames
        .frames
        .iter()
        .zip(&energies)
        .map(|(frame, &energy)| {
            if loudest <= 0.0 || energy < ENERGY_GATE * loudest || frame.len() <= lag_min + 1 {
                return None;
            }
            let (lag, peak) = pick_lag(frame, lag_min, lag_max)?;
            (peak >= VOICING_THRESHOLD).then(|| (rate / lag).clamp(fmin, fmax))
        })
        .collect();

    Ok(PitchTrack {
        frames: track,
        fmin,
        fmax,
    })
}
