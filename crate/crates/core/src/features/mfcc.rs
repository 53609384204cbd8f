//! Mel-frequency cepstral coefficients.
//!
//! Power spectrum (zero-padded FFT, `|X_k|^2`) -> unit-area triangular mel
//! filters -> natural log floored at [`LOG_FLOOR`] -> orthonormal DCT-II,
//! keeping `c_1..c_n` (`c_0` is dropped).

use std::f64::consts::PI;
use std::sync::Arc;

use rustfft::num_complex::Complex;
use rustfft::{Fft, FftPlanner};

use crate::audio::FrameMatrix;

use super::FeatureError;

pub const LOG_FLOOR: f64 = 1e-10;
pub const DEFAULT_FILTERS: usize = 26;
pub const DEFAULT_CEPS: usize = 12;

pub fn hz_to_mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

pub fn mel_to_hz(mel: f64) -> f64 {
    700.0 * (10f64.powf(mel / 2595.0) - 1.0)
}

/// Triangular filters over FFT bins `0..=fft_size/2`.
#[derive(Debug, Clone, PartialEq)]
pub struct MelFilterbank {
    pub fft_size: usize,
    pub center_hz: Vec<f64>,
    pub center_bins: Vec<usize>,
    /// One row per filter, each normalized to unit sum.
    pub weights: Vec<Vec<f64>>,
}

impl MelFilterbank {
    pub fn n_filters(&self) -> usize {
        self.weights.len()
    }

    pub fn apply(&self, power: &[f64]) -> Vec<f64> {
        self.weights
            .iter()
            .map(|w| w.iter().zip(power).map(|(w, p)| w * p).sum())
            .collect()
    }
}

/// Builds `n_filters` triangles whose edges and centers are equally spaced
/// on the mel scale between `fmin` and `fmax`, snapped to bins
/// `round(f * fft_size / rate)`.
pub fn mel_filterbank(
    sample_rate: u32,
    fft_size: usize,
    n_filters: usize,
    fmin: f64,
    fmax: f64,
) -> Result<MelFilterbank, FeatureError> {
    let rate = f64::from(sample_rate);
    if n_filters == 0 || fft_size < 2 || !(0.0 <= fmin && fmin < fmax && fmax <= rate / 2.0) {
        return Err(FeatureError::InvalidBand(format!(
            "mel band [{fmin}, {fmax}] Hz with {n_filters} filters at {rate} Hz"
        )));
    }
    let n_bins = fft_size / 2 + 1;
    let (mel_lo, mel_hi) = (hz_to_mel(fmin), hz_to_mel(fmax));
    let step = (mel_hi - mel_lo) / (n_filters + 1) as f64;
    let edges_hz: Vec<f64> = (0..n_filters + 2)
        .map(|i| mel_to_hz(mel_lo + step * i as f64))
        .collect();
    let edges_bin: Vec<usize> = edges_hz
        .iter()
        .map(|hz| ((hz * fft_size as f64 / rate).round() as usize).min(n_bins - 1))
        .collect();

    let weights = (0..n_filters)
        .map(|m| {
            let (left, center, right) = (edges_bin[m], edges_bin[m + 1], edges_bin[m + 2]);
            let mut row = vec![0.0; n_bins];
            for (k, w) in row.iter_mut().enumerate() {
                *w = if k == center {
                    1.0
                } else if k > left && k < center {
                    (k - left) as f64 / (center - left) as f64
                } else if k > center && k < right {
                    (right - k) as f64 / (right - center) as f64
                } else {
                    0.0
                };
            }
            let total: f64 = row.iter().sum();
            row.iter_mut().for_each(|w| *w /= total);
            row
        })
        .collect();

    Ok(MelFilterbank {
        fft_size,
        center_hz: edges_hz[1..=n_filters].to_vec(),
        center_bins: edges_bin[1..=n_filters].to_vec(),
        weights,
    })
}

/// Reusable MFCC extractor for one frame length and sample rate.
pub struct MfccExtractor {
    frame_length: usize,
    fft: Arc<dyn Fft<f64>>,
    filterbank: MelFilterbank,
    dct: Vec<Vec<f64>>,
}

impl MfccExtractor {
    pub fn new(sample_rate: u32, frame_length: usize, n_filters: usize, n_ceps: usize) -> Result<Self, FeatureError> {
        if n_ceps == 0 || n_ceps >= n_filters {
            return Err(FeatureError::InvalidBand(format!(
                "{n_ceps} cepstra from {n_filters} filters"
            )));
        }
        let fft_size = frame_length.max(2).next_power_of_two();
        let filterbank = mel_filterbank(sample_rate, fft_size, n_filters, 0.0, f64::from(sample_rate) / 2.0)?;
        let scale = (2.0 / n_filters as f64).sqrt();
        let dct = (1..=n_ceps)
            .map(|k| {
                (0..n_filters)
                    .map(|n| scale * (PI * k as f64 * (n as f64 + 0.5) / n_filters as f64).cos())
                    .collect()
            })
            .collect();
        Ok(Self {
            frame_length,
            fft: FftPlanner::new().plan_fft_forward(fft_size),
            filterbank,
            dct,
        })
    }

    pub fn filterbank(&self) -> &MelFilterbank {
        &self.filterbank
    }

    pub fn power_spectrum(&self, frame: &[f64]) -> Vec<f64> {
        let size = self.filterbank.fft_size;
        let mut buf: Vec<Complex<f64>> = frame.iter().take(size).map(|&x| Complex::new(x, 0.0)).collect();
        buf.resize(size, Complex::new(0.0, 0.0));
        self.fft.process(&mut buf);
        buf[..=size / 2].iter().map(|c| c.norm_sqr()).collect()
    }

    /// Cepstrum from an explicit power spectrum over bins `0..=fft_size/2`.
    pub fn cepstrum_from_power(&self, power: &[f64]) -> Vec<f64> {
        let log_energies: Vec<f64> = self
            .filterbank
            .apply(power)
            .into_iter()
            .map(|e| e.max(LOG_FLOOR).ln())
            .collect();
        self.dct
            .iter()
            .map(|row| row.iter().zip(&log_energies).map(|(d, l)| d * l).sum())
            .collect()
    }

    pub fn frame(&self, frame: &[f64]) -> Vec<f64> {
        debug_assert_eq!(frame.len(), self.frame_length);
        self.cepstrum_from_power(&self.power_spectrum(frame))
    }
}

/// Per-frame `c_1..c_n_ceps` with the default 26-filter full-band bank.
pub fn mfcc(frames: &FrameMatrix, n_ceps: usize) -> Result<Vec<Vec<f64>>, FeatureError> {
    if frames.is_empty() {
        return Err(FeatureError::NoFrames);
    }
    let extractor = MfccExtractor::new(frames.sample_rate, frames.frame_length, DEFAULT_FILTERS, n_ceps)?;
    Ok(frames.frames.iter().map(|f| extractor.frame(f)).collect())
}
