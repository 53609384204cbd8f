//! Round-trips a tone through the WAV codec, then pre-emphasizes and frames it.
//!
//! ```bash
//! cargo run -p voxemo --example wav_and_frames
//! ```

use std::f64::consts::TAU;

use voxemo::audio::{frame_and_window, parse_wav, pre_emphasize, write_wav, AudioClip, WindowKind};
use voxemo::features::frame_energy;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rate = 16000;
    let samples: Vec<f64> = (0..rate / 2)
        .map(|n| 0.4 * (TAU * 220.0 * n as f64 / f64::from(rate)).sin())
        .collect();
    let bytes = write_wav(&AudioClip::new(rate, samples, "tone"));
    let clip = parse_wav(&bytes, "tone.wav")?;
    println!(
        "{} bytes -> {} samples at {} Hz ({:.2} s)",
        bytes.len(),
        clip.samples.len(),
        clip.sample_rate,
        clip.duration_secs()
    );

    let emphasized = pre_emphasize(&clip, 0.97)?;
    let frames = frame_and_window(&emphasized, 25.0, 10.0, WindowKind::Hamming)?;
    println!(
        "{} frames of {} samples, hop {}",
        frames.frames.len(),
        frames.frame_length,
        frames.hop
    );

    let energy = frame_energy(&frames)?;
    let (lo, hi) = energy
        .iter()
        .fold((f64::MAX, f64::MIN), |(lo, hi), &e| (lo.min(e), hi.max(e)));
    println!("frame energy range {lo:.4} .. {hi:.4}");
    Ok(())
}
