//! Tracks F0 on a gliding harmonic tone with a silent gap in the middle.
//!
//! ```bash
//! cargo run -p voxemo --example pitch_tracking
//! ```

use std::f64::consts::TAU;

use voxemo::audio::{frame_and_window, AudioClip, WindowKind};
use voxemo::features::estimate_pitch;

fn main() -> Result<(), Box<dyn std::error::Error>> {
    let rate = 16000.0;
    let n = 16000;
    let mut phase = 0.0;
    let samples: Vec<f64> = (0..n)
        .map(|i| {
            let t = i as f64 / rate;
            let f0 = 120.0 + 150.0 * t;
            phase += TAU * f0 / rate;
            let gap = (0.45..0.55).contains(&t);
            if gap {
                0.0
            } else {
                0.5 * phase.sin() + 0.2 * (2.0 * phase).sin()
            }
        })
        .collect();
    let clip = AudioClip::new(16000, samples, "glide");
    let frames = frame_and_window(&clip, 40.0, 10.0, WindowKind::Rectangular)?;
    let track = estimate_pitch(&frames, 60.0, 400.0)?;
    println!("{} of {} frames voiced", track.voiced_count(), track.frames.len());
    for (i, f) in track.frames.iter().enumerate().step_by(8) {
        let t = (i * frames.hop) as f64 / rate;
        match f {
            Some(hz) => println!("{t:5.2} s  {hz:7.1} Hz"),
            None => println!("{t:5.2} s  unvoiced"),
        }
    }
    Ok(())
}
