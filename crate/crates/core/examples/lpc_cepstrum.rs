//! Fits a 12th-order predictor to a two-resonance signal and converts it to
//! LPC cepstral coefficients.
//!
//! ```bash
//! cargo run -p voxemo --example lpc_cepstrum
//! ```

use std::f64::consts::TAU;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use voxemo::features::{lpc, lpc_to_lpcc};

fn main() -> Result<(), Box<dyn std::error::Error>> {
    // Excite two damped resonators (700 Hz and 1200 Hz at 8 kHz) with noise.
    let rate = 8000.0;
    let poles: Vec<(f64, f64)> = [700.0, 1200.0]
        .iter()
        .map(|&f: &f64| (2.0 * 0.95 * (TAU * f / rate).cos(), -0.95f64.powi(2)))
        .collect();
    let mut rng = ChaCha8Rng::seed_from_u64(3);
    let mut x = vec![0.0f64; 400];
    let mut stage = vec![[0.0f64; 2]; poles.len()];
    for sample in x.iter_mut() {
        let mut v: f64 = rng.random_range(-1.0..1.0);
        for ((a1, a2), s) in poles.iter().zip(stage.iter_mut()) {
            let y = v + a1 * s[0] + a2 * s[1];
            *s = [y, s[0]];
            v = y;
        }
        *sample = v;
    }

    let model = lpc(&x, 12)?;
    println!("predictor a1..a12: {:.4?}", model.coefficients);
    println!("reflection k1..k12: {:.4?}", model.reflection);
    println!("residual energy: {:.4}", model.residual_energy);
    println!("lpcc c1..c12: {:.4?}", lpc_to_lpcc(&model, 12));
    Ok(())
}
