//! Independent reference computations shared by the integration tests and
//! the acceptance harness. Nothing here calls into the code under test
//! except to obtain inputs.

#![allow(dead_code, clippy::needless_range_loop)]

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use voxemo::audio::AudioClip;

pub fn rng(seed: u64) -> ChaCha8Rng {
    ChaCha8Rng::seed_from_u64(seed)
}

pub fn max_abs_diff(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "length mismatch");
    a.iter().zip(b).map(|(x, y)| (x - y).abs()).fold(0.0, f64::max)
}

// ---------------------------------------------------------------- signals

pub fn sine(freq: f64, rate: u32, secs: f64, amp: f64) -> AudioClip {
    let n = (secs * f64::from(rate)).round() as usize;
    let samples = (0..n)
        .map(|i| amp * (2.0 * PI * freq * i as f64 / f64::from(rate)).sin())
        .collect();
    AudioClip::new(rate, samples, format!("sine_{freq}"))
}

/// Linear chirp from `f0` to `f1` Hz; also returns the instantaneous
/// frequency at each sample.
pub fn glide(f0: f64, f1: f64, rate: u32, secs: f64, amp: f64) -> (AudioClip, Vec<f64>) {
    let n = (secs * f64::from(rate)).round() as usize;
    let fs = f64::from(rate);
    let sweep = (f1 - f0) / secs;
    let samples = (0..n)
        .map(|i| {
            let t = i as f64 / fs;
            amp * (2.0 * PI * (f0 * t + 0.5 * sweep * t * t)).sin()
        })
        .collect();
    let inst = (0..n).map(|i| f0 + sweep * i as f64 / fs).collect();
    (AudioClip::new(rate, samples, "glide"), inst)
}

/// White noise through a random stable all-pole filter.
pub fn ar_noise(rng: &mut ChaCha8Rng, n: usize, order: usize) -> Vec<f64> {
    let a = step_up(&random_reflections(rng, order, 0.8));
    let mut x = vec![0.0; n];
    for i in 0..n {
        let mut v: f64 = rng.random_range(-1.0..1.0);
        for (k, ak) in a.iter().enumerate() {
            if i > k {
                v += ak * x[i - k - 1];
            }
        }
        x[i] = v;
    }
    x
}

// ---------------------------------------------------------------- linear prediction

pub fn random_reflections(rng: &mut ChaCha8Rng, order: usize, bound: f64) -> Vec<f64> {
    (0..order).map(|_| rng.random_range(-bound..bound)).collect()
}

/// Reflection coefficients to predictor coefficients (`x^[n] = sum a_k x[n-k]`).
pub fn step_up(k: &[f64]) -> Vec<f64> {
    let mut a: Vec<f64> = Vec::new();
    for &ki in k {
        let prev = a.clone();
        let i = prev.len();
        a.push(ki);
        for j in 0..i {
            a[j] = prev[j] - ki * prev[i - 1 - j];
        }
    }
    a
}

/// `sum_n x[n] x[n+k]`, written as an explicit double loop.
pub fn autocorr(x: &[f64], max_lag: usize) -> Vec<f64> {
    let mut r = vec![0.0; max_lag + 1];
    for (k, rk) in r.iter_mut().enumerate() {
        for n in 0..x.len().saturating_sub(k) {
            *rk += x[n] * x[n + k];
        }
    }
    r
}

/// Dense Gaussian elimination with partial pivoting.
pub fn solve_dense(mut m: Vec<Vec<f64>>, mut b: Vec<f64>) -> Option<Vec<f64>> {
    let n = b.len();
    for col in 0..n {
        let pivot = (col..n).max_by(|&i, &j| m[i][col].abs().total_cmp(&m[j][col].abs()))?;
        if m[pivot][col].abs() < 1e-14 {
            return None;
        }
        m.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..n {
            let f = m[row][col] / m[col][col];
            for c in col..n {
                m[row][c] -= f * m[col][c];
            }
            b[row] -= f * b[col];
        }
    }
    let mut x = vec![0.0; n];
    for row in (0..n).rev() {
        let s: f64 = (row + 1..n).map(|c| m[row][c] * x[c]).sum();
        x[row] = (b[row] - s) / m[row][row];
    }
    Some(x)
}

/// Normal equations `R a = r` with `R[i][j] = r[|i-j|]`.
pub fn toeplitz_lpc(r: &[f64], order: usize) -> Vec<f64> {
    let m = (0..order)
        .map(|i| (0..order).map(|j| r[i.abs_diff(j)]).collect())
        .collect();
    solve_dense(m, r[1..=order].to_vec()).expect("autocorrelation matrix is positive definite")
}

/// Cepstrum of `1 / A(e^jw)` from a dense sampling of the log magnitude.
pub fn spectral_cepstrum(a: &[f64], n_ceps: usize, n_fft: usize) -> Vec<f64> {
    let log_mag: Vec<f64> = (0..n_fft)
        .map(|i| {
            let w = 2.0 * PI * i as f64 / n_fft as f64;
            let (mut re, mut im) = (1.0, 0.0);
            for (k, ak) in a.iter().enumerate() {
                let phase = w * (k + 1) as f64;
                re -= ak * phase.cos();
                im += ak * phase.sin();
            }
            -0.5 * (re * re + im * im).ln()
        })
        .collect();
    (1..=n_ceps)
        .map(|n| {
            2.0 * log_mag
                .iter()
                .enumerate()
                .map(|(i, l)| l * (2.0 * PI * i as f64 * n as f64 / n_fft as f64).cos())
                .sum::<f64>()
                / n_fft as f64
        })
        .collect()
}

// ---------------------------------------------------------------- spectral features

/// `|X[k]|^2` for `k = 0..=size/2` by the direct DFT definition.
pub fn dft_power(frame: &[f64], size: usize) -> Vec<f64> {
    (0..=size / 2)
        .map(|k| {
            let (mut re, mut im) = (0.0, 0.0);
            for (n, x) in frame.iter().take(size).enumerate() {
                let phase = -2.0 * PI * (k * n) as f64 / size as f64;
                re += x * phase.cos();
                im += x * phase.sin();
            }
            re * re + im * im
        })
        .collect()
}

pub fn mel(hz: f64) -> f64 {
    2595.0 * (1.0 + hz / 700.0).log10()
}

pub fn inv_mel(m: f64) -> f64 {
    700.0 * (10f64.powf(m / 2595.0) - 1.0)
}

/// Full-band triangle edges as FFT bin indices.
pub fn mel_edge_bins(rate: u32, size: usize, n_filters: usize) -> Vec<usize> {
    let top = mel(f64::from(rate) / 2.0);
    (0..n_filters + 2)
        .map(|i| {
            let hz = inv_mel(top * i as f64 / (n_filters + 1) as f64);
            ((hz * size as f64 / f64::from(rate)).round() as usize).min(size / 2)
        })
        .collect()
}

/// Unit-sum triangular filter energies.
pub fn mel_energies(power: &[f64], edges: &[usize]) -> Vec<f64> {
    edges
        .windows(3)
        .map(|e| {
            let (l, c, r) = (e[0] as f64, e[1] as f64, e[2] as f64);
            let weight = |k: f64| {
                if k == c {
                    1.0
                } else if k > l && k < c {
                    (k - l) / (c - l)
                } else if k > c && k < r {
                    (r - k) / (r - c)
                } else {
                    0.0
                }
            };
            let total: f64 = (0..power.len()).map(|k| weight(k as f64)).sum();
            (0..power.len()).map(|k| weight(k as f64) * power[k]).sum::<f64>() / total
        })
        .collect()
}

/// Orthonormal DCT-II coefficients `1..=n_ceps` of log energies.
pub fn dct_ceps(energies: &[f64], n_ceps: usize) -> Vec<f64> {
    let m = energies.len() as f64;
    (1..=n_ceps)
        .map(|k| {
            (2.0 / m).sqrt()
                * energies
                    .iter()
                    .enumerate()
                    .map(|(n, e)| e.max(1e-10).ln() * (PI * k as f64 * (n as f64 + 0.5) / m).cos())
                    .sum::<f64>()
        })
        .collect()
}

pub fn mfcc_frame(frame: &[f64], rate: u32, n_filters: usize, n_ceps: usize) -> Vec<f64> {
    let size = frame.len().next_power_of_two();
    let power = dft_power(frame, size);
    dct_ceps(&mel_energies(&power, &mel_edge_bins(rate, size, n_filters)), n_ceps)
}

// ---------------------------------------------------------------- statistics

/// The 19 utterance statistics in feature order, via textbook formulas.
pub fn stats19(x: &[f64]) -> [f64; 19] {
    let n = x.len() as f64;
    let mean = x.iter().sum::<f64>() / n;
    let var = x.iter().map(|v| v * v).sum::<f64>() / n - mean * mean;
    let var = var.max(0.0);
    let mut s = x.to_vec();
    s.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let q = |p: f64| {
        let h = (s.len() - 1) as f64 * p;
        let lo = h.floor();
        s[lo as usize] + (h - lo) * (s[h.ceil() as usize] - s[lo as usize])
    };
    let sd = var.sqrt();
    let (skew, kurt) = if sd > 0.0 {
        let z3 = x.iter().map(|v| ((v - mean) / sd).powi(3)).sum::<f64>() / n;
        let z4 = x.iter().map(|v| ((v - mean) / sd).powi(4)).sum::<f64>() / n;
        (z3, z4 - 3.0)
    } else {
        (0.0, 0.0)
    };
    let d: Vec<f64> = (1..x.len()).map(|i| x[i] - x[i - 1]).collect();
    let dn = d.len() as f64;
    let (dmean, dsd, dmin, dmax, dabs) = if d.is_empty() {
        (0.0, 0.0, 0.0, 0.0, 0.0)
    } else {
        let dm = d.iter().sum::<f64>() / dn;
        let dv = d.iter().map(|v| (v - dm).powi(2)).sum::<f64>() / dn;
        (
            dm,
            dv.sqrt(),
            d.iter().cloned().fold(f64::MAX, f64::min),
            d.iter().cloned().fold(f64::MIN, f64::max),
            d.iter().map(|v| v.abs()).sum::<f64>() / dn,
        )
    };
    // Least squares from the raw normal equations.
    let (st, stt, sy, sty) = x.iter().enumerate().fold((0.0, 0.0, 0.0, 0.0), |acc, (i, y)| {
        let t = i as f64;
        (acc.0 + t, acc.1 + t * t, acc.2 + y, acc.3 + t * y)
    });
    let det = n * stt - st * st;
    let (slope, intercept) = if det.abs() > 0.0 {
        let slope = (n * sty - st * sy) / det;
        (slope, (sy - slope * st) / n)
    } else {
        (0.0, mean)
    };
    [
        mean,
        sd,
        var,
        s[0],
        s[s.len() - 1],
        s[s.len() - 1] - s[0],
        q(0.5),
        q(0.25),
        q(0.75),
        q(0.75) - q(0.25),
        skew,
        kurt,
        dmean,
        dsd,
        dmin,
        dmax,
        slope,
        intercept,
        dabs,
    ]
}

// ---------------------------------------------------------------- SVM

pub fn rbf(x: &[f64], z: &[f64], gamma: f64) -> f64 {
    (-gamma * x.iter().zip(z).map(|(a, b)| (a - b).powi(2)).sum::<f64>()).exp()
}

pub fn dual_objective(x: &[Vec<f64>], y: &[f64], alpha: &[f64], gamma: f64) -> f64 {
    let mut quad = 0.0;
    for i in 0..x.len() {
        for j in 0..x.len() {
            quad += alpha[i] * alpha[j] * y[i] * y[j] * rbf(&x[i], &x[j], gamma);
        }
    }
    alpha.iter().sum::<f64>() - 0.5 * quad
}

/// Exact dual optimum by enumerating every assignment of each multiplier
/// to {0, C, free}; free multipliers solve the stationarity equations
/// `sum_j Q_ij a_j + b y_i = 1` together with `sum_i y_i a_i = 0`.
pub fn brute_force_dual(x: &[Vec<f64>], y: &[f64], gamma: f64, c: f64) -> f64 {
    let n = x.len();
    let q = |i: usize, j: usize| y[i] * y[j] * rbf(&x[i], &x[j], gamma);
    let mut best = f64::NEG_INFINITY;
    for code in 0..3usize.pow(n as u32) {
        let state: Vec<usize> = (0..n).map(|i| code / 3usize.pow(i as u32) % 3).collect();
        let free: Vec<usize> = (0..n).filter(|&i| state[i] == 2).collect();
        let mut alpha: Vec<f64> = state.iter().map(|&s| if s == 1 { c } else { 0.0 }).collect();
        if !free.is_empty() {
            let m = free.len();
            let mut a = vec![vec![0.0; m + 1]; m + 1];
            let mut b = vec![0.0; m + 1];
            for (r, &i) in free.iter().enumerate() {
                for (s, &j) in free.iter().enumerate() {
                    a[r][s] = q(i, j);
                }
                a[r][m] = y[i];
                b[r] = 1.0 - (0..n).filter(|&j| state[j] == 1).map(|j| q(i, j) * c).sum::<f64>();
                a[m][r] = y[i];
            }
            b[m] = -(0..n).filter(|&j| state[j] == 1).map(|j| y[j] * c).sum::<f64>();
            let Some(sol) = solve_dense(a, b) else { continue };
            for (r, &i) in free.iter().enumerate() {
                alpha[i] = sol[r];
            }
        }
        let feasible = alpha.iter().all(|&a| (-1e-12..=c + 1e-12).contains(&a))
            && alpha.iter().zip(y).map(|(a, y)| a * y).sum::<f64>().abs() < 1e-9;
        if feasible {
            best = best.max(dual_objective(x, y, &alpha, gamma));
        }
    }
    best
}

/// Eigenvalues of a symmetric matrix by cyclic Jacobi rotations.
pub fn jacobi_eigenvalues(mut a: Vec<Vec<f64>>) -> Vec<f64> {
    let n = a.len();
    for _sweep in 0..100 {
        let off: f64 = (0..n)
            .flat_map(|i| (0..n).filter(move |&j| j != i).map(move |j| (i, j)))
            .map(|(i, j)| a[i][j] * a[i][j])
            .sum();
        if off < 1e-22 {
            break;
        }
        for p in 0..n {
            for q in p + 1..n {
                if a[p][q].abs() < 1e-300 {
                    continue;
                }
                let theta = (a[q][q] - a[p][p]) / (2.0 * a[p][q]);
                let t = theta.signum() / (theta.abs() + (theta * theta + 1.0).sqrt());
                let t = if theta == 0.0 { 1.0 } else { t };
                let cs = 1.0 / (t * t + 1.0).sqrt();
                let sn = t * cs;
                for k in 0..n {
                    let (akp, akq) = (a[k][p], a[k][q]);
                    a[k][p] = cs * akp - sn * akq;
                    a[k][q] = sn * akp + cs * akq;
                }
                for k in 0..n {
                    let (apk, aqk) = (a[p][k], a[q][k]);
                    a[p][k] = cs * apk - sn * aqk;
                    a[q][k] = sn * apk + cs * aqk;
                }
            }
        }
    }
    (0..n).map(|i| a[i][i]).collect()
}

/// Gaussian blobs, one per label, centered at `centers`.
pub fn blobs(
    rng: &mut ChaCha8Rng,
    centers: &[(&str, Vec<f64>)],
    per_class: usize,
    spread: f64,
) -> (Vec<Vec<f64>>, Vec<String>) {
    let mut x = Vec::new();
    let mut y = Vec::new();
    for _ in 0..per_class {
        for (label, center) in centers {
            x.push(
                center
                    .iter()
                    .map(|c| c + spread * rng.random_range(-1.0..1.0))
                    .collect(),
            );
            y.push(label.to_string());
        }
    }
    (x, y)
}

/// Majority vote written independently: tally, then earliest maximal class.
pub fn vote(n_classes: usize, pair_decisions: &[((usize, usize), f64)]) -> usize {
    let mut tally = vec![0usize; n_classes];
    for &((a, b), d) in pair_decisions {
        tally[if d > 0.0 { a } else { b }] += 1;
    }
    let top = *tally.iter().max().unwrap();
    tally.iter().position(|&t| t == top).unwrap()
}

// ---------------------------------------------------------------- evaluation

/// Human listening-test percentages, listener columns in row order.
pub const HUMAN_LISTENING_TABLE: &str = "Act / Listn\tNeu\tSup\tHap\tSad\tAng\tFea
Neu\t65.2\t2.9\t0.1\t27.3\t5.2\t0.2
Sup\t10.0\t59.2\t30.2\t1.0\t1.2\t5.1
Hap\t5.5\t29.8\t61.2\t1.7\t3.4\t1.1
Sad\t13.5\t1.7\t0.2\t75.3\t0.3\t0.3
Ang\t10.2\t8.5\t4.5\t1.7\t76.5\t56.3
Fea\t2.3\t8.2\t0.5\t8.1\t10.6\t61.5
";
