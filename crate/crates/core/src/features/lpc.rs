//! Linear prediction by Levinson-Durbin, and the LPC-to-cepstrum recursion.
//!
//! Predictor convention: `x^[n] = sum_{k=1..p} a_k x[n-k]`.

use super::FeatureError;

/// All-pole model of one frame.
#[derive(Debug, Clone, PartialEq)]
pub struct LpcModel {
    pub order: usize,
    /// `a[0]` is `a_1`.
    pub coefficients: Vec<f64>,
    pub reflection: Vec<f64>,
    pub residual_energy: f64,
}

impl LpcModel {
    pub fn zero(order: usize) -> Self {
        Self {
            order,
            coefficients: vec![0.0; order],
            reflection: vec![0.0; order],
            residual_energy: 0.0,
        }
    }
}

/// Biased autocorrelation `r[k] = sum_n x[n] x[n+k]` for `k = 0..=max_lag`.
pub fn autocorrelation(frame: &[f64], max_lag: usize) -> Vec<f64> {
    (0..=max_lag)
        .map(|k| frame.iter().zip(frame.iter().skip(k)).map(|(a, b)| a * b).sum())
        .collect()
}

/// Solves the order-`p` normal equations from autocorrelation `r[0..=p]`.
pub fn levinson_durbin(r: &[f64], order: usize) -> Result<LpcModel, FeatureError> {
    if order == 0 || r.len() < order + 1 {
        return Err(FeatureError::InvalidOrder {
            order,
            frame_length: r.len(),
        });
    }
    let mut r0 = r[0];
    if r0 == 0.0 {
        r0 = 1e-9;
    }
    let mut a = vec![0.0; order];
    let mut prev = vec![0.0; order];
    let mut reflection = vec![0.0; order];
    let mut err = r0;

    for i in 0..order {
        let mut acc = r[i + 1];
        for j in 0..i {
            acc -= a[j] * r[i - j];
        }
        let k = acc / err;
        if !k.is_finite() || k.abs() >= 1.0 {
            return Err(FeatureError::FrameUnstable { stage: i + 1, k });
        }
        reflection[i] = k;
        prev[..i].copy_from_slice(&a[..i]);
        a[i] = k;
        for j in 0..i {
            a[j] = prev[j] - k * prev[i - 1 - j];
        }
        err *= 1.0 - k * k;
    }

    Ok(LpcModel {
        order,
        coefficients: a,
        reflection,
        residual_energy: err.max(0.0),
    })
}

/// LPC analysis of one frame.
pub fn lpc(frame: &[f64], order: usize) -> Result<LpcModel, FeatureError> {
    if order == 0 || frame.len() <= order {
        return Err(FeatureError::InvalidOrder {
            order,
            frame_length: frame.len(),
        });
    }
    levinson_durbin(&autocorrelation(frame, order), order)
}

/// Cepstrum of the all-pole model `1 / A(z)`, coefficients `c_1..c_n`.
pub fn lpc_to_lpcc(model: &LpcModel, n_ceps: usize) -> Vec<f64> {
    let a = &model.coefficients;
    let p = a.len();
    let mut c = vec![0.0; n_ceps];
    for m in 1..=n_ceps {
        let mut acc = if m <= p { a[m - 1] } else { 0.0 };
        for k in 1..m {
            let lag = m - k;
            if lag <= p {
                acc += (k as f64 / m as f64) * c[k - 1] * a[lag - 1];
            }
        }
        c[m - 1] = acc;
    }
    c
}
