use super::FeatureError;

/// Nineteen summary statistics of a per-frame series, in file order.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct SeriesStats19 {
    pub mean: f64,
    pub std: f64,
    pub variance: f64,
    pub min: f64,
    pub max: f64,
    pub range: f64,
    pub median: f64,
    pub q1: f64,
    pub q3: f64,
    pub iqr: f64,
    pub skewness: f64,
    pub kurtosis: f64,
    pub delta_mean: f64,
    pub delta_std: f64,
    pub delta_min: f64,
    pub delta_max: f64,
    pub slope: f64,
    pub intercept: f64,
    pub mean_abs_delta: f64,
}

impl SeriesStats19 {
    pub const LEN: usize = 19;

    pub const NAMES: [&'static str; 19] = [
        "mean",
        "std",
        "variance",
        "min",
        "max",
        "range",
        "median",
        "q1",
        "q3",
        "iqr",
        "skewness",
        "kurtosis",
        "delta_mean",
        "delta_std",
        "delta_min",
        "delta_max",
        "slope",
        "intercept",
        "mean_abs_delta",
    ];

    pub fn to_array(&self) -> [f64; 19] {
        [
            self.mean,
            self.std,
            self.variance,
            self.min,
            self.max,
            self.range,
            self.median,
            self.q1,
            self.q3,
            self.iqr,
            self.skewness,
            self.kurtosis,
            self.delta_mean,
            self.delta_std,
            self.delta_min,
            self.delta_max,
            self.slope,
            self.intercept,
            self.mean_abs_delta,
        ]
    }
}

/// Linear-interpolated quantile of sorted data (`q` in `[0, 1]`).
fn quantile_sorted(sorted: &[f64], q: f64) -> f64 {
    let pos = q * (sorted.len() - 1) as f64;
    let lo = pos.floor() as usize;
    let hi = pos.ceil() as usize;
    let frac = pos - lo as f64;
    sorted[lo] + (sorted[hi] - sorted[lo]) * frac
}

fn mean_var(xs: &[f64]) -> (f64, f64) {
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    (mean, var)
}

/// Population statistics, least-squares trend over `(index, value)` and
/// first-difference statistics. A length-1 series has all delta stats 0.
pub fn stats19(series: &[f64]) -> Result<SeriesStats19, FeatureError> {
    if series.is_empty() {
        return Err(FeatureError::EmptySeries);
    }
    let n = series.len() as f64;
    let (mean, variance) = mean_var(series);
    let std = variance.sqrt();

    let mut sorted = series.to_vec();
    sorted.sort_by(f64::total_cmp);
    let min = sorted[0];
    let max = sorted[sorted.len() - 1];
    let median = quantile_sorted(&sorted, 0.5);
    let q1 = quantile_sorted(&sorted, 0.25);
    let q3 = quantile_sorted(&sorted, 0.75);

    // Higher moments are undefined for (numerically) constant series.
    let degenerate = variance <= 1e-24 * (1.0 + mean * mean);
    let (skewness, kurtosis) = if degenerate {
        (0.0, 0.0)
    } else {
        let m3 = series.iter().map(|x| (x - mean).powi(3)).sum::<f64>() / n;
        let m4 = series.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
        (m3 / variance.powf(1.5), m4 / (variance * variance) - 3.0)
    };

    let deltas: Vec<f64> = series.windows(2).map(|w| w[1] - w[0]).collect();
    let (delta_mean, delta_std, delta_min, delta_max, mean_abs_delta) = if deltas.is_empty() {
        (0.0, 0.0, 0.0, 0.0, 0.0)
    } else {
        let (dm, dv) = mean_var(&deltas);
        let dmin = deltas.iter().copied().fold(f64::INFINITY, f64::min);
        let dmax = deltas.iter().copied().fold(f64::NEG_INFINITY, f64::max);
        let mad = deltas.iter().map(|d| d.abs()).sum::<f64>() / deltas.len() as f64;
        (dm, dv.sqrt(), dmin, dmax, mad)
    };

    let t_mean = (n - 1.0) / 2.0;
    let sxx: f64 = (0..series.len()).map(|i| (i as f64 - t_mean).powi(2)).sum();
    let slope = if sxx > 0.0 {
        series
            .iter()
            .enumerate()
            .map(|(i, y)| (i as f64 - t_mean) * (y - mean))
            .sum::<f64>()
            / sxx
    } else {
        0.0
    };
    let intercept = mean - slope * t_mean;

    Ok(SeriesStats19 {
        mean,
        std,
        variance,
        min,
        max,
        range: max - min,
        median,
        q1,
        q3,
        iqr: q3 - q1,
        skewness,
        kurtosis,
        delta_mean,
        delta_std,
        delta_min,
        delta_max,
        slope,
        intercept,
        mean_abs_delta,
    })
}
