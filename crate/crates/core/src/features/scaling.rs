use super::{FeatureError, ModelId};

/// Per-dimension `[min, max] -> [-1, 1]` map learned on training data.
#[derive(Debug, Clone, PartialEq)]
pub struct ScalingParams {
    pub model_id: ModelId,
    pub min: Vec<f64>,
    pub max: Vec<f64>,
}

impl ScalingParams {
    pub fn dims(&self) -> usize {
        self.min.len()
    }

    /// Maps one vector; values outside the training range are clamped and
    /// constant training dimensions map to 0.
    pub fn apply(&self, v: &[f64]) -> Result<Vec<f64>, FeatureError> {
        if v.len() != self.dims() {
            return Err(FeatureError::DimensionMismatch {
                expected: self.dims(),
                found: v.len(),
            });
        }
        Ok(v.iter()
            .zip(self.min.iter().zip(&self.max))
            .map(|(&x, (&lo, &hi))| {
                if hi > lo {
                    (2.0 * (x - lo) / (hi - lo) - 1.0).clamp(-1.0, 1.0)
                } else {
                    0.0
                }
            })
            .collect())
    }
}

pub fn fit_scaling(model_id: ModelId, train: &[Vec<f64>]) -> Result<ScalingParams, FeatureError> {
    let dims = model_id.dims();
    if train.is_empty() {
        return Err(FeatureError::EmptySeries);
    }
    if let Some(bad) = train.iter().find(|v| v.len() != dims) {
        return Err(FeatureError::DimensionMismatch {
            expected: dims,
            found: bad.len(),
        });
    }
    let mut min = vec![f64::INFINITY; dims];
    let mut max = vec![f64::NEG_INFINITY; dims];
    for v in train {
        for (d, &x) in v.iter().enumerate() {
            min[d] = min[d].min(x);
            max[d] = max[d].max(x);
        }
    }
    Ok(ScalingParams { model_id, min, max })
}

pub fn apply_scaling(params: &ScalingParams, v: &[f64]) -> Result<Vec<f64>, FeatureError> {
    params.apply(v)
}
