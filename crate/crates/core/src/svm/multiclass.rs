use rayon::prelude::*;

use crate::features::{fit_scaling, ModelId, ScalingParams};
use crate::numfmt::quantize9;

use super::kernel::KernelParams;
use super::smo::{smo_train_binary, BinaryModel, TrainConfig};
use super::SvmError;

/// One-vs-one ensemble over sorted class labels, with its input scaling.
#[derive(Debug, Clone, PartialEq)]
pub struct MulticlassModel {
    pub model_id: ModelId,
    /// Lexicographically sorted; position breaks vote ties.
    pub classes: Vec<String>,
    pub kernel: KernelParams,
    pub c: f64,
    pub scaling: ScalingParams,
    /// Ordered `(0,1), (0,2), ..., (1,2), ...` by class position.
    pub pairwise: Vec<BinaryModel>,
}

fn check_label(label: &str) -> Result<(), SvmError> {
    if label.is_empty() || label.chars().any(|c| c.is_whitespace() || c == ',') {
        Err(SvmError::BadLabel(label.to_string()))
    } else {
        Ok(())
    }
}

/// Trains one binary model per class pair on that pair's examples only.
///
/// Scaling is fit on `x` and all stored parameters are rounded to 9
/// significant digits, so a saved and reloaded model predicts identically.
pub fn train_ovo(
    model_id: ModelId,
    x: &[Vec<f64>],
    labels: &[String],
    kernel: KernelParams,
    config: &TrainConfig,
) -> Result<MulticlassModel, SvmError> {
    if x.len() != labels.len() {
        return Err(SvmError::DimensionMismatch {
            expected: x.len(),
            found: labels.len(),
        });
    }
    let mut classes: Vec<String> = labels.to_vec();
    classes.sort();
    classes.dedup();
    for c in &classes {
        check_label(c)?;
    }
    if classes.len() < 2 {
        return Err(SvmError::TooFewClasses(classes.len()));
    }

    let mut scaling = fit_scaling(model_id, x)?;
    scaling.min.iter_mut().for_each(|v| *v = quantize9(*v));
    scaling.max.iter_mut().for_each(|v| *v = quantize9(*v));
    let scaled: Vec<Vec<f64>> = x.iter().map(|v| scaling.apply(v)).collect::<Result<_, _>>()?;
    let class_index: Vec<usize> = labels
        .iter()
        .map(|l| classes.binary_search(l).unwrap_or_default())
        .collect();

    let pairs: Vec<(usize, usize)> = (0..classes.len())
        .flat_map(|a| (a + 1..classes.len()).map(move |b| (a, b)))
        .collect();
    let kernel = KernelParams {
        gamma: quantize9(kernel.gamma),
    };

    let pairwise = pairs
        .par_iter()
        .map(|&(a, b)| {
            let (px, py): (Vec<Vec<f64>>, Vec<f64>) = scaled
                .iter()
                .zip(&class_index)
                .filter(|(_, &ci)| ci == a || ci == b)
                .map(|(v, &ci)| (v.clone(), if ci == a { 1.0 } else { -1.0 }))
                .unzip();
            let pair = (classes[a].clone(), classes[b].clone());
            smo_train_binary(&px, &py, kernel, config, pair.clone())
                .map(quantize_binary)
                .map_err(|e| SvmError::Pair {
                    positive: pair.0,
                    negative: pair.1,
                    source: Box::new(e),
                })
        })
        .collect::<Result<Vec<_>, _>>()?;

    Ok(MulticlassModel {
        model_id,
        classes,
        kernel,
        c: quantize9(config.c),
        scaling,
        pairwise,
    })
}

fn quantize_binary(mut m: BinaryModel) -> BinaryModel {
    m.bias = quantize9(m.bias);
    m.dual_coeffs.iter_mut().for_each(|v| *v = quantize9(*v));
    for sv in &mut m.support_vectors {
        sv.iter_mut().for_each(|v| *v = quantize9(*v));
    }
    m
}

/// Majority vote: pair `k` votes for its first class when `decisions[k] > 0`.
/// Ties go to the class listed first.
pub fn vote(n_classes: usize, pairs: &[(usize, usize)], decisions: &[f64]) -> usize {
    let mut votes = vec![0usize; n_classes];
    for (&(a, b), &f) in pairs.iter().zip(decisions) {
        votes[if f > 0.0 { a } else { b }] += 1;
    }
    let best = votes.iter().copied().max().unwrap_or(0);
    votes.iter().position(|&v| v == best).unwrap_or(0)
}

impl MulticlassModel {
    pub fn dims(&self) -> usize {
        self.scaling.dims()
    }

    pub fn pair_indices(&self) -> Vec<(usize, usize)> {
        let n = self.classes.len();
        (0..n).flat_map(|a| (a + 1..n).map(move |b| (a, b))).collect()
    }

    /// Scales `x` and returns one decision value per pair model.
    pub fn decision_values(&self, x: &[f64]) -> Result<Vec<f64>, SvmError> {
        let scaled = self.scaling.apply(x)?;
        Ok(self.pairwise.iter().map(|m| m.decision_unchecked(&scaled)).collect())
    }

    pub fn predict(&self, x: &[f64]) -> Result<&str, SvmError> {
        let decisions = self.decision_values(x)?;
        let winner = vote(self.classes.len(), &self.pair_indices(), &decisions);
        Ok(&self.classes[winner])
    }
}

/// Free-function form of [`MulticlassModel::predict`].
pub fn predict<'m>(model: &'m MulticlassModel, x: &[f64]) -> Result<&'m str, SvmError> {
    model.predict(x)
}
