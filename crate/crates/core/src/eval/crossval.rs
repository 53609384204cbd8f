use std::fmt::Write as _;

use rayon::prelude::*;

use crate::features::ModelId;
use crate::numfmt::sig9;
use crate::svm::{train_ovo, KernelParams, MulticlassModel, TrainConfig};

use super::confusion::{build_confusion, ConfusionMatrix};
use super::folds::{stratified_holdout, stratified_kfold, FoldAssignment};
use super::EvalError;

#[derive(Debug, Clone, PartialEq)]
pub struct CvReport {
    pub model_id: ModelId,
    pub k: usize,
    pub fold_accuracies: Vec<f64>,
    /// Unweighted mean of the fold accuracies.
    pub mean_accuracy: f64,
    /// Pooled held-out predictions of every fold.
    pub confusion: ConfusionMatrix,
}

impl CvReport {
    /// `model_id,k,fold,accuracy` rows; the last row has fold `mean`.
    pub fn to_rows(&self) -> String {
        let mut out = String::from("model_id,k,fold,accuracy\n");
        for (f, acc) in self.fold_accuracies.iter().enumerate() {
            let _ = writeln!(out, "{},{},{f},{}", self.model_id, self.k, sig9(*acc));
        }
        let _ = writeln!(out, "{},{},mean,{}", self.model_id, self.k, sig9(self.mean_accuracy));
        out
    }
}

fn select<T: Clone>(items: &[T], idx: &[usize]) -> Vec<T> {
    idx.iter().map(|&i| items[i].clone()).collect()
}

fn class_list(labels: &[String]) -> Vec<String> {
    let mut classes = labels.to_vec();
    classes.sort();
    classes.dedup();
    classes
}

/// Trains on every fold except `fold`; scaling sees training rows only.
pub fn train_fold(
    model_id: ModelId,
    x: &[Vec<f64>],
    labels: &[String],
    folds: &FoldAssignment,
    fold: usize,
    kernel: KernelParams,
    config: &TrainConfig,
) -> Result<MulticlassModel, EvalError> {
    let train = folds.train_indices(fold);
    train_ovo(model_id, &select(x, &train), &select(labels, &train), kernel, config).map_err(|e| EvalError::Fold {
        fold,
        source: Box::new(e),
    })
}

fn score(model: &MulticlassModel, x: &[Vec<f64>], idx: &[usize]) -> Result<Vec<String>, EvalError> {
    idx.iter()
        .map(|&i| model.predict(&x[i]).map(str::to_string).map_err(EvalError::from))
        .collect()
}

/// Stratified k-fold cross-validation with per-fold scaling and training.
pub fn cross_validate(
    model_id: ModelId,
    x: &[Vec<f64>],
    labels: &[String],
    k: usize,
    kernel: KernelParams,
    config: &TrainConfig,
    seed: u64,
) -> Result<CvReport, EvalError> {
    if x.len() != labels.len() {
        return Err(EvalError::LengthMismatch {
            left: x.len(),
            right: labels.len(),
        });
    }
    let folds = stratified_kfold(labels, k, seed)?;
    let results: Vec<(Vec<usize>, Vec<String>)> = (0..k)
        .into_par_iter()
        .map(|fold| {
            let model = train_fold(model_id, x, labels, &folds, fold, kernel, config)?;
            let test = folds.test_indices(fold);
            let predicted = score(&model, x, &test)?;
            Ok((test, predicted))
        })
        .collect::<Result<_, EvalError>>()?;

    let classes = class_list(labels);
    let mut actual = Vec::new();
    let mut assigned = Vec::new();
    let mut fold_accuracies = Vec::with_capacity(k);
    for (test, predicted) in results {
        let correct = test.iter().zip(&predicted).filter(|(&i, p)| &labels[i] == *p).count();
        fold_accuracies.push(correct as f64 / test.len() as f64);
        actual.extend(test.iter().map(|&i| labels[i].clone()));
        assigned.extend(predicted);
    }
    let mean_accuracy = fold_accuracies.iter().sum::<f64>() / k as f64;
    Ok(CvReport {
        model_id,
        k,
        fold_accuracies,
        mean_accuracy,
        confusion: build_confusion(&actual, &assigned, &classes)?,
    })
}

/// Held-out recognition rate plus k-fold rate on the training split.
#[derive(Debug, Clone, PartialEq)]
pub struct RecognitionReport {
    pub model_id: ModelId,
    pub cv: CvReport,
    pub recognition_rate: f64,
    pub test_confusion: ConfusionMatrix,
}

pub const HOLDOUT_FRACTION: f64 = 0.25;

pub fn evaluate(
    model_id: ModelId,
    x: &[Vec<f64>],
    labels: &[String],
    k: usize,
    kernel: KernelParams,
    config: &TrainConfig,
    seed: u64,
) -> Result<RecognitionReport, EvalError> {
    let (train, test) = stratified_holdout(labels, HOLDOUT_FRACTION, seed)?;
    let (train_x, train_y) = (select(x, &train), select(labels, &train));
    let cv = cross_validate(model_id, &train_x, &train_y, k, kernel, config, seed)?;
    let model = train_ovo(model_id, &train_x, &train_y, kernel, config)?;
    let predicted = score(&model, x, &test)?;
    let actual = select(labels, &test);
    let correct = actual.iter().zip(&predicted).filter(|(a, p)| a == p).count();
    Ok(RecognitionReport {
        model_id,
        cv,
        recognition_rate: correct as f64 / test.len() as f64,
        test_confusion: build_confusion(&actual, &predicted, &class_list(labels))?,
    })
}

/// Table with one row per feature model: combination, CV rate, recognition rate.
pub fn render_recognition_table(reports: &[RecognitionReport]) -> String {
    let mut out = String::from("Training Model\tFeatures Combination\tCross Validation Rate\tRecognition Rate\n");
    for r in reports {
        let name = match r.model_id {
            ModelId::Model1 => "Model 1".to_string(),
            ModelId::Model2 => "Model 2".to_string(),
            other => other.to_string(),
        };
        let _ = writeln!(
            out,
            "{name}\t{}\t{:.1}%\t{:.1}%",
            r.model_id.combination(),
            100.0 * r.cv.mean_accuracy,
            100.0 * r.recognition_rate
        );
    }
    out
}

/// Exhaustive (C, gamma) search over powers of two by cross-validated accuracy.
/// Ties keep the earlier grid point (smaller C, then smaller gamma).
pub fn grid_search(
    model_id: ModelId,
    x: &[Vec<f64>],
    labels: &[String],
    k: usize,
    base: &TrainConfig,
    seed: u64,
) -> Result<(TrainConfig, KernelParams, f64), EvalError> {
    let grid: Vec<(i32, i32)> = (-1..=7).flat_map(|c| (-7..=1).map(move |g| (c, g))).collect();
    let scores: Vec<f64> = grid
        .iter()
        .map(|&(c, g)| {
            let cfg = TrainConfig {
                c: 2f64.powi(c),
                ..base.clone()
            };
            let kernel = KernelParams { gamma: 2f64.powi(g) };
            cross_validate(model_id, x, labels, k, kernel, &cfg, seed).map(|r| r.mean_accuracy)
        })
        .collect::<Result<_, _>>()?;
    let (best, score) = scores.iter().enumerate().fold(
        (0, f64::NEG_INFINITY),
        |acc, (i, &s)| if s > acc.1 { (i, s) } else { acc },
    );
    let (c, g) = grid[best];
    Ok((
        TrainConfig {
            c: 2f64.powi(c),
            ..base.clone()
        },
        KernelParams { gamma: 2f64.powi(g) },
        score,
    ))
}
