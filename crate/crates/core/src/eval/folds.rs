use std::collections::BTreeMap;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use super::EvalError;

/// Fold index per example.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct FoldAssignment {
    pub k: usize,
    pub fold_of: Vec<usize>,
}

impl FoldAssignment {
    pub fn test_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len()).filter(|&i| self.fold_of[i] == fold).collect()
    }

    pub fn train_indices(&self, fold: usize) -> Vec<usize> {
        (0..self.fold_of.len()).filter(|&i| self.fold_of[i] != fold).collect()
    }
}

fn indices_by_class(labels: &[String]) -> BTreeMap<&str, Vec<usize>> {
    let mut by_class: BTreeMap<&str, Vec<usize>> = BTreeMap::new();
    for (i, l) in labels.iter().enumerate() {
        by_class.entry(l.as_str()).or_default().push(i);
    }
    by_class
}

/// Seeded stratified partition into `k` folds.
///
/// Each class is shuffled and dealt round-robin, continuing where the
/// previous class stopped, so both per-class and total fold sizes differ by
/// at most one.
pub fn stratified_kfold(labels: &[String], k: usize, seed: u64) -> Result<FoldAssignment, EvalError> {
    if k < 2 {
        return Err(EvalError::InvalidK(k));
    }
    let by_class = indices_by_class(labels);
    if let Some((class, idx)) = by_class.iter().find(|(_, idx)| idx.len() < k) {
        return Err(EvalError::TooFewPerClass {
            class: class.to_string(),
            count: idx.len(),
            k,
        });
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut fold_of = vec![0; labels.len()];
    let mut next = 0usize;
    for mut idx in by_class.into_values() {
        idx.shuffle(&mut rng);
        for i in idx {
            fold_of[i] = next % k;
            next += 1;
        }
    }
    Ok(FoldAssignment { k, fold_of })
}

/// Seeded stratified train/test split; returns `(train, test)` indices in
/// ascending order. Every class keeps at least one training example.
pub fn stratified_holdout(
    labels: &[String],
    test_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>), EvalError> {
    if !(test_fraction > 0.0 && test_fraction < 1.0) {
        return Err(EvalError::InvalidSplit(test_fraction));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for (class, mut idx) in indices_by_class(labels) {
        if idx.len() < 2 {
            return Err(EvalError::TooFewPerClass {
                class: class.to_string(),
                count: idx.len(),
                k: 2,
            });
        }
        idx.shuffle(&mut rng);
        let n_test = ((idx.len() as f64 * test_fraction).round() as usize).clamp(1, idx.len() - 1);
        test.extend_from_slice(&idx[..n_test]);
        train.extend_from_slice(&idx[n_test..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn labels(spec: &[(&str, usize)]) -> Vec<String> {
        spec.iter()
            .flat_map(|(l, n)| std::iter::repeat_n(l.to_string(), *n))
            .collect()
    }

    #[test]
    fn single_class_ten_into_five() {
        let f = stratified_kfold(&labels(&[("a", 10)]), 5, 1).unwrap();
        for fold in 0..5 {
            assert_eq!(f.test_indices(fold).len(), 2);
        }
        let mut all: Vec<usize> = (0..5).flat_map(|k| f.test_indices(k)).collect();
        all.sort_unstable();
        assert_eq!(all, (0..10).collect::<Vec<_>>());
    }

    #[test]
    fn two_classes_balanced() {
        let l = labels(&[("a", 10), ("b", 10)]);
        let f = stratified_kfold(&l, 5, 7).unwrap();
        for fold in 0..5 {
            let test = f.test_indices(fold);
            assert_eq!(test.iter().filter(|&&i| l[i] == "a").count(), 2);
            assert_eq!(test.iter().filter(|&&i| l[i] == "b").count(), 2);
        }
    }

    #[test]
    fn deterministic_given_seed() {
        let l = labels(&[("a", 13), ("b", 9), ("c", 21)]);
        assert_eq!(stratified_kfold(&l, 4, 3).unwrap(), stratified_kfold(&l, 4, 3).unwrap());
    }

    #[test]
    fn too_few_per_class() {
        let l = labels(&[("a", 10), ("b", 3)]);
        assert!(matches!(
            stratified_kfold(&l, 5, 0),
            Err(EvalError::TooFewPerClass { count: 3, .. })
        ));
        assert!(matches!(stratified_kfold(&l, 1, 0), Err(EvalError::InvalidK(1))));
    }

    #[test]
    fn holdout_quarter() {
        let l = labels(&[("a", 100), ("b", 100), ("c", 100)]);
        let (train, test) = stratified_holdout(&l, 0.25, 5).unwrap();
        assert_eq!(test.len(), 75);
        assert_eq!(train.len(), 225);
        assert_eq!(test.iter().filter(|&&i| l[i] == "b").count(), 25);
    }
}
