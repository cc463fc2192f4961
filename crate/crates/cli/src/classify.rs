//! Two deliberately simple classifiers over feature rows — Gaussian naive
//! Bayes and an L2-regularized logistic regression — plus the stratified
//! splitting and positive-class F1 scoring they share. Labels are binary
//! (0/1) with 1 as the positive class throughout.

use rand::seq::SliceRandom;
use rand::Rng;

use crate::error::{CliError, Result};

/// Iteration budget and step size for the logistic fit. Fixed rather than
/// adaptive: the point of this classifier is a reproducible baseline, not
/// squeezing out the last percent of accuracy.
const LOGISTIC_ITERATIONS: usize = 500;
const LOGISTIC_STEP: f64 = 0.5;
const LOGISTIC_L2: f64 = 1e-4;

/// Variance floor for naive Bayes, guarding constant features.
const NB_VARIANCE_FLOOR: f64 = 1e-9;

/// Train/test row indices from a stratified split.
#[derive(Debug, Clone)]
pub struct Split {
    pub train: Vec<usize>,
    pub test: Vec<usize>,
}

/// Splits rows into train and test, stratified by label: each class is
/// shuffled separately and contributes `round(proportion · count)` rows to
/// the training side (at least one, at most all but one, so both sides see
/// every class that has two or more members).
///
/// Fails with the degenerate-split error when the training side would hold
/// fewer than two distinct classes or either side would be empty.
pub fn stratified_split<R: Rng + ?Sized>(
    labels: &[u8],
    proportion: f64,
    rng: &mut R,
) -> Result<Split> {
    if !(proportion > 0.0 && proportion < 1.0) {
        return Err(CliError::Usage(format!(
            "training proportion must lie strictly between 0 and 1, got {}",
            proportion
        )));
    }
    let mut by_class: Vec<(u8, Vec<usize>)> = Vec::new();
    for (i, &label) in labels.iter().enumerate() {
        match by_class.iter_mut().find(|(c, _)| *c == label) {
            Some((_, rows)) => rows.push(i),
            None => by_class.push((label, vec![i])),
        }
    }

    let mut train = Vec::new();
    let mut test = Vec::new();
    for (_, rows) in &mut by_class {
        rows.shuffle(rng);
        let take = if rows.len() == 1 {
            1
        } else {
            ((proportion * rows.len() as f64).round() as usize).clamp(1, rows.len() - 1)
        };
        train.extend_from_slice(&rows[..take]);
        test.extend_from_slice(&rows[take..]);
    }

    let mut train_classes: Vec<u8> = train.iter().map(|&i| labels[i]).collect();
    train_classes.sort_unstable();
    train_classes.dedup();
    if train_classes.len() < 2 {
        return Err(CliError::Degenerate(
            "stratified split left fewer than two classes in the training set".into(),
        ));
    }
    if test.is_empty() {
        return Err(CliError::Degenerate(
            "stratified split left the test set empty".into(),
        ));
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok(Split { train, test })
}

/// F1 of the positive class (label 1): harmonic mean of precision and
/// recall, 0 when there are no true positives.
pub fn f1_positive(predicted: &[u8], actual: &[u8]) -> f64 {
    let mut tp = 0usize;
    let mut fp = 0usize;
    let mut fn_ = 0usize;
    for (&p, &a) in predicted.iter().zip(actual) {
        match (p, a) {
            (1, 1) => tp += 1,
            (1, _) => fp += 1,
            (_, 1) => fn_ += 1,
            _ => {}
        }
    }
    if tp == 0 {
        return 0.0;
    }
    let precision = tp as f64 / (tp + fp) as f64;
    let recall = tp as f64 / (tp + fn_) as f64;
    2.0 * precision * recall / (precision + recall)
}

/// Replaces non-finite feature entries by 0 so sentinel-valued columns
/// (a self-comparison's infinite mutual information, a degenerate pair's
/// missing causality) cannot blow up either classifier.
pub fn sanitized(row: &[f64]) -> Vec<f64> {
    row.iter()
        .map(|&v| if v.is_finite() { v } else { 0.0 })
        .collect()
}

struct ClassStats {
    label: u8,
    log_prior: f64,
    mean: Vec<f64>,
    var: Vec<f64>,
}

/// F1 earned on the test rows by predicting one constant class — the
/// no-information baseline the real classifiers have to beat.
pub fn constant_f1(labels: &[u8], test: &[usize], class: u8) -> f64 {
    let predicted = vec![class; test.len()];
    let actual: Vec<u8> = test.iter().map(|&i| labels[i]).collect();
    f1_positive(&predicted, &actual)
}

/// Trains Gaussian naive Bayes on the training rows and returns the F1 of
/// the positive class on the test rows.
pub fn naive_bayes_f1(features: &[Vec<f64>], labels: &[u8], split: &Split) -> f64 {
    let d = features[0].len();

    let mut classes: Vec<u8> = split.train.iter().map(|&i| labels[i]).collect();
    classes.sort_unstable();
    classes.dedup();

    let stats: Vec<ClassStats> = classes
        .iter()
        .map(|&label| {
            let rows: Vec<&Vec<f64>> = split
                .train
                .iter()
                .filter(|&&i| labels[i] == label)
                .map(|&i| &features[i])
                .collect();
            let m = rows.len() as f64;
            let mut mean = vec![0.0; d];
            for row in &rows {
                for (acc, &v) in mean.iter_mut().zip(sanitized(row).iter()) {
                    *acc += v;
                }
            }
            for v in &mut mean {
                *v /= m;
            }
            let mut var = vec![0.0; d];
            for row in &rows {
                for ((acc, &mu), &v) in var.iter_mut().zip(&mean).zip(sanitized(row).iter()) {
                    let dv = v - mu;
                    *acc += dv * dv;
                }
            }
            for v in &mut var {
                *v = (*v / m).max(NB_VARIANCE_FLOOR);
            }
            ClassStats {
                label,
                log_prior: (m / split.train.len() as f64).ln(),
                mean,
                var,
            }
        })
        .collect();

    let predicted: Vec<u8> = split
        .test
        .iter()
        .map(|&i| {
            let x = sanitized(&features[i]);
            stats
                .iter()
                .map(|s| {
                    let mut score = s.log_prior;
                    for ((&xv, &mean), &var) in x.iter().zip(&s.mean).zip(&s.var) {
                        let dv = xv - mean;
                        score -=
                            0.5 * ((2.0 * std::f64::consts::PI * var).ln() + dv * dv / var);
                    }
                    (s.label, score)
                })
                .max_by(|a, b| a.1.partial_cmp(&b.1).expect("finite scores"))
                .expect("at least one class")
                .0
        })
        .collect();

    let actual: Vec<u8> = split.test.iter().map(|&i| labels[i]).collect();
    f1_positive(&predicted, &actual)
}

fn sigmoid(z: f64) -> f64 {
    1.0 / (1.0 + (-z).exp())
}

/// Trains logistic regression (full-batch gradient descent, fixed budget,
/// L2 penalty off the intercept, features standardized by training-set
/// statistics) and returns the positive-class F1 on the test rows.
pub fn logistic_f1(features: &[Vec<f64>], labels: &[u8], split: &Split) -> f64 {
    let d = features[0].len();
    let m = split.train.len() as f64;

    let train: Vec<Vec<f64>> = split.train.iter().map(|&i| sanitized(&features[i])).collect();
    let mut mean = vec![0.0; d];
    for row in &train {
        for (acc, &v) in mean.iter_mut().zip(row) {
            *acc += v;
        }
    }
    for v in &mut mean {
        *v /= m;
    }
    let mut sd = vec![0.0; d];
    for row in &train {
        for ((acc, &mu), &v) in sd.iter_mut().zip(&mean).zip(row) {
            let dv = v - mu;
            *acc += dv * dv;
        }
    }
    for v in &mut sd {
        *v = (*v / m).sqrt().max(1e-9);
    }
    let standardize = |row: &[f64]| -> Vec<f64> {
        row.iter()
            .enumerate()
            .map(|(j, &v)| (v - mean[j]) / sd[j])
            .collect()
    };

    let x: Vec<Vec<f64>> = train.iter().map(|r| standardize(r)).collect();
    let y: Vec<f64> = split.train.iter().map(|&i| f64::from(labels[i])).collect();

    let mut w = vec![0.0; d];
    let mut b = 0.0;
    for _ in 0..LOGISTIC_ITERATIONS {
        let mut gw = vec![0.0; d];
        let mut gb = 0.0;
        for (row, &target) in x.iter().zip(&y) {
            let z = b + row.iter().zip(&w).map(|(xi, wi)| xi * wi).sum::<f64>();
            let err = sigmoid(z) - target;
            for (g, &xi) in gw.iter_mut().zip(row) {
                *g += err * xi;
            }
            gb += err;
        }
        for (wi, g) in w.iter_mut().zip(&gw) {
            *wi -= LOGISTIC_STEP * (g / m + LOGISTIC_L2 * *wi);
        }
        b -= LOGISTIC_STEP * gb / m;
    }

    let predicted: Vec<u8> = split
        .test
        .iter()
        .map(|&i| {
            let row = standardize(&sanitized(&features[i]));
            let z = b + row.iter().zip(&w).map(|(xi, wi)| xi * wi).sum::<f64>();
            u8::from(z >= 0.0)
        })
        .collect();
    let actual: Vec<u8> = split.test.iter().map(|&i| labels[i]).collect();
    f1_positive(&predicted, &actual)
}

#[cfg(test)]
mod tests {
    use super::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;
    use rand_distr::StandardNormal;

    /// Two Gaussian blobs in 3 dimensions, centers `±offset·(1,1,1)`.
    fn blobs(per_class: usize, offset: f64, seed: u64) -> (Vec<Vec<f64>>, Vec<u8>) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let mut features = Vec::new();
        let mut labels = Vec::new();
        for class in [0u8, 1u8] {
            let center = if class == 1 { offset } else { -offset };
            for _ in 0..per_class {
                let row: Vec<f64> = (0..3)
                    .map(|_| center + rng.sample::<f64, _>(StandardNormal))
                    .collect();
                features.push(row);
                labels.push(class);
            }
        }
        (features, labels)
    }

    #[test]
    fn well_separated_blobs_classify_nearly_perfectly() {
        let (features, labels) = blobs(60, 4.0, 11);
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let split = stratified_split(&labels, 0.5, &mut rng).unwrap();
        let nb = naive_bayes_f1(&features, &labels, &split);
        assert!(nb >= 0.99, "naive Bayes F1 = {}", nb);
        let lr = logistic_f1(&features, &labels, &split);
        assert!(lr >= 0.99, "logistic F1 = {}", lr);
        // Both must beat the constant guess on the same test rows.
        let base = constant_f1(&labels, &split.test, 1);
        assert!(nb > base && lr > base);
    }

    #[test]
    fn separable_classes_reach_full_f1_at_modest_training_fractions() {
        // Zero-noise classes: every training fraction from 0.2 up must hit 1.
        let features: Vec<Vec<f64>> = (0..50)
            .map(|i| {
                let v = if i < 25 { -3.0 } else { 3.0 };
                vec![v, 2.0 * v]
            })
            .collect();
        let labels: Vec<u8> = (0..50).map(|i| u8::from(i >= 25)).collect();
        for tenths in 2..=8 {
            let proportion = f64::from(tenths) / 10.0;
            let mut rng = ChaCha8Rng::seed_from_u64(tenths as u64);
            let split = stratified_split(&labels, proportion, &mut rng).unwrap();
            let nb = naive_bayes_f1(&features, &labels, &split);
            assert_eq!(nb, 1.0, "naive Bayes at proportion {}", proportion);
            let lr = logistic_f1(&features, &labels, &split);
            assert_eq!(lr, 1.0, "logistic at proportion {}", proportion);
        }
    }

    #[test]
    fn shuffled_labels_fall_to_the_class_prior_baseline() {
        // Destroying the feature–label link should leave F1 near the value a
        // prior-rate guesser gets (≈ the positive prevalence, 0.5 here).
        let (features, mut labels) = blobs(60, 4.0, 21);
        let mut shuffle_rng = ChaCha8Rng::seed_from_u64(99);
        labels.shuffle(&mut shuffle_rng);

        let mut scores = Vec::new();
        for seed in 0..20 {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let split = stratified_split(&labels, 0.5, &mut rng).unwrap();
            scores.push(naive_bayes_f1(&features, &labels, &split));
        }
        let median = crate::stats::median(&scores).unwrap();
        assert!(
            (median - 0.5).abs() < 0.15,
            "median F1 {} strays from the 0.5 prior baseline",
            median
        );
    }

    #[test]
    fn single_class_input_is_a_degenerate_split() {
        let labels = vec![1u8, 1, 1];
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        let err = stratified_split(&labels, 0.5, &mut rng).unwrap_err();
        assert_eq!(err.exit_code(), 6);
    }

    #[test]
    fn split_is_stratified_and_deterministic() {
        let labels: Vec<u8> = (0..30).map(|i| u8::from(i % 3 == 0)).collect();
        let s1 = stratified_split(&labels, 0.3, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        let s2 = stratified_split(&labels, 0.3, &mut ChaCha8Rng::seed_from_u64(5)).unwrap();
        assert_eq!(s1.train, s2.train);
        assert_eq!(s1.test, s2.test);

        let train_pos = s1.train.iter().filter(|&&i| labels[i] == 1).count();
        assert_eq!(train_pos, 3); // round(0.3 · 10)
        assert_eq!(s1.train.len() + s1.test.len(), 30);
        let mut all: Vec<usize> = s1.train.iter().chain(&s1.test).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..30).collect::<Vec<_>>());
    }

    #[test]
    fn f1_matches_a_hand_worked_confusion_table() {
        // tp=2, fp=1, fn=1 → precision 2/3, recall 2/3, F1 = 2/3.
        let predicted = [1u8, 1, 1, 0, 0];
        let actual = [1u8, 1, 0, 1, 0];
        let f1 = f1_positive(&predicted, &actual);
        assert!((f1 - 2.0 / 3.0).abs() < 1e-12);
        assert_eq!(f1_positive(&[0, 0], &[1, 0]), 0.0);
    }
}
