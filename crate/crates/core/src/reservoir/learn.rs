//! Read-out classifiers for the phase-recognition task: one-hot ridge
//! regression and k-nearest neighbors, evaluated on a class-balanced
//! train/test split with train-set-only standardization.

use crate::error::{Error, Result};
use crate::seeding::rng_from_seed;
use nalgebra::DMatrix;
use rand::seq::SliceRandom as _;
use serde::{Deserialize, Serialize};

/// Supported read-out models.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub enum Classifier {
    /// One-hot linear regression with L2 penalty `lambda` (bias term
    /// unpenalized); predicts the argmax output.
    Ridge { lambda: f64 },
    /// Majority vote among the `k` nearest training points (Euclidean
    /// distance in standardized feature space); ties break toward the
    /// lowest class index.
    Knn { k: usize },
}

impl Classifier {
    pub fn ridge() -> Self {
        Classifier::Ridge { lambda: 1e-3 }
    }

    pub fn knn() -> Self {
        Classifier::Knn { k: 21 }
    }
}

/// Class-balanced split: within each class the samples are shuffled and
/// the first `train_fraction` of them (at least one, and at least one
/// held out) go to training.
pub fn class_balanced_split(
    labels: &[usize],
    train_fraction: f64,
    seed: u64,
) -> Result<(Vec<usize>, Vec<usize>)> {
    if !(train_fraction > 0.0 && train_fraction < 1.0) {
        return Err(Error::InvalidArgument(format!(
            "train fraction must lie strictly between 0 and 1, got {train_fraction}"
        )));
    }
    let n_classes = labels.iter().copied().max().map_or(0, |m| m + 1);
    let mut per_class: Vec<Vec<usize>> = vec![Vec::new(); n_classes];
    for (i, &l) in labels.iter().enumerate() {
        per_class[l].push(i);
    }
    let mut rng = rng_from_seed(seed);
    let mut train = Vec::new();
    let mut test = Vec::new();
    for members in per_class.iter_mut() {
        if members.is_empty() {
            continue;
        }
        if members.len() < 2 {
            return Err(Error::DegenerateData(format!(
                "class {} has a single sample; cannot both train and test on it",
                labels[members[0]]
            )));
        }
        members.shuffle(&mut rng);
        let cut = ((members.len() as f64 * train_fraction).floor() as usize)
            .clamp(1, members.len() - 1);
        train.extend_from_slice(&members[..cut]);
        test.extend_from_slice(&members[cut..]);
    }
    train.sort_unstable();
    test.sort_unstable();
    Ok((train, test))
}

/// Per-feature affine map fitted on the training rows (zero-variance
/// features pass through unscaled).
fn standardizer(rows: &[&[f64]]) -> (Vec<f64>, Vec<f64>) {
    let d = rows[0].len();
    let m = rows.len() as f64;
    let mut mean = vec![0.0; d];
    for r in rows {
        for (s, v) in mean.iter_mut().zip(*r) {
            *s += v;
        }
    }
    mean.iter_mut().for_each(|s| *s /= m);
    let mut std = vec![0.0; d];
    for r in rows {
        for ((s, v), mu) in std.iter_mut().zip(*r).zip(&mean) {
            *s += (v - mu).powi(2);
        }
    }
    for s in std.iter_mut() {
        *s = (*s / m).sqrt();
        if *s < 1e-12 {
            *s = 1.0;
        }
    }
    (mean, std)
}

fn standardize(row: &[f64], mean: &[f64], std: &[f64]) -> Vec<f64> {
    row.iter().zip(mean).zip(std).map(|((v, mu), s)| (v - mu) / s).collect()
}

fn ridge_predict(
    train_x: &[Vec<f64>],
    train_y: &[usize],
    test_x: &[Vec<f64>],
    n_classes: usize,
    lambda: f64,
) -> Result<Vec<usize>> {
    let m = train_x.len();
    let d = train_x[0].len() + 1;
    let x = DMatrix::from_fn(m, d, |r, c| if c < d - 1 { train_x[r][c] } else { 1.0 });
    let y = DMatrix::from_fn(m, n_classes, |r, c| if train_y[r] == c { 1.0 } else { 0.0 });
    let mut gram = x.transpose() * &x;
    for i in 0..d - 1 {
        gram[(i, i)] += lambda;
    }
    let w = gram
        .lu()
        .solve(&(x.transpose() * y))
        .ok_or_else(|| Error::DegenerateData("ridge normal equations are singular".into()))?;
    Ok(test_x
        .iter()
        .map(|row| {
            (0..n_classes)
                .map(|c| {
                    let score: f64 =
                        row.iter().enumerate().map(|(j, v)| v * w[(j, c)]).sum::<f64>()
                            + w[(d - 1, c)];
                    (c, score)
                })
                .max_by(|a, b| a.1.partial_cmp(&b.1).unwrap())
                .map(|(c, _)| c)
                .unwrap_or(0)
        })
        .collect())
}

fn knn_predict(
    train_x: &[Vec<f64>],
    train_y: &[usize],
    test_x: &[Vec<f64>],
    n_classes: usize,
    k: usize,
) -> Vec<usize> {
    let k = k.max(1).min(train_x.len());
    test_x
        .iter()
        .map(|row| {
            let mut dist: Vec<(f64, usize)> = train_x
                .iter()
                .zip(train_y)
                .map(|(t, &l)| {
                    (row.iter().zip(t).map(|(a, b)| (a - b).powi(2)).sum::<f64>(), l)
                })
                .collect();
            dist.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            let mut votes = vec![0usize; n_classes];
            for &(_, l) in dist.iter().take(k) {
                votes[l] += 1;
            }
            let best = *votes.iter().max().unwrap();
            votes.iter().position(|&v| v == best).unwrap()
        })
        .collect()
}

/// Split, standardize on the training statistics, fit, and return the
/// held-out accuracy.
pub fn train_eval(
    features: &[Vec<f64>],
    labels: &[usize],
    classifier: &Classifier,
    train_fraction: f64,
    seed: u64,
) -> Result<f64> {
    if features.len() != labels.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} feature rows but {} labels",
            features.len(),
            labels.len()
        )));
    }
    if features.is_empty() {
        return Err(Error::DegenerateData("no samples".into()));
    }
    let d = features[0].len();
    if d == 0 || features.iter().any(|r| r.len() != d) {
        return Err(Error::ShapeMismatch("ragged or empty feature rows".into()));
    }
    let n_classes = labels.iter().copied().max().unwrap() + 1;
    let mut present = vec![false; n_classes];
    labels.iter().for_each(|&l| present[l] = true);
    if present.iter().filter(|&&p| p).count() < 2 {
        return Err(Error::DegenerateData(
            "single-class data: nothing to classify".into(),
        ));
    }
    let (train, test) = class_balanced_split(labels, train_fraction, seed)?;
    let train_rows: Vec<&[f64]> = train.iter().map(|&i| features[i].as_slice()).collect();
    let (mean, std) = standardizer(&train_rows);
    let train_x: Vec<Vec<f64>> =
        train.iter().map(|&i| standardize(&features[i], &mean, &std)).collect();
    let test_x: Vec<Vec<f64>> =
        test.iter().map(|&i| standardize(&features[i], &mean, &std)).collect();
    let train_y: Vec<usize> = train.iter().map(|&i| labels[i]).collect();
    let predictions = match classifier {
        Classifier::Ridge { lambda } => {
            if !(*lambda >= 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "ridge penalty must be ≥ 0, got {lambda}"
                )));
            }
            ridge_predict(&train_x, &train_y, &test_x, n_classes, *lambda)?
        }
        Classifier::Knn { k } => {
            if *k == 0 {
                return Err(Error::InvalidArgument("k must be positive".into()));
            }
            knn_predict(&train_x, &train_y, &test_x, n_classes, *k)
        }
    };
    let correct = predictions
        .iter()
        .zip(test.iter().map(|&i| labels[i]))
        .filter(|(p, t)| **p == *t)
        .count();
    Ok(correct as f64 / test.len() as f64)
}
