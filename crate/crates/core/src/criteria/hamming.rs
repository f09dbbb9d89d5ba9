//! Binomial goodness-of-fit tests for Hamming weights and pairwise
//! distances of architecture matrices.
//!
//! Weights use every row and column.  Pairwise distances are sampled over
//! a random *disjoint* pairing of the rows (respectively columns): a
//! chi-square over all ~m²/2 pairs would treat heavily dependent numbers
//! as independent draws and reject even ideal references — uniformly
//! random invertible matrices — once the matrix is a few hundred rows
//! wide.  Disjoint pairs are genuinely independent under the i.i.d. null,
//! so the 1e−3 threshold means what it says.

use crate::gf2::{BitMatrix, BitVec};
use crate::seeding::{derive_seed, rng_from_seed};
use rand::seq::SliceRandom;
use serde::Serialize;
use statrs::distribution::{Binomial, ChiSquared, ContinuousCDF, Discrete};

/// Fixed seed for the disjoint pairings, so a report is a pure function
/// of its matrix.
const PAIRING_SEED: u64 = 0x48414d4d494e47;

/// Default p-value below which a chi-square comparison is a failure.
pub const DEFAULT_P_THRESHOLD: f64 = 1e-3;

/// One chi-square comparison of an observed histogram against a binomial
/// reference, with tail bins merged until every expected count is ≥ 5.
#[derive(Clone, Copy, Debug, Serialize)]
pub struct ChiSquareTest {
    pub statistic: f64,
    /// Degrees of freedom, i.e. merged bins − 1; zero means the sample was
    /// too small to discriminate and the test is vacuous.
    pub dof: usize,
    pub p_value: f64,
}

impl ChiSquareTest {
    pub fn pass(&self, p_threshold: f64) -> bool {
        self.p_value >= p_threshold
    }
}

/// Histograms and chi-square verdicts for the combinatorial requirement:
/// row/column Hamming weights against Binomial(n, ½)/Binomial(s, ½), and
/// pairwise row/column distances against the same laws.
#[derive(Clone, Debug, Serialize)]
pub struct HammingReport {
    pub row_weights: ChiSquareTest,
    pub col_weights: ChiSquareTest,
    pub row_distances: ChiSquareTest,
    pub col_distances: ChiSquareTest,
    /// Count of rows per Hamming weight 0..=n.
    pub row_weight_histogram: Vec<u64>,
    /// Count of columns per Hamming weight 0..=s.
    pub col_weight_histogram: Vec<u64>,
    /// Distances of the ⌊s/2⌋ disjointly paired rows, per distance 0..=n.
    pub row_distance_histogram: Vec<u64>,
    /// Distances of the ⌊n/2⌋ disjointly paired columns, per distance 0..=s.
    pub col_distance_histogram: Vec<u64>,
}

impl HammingReport {
    pub fn rows_pass(&self) -> bool {
        self.row_weights.pass(DEFAULT_P_THRESHOLD)
    }

    pub fn cols_pass(&self) -> bool {
        self.col_weights.pass(DEFAULT_P_THRESHOLD)
    }

    pub fn pairwise_pass(&self) -> bool {
        self.row_distances.pass(DEFAULT_P_THRESHOLD)
            && self.col_distances.pass(DEFAULT_P_THRESHOLD)
    }
}

fn weight_histogram(rows: &[BitVec], length: usize) -> Vec<u64> {
    let mut hist = vec![0u64; length + 1];
    for r in rows {
        hist[r.count_ones()] += 1;
    }
    hist
}

fn distance_histogram(rows: &[BitVec], length: usize, label: &str) -> Vec<u64> {
    let mut order: Vec<usize> = (0..rows.len()).collect();
    order.shuffle(&mut rng_from_seed(derive_seed(PAIRING_SEED, label, rows.len() as u64)));
    let mut hist = vec![0u64; length + 1];
    for pair in order.chunks_exact(2) {
        let d = rows[pair[0]].hamming_distance(&rows[pair[1]]).expect("equal lengths");
        hist[d] += 1;
    }
    hist
}

/// Chi-square statistic of `hist` against Binomial(hist.len()−1, ½),
/// merging bins from the left so every merged bin expects ≥ 5 counts.
fn chi_square_binomial(hist: &[u64]) -> ChiSquareTest {
    let trials = hist.len() - 1;
    let samples: u64 = hist.iter().sum();
    let reference = Binomial::new(0.5, trials as u64).expect("valid binomial");
    let mut merged: Vec<(f64, f64)> = Vec::new(); // (observed, expected)
    let (mut obs_acc, mut exp_acc) = (0.0, 0.0);
    for (k, &count) in hist.iter().enumerate() {
        obs_acc += count as f64;
        exp_acc += samples as f64 * reference.pmf(k as u64);
        if exp_acc >= 5.0 {
            merged.push((obs_acc, exp_acc));
            obs_acc = 0.0;
            exp_acc = 0.0;
        }
    }
    // Fold the remaining tail into the last bin so totals agree.
    if exp_acc > 0.0 || obs_acc > 0.0 {
        if let Some(last) = merged.last_mut() {
            last.0 += obs_acc;
            last.1 += exp_acc;
        } else {
            merged.push((obs_acc, exp_acc));
        }
    }
    if merged.len() < 2 {
        return ChiSquareTest { statistic: 0.0, dof: 0, p_value: 1.0 };
    }
    let statistic: f64 = merged
        .iter()
        .map(|&(o, e)| (o - e).powi(2) / e)
        .sum();
    let dof = merged.len() - 1;
    let p_value = 1.0 - ChiSquared::new(dof as f64).expect("dof ≥ 1").cdf(statistic);
    ChiSquareTest { statistic, dof, p_value }
}

/// Compare the Hamming-weight and pairwise-distance statistics of `a`
/// against the binomial laws an i.i.d. uniform matrix would follow.
pub fn hamming_statistics(a: &BitMatrix) -> HammingReport {
    let (s, n) = (a.rows(), a.cols());
    let rows: Vec<BitVec> = (0..s).map(|i| a.row(i)).collect();
    let transposed = a.transpose();
    let cols: Vec<BitVec> = (0..n).map(|j| transposed.row(j)).collect();

    let row_weight_histogram = weight_histogram(&rows, n);
    let col_weight_histogram = weight_histogram(&cols, s);
    let row_distance_histogram = distance_histogram(&rows, n, "rows");
    let col_distance_histogram = distance_histogram(&cols, s, "cols");

    HammingReport {
        row_weights: chi_square_binomial(&row_weight_histogram),
        col_weights: chi_square_binomial(&col_weight_histogram),
        row_distances: chi_square_binomial(&row_distance_histogram),
        col_distances: chi_square_binomial(&col_distance_histogram),
        row_weight_histogram,
        col_weight_histogram,
        row_distance_histogram,
        col_distance_histogram,
    }
}
