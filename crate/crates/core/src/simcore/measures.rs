//! Output distributions and the scalar statistics computed from them.

use crate::error::{Error, Result};
use crate::seeding::rng_from_seed;
use crate::simcore::state::StateVector;
use rand::Rng as _;
use std::collections::BTreeMap;

/// A probability distribution over computational-basis outcomes.
#[derive(Clone, Debug, PartialEq)]
pub struct Distribution {
    probs: Vec<f64>,
}

impl Distribution {
    /// Wrap a probability vector, insisting it is normalized to 1e-10 and
    /// free of negative entries.
    pub fn new(probs: Vec<f64>) -> Result<Self> {
        if probs.is_empty() {
            return Err(Error::InvalidArgument(
                "a distribution needs at least one outcome".into(),
            ));
        }
        if let Some(p) = probs.iter().find(|&&p| !(p >= 0.0)) {
            return Err(Error::InvalidArgument(format!(
                "negative or non-finite probability {p}"
            )));
        }
        let total: f64 = probs.iter().sum();
        if (total - 1.0).abs() > 1e-10 {
            return Err(Error::InvalidArgument(format!(
                "probabilities sum to {total}, expected 1"
            )));
        }
        Ok(Distribution { probs })
    }

    pub fn uniform(len: usize) -> Result<Self> {
        if len == 0 {
            return Err(Error::InvalidArgument(
                "a distribution needs at least one outcome".into(),
            ));
        }
        Ok(Distribution { probs: vec![1.0 / len as f64; len] })
    }

    pub fn point_mass(len: usize, outcome: usize) -> Result<Self> {
        if outcome >= len {
            return Err(Error::InvalidArgument(format!(
                "outcome {outcome} outside a support of {len}"
            )));
        }
        let mut probs = vec![0.0; len];
        probs[outcome] = 1.0;
        Ok(Distribution { probs })
    }

    pub fn probs(&self) -> &[f64] {
        &self.probs
    }

    pub fn len(&self) -> usize {
        self.probs.len()
    }

    pub fn is_empty(&self) -> bool {
        self.probs.is_empty()
    }
}

/// Born probabilities |⟨x|ψ⟩|² of every basis outcome.
pub fn output_distribution(state: &StateVector) -> Distribution {
    Distribution {
        probs: state.amps().iter().map(|a| a.norm_sqr()).collect(),
    }
}

/// Draw `shots` outcomes and tally them, keyed by basis index.  Sampling
/// inverts the cumulative distribution with a binary search per shot.
pub fn sample(distribution: &Distribution, shots: u64, seed: u64) -> BTreeMap<usize, u64> {
    let mut cdf = Vec::with_capacity(distribution.len());
    let mut acc = 0.0;
    for &p in &distribution.probs {
        acc += p;
        cdf.push(acc);
    }
    let mut rng = rng_from_seed(seed);
    let mut counts = BTreeMap::new();
    for _ in 0..shots {
        let u: f64 = rng.gen::<f64>() * acc;
        let idx = cdf.partition_point(|&c| c <= u).min(cdf.len() - 1);
        *counts.entry(idx).or_insert(0) += 1;
    }
    counts
}

/// Turn a tally back into an empirical distribution over `len` outcomes.
pub fn empirical_distribution(counts: &BTreeMap<usize, u64>, len: usize) -> Result<Distribution> {
    let total: u64 = counts.values().sum();
    if total == 0 {
        return Err(Error::DegenerateData("no samples to normalize".into()));
    }
    let mut probs = vec![0.0; len];
    for (&idx, &c) in counts {
        if idx >= len {
            return Err(Error::ShapeMismatch(format!(
                "outcome {idx} outside a support of {len}"
            )));
        }
        probs[idx] = c as f64 / total as f64;
    }
    Distribution::new(probs)
}

/// Collision probability Σ_x p(x)².
pub fn collision_probability(distribution: &Distribution) -> f64 {
    distribution.probs.iter().map(|p| p * p).sum()
}

/// Expected collision probability of a Haar-random n-qubit state,
/// 2/(2^n + 1).
pub fn haar_collision(n_qubits: usize) -> f64 {
    2.0 / ((1u64 << n_qubits) as f64 + 1.0)
}

/// Total-variation distance ½ Σ_x |p(x) − q(x)|.
pub fn total_variation(p: &Distribution, q: &Distribution) -> Result<f64> {
    if p.len() != q.len() {
        return Err(Error::ShapeMismatch(format!(
            "distributions over {} and {} outcomes",
            p.len(),
            q.len()
        )));
    }
    Ok(p.probs
        .iter()
        .zip(&q.probs)
        .map(|(a, b)| (a - b).abs())
        .sum::<f64>()
        / 2.0)
}
