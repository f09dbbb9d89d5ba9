//! Shot-sampled local read-out and the phase-classification dataset
//! pipeline.
//!
//! Read-out follows the experimental procedure rather than quoting exact
//! expectations: bitstrings are sampled from the evolved state, each bit
//! is flipped independently with the readout error probability, and the
//! per-qubit Z expectations are estimated from the flipped counts.

use crate::error::{Error, Result};
use crate::reservoir::floquet::{perturb, Reservoir};
use crate::reservoir::ssh::{phase_presets, sample_eigenstates, ssh_eigenstates, SshSpec};
use crate::seeding::{derive_seed, rng_from_seed};
use crate::simcore::{output_distribution, sample, StateVector};
use rand::distributions::Distribution as _;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use statrs::distribution::Binomial;

/// Estimate the per-qubit Z expectations of a state from `shots` sampled
/// bitstrings, each bit flipped independently with probability
/// `readout_error`.
pub fn extract_features(
    state: &StateVector,
    shots: u64,
    readout_error: f64,
    seed: u64,
) -> Result<Vec<f64>> {
    if shots == 0 {
        return Err(Error::InvalidArgument("at least one shot required".into()));
    }
    if !(0.0..=0.5).contains(&readout_error) {
        return Err(Error::InvalidArgument(format!(
            "readout flip probability must lie in [0, 0.5], got {readout_error}"
        )));
    }
    let n = state.n_qubits();
    let counts = sample(&output_distribution(state), shots, derive_seed(seed, "shots", 0));
    let mut rng = rng_from_seed(derive_seed(seed, "readout", 0));
    let mut sums = vec![0i64; n];
    for (outcome, count) in counts {
        for (q, slot) in sums.iter_mut().enumerate() {
            // Of `count` shots, a Binomial(count, ε) number of reads of
            // this bit flip; flips are independent across shots and
            // qubits, so batching them per (outcome, qubit) is exact.
            let flipped = if readout_error > 0.0 {
                Binomial::new(readout_error, count)
                    .expect("validated probability")
                    .sample(&mut rng) as i64
            } else {
                0
            };
            let sign = if outcome >> q & 1 == 0 { 1 } else { -1 };
            *slot += sign * (count as i64 - 2 * flipped);
        }
    }
    Ok(sums.into_iter().map(|s| s as f64 / shots as f64).collect())
}

/// Labeled shot-estimated features for every sample at every recorded
/// cycle.  `features[c][s]` is the n-vector of sample `s` after cycle
/// `c + 1`; `labels[s]` indexes into `classes`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct FeatureTable {
    pub n: usize,
    pub features: Vec<Vec<Vec<f64>>>,
    pub labels: Vec<usize>,
    pub classes: Vec<String>,
}

impl FeatureTable {
    pub fn cycles(&self) -> usize {
        self.features.len()
    }

    /// Feature matrix recorded after cycle `c + 1` (zero-based index).
    pub fn at_cycle(&self, c: usize) -> Result<(&[Vec<f64>], &[usize])> {
        let rows = self.features.get(c).ok_or_else(|| {
            Error::InvalidArgument(format!(
                "cycle index {c} out of range: {} recorded",
                self.features.len()
            ))
        })?;
        Ok((rows, &self.labels))
    }

    /// CSV rendering: `sample,cycle,f1..fn,label`.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("sample,cycle");
        for q in 1..=self.n {
            out.push_str(&format!(",f{q}"));
        }
        out.push_str(",label\n");
        for (c, rows) in self.features.iter().enumerate() {
            for (s, row) in rows.iter().enumerate() {
                out.push_str(&format!("{s},{}", c + 1));
                for v in row {
                    out.push_str(&format!(",{v:.6}"));
                }
                out.push_str(&format!(",{}\n", self.classes[self.labels[s]]));
            }
        }
        out
    }
}

/// Dataset generation parameters; the defaults mirror the desk-scale
/// benchmark (n = 8, 150 samples per class, lowest 20 levels, variance
/// 0.03 input perturbations, 8192 shots with 0.5% readout flips).
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DatasetConfig {
    pub n: usize,
    pub samples_per_class: usize,
    pub levels: usize,
    pub perturbation: f64,
    pub cycles: usize,
    pub shots: u64,
    pub readout_error: f64,
    pub seed: u64,
}

impl Default for DatasetConfig {
    fn default() -> Self {
        Self {
            n: 8,
            samples_per_class: 150,
            levels: 20,
            perturbation: 0.03,
            cycles: 10,
            shots: 8192,
            readout_error: 5e-3,
            seed: 0,
        }
    }
}

/// Draw the labeled input states: per phase, eigenstates sampled
/// uniformly from the lowest levels, each perturbed by small random
/// single-qubit rotations.
pub fn phase_samples(
    cfg: &DatasetConfig,
    phases: &[(String, SshSpec)],
) -> Result<(Vec<StateVector>, Vec<usize>, Vec<String>)> {
    if phases.len() < 2 {
        return Err(Error::InvalidArgument(format!(
            "need at least two phases to classify, got {}",
            phases.len()
        )));
    }
    let mut states = Vec::with_capacity(phases.len() * cfg.samples_per_class);
    let mut labels = Vec::with_capacity(phases.len() * cfg.samples_per_class);
    let mut classes = Vec::with_capacity(phases.len());
    for (class, (name, spec)) in phases.iter().enumerate() {
        if spec.n != cfg.n {
            return Err(Error::ShapeMismatch(format!(
                "phase {name} has n = {}, dataset wants {}",
                spec.n, cfg.n
            )));
        }
        let basis = ssh_eigenstates(spec, cfg.levels, derive_seed(cfg.seed, "eig", class as u64))?;
        let mut drawn = sample_eigenstates(
            &basis,
            cfg.samples_per_class,
            derive_seed(cfg.seed, "draw", class as u64),
        );
        for (k, state) in drawn.iter_mut().enumerate() {
            perturb(
                state,
                cfg.perturbation,
                derive_seed(cfg.seed, "perturb", (class * cfg.samples_per_class + k) as u64),
            )?;
            labels.push(class);
        }
        states.append(&mut drawn);
        classes.push(name.clone());
    }
    Ok((states, labels, classes))
}

/// Evolve every input through the reservoir and record shot-estimated
/// features after each cycle.  Samples evolve independently and in
/// parallel.
pub fn reservoir_features(
    reservoir: &Reservoir,
    inputs: &[StateVector],
    labels: &[usize],
    classes: &[String],
    cycles: usize,
    shots: u64,
    readout_error: f64,
    seed: u64,
) -> Result<FeatureTable> {
    if inputs.len() != labels.len() {
        return Err(Error::ShapeMismatch(format!(
            "{} states but {} labels",
            inputs.len(),
            labels.len()
        )));
    }
    if cycles == 0 {
        return Err(Error::InvalidArgument("at least one cycle required".into()));
    }
    let per_sample: Vec<Vec<Vec<f64>>> = inputs
        .par_iter()
        .enumerate()
        .map(|(s, input)| {
            let mut state = input.clone();
            let mut rng = rng_from_seed(derive_seed(seed, "kicks", s as u64));
            let mut rows = Vec::with_capacity(cycles);
            for c in 0..cycles {
                reservoir.floquet_step(&mut state, &mut rng)?;
                rows.push(extract_features(
                    &state,
                    shots,
                    readout_error,
                    derive_seed(seed, "readout", (s * cycles + c) as u64),
                )?);
            }
            Ok(rows)
        })
        .collect::<Result<_>>()?;
    let features = (0..cycles)
        .map(|c| per_sample.iter().map(|rows| rows[c].clone()).collect())
        .collect();
    Ok(FeatureTable {
        n: reservoir.n,
        features,
        labels: labels.to_vec(),
        classes: classes.to_vec(),
    })
}

/// End-to-end dataset: default phase presets → sampled/perturbed inputs
/// → reservoir evolution → per-cycle feature tables.
pub fn generate_dataset(cfg: &DatasetConfig, reservoir: &Reservoir) -> Result<FeatureTable> {
    let phases = phase_presets(cfg.n)?;
    let (states, labels, classes) = phase_samples(cfg, &phases)?;
    reservoir_features(
        reservoir,
        &states,
        &labels,
        &classes,
        cfg.cycles,
        cfg.shots,
        cfg.readout_error,
        derive_seed(cfg.seed, "features", 0),
    )
}
