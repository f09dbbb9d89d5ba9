//! Quantum-reservoir phase classification and the expressivity-gap
//! demonstration.
//!
//! The pipeline: sample low-energy eigenstates of an extended
//! Su–Schrieffer–Heeger chain ([`ssh`]), perturb them by small random
//! rotations, evolve them through one of four Floquet reservoir families
//! ([`floquet`]), estimate per-qubit Z expectations from sampled shots
//! with readout error ([`features`]), and score phase recognition with
//! ridge or k-nearest-neighbor read-outs ([`learn`]).  [`expressivity`]
//! isolates *why* the measurement-driven family helps, with a three-body
//! observable no geometrically local reservoir can resolve in one cycle.

pub mod expressivity;
pub mod features;
pub mod floquet;
pub mod lanczos;
pub mod learn;
pub mod ssh;

pub use expressivity::{expressivity_gap, spaced_triplet, DemoGraph, ExpressivityGap};
pub use features::{
    extract_features, generate_dataset, phase_samples, reservoir_features, DatasetConfig,
    FeatureTable,
};
pub use floquet::{perturb, perturb_with, Axis, PauliTerm, Reservoir, SpreadConvention};
pub use lanczos::{lowest_eigenpairs, LanczosReport};
pub use learn::{class_balanced_split, train_eval, Classifier};
pub use ssh::{
    phase_presets, sample_eigenstates, ssh_eigenstates, LowEnergyBasis, SshSpec, DESK_CAP,
};

use crate::error::{Error, Result};
use crate::grid::checkerboard_layout;
use crate::seeding::derive_seed;
use crate::staircase::build_staircase;
use serde::{Deserialize, Serialize};

/// The four reservoir families of the classification benchmark.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Family {
    Heisenberg,
    TransverseFieldIsing,
    TransverseFieldXy,
    MultibodyXy,
}

impl std::str::FromStr for Family {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "heisenberg" => Ok(Family::Heisenberg),
            "tfi" | "transverse-field-ising" => Ok(Family::TransverseFieldIsing),
            "xy" | "transverse-field-xy" => Ok(Family::TransverseFieldXy),
            "multibody-xy" => Ok(Family::MultibodyXy),
            other => Err(Error::InvalidArgument(format!(
                "unknown reservoir family {other:?}; expected heisenberg, tfi, xy or multibody-xy"
            ))),
        }
    }
}

impl std::fmt::Display for Family {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Family::Heisenberg => "heisenberg",
            Family::TransverseFieldIsing => "tfi",
            Family::TransverseFieldXy => "xy",
            Family::MultibodyXy => "multibody-xy",
        })
    }
}

/// Ring edges, the default desk-scale geometry for the local families.
pub fn ring_edges(n: usize) -> Vec<(usize, usize)> {
    match n {
        0 | 1 => Vec::new(),
        2 => vec![(0, 1)],
        _ => (0..n).map(|i| (i, (i + 1) % n)).collect(),
    }
}

/// Build a reservoir of the given family with defaults matching the
/// benchmark: local families on a ring, the multibody family over one
/// fan-out staircase block on a checkerboard lattice hosting `n` system
/// qubits (so Θ(n) architecture rows).  `feedforward: false` keeps the
/// staircase measurements but drops their corrections; it only affects
/// the multibody family.
pub fn family_reservoir(
    family: Family,
    n: usize,
    tau: f64,
    seed: u64,
    feedforward: bool,
) -> Result<Reservoir> {
    match family {
        Family::Heisenberg => Reservoir::heisenberg(n, &ring_edges(n), tau, seed),
        Family::TransverseFieldIsing => {
            Reservoir::transverse_field_ising(n, &ring_edges(n), tau, seed)
        }
        Family::TransverseFieldXy => Reservoir::transverse_field_xy(n, &ring_edges(n), tau, seed),
        Family::MultibodyXy => {
            if n < 2 {
                return Err(Error::InvalidArgument(format!(
                    "the multibody family needs ≥ 2 system qubits, got {n}"
                )));
            }
            // Checkerboard lattice with n system and n auxiliary sites:
            // the most square factorization of 2n, height at least 2.
            let sites = 2 * n;
            let height = (2..=sites)
                .filter(|h| sites % h == 0 && h * h <= sites)
                .max()
                .unwrap_or(2);
            let layout = checkerboard_layout(sites / height, height)?;
            let window = if n > 6 { 2 } else { 1 };
            let block = build_staircase(
                &layout,
                1,
                window,
                window,
                derive_seed(seed, "staircase", 0),
            )?;
            Reservoir::multibody_from_staircase(
                &block,
                &[Axis::X, Axis::Y],
                tau,
                derive_seed(seed, "couplings", 0),
                feedforward,
            )
        }
    }
}
