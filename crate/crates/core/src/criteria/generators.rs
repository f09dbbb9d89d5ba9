//! Architecture-matrix generators for the randomness comparison: fan-out
//! staircases with auxiliary measurements versus plain CX circuits, each
//! under grid or all-to-all connectivity.
//!
//! A circuit whose CX network acts as the invertible map `F` on system
//! qubits turns a layer of per-qubit Z rotations placed at its input into
//! the phase-state architecture `F⁻¹`: rotation `j` picks up the support
//! with which qubit `j`'s input parity is reconstructed from the output.
//! These builders return exactly that matrix, so no state vector is ever
//! involved and sizes of a few thousand qubits stay cheap.

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use crate::grid::system_grid;
use crate::seeding::rng_from_seed;
use crate::staircase::{build_staircase, build_staircase_all_to_all};
use rand::seq::SliceRandom;
use rand::Rng;
use serde::{Deserialize, Serialize};

/// Two-qubit gate connectivity available to a generator.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Connectivity {
    Grid,
    AllToAll,
}

/// Circuit family producing the architecture.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum GeneratorKind {
    /// Random CX circuits with no auxiliary qubits; `depth` counts
    /// two-qubit gate layers.
    AncillaFree,
    /// Measurement-driven fan-out staircases with recycled auxiliaries;
    /// `depth` counts staircase paths 𝔇 (4𝔇 two-qubit layers).
    MeasurementDriven,
}

/// Factor `n` as width×height with the most square shape available.
pub(crate) fn near_square(n: usize) -> (usize, usize) {
    let mut w = (n as f64).sqrt() as usize;
    while w > 1 && n % w != 0 {
        w -= 1;
    }
    (w.max(1), n / w.max(1))
}

/// Architecture of a fan-out staircase block with window parameters
/// r1 = r2 = 1: the inverse of its forward system map.
pub fn measurement_driven_architecture(
    connectivity: Connectivity,
    n: usize,
    depth: usize,
    seed: u64,
) -> Result<BitMatrix> {
    let block = match connectivity {
        Connectivity::Grid => {
            let (w, h) = near_square(n);
            build_staircase(&system_grid(w, h)?, depth, 1, 1, seed)?
        }
        Connectivity::AllToAll => build_staircase_all_to_all(n, depth, 1, 1, seed)?,
    };
    block.system_map.inverse()
}

/// Architecture of a `depth`-layer random CX circuit without auxiliary
/// qubits: each layer is a random maximal matching of the connectivity
/// graph with random gate orientations.
pub fn ancilla_free_architecture(
    connectivity: Connectivity,
    n: usize,
    depth: usize,
    seed: u64,
) -> Result<BitMatrix> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "a CX circuit needs at least 2 qubits, got {n}"
        )));
    }
    if depth == 0 {
        return Err(Error::InvalidArgument("circuit depth must be at least 1".into()));
    }
    let mut rng = rng_from_seed(seed);
    let mut forward = BitMatrix::identity(n);
    match connectivity {
        Connectivity::Grid => {
            let (w, h) = near_square(n);
            let mut edges: Vec<(usize, usize)> = Vec::new();
            for y in 0..h {
                for x in 0..w {
                    let q = y * w + x;
                    if x + 1 < w {
                        edges.push((q, q + 1));
                    }
                    if y + 1 < h {
                        edges.push((q, q + w));
                    }
                }
            }
            for _ in 0..depth {
                edges.shuffle(&mut rng);
                let mut busy = vec![false; n];
                for &(a, b) in &edges {
                    if busy[a] || busy[b] {
                        continue;
                    }
                    busy[a] = true;
                    busy[b] = true;
                    let (c, t) = if rng.gen::<bool>() { (a, b) } else { (b, a) };
                    forward.xor_row(t, c);
                }
            }
        }
        Connectivity::AllToAll => {
            let mut order: Vec<usize> = (0..n).collect();
            for _ in 0..depth {
                order.shuffle(&mut rng);
                for pair in order.chunks_exact(2) {
                    forward.xor_row(pair[1], pair[0]);
                }
            }
        }
    }
    forward.inverse()
}

/// Dispatch on the generator kind; `depth` follows each family's own
/// depth convention (gate layers versus staircase paths).
pub fn architecture(
    kind: GeneratorKind,
    connectivity: Connectivity,
    n: usize,
    depth: usize,
    seed: u64,
) -> Result<BitMatrix> {
    match kind {
        GeneratorKind::AncillaFree => ancilla_free_architecture(connectivity, n, depth, seed),
        GeneratorKind::MeasurementDriven => {
            measurement_driven_architecture(connectivity, n, depth, seed)
        }
    }
}

/// Two-qubit layer count of one generator depth unit, used to compare the
/// families at matched physical depth.
pub fn two_qubit_layers(kind: GeneratorKind, depth: usize) -> usize {
    match kind {
        GeneratorKind::AncillaFree => depth,
        GeneratorKind::MeasurementDriven => 4 * depth,
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn near_square_prefers_balanced_factors() {
        assert_eq!(near_square(36), (6, 6));
        assert_eq!(near_square(100), (10, 10));
        assert_eq!(near_square(12), (3, 4));
        assert_eq!(near_square(7), (1, 7));
    }

    #[test]
    fn architectures_are_invertible_and_seeded() {
        for (kind, conn) in [
            (GeneratorKind::AncillaFree, Connectivity::Grid),
            (GeneratorKind::AncillaFree, Connectivity::AllToAll),
            (GeneratorKind::MeasurementDriven, Connectivity::Grid),
            (GeneratorKind::MeasurementDriven, Connectivity::AllToAll),
        ] {
            let a = architecture(kind, conn, 16, 2, 5).unwrap();
            assert_eq!(a.rows(), 16);
            assert!(a.is_invertible(), "{kind:?}/{conn:?}");
            let b = architecture(kind, conn, 16, 2, 5).unwrap();
            assert_eq!(a, b, "{kind:?}/{conn:?} not reproducible");
            let c = architecture(kind, conn, 16, 2, 6).unwrap();
            assert_ne!(a, c, "{kind:?}/{conn:?} ignores the seed");
        }
    }

    #[test]
    fn shallow_local_circuits_have_confined_supports() {
        // Depth-2 nearest-neighbor CX on a 6×6 grid: every row of the
        // architecture stays inside the reverse light cone of radius 2.
        let a = ancilla_free_architecture(Connectivity::Grid, 36, 2, 9).unwrap();
        for q in 0..36 {
            let (qx, qy) = (q % 6, q / 6);
            for j in a.row(q).support() {
                let (jx, jy) = (j % 6, j / 6);
                let dist = qx.abs_diff(jx) + qy.abs_diff(jy);
                assert!(dist <= 2, "row {q} reaches {j} at distance {dist}");
            }
        }
    }

    #[test]
    fn staircase_architectures_spread_far_beyond_the_light_cone() {
        let a = measurement_driven_architecture(Connectivity::Grid, 36, 1, 2).unwrap();
        let max_weight = (0..36).map(|q| a.row(q).count_ones()).max().unwrap();
        assert!(
            max_weight > 8,
            "fan-out rows should exceed any depth-4 light cone, widest is {max_weight}"
        );
    }
}
