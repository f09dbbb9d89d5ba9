//! Effective IQP description of rotation layers interleaved with fan-out
//! staircase blocks.
//!
//! A Z rotation applied between staircase blocks acts, in the output frame
//! of the full circuit, like a many-body Z rotation whose support is the
//! image of the qubit's unit vector under the composed conjugation maps of
//! every later block.  Collecting one row per (layer, qubit) pair yields a
//! phase-state architecture `A` with angle vector `θ`: the circuit's
//! output distribution equals that of `H^{⊗n} |ψ_{A,θ}⟩` measured in the
//! computational basis.

use crate::error::{Error, Result};
use crate::gf2::{BitMatrix, BitVec};
use crate::staircase::build::FanoutStaircase;
use crate::staircase::transfer::TransferMatrix;
use serde::de::Error as _;
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use std::f64::consts::{FRAC_PI_2, TAU};

/// Reduce to the canonical interval [0, 2π).
pub(crate) fn canonical_angle(x: f64) -> f64 {
    let y = x.rem_euclid(TAU);
    if y >= TAU {
        0.0
    } else {
        y
    }
}

/// A Hamiltonian phase-state description: `architecture` has one row per
/// Z-type term, `angles[t]` is the term's rotation angle in [0, 2π).  The
/// prepared state is `2^{-n/2} Σ_x exp(i Σ_t θ_t (-1)^{A_t·x}) |x⟩` times
/// `exp(i·global_phase)`, which absorbs any pruned all-zero rows.
#[derive(Clone, Debug, PartialEq)]
pub struct IqpSpec {
    pub architecture: BitMatrix,
    pub angles: Vec<f64>,
    pub global_phase: f64,
}

impl IqpSpec {
    /// Canonicalize angles and prune all-zero architecture rows, folding
    /// their angles into the global phase.
    pub fn new(architecture: BitMatrix, angles: Vec<f64>) -> Result<Self> {
        if architecture.rows() != angles.len() {
            return Err(Error::ShapeMismatch(format!(
                "{} architecture rows vs {} angles",
                architecture.rows(),
                angles.len()
            )));
        }
        let mut rows: Vec<BitVec> = Vec::with_capacity(architecture.rows());
        let mut kept_angles = Vec::with_capacity(angles.len());
        let mut global_phase = 0.0;
        for (r, angle) in angles.iter().enumerate() {
            if architecture.is_zero_row(r) {
                global_phase += angle;
            } else {
                rows.push(architecture.row(r));
                kept_angles.push(canonical_angle(*angle));
            }
        }
        let kept = if rows.is_empty() {
            BitMatrix::zeros(0, architecture.cols())
        } else {
            BitMatrix::from_rows(&rows)?
        };
        Ok(IqpSpec {
            architecture: kept,
            angles: kept_angles,
            global_phase: canonical_angle(global_phase),
        })
    }

    pub fn n_qubits(&self) -> usize {
        self.architecture.cols()
    }

    pub fn n_terms(&self) -> usize {
        self.architecture.rows()
    }
}

#[derive(Serialize, Deserialize)]
struct IqpSpecRepr {
    #[serde(rename = "A")]
    a: Vec<String>,
    n: usize,
    theta: Vec<f64>,
    #[serde(default)]
    global_phase: f64,
}

impl Serialize for IqpSpec {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        let a = (0..self.architecture.rows())
            .map(|r| {
                (0..self.architecture.cols())
                    .map(|c| if self.architecture.get(r, c) { '1' } else { '0' })
                    .collect()
            })
            .collect();
        IqpSpecRepr {
            a,
            n: self.n_qubits(),
            theta: self.angles.clone(),
            global_phase: self.global_phase,
        }
        .serialize(serializer)
    }
}

impl<'de> Deserialize<'de> for IqpSpec {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        let repr = IqpSpecRepr::deserialize(deserializer)?;
        if repr.a.len() != repr.theta.len() {
            return Err(D::Error::custom("A and theta lengths differ"));
        }
        let mut m = BitMatrix::zeros(repr.a.len(), repr.n);
        for (r, row) in repr.a.iter().enumerate() {
            if row.len() != repr.n {
                return Err(D::Error::custom(format!(
                    "row {r} has {} bits, expected {}",
                    row.len(),
                    repr.n
                )));
            }
            for (c, ch) in row.chars().enumerate() {
                match ch {
                    '1' => m.set(r, c, true),
                    '0' => {}
                    other => return Err(D::Error::custom(format!("bad bit char {other:?}"))),
                }
            }
        }
        let mut spec = IqpSpec::new(m, repr.theta).map_err(D::Error::custom)?;
        spec.global_phase = canonical_angle(spec.global_phase + repr.global_phase);
        Ok(spec)
    }
}

/// Effective IQP architecture of `L` staircase blocks interleaved with
/// `L+1` rotation layers (layer `i` precedes block `i`; the last layer has
/// no block after it and contributes plain weight-1 rows).
pub fn effective_iqp(blocks: &[FanoutStaircase], rotations: &[Vec<f64>]) -> Result<IqpSpec> {
    if rotations.len() != blocks.len() + 1 {
        return Err(Error::ShapeMismatch(format!(
            "{} rotation layers for {} blocks; need one more layer than blocks",
            rotations.len(),
            blocks.len()
        )));
    }
    let n = rotations
        .first()
        .map(Vec::len)
        .ok_or_else(|| Error::InvalidArgument("at least one rotation layer required".into()))?;
    for (i, layer) in rotations.iter().enumerate() {
        if layer.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "rotation layer {i} has {} angles, expected {n}",
                layer.len()
            )));
        }
    }
    for (i, b) in blocks.iter().enumerate() {
        if b.conjugation.rows() != n || b.conjugation.cols() != n {
            return Err(Error::ShapeMismatch(format!(
                "block {i} conjugation map is {}x{}, expected {n}x{n}",
                b.conjugation.rows(),
                b.conjugation.cols()
            )));
        }
    }

    // suffix[i] = W_{L-1} · … · W_i (identity for i = L): the conjugation
    // pulling a layer-i phase row to the end of the circuit.
    let l = blocks.len();
    let mut suffix = vec![BitMatrix::identity(n)];
    for b in blocks.iter().rev() {
        let prev = suffix.last().expect("nonempty");
        suffix.push(prev.mul(&b.conjugation)?);
    }
    suffix.reverse();

    let mut rows = Vec::with_capacity((l + 1) * n);
    let mut angles = Vec::with_capacity((l + 1) * n);
    for (i, layer) in rotations.iter().enumerate() {
        for (j, &angle) in layer.iter().enumerate() {
            rows.push(suffix[i].column(j));
            angles.push(angle);
        }
    }
    IqpSpec::new(BitMatrix::from_rows(&rows)?, angles)
}

/// Feed-forward angle update: add π/2 to every qubit whose frame bit
/// `(T·m)_j` is set, mod 2π.
pub fn feedforward_update(angles: &[f64], t: &TransferMatrix, m: &BitVec) -> Result<Vec<f64>> {
    if t.matrix.rows() != angles.len() || t.matrix.cols() != m.len() {
        return Err(Error::ShapeMismatch(format!(
            "transfer is {}x{}, angles {}, outcome bits {}",
            t.matrix.rows(),
            t.matrix.cols(),
            angles.len(),
            m.len()
        )));
    }
    let frame = t.matrix.mat_vec(m)?;
    Ok(angles
        .iter()
        .enumerate()
        .map(|(j, &a)| {
            if frame.get(j) {
                canonical_angle(a + FRAC_PI_2)
            } else {
                canonical_angle(a)
            }
        })
        .collect())
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::grid::checkerboard_layout;
    use crate::staircase::build::build_staircase;
    use std::f64::consts::PI;

    #[test]
    fn no_blocks_yields_the_identity_architecture() {
        let spec = effective_iqp(&[], &[vec![0.1, 0.2, 0.3]]).unwrap();
        assert_eq!(spec.architecture, BitMatrix::identity(3));
        assert_eq!(spec.angles, vec![0.1, 0.2, 0.3]);
        assert_eq!(spec.global_phase, 0.0);
    }

    #[test]
    fn zero_rows_prune_into_the_global_phase() {
        let mut a = BitMatrix::zeros(2, 3);
        a.set(1, 0, true);
        a.set(1, 2, true);
        let spec = IqpSpec::new(a, vec![0.4, 0.9]).unwrap();
        assert_eq!(spec.n_terms(), 1);
        assert!(spec.architecture.get(0, 0) && spec.architecture.get(0, 2));
        assert_eq!(spec.angles, vec![0.9]);
        assert!((spec.global_phase - 0.4).abs() < 1e-15);
    }

    #[test]
    fn one_block_rows_are_columns_of_its_conjugation_map() {
        let layout = checkerboard_layout(3, 1).unwrap();
        let fs = build_staircase(&layout, 1, 1, 1, 7).unwrap();
        let spec = effective_iqp(
            std::slice::from_ref(&fs),
            &[vec![0.25, 0.5], vec![0.75, 1.0]],
        )
        .unwrap();
        assert_eq!(spec.n_terms(), 4);
        // First layer: columns of the block's conjugation map.
        for j in 0..2 {
            let col = fs.conjugation.column(j);
            for i in 0..2 {
                assert_eq!(spec.architecture.get(j, i), col.get(i));
            }
        }
        // Final layer: plain unit rows.
        assert!(spec.architecture.get(2, 0) && !spec.architecture.get(2, 1));
        assert!(!spec.architecture.get(3, 0) && spec.architecture.get(3, 1));
        assert_eq!(spec.angles, vec![0.25, 0.5, 0.75, 1.0]);
    }

    #[test]
    fn suffix_products_compose_across_two_blocks() {
        let layout = checkerboard_layout(4, 3).unwrap();
        let b1 = build_staircase(&layout, 1, 1, 1, 1).unwrap();
        let b2 = build_staircase(&layout, 1, 1, 1, 2).unwrap();
        let n = layout.n_system();
        let spec =
            effective_iqp(&[b1.clone(), b2.clone()], &[vec![0.0; n], vec![0.0; n], vec![0.0; n]])
                .unwrap();
        let composed = b2.conjugation.mul(&b1.conjugation).unwrap();
        for j in 0..n {
            let col = composed.column(j);
            for i in 0..n {
                assert_eq!(spec.architecture.get(j, i), col.get(i), "layer-0 row {j} bit {i}");
            }
        }
        // Middle layer sees only the second block.
        for j in 0..n {
            let col = b2.conjugation.column(j);
            for i in 0..n {
                assert_eq!(spec.architecture.get(n + j, i), col.get(i));
            }
        }
    }

    #[test]
    fn feedforward_leaves_angles_alone_for_zero_outcomes() {
        let layout = checkerboard_layout(3, 1).unwrap();
        let fs = build_staircase(&layout, 1, 1, 1, 3).unwrap();
        let angles = vec![0.3, 2.2];
        let m = BitVec::zeros(1);
        let out = feedforward_update(&angles, &fs.transfers[0], &m).unwrap();
        assert_eq!(out, angles);
    }

    #[test]
    fn feedforward_wraps_around_two_pi() {
        let layout = checkerboard_layout(3, 1).unwrap();
        let fs = build_staircase(&layout, 1, 1, 1, 3).unwrap();
        // Forward-round transfer corrects both system qubits.
        let angles = vec![3.0 * PI / 2.0, PI];
        let m = BitVec::unit(1, 0);
        let out = feedforward_update(&angles, &fs.transfers[0], &m).unwrap();
        assert!(out[0].abs() < 1e-15, "3π/2 + π/2 wraps to 0, got {}", out[0]);
        assert!((out[1] - 3.0 * PI / 2.0).abs() < 1e-15);
    }

    #[test]
    fn iqp_spec_roundtrips_through_json() {
        let layout = checkerboard_layout(3, 1).unwrap();
        let fs = build_staircase(&layout, 1, 1, 1, 7).unwrap();
        let spec = effective_iqp(std::slice::from_ref(&fs), &[vec![0.25, 0.5], vec![0.75, 1.0]])
            .unwrap();
        let json = serde_json::to_string(&spec).unwrap();
        assert!(json.contains("\"A\""));
        assert!(json.contains("\"theta\""));
        let back: IqpSpec = serde_json::from_str(&json).unwrap();
        assert_eq!(back, spec);
    }

    #[test]
    fn shape_mismatches_are_rejected() {
        assert!(effective_iqp(&[], &[]).is_err());
        assert!(effective_iqp(&[], &[vec![0.0], vec![0.0]]).is_err());
        let layout = checkerboard_layout(3, 1).unwrap();
        let fs = build_staircase(&layout, 1, 1, 1, 0).unwrap();
        // Wrong layer width for the block.
        assert!(effective_iqp(std::slice::from_ref(&fs), &[vec![0.0; 3], vec![0.0; 3]]).is_err());
    }
}
