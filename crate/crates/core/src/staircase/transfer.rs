//! Outcome-to-correction transfer algebra for CX networks with mid-circuit
//! X-basis auxiliary measurements.
//!
//! Within one measurement round with forward GF(2) state map `F` (basis
//! states evolve as `x ↦ Fx` with auxiliaries entering in |0⟩), projecting
//! every auxiliary in the X basis with outcome record `m` leaves the same
//! system state as the all-zeros record up to a system Z string applied at
//! the round's output:
//!
//! ```text
//!   c = (F_ssᵀ)⁻¹ · F_asᵀ · m
//! ```
//!
//! and a system Z string `c` commutes through a later round as
//! `c ↦ (F_ssᵀ)⁻¹ c`.  Composing these push maps to the end of the circuit
//! gives one transfer matrix per round, mapping that round's outcome bits
//! to the Z string the final state picks up.  The equality is exact on the
//! auxiliaries-in-|0⟩ subspace — no extra phases appear — which also makes
//! every outcome record equally likely.

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use crate::staircase::circuit::{DynamicCircuit, Instruction};
use serde::{Deserialize, Serialize};

/// Transfer matrix of one measurement round: `matrix` has one column per
/// outcome bit of the round (in slot order) and one row per system qubit;
/// `matrix · m` is the Z string on the system at the end of the circuit
/// equivalent to outcome record `m` in round `round`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TransferMatrix {
    pub round: usize,
    pub matrix: BitMatrix,
}

/// One maximal measurement-free segment of a circuit together with the
/// auxiliaries its terminating measurement group reads out (empty for a
/// trailing unitary segment).
#[derive(Clone, Debug)]
pub(crate) struct RoundSpec {
    pub gates: Vec<(usize, usize)>,
    pub measured: Vec<usize>,
}

/// Split an instruction stream into measurement rounds.  Rz rotations are
/// diagonal and commute with the whole Z-frame bookkeeping, so they are
/// transparent here; Hadamards would conjugate Z into X and are rejected.
///
/// The round identities assume every auxiliary enters each round in |0⟩
/// and is projected out at its end, so circuits that write into an
/// auxiliary and then carry it unmeasured across a round boundary (or
/// reset it while it holds data) are rejected.
pub(crate) fn parse_rounds(c: &DynamicCircuit) -> Result<Vec<RoundSpec>> {
    c.validate()?;
    let n = c.n_system;
    let mut dead = vec![false; c.n_auxiliary];
    let mut dirty = vec![false; c.n_auxiliary];
    let mut rounds = Vec::new();
    let mut current = RoundSpec { gates: Vec::new(), measured: Vec::new() };
    let close_segment = |dead: &[bool], dirty: &[bool]| -> Result<()> {
        if let Some(q) = (0..dirty.len()).find(|&q| dirty[q] && !dead[q]) {
            return Err(Error::InvalidArgument(format!(
                "auxiliary {} carries data across a measurement round boundary",
                n + q
            )));
        }
        Ok(())
    };
    for instr in &c.instructions {
        match *instr {
            Instruction::Cx { control, target } => {
                if !current.measured.is_empty() {
                    close_segment(&dead, &dirty)?;
                    rounds.push(std::mem::replace(
                        &mut current,
                        RoundSpec { gates: Vec::new(), measured: Vec::new() },
                    ));
                }
                for q in [control, target] {
                    if q >= n && dead[q - n] {
                        return Err(Error::InvalidArgument(format!(
                            "measured auxiliary {q} used in a gate before reset"
                        )));
                    }
                }
                if target >= n {
                    dirty[target - n] = true;
                }
                current.gates.push((control, target));
            }
            Instruction::MeasureX { aux, .. } => {
                if dead[aux - n] {
                    return Err(Error::InvalidArgument(format!(
                        "auxiliary {aux} measured twice without reset"
                    )));
                }
                dead[aux - n] = true;
                dirty[aux - n] = false;
                current.measured.push(aux);
            }
            Instruction::ResetAux { aux } => {
                if !dead[aux - n] && dirty[aux - n] {
                    return Err(Error::InvalidArgument(format!(
                        "auxiliary {aux} reset while holding data"
                    )));
                }
                dead[aux - n] = false;
                dirty[aux - n] = false;
            }
            Instruction::Rz { .. } => {}
            Instruction::H { q } => {
                return Err(Error::InvalidArgument(format!(
                    "transfer algebra requires a CX-only network; found H on qubit {q}"
                )));
            }
        }
    }
    close_segment(&dead, &dirty)?;
    if !current.gates.is_empty() || !current.measured.is_empty() {
        rounds.push(current);
    }
    Ok(rounds)
}

/// Forward GF(2) state map of a gate list over the full register.
fn forward_map(n_qubits: usize, gates: &[(usize, usize)]) -> BitMatrix {
    let mut f = BitMatrix::identity(n_qubits);
    for &(control, target) in gates {
        f.xor_row(target, control);
    }
    f
}

/// Per-round pieces: the push map `(F_ssᵀ)⁻¹` and the output-side outcome
/// correction map with one column per measured auxiliary.
fn round_maps(c: &DynamicCircuit, round: &RoundSpec, index: usize) -> Result<(BitMatrix, BitMatrix)> {
    let n = c.n_system;
    let sys: Vec<usize> = (0..n).collect();
    let f = forward_map(c.n_qubits(), &round.gates);
    let f_ss = f.submatrix(&sys, &sys);
    let push = f_ss.transpose().inverse().map_err(|_| {
        Error::Singular(format!(
            "round {index}: the CX network does not act invertibly on the system block"
        ))
    })?;
    let f_ms = f.submatrix(&round.measured, &sys);
    let correction = push.mul(&f_ms.transpose())?;
    Ok((push, correction))
}

/// All per-round transfer matrices of a circuit, each mapping the round's
/// outcome bits to the equivalent system Z string at the end of the
/// circuit.  Rounds are indexed in temporal order; a trailing unitary
/// segment contributes its push map but no transfer of its own.
pub fn transfer_matrices(c: &DynamicCircuit) -> Result<Vec<TransferMatrix>> {
    let rounds = parse_rounds(c)?;
    let mut pieces = Vec::with_capacity(rounds.len());
    for (idx, round) in rounds.iter().enumerate() {
        pieces.push(round_maps(c, round, idx)?);
    }
    // Walk backwards, maintaining the composite push map from each round's
    // output to the end of the circuit.
    let mut suffix = BitMatrix::identity(c.n_system);
    let mut out: Vec<TransferMatrix> = Vec::new();
    for (idx, round) in rounds.iter().enumerate().rev() {
        let (push, correction) = &pieces[idx];
        if !round.measured.is_empty() {
            out.push(TransferMatrix { round: idx, matrix: suffix.mul(correction)? });
        }
        suffix = suffix.mul(push)?;
    }
    out.reverse();
    // Renumber by measurement round only, so callers can zip with outcome
    // records even when a trailing segment was present.
    for (k, t) in out.iter_mut().enumerate() {
        t.round = k;
    }
    Ok(out)
}

/// Transfer matrix of a single measurement round (0-based).
pub fn transfer_matrix(c: &DynamicCircuit, round: usize) -> Result<TransferMatrix> {
    let mut all = transfer_matrices(c)?;
    let count = all.len();
    if round >= count {
        return Err(Error::InvalidArgument(format!(
            "round {round} out of range: circuit has {count} measurement rounds"
        )));
    }
    Ok(all.swap_remove(round))
}

/// Total forward system map `M` of the circuit (product of the per-round
/// system blocks) and the Z-conjugation map `W = (Mᵀ)⁻¹` describing how a
/// diagonal-phase pattern transforms when pulled through the network.
pub fn system_maps(c: &DynamicCircuit) -> Result<(BitMatrix, BitMatrix)> {
    let rounds = parse_rounds(c)?;
    let n = c.n_system;
    let sys: Vec<usize> = (0..n).collect();
    let mut total = BitMatrix::identity(n);
    for (idx, round) in rounds.iter().enumerate() {
        let f = forward_map(c.n_qubits(), &round.gates);
        let f_ss = f.submatrix(&sys, &sys);
        if !f_ss.is_invertible() {
            return Err(Error::Singular(format!(
                "round {idx}: the CX network does not act invertibly on the system block"
            )));
        }
        total = f_ss.mul(&total)?;
    }
    let conjugation = total.transpose().inverse()?;
    Ok((total, conjugation))
}

/// Fold a full measurement record into the system Z-string it induces at
/// the end of the circuit: the XOR over rounds of `T_r · m_r`, where `m_r`
/// is the slice of outcomes produced by round `r`.  Applying this string
/// as Z gates right before the final X-basis readout (equivalently, XORing
/// it into the readout) completes the feed-forward correction.
pub fn output_frame(
    transfers: &[TransferMatrix],
    outcomes: &crate::gf2::BitVec,
) -> Result<crate::gf2::BitVec> {
    use crate::gf2::BitVec;
    let expected: usize = transfers.iter().map(|t| t.matrix.cols()).sum();
    if outcomes.len() != expected {
        return Err(Error::ShapeMismatch(format!(
            "outcome record has {} bits, the rounds measured {expected}",
            outcomes.len()
        )));
    }
    let n = match transfers.first() {
        Some(t) => t.matrix.rows(),
        None => return Ok(BitVec::zeros(0)),
    };
    let mut frame = BitVec::zeros(n);
    let mut offset = 0;
    for t in transfers {
        let k = t.matrix.cols();
        let mut m = BitVec::zeros(k);
        for i in 0..k {
            if outcomes.get(offset + i) {
                m.set(i, true);
            }
        }
        frame.xor_assign(&t.matrix.mat_vec(&m)?);
        offset += k;
    }
    Ok(frame)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::BitVec;
    use crate::staircase::circuit::example_ladder;

    fn bit(m: &BitMatrix, i: usize, j: usize) -> bool {
        m.get(i, j)
    }

    #[test]
    fn one_layer_ladder_matches_the_suffix_parity_rule() {
        // Copy layer + spread layer on an interleaved line: outcome bit j
        // corrects every system qubit i ≤ j, so the matrix is upper
        // triangular with ones.
        let t = transfer_matrix(&example_ladder(4), 0).unwrap();
        assert_eq!(t.round, 0);
        assert_eq!((t.matrix.rows(), t.matrix.cols()), (4, 3));
        for i in 0..4 {
            for j in 0..3 {
                assert_eq!(bit(&t.matrix, i, j), i <= j, "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn two_layer_ladder_matches_the_mod_three_rule() {
        // Running the copy+spread pair twice before measuring thins the
        // correction pattern: outcome bit j touches system qubit i exactly
        // when 0 < j - i and (j - i) mod 3 ≠ 0.  Checked against the round
        // algebra for widths up to 12.
        for n in 2..=12 {
            let single = example_ladder(n);
            let mut c = DynamicCircuit::new(n, n - 1);
            let cx_only: Vec<_> = single
                .instructions
                .iter()
                .filter(|i| matches!(i, Instruction::Cx { .. }))
                .copied()
                .collect();
            c.instructions.extend(cx_only.iter().copied());
            c.instructions.extend(cx_only.iter().copied());
            for j in 0..n - 1 {
                c.instructions.push(Instruction::MeasureX { aux: n + j, slot: j });
            }
            let t = transfer_matrix(&c, 0).unwrap();
            for i in 0..n {
                for j in 0..n - 1 {
                    let offset = j as i64 - i as i64;
                    let expected = offset > 0 && offset % 3 != 0;
                    assert_eq!(bit(&t.matrix, i, j), expected, "n={n} entry ({i},{j})");
                }
            }
        }
    }

    #[test]
    fn trailing_gates_push_the_correction_forward() {
        // Appending CX(s3 → s1) after the final measurement conjugates
        // each correction string: Z on the CX target grows a Z on its
        // control, so row s3 picks up row s1.
        let mut c = example_ladder(4);
        c.instructions.push(Instruction::Cx { control: 2, target: 0 });
        let t = transfer_matrix(&c, 0).unwrap();
        let expected = [
            [true, true, true],
            [false, true, true],
            [true, true, false],
            [false, false, false],
        ];
        for i in 0..4 {
            for j in 0..3 {
                assert_eq!(bit(&t.matrix, i, j), expected[i][j], "entry ({i},{j})");
            }
        }
    }

    #[test]
    fn corrections_compose_linearly_over_outcome_records() {
        let t = transfer_matrix(&example_ladder(6), 0).unwrap();
        let m1 = BitVec::from_indices(5, &[0, 3]);
        let m2 = BitVec::from_indices(5, &[1, 3, 4]);
        let mut sum = m1.clone();
        sum.xor_assign(&m2);
        let mut lhs = t.matrix.mat_vec(&m1).unwrap();
        lhs.xor_assign(&t.matrix.mat_vec(&m2).unwrap());
        assert_eq!(lhs, t.matrix.mat_vec(&sum).unwrap());
    }

    #[test]
    fn non_invertible_system_blocks_are_reported() {
        // CX(s1 → a1) then CX(a1 → s1) swaps s1's content into the
        // auxiliary: the system block of the round map drops rank.
        let mut c = DynamicCircuit::new(2, 1);
        c.instructions = vec![
            Instruction::Cx { control: 0, target: 2 },
            Instruction::Cx { control: 2, target: 0 },
            Instruction::MeasureX { aux: 2, slot: 0 },
        ];
        match transfer_matrix(&c, 0) {
            Err(Error::Singular(msg)) => assert!(msg.contains("round 0")),
            other => panic!("expected Singular, got {other:?}"),
        }
    }

    #[test]
    fn rotations_are_transparent_and_hadamards_are_rejected() {
        let mut c = example_ladder(3);
        c.instructions.insert(2, Instruction::Rz { q: 0, angle: 0.7 });
        let with_rz = transfer_matrix(&c, 0).unwrap();
        let plain = transfer_matrix(&example_ladder(3), 0).unwrap();
        assert_eq!(with_rz.matrix, plain.matrix);

        c.instructions.insert(0, Instruction::H { q: 1 });
        assert!(matches!(transfer_matrix(&c, 0), Err(Error::InvalidArgument(_))));
    }

    #[test]
    fn multi_round_transfers_push_through_later_rounds() {
        // Two one-layer ladders in sequence with auxiliary reuse.  The
        // second round's system map is again lower-triangular-ones, so the
        // first round's suffix-parity correction gets conjugated once more.
        let n = 3;
        let single = example_ladder(n);
        let mut c = DynamicCircuit::new(n, n - 1);
        c.instructions.extend(single.instructions.iter().copied());
        for j in 0..n - 1 {
            c.instructions.push(Instruction::ResetAux { aux: n + j });
        }
        let base: Vec<_> = single
            .instructions
            .iter()
            .filter(|i| matches!(i, Instruction::Cx { .. }))
            .copied()
            .collect();
        c.instructions.extend(base.iter().copied());
        for j in 0..n - 1 {
            c.instructions.push(Instruction::MeasureX { aux: n + j, slot: n - 1 + j });
        }
        let all = transfer_matrices(&c).unwrap();
        assert_eq!(all.len(), 2);
        // Round 1 (last) sees no later rounds: suffix parity again.
        for i in 0..n {
            for j in 0..n - 1 {
                assert_eq!(bit(&all[1].matrix, i, j), i <= j);
            }
        }
        // Round 0: T = P_2 · C_1 where both factors come from the
        // one-layer maps.  The ladder's system block is lower bidiagonal
        // (the spread layer hands each s_i to s_{i+1} using the copy the
        // auxiliary took *before* s_i changed), so build it directly
        // rather than replaying gates.
        let c1 = transfer_matrix(&example_ladder(n), 0).unwrap().matrix;
        let f_ss = BitMatrix::from_fn(n, n, |r, c| r == c || r == c + 1);
        let p2 = f_ss.transpose().inverse().unwrap();
        let expected = p2.mul(&c1).unwrap();
        assert_eq!(all[0].matrix, expected);
    }
}
