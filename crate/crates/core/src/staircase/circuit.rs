//! Dynamic-circuit representation: instruction stream over a register of
//! system qubits `0..n` and auxiliary qubits `n..n+a`, with mid-circuit
//! X-basis measurements and auxiliary reuse.

use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// One instruction of a dynamic circuit.  Qubit references are global
/// register indices (system first, then auxiliaries).
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "op", rename_all = "snake_case")]
pub enum Instruction {
    Cx { control: usize, target: usize },
    H { q: usize },
    Rz { q: usize, angle: f64 },
    /// X-basis measurement of an auxiliary, writing into outcome `slot`.
    /// The auxiliary leaves the live register until its next `ResetAux`.
    MeasureX { aux: usize, slot: usize },
    /// Reinitialize a previously measured auxiliary to |0⟩.
    ResetAux { aux: usize },
}

/// A dynamic circuit over `n_system + n_auxiliary` qubits.  Auxiliaries
/// start in |0⟩; X-basis measurement is Hadamard followed by a
/// computational-basis measurement.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DynamicCircuit {
    pub n_system: usize,
    pub n_auxiliary: usize,
    pub instructions: Vec<Instruction>,
}

impl DynamicCircuit {
    pub fn new(n_system: usize, n_auxiliary: usize) -> Self {
        DynamicCircuit { n_system, n_auxiliary, instructions: Vec::new() }
    }

    pub fn n_qubits(&self) -> usize {
        self.n_system + self.n_auxiliary
    }

    pub fn is_auxiliary(&self, q: usize) -> bool {
        q >= self.n_system && q < self.n_qubits()
    }

    /// Total number of measurement events (outcome slots must be the
    /// contiguous range `0..count` in order of appearance).
    pub fn n_measurements(&self) -> usize {
        self.instructions
            .iter()
            .filter(|i| matches!(i, Instruction::MeasureX { .. }))
            .count()
    }

    /// Structural validation: indices in range, CX on distinct qubits,
    /// measurements target auxiliaries with sequential slots.
    pub fn validate(&self) -> Result<()> {
        let total = self.n_qubits();
        let mut next_slot = 0;
        for (pos, instr) in self.instructions.iter().enumerate() {
            let check = |q: usize| -> Result<()> {
                if q >= total {
                    return Err(Error::Malformed(format!(
                        "instruction {pos}: qubit {q} out of range for {total}-qubit register"
                    )));
                }
                Ok(())
            };
            match *instr {
                Instruction::Cx { control, target } => {
                    check(control)?;
                    check(target)?;
                    if control == target {
                        return Err(Error::Malformed(format!(
                            "instruction {pos}: CX with control = target = {control}"
                        )));
                    }
                }
                Instruction::H { q } => check(q)?,
                Instruction::Rz { q, .. } => check(q)?,
                Instruction::MeasureX { aux, slot } => {
                    check(aux)?;
                    if !self.is_auxiliary(aux) {
                        return Err(Error::Malformed(format!(
                            "instruction {pos}: X-measurement of non-auxiliary qubit {aux}"
                        )));
                    }
                    if slot != next_slot {
                        return Err(Error::Malformed(format!(
                            "instruction {pos}: outcome slot {slot}, expected {next_slot}"
                        )));
                    }
                    next_slot += 1;
                }
                Instruction::ResetAux { aux } => {
                    check(aux)?;
                    if !self.is_auxiliary(aux) {
                        return Err(Error::Malformed(format!(
                            "instruction {pos}: reset of non-auxiliary qubit {aux}"
                        )));
                    }
                }
            }
        }
        Ok(())
    }
}

/// Greedy wall-clock layering of the two-qubit gates.
///
/// Each CX lands in the earliest layer after both its qubits are free; the
/// result maps every instruction to its CX layer (1-based; `None` for
/// anything that is not a CX) together with the total two-qubit depth.  A
/// measurement group (a run of consecutive `MeasureX`, reset-tolerant)
/// acts as a barrier for the measured auxiliaries: they all advance to the
/// latest layer any of them occupies, so no later gate can slide past the
/// round boundary.  Single-qubit gates take no layer.
pub fn cx_layers(c: &DynamicCircuit) -> (Vec<Option<usize>>, usize) {
    let mut busy = vec![0usize; c.n_qubits()];
    let mut depth = 0;
    let mut group: Vec<usize> = Vec::new();
    let mut layers = vec![None; c.instructions.len()];
    let flush = |group: &mut Vec<usize>, busy: &mut [usize]| {
        if let Some(sync) = group.iter().map(|&a| busy[a]).max() {
            for &a in group.iter() {
                busy[a] = sync;
            }
        }
        group.clear();
    };
    for (i, instr) in c.instructions.iter().enumerate() {
        match *instr {
            Instruction::MeasureX { aux, .. } => {
                group.push(aux);
                continue;
            }
            Instruction::ResetAux { .. } => continue, // group-neutral
            _ => flush(&mut group, &mut busy),
        }
        if let Instruction::Cx { control, target } = *instr {
            let layer = busy[control].max(busy[target]) + 1;
            busy[control] = layer;
            busy[target] = layer;
            depth = depth.max(layer);
            layers[i] = Some(layer);
        }
    }
    flush(&mut group, &mut busy);
    (layers, depth)
}

/// Two-qubit depth, CX count, and measurement count.
pub fn depth_and_counts(c: &DynamicCircuit) -> (usize, usize, usize) {
    let (layers, depth) = cx_layers(c);
    let cx_count = layers.iter().flatten().count();
    (depth, cx_count, c.n_measurements())
}

/// The CX ladder of the minimal one-dimensional example: systems and
/// auxiliaries interleaved along a line, one copy layer `CX(s_i → a_i)`
/// followed by one spread layer `CX(a_i → s_{i+1})`, then all auxiliaries
/// measured in the X basis.  Used as a fixed point in tests here and as the
/// shape the staircase builder degenerates to at n = 2.
pub fn example_ladder(n: usize) -> DynamicCircuit {
    assert!(n >= 2);
    let a = n - 1;
    let mut c = DynamicCircuit::new(n, a);
    for i in 0..a {
        c.instructions.push(Instruction::Cx { control: i, target: n + i });
    }
    for i in 0..a {
        c.instructions.push(Instruction::Cx { control: n + i, target: i + 1 });
    }
    for i in 0..a {
        c.instructions.push(Instruction::MeasureX { aux: n + i, slot: i });
    }
    c
}
