//! Ancilla-free compilation of phase-state specifications.
//!
//! Each architecture row becomes a parity fold: CX the support onto one
//! carrier qubit, rotate, unfold.  This is the standard unitary way to
//! realize many-body Z rotations and serves as the deep comparator for
//! the shallow measurement-driven preparation — same output distribution,
//! far more two-qubit layers for a typical dense architecture.

use crate::error::{Error, Result};
use crate::staircase::{DynamicCircuit, Instruction, IqpSpec};

/// Compile `Π_t exp(iθ_t Z^{A_t})` into a measurement-free dynamic
/// circuit on the system qubits alone (global phase dropped).  Runs under
/// the usual convention: `|+…+⟩` in, X-basis readout.
pub fn compile_parity_network(spec: &IqpSpec) -> Result<DynamicCircuit> {
    let n = spec.n_qubits();
    if n == 0 {
        return Err(Error::InvalidArgument(
            "cannot compile a specification on zero qubits".into(),
        ));
    }
    let mut c = DynamicCircuit::new(n, 0);
    for t in 0..spec.n_terms() {
        let support: Vec<usize> = (0..n).filter(|&q| spec.architecture.get(t, q)).collect();
        let Some((&carrier, rest)) = support.split_first() else {
            continue;
        };
        for &q in rest {
            c.instructions.push(Instruction::Cx { control: q, target: carrier });
        }
        c.instructions.push(Instruction::Rz { q: carrier, angle: spec.angles[t] });
        for &q in rest.iter().rev() {
            c.instructions.push(Instruction::Cx { control: q, target: carrier });
        }
    }
    Ok(c)
}
