//! CX-circuit synthesis for invertible GF(2) matrices.
//!
//! A CX gate with control `c` and target `t` maps a basis state `x` to the
//! state with `x_t ^= x_c`; as a linear map this is the elementary matrix
//! `I + e_t e_cᵀ`.  Gaussian elimination expresses any invertible matrix as
//! a product of such elementary matrices, which read off directly as a gate
//! list.

use super::bitmatrix::BitMatrix;
use crate::error::{Error, Result};
use serde::{Deserialize, Serialize};

/// One controlled-NOT gate acting on qubit indices.
#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct CxGate {
    pub control: usize,
    pub target: usize,
}

/// Ordered gate sequence; applying the gates in order to the identity map
/// reproduces the synthesized matrix.
pub type CxGateList = Vec<CxGate>;

/// Apply a CX gate list to the identity, returning the linear map it
/// implements on computational-basis labels.
pub fn replay_cx_circuit(n: usize, gates: &[CxGate]) -> BitMatrix {
    let mut m = BitMatrix::identity(n);
    for g in gates {
        // x_target ^= x_control, i.e. row_target ^= row_control of the map.
        m.xor_row(g.target, g.control);
    }
    m
}

/// Decompose an invertible matrix into CX gates by Gauss-Jordan elimination.
///
/// Pivots are chosen as the first set bit at or below the diagonal, scanning
/// columns left to right with a forward-then-backward clearing sweep; the
/// recorded row additions, replayed in reverse, constitute the circuit.
/// Deterministic, so gate counts are reproducible across runs.
pub fn synthesize_cx_circuit(m: &BitMatrix) -> Result<CxGateList> {
    if m.rows() != m.cols() {
        return Err(Error::ShapeMismatch(format!(
            "CX synthesis needs a square matrix, got {}x{}",
            m.rows(),
            m.cols()
        )));
    }
    let n = m.rows();
    let mut work = m.clone();
    // Row operations (target, source) meaning row_target ^= row_source,
    // i.e. left-multiplication by I + e_t e_sᵀ.
    let mut ops: Vec<(usize, usize)> = Vec::new();
    for c in 0..n {
        if !work.get(c, c) {
            let Some(pivot) = (c + 1..n).find(|&r| work.get(r, c)) else {
                return Err(Error::Singular(format!(
                    "matrix not invertible: no pivot in column {c}"
                )));
            };
            work.xor_row(c, pivot);
            ops.push((c, pivot));
        }
        for r in 0..n {
            if r != c && work.get(r, c) {
                work.xor_row(r, c);
                ops.push((r, c));
            }
        }
    }
    debug_assert_eq!(work, BitMatrix::identity(n));
    // E_m ... E_1 M = I with each E an involution, so M = E_1 E_2 ... E_m;
    // in circuit time-order the last-applied factor comes last.
    let gates: CxGateList = ops
        .into_iter()
        .rev()
        .map(|(t, s)| CxGate { control: s, target: t })
        .collect();
    debug_assert_eq!(&replay_cx_circuit(n, &gates), m);
    Ok(gates)
}
