//! Bit-packed linear algebra over GF(2): rank, elimination, CX-circuit
//! synthesis, and rank-deficit probability formulas.

mod bitmatrix;
mod kolchin;
mod synth;

pub use bitmatrix::{BitMatrix, BitVec};
pub use kolchin::{kolchin_limit, kolchin_probability};
pub use synth::{replay_cx_circuit, synthesize_cx_circuit, CxGate, CxGateList};

use crate::error::Result;

/// GF(2) rank; the input is left unmodified.
pub fn rank_gf2(m: &BitMatrix) -> usize {
    m.rank()
}

/// Entrywise mod-2 matrix product.
pub fn mat_mul_gf2(a: &BitMatrix, b: &BitMatrix) -> Result<BitMatrix> {
    a.mul(b)
}

/// Mod-2 matrix-vector product `(Mv)_i = Σ_j M_{i,j} v_j mod 2`.
pub fn mat_vec_gf2(m: &BitMatrix, v: &BitVec) -> Result<BitVec> {
    m.mat_vec(v)
}
