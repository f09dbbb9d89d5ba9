//! Measurement-driven constant-depth IQP sampling.
//!
//! This crate implements the full pipeline for preparing IQP phase states
//! with shallow measurement-assisted fan-out circuits on 2D lattices:
//!
//! * [`gf2`] — bit-packed GF(2) linear algebra, CX synthesis, and rank
//!   statistics of random binary matrices;
//! * [`grid`] — checkerboard lattice layouts and random directed
//!   Hamiltonian paths;
//! * [`staircase`] — dynamic fan-out circuits, their GF(2) transfer
//!   algebra, feed-forward corrections, effective IQP extraction, and
//!   assembly of full sampling circuits;
//! * [`simcore`] — dense state-vector simulation of dynamic circuits with
//!   mid-circuit measurement and qubit reuse;
//! * [`noise`] — Pauli/dephasing noise channels, trajectory averaging, and
//!   saturation fits of the output-distribution error;
//! * [`criteria`] — architecture-quality diagnostics (rank, Hamming
//!   spectrum, covariance spectra vs. Marchenko–Pastur);
//! * [`reservoir`] — quantum-reservoir classification of many-body phases
//!   using measurement-driven multibody Floquet dynamics.

pub mod criteria;
pub mod error;
pub mod gf2;
pub mod grid;
pub mod noise;
pub mod reservoir;
pub mod seeding;
pub mod simcore;
pub mod staircase;

pub use error::{Error, Result};
