//! Randomized fan-out staircases: dynamic circuits of CX ladders along
//! Hamiltonian paths with mid-circuit X-basis measurements, the GF(2)
//! transfer algebra that turns measurement outcomes into end-of-circuit
//! Pauli-Z corrections, extraction of the equivalent IQP phase-state
//! description, feed-forward angle updates, and synthesis of many-body Z
//! rotations from few-body ones.

pub mod build;
pub mod circuit;
pub mod iqp;
pub mod klocal;
pub mod transfer;

pub use build::{
    assemble_sampling_circuit, build_staircase, build_staircase_all_to_all, FanoutStaircase,
    StaircaseMeta,
};
pub use circuit::{depth_and_counts, example_ladder, DynamicCircuit, Instruction};
pub use iqp::{effective_iqp, feedforward_update, IqpSpec};
pub use klocal::synthesize_klocal;
pub use transfer::{
    output_frame, system_maps, transfer_matrices, transfer_matrix, TransferMatrix,
};
