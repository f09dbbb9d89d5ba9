//! Dense state-vector simulation of dynamic circuits.
//!
//! The register model keeps system qubits in fixed slots and brings
//! auxiliaries in and out of the state as they are touched, measured, and
//! reset, so memory follows the number of *live* qubits rather than the
//! full count.  On top of the runner sit direct phase-state evaluation,
//! output distributions with multinomial sampling, and the entanglement
//! diagnostics (cut entropies, contraction cost ξ) used to compare
//! measurement-driven states against unitary baselines.

mod entropy;
mod measures;
mod runner;
mod state;

pub use entropy::{entanglement_entropy, xi_cost, xi_lin_baseline};
pub use measures::{
    collision_probability, empirical_distribution, haar_collision, output_distribution, sample,
    total_variation, Distribution,
};
pub use runner::{enumerate_branches, run_dynamic, Branch, DynamicRunner, OutcomePolicy};
pub use state::{phase_state, StateVector, MAX_QUBITS};
