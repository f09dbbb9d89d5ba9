//! Stochastic Pauli noise: gate depolarizing channels, T2 dephasing tied
//! to wall-clock CX layers, Monte Carlo trajectory averaging of output
//! distributions, δ_TV sweeps, and the exponential-saturation fit of
//! δ_TV against circuit duration.

mod executor;
mod parity;
mod saturation;

pub use executor::{
    dephasing_saturation_series, ideal_distribution, noisy_distribution, tv_sweep, SweepParameter,
    SweepPoint,
};
pub use parity::compile_parity_network;
pub use saturation::{fit_saturation, SaturationFit};

use crate::error::{Error, Result};

/// Circuit-level error model: joint two-qubit depolarizing after each CX,
/// single-qubit depolarizing after each one-qubit gate, and pure dephasing
/// (infinite T1) acting on every live qubit per wall-clock layer.
#[derive(Clone, Debug, PartialEq)]
pub struct NoiseModel {
    /// Probability of a depolarizing event after each CX.
    pub p2: f64,
    /// Probability of a depolarizing event after each single-qubit gate.
    pub p1: f64,
    /// Dephasing coherence time, in nanoseconds (∞ disables dephasing).
    pub t2_ns: f64,
    /// Wall-clock duration of one CX layer, in nanoseconds.
    pub cx_layer_ns: f64,
    /// When set, a CX error depolarizes each of the two qubits
    /// independently with probability `p2` instead of drawing one of the
    /// 15 joint two-qubit Paulis.
    pub marginal_depolarizing: bool,
}

impl NoiseModel {
    pub fn new(p2: f64, p1: f64, t2_ns: f64) -> Result<Self> {
        for (name, p) in [("p2", p2), ("p1", p1)] {
            if !(0.0..=1.0).contains(&p) {
                return Err(Error::InvalidArgument(format!(
                    "{name} = {p} is not a probability"
                )));
            }
        }
        if !(t2_ns >= 0.0) {
            return Err(Error::InvalidArgument(format!(
                "T2 = {t2_ns} ns is not a valid duration"
            )));
        }
        Ok(NoiseModel {
            p2,
            p1,
            t2_ns,
            cx_layer_ns: 200.0,
            marginal_depolarizing: false,
        })
    }

    /// The noiseless model: zero depolarizing, infinite T2.
    pub fn ideal() -> Self {
        NoiseModel::new(0.0, 0.0, f64::INFINITY).expect("static parameters")
    }

    /// Net probability that a qubit picks up a Z after idling for `layers`
    /// wall-clock layers: (1 − e^{−Δt/T2})/2 with Δt = layers·τ.
    pub fn dephasing_probability(&self, layers: usize) -> f64 {
        if layers == 0 || self.cx_layer_ns == 0.0 {
            return 0.0;
        }
        let dt = layers as f64 * self.cx_layer_ns;
        0.5 * (1.0 - (-dt / self.t2_ns).exp())
    }
}
