//! Monte Carlo trajectory execution of dynamic circuits under Pauli noise.
//!
//! Conventions shared with the rest of the sampling pipeline: the circuit
//! holds only diagonal gates, CX networks, and auxiliary measurements; the
//! executor supplies the `|+…+⟩` preparation layer (noisy, it is made of
//! physical Hadamards) and the X-basis readout (ideal, per the ideal-
//! measurement assumption).  Feed-forward is computed per trajectory from
//! the circuit's own transfer matrices, so a Pauli error that corrupts a
//! mid-circuit outcome propagates into a wrong correction exactly as it
//! would on hardware.
//!
//! Measurement outcomes follow the Born rule of the *noisy* state; the
//! output distribution of each trajectory is kept exact (no readout shot
//! noise), and trajectories are averaged.

use crate::error::{Error, Result};
use crate::gf2::BitVec;
use crate::noise::NoiseModel;
use crate::seeding::{derive_seed, rng_from_seed, Rng};
use crate::simcore::{total_variation, Distribution, DynamicRunner, OutcomePolicy};
use crate::staircase::circuit::cx_layers;
use crate::staircase::{output_frame, transfer_matrices, DynamicCircuit, Instruction, TransferMatrix};
use rand::Rng as _;
use rayon::prelude::*;

fn one_qubit_depolarizing(
    runner: &mut DynamicRunner,
    rng: &mut Rng,
    p: f64,
    q: usize,
) -> Result<()> {
    if p > 0.0 && rng.gen::<f64>() < p {
        match rng.gen_range(0..3) {
            0 => runner.apply_x(q)?,
            1 => runner.apply_y(q)?,
            _ => runner.apply_z(q)?,
        }
    }
    Ok(())
}

fn pauli_by_index(runner: &mut DynamicRunner, idx: usize, q: usize) -> Result<()> {
    match idx {
        0 => Ok(()),
        1 => runner.apply_x(q),
        2 => runner.apply_y(q),
        _ => runner.apply_z(q),
    }
}

fn two_qubit_depolarizing(
    runner: &mut DynamicRunner,
    rng: &mut Rng,
    nm: &NoiseModel,
    a: usize,
    b: usize,
) -> Result<()> {
    if nm.marginal_depolarizing {
        one_qubit_depolarizing(runner, rng, nm.p2, a)?;
        one_qubit_depolarizing(runner, rng, nm.p2, b)?;
        return Ok(());
    }
    if nm.p2 > 0.0 && rng.gen::<f64>() < nm.p2 {
        let k = rng.gen_range(1..16usize);
        pauli_by_index(runner, k % 4, a)?;
        pauli_by_index(runner, k / 4, b)?;
    }
    Ok(())
}

fn dephase(
    runner: &mut DynamicRunner,
    rng: &mut Rng,
    nm: &NoiseModel,
    q: usize,
    layers: usize,
) -> Result<()> {
    let p = nm.dephasing_probability(layers);
    if p > 0.0 && rng.gen::<f64>() < p {
        runner.apply_z(q)?;
    }
    Ok(())
}

/// One full noisy trajectory: returns the exact output distribution of
/// the corrected final state.
#[allow(clippy::too_many_arguments)]
fn trajectory(
    c: &DynamicCircuit,
    nm: &NoiseModel,
    transfers: &[TransferMatrix],
    layers: &[Option<usize>],
    total_layers: usize,
    seed: u64,
    index: u64,
) -> Result<Vec<f64>> {
    let n = c.n_system;
    let mut runner = DynamicRunner::new(
        n,
        c.n_auxiliary,
        OutcomePolicy::Sample(derive_seed(seed, "outcomes", index)),
    )?;
    let mut rng = rng_from_seed(derive_seed(seed, "noise", index));
    // Time of the last gate seen by each qubit, in wall-clock layers.
    let mut busy = vec![0usize; c.n_qubits()];

    for q in 0..n {
        runner.apply_h(q)?;
        one_qubit_depolarizing(&mut runner, &mut rng, nm.p1, q)?;
    }
    for (i, instruction) in c.instructions.iter().enumerate() {
        match *instruction {
            Instruction::Cx { control, target } => {
                let layer = layers[i].expect("CX instructions carry a layer");
                for q in [control, target] {
                    // Idle span since this qubit's previous gate, then the
                    // dephasing event of the layer the gate occupies.
                    dephase(&mut runner, &mut rng, nm, q, (layer - 1).saturating_sub(busy[q]))?;
                }
                runner.apply_cx(control, target)?;
                two_qubit_depolarizing(&mut runner, &mut rng, nm, control, target)?;
                for q in [control, target] {
                    dephase(&mut runner, &mut rng, nm, q, 1)?;
                    busy[q] = layer;
                }
            }
            Instruction::H { q } => {
                runner.apply_h(q)?;
                one_qubit_depolarizing(&mut runner, &mut rng, nm.p1, q)?;
            }
            Instruction::Rz { q, angle } => {
                runner.apply_rz(q, angle)?;
                one_qubit_depolarizing(&mut runner, &mut rng, nm.p1, q)?;
            }
            // Measurements and resets are ideal and instantaneous.
            other => runner.apply_instruction(&other)?,
        }
    }
    // Trailing idle time up to the end of the padded schedule.
    for q in 0..c.n_qubits() {
        if runner.is_live(q) {
            dephase(&mut runner, &mut rng, nm, q, total_layers.saturating_sub(busy[q]))?;
        }
    }

    let (mut state, outcomes, _) = runner.finish()?;
    if !transfers.is_empty() {
        let frame = output_frame(transfers, &outcomes)?;
        let mask = frame.support().iter().fold(0usize, |m, &q| m | 1 << q);
        state.apply_z_string(mask);
    }
    for q in 0..n {
        state.apply_h(q);
    }
    Ok(state.amps().iter().map(|a| a.norm_sqr()).collect())
}

fn run_trajectories(
    c: &DynamicCircuit,
    nm: &NoiseModel,
    trajectories: usize,
    seed: u64,
    pad_layers: usize,
) -> Result<Distribution> {
    if trajectories == 0 {
        return Err(Error::InvalidArgument(
            "at least one trajectory is required".into(),
        ));
    }
    c.validate()?;
    let transfers = transfer_matrices(c)?;
    let (layers, depth) = cx_layers(c);
    let total_layers = depth + pad_layers;
    let dim = 1usize << c.n_system;

    let sum = (0..trajectories as u64)
        .into_par_iter()
        .map(|t| trajectory(c, nm, &transfers, &layers, total_layers, seed, t))
        .try_reduce(
            || vec![0.0f64; dim],
            |mut acc, probs| {
                for (a, p) in acc.iter_mut().zip(&probs) {
                    *a += p;
                }
                Ok(acc)
            },
        )?;
    Distribution::new(sum.into_iter().map(|p| p / trajectories as f64).collect())
}

/// Monte Carlo estimate of the noisy output distribution: `trajectories`
/// Pauli-injection runs, each exact up to the sampled error locations,
/// averaged.  Reproducible for a given seed regardless of thread count.
pub fn noisy_distribution(
    c: &DynamicCircuit,
    nm: &NoiseModel,
    trajectories: usize,
    seed: u64,
) -> Result<Distribution> {
    run_trajectories(c, nm, trajectories, seed, 0)
}

/// The noiseless output distribution of the sampling convention (prepare
/// `|+…+⟩`, run the circuit, read out in the X basis with feed-forward).
/// Outcome independence makes any single branch exact, so the all-zero
/// branch is used deterministically.
pub fn ideal_distribution(c: &DynamicCircuit) -> Result<Distribution> {
    c.validate()?;
    let transfers = transfer_matrices(c)?;
    let mut runner = DynamicRunner::new(
        c.n_system,
        c.n_auxiliary,
        OutcomePolicy::Fixed(BitVec::zeros(c.n_measurements())),
    )?;
    for q in 0..c.n_system {
        runner.apply_h(q)?;
    }
    for instruction in &c.instructions {
        runner.apply_instruction(instruction)?;
    }
    let (mut state, outcomes, _) = runner.finish()?;
    if !transfers.is_empty() {
        // All-zero outcomes induce the zero frame; kept for symmetry.
        let frame = output_frame(&transfers, &outcomes)?;
        debug_assert!(frame.is_zero());
    }
    for q in 0..c.n_system {
        state.apply_h(q);
    }
    Distribution::new(state.amps().iter().map(|a| a.norm_sqr()).collect())
}

/// δ_TV between the noisy and ideal distributions as a function of total
/// circuit duration, produced by padding idle layers (pure dephasing
/// accrues during the padding; depolarizing does not).  Returns
/// `(Δt in ns, δ_TV)` pairs.
pub fn dephasing_saturation_series(
    c: &DynamicCircuit,
    nm: &NoiseModel,
    pad_layers: &[usize],
    trajectories: usize,
    seed: u64,
) -> Result<Vec<(f64, f64)>> {
    let ideal = ideal_distribution(c)?;
    let (_, depth) = cx_layers(c);
    let mut out = Vec::with_capacity(pad_layers.len());
    for (k, &pad) in pad_layers.iter().enumerate() {
        let noisy = run_trajectories(c, nm, trajectories, derive_seed(seed, "pad", k as u64), pad)?;
        let dt = (depth + pad) as f64 * nm.cx_layer_ns;
        out.push((dt, total_variation(&noisy, &ideal)?));
    }
    Ok(out)
}

/// Which knob a sweep turns.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum SweepParameter {
    /// Two-qubit depolarizing probability p2.
    TwoQubitDepolarizing,
    /// Dephasing time T2, in nanoseconds.
    DephasingT2Ns,
}

/// One row of a δ_TV sweep table.
#[derive(Clone, Debug)]
pub struct SweepPoint {
    pub value: f64,
    pub mean_tv: f64,
    pub stddev: f64,
}

/// Sweep one noise parameter over a grid, measuring δ_TV(noisy, ideal)
/// for every seed and reporting mean and sample spread per grid value.
pub fn tv_sweep(
    c: &DynamicCircuit,
    base: &NoiseModel,
    parameter: SweepParameter,
    values: &[f64],
    trajectories: usize,
    seeds: &[u64],
) -> Result<Vec<SweepPoint>> {
    if values.is_empty() || seeds.is_empty() {
        return Err(Error::InvalidArgument(
            "a sweep needs at least one grid value and one seed".into(),
        ));
    }
    let ideal = ideal_distribution(c)?;
    let mut table = Vec::with_capacity(values.len());
    for &value in values {
        let mut nm = base.clone();
        match parameter {
            SweepParameter::TwoQubitDepolarizing => nm.p2 = value,
            SweepParameter::DephasingT2Ns => nm.t2_ns = value,
        }
        let tvs: Vec<f64> = seeds
            .iter()
            .map(|&s| {
                let noisy = noisy_distribution(c, &nm, trajectories, s)?;
                total_variation(&noisy, &ideal)
            })
            .collect::<Result<_>>()?;
        let mean = tvs.iter().sum::<f64>() / tvs.len() as f64;
        let stddev = if tvs.len() > 1 {
            (tvs.iter().map(|t| (t - mean).powi(2)).sum::<f64>() / (tvs.len() - 1) as f64).sqrt()
        } else {
            0.0
        };
        table.push(SweepPoint { value, mean_tv: mean, stddev });
    }
    Ok(table)
}
