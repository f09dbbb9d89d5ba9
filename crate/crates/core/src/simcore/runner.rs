//! Execution of dynamic circuits with mid-circuit measurement.
//!
//! The register holds the system qubits plus only the auxiliaries that are
//! currently in use: an auxiliary is allocated on first contact, removed
//! from the state the moment it is measured, and revived by a reset.  This
//! keeps the dense simulation at `n + (active auxiliaries)` qubits instead
//! of `n + a`, which is what makes deep staircases with recycled
//! auxiliaries tractable.
//!
//! System qubits always occupy slots `0..n`, so nothing needs reshuffling
//! when the run finishes.

use crate::error::{Error, Result};
use crate::gf2::BitVec;
use crate::seeding::{rng_from_seed, Rng};
use crate::simcore::state::StateVector;
use crate::staircase::{DynamicCircuit, Instruction};
use rand::Rng as _;

/// How measurement outcomes are decided during a run.
#[derive(Clone, Debug)]
pub enum OutcomePolicy {
    /// Draw each outcome from the Born rule with a seeded generator.
    Sample(u64),
    /// Replay a fixed outcome record (length must match the circuit's
    /// measurement count); the returned probability is the branch weight.
    Fixed(BitVec),
}

#[derive(Clone, Debug)]
enum OutcomeSource {
    Rng(Rng),
    Fixed { bits: BitVec, next: usize },
}

/// One fully resolved measurement branch.
#[derive(Clone, Debug)]
pub struct Branch {
    pub outcomes: BitVec,
    pub probability: f64,
    pub state: StateVector,
}

#[derive(Clone, Debug)]
pub struct DynamicRunner {
    n_system: usize,
    n_auxiliary: usize,
    state: StateVector,
    /// Slot of each global qubit in the live register; `None` for
    /// auxiliaries that are unallocated (still |0⟩) or dead (measured).
    slots: Vec<Option<usize>>,
    /// Auxiliaries that have been measured and not yet reset.
    dead: Vec<bool>,
    outcomes: Vec<bool>,
    probability: f64,
    source: OutcomeSource,
}

impl DynamicRunner {
    pub fn new(n_system: usize, n_auxiliary: usize, policy: OutcomePolicy) -> Result<Self> {
        let source = match policy {
            OutcomePolicy::Sample(seed) => OutcomeSource::Rng(rng_from_seed(seed)),
            OutcomePolicy::Fixed(bits) => OutcomeSource::Fixed { bits, next: 0 },
        };
        Ok(DynamicRunner {
            n_system,
            n_auxiliary,
            state: StateVector::zero_state(n_system)?,
            slots: (0..n_system + n_auxiliary)
                .map(|q| if q < n_system { Some(q) } else { None })
                .collect(),
            dead: vec![false; n_auxiliary],
            outcomes: Vec::new(),
            probability: 1.0,
            source,
        })
    }

    pub fn n_live_qubits(&self) -> usize {
        self.state.n_qubits()
    }

    /// True while the qubit may still participate in gates (system qubits
    /// always; auxiliaries unless they sit measured and un-reset).
    pub fn is_live(&self, q: usize) -> bool {
        q < self.n_system || !self.dead[q - self.n_system]
    }

    pub fn outcomes_so_far(&self) -> &[bool] {
        &self.outcomes
    }

    pub fn probability(&self) -> f64 {
        self.probability
    }

    pub fn state(&self) -> &StateVector {
        &self.state
    }

    fn slot_for_gate(&mut self, q: usize) -> Result<usize> {
        let total = self.n_system + self.n_auxiliary;
        if q >= total {
            return Err(Error::InvalidArgument(format!(
                "qubit {q} out of range for a register of {total}"
            )));
        }
        if let Some(s) = self.slots[q] {
            return Ok(s);
        }
        let aux = q - self.n_system;
        if self.dead[aux] {
            return Err(Error::InvalidArgument(format!(
                "measured auxiliary {q} used in a gate before reset"
            )));
        }
        // First contact: bring the auxiliary into the register in |0⟩.
        self.state.push_zero_qubit()?;
        let slot = self.state.n_qubits() - 1;
        self.slots[q] = Some(slot);
        Ok(slot)
    }

    pub fn apply_h(&mut self, q: usize) -> Result<()> {
        let s = self.slot_for_gate(q)?;
        self.state.apply_h(s);
        Ok(())
    }

    pub fn apply_x(&mut self, q: usize) -> Result<()> {
        let s = self.slot_for_gate(q)?;
        self.state.apply_x(s);
        Ok(())
    }

    pub fn apply_y(&mut self, q: usize) -> Result<()> {
        let s = self.slot_for_gate(q)?;
        self.state.apply_y(s);
        Ok(())
    }

    pub fn apply_z(&mut self, q: usize) -> Result<()> {
        let s = self.slot_for_gate(q)?;
        self.state.apply_z(s);
        Ok(())
    }

    pub fn apply_rz(&mut self, q: usize, theta: f64) -> Result<()> {
        let s = self.slot_for_gate(q)?;
        self.state.apply_rz(s, theta);
        Ok(())
    }

    pub fn apply_rx(&mut self, q: usize, theta: f64) -> Result<()> {
        let s = self.slot_for_gate(q)?;
        self.state.apply_rx(s, theta);
        Ok(())
    }

    pub fn apply_cx(&mut self, control: usize, target: usize) -> Result<()> {
        let c = self.slot_for_gate(control)?;
        let t = self.slot_for_gate(target)?;
        self.state.apply_cx(c, t);
        Ok(())
    }

    /// Measure an auxiliary in the X basis, deciding the outcome from the
    /// runner's policy, and drop it from the live register.
    pub fn measure_x(&mut self, aux_qubit: usize) -> Result<bool> {
        self.measure_x_impl(aux_qubit, None)
    }

    /// Measure with the outcome imposed (used by branch enumeration).
    /// Returns the forced outcome's Born probability for this step.
    pub fn measure_x_forced(&mut self, aux_qubit: usize, outcome: bool) -> Result<f64> {
        let before = self.probability;
        self.measure_x_impl(aux_qubit, Some(outcome))?;
        Ok(self.probability / before)
    }

    fn measure_x_impl(&mut self, aux_qubit: usize, forced: Option<bool>) -> Result<bool> {
        if aux_qubit < self.n_system || aux_qubit >= self.n_system + self.n_auxiliary {
            return Err(Error::InvalidArgument(format!(
                "measurement target {aux_qubit} is not an auxiliary qubit"
            )));
        }
        let aux = aux_qubit - self.n_system;
        if self.dead[aux] {
            return Err(Error::InvalidArgument(format!(
                "auxiliary {aux_qubit} measured twice without reset"
            )));
        }
        let bit;
        let p;
        match self.slots[aux_qubit].take() {
            None => {
                // Untouched auxiliary: X-measuring |0⟩ is a fair coin that
                // leaves the rest of the register alone.
                bit = self.decide(forced, 0.5)?;
                p = 0.5;
            }
            Some(slot) => {
                self.state.apply_h(slot);
                let p1 = self.state.probability_of_one(slot);
                bit = self.decide(forced, p1)?;
                p = self.state.project_and_remove(slot, bit);
                for entry in self.slots.iter_mut().flatten() {
                    if *entry > slot {
                        *entry -= 1;
                    }
                }
            }
        }
        self.dead[aux] = true;
        self.outcomes.push(bit);
        self.probability *= p;
        Ok(bit)
    }

    fn decide(&mut self, forced: Option<bool>, p1: f64) -> Result<bool> {
        if let Some(bit) = forced {
            return Ok(bit);
        }
        match &mut self.source {
            OutcomeSource::Rng(rng) => Ok(rng.gen::<f64>() < p1),
            OutcomeSource::Fixed { bits, next } => {
                if *next >= bits.len() {
                    return Err(Error::ShapeMismatch(format!(
                        "fixed outcome vector has length {}, but the circuit \
                         performs more measurements",
                        bits.len()
                    )));
                }
                let bit = bits.get(*next);
                *next += 1;
                Ok(bit)
            }
        }
    }

    pub fn reset_aux(&mut self, aux_qubit: usize) -> Result<()> {
        if aux_qubit < self.n_system || aux_qubit >= self.n_system + self.n_auxiliary {
            return Err(Error::InvalidArgument(format!(
                "reset target {aux_qubit} is not an auxiliary qubit"
            )));
        }
        let aux = aux_qubit - self.n_system;
        if self.slots[aux_qubit].is_some() {
            return Err(Error::InvalidArgument(format!(
                "auxiliary {aux_qubit} reset while holding data"
            )));
        }
        // Dead → fresh |0⟩ (allocated lazily); untouched → already |0⟩.
        self.dead[aux] = false;
        Ok(())
    }

    pub fn apply_instruction(&mut self, instruction: &Instruction) -> Result<()> {
        match *instruction {
            Instruction::Cx { control, target } => self.apply_cx(control, target),
            Instruction::H { q } => self.apply_h(q),
            Instruction::Rz { q, angle } => self.apply_rz(q, angle),
            Instruction::MeasureX { aux, .. } => self.measure_x(aux).map(|_| ()),
            Instruction::ResetAux { aux } => self.reset_aux(aux),
        }
    }

    /// Strip the remaining auxiliaries and hand back the system state, the
    /// measurement record, and the probability of the realized branch.
    pub fn finish(mut self) -> Result<(StateVector, BitVec, f64)> {
        // Allocated live auxiliaries must be back in |0⟩; anything else
        // means the circuit left data on a recycled qubit.
        let mut allocated: Vec<(usize, usize)> = (self.n_system..self.n_system + self.n_auxiliary)
            .filter_map(|q| self.slots[q].map(|s| (s, q)))
            .collect();
        allocated.sort_unstable_by(|a, b| b.cmp(a));
        for (slot, q) in allocated {
            let p1 = self.state.probability_of_one(slot);
            if p1 > 1e-9 {
                return Err(Error::InvalidArgument(format!(
                    "auxiliary {q} is still entangled with the system at the \
                     end of the circuit"
                )));
            }
            self.state.project_and_remove(slot, false);
        }
        let outcomes = BitVec::from_bools(&self.outcomes.iter().map(|&b| b).collect::<Vec<_>>());
        Ok((self.state, outcomes, self.probability))
    }
}

/// Run a dynamic circuit from `|0…0⟩` (gates in the circuit are expected to
/// prepare whatever superposition is needed).  Returns the post-measurement
/// system state, the outcome record, and the probability of that record.
pub fn run_dynamic(
    circuit: &DynamicCircuit,
    policy: OutcomePolicy,
) -> Result<(StateVector, BitVec, f64)> {
    circuit.validate()?;
    if let OutcomePolicy::Fixed(bits) = &policy {
        if bits.len() != circuit.n_measurements() {
            return Err(Error::ShapeMismatch(format!(
                "fixed outcome vector has length {}, circuit measures {}",
                bits.len(),
                circuit.n_measurements()
            )));
        }
    }
    let mut runner = DynamicRunner::new(circuit.n_system, circuit.n_auxiliary, policy)?;
    for instruction in &circuit.instructions {
        runner.apply_instruction(instruction)?;
    }
    runner.finish()
}

/// Enumerate every measurement branch depth-first, sharing the common
/// prefix of the computation between the two arms of each measurement.
/// Zero-probability branches are pruned; the returned probabilities sum
/// to 1.
pub fn enumerate_branches(circuit: &DynamicCircuit) -> Result<Vec<Branch>> {
    circuit.validate()?;
    let runner = DynamicRunner::new(
        circuit.n_system,
        circuit.n_auxiliary,
        OutcomePolicy::Sample(0),
    )?;
    let mut branches = Vec::new();
    dfs(runner, &circuit.instructions, 0, &mut branches)?;
    Ok(branches)
}

fn dfs(
    mut runner: DynamicRunner,
    instructions: &[Instruction],
    from: usize,
    out: &mut Vec<Branch>,
) -> Result<()> {
    for (i, instruction) in instructions.iter().enumerate().skip(from) {
        if let Instruction::MeasureX { aux, .. } = *instruction {
            for bit in [false, true] {
                let mut arm = runner.clone();
                let p = arm.measure_x_forced(aux, bit)?;
                if p > 1e-15 {
                    dfs(arm, instructions, i + 1, out)?;
                }
            }
            return Ok(());
        }
        runner.apply_instruction(instruction)?;
    }
    let (state, outcomes, probability) = runner.finish()?;
    out.push(Branch { outcomes, probability, state });
    Ok(())
}
