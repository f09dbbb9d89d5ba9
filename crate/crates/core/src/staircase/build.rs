//! Randomized fan-out staircase construction.
//!
//! A staircase runs `2D` measurement rounds, each along a freshly sampled
//! Hamiltonian path over a checkerboard lattice; odd rounds index their
//! path in reverse, so forward and backward ladders alternate.  A round
//! pairs system qubits with auxiliaries ahead of them along the path
//! (copy layer), spreads every auxiliary onto its path successor or one
//! later system qubit (spread layer), then measures and resets all
//! auxiliaries.  Each round occupies exactly two layers of two-qubit
//! gates, so the whole circuit has two-qubit depth `4D`.
//!
//! Resampling the path between the forward and backward ladders matters:
//! with a shared path, a forward chain step of stride `f` meets a backward
//! step of the same stride often enough that the two branches cancel over
//! GF(2), leaving low-weight rows in the staircase's system map whose
//! inverse is the architecture matrix — exactly the sparse defects the
//! randomness criteria detect.  Fresh paths make such collisions O(1/n).

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use crate::grid::{
    random_hamiltonian_path_detailed, GridLayout, HamiltonianPath, PathStats, Role,
};
use crate::seeding::{derive_seed, rng_from_seed, Rng};
use crate::staircase::circuit::{DynamicCircuit, Instruction};
use crate::staircase::transfer::{system_maps, transfer_matrices, TransferMatrix};
use rand::seq::SliceRandom;
use rand::Rng as _;
use serde::Serialize;

/// How the randomized choices went during construction: copy-layer skips,
/// spread-layer window clamps and order-preserving fallbacks, and the path
/// rerouting statistics for each of the `2D` per-round paths.
#[derive(Clone, Debug, Default, Serialize)]
pub struct StaircaseMeta {
    pub depth_rounds: usize,
    pub r1: usize,
    pub r2: usize,
    pub seed: u64,
    /// System qubits that found every forward auxiliary already paired.
    pub skipped_copies: usize,
    /// Spread targets clamped to the nearest valid index past the
    /// auxiliary when the `r1 < k-j < n/r2` window held none.
    pub clamped_spreads: usize,
    /// Spread targets that fell back to the nearest index past the copy
    /// source (keeps the round map invertible when even the clamp failed).
    pub fallback_spreads: usize,
    /// Auxiliaries left without any spread target at all.
    pub skipped_spreads: usize,
    pub path_stats: Vec<PathStats>,
    pub paths: Vec<HamiltonianPath>,
}

/// A built staircase: the dynamic circuit, one transfer matrix per
/// measurement round (outcome bits → end-of-circuit system Z string), the
/// total forward system map `M` of the CX network, and its Z-conjugation
/// map `W = (Mᵀ)⁻¹`, always invertible by construction.
#[derive(Clone, Debug, Serialize)]
pub struct FanoutStaircase {
    pub circuit: DynamicCircuit,
    pub transfers: Vec<TransferMatrix>,
    pub system_map: BitMatrix,
    pub conjugation: BitMatrix,
    pub metadata: StaircaseMeta,
}

/// Split a path into system and auxiliary ordinal lists: element `i` is
/// the global register index of the i-th system (respectively auxiliary)
/// site along the path.
fn path_ordinals(layout: &GridLayout, sites: &[(usize, usize)]) -> (Vec<usize>, Vec<usize>) {
    let n = layout.n_system();
    let mut sys = Vec::with_capacity(n);
    let mut aux = Vec::with_capacity(layout.n_auxiliary());
    for &(x, y) in sites {
        match layout.role(x, y) {
            Role::System => sys.push(layout.system_label(x, y).expect("system site")),
            Role::Auxiliary => aux.push(n + layout.auxiliary_label(x, y).expect("auxiliary site")),
        }
    }
    (sys, aux)
}

/// Pick uniformly between the two nearest of the eligible partners
/// (sorted by increasing path offset).  The bias keeps every round
/// chained along its path — each qubit usually couples a constant
/// distance ahead, so the inverse of the round's system map has rows of
/// extensive weight — while the two-way choice still randomizes the
/// matching from seed to seed.
fn pick_near(eligible: &[usize], rng: &mut Rng) -> usize {
    let w = eligible.len().min(2);
    eligible[rng.gen_range(0..w)]
}

/// Emit one measurement round along the given ordinal lists.
fn ladder_round(
    sys: &[usize],
    aux: &[usize],
    r1: usize,
    r2: usize,
    rng: &mut Rng,
    meta: &mut StaircaseMeta,
    out: &mut Vec<Instruction>,
    next_slot: &mut usize,
) {
    let n = sys.len();
    let a = aux.len();
    let mut aux_taken = vec![false; a];
    let mut source: Vec<Option<usize>> = vec![None; a];

    // Copy layer: each system qubit u pairs with an unpaired auxiliary at
    // path offset v ≥ u within the window (v-u)·r2 < n.
    for u in 0..n {
        let eligible: Vec<usize> =
            (u..a).filter(|&v| !aux_taken[v] && (v - u) * r2 < n).collect();
        match eligible.as_slice() {
            [] => meta.skipped_copies += 1,
            vs => {
                let v = pick_near(vs, rng);
                aux_taken[v] = true;
                source[v] = Some(u);
                out.push(Instruction::Cx { control: sys[u], target: aux[v] });
            }
        }
    }

    // Spread layer: each paired auxiliary v forwards its copy onto one
    // fresh system qubit — either its ladder successor t = v+1, or a
    // random fresh t with r1 < t-v and (t-v)·r2 < n.  The window starts
    // past the successor on purpose: the successor is the deterministic
    // ladder link that chains the whole path together, and the windowed
    // picks are the extras that randomize on top of it.  When neither is
    // available we clamp to the nearest index past v, and failing that
    // past the copy source u — every choice keeps t strictly ahead of u,
    // which makes the round's system map unit-triangular along the path
    // and therefore invertible.
    let mut sys_taken = vec![false; n];
    for v in 0..a {
        let Some(u) = source[v] else { continue };
        let ladder = (v + 1 < n && !sys_taken[v + 1]).then_some(v + 1);
        let eligible: Vec<usize> = (v + 1..n)
            .filter(|&t| !sys_taken[t] && t - v > r1 && (t - v) * r2 < n)
            .collect();
        let pick = match (ladder, eligible.as_slice()) {
            (Some(t), []) => Some(t),
            (Some(t), ws) => Some(if rng.gen_bool(0.5) { t } else { pick_near(ws, rng) }),
            (None, ws @ [_, ..]) => Some(pick_near(ws, rng)),
            (None, []) => {
                if let Some(t) = (v + 1..n).find(|&t| !sys_taken[t]) {
                    meta.clamped_spreads += 1;
                    Some(t)
                } else if let Some(t) = (u + 1..n).find(|&t| !sys_taken[t]) {
                    meta.fallback_spreads += 1;
                    Some(t)
                } else {
                    meta.skipped_spreads += 1;
                    None
                }
            }
        };
        if let Some(t) = pick {
            sys_taken[t] = true;
            out.push(Instruction::Cx { control: aux[v], target: sys[t] });
        }
    }

    // Read out and recycle every auxiliary, in path order.
    for &q in aux {
        out.push(Instruction::MeasureX { aux: q, slot: *next_slot });
        *next_slot += 1;
    }
    for &q in aux {
        out.push(Instruction::ResetAux { aux: q });
    }
}

/// Build a randomized fan-out staircase over a checkerboard layout.
///
/// `depth_rounds` is the number of forward/backward ladder pairs `D`;
/// every one of the `2D` rounds follows a freshly sampled Hamiltonian
/// path, with backward rounds indexing theirs in reverse.  `r1` and `r2`
/// shape the index windows of the copy and spread layers.  Fails when the
/// spread window `r1 < k-j < n/r2` admits no index at all (except at
/// n = 2, where the construction degenerates to the fixed three-qubit
/// ladder).
pub fn build_staircase(
    layout: &GridLayout,
    depth_rounds: usize,
    r1: usize,
    r2: usize,
    seed: u64,
) -> Result<FanoutStaircase> {
    let n = layout.n_system();
    let a = layout.n_auxiliary();
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "staircase needs at least 2 system qubits, layout has {n}"
        )));
    }
    if depth_rounds < 1 || r1 < 1 || r2 < 1 {
        return Err(Error::InvalidArgument(
            "staircase parameters D, r1, r2 must all be at least 1".into(),
        ));
    }
    if n > 2 && (r1 + 1) * r2 >= n {
        return Err(Error::UnsatisfiableWindow {
            step: 11,
            detail: format!(
                "spread window r1 < k-j < n/r2 is empty: (r1+1)·r2 = {} ≥ n = {n}",
                (r1 + 1) * r2
            ),
        });
    }

    let mut rng = rng_from_seed(seed);
    let mut meta = StaircaseMeta {
        depth_rounds,
        r1,
        r2,
        seed,
        ..StaircaseMeta::default()
    };
    let mut circuit = DynamicCircuit::new(n, a);
    let mut slot = 0usize;
    let iterations = 400.max(4 * layout.n_sites());
    for round in 0..2 * depth_rounds {
        let (path, stats) = random_hamiltonian_path_detailed(
            layout,
            (0, 0),
            iterations,
            derive_seed(seed, "path", round as u64),
        )?;
        meta.path_stats.push(stats);

        let mut sites = path.sites.clone();
        if round % 2 == 1 {
            sites.reverse();
        }
        let (sys, aux) = path_ordinals(layout, &sites);
        ladder_round(&sys, &aux, r1, r2, &mut rng, &mut meta, &mut circuit.instructions, &mut slot);

        meta.paths.push(path);
    }

    circuit.validate()?;
    let transfers = transfer_matrices(&circuit)?;
    let (system_map, conjugation) = system_maps(&circuit)?;
    Ok(FanoutStaircase { circuit, transfers, system_map, conjugation, metadata: meta })
}

/// Build a fan-out staircase without geometric constraints: instead of
/// Hamiltonian paths on a lattice, every round orders the `n` system and
/// `n` auxiliary qubits uniformly at random, as permitted by all-to-all
/// connectivity.  Rounds, windows and recycling are otherwise identical
/// to [`build_staircase`].
pub fn build_staircase_all_to_all(
    n: usize,
    depth_rounds: usize,
    r1: usize,
    r2: usize,
    seed: u64,
) -> Result<FanoutStaircase> {
    if n < 2 {
        return Err(Error::InvalidArgument(format!(
            "staircase needs at least 2 system qubits, got {n}"
        )));
    }
    if depth_rounds < 1 || r1 < 1 || r2 < 1 {
        return Err(Error::InvalidArgument(
            "staircase parameters D, r1, r2 must all be at least 1".into(),
        ));
    }
    if n > 2 && (r1 + 1) * r2 >= n {
        return Err(Error::UnsatisfiableWindow {
            step: 11,
            detail: format!(
                "spread window r1 < k-j < n/r2 is empty: (r1+1)·r2 = {} ≥ n = {n}",
                (r1 + 1) * r2
            ),
        });
    }

    let mut rng = rng_from_seed(seed);
    let mut meta = StaircaseMeta {
        depth_rounds,
        r1,
        r2,
        seed,
        ..StaircaseMeta::default()
    };
    let mut circuit = DynamicCircuit::new(n, n);
    let mut slot = 0usize;
    for _ in 0..2 * depth_rounds {
        let mut sys: Vec<usize> = (0..n).collect();
        let mut aux: Vec<usize> = (n..2 * n).collect();
        sys.shuffle(&mut rng);
        aux.shuffle(&mut rng);
        ladder_round(&sys, &aux, r1, r2, &mut rng, &mut meta, &mut circuit.instructions, &mut slot);
    }

    circuit.validate()?;
    let transfers = transfer_matrices(&circuit)?;
    let (system_map, conjugation) = system_maps(&circuit)?;
    Ok(FanoutStaircase { circuit, transfers, system_map, conjugation, metadata: meta })
}

/// Interleave `L` staircase blocks with `L+1` layers of per-qubit Z
/// rotations into one dynamic circuit.
///
/// The result contains only diagonal gates, CX networks, and the blocks'
/// measurements: it is meant to run between a `|+…+⟩` preparation and an
/// X-basis readout, both of which the caller supplies.  Keeping Hadamards
/// out makes the assembled circuit directly amenable to the transfer
/// analysis, whose round parser treats Z rotations as transparent.
pub fn assemble_sampling_circuit(
    blocks: &[FanoutStaircase],
    rotations: &[Vec<f64>],
) -> Result<DynamicCircuit> {
    if blocks.is_empty() {
        return Err(Error::InvalidArgument(
            "a sampling circuit needs at least one staircase block".into(),
        ));
    }
    if rotations.len() != blocks.len() + 1 {
        return Err(Error::ShapeMismatch(format!(
            "{} blocks need {} rotation layers, got {}",
            blocks.len(),
            blocks.len() + 1,
            rotations.len()
        )));
    }
    let n = blocks[0].circuit.n_system;
    let a = blocks[0].circuit.n_auxiliary;
    for (i, b) in blocks.iter().enumerate() {
        if b.circuit.n_system != n || b.circuit.n_auxiliary != a {
            return Err(Error::ShapeMismatch(format!(
                "block {i} acts on {}+{} qubits, block 0 on {n}+{a}",
                b.circuit.n_system, b.circuit.n_auxiliary
            )));
        }
    }
    for (i, layer) in rotations.iter().enumerate() {
        if layer.len() != n {
            return Err(Error::ShapeMismatch(format!(
                "rotation layer {i} has {} angles for {n} system qubits",
                layer.len()
            )));
        }
    }

    let mut out = DynamicCircuit::new(n, a);
    let mut slot_offset = 0usize;
    for (block, layer) in blocks.iter().zip(rotations) {
        for (q, &angle) in layer.iter().enumerate() {
            out.instructions.push(Instruction::Rz { q, angle });
        }
        for instruction in &block.circuit.instructions {
            out.instructions.push(match *instruction {
                Instruction::MeasureX { aux, slot } => {
                    Instruction::MeasureX { aux, slot: slot + slot_offset }
                }
                other => other,
            });
        }
        slot_offset += block.circuit.n_measurements();
    }
    for (q, &angle) in rotations[blocks.len()].iter().enumerate() {
        out.instructions.push(Instruction::Rz { q, angle });
    }
    out.validate()?;
    Ok(out)
}
