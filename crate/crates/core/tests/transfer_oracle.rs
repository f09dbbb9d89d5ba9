//! Dense-simulation oracle for the GF(2) transfer algebra.
//!
//! For every measurement branch `m` of a staircase, applying the Z string
//! `Σ_r T_r m_r` to the branch state must reproduce the all-zero branch
//! exactly, and the all-zero branch itself must be the plain GF(2)
//! permutation `x ↦ Mx` of the input.  Checking this over all branches of
//! randomized staircases pins every column of every transfer matrix
//! against brute-force state-vector evolution.

use mdiqp::gf2::BitVec;
use mdiqp::grid::checkerboard_layout;
use mdiqp::seeding::rng_from_seed;
use mdiqp::simcore::enumerate_branches;
use mdiqp::staircase::{build_staircase, output_frame, Instruction};
use num_complex::Complex64;
use rand::Rng as _;
use std::f64::consts::TAU;

fn z_mask(frame: &BitVec) -> usize {
    frame.support().iter().fold(0usize, |m, &q| m | 1 << q)
}

/// Prepend |+…+⟩ preparation decorated with random Z phases, so the input
/// state has no accidental symmetry that could mask a wrong correction.
fn decorate(circuit: &mdiqp::staircase::DynamicCircuit, seed: u64) -> (mdiqp::staircase::DynamicCircuit, Vec<f64>) {
    let mut rng = rng_from_seed(seed);
    let phases: Vec<f64> = (0..circuit.n_system).map(|_| rng.gen::<f64>() * TAU).collect();
    let mut prep = Vec::new();
    for q in 0..circuit.n_system {
        prep.push(Instruction::H { q });
        prep.push(Instruction::Rz { q, angle: phases[q] });
    }
    let mut out = circuit.clone();
    prep.extend(out.instructions);
    out.instructions = prep;
    (out, phases)
}

#[test]
fn corrected_branches_collapse_onto_the_zero_branch() {
    let cases = [
        (3usize, 1usize, 1usize, 1usize, 1usize, 5u64),
        (5, 1, 1, 1, 1, 6),
        (5, 1, 2, 1, 1, 7),
        (4, 2, 1, 1, 1, 8),
        (3, 3, 1, 1, 2, 9),
        (3, 3, 1, 2, 1, 10),
    ];
    for (w, h, depth, r1, r2, seed) in cases {
        let layout = checkerboard_layout(w, h).unwrap();
        let fs = build_staircase(&layout, depth, r1, r2, seed).unwrap();
        let (decorated, phases) = decorate(&fs.circuit, seed ^ 0xAB);
        let branches = enumerate_branches(&decorated).unwrap();
        let measured = fs.circuit.n_measurements();
        assert_eq!(branches.len(), 1 << measured, "{w}x{h} D={depth}");

        // Reference: the zero branch, which must equal the permuted input.
        let zero = branches
            .iter()
            .find(|b| b.outcomes.is_zero())
            .expect("zero branch present");
        let n = fs.circuit.n_system;
        let scale = (1.0 / (1u64 << n) as f64).sqrt();
        for x in 0..1usize << n {
            let phase: f64 = (0..n)
                .map(|q| if x >> q & 1 == 0 { phases[q] } else { -phases[q] })
                .sum();
            let y: usize = (0..n)
                .filter(|&r| {
                    (0..n).fold(false, |acc, c| {
                        acc ^ (fs.system_map.get(r, c) && x >> c & 1 == 1)
                    })
                })
                .fold(0, |m, r| m | 1 << r);
            let expected = Complex64::from_polar(scale, phase);
            assert!(
                (zero.state.amp(y) - expected).norm() < 1e-10,
                "{w}x{h} D={depth}: zero branch is not the GF(2) permutation"
            );
        }

        // Every other branch, frame-corrected, must coincide with it.
        for b in &branches {
            assert!((b.probability - 0.5f64.powi(measured as i32)).abs() < 1e-12);
            let frame = output_frame(&fs.transfers, &b.outcomes).unwrap();
            let mut corrected = b.state.clone();
            corrected.apply_z_string(z_mask(&frame));
            let fidelity = corrected.fidelity(&zero.state).unwrap();
            assert!(
                fidelity >= 1.0 - 1e-10,
                "{w}x{h} D={depth} branch {:?}: fidelity {fidelity}",
                b.outcomes.support()
            );
        }
    }
}

/// Flipping a single outcome bit must displace the branch by exactly the Z
/// string in the corresponding transfer column — checked densely, one
/// measurement at a time.
#[test]
fn single_outcome_flips_match_transfer_columns() {
    let layout = checkerboard_layout(5, 1).unwrap();
    let fs = build_staircase(&layout, 2, 1, 1, 42).unwrap();
    let (decorated, _) = decorate(&fs.circuit, 0xF00D);
    let branches = enumerate_branches(&decorated).unwrap();
    let zero = branches.iter().find(|b| b.outcomes.is_zero()).unwrap();

    let measured = fs.circuit.n_measurements();
    for k in 0..measured {
        let single = branches
            .iter()
            .find(|b| b.outcomes.support() == vec![k])
            .expect("single-bit branch present");
        let mut record = BitVec::zeros(measured);
        record.set(k, true);
        let frame = output_frame(&fs.transfers, &record).unwrap();
        let mut corrected = single.state.clone();
        corrected.apply_z_string(z_mask(&frame));
        let fidelity = corrected.fidelity(&zero.state).unwrap();
        assert!(
            fidelity >= 1.0 - 1e-10,
            "measurement {k}: transfer column fails densely ({fidelity})"
        );
    }
}
