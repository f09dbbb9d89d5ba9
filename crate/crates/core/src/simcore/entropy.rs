//! Entanglement entropies and the contraction-cost heuristic ξ.
//!
//! ξ sums the bipartite entanglement entropy (in nats) across every
//! straight vertical and horizontal cut of a rectangular qubit layout.
//! It tracks how expensive the state would be to contract as a 2D
//! tensor network, and is reported relative to a baseline built from
//! linear-depth random nearest-neighbour CX circuits.

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use crate::seeding::{derive_seed, rng_from_seed};
use crate::simcore::state::{phase_state, StateVector};
use crate::staircase::IqpSpec;
use nalgebra::DMatrix;
use num_complex::Complex64;
use rand::seq::SliceRandom;
use rand::Rng as _;
use std::f64::consts::TAU;

/// Eigenvalues below this are treated as numerical zeros of the reduced
/// density operator.
const SPECTRAL_FLOOR: f64 = 1e-12;

/// Von Neumann entropy, in nats, of the reduced state on `subset`.
///
/// The amplitude vector is reshaped into a matrix with `subset` indexing
/// rows and the complement indexing columns; the entropy comes from the
/// spectrum of the smaller Gram matrix.
pub fn entanglement_entropy(state: &StateVector, subset: &[usize]) -> Result<f64> {
    let n = state.n_qubits();
    if subset.is_empty() || subset.len() >= n {
        return Err(Error::InvalidArgument(format!(
            "subset of {} qubits is not a proper bipartition of {n}",
            subset.len()
        )));
    }
    let mut seen = vec![false; n];
    for &q in subset {
        if q >= n {
            return Err(Error::InvalidArgument(format!(
                "qubit {q} out of range for {n}"
            )));
        }
        if seen[q] {
            return Err(Error::InvalidArgument(format!(
                "qubit {q} listed twice in the subset"
            )));
        }
        seen[q] = true;
    }
    let rest: Vec<usize> = (0..n).filter(|&q| !seen[q]).collect();

    let rows = 1usize << subset.len();
    let cols = 1usize << rest.len();
    let mut m = DMatrix::<Complex64>::zeros(rows, cols);
    for (idx, &amp) in state.amps().iter().enumerate() {
        let mut r = 0usize;
        for (i, &q) in subset.iter().enumerate() {
            r |= (idx >> q & 1) << i;
        }
        let mut c = 0usize;
        for (i, &q) in rest.iter().enumerate() {
            c |= (idx >> q & 1) << i;
        }
        m[(r, c)] = amp;
    }

    let gram = if rows <= cols {
        &m * m.adjoint()
    } else {
        m.adjoint() * &m
    };
    let spectrum = gram.symmetric_eigen().eigenvalues;
    Ok(spectrum
        .iter()
        .filter(|&&lambda| lambda > SPECTRAL_FLOOR)
        .map(|&lambda| -lambda * lambda.ln())
        .sum())
}

/// Contraction-cost heuristic: the sum of cut entropies over all vertical
/// and horizontal cuts of a `width × height` layout whose qubit `q` sits
/// at row-major position `(q mod width, q div width)`.
pub fn xi_cost(state: &StateVector, width: usize, height: usize) -> Result<f64> {
    let n = state.n_qubits();
    if width == 0 || height == 0 || width * height != n {
        return Err(Error::ShapeMismatch(format!(
            "a {width}×{height} layout cannot hold {n} qubits"
        )));
    }
    let mut total = 0.0;
    for cut_x in 1..width {
        let subset: Vec<usize> = (0..n).filter(|q| q % width < cut_x).collect();
        total += entanglement_entropy(state, &subset)?;
    }
    for cut_y in 1..height {
        let subset: Vec<usize> = (0..n).filter(|q| q / width < cut_y).collect();
        total += entanglement_entropy(state, &subset)?;
    }
    Ok(total)
}

/// Reference contraction cost of ancilla-free linear-depth preparation:
/// per-qubit rotations conjugated through a depth-`6n` random
/// nearest-neighbour CX circuit on the same grid, with fresh uniform
/// angles, averaged over `instances` draws.
pub fn xi_lin_baseline(
    width: usize,
    height: usize,
    instances: usize,
    seed: u64,
) -> Result<f64> {
    let n = width * height;
    if n == 0 {
        return Err(Error::InvalidArgument("empty layout".into()));
    }
    if instances == 0 {
        return Err(Error::InvalidArgument(
            "the baseline needs at least one instance".into(),
        ));
    }
    let mut edges = Vec::new();
    for q in 0..n {
        if (q + 1) % width != 0 {
            edges.push((q, q + 1));
        }
        if q + width < n {
            edges.push((q, q + width));
        }
    }
    let mut total = 0.0;
    for instance in 0..instances {
        let mut rng = rng_from_seed(derive_seed(seed, "xi-lin", instance as u64));
        let mut forward = BitMatrix::identity(n);
        for _ in 0..6 * n {
            let mut order: Vec<usize> = (0..edges.len()).collect();
            order.shuffle(&mut rng);
            let mut busy = vec![false; n];
            for ei in order {
                let (a, b) = edges[ei];
                if busy[a] || busy[b] {
                    continue;
                }
                busy[a] = true;
                busy[b] = true;
                let (control, target) = if rng.gen::<bool>() { (a, b) } else { (b, a) };
                forward.xor_row(target, control);
            }
        }
        let conjugated = forward
            .transpose()
            .inverse()
            .expect("CX circuits are invertible");
        // Architecture row q is the conjugated support of qubit q's
        // rotation, i.e. column q of the inverse-transpose map.
        let architecture = conjugated.transpose();
        let angles: Vec<f64> = (0..n).map(|_| rng.gen::<f64>() * TAU).collect();
        let spec = IqpSpec::new(architecture, angles)?;
        total += xi_cost(&phase_state(&spec)?, width, height)?;
    }
    Ok(total / instances as f64)
}
