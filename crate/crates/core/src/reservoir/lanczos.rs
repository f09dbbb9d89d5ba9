//! Iterative lowest-eigenpair solver for real symmetric operators.
//!
//! A block Krylov basis of width `k` is grown one block of matvecs at a
//! time with full reorthogonalization (the classic three-term recurrence
//! loses orthogonality long before 20 eigenpairs converge at these
//! scales, and the bases here are small enough that the cure is cheap).
//! The block width matters for correctness, not just speed: a
//! single-vector recurrence converges to *one* Ritz pair per degenerate
//! cluster with a perfectly small residual, silently dropping the other
//! copies, while a random block of width ≥ the sought multiplicity
//! captures the whole cluster almost surely.  Operator images are
//! retained so the Rayleigh–Ritz projection and the residual norms come
//! for free; directions that collapse during reorthogonalization (an
//! invariant subspace was exhausted) restart from fresh random vectors.

use crate::error::{Error, Result};
use crate::seeding::rng_from_seed;
use nalgebra::DMatrix;
use rand::Rng as _;

/// Diagnostics from a solver run.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct LanczosReport {
    /// Matrix–vector products consumed.
    pub iterations: usize,
    /// Collapsed directions replaced by fresh random starts.
    pub restarts: usize,
    /// Largest residual ‖A·y − λ·y‖ among the returned pairs.
    pub max_residual: f64,
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

/// Orthonormalize `w` against the basis, re-projecting whenever a pass
/// cancels most of the vector (heavy cancellation leaves a rounding
/// residue of relative size ε/‖remainder‖, which would poison the basis
/// if accepted after a fixed number of passes).  Returns false when `w`
/// lies in the span.
fn orthonormalize(w: &mut [f64], basis: &[Vec<f64>]) -> bool {
    let n0 = norm(w);
    if !(n0 > 1e-300) {
        return false;
    }
    w.iter_mut().for_each(|x| *x /= n0);
    for _ in 0..8 {
        for u in basis {
            let c = dot(w, u);
            for (wi, ui) in w.iter_mut().zip(u) {
                *wi -= c * ui;
            }
        }
        let n = norm(w);
        if n < 1e-12 {
            return false;
        }
        w.iter_mut().for_each(|x| *x /= n);
        if n > 0.5 && basis.iter().all(|u| dot(w, u).abs() < 1e-11) {
            return true;
        }
    }
    false
}

fn random_vector(dim: usize, rng: &mut crate::seeding::Rng) -> Vec<f64> {
    (0..dim).map(|_| rng.gen_range(-1.0..1.0)).collect()
}

struct Workspace {
    basis: Vec<Vec<f64>>,
    images: Vec<Vec<f64>>,
    /// Projected operator `T[i][j] = vᵢ·A·vⱼ`, grown with the basis.
    projected: DMatrix<f64>,
}

impl Workspace {
    /// Append `v` (already orthonormal to the basis), compute its image,
    /// and extend the projection.
    fn push(&mut self, v: Vec<f64>, matvec: &mut impl FnMut(&[f64], &mut [f64])) {
        let dim = v.len();
        let m = self.basis.len();
        let mut image = vec![0.0; dim];
        matvec(&v, &mut image);
        self.basis.push(v);
        for j in 0..m {
            // Symmetrize: in exact arithmetic vⱼ·A·vₘ = vₘ·A·vⱼ.
            let t = 0.5 * (dot(&self.basis[j], &image) + dot(&self.basis[m], &self.images[j]));
            self.projected[(j, m)] = t;
            self.projected[(m, j)] = t;
        }
        self.projected[(m, m)] = dot(&self.basis[m], &image);
        self.images.push(image);
    }

    /// Lowest-`k` Ritz pairs of the projected operator, their operator
    /// images (assembled from the stored ones, no fresh matvecs), and
    /// the worst residual ‖A·y − λ·y‖.
    fn ritz(&self, k: usize) -> (Vec<f64>, Vec<Vec<f64>>, Vec<Vec<f64>>, f64) {
        let m = self.basis.len();
        let dim = self.basis[0].len();
        let eig = self.projected.view((0, 0), (m, m)).into_owned().symmetric_eigen();
        let mut order: Vec<usize> = (0..m).collect();
        order.sort_by(|&a, &b| eig.eigenvalues[a].partial_cmp(&eig.eigenvalues[b]).unwrap());
        let mut values = Vec::with_capacity(k);
        let mut vectors = Vec::with_capacity(k);
        let mut images = Vec::with_capacity(k);
        let mut worst: f64 = 0.0;
        for &col in order.iter().take(k) {
            let lambda = eig.eigenvalues[col];
            let mut y = vec![0.0; dim];
            let mut ay = vec![0.0; dim];
            for j in 0..m {
                let s = eig.eigenvectors[(j, col)];
                for d in 0..dim {
                    y[d] += s * self.basis[j][d];
                    ay[d] += s * self.images[j][d];
                }
            }
            let resid: f64 =
                ay.iter().zip(&y).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
            worst = worst.max(resid);
            let n = norm(&y);
            y.iter_mut().for_each(|x| *x /= n);
            ay.iter_mut().for_each(|x| *x /= n);
            values.push(lambda);
            vectors.push(y);
            images.push(ay);
        }
        (values, vectors, images, worst)
    }
}

/// Compute the `k` lowest eigenvalues and eigenvectors of the symmetric
/// operator given by `matvec` (which must accumulate `A·v` into its
/// second argument).  Returns eigenvalues in ascending order, matching
/// unit eigenvectors, and run diagnostics.
pub fn lowest_eigenpairs(
    dim: usize,
    k: usize,
    mut matvec: impl FnMut(&[f64], &mut [f64]),
    seed: u64,
    tol: f64,
) -> Result<(Vec<f64>, Vec<Vec<f64>>, LanczosReport)> {
    if k == 0 || k > dim {
        return Err(Error::InvalidArgument(format!(
            "need between 1 and {dim} eigenpairs, got {k}"
        )));
    }
    let mut rng = rng_from_seed(seed);
    let cap = dim.min(6 * k + 60);
    let mut ws = Workspace {
        basis: Vec::with_capacity(cap),
        images: Vec::with_capacity(cap),
        projected: DMatrix::zeros(cap, cap),
    };
    let mut restarts = 0usize;

    // Seed block: k random orthonormal directions.
    let mut block: Vec<Vec<f64>> = Vec::with_capacity(k);
    for _ in 0..k {
        block.push(random_vector(dim, &mut rng));
    }
    loop {
        for mut v in block.drain(..) {
            if ws.basis.len() == cap {
                break;
            }
            if !orthonormalize(&mut v, &ws.basis) {
                // Direction exhausted; try a fresh one.
                restarts += 1;
                v = random_vector(dim, &mut rng);
                if !orthonormalize(&mut v, &ws.basis) {
                    continue; // the basis already spans the whole space
                }
            }
            ws.push(v, &mut matvec);
        }

        let (values, vectors, ritz_images, worst) = ws.ritz(k);
        let report = LanczosReport { iterations: ws.basis.len(), restarts, max_residual: worst };
        if worst <= tol {
            return Ok((values, vectors, report));
        }
        if ws.basis.len() >= dim.min(cap) {
            let reach = if ws.basis.len() >= dim { "the full space" } else { "its cap" };
            return Err(Error::NoConvergence(format!(
                "basis reached {reach} ({} vectors, dimension {dim}) after {} matvecs with \
                 residual {worst:.2e} > tol {tol:.2e} ({restarts} restarts)",
                ws.basis.len(),
                report.iterations
            )));
        }
        // Next block: the Ritz images A·y — a Krylov step aimed at the
        // sought corner of the spectrum.
        block = ritz_images;
    }
}
