//! Dense state vectors and gate kernels.
//!
//! Amplitude index bit `q` is qubit `q` (qubit 0 is the least significant
//! bit).  All kernels are exact; unitarity is the only source of
//! normalization, so the L2 norm stays at 1 to machine precision.

use crate::error::{Error, Result};
use crate::staircase::IqpSpec;
use num_complex::Complex64;
use std::f64::consts::FRAC_1_SQRT_2;

/// Largest register the dense engine will allocate (2^24 amplitudes is
/// 256 MiB; anything bigger is a configuration mistake, not a job).
pub const MAX_QUBITS: usize = 24;

fn check_cap(n: usize) -> Result<()> {
    if n > MAX_QUBITS {
        return Err(Error::QubitCap { qubits: n, cap: MAX_QUBITS });
    }
    Ok(())
}

#[derive(Clone, Debug)]
pub struct StateVector {
    n_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// |0…0⟩ on `n` qubits.
    pub fn zero_state(n: usize) -> Result<Self> {
        check_cap(n)?;
        let mut amps = vec![Complex64::ZERO; 1 << n];
        amps[0] = Complex64::ONE;
        Ok(StateVector { n_qubits: n, amps })
    }

    /// |+⟩^{⊗n}.
    pub fn plus_state(n: usize) -> Result<Self> {
        check_cap(n)?;
        let amp = Complex64::new((1.0 / (1u64 << n) as f64).sqrt(), 0.0);
        Ok(StateVector { n_qubits: n, amps: vec![amp; 1 << n] })
    }

    pub fn from_amplitudes(amps: Vec<Complex64>) -> Result<Self> {
        let len = amps.len();
        if len == 0 || !len.is_power_of_two() {
            return Err(Error::ShapeMismatch(format!(
                "amplitude vector length {len} is not a power of two"
            )));
        }
        let n = len.trailing_zeros() as usize;
        check_cap(n)?;
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum();
        if (norm - 1.0).abs() > 1e-9 {
            return Err(Error::InvalidArgument(format!(
                "amplitudes have squared norm {norm}, expected 1"
            )));
        }
        Ok(StateVector { n_qubits: n, amps })
    }

    pub fn n_qubits(&self) -> usize {
        self.n_qubits
    }

    pub fn amps(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn amp(&self, index: usize) -> Complex64 {
        self.amps[index]
    }

    pub fn norm(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt()
    }

    pub fn inner(&self, other: &StateVector) -> Result<Complex64> {
        if self.n_qubits != other.n_qubits {
            return Err(Error::ShapeMismatch(format!(
                "inner product between {} and {} qubits",
                self.n_qubits, other.n_qubits
            )));
        }
        Ok(self
            .amps
            .iter()
            .zip(&other.amps)
            .map(|(a, b)| a.conj() * b)
            .sum())
    }

    /// |⟨self|other⟩|².
    pub fn fidelity(&self, other: &StateVector) -> Result<f64> {
        Ok(self.inner(other)?.norm_sqr())
    }

    pub fn apply_h(&mut self, q: usize) {
        let mask = 1usize << q;
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                let j = i | mask;
                let (a, b) = (self.amps[i], self.amps[j]);
                self.amps[i] = (a + b) * FRAC_1_SQRT_2;
                self.amps[j] = (a - b) * FRAC_1_SQRT_2;
            }
        }
    }

    pub fn apply_x(&mut self, q: usize) {
        let mask = 1usize << q;
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                self.amps.swap(i, i | mask);
            }
        }
    }

    pub fn apply_y(&mut self, q: usize) {
        let mask = 1usize << q;
        let i_pos = Complex64::new(0.0, 1.0);
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                let j = i | mask;
                let (a, b) = (self.amps[i], self.amps[j]);
                self.amps[i] = -i_pos * b;
                self.amps[j] = i_pos * a;
            }
        }
    }

    pub fn apply_z(&mut self, q: usize) {
        let mask = 1usize << q;
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if i & mask != 0 {
                *amp = -*amp;
            }
        }
    }

    /// exp(iθZ_q) = diag(e^{iθ}, e^{-iθ}).
    pub fn apply_rz(&mut self, q: usize, theta: f64) {
        let mask = 1usize << q;
        let plus = Complex64::from_polar(1.0, theta);
        let minus = plus.conj();
        for (i, amp) in self.amps.iter_mut().enumerate() {
            *amp *= if i & mask == 0 { plus } else { minus };
        }
    }

    /// exp(iθX_q).
    pub fn apply_rx(&mut self, q: usize, theta: f64) {
        let mask = 1usize << q;
        let c = Complex64::new(theta.cos(), 0.0);
        let is = Complex64::new(0.0, theta.sin());
        for i in 0..self.amps.len() {
            if i & mask == 0 {
                let j = i | mask;
                let (a, b) = (self.amps[i], self.amps[j]);
                self.amps[i] = c * a + is * b;
                self.amps[j] = is * a + c * b;
            }
        }
    }

    pub fn apply_cx(&mut self, control: usize, target: usize) {
        let c_mask = 1usize << control;
        let t_mask = 1usize << target;
        for i in 0..self.amps.len() {
            if i & c_mask != 0 && i & t_mask == 0 {
                self.amps.swap(i, i | t_mask);
            }
        }
    }

    /// Multiply every amplitude by e^{iφ}.
    pub fn apply_global_phase(&mut self, phi: f64) {
        let factor = Complex64::from_polar(1.0, phi);
        for amp in &mut self.amps {
            *amp *= factor;
        }
    }

    /// Z on every qubit whose bit is set in `mask`.
    pub fn apply_z_string(&mut self, mask: usize) {
        for (i, amp) in self.amps.iter_mut().enumerate() {
            if ((i & mask).count_ones() & 1) == 1 {
                *amp = -*amp;
            }
        }
    }

    /// Probability of reading 1 on qubit `q` in the computational basis.
    pub fn probability_of_one(&self, q: usize) -> f64 {
        let mask = 1usize << q;
        self.amps
            .iter()
            .enumerate()
            .filter(|(i, _)| i & mask != 0)
            .map(|(_, a)| a.norm_sqr())
            .sum()
    }

    /// Project qubit `q` onto `bit`, renormalize, and drop the qubit from
    /// the register.  Returns the branch probability.  Projections onto a
    /// zero-probability branch leave a zeroed state.
    pub fn project_and_remove(&mut self, q: usize, bit: bool) -> f64 {
        let p1 = self.probability_of_one(q);
        let p = if bit { p1 } else { 1.0 - p1 };
        let mask = 1usize << q;
        let low = mask - 1;
        let mut kept = vec![Complex64::ZERO; self.amps.len() / 2];
        if p > 0.0 {
            let scale = 1.0 / p.sqrt();
            for (i, slot) in kept.iter_mut().enumerate() {
                let src = ((i & !low) << 1) | (usize::from(bit) << q) | (i & low);
                *slot = self.amps[src] * scale;
            }
        }
        self.amps = kept;
        self.n_qubits -= 1;
        p
    }

    /// Append a fresh qubit in |0⟩ as the new highest slot.
    pub fn push_zero_qubit(&mut self) -> Result<()> {
        check_cap(self.n_qubits + 1)?;
        self.amps.resize(self.amps.len() * 2, Complex64::ZERO);
        self.n_qubits += 1;
        Ok(())
    }

    /// ⟨ψ| ⊗_{q ∈ mask} Z_q |ψ⟩.
    pub fn expectation_z_string(&self, mask: usize) -> f64 {
        self.amps
            .iter()
            .enumerate()
            .map(|(i, a)| {
                let sign = 1.0 - 2.0 * f64::from((i & mask).count_ones() & 1);
                sign * a.norm_sqr()
            })
            .sum()
    }

    /// exp(iθ·P) for the Pauli string P putting X on the bits of
    /// `x_mask`, Y on `y_mask`, and Z on `z_mask` (masks pairwise
    /// disjoint).  Exact: a Pauli string is a Hermitian involution, so
    /// the exponential is cos θ + i sin θ · P.
    pub fn apply_pauli_exponential(
        &mut self,
        x_mask: usize,
        y_mask: usize,
        z_mask: usize,
        theta: f64,
    ) {
        debug_assert_eq!(x_mask & y_mask, 0);
        debug_assert_eq!(x_mask & z_mask, 0);
        debug_assert_eq!(y_mask & z_mask, 0);
        // P|x⟩ = φ(x)·|x ⊕ flips⟩ with φ(x) = i^{|y|}(−1)^{|x∧y|+|x∧z|}.
        let flips = x_mask | y_mask;
        let y_count = y_mask.count_ones() as usize;
        let i_pow = [
            Complex64::new(1.0, 0.0),
            Complex64::new(0.0, 1.0),
            Complex64::new(-1.0, 0.0),
            Complex64::new(0.0, -1.0),
        ][y_count % 4];
        let sign_of = |x: usize| -> f64 {
            1.0 - 2.0 * f64::from(((x & y_mask).count_ones() + (x & z_mask).count_ones()) & 1)
        };
        if flips == 0 {
            // Purely diagonal: multiply each amplitude by e^{iθφ(x)}.
            let plus = Complex64::from_polar(1.0, theta);
            let minus = plus.conj();
            for (x, amp) in self.amps.iter_mut().enumerate() {
                *amp *= if sign_of(x) > 0.0 { plus } else { minus };
            }
            return;
        }
        let pivot = flips & flips.wrapping_neg();
        let c = Complex64::new(theta.cos(), 0.0);
        let is = Complex64::new(0.0, theta.sin());
        for b in 0..self.amps.len() {
            if b & pivot != 0 {
                continue;
            }
            let d = b ^ flips;
            let (a_b, a_d) = (self.amps[b], self.amps[d]);
            self.amps[b] = c * a_b + is * i_pow * Complex64::new(sign_of(d), 0.0) * a_d;
            self.amps[d] = c * a_d + is * i_pow * Complex64::new(sign_of(b), 0.0) * a_b;
        }
    }
}

/// Evaluate a phase-state description directly:
/// `2^{-n/2} Σ_x exp(i[φ + Σ_t θ_t (-1)^{A_t·x}])|x⟩`.
pub fn phase_state(spec: &IqpSpec) -> Result<StateVector> {
    let n = spec.n_qubits();
    check_cap(n)?;
    let masks: Vec<u64> = (0..spec.n_terms())
        .map(|t| {
            let mut m = 0u64;
            for c in 0..n {
                if spec.architecture.get(t, c) {
                    m |= 1 << c;
                }
            }
            m
        })
        .collect();
    let scale = (1.0 / (1u64 << n) as f64).sqrt();
    let amps = (0..1usize << n)
        .map(|x| {
            let mut phase = spec.global_phase;
            for (mask, theta) in masks.iter().zip(&spec.angles) {
                let parity = ((*mask & x as u64).count_ones() & 1) as f64;
                phase += theta * (1.0 - 2.0 * parity);
            }
            Complex64::from_polar(scale, phase)
        })
        .collect();
    Ok(StateVector { n_qubits: n, amps })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gf2::BitMatrix;
    use crate::seeding::rng_from_seed;
    use rand::Rng as _;
    use std::f64::consts::{FRAC_PI_4, PI};

    fn random_state(n: usize, seed: u64) -> StateVector {
        let mut rng = rng_from_seed(seed);
        let amps: Vec<Complex64> = (0..1usize << n)
            .map(|_| Complex64::new(rng.gen::<f64>() - 0.5, rng.gen::<f64>() - 0.5))
            .collect();
        let norm: f64 = amps.iter().map(|a| a.norm_sqr()).sum::<f64>().sqrt();
        StateVector::from_amplitudes(amps.into_iter().map(|a| a / norm).collect()).unwrap()
    }

    #[test]
    fn kernels_preserve_the_norm() {
        let mut s = random_state(5, 3);
        let mut rng = rng_from_seed(4);
        for _ in 0..200 {
            match rng.gen_range(0..6) {
                0 => s.apply_h(rng.gen_range(0..5)),
                1 => s.apply_x(rng.gen_range(0..5)),
                2 => s.apply_y(rng.gen_range(0..5)),
                3 => s.apply_rz(rng.gen_range(0..5), rng.gen::<f64>() * PI),
                4 => s.apply_rx(rng.gen_range(0..5), rng.gen::<f64>() * PI),
                _ => {
                    let c = rng.gen_range(0..5);
                    let t = (c + rng.gen_range(1..5)) % 5;
                    s.apply_cx(c, t);
                }
            }
            assert!((s.norm() - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn involutions_return_to_the_start() {
        let reference = random_state(4, 9);
        let mut s = reference.clone();
        s.apply_h(2);
        s.apply_h(2);
        assert!((s.fidelity(&reference).unwrap() - 1.0).abs() < 1e-12);
        s.apply_cx(0, 3);
        s.apply_cx(0, 3);
        assert!((s.fidelity(&reference).unwrap() - 1.0).abs() < 1e-12);
        s.apply_z(1);
        s.apply_z_string(0b0010);
        assert!((s.fidelity(&reference).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn cx_has_the_right_truth_table() {
        // |10⟩ (control = qubit 0 set) flips the target.
        let mut s = StateVector::zero_state(2).unwrap();
        s.apply_x(0);
        s.apply_cx(0, 1);
        assert!((s.amp(0b11).norm() - 1.0).abs() < 1e-12);
        // Control clear: nothing happens.
        let mut s = StateVector::zero_state(2).unwrap();
        s.apply_cx(0, 1);
        assert!((s.amp(0b00).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn projection_removes_the_qubit_and_reports_probability() {
        // Bell pair on qubits 0,1 plus spectator |0⟩ on qubit 2.
        let mut s = StateVector::zero_state(3).unwrap();
        s.apply_h(0);
        s.apply_cx(0, 1);
        let p = s.project_and_remove(1, true);
        assert!((p - 0.5).abs() < 1e-12);
        assert_eq!(s.n_qubits(), 2);
        // Remaining state: qubit-0 collapsed to |1⟩, spectator |0⟩.
        assert!((s.amp(0b01).norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn pushed_qubits_enter_in_zero() {
        let mut s = StateVector::zero_state(1).unwrap();
        s.apply_h(0);
        s.push_zero_qubit().unwrap();
        assert_eq!(s.n_qubits(), 2);
        assert!((s.probability_of_one(1) - 0.0).abs() < 1e-15);
        assert!((s.norm() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn trivial_phase_states_are_uniform() {
        let spec = IqpSpec::new(BitMatrix::identity(3), vec![0.0; 3]).unwrap();
        let s = phase_state(&spec).unwrap();
        let expected = StateVector::plus_state(3).unwrap();
        assert!((s.fidelity(&expected).unwrap() - 1.0).abs() < 1e-12);
    }

    #[test]
    fn single_qubit_phase_state_matches_the_formula() {
        let spec = IqpSpec::new(BitMatrix::identity(1), vec![FRAC_PI_4]).unwrap();
        let s = phase_state(&spec).unwrap();
        let r = FRAC_1_SQRT_2;
        assert!((s.amp(0) - Complex64::from_polar(r, FRAC_PI_4)).norm() < 1e-12);
        assert!((s.amp(1) - Complex64::from_polar(r, -FRAC_PI_4)).norm() < 1e-12);
    }

    #[test]
    fn oversized_registers_are_rejected() {
        let spec = IqpSpec::new(BitMatrix::identity(MAX_QUBITS + 1), vec![0.0; MAX_QUBITS + 1])
            .unwrap();
        match phase_state(&spec) {
            Err(Error::QubitCap { qubits, cap }) => {
                assert_eq!((qubits, cap), (MAX_QUBITS + 1, MAX_QUBITS));
            }
            other => panic!("expected QubitCap, got {other:?}"),
        }
    }

    #[test]
    fn global_phase_rotates_all_amplitudes() {
        let mut s = StateVector::plus_state(2).unwrap();
        s.apply_global_phase(PI / 3.0);
        let expected = Complex64::from_polar(0.5, PI / 3.0);
        for i in 0..4 {
            assert!((s.amp(i) - expected).norm() < 1e-12);
        }
    }

    #[test]
    fn pauli_exponentials_match_the_single_qubit_kernels() {
        for theta in [0.3, -1.1, PI / 2.0] {
            let mut via_pauli = StateVector::zero_state(3).unwrap();
            via_pauli.apply_h(0);
            via_pauli.apply_cx(0, 2);
            let mut via_kernel = via_pauli.clone();

            via_pauli.apply_pauli_exponential(1 << 1, 0, 0, theta);
            via_kernel.apply_rx(1, theta);
            for i in 0..8 {
                assert!((via_pauli.amp(i) - via_kernel.amp(i)).norm() < 1e-12);
            }

            via_pauli.apply_pauli_exponential(0, 0, 1 << 2, theta);
            via_kernel.apply_rz(2, theta);
            for i in 0..8 {
                assert!((via_pauli.amp(i) - via_kernel.amp(i)).norm() < 1e-12);
            }
        }
    }

    #[test]
    fn two_qubit_yy_exponential_matches_its_matrix() {
        // exp(iθ Y⊗Y) on basis vectors: Y⊗Y|00⟩ = −|11⟩, Y⊗Y|01⟩ = |10⟩.
        let theta = 0.7;
        let mut s = StateVector::zero_state(2).unwrap();
        s.apply_pauli_exponential(0, 0b11, 0, theta);
        assert!((s.amp(0) - Complex64::new(theta.cos(), 0.0)).norm() < 1e-12);
        assert!((s.amp(3) - Complex64::new(0.0, -theta.sin())).norm() < 1e-12);

        let mut t = StateVector::zero_state(2).unwrap();
        t.apply_x(0);
        t.apply_pauli_exponential(0, 0b11, 0, theta);
        assert!((t.amp(1) - Complex64::new(theta.cos(), 0.0)).norm() < 1e-12);
        assert!((t.amp(2) - Complex64::new(0.0, theta.sin())).norm() < 1e-12);
    }

    #[test]
    fn mixed_pauli_exponential_is_unitary_and_periodic() {
        let mut s = StateVector::plus_state(4).unwrap();
        s.apply_rz(1, 0.4);
        s.apply_rz(3, -0.9);
        let reference = s.clone();
        // X₀ Y₂ Z₃ is an involution: θ and θ−π differ by the sign of P,
        // and a full period 2π returns the state exactly.
        s.apply_pauli_exponential(1 << 0, 1 << 2, 1 << 3, 1.3);
        assert!((s.norm() - 1.0).abs() < 1e-12);
        s.apply_pauli_exponential(1 << 0, 1 << 2, 1 << 3, -1.3);
        for i in 0..16 {
            assert!((s.amp(i) - reference.amp(i)).norm() < 1e-12);
        }
    }

    #[test]
    fn z_string_expectation_counts_signed_probability() {
        let mut s = StateVector::zero_state(3).unwrap();
        assert!((s.expectation_z_string(0b101) - 1.0).abs() < 1e-12);
        s.apply_x(0);
        assert!((s.expectation_z_string(0b101) + 1.0).abs() < 1e-12);
        s.apply_h(2);
        assert!((s.expectation_z_string(0b100)).abs() < 1e-12);
        assert!((s.expectation_z_string(0b001) + 1.0).abs() < 1e-12);
    }
}
