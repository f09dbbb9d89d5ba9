//! Synthesis of the r-body rotation exp(i·(ℓπ/2^k)·Z^{⊗r}) from Z-type
//! interactions of weight at most k.
//!
//! Writing Z^{⊗r} = ⊗(1 - 2n̂) and expanding in occupation monomials, the
//! weight-m monomial carries coefficient (ℓπ/2^k)(-2)^m, an integer
//! multiple of 2π whenever m > k — those terms vanish as unitaries.  The
//! surviving monomials, re-expressed in parities, give a weight-w Z-string
//! coefficient of
//!
//! ```text
//!   c_w = (ℓπ/2^k) · (-1)^w · Σ_{m=w}^{k} (-1)^m · C(r-w, m-w)
//! ```
//!
//! identical for every support of the same weight.

use crate::error::{Error, Result};
use crate::staircase::iqp::canonical_angle;
use std::f64::consts::PI;

/// Angles equivalent to 0 mod 2π after synthesis are dropped.
const NEGLIGIBLE: f64 = 1e-12;

fn binomial(n: usize, k: usize) -> f64 {
    if k > n {
        return 0.0;
    }
    let k = k.min(n - k);
    let mut acc = 1.0f64;
    for i in 0..k {
        acc = acc * (n - i) as f64 / (i + 1) as f64;
    }
    acc
}

fn supports_of_weight(r: usize, w: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = Vec::with_capacity(w);
    fn rec(start: usize, r: usize, w: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if cur.len() == w {
            out.push(cur.clone());
            return;
        }
        for i in start..r {
            cur.push(i);
            rec(i + 1, r, w, cur, out);
            cur.pop();
        }
    }
    rec(0, r, w, &mut cur, &mut out);
    out
}

/// Decompose exp(i·(ell·π/2^k)·Z^{⊗r}) into rotations exp(i·angle·Z_S)
/// with |S| ≤ k, exact up to a global phase.  Supports index qubits
/// 0..r-1; terms are ordered by weight, then lexicographically.
pub fn synthesize_klocal(r: usize, ell: u64, k: usize) -> Result<Vec<(Vec<usize>, f64)>> {
    if r < 1 || k < 1 {
        return Err(Error::InvalidArgument("synthesis needs r ≥ 1 and k ≥ 1".into()));
    }
    if k > 60 {
        return Err(Error::InvalidArgument(format!("k = {k} is out of the supported range")));
    }
    if ell >= 1u64 << k {
        return Err(Error::InvalidArgument(format!(
            "ell = {ell} out of range for k = {k}: need 0 ≤ ell < 2^k"
        )));
    }
    let theta = ell as f64 * PI / (1u64 << k) as f64;
    let mut terms = Vec::new();
    for w in 1..=k.min(r) {
        let mut sum = 0.0f64;
        for m in w..=k {
            let sign = if m % 2 == 0 { 1.0 } else { -1.0 };
            sum += sign * binomial(r - w, m - w);
        }
        let sign_w = if w % 2 == 0 { 1.0 } else { -1.0 };
        let angle = canonical_angle(theta * sign_w * sum);
        if angle.min((2.0 * PI - angle).abs()) < NEGLIGIBLE {
            continue;
        }
        for support in supports_of_weight(r, w) {
            terms.push((support, angle));
        }
    }
    Ok(terms)
}
