//! Rank-deficit probabilities for uniform random binary matrices.
//!
//! For an n×n matrix with i.i.d. unbiased bits, the probability that the
//! rank equals n−k is
//!
//! ```text
//! P_{n,k} = 2^{-k^2} · ∏_{ℓ=0}^{n-k-1} (1 - 2^{-(n-ℓ)})
//!                    · Σ_{0 ≤ i_1 ≤ … ≤ i_k ≤ n-k} 2^{-(i_1+…+i_k)}
//! ```
//!
//! with the k → fixed, n → ∞ limit
//! `2^{-k^2} · ∏_{i≥k+1}(1-2^{-i}) · ∏_{i=1}^{k}(1-2^{-i})^{-1}`.

use crate::error::{Error, Result};

/// Nested sum over weakly increasing index chains, by dynamic programming
/// over (chain length, last index).  `f_j(t)` is the contribution of chains
/// of length `j` ending at `t`; prefix sums turn the transition into O(1).
/// Every term is ≤ 1 and the total stays below 3.5 for all (k, top), so no
/// scaling tricks are needed.
fn chain_sum(k: usize, top: usize) -> f64 {
    if k == 0 {
        return 1.0;
    }
    // prefix[t] = Σ_{t' ≤ t} f_j(t') for the current chain length j.
    let mut prefix: Vec<f64> = Vec::with_capacity(top + 1);
    let mut acc = 0.0;
    for t in 0..=top {
        acc += (-(t as f64)).exp2();
        prefix.push(acc);
    }
    for _ in 1..k {
        let mut acc = 0.0;
        for t in 0..=top {
            let f = (-(t as f64)).exp2() * prefix[t];
            acc += f;
            prefix[t] = acc;
        }
    }
    prefix[top]
}

/// Probability that a uniform n×n GF(2) matrix has rank exactly n−k.
pub fn kolchin_probability(n: usize, k: usize) -> Result<f64> {
    if k > n {
        return Err(Error::InvalidArgument(format!(
            "rank deficit k={k} exceeds matrix size n={n}"
        )));
    }
    // Product of (1 - 2^-(n-ℓ)) accumulated in log space; factors lie in
    // [1/2, 1) so this is for uniformity with the 2^{-k^2} prefactor, which
    // does underflow for k ≳ 34.
    let mut log2_p = -((k * k) as f64);
    for l in 0..(n - k) {
        log2_p += (1.0 - (-((n - l) as f64)).exp2()).log2();
    }
    Ok(log2_p.exp2() * chain_sum(k, n - k))
}

/// Large-n limit of `kolchin_probability` at fixed rank deficit k.
pub fn kolchin_limit(k: usize) -> f64 {
    // Factors reach 1.0 exactly (in f64) beyond i ≈ 54; truncating at 300
    // leaves no representable error.
    let mut log2_p = -((k * k) as f64);
    for i in (k + 1)..=300 {
        log2_p += (1.0 - (-(i as f64)).exp2()).log2();
    }
    for i in 1..=k {
        log2_p -= (1.0 - (-(i as f64)).exp2()).log2();
    }
    log2_p.exp2()
}
