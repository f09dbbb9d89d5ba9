//! Marchenko–Pastur spectral statistics of architecture matrices.

use crate::error::{Error, Result};
use crate::gf2::BitMatrix;
use nalgebra::DMatrix;

/// Aspect ratio γ = (smaller dimension)/(larger dimension) of a matrix,
/// the parameter of the Marchenko–Pastur law its covariance spectrum is
/// compared against.
pub fn aspect_ratio(a: &BitMatrix) -> f64 {
    let (s, n) = (a.rows(), a.cols());
    s.min(n) as f64 / s.max(n) as f64
}

/// Standardized covariance of a binary matrix whose rows are samples:
/// with `B = 2A − 1` over ±1, returns `BᵀB/s` (n×n) when `s ≥ n`, and the
/// role-swapped `BBᵀ/n` (s×s) otherwise, so the result is always the
/// Gram matrix of the smaller side normalized by the number of samples.
/// Symmetric with unit diagonal; entries in [−1, 1].
pub fn standardized_covariance(a: &BitMatrix) -> DMatrix<f64> {
    let (s, n) = (a.rows(), a.cols());
    // ±1 inner products reduce to Hamming distances between bit rows:
    // ⟨b_i, b_j⟩ = len − 2·d_H(row_i, row_j).
    let (source, samples) = if s >= n {
        (a.transpose(), s)
    } else {
        (a.clone(), n)
    };
    let side = source.rows();
    let rows: Vec<_> = (0..side).map(|i| source.row(i)).collect();
    let mut out = DMatrix::<f64>::zeros(side, side);
    for i in 0..side {
        out[(i, i)] = 1.0;
        for j in i + 1..side {
            let d = rows[i].hamming_distance(&rows[j]).expect("equal lengths");
            let value = (samples as f64 - 2.0 * d as f64) / samples as f64;
            out[(i, j)] = value;
            out[(j, i)] = value;
        }
    }
    out
}

/// Eigenvalues of [`standardized_covariance`], unsorted.
pub fn covariance_eigenvalues(a: &BitMatrix) -> Vec<f64> {
    standardized_covariance(a)
        .symmetric_eigenvalues()
        .iter()
        .copied()
        .collect()
}

/// Support edges a± = (1 ± √γ)² of the Marchenko–Pastur law.
pub fn mp_support(gamma: f64) -> (f64, f64) {
    let r = gamma.sqrt();
    ((1.0 - r).powi(2), (1.0 + r).powi(2))
}

/// Weight of the Marchenko–Pastur point mass at zero, max(0, 1 − 1/γ).
pub fn mp_zero_mass(gamma: f64) -> f64 {
    (1.0 - 1.0 / gamma).max(0.0)
}

/// Absolutely continuous part of the Marchenko–Pastur density,
/// √((λ − a−)(a+ − λ)) / (2πγλ) on [a−, a+] and zero elsewhere.  The
/// density integrates to 1 − [`mp_zero_mass`], so together with the point
/// mass at zero (present when γ > 1) the law is a probability measure.
pub fn mp_density(lambda: f64, gamma: f64) -> f64 {
    let (lo, hi) = mp_support(gamma);
    if lambda <= lo || lambda >= hi {
        return 0.0;
    }
    ((lambda - lo) * (hi - lambda)).sqrt()
        / (2.0 * std::f64::consts::PI * gamma * lambda)
}

/// CDF of the Marchenko–Pastur law at `lambda`, point mass included.
///
/// The continuous part is integrated with the substitution
/// λ(u) = a− + (a+ − a−) sin²u, which removes the square-root edge
/// behaviour (and the 1/√λ singularity at γ = 1), leaving a smooth
/// integrand for composite Simpson quadrature.
pub fn mp_cdf(lambda: f64, gamma: f64) -> f64 {
    let mass = if lambda >= 0.0 { mp_zero_mass(gamma) } else { 0.0 };
    let (lo, hi) = mp_support(gamma);
    if lambda <= lo {
        return mass;
    }
    if lambda >= hi {
        return 1.0;
    }
    let u_star = (((lambda - lo) / (hi - lo)).sqrt()).asin();
    mass + simpson(|u| mp_integrand(u, gamma, lo, hi), 0.0, u_star, 512)
}

fn mp_integrand(u: f64, gamma: f64, lo: f64, hi: f64) -> f64 {
    let (sin, cos) = u.sin_cos();
    let lambda = lo + (hi - lo) * sin * sin;
    if lambda <= 0.0 {
        // Only reachable at u = 0 for γ = 1; the limit there is finite.
        return (hi - lo) / (std::f64::consts::PI * gamma * hi) * (hi - lo);
    }
    (hi - lo).powi(2) * (sin * cos).powi(2) / (std::f64::consts::PI * gamma * lambda)
}

fn simpson(f: impl Fn(f64) -> f64, a: f64, b: f64, panels: usize) -> f64 {
    if b <= a {
        return 0.0;
    }
    let n = panels.max(2) & !1;
    let h = (b - a) / n as f64;
    let mut acc = f(a) + f(b);
    for i in 1..n {
        let w = if i % 2 == 1 { 4.0 } else { 2.0 };
        acc += w * f(a + i as f64 * h);
    }
    acc * h / 3.0
}

/// Kolmogorov–Smirnov distance between the empirical distribution of
/// `eigs` and the Marchenko–Pastur law with aspect ratio `gamma`.
pub fn mp_distance(eigs: &[f64], gamma: f64) -> Result<f64> {
    if eigs.is_empty() {
        return Err(Error::InvalidArgument(
            "KS distance of an empty spectrum".into(),
        ));
    }
    if !(gamma > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "aspect ratio must be positive, got {gamma}"
        )));
    }
    let mut sorted = eigs.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("no NaN eigenvalues"));
    let n = sorted.len() as f64;
    let mut d: f64 = 0.0;
    for (i, &lambda) in sorted.iter().enumerate() {
        let cdf = mp_cdf(lambda, gamma);
        // The law's only atom sits at zero; approaching from the left
        // drops it again.
        let cdf_left = if lambda == 0.0 { cdf - mp_zero_mass(gamma) } else { cdf };
        d = d.max((i + 1) as f64 / n - cdf).max(cdf_left - i as f64 / n);
    }
    Ok(d)
}

/// Histogram of a spectrum against the Marchenko–Pastur prediction:
/// rows of (bin center, empirical density, MP density), covering the MP
/// support joined with the empirical range.
pub fn spectral_table(eigs: &[f64], gamma: f64, bins: usize) -> Vec<(f64, f64, f64)> {
    if eigs.is_empty() || bins == 0 {
        return Vec::new();
    }
    let (lo, hi) = mp_support(gamma);
    let lo = lo.min(eigs.iter().cloned().fold(f64::MAX, f64::min));
    let hi = hi.max(eigs.iter().cloned().fold(f64::MIN, f64::max));
    let width = (hi - lo) / bins as f64;
    if width <= 0.0 {
        return Vec::new();
    }
    let mut counts = vec![0u64; bins];
    for &e in eigs {
        let k = (((e - lo) / width) as usize).min(bins - 1);
        counts[k] += 1;
    }
    let norm = 1.0 / (eigs.len() as f64 * width);
    counts
        .iter()
        .enumerate()
        .map(|(k, &c)| {
            let center = lo + (k as f64 + 0.5) * width;
            (center, c as f64 * norm, mp_density(center, gamma))
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::seeding::rng_from_seed;

    #[test]
    fn density_and_point_mass_integrate_to_one() {
        for gamma in [0.2, 0.5, 1.0, 1.6] {
            let (lo, hi) = mp_support(gamma);
            let integral = simpson(
                |u| mp_integrand(u, gamma, lo, hi),
                0.0,
                std::f64::consts::FRAC_PI_2,
                4096,
            );
            let total = integral + mp_zero_mass(gamma);
            assert!(
                (total - 1.0).abs() < 1e-6,
                "γ = {gamma}: density + atom integrate to {total}"
            );
        }
    }

    #[test]
    fn square_case_is_supported_on_zero_four() {
        let (lo, hi) = mp_support(1.0);
        assert_eq!((lo, hi), (0.0, 4.0));
        assert_eq!(mp_density(-0.1, 1.0), 0.0);
        assert_eq!(mp_density(4.1, 1.0), 0.0);
        assert!(mp_density(2.0, 1.0) > 0.0);
        assert!((mp_cdf(4.0, 1.0) - 1.0).abs() < 1e-9);
    }

    #[test]
    fn cdf_is_monotone_and_matches_density_slope() {
        let gamma = 0.5;
        let mut prev = 0.0;
        for i in 0..=60 {
            let lambda = 0.05 * i as f64;
            let cdf = mp_cdf(lambda, gamma);
            assert!(cdf >= prev - 1e-12);
            prev = cdf;
        }
        // Central difference of the CDF recovers the density.
        let (l, h) = (1.2, 1.2001);
        let slope = (mp_cdf(h, gamma) - mp_cdf(l, gamma)) / (h - l);
        assert!((slope - mp_density(1.20005, gamma)).abs() < 1e-6);
    }

    #[test]
    fn covariance_is_symmetric_with_unit_diagonal() {
        let mut rng = rng_from_seed(5);
        let a = BitMatrix::random(40, 25, &mut rng);
        let y = standardized_covariance(&a);
        assert_eq!(y.nrows(), 25);
        for i in 0..25 {
            assert_eq!(y[(i, i)], 1.0);
            for j in 0..25 {
                assert_eq!(y[(i, j)], y[(j, i)]);
                assert!(y[(i, j)].abs() <= 1.0);
            }
        }
        // Rows-as-samples orientation flips when the matrix is wide.
        let wide = BitMatrix::random(25, 40, &mut rng);
        assert_eq!(standardized_covariance(&wide).nrows(), 25);
    }

    #[test]
    fn all_zero_matrix_gives_the_all_ones_covariance() {
        let a = BitMatrix::zeros(12, 7);
        let y = standardized_covariance(&a);
        for i in 0..7 {
            for j in 0..7 {
                assert_eq!(y[(i, j)], 1.0);
            }
        }
    }

    #[test]
    fn covariance_matches_the_dense_definition() {
        let mut rng = rng_from_seed(9);
        for (s, n) in [(30, 18), (18, 30), (21, 21)] {
            let a = BitMatrix::random(s, n, &mut rng);
            let b = DMatrix::<f64>::from_fn(s, n, |i, j| {
                if a.get(i, j) {
                    1.0
                } else {
                    -1.0
                }
            });
            let expected = if s >= n {
                b.transpose() * &b / s as f64
            } else {
                &b * b.transpose() / n as f64
            };
            let got = standardized_covariance(&a);
            assert!((got - expected).abs().max() < 1e-12, "({s},{n})");
        }
    }

    #[test]
    fn iid_spectra_land_inside_the_support_and_near_the_law() {
        let mut rng = rng_from_seed(77);
        let a = BitMatrix::random(200, 100, &mut rng);
        let gamma = aspect_ratio(&a);
        let (lo, hi) = mp_support(gamma);
        let eigs = covariance_eigenvalues(&a);
        for &e in &eigs {
            assert!(
                e > lo - 0.1 && e < hi + 0.1,
                "eigenvalue {e} outside [{lo}, {hi}] ± 0.1"
            );
        }
        let d = mp_distance(&eigs, gamma).unwrap();
        assert!(d < 0.12, "200×100 spectrum too far from the law: {d}");
    }

    #[test]
    fn large_iid_matrices_meet_the_reference_tolerance() {
        let mut rng = rng_from_seed(123);
        let a = BitMatrix::random(2000, 2000, &mut rng);
        let eigs = covariance_eigenvalues(&a);
        let d = mp_distance(&eigs, 1.0).unwrap();
        assert!(d <= 0.02, "2000×2000 KS distance {d}");
    }

    #[test]
    fn ks_distance_ignores_eigenvalue_order() {
        let eigs = [0.4, 1.3, 2.2, 0.9, 3.1];
        let mut shuffled = eigs;
        shuffled.reverse();
        let a = mp_distance(&eigs, 1.0).unwrap();
        let b = mp_distance(&shuffled, 1.0).unwrap();
        assert_eq!(a, b);
    }

    #[test]
    fn spectral_table_estimates_the_density() {
        let mut rng = rng_from_seed(31);
        let a = BitMatrix::random(1000, 500, &mut rng);
        let gamma = aspect_ratio(&a);
        let eigs = covariance_eigenvalues(&a);
        let table = spectral_table(&eigs, gamma, 40);
        assert_eq!(table.len(), 40);
        let mass: f64 = table.iter().map(|&(_, emp, _)| emp).sum::<f64>()
            * (table[1].0 - table[0].0);
        assert!((mass - 1.0).abs() < 1e-9, "empirical histogram mass {mass}");
        // Bulk bins should be close to the law.
        for &(center, emp, mp) in &table {
            if mp > 0.2 {
                assert!((emp - mp).abs() < 0.25, "bin {center}: {emp} vs {mp}");
            }
        }
    }
}
