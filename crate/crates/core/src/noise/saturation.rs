//! Least-squares fit of the saturation law δ(Δt) = δ∞ (1 − e^{−κΔt}).

use crate::error::{Error, Result};

/// Result of fitting the exponential-saturation model to a δ_TV series.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct SaturationFit {
    pub delta_inf: f64,
    /// Effective rate, 1/ns.
    pub kappa: f64,
    /// Root-mean-square residual of the fit.
    pub residual: f64,
    /// Set when the data carried no usable curvature (all values equal);
    /// the parameters are then placeholders with κ = 0.
    pub degenerate: bool,
}

fn rms(points: &[(f64, f64)], delta_inf: f64, kappa: f64) -> f64 {
    let ss: f64 = points
        .iter()
        .map(|&(t, y)| {
            let model = delta_inf * (1.0 - (-kappa * t).exp());
            (y - model).powi(2)
        })
        .sum();
    (ss / points.len() as f64).sqrt()
}

/// Optimal δ∞ for a fixed κ (linear least squares), clamped to [0, 1].
fn best_amplitude(points: &[(f64, f64)], kappa: f64) -> f64 {
    let mut num = 0.0;
    let mut den = 0.0;
    for &(t, y) in points {
        let g = 1.0 - (-kappa * t).exp();
        num += y * g;
        den += g * g;
    }
    if den <= 0.0 {
        0.0
    } else {
        (num / den).clamp(0.0, 1.0)
    }
}

/// Fit δ∞ (1 − e^{−κΔt}) to `(Δt, δ_TV)` points: a log-spaced κ grid picks
/// the basin, then Gauss–Newton refines both parameters with κ clamped ≥ 0.
pub fn fit_saturation(points: &[(f64, f64)]) -> Result<SaturationFit> {
    if points.len() < 3 {
        return Err(Error::InvalidArgument(format!(
            "saturation fit needs at least 3 points, got {}",
            points.len()
        )));
    }
    if points.iter().any(|&(t, _)| !(t >= 0.0)) {
        return Err(Error::InvalidArgument(
            "Δt values must be nonnegative".into(),
        ));
    }
    let ys: Vec<f64> = points.iter().map(|&(_, y)| y).collect();
    let spread = ys.iter().cloned().fold(f64::MIN, f64::max)
        - ys.iter().cloned().fold(f64::MAX, f64::min);
    if spread < 1e-12 {
        let mean = ys.iter().sum::<f64>() / ys.len() as f64;
        return Ok(SaturationFit {
            delta_inf: mean,
            kappa: 0.0,
            residual: rms(points, mean, 0.0),
            degenerate: true,
        });
    }

    let t_max = points.iter().map(|&(t, _)| t).fold(0.0, f64::max);
    let t_pos = points
        .iter()
        .map(|&(t, _)| t)
        .filter(|&t| t > 0.0)
        .fold(f64::MAX, f64::min);

    // Grid seed.
    let mut best = (f64::MAX, 0.0, 0.0);
    let lo = (0.01 / t_max).ln();
    let hi = (100.0 / t_pos).ln();
    for i in 0..=200 {
        let kappa = (lo + (hi - lo) * i as f64 / 200.0).exp();
        let amp = best_amplitude(points, kappa);
        let r = rms(points, amp, kappa);
        if r < best.0 {
            best = (r, amp, kappa);
        }
    }
    let (_, mut delta_inf, mut kappa) = best;

    // Gauss–Newton refinement with step damping.
    let mut residual = rms(points, delta_inf, kappa);
    for _ in 0..60 {
        // Normal equations for the 2-parameter Jacobian.
        let (mut jtj00, mut jtj01, mut jtj11) = (0.0, 0.0, 0.0);
        let (mut jtr0, mut jtr1) = (0.0, 0.0);
        for &(t, y) in points {
            let e = (-kappa * t).exp();
            let g = 1.0 - e;
            let r = y - delta_inf * g;
            let j0 = g; // ∂model/∂δ∞
            let j1 = delta_inf * t * e; // ∂model/∂κ
            jtj00 += j0 * j0;
            jtj01 += j0 * j1;
            jtj11 += j1 * j1;
            jtr0 += j0 * r;
            jtr1 += j1 * r;
        }
        let det = jtj00 * jtj11 - jtj01 * jtj01;
        if det.abs() < 1e-30 {
            break;
        }
        let mut step_d = (jtj11 * jtr0 - jtj01 * jtr1) / det;
        let mut step_k = (jtj00 * jtr1 - jtj01 * jtr0) / det;
        let mut improved = false;
        for _ in 0..30 {
            let cand_d = (delta_inf + step_d).clamp(0.0, 1.0);
            let cand_k = (kappa + step_k).max(0.0);
            let cand_r = rms(points, cand_d, cand_k);
            if cand_r < residual {
                delta_inf = cand_d;
                kappa = cand_k;
                residual = cand_r;
                improved = true;
                break;
            }
            step_d /= 2.0;
            step_k /= 2.0;
        }
        if !improved || (step_d.abs() < 1e-14 && step_k.abs() < 1e-16) {
            break;
        }
    }

    Ok(SaturationFit { delta_inf, kappa, residual, degenerate: false })
}
