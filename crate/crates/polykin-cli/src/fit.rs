//! Viscosity power-law fitting: log-log ordinary least squares for
//! `mu = A T^s`, then the kernel exponent and Prandtl number implied
//! by the fitted `s`.

use polykin::fourteen_moment::{eucken_prandtl, prandtl, s_to_gamma};
use serde::Serialize;

use crate::csvio::ViscosityDataset;
use crate::AppError;

/// Power-law fit with the derived transport quantities. `gamma`,
/// `pr_model`, and `rel_error` are absent when `s >= 1` (the kernel
/// exponent exists only for viscosity growing slower than linearly).
#[derive(Debug, Clone, Serialize)]
pub struct FitResult {
    /// Gas label from the dataset.
    pub gas: String,
    /// Internal-energy exponent used for the Prandtl number.
    pub alpha: f64,
    /// Prefactor `A` (Pa s K^-s).
    pub prefactor_a: f64,
    /// Temperature exponent `s`.
    pub exponent_s: f64,
    /// Root-mean-square residual of `log mu`.
    pub residual_rms_log: f64,
    /// Kernel exponent `gamma = 2 - 2s` (requires `s < 1`).
    pub gamma: Option<f64>,
    /// Model Prandtl number at `(alpha, gamma)`.
    pub pr_model: Option<f64>,
    /// Theoretical Prandtl number `(4 alpha + 14)/(4 alpha + 19)`.
    pub pr_eucken: f64,
    /// `|pr_model - pr_eucken| / pr_eucken`.
    pub rel_error: Option<f64>,
}

/// Ordinary least squares on `(log T, log mu)`. The exponent is scale
/// invariant: multiplying all `mu` by a constant changes only `A`.
pub fn fit_power_law(ds: &ViscosityDataset, alpha: f64) -> Result<FitResult, AppError> {
    ds.validate()?;
    let n = ds.points.len() as f64;
    let xs: Vec<f64> = ds.points.iter().map(|p| p.t_k.ln()).collect();
    let ys: Vec<f64> = ds.points.iter().map(|p| p.mu_pa_s.ln()).collect();
    let xbar = xs.iter().sum::<f64>() / n;
    let ybar = ys.iter().sum::<f64>() / n;
    let sxx: f64 = xs.iter().map(|x| (x - xbar) * (x - xbar)).sum();
    let sxy: f64 = xs.iter().zip(&ys).map(|(x, y)| (x - xbar) * (y - ybar)).sum();
    if sxx <= f64::EPSILON * n * xbar * xbar {
        return Err(AppError::Validation(format!(
            "dataset `{}`: degenerate fit, all temperatures coincide",
            ds.gas
        )));
    }
    let s = sxy / sxx;
    let ln_a = ybar - s * xbar;
    let residual_rms_log = (xs
        .iter()
        .zip(&ys)
        .map(|(x, y)| {
            let r = y - (ln_a + s * x);
            r * r
        })
        .sum::<f64>()
        / n)
        .sqrt();
    let pr_eucken = eucken_prandtl(alpha);
    let (gamma, pr_model, rel_error) = match s_to_gamma(s) {
        Ok(g) => {
            let pr = prandtl(alpha, g).map_err(|e| AppError::Validation(e.to_string()))?;
            (Some(g), Some(pr), Some((pr - pr_eucken).abs() / pr_eucken))
        }
        Err(_) => (None, None, None),
    };
    Ok(FitResult {
        gas: ds.gas.clone(),
        alpha,
        prefactor_a: ln_a.exp(),
        exponent_s: s,
        residual_rms_log,
        gamma,
        pr_model,
        pr_eucken,
        rel_error,
    })
}

/// Per-point rows `(T, mu_observed, mu_fitted)` of the fitted curve.
pub fn curve_rows(ds: &ViscosityDataset, fit: &FitResult) -> Vec<[f64; 3]> {
    ds.points
        .iter()
        .map(|p| {
            [
                p.t_k,
                p.mu_pa_s,
                fit.prefactor_a * p.t_k.powf(fit.exponent_s),
            ]
        })
        .collect()
}
