//! Plot-ready CSV data: equilibrium collision frequency surfaces and
//! the Prandtl-number gap curve.

use polykin::ensembles::nu_hat;
use polykin::fourteen_moment::delta_prandtl;

use crate::AppError;

/// Collision-frequency surface rows
/// `(alpha, gamma, c_hat, i_hat, nu_hat)` on a uniform
/// `[0, c_max] x [0, i_max]` grid with `points` nodes per axis.
pub fn collision_freq_rows(
    alphas: &[f64],
    gammas: &[f64],
    c_max: f64,
    i_max: f64,
    points: usize,
) -> Result<Vec<[f64; 5]>, AppError> {
    if points < 2 {
        return Err(AppError::Validation(format!(
            "grid needs at least 2 points per axis, got {points}"
        )));
    }
    if !(c_max > 0.0 && i_max > 0.0) {
        return Err(AppError::Validation(format!(
            "grid extents must be positive, got ({c_max}, {i_max})"
        )));
    }
    let mut rows = Vec::with_capacity(alphas.len() * gammas.len() * points * points);
    for &alpha in alphas {
        for &gamma in gammas {
            for ic in 0..points {
                let c_hat = c_max * ic as f64 / (points - 1) as f64;
                for ii in 0..points {
                    let i_hat = i_max * ii as f64 / (points - 1) as f64;
                    let nu = nu_hat(gamma, alpha, c_hat, i_hat)
                        .map_err(|e| AppError::Validation(e.to_string()))?;
                    rows.push([alpha, gamma, c_hat, i_hat, nu]);
                }
            }
        }
    }
    Ok(rows)
}

/// Prandtl-gap rows `(alpha, gamma, delta)` on a uniform grid over
/// `(0, gamma_max]`.
pub fn delta_rows(
    alphas: &[f64],
    gamma_max: f64,
    points: usize,
) -> Result<Vec<[f64; 3]>, AppError> {
    if points < 2 {
        return Err(AppError::Validation(format!(
            "scan needs at least 2 points, got {points}"
        )));
    }
    if !(gamma_max > 0.0) {
        return Err(AppError::Validation(format!(
            "gamma_max must be positive, got {gamma_max}"
        )));
    }
    let mut rows = Vec::with_capacity(alphas.len() * points);
    for &alpha in alphas {
        for j in 1..=points {
            let gamma = gamma_max * j as f64 / points as f64;
            let delta =
                delta_prandtl(alpha, gamma).map_err(|e| AppError::Validation(e.to_string()))?;
            rows.push([alpha, gamma, delta]);
        }
    }
    Ok(rows)
}

/// Renders numeric rows as CSV under the given header.
pub fn rows_csv<const N: usize>(header: &str, rows: &[[f64; N]]) -> String {
    let mut out = String::with_capacity(rows.len() * 32);
    out.push_str(header);
    out.push('\n');
    for row in rows {
        for (j, x) in row.iter().enumerate() {
            if j > 0 {
                out.push(',');
            }
            out.push_str(&format!("{x}"));
        }
        out.push('\n');
    }
    out
}
