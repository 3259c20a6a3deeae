//! Viscosity-dataset CSV ingestion and emission.
//!
//! Format: header `T_K,mu_Pa_s`, one `T,mu` pair per line, optional
//! `# gas: NAME` and `# source: ...` metadata comments, UTF-8, LF.

use serde::Serialize;
use std::path::Path;

use crate::AppError;

/// One experimental point: temperature (K) and shear viscosity (Pa s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ViscosityPoint {
    /// Temperature (K).
    pub t_k: f64,
    /// Shear viscosity (Pa s).
    pub mu_pa_s: f64,
}

/// A labelled viscosity-vs-temperature dataset.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ViscosityDataset {
    /// Gas label.
    pub gas: String,
    /// Citation of the data origin.
    pub source: String,
    /// Points with strictly increasing temperature.
    pub points: Vec<ViscosityPoint>,
}

impl ViscosityDataset {
    /// Checks strict `T` monotonicity, positivity, and the minimum
    /// point count needed for fitting.
    pub fn validate(&self) -> Result<(), AppError> {
        if self.points.len() < 3 {
            return Err(AppError::Validation(format!(
                "dataset `{}`: need at least 3 points for fitting, got {}",
                self.gas,
                self.points.len()
            )));
        }
        for pair in self.points.windows(2) {
            if !(pair[1].t_k > pair[0].t_k) {
                return Err(AppError::Validation(format!(
                    "dataset `{}`: temperatures must be strictly increasing ({} then {})",
                    self.gas, pair[0].t_k, pair[1].t_k
                )));
            }
        }
        for p in &self.points {
            if !(p.t_k > 0.0) || !(p.mu_pa_s > 0.0) {
                return Err(AppError::Validation(format!(
                    "dataset `{}`: T and mu must be positive, got ({}, {})",
                    self.gas, p.t_k, p.mu_pa_s
                )));
            }
        }
        Ok(())
    }
}

/// Parses dataset text; errors carry 1-based line numbers.
pub fn parse_viscosity_csv(text: &str) -> Result<ViscosityDataset, AppError> {
    let mut gas = String::from("unknown");
    let mut source = String::new();
    let mut points = Vec::new();
    let mut saw_header = false;
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let trimmed = line.trim();
        if trimmed.is_empty() {
            continue;
        }
        if let Some(comment) = trimmed.strip_prefix('#') {
            let comment = comment.trim();
            if let Some(v) = comment.strip_prefix("gas:") {
                gas = v.trim().to_string();
            } else if let Some(v) = comment.strip_prefix("source:") {
                source = v.trim().to_string();
            }
            continue;
        }
        if !saw_header {
            if trimmed != "T_K,mu_Pa_s" {
                return Err(AppError::Validation(format!(
                    "line {lineno}: expected header `T_K,mu_Pa_s`, got `{trimmed}`"
                )));
            }
            saw_header = true;
            continue;
        }
        let mut fields = trimmed.split(',');
        let (Some(t_str), Some(mu_str), None) = (fields.next(), fields.next(), fields.next())
        else {
            return Err(AppError::Validation(format!(
                "line {lineno}: expected two comma-separated values, got `{trimmed}`"
            )));
        };
        let t_k = t_str.trim().parse::<f64>().map_err(|_| {
            AppError::Validation(format!("line {lineno}: cannot parse T `{t_str}`"))
        })?;
        let mu_pa_s = mu_str.trim().parse::<f64>().map_err(|_| {
            AppError::Validation(format!("line {lineno}: cannot parse mu `{mu_str}`"))
        })?;
        points.push(ViscosityPoint { t_k, mu_pa_s });
    }
    if !saw_header {
        return Err(AppError::Validation(
            "missing header `T_K,mu_Pa_s`".to_string(),
        ));
    }
    let ds = ViscosityDataset { gas, source, points };
    ds.validate()?;
    Ok(ds)
}

/// Reads and validates a dataset file.
pub fn read_viscosity_csv(path: &Path) -> Result<ViscosityDataset, AppError> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| AppError::Io(format!("cannot read {}: {e}", path.display())))?;
    parse_viscosity_csv(&text)
}

/// Emits the dataset in the ingestible format; floats round-trip
/// exactly, so `parse(emit(ds)) == ds`. The writer half of the format
/// contract, exercised by the round-trip test.
#[cfg_attr(not(test), allow(dead_code))]
pub fn emit_viscosity_csv(ds: &ViscosityDataset) -> String {
    let mut out = String::new();
    out.push_str(&format!("# gas: {}\n", ds.gas));
    out.push_str(&format!("# source: {}\n", ds.source));
    out.push_str("T_K,mu_Pa_s\n");
    for p in &ds.points {
        out.push_str(&format!("{},{}\n", p.t_k, p.mu_pa_s));
    }
    out
}
