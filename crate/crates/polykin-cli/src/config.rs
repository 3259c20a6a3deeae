//! Flat `key=value` run configuration: species, interaction, and
//! hydrodynamic state, with per-flag overrides layered on top.

use polykin::ensembles::HydroState;
use polykin::microdynamics::{InteractionParams, SpeciesParams};

use crate::AppError;

/// Everything a physics subcommand needs: who collides, how, and in
/// what macroscopic state.
#[derive(Debug, Clone)]
pub struct RunConfig {
    /// Species (mass, internal-energy exponent, unit system).
    pub species: SpeciesParams,
    /// Collision kernel.
    pub interaction: InteractionParams,
    /// Hydrodynamic fields.
    pub hydro: HydroState,
}

impl Default for RunConfig {
    fn default() -> Self {
        RunConfig {
            species: SpeciesParams::dimensionless(0.0).expect("alpha 0 is valid"),
            interaction: InteractionParams::constant(1.0, 1.0).expect("defaults are valid"),
            hydro: HydroState::equilibrium(1.0, [0.0; 3], 1.0),
        }
    }
}

/// Raw keys accepted in a config file. `m` switches the species to SI
/// units; `k` and `l1_norm` are mutually exclusive angular models.
#[derive(Debug, Default)]
struct RawConfig {
    name: Option<String>,
    m: Option<f64>,
    alpha: Option<f64>,
    dof: Option<f64>,
    gamma: Option<f64>,
    k: Option<f64>,
    l1_norm: Option<f64>,
    rho: Option<f64>,
    t: Option<f64>,
    pi: Option<f64>,
    ux: Option<f64>,
    uy: Option<f64>,
    uz: Option<f64>,
}

fn parse_number(key: &str, value: &str, line: usize) -> Result<f64, AppError> {
    value.trim().parse::<f64>().map_err(|_| {
        AppError::Validation(format!(
            "config line {line}: key `{key}` needs a number, got `{value}`"
        ))
    })
}

/// Parses a flat `key=value` configuration (`#` comments, blank lines
/// allowed) into a full run configuration.
pub fn parse_config(text: &str) -> Result<RunConfig, AppError> {
    let mut raw = RawConfig::default();
    for (idx, line) in text.lines().enumerate() {
        let lineno = idx + 1;
        let body = line.split('#').next().unwrap_or("").trim();
        if body.is_empty() {
            continue;
        }
        let Some((key, value)) = body.split_once('=') else {
            return Err(AppError::Validation(format!(
                "config line {lineno}: expected `key=value`, got `{body}`"
            )));
        };
        let key = key.trim();
        let value = value.trim();
        match key {
            "name" => raw.name = Some(value.to_string()),
            "m" => raw.m = Some(parse_number(key, value, lineno)?),
            "alpha" => raw.alpha = Some(parse_number(key, value, lineno)?),
            "dof" => raw.dof = Some(parse_number(key, value, lineno)?),
            "gamma" => raw.gamma = Some(parse_number(key, value, lineno)?),
            "K" | "k" => raw.k = Some(parse_number(key, value, lineno)?),
            "l1_norm" => raw.l1_norm = Some(parse_number(key, value, lineno)?),
            "rho" => raw.rho = Some(parse_number(key, value, lineno)?),
            "T" | "t" => raw.t = Some(parse_number(key, value, lineno)?),
            "pi" => raw.pi = Some(parse_number(key, value, lineno)?),
            "ux" => raw.ux = Some(parse_number(key, value, lineno)?),
            "uy" => raw.uy = Some(parse_number(key, value, lineno)?),
            "uz" => raw.uz = Some(parse_number(key, value, lineno)?),
            _ => {
                return Err(AppError::Validation(format!(
                    "config line {lineno}: unknown key `{key}`"
                )))
            }
        }
    }
    raw.build()
}

impl RawConfig {
    fn build(self) -> Result<RunConfig, AppError> {
        let alpha = self.alpha.unwrap_or(0.0);
        let mut species = match self.m {
            Some(m) => SpeciesParams::si(self.name.as_deref().unwrap_or("species"), m, alpha)?,
            None => SpeciesParams::dimensionless(alpha)?,
        };
        if let Some(dof) = self.dof {
            species = species.with_dof(dof)?;
        }
        let gamma = self.gamma.unwrap_or(1.0);
        let interaction = match (self.k, self.l1_norm) {
            (Some(_), Some(_)) => {
                return Err(AppError::Validation(
                    "config: give either `K` or `l1_norm`, not both".to_string(),
                ))
            }
            (None, Some(l1)) => InteractionParams::tabulated(gamma, l1)?,
            (Some(k), None) => InteractionParams::constant(gamma, k)?,
            (None, None) => InteractionParams::constant(gamma, 1.0)?,
        };
        let mut hydro = HydroState::equilibrium(
            self.rho.unwrap_or(1.0),
            [
                self.ux.unwrap_or(0.0),
                self.uy.unwrap_or(0.0),
                self.uz.unwrap_or(0.0),
            ],
            self.t.unwrap_or(1.0),
        );
        hydro.pi = self.pi.unwrap_or(0.0);
        hydro.validate()?;
        Ok(RunConfig {
            species,
            interaction,
            hydro,
        })
    }
}

/// Command-line overrides applied after the config file.
#[derive(Debug, Clone, Copy, Default)]
pub struct Overrides {
    /// Internal-energy exponent.
    pub alpha: Option<f64>,
    /// Velocity exponent of the kernel.
    pub gamma: Option<f64>,
    /// Constant angular factor.
    pub k_const: Option<f64>,
    /// Mass density.
    pub rho: Option<f64>,
    /// Temperature.
    pub temp: Option<f64>,
    /// Dynamic pressure as a fraction of `p`.
    pub pi_ratio: Option<f64>,
    /// Force the dimensionless unit system.
    pub dimensionless: bool,
}

/// Loads the optional config file and layers the flag overrides.
pub fn resolve(path: Option<&std::path::Path>, ov: &Overrides) -> Result<RunConfig, AppError> {
    let mut cfg = match path {
        Some(p) => {
            let text = std::fs::read_to_string(p)
                .map_err(|e| AppError::Io(format!("cannot read config {}: {e}", p.display())))?;
            parse_config(&text)?
        }
        None => RunConfig::default(),
    };
    if let Some(alpha) = ov.alpha {
        cfg.species = if cfg.species.m == 1.0 && cfg.species.k_b == 1.0 {
            SpeciesParams::dimensionless(alpha)?
        } else {
            SpeciesParams::si(&cfg.species.name.clone(), cfg.species.m, alpha)?
        };
    }
    if ov.dimensionless {
        cfg.species = SpeciesParams::dimensionless(cfg.species.alpha)?;
    }
    if ov.gamma.is_some() || ov.k_const.is_some() {
        let gamma = ov.gamma.unwrap_or(cfg.interaction.gamma);
        cfg.interaction = match ov.k_const {
            Some(k) => InteractionParams::constant(gamma, k)?,
            None => InteractionParams {
                gamma,
                ..cfg.interaction
            },
        };
        cfg.interaction.validate()?;
    }
    if let Some(rho) = ov.rho {
        cfg.hydro.rho = rho;
    }
    if let Some(t) = ov.temp {
        cfg.hydro.t = t;
    }
    if let Some(x) = ov.pi_ratio {
        cfg.hydro.pi = x * cfg.hydro.pressure(&cfg.species);
    }
    cfg.hydro.validate()?;
    Ok(cfg)
}
