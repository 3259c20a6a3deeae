//! Closed-form production, entropy production, and relaxation of the
//! six-field (bulk-pressure) closure.
//!
//! With `x = Pi/p` and `beta = 3/(2(alpha+1))`, valid on the window
//! `-1 < x < (2/3)(alpha+1)`, the collision production of the dynamic
//! pressure under the speed-sum kernel is
//!
//! ```text
//! P = -C_P (rho^2/m) (p/rho)^(gamma/2 + 1) ||b|| x
//! C_P = sqrt(2/pi) ((alpha+5/2)/(alpha+1)) / Gamma((4 alpha + gamma + 9)/2)
//!       * (k1 (2(1+x))^(gamma/2) + k2 (1 - beta x)^(gamma/2))
//! ```
//!
//! with kernel constants `k1`, `k2` built from gamma functions. `P`
//! always opposes `x`, the entropy production
//! `Sigma = (1/3) (dK/dPi) P` is nonnegative, and the non-equilibrium
//! entropy `K = (k rho/m) log((1+x)^(3/2) (1 - beta x)^(alpha+1))`
//! equals the entropy defect of the six-field ensemble against local
//! equilibrium. The small-`x` limit of `-P/Pi` defines the bulk
//! relaxation rate `1/tau_Pi`.
//!
//! Spatially homogeneous relaxation reduces the closed system to the
//! single ODE `dPi/dt = P/3` at frozen `(rho, U, p)` (the conserved
//! fields), integrated here with an adaptive Dormand-Prince 4(5)
//! scheme. Note the resulting small-amplitude decay time of `Pi` is
//! `3 tau_Pi` with the `tau_Pi` normalization used here; see
//! [`crate::fourteen_moment`] for the tensor-production convention whose
//! relaxation time equals that decay time directly.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ensembles::{EnsembleError, HydroState};
use crate::microdynamics::{InteractionParams, MicroError, SpeciesParams};
use crate::special::{gamma_fn, ln_gamma, SpecialFnError};

/// Errors from six-field closed forms and relaxation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SixFieldError {
    /// `Pi/p` outside the validity window `(-1, (2/3)(alpha+1))`.
    #[error("Pi/p = {x} outside the six-field window (-1, {hi})")]
    Window {
        /// Offending ratio.
        x: f64,
        /// Upper window edge.
        hi: f64,
    },
    /// The relaxation trajectory reached the window edge.
    #[error("trajectory left the validity window at t = {t} (Pi/p = {x})")]
    WindowExit {
        /// Exit time (s).
        t: f64,
        /// Ratio at exit.
        x: f64,
    },
    /// Invalid input (non-positive time span, tolerance, ...).
    #[error("invalid input: {0}")]
    Invalid(String),
    /// Special-function failure inside a closed form.
    #[error(transparent)]
    Special(#[from] SpecialFnError),
    /// Parameter validation failure.
    #[error(transparent)]
    Micro(#[from] MicroError),
    /// Hydrodynamic-state validation failure.
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
}

/// All six-field closed-form outputs at one state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct SixFieldReport {
    /// Dynamic-pressure production `P` (Pa/s).
    pub production: f64,
    /// Dimensionless production coefficient `C_P`.
    pub c_p: f64,
    /// Entropy production `Sigma >= 0` (J/(K m^3 s)).
    pub sigma: f64,
    /// Non-equilibrium entropy `K = h - h_eq <= 0` (J/(K m^3)).
    pub k_noneq: f64,
    /// `dK/dPi` (J/(K m^3 Pa)).
    pub dk_dpi: f64,
    /// Bulk relaxation time `tau_Pi = lim_{Pi->0}(-Pi/P)` (s).
    pub tau_pi: f64,
}

fn window_checked_x(hydro: &HydroState, species: &SpeciesParams) -> Result<f64, SixFieldError> {
    hydro.validate()?;
    species.validate()?;
    let x = hydro.pi_over_p(species);
    let hi = 2.0 / 3.0 * (species.alpha + 1.0);
    if !(x > -1.0 && x < hi) {
        return Err(SixFieldError::Window { x, hi });
    }
    Ok(x)
}

/// Kernel constants of the production closed form:
/// `k1 = 2^((gamma+3)/2) Gamma(alpha+2) Gamma(alpha+1)
///  Gamma((gamma+3)/2) Gamma((gamma+5)/2)`,
/// `k2 = (3 sqrt(2)/4) pi (2 alpha + gamma/2 + 2)
///  Gamma(alpha + gamma/2 + 1)^2`.
pub fn k_constants(alpha: f64, gamma: f64) -> Result<(f64, f64), SixFieldError> {
    if !(alpha > -1.0) || !(gamma > 0.0) {
        return Err(SixFieldError::Invalid(format!(
            "need alpha > -1 and gamma > 0, got ({alpha}, {gamma})"
        )));
    }
    let k1 = 2.0_f64.powf(0.5 * (gamma + 3.0))
        * gamma_fn(alpha + 2.0)?
        * gamma_fn(alpha + 1.0)?
        * gamma_fn(0.5 * (gamma + 3.0))?
        * gamma_fn(0.5 * (gamma + 5.0))?;
    let k2 = 0.75 * 2.0_f64.sqrt()
        * std::f64::consts::PI
        * (2.0 * alpha + 0.5 * gamma + 2.0)
        * gamma_fn(alpha + 0.5 * gamma + 1.0)?.powi(2);
    Ok((k1, k2))
}

/// Dimensionless production coefficient `C_P(x)` (see module docs);
/// positive on the window.
pub fn c_p_coefficient(alpha: f64, gamma: f64, x: f64) -> Result<f64, SixFieldError> {
    let hi = 2.0 / 3.0 * (alpha + 1.0);
    if !(x > -1.0 && x < hi) {
        return Err(SixFieldError::Window { x, hi });
    }
    let (k1, k2) = k_constants(alpha, gamma)?;
    let beta = 1.5 / (alpha + 1.0);
    let norm = (2.0 / std::f64::consts::PI).sqrt() * (alpha + 2.5) / (alpha + 1.0)
        * (-ln_gamma(0.5 * (4.0 * alpha + gamma + 9.0))?).exp();
    Ok(norm
        * (k1 * (2.0 * (1.0 + x)).powf(0.5 * gamma)
            + k2 * (1.0 - beta * x).powf(0.5 * gamma)))
}

/// Collision production of the dynamic pressure,
/// `P = -C_P (rho^2/m)(p/rho)^(gamma/2+1) ||b|| x` (Pa/s). Opposes `x`.
pub fn production_p(
    hydro: &HydroState,
    species: &SpeciesParams,
    inter: &InteractionParams,
) -> Result<f64, SixFieldError> {
    inter.validate()?;
    let x = window_checked_x(hydro, species)?;
    let c_p = c_p_coefficient(species.alpha, inter.gamma, x)?;
    let p = hydro.pressure(species);
    Ok(-c_p * hydro.rho * hydro.rho / species.m
        * (p / hydro.rho).powf(0.5 * inter.gamma + 1.0)
        * inter.b_norm()
        * x)
}

/// Entropy production
/// `Sigma = -(k rho/(2 m p)) ((alpha+5/2)/(alpha+1)) x P
///  / ((1 - beta x)(1 + x)) >= 0`,
/// which also equals `(1/3)(dK/dPi) P`.
pub fn entropy_production_sigma(
    hydro: &HydroState,
    species: &SpeciesParams,
    inter: &InteractionParams,
) -> Result<f64, SixFieldError> {
    let x = window_checked_x(hydro, species)?;
    let prod = production_p(hydro, species, inter)?;
    let beta = 1.5 / (species.alpha + 1.0);
    let p = hydro.pressure(species);
    Ok(-species.k_b * hydro.rho / (2.0 * species.m * p)
        * (species.alpha + 2.5)
        / (species.alpha + 1.0)
        * x
        * prod
        / ((1.0 - beta * x) * (1.0 + x)))
}

/// Non-equilibrium entropy
/// `K = (k rho/m) log((1+x)^(3/2) (1-beta x)^(alpha+1))` (J/(K m^3)),
/// the entropy of the six-field ensemble minus the equilibrium value at
/// the same `(rho, U, T)`. `K <= 0`, with equality iff `Pi = 0`.
pub fn k_noneq(hydro: &HydroState, species: &SpeciesParams) -> Result<f64, SixFieldError> {
    let x = window_checked_x(hydro, species)?;
    let beta = 1.5 / (species.alpha + 1.0);
    Ok(species.k_b * hydro.rho / species.m
        * (1.5 * (1.0 + x).ln() + (species.alpha + 1.0) * (1.0 - beta * x).ln()))
}

/// `dK/dPi = -(3/2)(k rho/(m p)) ((alpha+5/2)/(alpha+1)) x
/// / ((1 - beta x)(1 + x))`.
pub fn dk_dpi(hydro: &HydroState, species: &SpeciesParams) -> Result<f64, SixFieldError> {
    let x = window_checked_x(hydro, species)?;
    let beta = 1.5 / (species.alpha + 1.0);
    let p = hydro.pressure(species);
    Ok(-1.5 * species.k_b * hydro.rho / (species.m * p)
        * (species.alpha + 2.5)
        / (species.alpha + 1.0)
        * x
        / ((1.0 - beta * x) * (1.0 + x)))
}

/// `K` as a function of the independent fields `(rho, p, Pi)` used by
/// the balance-law identity (temperature derived as `T = p m/(rho k)`).
fn k_of_fields(rho: f64, p: f64, pi: f64, species: &SpeciesParams) -> f64 {
    let x = pi / p;
    let beta = 1.5 / (species.alpha + 1.0);
    species.k_b * rho / species.m
        * (1.5 * (1.0 + x).ln() + (species.alpha + 1.0) * (1.0 - beta * x).ln())
}

/// Residual of the balance-law identity satisfied by `K(rho, p, Pi)`:
///
/// ```text
/// rho K_rho + ((p+Pi)/(alpha+5/2) + p) K_p
///   + ((p+Pi)(5/3 - 1/(alpha+5/2)) - p) K_Pi - K + Pi/T
/// ```
///
/// `K_Pi` is analytic ([`dk_dpi`]); `K_rho` and `K_p` are central finite
/// differences with steps `1e-6 rho` and `1e-6 p`. The identity holds
/// exactly, so the residual is dominated by finite-difference error and
/// stays below `1e-6 (k rho/m)` at moderate `x`.
pub fn k_pde_residual(hydro: &HydroState, species: &SpeciesParams) -> Result<f64, SixFieldError> {
    let _ = window_checked_x(hydro, species)?;
    let rho = hydro.rho;
    let p = hydro.pressure(species);
    let pi = hydro.pi;
    let a52 = species.alpha + 2.5;
    let h_rho = 1e-6 * rho;
    let k_rho = (k_of_fields(rho + h_rho, p, pi, species)
        - k_of_fields(rho - h_rho, p, pi, species))
        / (2.0 * h_rho);
    let h_p = 1e-6 * p;
    let k_p = (k_of_fields(rho, p + h_p, pi, species) - k_of_fields(rho, p - h_p, pi, species))
        / (2.0 * h_p);
    let k_pi = dk_dpi(hydro, species)?;
    let k_val = k_noneq(hydro, species)?;
    let temperature = p * species.m / (rho * species.k_b);
    Ok(rho * k_rho
        + ((p + pi) / a52 + p) * k_p
        + ((p + pi) * (5.0 / 3.0 - 1.0 / a52) - p) * k_pi
        - k_val
        + pi / temperature)
}

/// Bulk relaxation time of the scalar production,
/// `1/tau_Pi = (rho/m)(p/rho)^(gamma/2) ||b|| ((alpha+5/2)/(alpha+1))
///  sqrt(2/pi) (2^(gamma/2) k1 + k2) / Gamma((4 alpha + gamma + 9)/2)`,
/// i.e. the `x -> 0` limit of `-P/Pi`. Uses the equilibrium fields of
/// `hydro` only.
pub fn tau_pi_six(
    hydro: &HydroState,
    species: &SpeciesParams,
    inter: &InteractionParams,
) -> Result<f64, SixFieldError> {
    hydro.validate()?;
    species.validate()?;
    inter.validate()?;
    let (k1, k2) = k_constants(species.alpha, inter.gamma)?;
    let p = hydro.pressure(species);
    let rate = hydro.rho / species.m
        * (p / hydro.rho).powf(0.5 * inter.gamma)
        * inter.b_norm()
        * (species.alpha + 2.5)
        / (species.alpha + 1.0)
        * (2.0 / std::f64::consts::PI).sqrt()
        * (-ln_gamma(0.5 * (4.0 * species.alpha + inter.gamma + 9.0))?).exp()
        * (2.0_f64.powf(0.5 * inter.gamma) * k1 + k2);
    Ok(1.0 / rate)
}

/// Everything the closure says about one state.
pub fn report(
    hydro: &HydroState,
    species: &SpeciesParams,
    inter: &InteractionParams,
) -> Result<SixFieldReport, SixFieldError> {
    let x = window_checked_x(hydro, species)?;
    Ok(SixFieldReport {
        production: production_p(hydro, species, inter)?,
        c_p: c_p_coefficient(species.alpha, inter.gamma, x)?,
        sigma: entropy_production_sigma(hydro, species, inter)?,
        k_noneq: k_noneq(hydro, species)?,
        dk_dpi: dk_dpi(hydro, species)?,
        tau_pi: tau_pi_six(hydro, species, inter)?,
    })
}

/// One sample of the homogeneous relaxation trajectory.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelaxPoint {
    /// Time (s).
    pub t: f64,
    /// Dynamic pressure (Pa).
    pub pi: f64,
    /// `Pi/p` (dimensionless).
    pub pi_over_p: f64,
}

/// Integrates the spatially homogeneous relaxation `dPi/dt = P(Pi)/3`
/// at frozen `(rho, U, p)` (which the homogeneous closed system
/// conserves) from `hydro.pi` to `t_end`, recording every accepted
/// step.
///
/// Adaptive Dormand-Prince 4(5) with relative tolerance `rel_tol`
/// (1e-8 is the intended setting). Small-amplitude trajectories decay
/// as `exp(-t/(3 tau_Pi))`; any amplitude decays monotonically without
/// crossing zero and never leaves the validity window (a window exit is
/// reported as an error, with a `1e-9 p` margin).
pub fn relax_homogeneous(
    hydro: &HydroState,
    species: &SpeciesParams,
    inter: &InteractionParams,
    t_end: f64,
    rel_tol: f64,
) -> Result<Vec<RelaxPoint>, SixFieldError> {
    if !(t_end > 0.0) || !(rel_tol > 0.0) {
        return Err(SixFieldError::Invalid(format!(
            "need t_end > 0 and rel_tol > 0, got ({t_end}, {rel_tol})"
        )));
    }
    let _ = window_checked_x(hydro, species)?;
    let p = hydro.pressure(species);
    let hi = 2.0 / 3.0 * (species.alpha + 1.0);
    let margin = 1e-9 * p;
    let deriv = |pi: f64| -> Result<f64, SixFieldError> {
        let x = pi / p;
        if !(pi > -p + margin && pi < hi * p - margin) {
            return Err(SixFieldError::WindowExit { t: f64::NAN, x });
        }
        let mut h = *hydro;
        h.pi = pi;
        Ok(production_p(&h, species, inter)? / 3.0)
    };

    // Dormand-Prince 4(5) tableau.
    const A: [[f64; 6]; 6] = [
        [1.0 / 5.0, 0.0, 0.0, 0.0, 0.0, 0.0],
        [3.0 / 40.0, 9.0 / 40.0, 0.0, 0.0, 0.0, 0.0],
        [44.0 / 45.0, -56.0 / 15.0, 32.0 / 9.0, 0.0, 0.0, 0.0],
        [
            19372.0 / 6561.0,
            -25360.0 / 2187.0,
            64448.0 / 6561.0,
            -212.0 / 729.0,
            0.0,
            0.0,
        ],
        [
            9017.0 / 3168.0,
            -355.0 / 33.0,
            46732.0 / 5247.0,
            49.0 / 176.0,
            -5103.0 / 18656.0,
            0.0,
        ],
        [
            35.0 / 384.0,
            0.0,
            500.0 / 1113.0,
            125.0 / 192.0,
            -2187.0 / 6784.0,
            11.0 / 84.0,
        ],
    ];
    const B5: [f64; 7] = [
        35.0 / 384.0,
        0.0,
        500.0 / 1113.0,
        125.0 / 192.0,
        -2187.0 / 6784.0,
        11.0 / 84.0,
        0.0,
    ];
    const B4: [f64; 7] = [
        5179.0 / 57600.0,
        0.0,
        7571.0 / 16695.0,
        393.0 / 640.0,
        -92097.0 / 339200.0,
        187.0 / 2100.0,
        1.0 / 40.0,
    ];

    let mut t = 0.0_f64;
    let mut y = hydro.pi;
    let mut out = vec![RelaxPoint { t, pi: y, pi_over_p: y / p }];
    // Initial step from the linear rate.
    let tau = tau_pi_six(hydro, species, inter)?;
    let mut h = (3.0 * tau * 1e-2).min(t_end);
    let atol = rel_tol * 1e-3 * p;
    let mut k = [0.0_f64; 7];
    k[0] = deriv(y).map_err(|e| at_time(e, t))?;
    let mut steps = 0usize;
    while t < t_end {
        steps += 1;
        if steps > 1_000_000 {
            return Err(SixFieldError::Invalid(
                "step limit exceeded in relaxation integrator".to_string(),
            ));
        }
        if t + h > t_end {
            h = t_end - t;
        }
        let mut ok = true;
        for stage in 0..6 {
            let mut yi = y;
            for (j, a) in A[stage].iter().enumerate().take(stage + 1) {
                yi += h * a * k[j];
            }
            match deriv(yi) {
                Ok(f) => k[stage + 1] = f,
                Err(SixFieldError::WindowExit { .. }) => {
                    // Stage value stepped over the window edge; retry
                    // with a smaller step.
                    ok = false;
                    break;
                }
                Err(e) => return Err(e),
            }
        }
        if ok {
            let mut y5 = y;
            let mut y4 = y;
            for j in 0..7 {
                y5 += h * B5[j] * k[j];
                y4 += h * B4[j] * k[j];
            }
            let scale = atol + rel_tol * y.abs().max(y5.abs());
            let err = ((y5 - y4) / scale).abs();
            if err <= 1.0 {
                t += h;
                y = y5;
                out.push(RelaxPoint { t, pi: y, pi_over_p: y / p });
                k[0] = deriv(y).map_err(|e| at_time(e, t))?;
                let factor = if err > 0.0 { 0.9 * err.powf(-0.2) } else { 5.0 };
                h *= factor.clamp(0.2, 5.0);
            } else {
                h *= (0.9 * err.powf(-0.2)).clamp(0.2, 1.0);
            }
        } else {
            h *= 0.5;
            if h < 1e-300 {
                return Err(SixFieldError::WindowExit { t, x: y / p });
            }
        }
    }
    Ok(out)
}

fn at_time(e: SixFieldError, t: f64) -> SixFieldError {
    match e {
        SixFieldError::WindowExit { x, .. } => SixFieldError::WindowExit { t, x },
        other => other,
    }
}
