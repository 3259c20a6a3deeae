//! Special functions used by the collision averages.
//!
//! Three ingredients recur in every closed-form moment of the collision
//! operator with continuous internal energy:
//!
//! * the gamma function `Gamma(x)` (equilibrium internal-energy
//!   normalization and the Kummer-function prefactors),
//! * the confluent hypergeometric function `1F1(a, 3/2, z)` (speed
//!   dependence of the collision frequency),
//! * the beta-type constants
//!   `C_{(a,b,c)} = int_0^1 int_0^1 (r(1-r))^alpha (1-R)^(2 alpha + 1)
//!   sqrt(R) (1-R)^a R^b r^c dr dR`,
//!   which collect every average over the energy-sharing variables
//!   `(r, R)` of the collision transform.
//!
//! All functions are dimensionless. Accuracy targets: `gamma_fn` better
//! than 1e-12 relative on `[1e-3, 170]`, `hyp1f1_b3half` better than
//! 1e-10 relative for `z <= 200`, with a scaled variant `e^{-z} 1F1`
//! that stays finite for arbitrarily large `z`.

use thiserror::Error;

/// Errors for the special-function domain and range checks.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpecialFnError {
    /// Argument outside the function's domain.
    #[error("domain error: {0}")]
    Domain(String),
    /// Result magnitude exceeds the f64 range.
    #[error("overflow: {0}")]
    Overflow(String),
}

/// ln(f64::MAX); exponents above this overflow.
const LN_F64_MAX: f64 = 709.782_712_893_384;

/// Lanczos approximation, g = 7, 9 coefficients.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_93,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_13,
    -176.615_029_162_140_59,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_571_6e-6,
    1.505_632_735_149_311_6e-7,
];

/// Lanczos `ln Gamma(x)` for `x >= 0.5`.
fn ln_gamma_lanczos(x: f64) -> f64 {
    let xp = x - 1.0;
    let mut acc = LANCZOS[0];
    for (i, &c) in LANCZOS.iter().enumerate().skip(1) {
        acc += c / (xp + i as f64);
    }
    let t = xp + LANCZOS_G + 0.5;
    0.5 * (2.0 * std::f64::consts::PI).ln() + (xp + 0.5) * t.ln() - t + acc.ln()
}

/// Natural log of the gamma function for `x > 0`.
///
/// Uses the reflection formula below `x = 0.5` so that small arguments
/// keep full relative accuracy.
pub fn ln_gamma(x: f64) -> Result<f64, SpecialFnError> {
    if !(x > 0.0) {
        return Err(SpecialFnError::Domain(format!(
            "ln_gamma requires x > 0, got {x}"
        )));
    }
    if x < 0.5 {
        // Gamma(x) Gamma(1-x) = pi / sin(pi x); both factors positive here.
        let s = (std::f64::consts::PI * x).sin();
        Ok(std::f64::consts::PI.ln() - s.ln() - ln_gamma_lanczos(1.0 - x))
    } else {
        Ok(ln_gamma_lanczos(x))
    }
}

/// Gamma function `Gamma(x)` for `x > 0`.
///
/// # Errors
///
/// * [`SpecialFnError::Domain`] for `x <= 0` (poles and the reflection
///   half-line are not needed by any caller),
/// * [`SpecialFnError::Overflow`] once `Gamma(x)` exceeds the f64 range
///   (first happens a little above `x = 171.6`).
pub fn gamma_fn(x: f64) -> Result<f64, SpecialFnError> {
    let lg = ln_gamma(x)?;
    if lg > LN_F64_MAX {
        return Err(SpecialFnError::Overflow(format!(
            "Gamma({x}) exceeds f64 range"
        )));
    }
    Ok(lg.exp())
}

/// Rescaling threshold for the Kummer series accumulator.
const RESCALE: f64 = 1e250;

/// Forward Kummer series of `1F1(a, 3/2, z)`; returns the accumulator and
/// the number of times it was divided by `RESCALE`.
///
/// Every term is positive for `a > 0`, `z >= 0`, so plain forward
/// summation is stable; terms grow until `k ~ z` and then decay.
fn kummer_series(a: f64, z: f64) -> (f64, i32) {
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut nscale = 0_i32;
    let mut k = 0.0_f64;
    loop {
        term *= (a + k) * z / ((1.5 + k) * (k + 1.0));
        sum += term;
        k += 1.0;
        if term < 1e-16 * sum {
            break;
        }
        if sum > RESCALE {
            sum /= RESCALE;
            term /= RESCALE;
            nscale += 1;
        }
    }
    (sum, nscale)
}

fn check_kummer_domain(a: f64, z: f64) -> Result<(), SpecialFnError> {
    if !(a > 0.0) {
        return Err(SpecialFnError::Domain(format!(
            "hyp1f1_b3half requires a > 0, got {a}"
        )));
    }
    if !(z >= 0.0) {
        return Err(SpecialFnError::Domain(format!(
            "hyp1f1_b3half requires z >= 0, got {z}"
        )));
    }
    Ok(())
}

/// Confluent hypergeometric function `1F1(a, 3/2, z)` for `a > 0`,
/// `z >= 0`.
///
/// # Errors
///
/// [`SpecialFnError::Overflow`] once the value exceeds the f64 range
/// (the function grows like `e^z z^(a - 3/2)`); use
/// [`hyp1f1_b3half_scaled`] in that regime.
pub fn hyp1f1_b3half(a: f64, z: f64) -> Result<f64, SpecialFnError> {
    check_kummer_domain(a, z)?;
    let (sum, nscale) = kummer_series(a, z);
    if nscale == 0 {
        return Ok(sum);
    }
    let ln_value = sum.ln() + f64::from(nscale) * RESCALE.ln();
    if ln_value > LN_F64_MAX {
        return Err(SpecialFnError::Overflow(format!(
            "1F1({a}, 3/2, {z}) exceeds f64 range; use the scaled variant"
        )));
    }
    Ok(sum * RESCALE.powi(nscale))
}

/// Exponentially scaled variant `e^{-z} 1F1(a, 3/2, z)`.
///
/// Grows only algebraically in `z`, so it stays finite where the plain
/// function overflows.
pub fn hyp1f1_b3half_scaled(a: f64, z: f64) -> Result<f64, SpecialFnError> {
    check_kummer_domain(a, z)?;
    let (sum, nscale) = kummer_series(a, z);
    Ok(sum * (f64::from(nscale) * RESCALE.ln() - z).exp())
}

/// Closed form of the energy-sharing average
/// `C_{(a,b,c)} = int_0^1 int_0^1 (r(1-r))^alpha (1-R)^(2 alpha + 1)
/// sqrt(R) (1-R)^a R^b r^c dr dR`
/// for `alpha > -1` and `a, b, c >= 0`:
///
/// ```text
/// C_{(a,b,c)} = Gamma(2 alpha + a + 2) Gamma(b + 3/2)
///               Gamma(alpha + c + 1) Gamma(alpha + 1)
///             / (Gamma(2 alpha + a + b + 7/2) Gamma(2 alpha + c + 2))
/// ```
///
/// The double integral factorizes into two beta integrals, which is how
/// the closed form arises; it is evaluated through `ln Gamma` so that
/// large exponents cannot overflow.
pub fn c_const(alpha: f64, a: f64, b: f64, c: f64) -> Result<f64, SpecialFnError> {
    if !(alpha > -1.0) {
        return Err(SpecialFnError::Domain(format!(
            "c_const requires alpha > -1, got {alpha}"
        )));
    }
    if !(a >= 0.0 && b >= 0.0 && c >= 0.0) {
        return Err(SpecialFnError::Domain(format!(
            "c_const requires a, b, c >= 0, got ({a}, {b}, {c})"
        )));
    }
    let ln_value = ln_gamma(2.0 * alpha + a + 2.0)?
        + ln_gamma(b + 1.5)?
        + ln_gamma(alpha + c + 1.0)?
        + ln_gamma(alpha + 1.0)?
        - ln_gamma(2.0 * alpha + a + b + 3.5)?
        - ln_gamma(2.0 * alpha + c + 2.0)?;
    Ok(ln_value.exp())
}
