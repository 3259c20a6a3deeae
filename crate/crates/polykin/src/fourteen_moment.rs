//! Linearized fourteen-moment productions, closure fluxes, transport
//! coefficients, and the Prandtl-number matching problem.
//!
//! Near equilibrium the collisional productions of the trace-free
//! pressure deviator `p<ij>`, the dynamic pressure `Pi`, and the heat
//! flux `q` are linear with negative coefficients:
//!
//! ```text
//! Pbar_ij = c_dev p<ij> + c_pi Pi delta_ij
//! Qbar_i  = sum_k U_k Pbar_ki + c_q q_i
//! ```
//!
//! Each coefficient is `-K (rho/m)(p/rho)^(gamma/2)` times a pure
//! function of `(alpha, gamma)` built from the kernel constants
//! `n1 = Gamma(alpha+1)^2 Gamma((gamma+3)/2) Gamma((gamma+5)/2)` and
//! `n2 = pi Gamma(alpha+gamma/2+1)^2`. The associated relaxation times
//! give the shear viscosity `mu = p tau_s`, bulk viscosity
//! `nu = (4(alpha+1)/(3(2 alpha+5))) p tau_Pi`, and heat conductivity
//! `kappa = (alpha+7/2)(p^2/(rho T)) tau_q`; the Prandtl number
//! `Pr = (alpha+7/2)(k/m) mu/kappa` depends on `(alpha, gamma)` only.
//!
//! A monatomic-like Eucken value `(4 alpha+14)/(4 alpha+19)` serves as
//! the comparison point; `solve_gamma_star` inverts `Pr(alpha, .) =
//! target` and `s_to_gamma` maps a viscosity power-law exponent
//! (`mu ~ T^s`) to the kernel exponent `gamma = 2 - 2 s`.

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ensembles::{EnsembleError, HydroState};
use crate::microdynamics::{AngularModel, InteractionParams, MicroError, SpeciesParams};
use crate::special::{ln_gamma, SpecialFnError};

/// Errors from fourteen-moment closed forms.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum FourteenError {
    /// Invalid input (parameter out of range).
    #[error("invalid input: {0}")]
    Invalid(String),
    /// Root bracketing failed: `Pr(alpha, gamma) - target` has no sign
    /// change on the scanned interval.
    #[error("no sign change of Pr - {target} for gamma in ({lo}, {hi})")]
    NoSignChange {
        /// Lower end of the scanned gamma interval.
        lo: f64,
        /// Upper end of the scanned gamma interval.
        hi: f64,
        /// Prandtl value sought.
        target: f64,
    },
    /// Viscosity exponent `s >= 1` maps to a non-positive kernel
    /// exponent.
    #[error("viscosity exponent s = {0} needs s < 1 for a positive kernel exponent")]
    ExponentOutOfRange(f64),
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

/// Kernel constants of the linearized productions:
/// `n1 = Gamma(alpha+1)^2 Gamma((gamma+3)/2) Gamma((gamma+5)/2)`,
/// `n2 = pi Gamma(alpha+gamma/2+1)^2`.
pub fn n_constants(alpha: f64, gamma: f64) -> Result<(f64, f64), FourteenError> {
    if !(alpha > -1.0) || !(gamma > 0.0) {
        return Err(FourteenError::Invalid(format!(
            "need alpha > -1 and gamma > 0, got ({alpha}, {gamma})"
        )));
    }
    let n1 = (2.0 * ln_gamma(alpha + 1.0)?
        + ln_gamma(0.5 * (gamma + 3.0))?
        + ln_gamma(0.5 * (gamma + 5.0))?)
        .exp();
    let n2 = std::f64::consts::PI * (2.0 * ln_gamma(alpha + 0.5 * gamma + 1.0)?).exp();
    Ok((n1, n2))
}

/// Pure `(alpha, gamma)` parts of the three production coefficients
/// (positive; the physical coefficients carry a minus sign and the
/// state prefactor).
fn coefficient_cores(alpha: f64, gamma: f64) -> Result<(f64, f64, f64), FourteenError> {
    let (n1, n2) = n_constants(alpha, gamma)?;
    let norm = std::f64::consts::PI.sqrt()
        * (-ln_gamma(0.5 * (4.0 * alpha + gamma + 9.0))?).exp();
    let s = 4.0 * alpha + gamma;
    let dev = norm / 15.0
        * (s + 7.0)
        * (2.0_f64.powf(gamma + 2.0) * (gamma + 5.0) * n1 + 15.0 * n2);
    let pi_c = norm
        * (alpha + 2.5)
        * (2.0_f64.powf(gamma + 4.0) / 3.0 * n1 + (s + 4.0) / (alpha + 1.0) * n2);
    let a1 = s * (3.0 * alpha + gamma) + 57.0 * alpha + 15.0 * gamma + 60.0;
    let a2 = s * (2.0 * s + gamma * gamma + 38.0) + 7.0 * gamma * gamma + 160.0;
    let q_c = norm / (alpha + 3.5) / 72.0
        * (2.0_f64.powf(gamma + 5.0) * a1 * n1 + 9.0 * a2 * n2);
    Ok((dev, pi_c, q_c))
}

/// Requires the pointwise-constant angular model and returns its level.
fn constant_k(inter: &InteractionParams) -> Result<f64, FourteenError> {
    inter.validate()?;
    match inter.angular {
        AngularModel::Constant { k } => Ok(k),
        AngularModel::Tabulated { .. } => Err(MicroError::AngularModelNotPointwise.into()),
    }
}

/// Linear production coefficients; all are negative on the admissible
/// parameter range.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct ProductionLinear14 {
    /// Coefficient of `p<ij>` in `Pbar_ij` (1/s).
    pub p_dev_coeff: f64,
    /// Coefficient of `Pi delta_ij` in `Pbar_ij` (1/s).
    pub p_pi_coeff: f64,
    /// Coefficient of `q_i` in the non-convective part of `Qbar_i` (1/s).
    pub q_q_coeff: f64,
}

/// Production coefficients at a state (uses only `rho` and `T` of
/// `hydro`); needs the pointwise-constant angular model.
pub fn production_linear_14(
    hydro: &HydroState,
    species: &SpeciesParams,
    inter: &InteractionParams,
) -> Result<ProductionLinear14, FourteenError> {
    hydro.validate()?;
    species.validate()?;
    let k = constant_k(inter)?;
    let p = hydro.pressure(species);
    let (dev, pi_c, q_c) = coefficient_cores(species.alpha, inter.gamma)?;
    let pre = -k * hydro.rho / species.m * (p / hydro.rho).powf(0.5 * inter.gamma);
    Ok(ProductionLinear14 {
        p_dev_coeff: pre * dev,
        p_pi_coeff: pre * pi_c,
        q_q_coeff: pre * q_c,
    })
}

/// Linearized production tensors at a state.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Production14 {
    /// Production of the pressure tensor (Pa/s).
    pub p_bar: [[f64; 3]; 3],
    /// Production of the energy flux, including the convective
    /// `sum_k U_k Pbar_ki` part (W/(m^2 s)).
    pub q_bar: [f64; 3],
}

/// Applies the linear coefficients to the non-equilibrium fields of
/// `hydro`.
pub fn production_14(
    hydro: &HydroState,
    species: &SpeciesParams,
    inter: &InteractionParams,
) -> Result<Production14, FourteenError> {
    let lin = production_linear_14(hydro, species, inter)?;
    let mut p_bar = [[0.0_f64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            p_bar[i][j] = lin.p_dev_coeff * hydro.p_dev[i][j];
        }
        p_bar[i][i] += lin.p_pi_coeff * hydro.pi;
    }
    let mut q_bar = [0.0_f64; 3];
    for i in 0..3 {
        q_bar[i] = lin.q_q_coeff * hydro.q[i];
        for k in 0..3 {
            q_bar[i] += hydro.u[k] * p_bar[k][i];
        }
    }
    Ok(Production14 { p_bar, q_bar })
}

/// Relaxation times of the three non-equilibrium fields (s).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RelaxationTimes {
    /// Shear-stress relaxation time `tau_s = -1/c_dev`.
    pub tau_s: f64,
    /// Dynamic-pressure relaxation time `tau_pi = -1/c_pi`, so that
    /// `Pbar_ii = -(3/tau_pi) Pi`.
    pub tau_pi: f64,
    /// Heat-flux relaxation time `tau_q = -1/c_q`.
    pub tau_q: f64,
}

/// Relaxation times from the linear production coefficients.
pub fn relaxation_times(
    hydro: &HydroState,
    species: &SpeciesParams,
    inter: &InteractionParams,
) -> Result<RelaxationTimes, FourteenError> {
    let lin = production_linear_14(hydro, species, inter)?;
    Ok(RelaxationTimes {
        tau_s: -1.0 / lin.p_dev_coeff,
        tau_pi: -1.0 / lin.p_pi_coeff,
        tau_q: -1.0 / lin.q_q_coeff,
    })
}

/// First-order transport coefficients and the Prandtl numbers.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TransportCoefficients {
    /// Shear viscosity `mu = p tau_s` (Pa s).
    pub mu: f64,
    /// Bulk viscosity `nu = (4(alpha+1)/(3(2 alpha+5))) p tau_pi` (Pa s).
    pub nu: f64,
    /// Heat conductivity `kappa = (alpha+7/2)(p^2/(rho T)) tau_q`
    /// (W/(m K)).
    pub kappa: f64,
    /// `Pr = (alpha+7/2)(k/m) mu/kappa`; a function of `(alpha, gamma)`
    /// only.
    pub prandtl: f64,
    /// Eucken comparison value `(4 alpha+14)/(4 alpha+19)`.
    pub prandtl_eucken: f64,
}

/// Transport coefficients at a state.
pub fn transport_coefficients(
    hydro: &HydroState,
    species: &SpeciesParams,
    inter: &InteractionParams,
) -> Result<TransportCoefficients, FourteenError> {
    let times = relaxation_times(hydro, species, inter)?;
    let p = hydro.pressure(species);
    let alpha = species.alpha;
    let mu = p * times.tau_s;
    let nu = 4.0 * (alpha + 1.0) / (3.0 * (2.0 * alpha + 5.0)) * p * times.tau_pi;
    let kappa = (alpha + 3.5) * p * p / (hydro.rho * hydro.t) * times.tau_q;
    Ok(TransportCoefficients {
        mu,
        nu,
        kappa,
        prandtl: (alpha + 3.5) * species.k_b / species.m * mu / kappa,
        prandtl_eucken: eucken_prandtl(alpha),
    })
}

/// Prandtl number as a pure function of `(alpha, gamma)`:
/// `(5/24) D_q / ((alpha+7/2)(4 alpha+gamma+7)
///  (2^(gamma+2)(gamma+5) n1 + 15 n2))`
/// with `D_q` the heat-flux coefficient bracket. Independent of the
/// reference state and of the kernel strength.
pub fn prandtl(alpha: f64, gamma: f64) -> Result<f64, FourteenError> {
    // Pr = (alpha+7/2)(k/m) mu/kappa collapses to the ratio of the
    // heat-flux and shear coefficient cores.
    let (dev, _, q_c) = coefficient_cores(alpha, gamma)?;
    Ok(q_c / dev)
}

/// Eucken reference value `(4 alpha + 14)/(4 alpha + 19)`.
pub fn eucken_prandtl(alpha: f64) -> f64 {
    (4.0 * alpha + 14.0) / (4.0 * alpha + 19.0)
}

/// `Pr(alpha, gamma) - Pr_eucken(alpha)`; independent of the reference
/// state.
pub fn delta_prandtl(alpha: f64, gamma: f64) -> Result<f64, FourteenError> {
    Ok(prandtl(alpha, gamma)? - eucken_prandtl(alpha))
}

/// Solves `Pr(alpha, gamma) = target` for `gamma` in `(1e-3, 100)` by a
/// 200-interval sign-change scan followed by bisection; the returned
/// root satisfies `|Pr - target| < 1e-8`.
pub fn solve_gamma_star(alpha: f64, target: f64) -> Result<f64, FourteenError> {
    let (lo, hi) = (1e-3_f64, 100.0_f64);
    let f = |g: f64| -> Result<f64, FourteenError> { Ok(prandtl(alpha, g)? - target) };
    let n = 200;
    let mut a = lo;
    let mut fa = f(a)?;
    let mut bracket = None;
    for i in 1..=n {
        let b = lo + (hi - lo) * i as f64 / n as f64;
        let fb = f(b)?;
        if fa == 0.0 {
            return Ok(a);
        }
        if fa * fb < 0.0 {
            bracket = Some((a, fa, b, fb));
            break;
        }
        a = b;
        fa = fb;
    }
    let (mut a, mut fa, mut b, _) =
        bracket.ok_or(FourteenError::NoSignChange { lo, hi, target })?;
    for _ in 0..200 {
        let mid = 0.5 * (a + b);
        let fm = f(mid)?;
        if fm == 0.0 || (b - a) < 1e-13 * mid.max(1.0) {
            return Ok(mid);
        }
        if fa * fm < 0.0 {
            b = mid;
        } else {
            a = mid;
            fa = fm;
        }
    }
    Ok(0.5 * (a + b))
}

/// Maps a viscosity power-law exponent (`mu ~ T^s`) to the kernel
/// exponent `gamma = 2 - 2 s`; requires `s < 1`.
pub fn s_to_gamma(s: f64) -> Result<f64, FourteenError> {
    if !(s < 1.0) {
        return Err(FourteenError::ExponentOutOfRange(s));
    }
    Ok(2.0 - 2.0 * s)
}

/// Constitutive (closure) values of the unclosed third-order fluxes.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ClosureFluxes {
    /// Central third velocity moment
    /// `p_ijk = (q_i d_jk + q_j d_ik + q_k d_ij)/(alpha+7/2)`.
    pub p_ijk: [[[f64; 3]; 3]; 3],
    /// Central energy-weighted pressure moment
    /// `q_ij = (alpha+7/2)(p^2/rho) d_ij
    ///  + (alpha+9/2)(p/rho)(p<ij> + Pi d_ij)`.
    pub q_ij: [[f64; 3]; 3],
}

/// Closure values of the third-order moments at a state.
pub fn closure_fluxes_14(
    hydro: &HydroState,
    species: &SpeciesParams,
) -> Result<ClosureFluxes, FourteenError> {
    hydro.validate()?;
    species.validate()?;
    let p = hydro.pressure(species);
    let alpha = species.alpha;
    let mut p_ijk = [[[0.0_f64; 3]; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            for k in 0..3 {
                let mut v = 0.0;
                if j == k {
                    v += hydro.q[i];
                }
                if i == k {
                    v += hydro.q[j];
                }
                if i == j {
                    v += hydro.q[k];
                }
                p_ijk[i][j][k] = v / (alpha + 3.5);
            }
        }
    }
    let mut q_ij = [[0.0_f64; 3]; 3];
    for i in 0..3 {
        for j in 0..3 {
            q_ij[i][j] = (alpha + 4.5) * p / hydro.rho * hydro.p_dev[i][j];
        }
        q_ij[i][i] += (alpha + 3.5) * p * p / hydro.rho + (alpha + 4.5) * p / hydro.rho * hydro.pi;
    }
    Ok(ClosureFluxes { p_ijk, q_ij })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::ensembles::{
        moment, DistributionKind, DistributionSpec, MomentMethod, MomentWeight,
    };
    use crate::six_field::tau_pi_six;
    use approx::assert_relative_eq;

    fn unit_state() -> HydroState {
        HydroState::equilibrium(1.0, [0.0; 3], 1.0)
    }

    fn unit_inter(gamma: f64) -> InteractionParams {
        InteractionParams::constant(gamma, 1.0).unwrap()
    }

    #[test]
    fn n_constants_reference() {
        let (n1, n2) = n_constants(0.0, 1.0).unwrap();
        assert_relative_eq!(n1, 2.0, max_relative = 1e-13);
        assert_relative_eq!(
            n2,
            std::f64::consts::PI.powi(2) / 4.0,
            max_relative = 1e-13
        );
    }

    #[test]
    fn production_coefficients_reference() {
        let cases = [
            (0.0, 1.0, 5.239019742567173, 6.216575180088412, 4.204588432363971),
            (0.5, 2.0, 2.1305812675367504, 1.9141050959688453, 1.6724683167406354),
            (0.0, 2.0, 11.010534252581371, 9.574377610940322, 8.20660938080599),
            (0.5, 1.0, 1.2064710659802034, 1.392081999207927, 1.0102261730363081),
        ];
        let h = unit_state();
        for (alpha, gamma, dev, pi_c, q_c) in cases {
            let sp = SpeciesParams::dimensionless(alpha).unwrap();
            let lin = production_linear_14(&h, &sp, &unit_inter(gamma)).unwrap();
            assert_relative_eq!(lin.p_dev_coeff, -dev, max_relative = 1e-12);
            assert_relative_eq!(lin.p_pi_coeff, -pi_c, max_relative = 1e-12);
            assert_relative_eq!(lin.q_q_coeff, -q_c, max_relative = 1e-12);
        }
    }

    #[test]
    fn coefficients_negative_on_grid() {
        let h = unit_state();
        for alpha in [-0.5, 0.0, 0.5, 1.0, 2.0, 5.0] {
            let sp = SpeciesParams::dimensionless(alpha).unwrap();
            for gamma in [0.1, 0.5, 1.0, 2.0, 4.0] {
                let lin = production_linear_14(&h, &sp, &unit_inter(gamma)).unwrap();
                assert!(lin.p_dev_coeff < 0.0, "({alpha}, {gamma})");
                assert!(lin.p_pi_coeff < 0.0, "({alpha}, {gamma})");
                assert!(lin.q_q_coeff < 0.0, "({alpha}, {gamma})");
            }
        }
    }

    #[test]
    fn production_applies_fields_and_is_galilean() {
        let sp = SpeciesParams::dimensionless(0.0).unwrap();
        let inter = unit_inter(1.0);
        let mut h = unit_state();
        h.p_dev[0][1] = 0.01;
        h.p_dev[1][0] = 0.01;
        h.pi = 0.005;
        h.q = [0.01, 0.0, 0.0];
        let lin = production_linear_14(&h, &sp, &inter).unwrap();
        let prod = production_14(&h, &sp, &inter).unwrap();
        assert_relative_eq!(prod.p_bar[0][1], lin.p_dev_coeff * 0.01, max_relative = 1e-14);
        assert_relative_eq!(prod.p_bar[0][0], lin.p_pi_coeff * 0.005, max_relative = 1e-14);
        assert_relative_eq!(prod.q_bar[0], lin.q_q_coeff * 0.01, max_relative = 1e-14);
        // Trace relaxes the dynamic pressure with time 3 tau_pi.
        let trace: f64 = (0..3).map(|i| prod.p_bar[i][i]).sum();
        assert_relative_eq!(trace, 3.0 * lin.p_pi_coeff * h.pi, max_relative = 1e-14);

        let mut moving = h;
        moving.u = [100.0, -50.0, 3.0];
        let prod_m = production_14(&moving, &sp, &inter).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert_relative_eq!(prod_m.p_bar[i][j], prod.p_bar[i][j], max_relative = 1e-12);
            }
            let conv: f64 = (0..3).map(|k| moving.u[k] * prod_m.p_bar[k][i]).sum();
            assert_relative_eq!(prod_m.q_bar[i], prod.q_bar[i] + conv, max_relative = 1e-12);
        }
    }

    #[test]
    fn transport_reference_values() {
        let h = unit_state();
        let sp0 = SpeciesParams::dimensionless(0.0).unwrap();
        let tc = transport_coefficients(&h, &sp0, &unit_inter(1.0)).unwrap();
        assert_relative_eq!(tc.mu, 0.19087540210527817, max_relative = 1e-12);
        assert_relative_eq!(tc.nu, 0.042896073632439228, max_relative = 1e-12);
        assert_relative_eq!(tc.kappa, 0.83242392360200023, max_relative = 1e-12);
        assert_relative_eq!(tc.prandtl, 0.80255250771467410, max_relative = 1e-12);
        let sp5 = SpeciesParams::dimensionless(0.5).unwrap();
        let tc5 = transport_coefficients(&h, &sp5, &unit_inter(2.0)).unwrap();
        assert_relative_eq!(tc5.mu, 0.46935548304906468, max_relative = 1e-12);
        assert_relative_eq!(tc5.nu, 0.17414578438526804, max_relative = 1e-12);
        assert_relative_eq!(tc5.kappa, 2.3916746045122932, max_relative = 1e-12);
        assert_relative_eq!(tc5.prandtl, 0.78498217468805704, max_relative = 1e-12);
    }

    #[test]
    fn transport_ties_to_relaxation_times() {
        let h = unit_state();
        let sp = SpeciesParams::dimensionless(0.5).unwrap();
        let inter = unit_inter(2.0);
        let times = relaxation_times(&h, &sp, &inter).unwrap();
        let tc = transport_coefficients(&h, &sp, &inter).unwrap();
        let p = h.pressure(&sp);
        assert_relative_eq!(tc.mu, p * times.tau_s, max_relative = 1e-12);
        assert_relative_eq!(
            tc.nu,
            4.0 * 1.5 / (3.0 * 6.0) * p * times.tau_pi,
            max_relative = 1e-12
        );
        assert_relative_eq!(
            tc.kappa,
            4.0 * p * p / (h.rho * h.t) * times.tau_q,
            max_relative = 1e-12
        );
        // Pr from the pure function agrees with the state-based ratio.
        assert_relative_eq!(
            tc.prandtl,
            prandtl(sp.alpha, inter.gamma).unwrap(),
            max_relative = 1e-12
        );
        assert_relative_eq!(
            tc.prandtl,
            4.0 * sp.k_b / sp.m * tc.mu / tc.kappa,
            max_relative = 1e-12
        );
    }

    #[test]
    fn bulk_time_is_thrice_the_scalar_one() {
        let h = unit_state();
        for (alpha, gamma) in [(0.0, 1.0), (0.5, 2.0), (2.0, 0.5)] {
            let sp = SpeciesParams::dimensionless(alpha).unwrap();
            let inter = unit_inter(gamma);
            let times = relaxation_times(&h, &sp, &inter).unwrap();
            let tau6 = tau_pi_six(&h, &sp, &inter).unwrap();
            assert_relative_eq!(times.tau_pi, 3.0 * tau6, max_relative = 1e-12);
        }
    }

    #[test]
    fn prandtl_is_state_free() {
        let sp = SpeciesParams::si("N2", 4.652e-26, 0.5).unwrap();
        let inter = unit_inter(1.3);
        let cold = HydroState::equilibrium(1.2, [0.0; 3], 300.0);
        let hot = HydroState::equilibrium(0.4, [20.0, 0.0, 0.0], 900.0);
        let pr_cold = transport_coefficients(&cold, &sp, &inter).unwrap().prandtl;
        let pr_hot = transport_coefficients(&hot, &sp, &inter).unwrap().prandtl;
        assert_relative_eq!(pr_cold, pr_hot, max_relative = 1e-12);
        assert_relative_eq!(
            pr_cold,
            prandtl(0.5, 1.3).unwrap(),
            max_relative = 1e-12
        );
    }

    #[test]
    fn eucken_reference() {
        assert_relative_eq!(eucken_prandtl(0.0), 14.0 / 19.0, max_relative = 1e-15);
        assert_relative_eq!(eucken_prandtl(0.5), 16.0 / 21.0, max_relative = 1e-15);
    }

    #[test]
    fn gamma_star_reference_roots() {
        let g0 = solve_gamma_star(0.0, 14.0 / 19.0).unwrap();
        assert_relative_eq!(g0, 2.1531635477837522, epsilon = 1e-7);
        assert!((prandtl(0.0, g0).unwrap() - 14.0 / 19.0).abs() < 1e-8);
        let g5 = solve_gamma_star(0.5, 16.0 / 21.0).unwrap();
        assert_relative_eq!(g5, 2.3675517341869009, epsilon = 1e-7);
        let g2 = solve_gamma_star(2.0, 22.0 / 27.0).unwrap();
        assert_relative_eq!(g2, 4.0631141245974462, epsilon = 1e-7);
        assert!(matches!(
            solve_gamma_star(0.0, 2.0),
            Err(FourteenError::NoSignChange { .. })
        ));
    }

    #[test]
    fn s_to_gamma_reference() {
        assert_relative_eq!(s_to_gamma(0.5).unwrap(), 1.0, max_relative = 1e-15);
        assert_relative_eq!(s_to_gamma(0.668).unwrap(), 0.664, max_relative = 1e-12);
        assert!(matches!(
            s_to_gamma(1.0),
            Err(FourteenError::ExponentOutOfRange(_))
        ));
    }

    #[test]
    fn closure_fluxes_match_quadrature_moments() {
        let sp = SpeciesParams::dimensionless(0.5).unwrap();
        let mut h = unit_state();
        h.p_dev = [
            [0.006, 0.01, -0.002],
            [0.01, -0.004, 0.003],
            [-0.002, 0.003, -0.002],
        ];
        h.pi = 0.005;
        h.q = [0.01, -0.006, 0.004];
        let fx = closure_fluxes_14(&h, &sp).unwrap();
        let spec =
            DistributionSpec::new(DistributionKind::FourteenLinearized, h, sp.clone()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let m_q = moment(
                    &spec,
                    MomentWeight::EnergyTensor(i, j),
                    MomentMethod::Quadrature,
                )
                .unwrap()
                .value;
                assert_relative_eq!(m_q, fx.q_ij[i][j], max_relative = 1e-8, epsilon = 1e-12);
                for k in 0..3 {
                    let m_p = moment(
                        &spec,
                        MomentWeight::ThirdVelocity(i, j, k),
                        MomentMethod::Quadrature,
                    )
                    .unwrap()
                    .value;
                    assert_relative_eq!(
                        m_p,
                        fx.p_ijk[i][j][k],
                        max_relative = 1e-8,
                        epsilon = 1e-12
                    );
                }
            }
        }
    }

    #[test]
    fn closure_fluxes_equilibrium() {
        let sp = SpeciesParams::dimensionless(2.0).unwrap();
        let h = unit_state();
        let fx = closure_fluxes_14(&h, &sp).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                let expect = if i == j { (2.0 + 3.5) * 1.0 } else { 0.0 };
                assert_relative_eq!(fx.q_ij[i][j], expect, epsilon = 1e-14);
                for k in 0..3 {
                    assert_relative_eq!(fx.p_ijk[i][j][k], 0.0, epsilon = 1e-14);
                }
            }
        }
    }

    #[test]
    fn tabulated_angular_model_is_rejected() {
        let h = unit_state();
        let sp = SpeciesParams::dimensionless(0.0).unwrap();
        let inter = InteractionParams::tabulated(1.0, 1.0).unwrap();
        assert!(matches!(
            production_linear_14(&h, &sp, &inter),
            Err(FourteenError::Micro(MicroError::AngularModelNotPointwise))
        ));
    }
}
