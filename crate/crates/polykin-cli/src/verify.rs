//! Monte Carlo verification battery: every closed-form quantity with
//! an independent sampling estimator is recomputed and compared at a
//! `z <= 4` gate (or exact bounds where the check is deterministic).

use polykin::ensembles::{
    collision_frequency, DistributionKind, DistributionSpec, HydroState,
};
use polykin::fourteen_moment::production_linear_14;
use polykin::mc::{
    collision_frequency_oracle, entropy_dissipation, equivalence_check, production_14_oracle,
    production_p_oracle, weak_form, McOptions, Production6Route, TestFunction, WeakFormSetting,
    WeakFormSpec,
};
use polykin::microdynamics::{InteractionParams, MicroState, SpeciesParams};
use polykin::six_field::{entropy_production_sigma, production_p};
use serde::Serialize;

use crate::AppError;

/// Gate in combined standard errors for stochastic comparisons.
const Z_GATE: f64 = 4.0;

/// One verification check.
#[derive(Debug, Clone, Serialize)]
pub struct Check {
    /// What was compared.
    pub name: String,
    /// Verdict.
    pub pass: bool,
    /// Numbers behind the verdict.
    pub detail: String,
}

/// Full battery result.
#[derive(Debug, Clone, Serialize)]
pub struct VerifyReport {
    /// Output schema version.
    pub schema: u32,
    /// Base seed.
    pub seed: u64,
    /// Samples per estimator.
    pub samples: u64,
    /// Worker count.
    pub workers: usize,
    /// Stochastic gate in standard errors.
    pub z_gate: f64,
    /// Individual checks.
    pub checks: Vec<Check>,
    /// Every check passed.
    pub all_pass: bool,
}

fn z_check(name: &str, mc: f64, se: f64, closed: f64) -> Check {
    let z = (mc - closed).abs() / se.max(f64::MIN_POSITIVE);
    Check {
        name: name.to_string(),
        pass: z <= Z_GATE,
        detail: format!("mc {mc} vs closed {closed}, se {se}, z {z:.2}"),
    }
}

/// Runs the battery in canonical dimensionless units.
pub fn run_verify(opt: &McOptions) -> Result<VerifyReport, AppError> {
    let mut checks = Vec::new();
    let sp0 = SpeciesParams::dimensionless(0.0)?;
    let sp_half = SpeciesParams::dimensionless(0.5)?;
    // K = 1/(4 pi) makes the angular integral 1.
    let inter = InteractionParams::constant(1.0, 0.25 / std::f64::consts::PI)?;
    let mut h = HydroState::equilibrium(1.0, [0.0; 3], 1.0);
    h.pi = 0.3;

    // Dynamic-pressure production, both sampling routes.
    let closed_p = production_p(&h, &sp0, &inter)?;
    for (route, name) in [
        (Production6Route::Reduced, "production_p_reduced"),
        (Production6Route::Full, "production_p_full"),
    ] {
        let est = production_p_oracle(&h, &sp0, &inter, route, opt)?;
        checks.push(z_check(name, est.value, est.std_error, closed_p));
    }

    // Linear production coefficients of the fourteen-moment closure.
    let eq = HydroState::equilibrium(1.0, [0.0; 3], 1.0);
    let lin = production_linear_14(&eq, &sp0, &inter)?;
    let est14 = production_14_oracle(&eq, &sp0, &inter, opt)?;
    checks.push(z_check(
        "production14_deviator_coeff",
        est14.p_dev_coeff.value,
        est14.p_dev_coeff.std_error,
        lin.p_dev_coeff,
    ));
    checks.push(z_check(
        "production14_trace_coeff",
        est14.p_pi_coeff.value,
        est14.p_pi_coeff.std_error,
        lin.p_pi_coeff,
    ));
    checks.push(z_check(
        "production14_heat_flux_coeff",
        est14.q_q_coeff.value,
        est14.q_q_coeff.std_error,
        lin.q_q_coeff,
    ));

    // Equilibrium collision frequency at three molecular states.
    for (c, i) in [(0.0, 0.0), (1.0, 1.0), (3.0, 0.5)] {
        let state = MicroState { v: [c, 0.0, 0.0], i };
        let closed = collision_frequency(&state, &eq, &sp0, &inter)?;
        let est = collision_frequency_oracle(&state, &eq, &sp0, &inter, opt)?;
        checks.push(z_check(
            &format!("collision_frequency_c{c}_i{i}"),
            est.value,
            est.std_error,
            closed,
        ));
    }

    // Weak-form annihilation of the collision invariants.
    let mut h_half = HydroState::equilibrium(1.0, [0.0; 3], 1.0);
    h_half.pi = 0.3;
    let dist = DistributionSpec::new(DistributionKind::SixField, h_half, sp_half.clone())?;
    for (tf, name) in [
        (TestFunction::Mass, "weak_form_mass"),
        (TestFunction::Momentum(0), "weak_form_momentum_x"),
        (TestFunction::TotalEnergy, "weak_form_energy"),
    ] {
        let wf = WeakFormSpec {
            setting: WeakFormSetting::NonWeighted,
            test_function: tf,
            distribution: dist.clone(),
            interaction: inter.clone(),
        };
        let est = weak_form(&wf, opt)?;
        let bound = (Z_GATE * est.std_error).max(1e-10);
        checks.push(Check {
            name: name.to_string(),
            pass: est.value.abs() <= bound,
            detail: format!("|mc| {} vs bound {bound}", est.value.abs()),
        });
    }

    // Weighted and plain weak-form routes on one sample stream.
    let rep = equivalence_check(&dist, &inter, TestFunction::VelocitySquared(0), opt)?;
    checks.push(Check {
        name: "setting_equivalence_common_stream".to_string(),
        pass: rep.common_max_rel <= 1e-12,
        detail: format!("max relative route difference {}", rep.common_max_rel),
    });
    checks.push(Check {
        name: "setting_equivalence_independent".to_string(),
        pass: rep.z_abs <= Z_GATE,
        detail: format!(
            "non-weighted {} vs weighted {}, z {:.2}",
            rep.independent_non_weighted.value, rep.independent_weighted.value, rep.z_abs
        ),
    });

    // Entropy dissipation: strictly negative off equilibrium, matches
    // the closed-form entropy production, vanishes at equilibrium.
    let h0 = {
        let mut h = HydroState::equilibrium(1.0, [0.0; 3], 1.0);
        h.pi = 0.3;
        h
    };
    let six = DistributionSpec::new(DistributionKind::SixField, h0, sp0.clone())?;
    let d6 = entropy_dissipation(&six, &inter, opt)?;
    checks.push(Check {
        name: "entropy_dissipation_negative".to_string(),
        pass: d6.value + Z_GATE * d6.std_error < 0.0,
        detail: format!("upper bound {}", d6.value + Z_GATE * d6.std_error),
    });
    let sigma = entropy_production_sigma(&h0, &sp0, &inter)?;
    checks.push(z_check("entropy_matches_sigma", -d6.value, d6.std_error, sigma));
    let maxw = DistributionSpec::new(DistributionKind::Maxwellian, eq, sp0)?;
    let d_eq = entropy_dissipation(&maxw, &inter, opt)?;
    checks.push(Check {
        name: "entropy_dissipation_equilibrium_zero".to_string(),
        pass: d_eq.value.abs() < 1e-12,
        detail: format!("|mc| {}", d_eq.value.abs()),
    });

    let all_pass = checks.iter().all(|c| c.pass);
    Ok(VerifyReport {
        schema: 1,
        seed: opt.seed,
        samples: opt.n,
        workers: opt.workers,
        z_gate: Z_GATE,
        checks,
        all_pass,
    })
}
