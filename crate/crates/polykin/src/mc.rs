//! Monte Carlo oracles for the collision operator: weak forms,
//! production terms, collision frequency, and entropy dissipation.
//!
//! All estimators draw pair states from Gaussian-Gamma envelopes tied
//! to a [`DistributionSpec`] (velocities normal, internal energies
//! Gamma(alpha+1), energy-sharing fractions `r`, `R` uniform on [0, 1],
//! scattering direction uniform on the sphere) and weight each sample
//! by the exact ratio of the target integrand to the envelope density.
//! The `I^alpha` factors of the measure cancel against the envelope, so
//! weights stay finite for every `alpha > -1`.
//!
//! Estimates are deterministic in `(seed, n, workers)`: worker `w`
//! owns stream `w` of a counter-based generator seeded with `seed`,
//! draws its chunk sequentially in a fixed order, accumulates with
//! compensated summation, and partial results merge in worker order.
//!
//! Pairs with relative speed below `1e-14` of the pair velocity scale
//! are degenerate for the collision transform and enter with weight
//! zero.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::ensembles::{
    envelope, eval_pdf, rescale_weighted, DistributionKind, DistributionSpec, EnsembleError,
    Envelope, HydroState, RescaleDirection,
};
use crate::microdynamics::{
    collide, cross_section_model3, AngularModel, CollisionAngles, CollisionState,
    InteractionParams, MicroError, MicroState, SpeciesParams,
};
use crate::special::SpecialFnError;

const FOUR_PI: f64 = 4.0 * std::f64::consts::PI;

/// Errors from Monte Carlo estimation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum McError {
    /// Invalid option or state for an estimator.
    #[error("invalid input: {0}")]
    Invalid(String),
    /// The estimator has no closed-form reference or sampling route for
    /// this distribution kind.
    #[error("unsupported distribution: {0}")]
    UnsupportedDistribution(String),
    /// Special-function failure.
    #[error(transparent)]
    Special(#[from] SpecialFnError),
    /// Collision-kinematics failure.
    #[error(transparent)]
    Micro(#[from] MicroError),
    /// Ensemble failure (window, validation).
    #[error(transparent)]
    Ensemble(#[from] EnsembleError),
}

/// Sampling budget and reproducibility knobs.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct McOptions {
    /// Base seed of the generator.
    pub seed: u64,
    /// Total number of samples across all workers.
    pub n: u64,
    /// Worker count; results are bit-identical per `(seed, n, workers)`.
    pub workers: usize,
}

/// One Monte Carlo estimate with its sampling uncertainty.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MCEstimate {
    /// Sample mean of the estimator.
    pub value: f64,
    /// Standard error of the mean (nonnegative).
    pub std_error: f64,
    /// Number of samples used.
    pub n_samples: u64,
    /// Seed used.
    pub seed: u64,
}

/// Weak-form factorization route.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum WeakFormSetting {
    /// Density route: `f f_*` against the energy-weighted measure.
    NonWeighted,
    /// Rescaled route: `g g_*` with `g = f I^-alpha` against the
    /// weight-absorbing kernel.
    Weighted,
}

/// Test function `chi(v, I)` of a weak form.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TestFunction {
    /// `chi = m` (collision invariant).
    Mass,
    /// `chi = m v_k` (collision invariant).
    Momentum(usize),
    /// `chi = (m/2)|v|^2 + I` (collision invariant).
    TotalEnergy,
    /// `chi = m v_k^2` (not conserved).
    VelocitySquared(usize),
}

impl TestFunction {
    fn validate(&self) -> Result<(), McError> {
        match self {
            TestFunction::Momentum(k) | TestFunction::VelocitySquared(k) if *k >= 3 => Err(
                McError::Invalid(format!("velocity component index {k} out of range 0..3")),
            ),
            _ => Ok(()),
        }
    }

    fn eval(&self, state: &MicroState, m: f64) -> f64 {
        match self {
            TestFunction::Mass => m,
            TestFunction::Momentum(k) => m * state.v[*k],
            TestFunction::TotalEnergy => {
                0.5 * m * (state.v[0] * state.v[0] + state.v[1] * state.v[1] + state.v[2] * state.v[2])
                    + state.i
            }
            TestFunction::VelocitySquared(k) => m * state.v[*k] * state.v[*k],
        }
    }
}

/// Everything defining one weak-form estimate.
#[derive(Debug, Clone)]
pub struct WeakFormSpec {
    /// Factorization route.
    pub setting: WeakFormSetting,
    /// Test function.
    pub test_function: TestFunction,
    /// Distribution the pair is drawn from.
    pub distribution: DistributionSpec,
    /// Collision kernel (pointwise-constant angular model required).
    pub interaction: InteractionParams,
}

/// Sampling route of the scalar-production oracle.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum Production6Route {
    /// Relative-velocity sampler with the scattering direction
    /// integrated analytically (5 random dimensions per pair).
    Reduced,
    /// Full pair sampler through the collision transform (13 random
    /// dimensions per pair).
    Full,
}

/// Estimates of the three linear production coefficients.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct Production14Estimates {
    /// Coefficient of the pressure deviator in its own production.
    pub p_dev_coeff: MCEstimate,
    /// Coefficient of `Pi delta_ij` in the pressure-tensor production.
    pub p_pi_coeff: MCEstimate,
    /// Coefficient of `q_i` in the heat-flux production.
    pub q_q_coeff: MCEstimate,
}

/// Two-route agreement report of the weak form.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EquivalenceReport {
    /// Non-weighted estimate from the shared sample stream.
    pub common_non_weighted: MCEstimate,
    /// Weighted estimate from the same shared stream.
    pub common_weighted: MCEstimate,
    /// Largest per-sample relative difference between the two routes on
    /// the shared stream.
    pub common_max_rel: f64,
    /// Non-weighted estimate from an independent stream.
    pub independent_non_weighted: MCEstimate,
    /// Weighted estimate from a second independent stream.
    pub independent_weighted: MCEstimate,
    /// `|difference| / combined standard error` of the independent
    /// estimates.
    pub z_abs: f64,
}

/// Kahan compensated accumulator.
#[derive(Debug, Clone, Copy, Default)]
struct Kahan {
    s: f64,
    c: f64,
}

impl Kahan {
    fn add(&mut self, x: f64) {
        let y = x - self.c;
        let t = self.s + y;
        self.c = (t - self.s) - y;
        self.s = t;
    }

    fn value(&self) -> f64 {
        self.s
    }
}

fn check_options(opt: &McOptions) -> Result<(), McError> {
    if opt.n < 2 {
        return Err(McError::Invalid(format!(
            "need at least 2 samples, got {}",
            opt.n
        )));
    }
    if opt.workers == 0 {
        return Err(McError::Invalid("need at least one worker".to_string()));
    }
    Ok(())
}

/// Runs `kernel` over `opt.n` samples split across workers; returns one
/// estimate per kernel output plus the largest relative difference
/// between outputs 0 and 1 (used by the route-equivalence check;
/// meaningful only for `NOUT >= 2`).
fn run_kernel<const NOUT: usize, F>(
    opt: &McOptions,
    kernel: F,
) -> Result<([MCEstimate; NOUT], f64), McError>
where
    F: Fn(&mut ChaCha8Rng, &mut [f64; NOUT]) + Sync,
{
    check_options(opt)?;
    let workers = opt.workers as u64;
    let base = opt.n / workers;
    let rem = opt.n % workers;
    let partials: Vec<([f64; NOUT], [f64; NOUT], f64)> = (0..opt.workers)
        .into_par_iter()
        .map(|w| {
            let mut rng = ChaCha8Rng::seed_from_u64(opt.seed);
            rng.set_stream(w as u64);
            let count = base + u64::from((w as u64) < rem);
            let mut sums = [Kahan::default(); NOUT];
            let mut sumsq = [Kahan::default(); NOUT];
            let mut max_rel = 0.0_f64;
            let mut out = [0.0_f64; NOUT];
            for _ in 0..count {
                kernel(&mut rng, &mut out);
                for j in 0..NOUT {
                    sums[j].add(out[j]);
                    sumsq[j].add(out[j] * out[j]);
                }
                if NOUT >= 2 {
                    let scale = out[0].abs().max(out[1].abs());
                    if scale > 0.0 {
                        max_rel = max_rel.max((out[0] - out[1]).abs() / scale);
                    }
                }
            }
            (
                std::array::from_fn(|j| sums[j].value()),
                std::array::from_fn(|j| sumsq[j].value()),
                max_rel,
            )
        })
        .collect();
    let mut sums = [Kahan::default(); NOUT];
    let mut sumsq = [Kahan::default(); NOUT];
    let mut max_rel = 0.0_f64;
    for (ws, wss, wmax) in &partials {
        for j in 0..NOUT {
            sums[j].add(ws[j]);
            sumsq[j].add(wss[j]);
        }
        max_rel = max_rel.max(*wmax);
    }
    let n = opt.n as f64;
    let estimates = std::array::from_fn(|j| {
        let mean = sums[j].value() / n;
        let var = (sumsq[j].value() / n - mean * mean).max(0.0);
        MCEstimate {
            value: mean,
            std_error: (var / (n - 1.0)).sqrt(),
            n_samples: opt.n,
            seed: opt.seed,
        }
    });
    Ok((estimates, max_rel))
}

fn sample_normal3(rng: &mut ChaCha8Rng, mean: [f64; 3], sd: f64) -> [f64; 3] {
    let mut v = [0.0; 3];
    for (out, mu) in v.iter_mut().zip(mean) {
        let z: f64 = rng.sample(StandardNormal);
        *out = mu + sd * z;
    }
    v
}

fn sample_sphere(rng: &mut ChaCha8Rng) -> [f64; 3] {
    let z = 2.0 * rng.gen::<f64>() - 1.0;
    let phi = 2.0 * std::f64::consts::PI * rng.gen::<f64>();
    let s = (1.0 - z * z).max(0.0).sqrt();
    [s * phi.cos(), s * phi.sin(), z]
}

fn norm3(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn dot3(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Pairs closer in velocity than `1e-14` of the pair speed scale are
/// degenerate for the transform and are weighted zero.
pub(crate) fn relative_speed_degenerate(u_norm: f64, scale: f64) -> bool {
    u_norm <= 1e-14 * scale
}

fn gamma_sampler(alpha: f64, scale: f64) -> Result<Gamma<f64>, McError> {
    Gamma::new(alpha + 1.0, scale)
        .map_err(|e| McError::Invalid(format!("gamma envelope parameters: {e}")))
}

fn constant_amplitude(inter: &InteractionParams) -> Result<f64, McError> {
    inter.validate()?;
    match inter.angular {
        AngularModel::Constant { k } => Ok(k),
        AngularModel::Tabulated { .. } => Err(MicroError::AngularModelNotPointwise.into()),
    }
}

fn require_dimensionless(species: &SpeciesParams, what: &str) -> Result<(), McError> {
    if species.m != 1.0 || species.k_b != 1.0 {
        return Err(McError::Invalid(format!(
            "{what} assumes the dimensionless unit system (m = 1, k = 1)"
        )));
    }
    Ok(())
}

/// Per-sample weights of both weak-form routes from one draw.
///
/// Draw order: `v` (3 normals), `v_*` (3 normals), `I`, `I_*` (Gamma),
/// `r`, `R` (uniform), scattering direction (2 uniforms).
#[allow(clippy::too_many_arguments)]
fn weak_form_sample(
    rng: &mut ChaCha8Rng,
    dist: &DistributionSpec,
    env: &Envelope,
    gamma_i: &Gamma<f64>,
    inter: &InteractionParams,
    tf: TestFunction,
    sd: f64,
) -> [f64; 2] {
    let species = &dist.species;
    let alpha = species.alpha;
    let v = sample_normal3(rng, env.u, sd);
    let vs = sample_normal3(rng, env.u, sd);
    let i: f64 = gamma_i.sample(rng);
    let is: f64 = gamma_i.sample(rng);
    let r: f64 = rng.gen();
    let r_kin: f64 = rng.gen();
    let sigma = sample_sphere(rng);
    let u = [v[0] - vs[0], v[1] - vs[1], v[2] - vs[2]];
    if relative_speed_degenerate(norm3(u), norm3(v) + norm3(vs) + sd) {
        return [0.0, 0.0];
    }
    let state = CollisionState {
        a: MicroState { v, i },
        b: MicroState { v: vs, i: is },
        angles: CollisionAngles { r, r_kin, sigma },
    };
    let (post, b_val) = match (collide(&state, species), cross_section_model3(&state, species, inter)) {
        (Ok(p), Ok(b)) => (p, b),
        _ => return [0.0, 0.0],
    };
    let dchi = tf.eval(&post.a, species.m) + tf.eval(&post.b, species.m)
        - tf.eval(&state.a, species.m)
        - tf.eval(&state.b, species.m);
    let f_a = match eval_pdf(dist, &state.a) {
        Ok(f) => f,
        Err(_) => return [0.0, 0.0],
    };
    let f_b = match eval_pdf(dist, &state.b) {
        Ok(f) => f,
        Err(_) => return [0.0, 0.0],
    };
    let env_pair = env.density(&state.a) * env.density(&state.b);
    let phi = (r * (1.0 - r)).powf(alpha);
    let psi = (1.0 - r_kin).powf(2.0 * alpha);
    let ii_alpha = (i * is).powf(alpha);
    let half_pair = 0.5 * FOUR_PI / env_pair;

    // Density route: f f_* / (I I_*)^alpha against the alpha-weighted
    // measure.
    let nw = half_pair * (f_a * f_b / ii_alpha) * dchi
        * (b_val * phi * psi * (1.0 - r_kin) * r_kin.sqrt() * ii_alpha);
    // Rescaled route: g g_* against the weight-absorbing kernel.
    let g_a = match rescale_weighted(f_a, i, alpha, RescaleDirection::PlainToWeighted) {
        Ok(g) => g,
        Err(_) => return [0.0, 0.0],
    };
    let g_b = match rescale_weighted(f_b, is, alpha, RescaleDirection::PlainToWeighted) {
        Ok(g) => g,
        Err(_) => return [0.0, 0.0],
    };
    let b_weighted = b_val * ii_alpha * phi * psi;
    let w = half_pair * (g_a * g_b) * dchi * b_weighted * (1.0 - r_kin) * r_kin.sqrt();
    [nw, w]
}

/// Estimates the collisional weak form
/// `(1/2) <Delta chi>` of the pair average against the chosen route.
/// Collision invariants give zero up to rounding per sample.
pub fn weak_form(wf: &WeakFormSpec, opt: &McOptions) -> Result<MCEstimate, McError> {
    wf.test_function.validate()?;
    constant_amplitude(&wf.interaction)?;
    let env = envelope(&wf.distribution)?;
    let gamma_i = gamma_sampler(wf.distribution.species.alpha, 1.0 / env.b)?;
    let sd = (0.5 / env.a).sqrt();
    let pick = match wf.setting {
        WeakFormSetting::NonWeighted => 0,
        WeakFormSetting::Weighted => 1,
    };
    let (est, _) = run_kernel::<2, _>(opt, |rng, out| {
        *out = weak_form_sample(
            rng,
            &wf.distribution,
            &env,
            &gamma_i,
            &wf.interaction,
            wf.test_function,
            sd,
        );
    })?;
    Ok(est[pick])
}

/// Runs both weak-form routes on one shared stream (reporting their
/// largest per-sample relative difference) and on two independent
/// streams (reporting the agreement z-score). The independent weighted
/// run uses `seed + 1`.
pub fn equivalence_check(
    dist: &DistributionSpec,
    inter: &InteractionParams,
    tf: TestFunction,
    opt: &McOptions,
) -> Result<EquivalenceReport, McError> {
    tf.validate()?;
    constant_amplitude(inter)?;
    let env = envelope(dist)?;
    let gamma_i = gamma_sampler(dist.species.alpha, 1.0 / env.b)?;
    let sd = (0.5 / env.a).sqrt();
    let (est, common_max_rel) = run_kernel::<2, _>(opt, |rng, out| {
        *out = weak_form_sample(rng, dist, &env, &gamma_i, inter, tf, sd);
    })?;
    let base = WeakFormSpec {
        setting: WeakFormSetting::NonWeighted,
        test_function: tf,
        distribution: dist.clone(),
        interaction: inter.clone(),
    };
    let ind_nw = weak_form(&base, opt)?;
    let mut shifted = *opt;
    shifted.seed = opt.seed.wrapping_add(1);
    let weighted = WeakFormSpec {
        setting: WeakFormSetting::Weighted,
        ..base
    };
    let ind_w = weak_form(&weighted, &shifted)?;
    let combined = (ind_nw.std_error * ind_nw.std_error + ind_w.std_error * ind_w.std_error)
        .sqrt()
        .max(f64::MIN_POSITIVE);
    Ok(EquivalenceReport {
        common_non_weighted: est[0],
        common_weighted: est[1],
        common_max_rel,
        independent_non_weighted: ind_nw,
        independent_weighted: ind_w,
        z_abs: (ind_nw.value - ind_w.value).abs() / combined,
    })
}

/// Monte Carlo estimate of the dynamic-pressure production of the
/// bulk-pressure ensemble (independent of the closed form).
///
/// `Reduced` integrates the scattering direction analytically and
/// samples only `(u, I, I_*, r, R)`; `Full` samples complete pairs and
/// pushes them through the collision transform. Dimensionless units
/// required; the full route also needs the pointwise-constant angular
/// model.
pub fn production_p_oracle(
    hydro: &HydroState,
    species: &SpeciesParams,
    inter: &InteractionParams,
    route: Production6Route,
    opt: &McOptions,
) -> Result<MCEstimate, McError> {
    require_dimensionless(species, "the production oracle")?;
    inter.validate()?;
    let spec = DistributionSpec::new(DistributionKind::SixField, *hydro, species.clone())?;
    let env = envelope(&spec)?;
    let (m_rate, n_rate) = (env.a, env.b);
    let alpha = species.alpha;
    let gamma = inter.gamma;
    let rho = hydro.rho;
    let gamma_i = gamma_sampler(alpha, 1.0 / n_rate)?;
    match route {
        Production6Route::Reduced => {
            let b_norm = inter.b_norm();
            let sd_u = (1.0 / m_rate).sqrt();
            let (est, _) = run_kernel::<1, _>(opt, |rng, out| {
                let u = sample_normal3(rng, [0.0; 3], sd_u);
                let i: f64 = gamma_i.sample(rng);
                let is: f64 = gamma_i.sample(rng);
                let r: f64 = rng.gen();
                let r_kin: f64 = rng.gen();
                let u2 = dot3(u, u);
                let work = 0.5 * (r_kin - 1.0) * u2 + 2.0 * r_kin * (i + is);
                let b_tilde = r_kin.powf(0.5 * gamma) * u2.powf(0.5 * gamma)
                    + (r * (1.0 - r_kin) * i).powf(0.5 * gamma)
                    + ((1.0 - r) * (1.0 - r_kin) * is).powf(0.5 * gamma);
                out[0] = 0.5 * rho * rho * b_norm * work * b_tilde
                    * (r * (1.0 - r)).powf(alpha)
                    * (1.0 - r_kin).powf(2.0 * alpha + 1.0)
                    * r_kin.sqrt();
            })?;
            Ok(est[0])
        }
        Production6Route::Full => {
            constant_amplitude(inter)?;
            let sd = (0.5 / m_rate).sqrt();
            let (est, _) = run_kernel::<1, _>(opt, |rng, out| {
                let v = sample_normal3(rng, hydro.u, sd);
                let vs = sample_normal3(rng, hydro.u, sd);
                let i: f64 = gamma_i.sample(rng);
                let is: f64 = gamma_i.sample(rng);
                let r: f64 = rng.gen();
                let r_kin: f64 = rng.gen();
                let sigma = sample_sphere(rng);
                let u = [v[0] - vs[0], v[1] - vs[1], v[2] - vs[2]];
                out[0] = 0.0;
                if relative_speed_degenerate(norm3(u), norm3(v) + norm3(vs) + sd) {
                    return;
                }
                let state = CollisionState {
                    a: MicroState { v, i },
                    b: MicroState { v: vs, i: is },
                    angles: CollisionAngles { r, r_kin, sigma },
                };
                let (post, b_val) = match (
                    collide(&state, species),
                    cross_section_model3(&state, species, inter),
                ) {
                    (Ok(p), Ok(b)) => (p, b),
                    _ => return,
                };
                let work = dot3(post.a.v, post.a.v) + dot3(post.b.v, post.b.v)
                    - dot3(v, v)
                    - dot3(vs, vs);
                out[0] = 0.5 * rho * rho * FOUR_PI * b_val * work
                    * (r * (1.0 - r)).powf(alpha)
                    * (1.0 - r_kin).powf(2.0 * alpha + 1.0)
                    * r_kin.sqrt();
            })?;
            Ok(est[0])
        }
    }
}

/// Monte Carlo estimates of the three linear production coefficients
/// of the fourteen-moment closure, independent of the closed forms.
///
/// Runs in the rest frame (`U = 0`; the convective part of the energy
/// production is analytic) in dimensionless units with the
/// pointwise-constant angular model. The non-equilibrium fields of
/// `hydro` are ignored: coefficients are properties of `(rho, T)`.
pub fn production_14_oracle(
    hydro: &HydroState,
    species: &SpeciesParams,
    inter: &InteractionParams,
    opt: &McOptions,
) -> Result<Production14Estimates, McError> {
    require_dimensionless(species, "the production oracle")?;
    constant_amplitude(inter)?;
    hydro.validate()?;
    if hydro.u != [0.0; 3] {
        return Err(McError::Invalid(
            "the linear-production oracle runs in the rest frame (U = 0)".to_string(),
        ));
    }
    let alpha = species.alpha;
    let rho = hydro.rho;
    let t = hydro.t;
    let p = rho * t;
    let gamma_i = gamma_sampler(alpha, t)?;
    let sd = t.sqrt();
    let dev_pre = rho * rho * rho / (p * p) / 30.0;
    let pi_pre = rho * rho * rho / (p * p) * (alpha + 2.5) / (6.0 * (alpha + 1.0));
    let q_pre = rho * rho * rho * rho / (3.0 * (alpha + 3.5) * p * p * p);
    let (est, _) = run_kernel::<3, _>(opt, |rng, out| {
        let c = sample_normal3(rng, [0.0; 3], sd);
        let cs = sample_normal3(rng, [0.0; 3], sd);
        let i: f64 = gamma_i.sample(rng);
        let is: f64 = gamma_i.sample(rng);
        let r: f64 = rng.gen();
        let r_kin: f64 = rng.gen();
        let sigma = sample_sphere(rng);
        let u = [c[0] - cs[0], c[1] - cs[1], c[2] - cs[2]];
        *out = [0.0; 3];
        if relative_speed_degenerate(norm3(u), norm3(c) + norm3(cs) + sd) {
            return;
        }
        let state = CollisionState {
            a: MicroState { v: c, i },
            b: MicroState { v: cs, i: is },
            angles: CollisionAngles { r, r_kin, sigma },
        };
        let (post, b_val) = match (
            collide(&state, species),
            cross_section_model3(&state, species, inter),
        ) {
            (Ok(p), Ok(b)) => (p, b),
            _ => return,
        };
        let (cp, csp) = (post.a.v, post.b.v);
        let (ip, isp) = (post.a.i, post.b.i);
        let c2 = dot3(c, c);
        let cs2 = dot3(cs, cs);
        let cp2 = dot3(cp, cp);
        let csp2 = dot3(csp, csp);
        let meas = FOUR_PI * b_val
            * (r * (1.0 - r)).powf(alpha)
            * (1.0 - r_kin).powf(2.0 * alpha + 1.0)
            * r_kin.sqrt();
        let w1 = c2 * (cp2 + csp2 - c2 - cs2);
        let w2 = dot3(c, cp).powi(2) + dot3(c, csp).powi(2) - c2 * c2 - dot3(c, cs).powi(2);
        let e = 0.5 * c2 + i;
        let wq = e
            * ((0.5 * cp2 + ip) * dot3(cp, c) + (0.5 * csp2 + isp) * dot3(csp, c)
                - e * c2
                - (0.5 * cs2 + is) * dot3(cs, c));
        out[0] = dev_pre * (3.0 * w2 - w1) * meas;
        out[1] = pi_pre * w1 * meas;
        out[2] = q_pre * wq * meas;
    })?;
    Ok(Production14Estimates {
        p_dev_coeff: est[0],
        p_pi_coeff: est[1],
        q_q_coeff: est[2],
    })
}

/// Monte Carlo estimate of the equilibrium collision frequency at one
/// molecular state, independent of the closed form.
///
/// Draws the partner from the equilibrium ensemble of `hydro` and the
/// angles uniformly; needs the pointwise-constant angular model.
pub fn collision_frequency_oracle(
    state: &MicroState,
    hydro: &HydroState,
    species: &SpeciesParams,
    inter: &InteractionParams,
    opt: &McOptions,
) -> Result<MCEstimate, McError> {
    constant_amplitude(inter)?;
    hydro.validate()?;
    species.validate()?;
    let alpha = species.alpha;
    let kt = species.k_b * hydro.t;
    let gamma_i = gamma_sampler(alpha, kt)?;
    let sd = (kt / species.m).sqrt();
    let n_dens = hydro.rho / species.m;
    let probe = *state;
    let (est, _) = run_kernel::<1, _>(opt, |rng, out| {
        let vs = sample_normal3(rng, hydro.u, sd);
        let is: f64 = gamma_i.sample(rng);
        let r: f64 = rng.gen();
        let r_kin: f64 = rng.gen();
        let sigma = sample_sphere(rng);
        let pair = CollisionState {
            a: probe,
            b: MicroState { v: vs, i: is },
            angles: CollisionAngles { r, r_kin, sigma },
        };
        out[0] = match cross_section_model3(&pair, species, inter) {
            Ok(b_val) => {
                n_dens * FOUR_PI * b_val
                    * (r * (1.0 - r)).powf(alpha)
                    * (1.0 - r_kin).powf(2.0 * alpha + 1.0)
                    * r_kin.sqrt()
            }
            Err(_) => 0.0,
        };
    })?;
    Ok(est[0])
}

/// Monte Carlo estimate of the entropy dissipation functional
/// `D(f) = integral of the collision operator against log(f I^-alpha)`.
///
/// Nonpositive; zero per sample at equilibrium. Only the Maxwellian and
/// bulk-pressure kinds carry the exponential form whose logarithm is
/// exactly linear in the conserved pair quantities.
pub fn entropy_dissipation(
    dist: &DistributionSpec,
    inter: &InteractionParams,
    opt: &McOptions,
) -> Result<MCEstimate, McError> {
    if dist.kind == DistributionKind::FourteenLinearized {
        return Err(McError::UnsupportedDistribution(
            "signed polynomial densities have no pointwise logarithm".to_string(),
        ));
    }
    constant_amplitude(inter)?;
    let env = envelope(dist)?;
    let species = &dist.species;
    let alpha = species.alpha;
    let gamma_i = gamma_sampler(alpha, 1.0 / env.b)?;
    let sd = (0.5 / env.a).sqrt();
    let n_dens = env.number_density;
    let (a_rate, b_rate) = (env.a, env.b);
    let u_bulk = env.u;
    let (est, _) = run_kernel::<1, _>(opt, |rng, out| {
        let v = sample_normal3(rng, u_bulk, sd);
        let vs = sample_normal3(rng, u_bulk, sd);
        let i: f64 = gamma_i.sample(rng);
        let is: f64 = gamma_i.sample(rng);
        let r: f64 = rng.gen();
        let r_kin: f64 = rng.gen();
        let sigma = sample_sphere(rng);
        let u = [v[0] - vs[0], v[1] - vs[1], v[2] - vs[2]];
        out[0] = 0.0;
        if relative_speed_degenerate(norm3(u), norm3(v) + norm3(vs) + sd) {
            return;
        }
        let state = CollisionState {
            a: MicroState { v, i },
            b: MicroState { v: vs, i: is },
            angles: CollisionAngles { r, r_kin, sigma },
        };
        let (post, b_val) = match (
            collide(&state, species),
            cross_section_model3(&state, species, inter),
        ) {
            (Ok(p), Ok(b)) => (p, b),
            _ => return,
        };
        // log g is linear in (|c|^2, I); the constant cancels in the
        // pair difference. Peculiar velocities keep the per-sample
        // cancellation at equilibrium down at rounding level.
        let pec = |w: [f64; 3]| {
            [w[0] - u_bulk[0], w[1] - u_bulk[1], w[2] - u_bulk[2]]
        };
        let (ca, cb, cap, cbp) = (pec(v), pec(vs), pec(post.a.v), pec(post.b.v));
        let d_ln_g = -a_rate * (dot3(cap, cap) + dot3(cbp, cbp) - dot3(ca, ca) - dot3(cb, cb))
            - b_rate * (post.a.i + post.b.i - i - is);
        out[0] = 0.5 * n_dens * n_dens * FOUR_PI * b_val * d_ln_g
            * (r * (1.0 - r)).powf(alpha)
            * (1.0 - r_kin).powf(2.0 * alpha + 1.0)
            * r_kin.sqrt();
    })?;
    Ok(est[0])
}
