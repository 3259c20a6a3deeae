//! Distribution functions, their moments, entropy densities, and the
//! collision frequency.
//!
//! Three ensembles share one evaluation path:
//!
//! * local equilibrium
//!   `f_M = I^alpha (rho/m) (m/(2 pi k T))^(3/2) (kT)^-(alpha+1)
//!   / Gamma(alpha+1) * exp(-((m/2)|c|^2 + I)/(kT))`,
//! * the six-field maximum-entropy closure
//!   `f6 = I^alpha L exp(-M |c|^2 - N I)` whose parameters `(M, N, L)`
//!   absorb the dynamic pressure `Pi` and stay positive on the window
//!   `-1 < Pi/p < (2/3)(alpha + 1)`,
//! * the linearized fourteen-moment closure `f14 = f_M * (1 + ...)`
//!   carrying `Pi`, the pressure deviator, and the heat flux.
//!
//! Every density factorizes as
//! `I^alpha * (polynomial in c, I) * exp(-a|c|^2 - b I)`, so moments are
//! evaluated with tensorized Gauss-Hermite x generalized Gauss-Laguerre
//! rules (40 points per direction), which integrate them to near machine
//! precision; a seeded Monte Carlo alternative serves as an independent
//! route.
//!
//! The collision frequency of the speed-sum kernel has the closed form
//! `nu(v, I) = (rho/m) ||b|| (p/rho)^(gamma/2) nu_hat(c_hat, I_hat)`
//! with `c_hat = sqrt(m/(kT)) |v - U|`, `I_hat = I/(kT)`, and `nu_hat`
//! combining `Gamma` factors with `1F1((gamma+3)/2, 3/2, c_hat^2/2)`.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, StandardNormal};
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::microdynamics::{InteractionParams, MicroError, MicroState, SpeciesParams};
use crate::quadrature::GaussRule;
use crate::special::{gamma_fn, hyp1f1_b3half_scaled, ln_gamma, SpecialFnError};

/// Errors from ensemble construction and evaluation.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum EnsembleError {
    /// Hydrodynamic state violates an invariant (positivity, traceless
    /// deviator).
    #[error("invalid hydrodynamic state: {0}")]
    InvalidState(String),
    /// `Pi/p` outside the six-field moment-convergence window
    /// `(-1, (2/3)(alpha + 1))`.
    #[error("Pi/p = {x} outside the six-field window (-1, {hi})")]
    SixFieldOutOfRange {
        /// Offending ratio `Pi/p`.
        x: f64,
        /// Upper window edge `(2/3)(alpha + 1)`.
        hi: f64,
    },
    /// Weight selector with a component index outside `0..3`.
    #[error("unsupported weight selector: {0}")]
    UnsupportedWeight(String),
    /// Forward rescale `g I^alpha` diverges at `I = 0` for `alpha < 0`.
    #[error("rescale singular: value is +inf at I = 0 for alpha < 0")]
    RescaleSingular,
    /// Inverse rescale `f I^-alpha` is 0/0 at `I = 0` for `alpha > 0`;
    /// the limit exists for densities carrying the `I^alpha` factor.
    #[error("rescale undefined at I = 0 for alpha > 0 (removable singularity)")]
    RescaleRemovable,
    /// Requested closed-form entropy for a kind that has none.
    #[error("no closed-form entropy for this distribution kind")]
    NoClosedForm,
    /// Special-function failure bubbled up from a closed form.
    #[error(transparent)]
    Special(#[from] SpecialFnError),
    /// Parameter validation failure bubbled up from the species or
    /// interaction.
    #[error(transparent)]
    Micro(#[from] MicroError),
}

/// Hydrodynamic fields of the fourteen-moment hierarchy.
///
/// Temperature is the stored primary; the hydrostatic pressure is always
/// derived as `p = (rho/m) k T`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct HydroState {
    /// Mass density (kg/m^3).
    pub rho: f64,
    /// Bulk velocity (m/s).
    pub u: [f64; 3],
    /// Temperature (K).
    pub t: f64,
    /// Dynamic (non-equilibrium bulk) pressure (Pa).
    pub pi: f64,
    /// Symmetric traceless pressure deviator (Pa).
    pub p_dev: [[f64; 3]; 3],
    /// Heat flux (W/m^2).
    pub q: [f64; 3],
}

impl HydroState {
    /// Equilibrium state: all non-equilibrium fields zero.
    pub fn equilibrium(rho: f64, u: [f64; 3], t: f64) -> Self {
        HydroState {
            rho,
            u,
            t,
            pi: 0.0,
            p_dev: [[0.0; 3]; 3],
            q: [0.0; 3],
        }
    }

    /// Hydrostatic pressure `p = (rho/m) k T` (Pa).
    pub fn pressure(&self, species: &SpeciesParams) -> f64 {
        self.rho / species.m * species.k_b * self.t
    }

    /// `x = Pi/p`, the six-field expansion variable.
    pub fn pi_over_p(&self, species: &SpeciesParams) -> f64 {
        self.pi / self.pressure(species)
    }

    /// Checks positivity and the traceless deviator invariant
    /// (`|trace| <= 1e-12 * Frobenius norm`).
    pub fn validate(&self) -> Result<(), EnsembleError> {
        if !(self.rho > 0.0) {
            return Err(EnsembleError::InvalidState(format!(
                "rho must be positive, got {}",
                self.rho
            )));
        }
        if !(self.t > 0.0) {
            return Err(EnsembleError::InvalidState(format!(
                "T must be positive, got {}",
                self.t
            )));
        }
        let trace = self.p_dev[0][0] + self.p_dev[1][1] + self.p_dev[2][2];
        let frob: f64 = self
            .p_dev
            .iter()
            .flatten()
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt();
        if trace.abs() > 1e-12 * frob.max(f64::MIN_POSITIVE) {
            return Err(EnsembleError::InvalidState(format!(
                "pressure deviator must be traceless, got trace {trace}"
            )));
        }
        for i in 0..3 {
            for j in (i + 1)..3 {
                if (self.p_dev[i][j] - self.p_dev[j][i]).abs() > 1e-12 * frob {
                    return Err(EnsembleError::InvalidState(
                        "pressure deviator must be symmetric".to_string(),
                    ));
                }
            }
        }
        Ok(())
    }
}

/// Distribution-function families.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum DistributionKind {
    /// Local equilibrium.
    Maxwellian,
    /// Six-field maximum-entropy closure (carries `Pi`).
    SixField,
    /// Linearized fourteen-moment closure (carries `Pi`, `p_dev`, `q`).
    FourteenLinearized,
}

/// A concrete distribution: family, hydrodynamic fields, species.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct DistributionSpec {
    /// Distribution family.
    pub kind: DistributionKind,
    /// Hydrodynamic fields.
    pub hydro: HydroState,
    /// Species parameters (mass, alpha, unit system).
    pub species: SpeciesParams,
}

impl DistributionSpec {
    /// Validating constructor; enforces the six-field window for
    /// [`DistributionKind::SixField`].
    pub fn new(
        kind: DistributionKind,
        hydro: HydroState,
        species: SpeciesParams,
    ) -> Result<Self, EnsembleError> {
        hydro.validate()?;
        species.validate()?;
        let spec = DistributionSpec { kind, hydro, species };
        if kind == DistributionKind::SixField {
            spec.check_six_field_window()?;
        }
        Ok(spec)
    }

    fn check_six_field_window(&self) -> Result<(), EnsembleError> {
        let x = self.hydro.pi_over_p(&self.species);
        let hi = 2.0 / 3.0 * (self.species.alpha + 1.0);
        if !(x > -1.0 && x < hi) {
            return Err(EnsembleError::SixFieldOutOfRange { x, hi });
        }
        Ok(())
    }

    /// Six-field parameters `(M, N, L)`:
    /// `M = (m/(2kT))/(1 + x)`, `N = (1/(kT))/(1 - beta x)`,
    /// `L = (rho/m)(M/pi)^(3/2) N^(alpha+1)/Gamma(alpha+1)` with
    /// `beta = 3/(2(alpha+1))`, `x = Pi/p`. All three are positive
    /// inside the window.
    pub fn six_field_mnl(&self) -> Result<(f64, f64, f64), EnsembleError> {
        self.check_six_field_window()?;
        let s = &self.species;
        let kt = s.k_b * self.hydro.t;
        let x = self.hydro.pi_over_p(s);
        let beta = 1.5 / (s.alpha + 1.0);
        let m_par = (s.m / (2.0 * kt)) / (1.0 + x);
        let n_par = (1.0 / kt) / (1.0 - beta * x);
        let l_par = self.hydro.rho / s.m * (m_par / std::f64::consts::PI).powf(1.5)
            * n_par.powf(s.alpha + 1.0)
            / gamma_fn(s.alpha + 1.0)?;
        assert!(m_par > 0.0 && n_par > 0.0 && l_par > 0.0);
        Ok((m_par, n_par, l_par))
    }

    /// Size of the non-equilibrium fields relative to `p`
    /// (`|Pi|/p + ||p_dev||_F/p + ||q||/(p sqrt(p/rho))`), a linearity
    /// diagnostic for the fourteen-moment closure.
    pub fn noneq_magnitude(&self) -> f64 {
        let p = self.hydro.pressure(&self.species);
        let frob: f64 = self
            .hydro
            .p_dev
            .iter()
            .flatten()
            .map(|x| x * x)
            .sum::<f64>()
            .sqrt();
        let qn = dot(self.hydro.q, self.hydro.q).sqrt();
        self.hydro.pi.abs() / p + frob / p + qn / (p * (p / self.hydro.rho).sqrt())
    }
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

/// Exponential rates and smooth prefactor of a density written as
/// `I^alpha * coef(c, I) * exp(-a |c|^2 - b I)`.
struct ReducedDensity<'s> {
    spec: &'s DistributionSpec,
    /// Gaussian rate `a` (1/(m/s)^2).
    a: f64,
    /// Internal-energy rate `b` (1/J).
    b: f64,
    /// Constant prefactor (L for six-field, the equilibrium prefactor
    /// otherwise).
    coef: f64,
}

impl<'s> ReducedDensity<'s> {
    fn build(spec: &'s DistributionSpec) -> Result<Self, EnsembleError> {
        let s = &spec.species;
        let kt = s.k_b * spec.hydro.t;
        match spec.kind {
            DistributionKind::SixField => {
                let (m_par, n_par, l_par) = spec.six_field_mnl()?;
                Ok(ReducedDensity { spec, a: m_par, b: n_par, coef: l_par })
            }
            DistributionKind::Maxwellian | DistributionKind::FourteenLinearized => {
                let a = s.m / (2.0 * kt);
                let b = 1.0 / kt;
                let coef = spec.hydro.rho / s.m
                    * (s.m / (2.0 * std::f64::consts::PI * kt)).powf(1.5)
                    * kt.powf(-(s.alpha + 1.0))
                    / gamma_fn(s.alpha + 1.0)?;
                Ok(ReducedDensity { spec, a, b, coef })
            }
        }
    }

    /// Polynomial bracket of the linearized fourteen-moment closure;
    /// `1` for the other kinds.
    fn bracket(&self, c: [f64; 3], i: f64) -> f64 {
        if self.spec.kind != DistributionKind::FourteenLinearized {
            return 1.0;
        }
        let s = &self.spec.species;
        let h = &self.spec.hydro;
        let p = h.pressure(s);
        let alpha = s.alpha;
        let e_tot = 0.5 * s.m * dot(c, c) + i;
        let c_dot_q = dot(c, h.q);
        let mut value = 1.0 - h.rho / (p * p) * c_dot_q
            - 1.5 / (alpha + 1.0) * h.pi * h.rho / (s.m * p * p) * e_tot
            + h.rho * h.rho / (s.m * p * p * p) * c_dot_q * e_tot / (alpha + 3.5);
        let pi_coef = (alpha + 2.5) / (alpha + 1.0) * h.pi;
        for i in 0..3 {
            for j in 0..3 {
                let tensor = h.p_dev[i][j] + if i == j { pi_coef } else { 0.0 };
                value += 0.5 * h.rho / (p * p) * tensor * c[i] * c[j];
            }
        }
        value
    }

    /// `f(v, I) * I^-alpha`, the smooth factor (finite at `I = 0`).
    fn eval_smooth(&self, c: [f64; 3], i: f64) -> f64 {
        self.coef * self.bracket(c, i) * (-self.a * dot(c, c) - self.b * i).exp()
    }
}

/// Partition (normalization) function of the internal-energy weight:
/// `Z(T) = (kT)^(alpha+1) Gamma(alpha+1)`.
pub fn partition_z(species: &SpeciesParams, t: f64) -> Result<f64, EnsembleError> {
    if !(t > 0.0) {
        return Err(EnsembleError::InvalidState(format!(
            "T must be positive, got {t}"
        )));
    }
    let kt = species.k_b * t;
    Ok(kt.powf(species.alpha + 1.0) * gamma_fn(species.alpha + 1.0)?)
}

/// Evaluates the distribution at a molecular state `(v, I)`.
///
/// # Errors
///
/// [`EnsembleError::SixFieldOutOfRange`] when the six-field window is
/// violated; state invariants are re-checked.
pub fn eval_pdf(spec: &DistributionSpec, state: &MicroState) -> Result<f64, EnsembleError> {
    spec.hydro.validate()?;
    let reduced = ReducedDensity::build(spec)?;
    let c = [
        state.v[0] - spec.hydro.u[0],
        state.v[1] - spec.hydro.u[1],
        state.v[2] - spec.hydro.u[2],
    ];
    Ok(state.i.powf(spec.species.alpha) * reduced.eval_smooth(c, state.i))
}

/// Gaussian-Gamma sampling envelope of a distribution.
///
/// The normalized probability density
/// `pi(v, I) = norm I^alpha exp(-a |c|^2 - b I)` satisfies
/// `f(v, I) = n ratio(v, I) pi(v, I)` with `n = rho/m` the number
/// density and `ratio` the polynomial factor of the distribution
/// (identically 1 except for the linearized fourteen-moment kind).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Envelope {
    /// Gaussian rate; each peculiar-velocity component has variance
    /// `1/(2a)`.
    pub a: f64,
    /// Internal-energy rate; `I` is Gamma(alpha+1) with scale `1/b`.
    pub b: f64,
    /// Internal-energy exponent of the species.
    pub alpha: f64,
    /// Bulk velocity the peculiar frame is centered on (m/s).
    pub u: [f64; 3],
    /// Number density `n = rho/m` (1/m^3).
    pub number_density: f64,
    /// Normalization `(a/pi)^(3/2) b^(alpha+1)/Gamma(alpha+1)`.
    pub norm: f64,
}

impl Envelope {
    /// Probability density of the envelope at a molecular state.
    pub fn density(&self, state: &MicroState) -> f64 {
        let c = [
            state.v[0] - self.u[0],
            state.v[1] - self.u[1],
            state.v[2] - self.u[2],
        ];
        self.norm
            * state.i.powf(self.alpha)
            * (-self.a * dot(c, c) - self.b * state.i).exp()
    }
}

/// Envelope parameters of a distribution.
pub fn envelope(spec: &DistributionSpec) -> Result<Envelope, EnsembleError> {
    let reduced = ReducedDensity::build(spec)?;
    let alpha = spec.species.alpha;
    let norm = (reduced.a / std::f64::consts::PI).powf(1.5)
        * reduced.b.powf(alpha + 1.0)
        / gamma_fn(alpha + 1.0)?;
    Ok(Envelope {
        a: reduced.a,
        b: reduced.b,
        alpha,
        u: spec.hydro.u,
        number_density: spec.hydro.rho / spec.species.m,
        norm,
    })
}

/// Exact ratio `f(v, I)/(n pi(v, I))` of the distribution to its
/// envelope: polynomial in `(c, I)`, exactly 1 for the Maxwellian and
/// six-field kinds.
pub fn envelope_ratio(
    spec: &DistributionSpec,
    state: &MicroState,
) -> Result<f64, EnsembleError> {
    let reduced = ReducedDensity::build(spec)?;
    let c = [
        state.v[0] - spec.hydro.u[0],
        state.v[1] - spec.hydro.u[1],
        state.v[2] - spec.hydro.u[2],
    ];
    Ok(reduced.bracket(c, state.i))
}

/// Moment test-function selectors over the peculiar velocity
/// `c = v - U` and internal energy `I`. Component indices are `0..3`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum MomentWeight {
    /// `m`
    Mass,
    /// `m c_i`
    Momentum(usize),
    /// `m |c|^2`
    KineticEnergy,
    /// `(m/2)|c|^2 + I`
    TotalEnergy,
    /// `m c_i c_j`
    Pressure(usize, usize),
    /// `m |c|^2 c_j`
    KineticEnergyFlux(usize),
    /// `((m/2)|c|^2 + I) c_j`
    TotalEnergyFlux(usize),
    /// `m c_i c_j c_k`
    ThirdVelocity(usize, usize, usize),
    /// `((m/2)|c|^2 + I) c_i c_j`
    EnergyTensor(usize, usize),
}

impl MomentWeight {
    fn validate(&self) -> Result<(), EnsembleError> {
        let indices: Vec<usize> = match *self {
            MomentWeight::Mass | MomentWeight::KineticEnergy | MomentWeight::TotalEnergy => vec![],
            MomentWeight::Momentum(i)
            | MomentWeight::KineticEnergyFlux(i)
            | MomentWeight::TotalEnergyFlux(i) => vec![i],
            MomentWeight::Pressure(i, j) | MomentWeight::EnergyTensor(i, j) => vec![i, j],
            MomentWeight::ThirdVelocity(i, j, k) => vec![i, j, k],
        };
        if let Some(&bad) = indices.iter().find(|&&i| i >= 3) {
            return Err(EnsembleError::UnsupportedWeight(format!(
                "component index {bad} out of range 0..3 in {self:?}"
            )));
        }
        Ok(())
    }

    /// Weight value at `(c, I)` for molecular mass `m`.
    pub fn eval(&self, c: [f64; 3], i: f64, m: f64) -> f64 {
        let c2 = dot(c, c);
        match *self {
            MomentWeight::Mass => m,
            MomentWeight::Momentum(k) => m * c[k],
            MomentWeight::KineticEnergy => m * c2,
            MomentWeight::TotalEnergy => 0.5 * m * c2 + i,
            MomentWeight::Pressure(a, b) => m * c[a] * c[b],
            MomentWeight::KineticEnergyFlux(k) => m * c2 * c[k],
            MomentWeight::TotalEnergyFlux(k) => (0.5 * m * c2 + i) * c[k],
            MomentWeight::ThirdVelocity(a, b, k) => m * c[a] * c[b] * c[k],
            MomentWeight::EnergyTensor(a, b) => (0.5 * m * c2 + i) * c[a] * c[b],
        }
    }
}

/// Moment evaluation route.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MomentMethod {
    /// Tensorized Gauss-Hermite (3 velocity axes) x generalized
    /// Gauss-Laguerre (internal energy), 40 points per direction.
    Quadrature,
    /// Importance sampling from the distribution's own Gaussian/Gamma
    /// envelope; deterministic per seed.
    MonteCarlo {
        /// RNG seed.
        seed: u64,
        /// Sample count.
        n: u64,
    },
}

/// A moment value; `std_error` is `None` for quadrature.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MomentValue {
    /// Moment estimate.
    pub value: f64,
    /// One-sigma standard error (Monte Carlo only).
    pub std_error: Option<f64>,
}

/// Number of quadrature points per direction used throughout.
pub const QUAD_POINTS: usize = 40;

/// Computes `int weight(c, I) f dI dv`.
pub fn moment(
    spec: &DistributionSpec,
    weight: MomentWeight,
    method: MomentMethod,
) -> Result<MomentValue, EnsembleError> {
    weight.validate()?;
    spec.hydro.validate()?;
    let reduced = ReducedDensity::build(spec)?;
    let alpha = spec.species.alpha;
    let m = spec.species.m;
    // Normalization split off by substituting c = x/sqrt(a), I = y/b.
    let norm = reduced.a.powf(-1.5) * reduced.b.powf(-(alpha + 1.0));
    match method {
        MomentMethod::Quadrature => {
            let gh = GaussRule::hermite(QUAD_POINTS);
            let gl = GaussRule::generalized_laguerre(QUAD_POINTS, alpha);
            let scale = reduced.a.sqrt();
            let mut total = 0.0;
            for (&x1, &w1) in gh.nodes.iter().zip(&gh.weights) {
                for (&x2, &w2) in gh.nodes.iter().zip(&gh.weights) {
                    for (&x3, &w3) in gh.nodes.iter().zip(&gh.weights) {
                        let c = [x1 / scale, x2 / scale, x3 / scale];
                        let mut inner = 0.0;
                        for (&y, &wy) in gl.nodes.iter().zip(&gl.weights) {
                            let i = y / reduced.b;
                            inner += wy * reduced.coef * reduced.bracket(c, i)
                                * weight.eval(c, i, m);
                        }
                        total += w1 * w2 * w3 * inner;
                    }
                }
            }
            Ok(MomentValue { value: norm * total, std_error: None })
        }
        MomentMethod::MonteCarlo { seed, n } => {
            assert!(n > 0, "Monte Carlo needs at least one sample");
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let sigma = (0.5 / reduced.a).sqrt();
            let gamma_dist = Gamma::new(alpha + 1.0, 1.0 / reduced.b)
                .expect("alpha > -1 and b > 0 give a valid Gamma");
            // Envelope = the distribution's own Gaussian x Gamma factor,
            // so the weight is the polynomial part only.
            let env_norm = (std::f64::consts::PI / reduced.a).powf(1.5)
                * gamma_fn(alpha + 1.0)?
                * reduced.b.powf(-(alpha + 1.0));
            let mut sum = 0.0_f64;
            let mut comp = 0.0_f64;
            let mut sum_sq = 0.0_f64;
            for _ in 0..n {
                let c = [
                    sigma * rng.sample::<f64, _>(StandardNormal),
                    sigma * rng.sample::<f64, _>(StandardNormal),
                    sigma * rng.sample::<f64, _>(StandardNormal),
                ];
                let i = gamma_dist.sample(&mut rng);
                let w = reduced.coef * reduced.bracket(c, i) * weight.eval(c, i, m);
                let y = w - comp;
                let t = sum + y;
                comp = (t - sum) - y;
                sum = t;
                sum_sq += w * w;
            }
            let nf = n as f64;
            let mean = sum / nf;
            let var = ((sum_sq / nf - mean * mean) / (nf - 1.0).max(1.0)).max(0.0);
            Ok(MomentValue {
                value: env_norm * mean,
                std_error: Some(env_norm * var.sqrt()),
            })
        }
    }
}

/// Entropy evaluation route.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum EntropyMethod {
    /// Closed form (six-field and Maxwellian only).
    ClosedForm,
    /// Quadrature of `-k f log(f I^-alpha)`.
    Quadrature,
}

/// Entropy density and its flux.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct EntropyReport {
    /// Entropy density `h` (J/(K m^3)).
    pub h: f64,
    /// Entropy flux `h_j = U_j h` (convective; J/(K m^2 s)).
    pub flux: [f64; 3],
}

/// Physical entropy density `h = -k int f log(f I^-alpha) dI dv` and
/// its convective flux `U h`.
///
/// The six-field closed form is
/// `h = -k (rho/m) (log L - (alpha + 5/2))`; the Maxwellian value is the
/// same expression at `Pi = 0`.
pub fn entropy_density(
    spec: &DistributionSpec,
    method: EntropyMethod,
) -> Result<EntropyReport, EnsembleError> {
    spec.hydro.validate()?;
    let h = match method {
        EntropyMethod::ClosedForm => {
            let closed_spec = match spec.kind {
                DistributionKind::SixField => spec.clone(),
                DistributionKind::Maxwellian => {
                    let mut eq = spec.clone();
                    eq.kind = DistributionKind::SixField;
                    eq.hydro.pi = 0.0;
                    eq
                }
                DistributionKind::FourteenLinearized => {
                    return Err(EnsembleError::NoClosedForm)
                }
            };
            let (_, _, l_par) = closed_spec.six_field_mnl()?;
            let s = &spec.species;
            -s.k_b * spec.hydro.rho / s.m * (l_par.ln() - (s.alpha + 2.5))
        }
        EntropyMethod::Quadrature => {
            let reduced = ReducedDensity::build(spec)?;
            let alpha = spec.species.alpha;
            let gh = GaussRule::hermite(QUAD_POINTS);
            let gl = GaussRule::generalized_laguerre(QUAD_POINTS, alpha);
            let scale = reduced.a.sqrt();
            let norm = reduced.a.powf(-1.5) * reduced.b.powf(-(alpha + 1.0));
            let mut total = 0.0;
            for (&x1, &w1) in gh.nodes.iter().zip(&gh.weights) {
                for (&x2, &w2) in gh.nodes.iter().zip(&gh.weights) {
                    for (&x3, &w3) in gh.nodes.iter().zip(&gh.weights) {
                        let c = [x1 / scale, x2 / scale, x3 / scale];
                        let c2 = dot(c, c);
                        let mut inner = 0.0;
                        for (&y, &wy) in gl.nodes.iter().zip(&gl.weights) {
                            let i = y / reduced.b;
                            let poly = reduced.coef * reduced.bracket(c, i);
                            // The linearized bracket can dip negative in
                            // the far tail; those nodes carry negligible
                            // mass and are excluded from the log.
                            if poly > 0.0 {
                                let log_smooth = poly.ln() - reduced.a * c2 - reduced.b * i;
                                inner += wy * poly * log_smooth;
                            }
                        }
                        total += w1 * w2 * w3 * inner;
                    }
                }
            }
            -spec.species.k_b * norm * total
        }
    };
    let flux = [
        spec.hydro.u[0] * h,
        spec.hydro.u[1] * h,
        spec.hydro.u[2] * h,
    ];
    Ok(EntropyReport { h, flux })
}

/// Direction of the weighted rescaling `g = f I^-alpha`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum RescaleDirection {
    /// `f = g I^alpha` (weighted to plain).
    WeightedToPlain,
    /// `g = f I^-alpha` (plain to weighted), `I > 0`.
    PlainToWeighted,
}

/// Pointwise rescaling between the plain density `f` and the weighted
/// density `g = f I^-alpha`.
///
/// # Errors
///
/// * [`EnsembleError::RescaleSingular`] forward at `I = 0` with
///   `alpha < 0` (the value is +inf),
/// * [`EnsembleError::RescaleRemovable`] inverse at `I = 0` with
///   `alpha > 0` (0/0; finite limit exists for `I^alpha`-type densities).
pub fn rescale_weighted(
    value: f64,
    i: f64,
    alpha: f64,
    direction: RescaleDirection,
) -> Result<f64, EnsembleError> {
    if !(i >= 0.0) {
        return Err(EnsembleError::InvalidState(format!(
            "internal energy must be nonnegative, got {i}"
        )));
    }
    match direction {
        RescaleDirection::WeightedToPlain => {
            if i == 0.0 && alpha < 0.0 {
                return Err(EnsembleError::RescaleSingular);
            }
            Ok(value * i.powf(alpha))
        }
        RescaleDirection::PlainToWeighted => {
            if i == 0.0 && alpha > 0.0 {
                return Err(EnsembleError::RescaleRemovable);
            }
            Ok(value * i.powf(-alpha))
        }
    }
}

/// Dimensionless collision frequency `nu_hat(c_hat, I_hat)` of the
/// speed-sum kernel at exponent `gamma`, capacity `alpha`:
///
/// ```text
/// nu_hat = Gamma(alpha+1)/Gamma((4 alpha + gamma + 7)/2) * (
///     Gamma(alpha+1) Gamma((gamma+3)/2)^2 (2^(gamma/2 + 1)/sqrt(pi))
///         e^(-c_hat^2/2) 1F1((gamma+3)/2, 3/2, c_hat^2/2)
///   + (sqrt(pi)/2) Gamma(alpha + gamma/2 + 1)
///         (I_hat^(gamma/2) + Gamma(alpha + gamma/2 + 1)/Gamma(alpha+1)) )
/// ```
///
/// Strictly increasing in both `c_hat` and `I_hat` for `gamma > 0`.
pub fn nu_hat(gamma: f64, alpha: f64, c_hat: f64, i_hat: f64) -> Result<f64, EnsembleError> {
    if !(gamma >= 0.0) || !(alpha > -1.0) || !(c_hat >= 0.0) || !(i_hat >= 0.0) {
        return Err(EnsembleError::InvalidState(format!(
            "nu_hat needs gamma >= 0, alpha > -1, c_hat >= 0, I_hat >= 0; got ({gamma}, {alpha}, {c_hat}, {i_hat})"
        )));
    }
    let sqrt_pi = std::f64::consts::PI.sqrt();
    let g_a1 = gamma_fn(alpha + 1.0)?;
    let g_half = gamma_fn(0.5 * (gamma + 3.0))?;
    let g_mix = gamma_fn(alpha + 0.5 * gamma + 1.0)?;
    let prefactor = (ln_gamma(alpha + 1.0)? - ln_gamma(0.5 * (4.0 * alpha + gamma + 7.0))?).exp();
    let kummer = hyp1f1_b3half_scaled(0.5 * (gamma + 3.0), 0.5 * c_hat * c_hat)?;
    let speed_term = g_a1 * g_half * g_half * (2.0_f64.powf(0.5 * gamma + 1.0) / sqrt_pi) * kummer;
    let energy_term = 0.5 * sqrt_pi * g_mix * (i_hat.powf(0.5 * gamma) + g_mix / g_a1);
    Ok(prefactor * (speed_term + energy_term))
}

/// Collision frequency `nu(v, I)` (1/s) of a molecule against the
/// equilibrium background `(rho, U, T)`:
/// `nu = (rho/m) ||b|| (p/rho)^(gamma/2) nu_hat(c_hat, I_hat)` with
/// `c_hat = sqrt(m/(kT)) |v - U|` and `I_hat = I/(kT)`. Non-equilibrium
/// hydro fields are ignored.
pub fn collision_frequency(
    state: &MicroState,
    hydro: &HydroState,
    species: &SpeciesParams,
    inter: &InteractionParams,
) -> Result<f64, EnsembleError> {
    hydro.validate()?;
    species.validate()?;
    inter.validate()?;
    let kt = species.k_b * hydro.t;
    let c = [
        state.v[0] - hydro.u[0],
        state.v[1] - hydro.u[1],
        state.v[2] - hydro.u[2],
    ];
    let c_hat = (species.m / kt).sqrt() * dot(c, c).sqrt();
    let i_hat = state.i / kt;
    let p_over_rho = kt / species.m;
    Ok(hydro.rho / species.m
        * inter.b_norm()
        * p_over_rho.powf(0.5 * inter.gamma)
        * nu_hat(inter.gamma, species.alpha, c_hat, i_hat)?)
}

/// One point of the dimensionless collision-frequency table.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FrequencyGridPoint {
    /// Dimensionless peculiar speed.
    pub c_hat: f64,
    /// Dimensionless internal energy.
    pub i_hat: f64,
    /// Dimensionless collision frequency.
    pub nu_hat: f64,
}

/// Tabulates `nu_hat` over a `c_hat x I_hat` grid (outer loop `c_hat`,
/// inner loop `I_hat`).
pub fn collision_frequency_grid(
    alpha: f64,
    gamma: f64,
    c_hat_grid: &[f64],
    i_hat_grid: &[f64],
) -> Result<Vec<FrequencyGridPoint>, EnsembleError> {
    let mut rows = Vec::with_capacity(c_hat_grid.len() * i_hat_grid.len());
    for &c in c_hat_grid {
        for &i in i_hat_grid {
            rows.push(FrequencyGridPoint {
                c_hat: c,
                i_hat: i,
                nu_hat: nu_hat(gamma, alpha, c, i)?,
            });
        }
    }
    Ok(rows)
}
