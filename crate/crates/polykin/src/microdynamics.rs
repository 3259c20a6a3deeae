//! Binary collision transform for molecules with continuous internal
//! energy, its Jacobian, and the collision cross-section.
//!
//! A colliding pair `(v, I)`, `(v_*, I_*)` with equal masses `m` has
//! center-of-mass velocity `V = (v + v_*)/2`, relative velocity
//! `u = v - v_*`, and pair energy `E = (m/4)|u|^2 + I + I_*`. The
//! post-collision state is parametrized by angles `(r, R, sigma)`:
//!
//! ```text
//! v'  = V + sqrt(R E / m) sigma      I'  = r (1 - R) E
//! v'* = V - sqrt(R E / m) sigma      I'* = (1 - r)(1 - R) E
//! ```
//!
//! so `R` is the fraction of `E` put back into relative motion and `r`
//! splits the remainder between the two internal energies. The map also
//! transports the angles (`r' = I/(I + I_*)`, `R' = m|u|^2/(4E)`,
//! `sigma' = u/|u|`) and is then an involution. Its Jacobian and the
//! invariant `I I_* r(1-r)(1-R)^2` make the collision measure
//! `(r(1-r))^alpha (1-R)^(2 alpha + 1) sqrt(R) (I I_*)^alpha` invariant
//! under the transform, which is what every weak-form identity in the
//! rest of the crate rests on.
//!
//! All operations are pure; degenerate configurations (zero pair energy,
//! zero relative speed) sit on measure-zero sets and are reported as
//! errors instead of being patched over.

use serde::{Deserialize, Serialize};
use thiserror::Error;

/// Boltzmann constant (J/K), 2019 SI exact value.
pub const BOLTZMANN_SI: f64 = 1.380_649e-23;

/// Errors from collision-transform operations.
#[derive(Debug, Clone, PartialEq, Error)]
pub enum MicroError {
    /// Pair energy `E = (m/4)|u|^2 + I + I_*` is zero; the collision
    /// transform is undefined.
    #[error("degenerate collision: pair energy is zero")]
    DegenerateCollision,
    /// Relative velocity is zero, so the outgoing direction `u/|u|` is
    /// undefined.
    #[error("degenerate direction: relative speed is zero")]
    DegenerateDirection,
    /// Jacobian preconditions violated (`|u| > 0`, `0 < R' < 1` need
    /// positive relative speed and positive total internal energy).
    #[error("singular configuration: {0}")]
    SingularConfiguration(String),
    /// Angle or parameter value outside its admissible range.
    #[error("invalid parameter: {0}")]
    InvalidParameter(String),
    /// The angular factor of the cross-section is only known through its
    /// integral, so pointwise evaluation is unavailable.
    #[error("angular model stores only the norm of b; pointwise evaluation needs the constant model")]
    AngularModelNotPointwise,
}

/// Single-molecule state: velocity `v` (m/s) and internal energy `i` (J).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct MicroState {
    /// Velocity (m/s).
    pub v: [f64; 3],
    /// Internal energy `I >= 0` (J).
    pub i: f64,
}

/// Collision angles `(r, R, sigma)` of the transform.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionAngles {
    /// Fraction `r` in `[0, 1]` of the redistributed internal energy
    /// assigned to the first molecule.
    pub r: f64,
    /// Fraction `R` in `[0, 1]` of the pair energy put into relative
    /// kinetic energy.
    pub r_kin: f64,
    /// Unit scattering direction; `| |sigma| - 1 | <= 1e-14`.
    pub sigma: [f64; 3],
}

impl CollisionAngles {
    /// Validating constructor.
    pub fn new(r: f64, r_kin: f64, sigma: [f64; 3]) -> Result<Self, MicroError> {
        let angles = CollisionAngles { r, r_kin, sigma };
        angles.validate()?;
        Ok(angles)
    }

    /// Checks the ranges of `r`, `R` and the unit norm of `sigma`.
    pub fn validate(&self) -> Result<(), MicroError> {
        if !(0.0..=1.0).contains(&self.r) || !(0.0..=1.0).contains(&self.r_kin) {
            return Err(MicroError::InvalidParameter(format!(
                "r and R must lie in [0, 1], got r = {}, R = {}",
                self.r, self.r_kin
            )));
        }
        let n = norm(self.sigma);
        if (n - 1.0).abs() > 1e-14 {
            return Err(MicroError::InvalidParameter(format!(
                "sigma must be a unit vector, got |sigma| = {n}"
            )));
        }
        Ok(())
    }
}

/// Full pre- or post-collision configuration of a pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CollisionState {
    /// First molecule.
    pub a: MicroState,
    /// Second molecule.
    pub b: MicroState,
    /// Energy-sharing and scattering angles.
    pub angles: CollisionAngles,
}

/// Molecular species: mass, internal-energy capacity exponent, and unit
/// system.
///
/// The exponent `alpha` fixes the equilibrium internal-energy density
/// `I^alpha e^{-I/kT}`; when the number of internal degrees of freedom
/// `D` is known they must satisfy `alpha = (D - 5)/2`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SpeciesParams {
    /// Species label for reports.
    pub name: String,
    /// Molecular mass (kg; 1 in dimensionless mode).
    pub m: f64,
    /// Internal-energy capacity exponent, `alpha > -1`.
    pub alpha: f64,
    /// Total degrees of freedom `D`, when tracked.
    pub dof: Option<f64>,
    /// Boltzmann constant (J/K; 1 when temperature is in energy units).
    pub k_b: f64,
}

impl SpeciesParams {
    /// SI species: mass in kg, temperatures in kelvin.
    pub fn si(name: &str, m: f64, alpha: f64) -> Result<Self, MicroError> {
        let s = SpeciesParams {
            name: name.to_string(),
            m,
            alpha,
            dof: None,
            k_b: BOLTZMANN_SI,
        };
        s.validate()?;
        Ok(s)
    }

    /// Dimensionless species: `m = 1`, `k_b = 1` (temperature in energy
    /// units).
    pub fn dimensionless(alpha: f64) -> Result<Self, MicroError> {
        let s = SpeciesParams {
            name: "dimensionless".to_string(),
            m: 1.0,
            alpha,
            dof: None,
            k_b: 1.0,
        };
        s.validate()?;
        Ok(s)
    }

    /// Attaches the degree-of-freedom count, enforcing
    /// `|alpha - (D - 5)/2| <= 1e-12`.
    pub fn with_dof(mut self, dof: f64) -> Result<Self, MicroError> {
        if (self.alpha - (dof - 5.0) / 2.0).abs() > 1e-12 {
            return Err(MicroError::InvalidParameter(format!(
                "alpha = {} inconsistent with D = {dof}: need alpha = (D - 5)/2",
                self.alpha
            )));
        }
        self.dof = Some(dof);
        Ok(self)
    }

    /// Checks positivity of mass and `k_b` and the `alpha` domain.
    pub fn validate(&self) -> Result<(), MicroError> {
        if !(self.m > 0.0) {
            return Err(MicroError::InvalidParameter(format!(
                "mass must be positive, got {}",
                self.m
            )));
        }
        if !(self.alpha > -1.0) {
            return Err(MicroError::InvalidParameter(format!(
                "alpha must exceed -1, got {}",
                self.alpha
            )));
        }
        if !(self.k_b > 0.0) {
            return Err(MicroError::InvalidParameter(format!(
                "k_b must be positive, got {}",
                self.k_b
            )));
        }
        if let Some(d) = self.dof {
            if (self.alpha - (d - 5.0) / 2.0).abs() > 1e-12 {
                return Err(MicroError::InvalidParameter(format!(
                    "alpha = {} inconsistent with D = {d}",
                    self.alpha
                )));
            }
        }
        Ok(())
    }
}

/// Angular factor of the cross-section.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum AngularModel {
    /// `b(cos theta) = K` everywhere, so `||b||_{L1(S^2)} = 4 pi K`.
    Constant {
        /// Constant kernel value `K > 0`.
        k: f64,
    },
    /// Only the integral `||b||_{L1(S^2)}` of a tabulated kernel is
    /// retained; closed forms work, pointwise evaluation does not.
    Tabulated {
        /// Stored `||b||_{L1(S^2)} > 0`.
        l1_norm: f64,
    },
}

/// Collision kernel parameters: velocity exponent and angular factor.
///
/// The kernel is
/// `B = b(u_hat . sigma) (R^(gamma/2)|u|^gamma + (r(1-R)I/m)^(gamma/2)
/// + ((1-r)(1-R)I_*/m)^(gamma/2))`,
/// a sum of the gamma-th powers of the three characteristic speeds of
/// the pair.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct InteractionParams {
    /// Velocity exponent `gamma > 0`.
    pub gamma: f64,
    /// Angular factor model.
    pub angular: AngularModel,
}

impl InteractionParams {
    /// Constant angular kernel `b = K`.
    pub fn constant(gamma: f64, k: f64) -> Result<Self, MicroError> {
        let p = InteractionParams {
            gamma,
            angular: AngularModel::Constant { k },
        };
        p.validate()?;
        Ok(p)
    }

    /// Tabulated angular kernel known only through `||b||_{L1(S^2)}`.
    pub fn tabulated(gamma: f64, l1_norm: f64) -> Result<Self, MicroError> {
        let p = InteractionParams {
            gamma,
            angular: AngularModel::Tabulated { l1_norm },
        };
        p.validate()?;
        Ok(p)
    }

    /// `||b||_{L1(S^2)}`; equals `4 pi K` for the constant model.
    pub fn b_norm(&self) -> f64 {
        match self.angular {
            AngularModel::Constant { k } => 4.0 * std::f64::consts::PI * k,
            AngularModel::Tabulated { l1_norm } => l1_norm,
        }
    }

    /// Checks `gamma > 0` and positivity of the angular factor.
    pub fn validate(&self) -> Result<(), MicroError> {
        if !(self.gamma > 0.0) {
            return Err(MicroError::InvalidParameter(format!(
                "gamma must be positive, got {}",
                self.gamma
            )));
        }
        let pos = match self.angular {
            AngularModel::Constant { k } => k > 0.0,
            AngularModel::Tabulated { l1_norm } => l1_norm > 0.0,
        };
        if !pos {
            return Err(MicroError::InvalidParameter(
                "angular factor must be positive".to_string(),
            ));
        }
        Ok(())
    }
}

fn sub(a: [f64; 3], b: [f64; 3]) -> [f64; 3] {
    [a[0] - b[0], a[1] - b[1], a[2] - b[2]]
}

fn dot(a: [f64; 3], b: [f64; 3]) -> f64 {
    a[0] * b[0] + a[1] * b[1] + a[2] * b[2]
}

fn norm(a: [f64; 3]) -> f64 {
    dot(a, a).sqrt()
}

/// Pair energy `E = (m/4)|v - v_*|^2 + I + I_*` (J).
pub fn total_energy(a: &MicroState, b: &MicroState, m: f64) -> f64 {
    let u = sub(a.v, b.v);
    0.25 * m * dot(u, u) + a.i + b.i
}

/// Applies the collision transform, returning the post-collision pair
/// together with the transported angles. The map is an involution:
/// `collide(collide(s)) = s`.
///
/// When the pair carries no internal energy (`R' = 1`) the transported
/// split `r' = I/(I + I_*)` is the convention value `1/2`.
///
/// # Errors
///
/// * [`MicroError::DegenerateCollision`] if the pair energy vanishes,
/// * [`MicroError::DegenerateDirection`] if the relative speed vanishes.
pub fn collide(state: &CollisionState, species: &SpeciesParams) -> Result<CollisionState, MicroError> {
    state.angles.validate()?;
    let m = species.m;
    let u = sub(state.a.v, state.b.v);
    let u2 = dot(u, u);
    let e = 0.25 * m * u2 + state.a.i + state.b.i;
    if e == 0.0 {
        return Err(MicroError::DegenerateCollision);
    }
    let u_norm = u2.sqrt();
    if u_norm == 0.0 {
        return Err(MicroError::DegenerateDirection);
    }

    let center = [
        0.5 * (state.a.v[0] + state.b.v[0]),
        0.5 * (state.a.v[1] + state.b.v[1]),
        0.5 * (state.a.v[2] + state.b.v[2]),
    ];
    let speed = (state.angles.r_kin * e / m).sqrt();
    let sig = state.angles.sigma;
    let v_post_a = [
        center[0] + speed * sig[0],
        center[1] + speed * sig[1],
        center[2] + speed * sig[2],
    ];
    let v_post_b = [
        center[0] - speed * sig[0],
        center[1] - speed * sig[1],
        center[2] - speed * sig[2],
    ];
    let internal_share = (1.0 - state.angles.r_kin) * e;
    let i_post_a = state.angles.r * internal_share;
    let i_post_b = (1.0 - state.angles.r) * internal_share;

    let i_total = state.a.i + state.b.i;
    let r_post = if i_total > 0.0 { state.a.i / i_total } else { 0.5 };
    let r_kin_post = 0.25 * m * u2 / e;
    let sigma_post = [u[0] / u_norm, u[1] / u_norm, u[2] / u_norm];

    Ok(CollisionState {
        a: MicroState { v: v_post_a, i: i_post_a },
        b: MicroState { v: v_post_b, i: i_post_b },
        angles: CollisionAngles {
            r: r_post,
            r_kin: r_kin_post,
            sigma: sigma_post,
        },
    })
}

/// Jacobian determinant of the collision transform at `state`, in the
/// ratio form `(1 - R) sqrt(R) / ((1 - R') sqrt(R'))` with
/// `R' = m|u|^2/(4E)`. `1 - R'` is computed as `(I + I_*)/E` so no
/// cancellation occurs near `R' = 1`.
///
/// Satisfies `jacobian(s) * jacobian(collide(s)) = 1`.
///
/// # Errors
///
/// [`MicroError::SingularConfiguration`] when `|u| = 0` or
/// `I + I_* = 0`, where `R'` hits the boundary and the ratio is
/// undefined.
pub fn jacobian(state: &CollisionState, species: &SpeciesParams) -> Result<f64, MicroError> {
    let (r_kin_post, one_minus_r_kin_post) = transported_kinetic_fraction(state, species)?;
    let r_kin = state.angles.r_kin;
    Ok((1.0 - r_kin) * r_kin.sqrt() / (one_minus_r_kin_post * r_kin_post.sqrt()))
}

/// Algebraically equal form of [`jacobian`] written through speeds:
/// `(1 - R)|u'| / ((1 - R')|u|)` with `|u'| = 2 sqrt(R E / m)`.
/// Kept as an independent expression for cross-checking.
pub fn jacobian_speed_form(
    state: &CollisionState,
    species: &SpeciesParams,
) -> Result<f64, MicroError> {
    let (_, one_minus_r_kin_post) = transported_kinetic_fraction(state, species)?;
    let m = species.m;
    let u = sub(state.a.v, state.b.v);
    let u_norm = norm(u);
    let e = 0.25 * m * dot(u, u) + state.a.i + state.b.i;
    let u_post_norm = 2.0 * (state.angles.r_kin * e / m).sqrt();
    Ok((1.0 - state.angles.r_kin) * u_post_norm / (one_minus_r_kin_post * u_norm))
}

/// `(R', 1 - R')` of the transported kinetic fraction, with the
/// Jacobian preconditions checked.
fn transported_kinetic_fraction(
    state: &CollisionState,
    species: &SpeciesParams,
) -> Result<(f64, f64), MicroError> {
    let m = species.m;
    let u = sub(state.a.v, state.b.v);
    let u2 = dot(u, u);
    let e = 0.25 * m * u2 + state.a.i + state.b.i;
    if e == 0.0 {
        return Err(MicroError::SingularConfiguration(
            "pair energy is zero".to_string(),
        ));
    }
    if u2 == 0.0 {
        return Err(MicroError::SingularConfiguration(
            "relative speed is zero (R' = 0)".to_string(),
        ));
    }
    let i_total = state.a.i + state.b.i;
    if i_total == 0.0 {
        return Err(MicroError::SingularConfiguration(
            "total internal energy is zero (R' = 1)".to_string(),
        ));
    }
    Ok((0.25 * m * u2 / e, i_total / e))
}

/// The collision invariant `I I_* r (1 - r) (1 - R)^2`, preserved
/// exactly by the transform (J^2 units).
pub fn invariant_product(state: &CollisionState) -> f64 {
    let r = state.angles.r;
    let omr_kin = 1.0 - state.angles.r_kin;
    state.a.i * state.b.i * r * (1.0 - r) * omr_kin * omr_kin
}

/// Collision kernel
/// `B = b(u_hat . sigma) (R^(gamma/2)|u|^gamma + (r(1-R)I/m)^(gamma/2)
/// + ((1-r)(1-R)I_*/m)^(gamma/2))`
/// ((m/s)^gamma times the angular factor). Vanishes when all three
/// characteristic speeds vanish; that is a valid kernel value, not an
/// error.
///
/// Micro-reversible: evaluating at `collide(state)` gives the same
/// value.
///
/// # Errors
///
/// [`MicroError::AngularModelNotPointwise`] for the tabulated angular
/// model.
pub fn cross_section_model3(
    state: &CollisionState,
    species: &SpeciesParams,
    interaction: &InteractionParams,
) -> Result<f64, MicroError> {
    let AngularModel::Constant { k } = interaction.angular else {
        return Err(MicroError::AngularModelNotPointwise);
    };
    let m = species.m;
    let g = interaction.gamma;
    let u = sub(state.a.v, state.b.v);
    let u2 = dot(u, u);
    let r = state.angles.r;
    let r_kin = state.angles.r_kin;
    let omr_kin = 1.0 - r_kin;
    let bracket = (r_kin * u2).powf(0.5 * g)
        + (r * omr_kin * state.a.i / m).powf(0.5 * g)
        + ((1.0 - r) * omr_kin * state.b.i / m).powf(0.5 * g);
    Ok(k * bracket)
}

/// Density of the invariant collision measure with respect to Lebesgue
/// measure in `(v, v_*, I, I_*, r, R, sigma)`, without the kernel:
/// `(r(1-r))^alpha (1-R)^(2 alpha + 1) sqrt(R) (I I_*)^alpha`.
///
/// Invariance under the transform reads
/// `measure_weight(s) = measure_weight(collide(s)) * jacobian(s)`, and
/// the weight is symmetric under particle exchange
/// (`v <-> v_*`, `I <-> I_*`, `r -> 1 - r`, `sigma -> -sigma`).
pub fn measure_weight(state: &CollisionState, species: &SpeciesParams) -> f64 {
    let alpha = species.alpha;
    let r = state.angles.r;
    let r_kin = state.angles.r_kin;
    (r * (1.0 - r)).powf(alpha)
        * (1.0 - r_kin).powf(2.0 * alpha + 1.0)
        * r_kin.sqrt()
        * (state.a.i * state.b.i).powf(alpha)
}

/// Relabels the pair: `v <-> v_*`, `I <-> I_*`, `r -> 1 - r`,
/// `sigma -> -sigma`. The collision kernel and measure weight are
/// invariant under this relabeling.
pub fn exchange_particles(state: &CollisionState) -> CollisionState {
    CollisionState {
        a: state.b,
        b: state.a,
        angles: CollisionAngles {
            r: 1.0 - state.angles.r,
            r_kin: state.angles.r_kin,
            sigma: [
                -state.angles.sigma[0],
                -state.angles.sigma[1],
                -state.angles.sigma[2],
            ],
        },
    }
}
