//! Kinetic theory of polyatomic gases with a continuous internal energy
//! variable.
//!
//! A molecule carries a velocity `v` (m/s) and a scalar internal energy
//! `I` (J) whose equilibrium density is proportional to `I^alpha e^{-I/kT}`.
//! The capacity exponent `alpha` is tied to the number of internal degrees
//! of freedom `D` by `alpha = (D - 5)/2`, so `alpha = 0` describes diatomic
//! rotors and larger `alpha` describes polyatomic molecules.
//!
//! The crate is organized bottom-up:
//!
//! * [`special`]: gamma function, the confluent hypergeometric function
//!   `1F1(a, 3/2, z)`, and the closed-form collision-average constants.
//! * [`quadrature`]: Gauss-Hermite and generalized Gauss-Laguerre rules.
//! * [`microdynamics`]: the binary collision transform on
//!   `(v, v_*, I, I_*, r, R, sigma)`, its Jacobian, and the collision
//!   cross-section.
//! * [`ensembles`]: equilibrium and non-equilibrium distribution functions,
//!   their moments, entropy densities, and the collision frequency.
//! * [`six_field`]: closed production, entropy production, and relaxation
//!   time for the six-field (bulk pressure) closure.
//! * [`fourteen_moment`]: linearized productions, relaxation times, and
//!   transport coefficients for the fourteen-moment closure, including the
//!   Prandtl number matching of the cross-section exponent.
//! * [`mc`]: seeded Monte Carlo oracles that estimate the same quantities
//!   from the collision integral directly.

pub mod ensembles;
pub mod fourteen_moment;
pub mod mc;
pub mod microdynamics;
pub mod quadrature;
pub mod six_field;
pub mod special;
