//! Property tests of the structural invariants: the collision
//! transform is an involution that conserves momentum and energy, its
//! Jacobian is reciprocal on the transform, the collision measure is
//! invariant, and the closed-form transport quantities keep their
//! signs across parameter space.

use polykin::ensembles::{eval_pdf, DistributionKind, DistributionSpec, HydroState};
use polykin::fourteen_moment::delta_prandtl;
use polykin::microdynamics::{
    collide, cross_section_model3, exchange_particles, invariant_product, jacobian,
    jacobian_speed_form, measure_weight, total_energy, CollisionAngles, CollisionState,
    InteractionParams, MicroState, SpeciesParams,
};
use polykin::six_field::{entropy_production_sigma, production_p};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn norm(v: [f64; 3]) -> f64 {
    (v[0] * v[0] + v[1] * v[1] + v[2] * v[2]).sqrt()
}

fn momentum(s: &CollisionState, m: f64) -> [f64; 3] {
    [
        m * (s.a.v[0] + s.b.v[0]),
        m * (s.a.v[1] + s.b.v[1]),
        m * (s.a.v[2] + s.b.v[2]),
    ]
}

fn sphere_point(z: f64, phi: f64) -> [f64; 3] {
    let s = (1.0 - z * z).max(0.0).sqrt();
    [s * phi.cos(), s * phi.sin(), z]
}

prop_compose! {
    fn collision_state()(
        vx in -5.0..5.0f64, vy in -5.0..5.0f64, vz in -5.0..5.0f64,
        wx in -5.0..5.0f64, wy in -5.0..5.0f64, wz in -5.0..5.0f64,
        i in 1e-3..8.0f64, is in 1e-3..8.0f64,
        r in 0.0..=1.0f64, r_kin in 0.001..0.999f64,
        z in -1.0..1.0f64, phi in 0.0..std::f64::consts::TAU,
    ) -> CollisionState {
        CollisionState {
            a: MicroState { v: [vx, vy, vz], i },
            b: MicroState { v: [wx, wy, wz], i: is },
            angles: CollisionAngles { r, r_kin, sigma: sphere_point(z, phi) },
        }
    }
}

fn random_state(rng: &mut ChaCha8Rng) -> CollisionState {
    let mut v = [0.0; 3];
    let mut w = [0.0; 3];
    for k in 0..3 {
        v[k] = 10.0 * rng.gen::<f64>() - 5.0;
        w[k] = 10.0 * rng.gen::<f64>() - 5.0;
    }
    CollisionState {
        a: MicroState { v, i: 8.0 * rng.gen::<f64>() + 1e-3 },
        b: MicroState { v: w, i: 8.0 * rng.gen::<f64>() + 1e-3 },
        angles: CollisionAngles {
            r: rng.gen(),
            r_kin: 0.998 * rng.gen::<f64>() + 0.001,
            sigma: sphere_point(
                2.0 * rng.gen::<f64>() - 1.0,
                std::f64::consts::TAU * rng.gen::<f64>(),
            ),
        },
    }
}

proptest! {
    #[test]
    fn transform_is_an_involution(s in collision_state()) {
        let sp = SpeciesParams::dimensionless(0.0).unwrap();
        prop_assume!(norm([s.a.v[0]-s.b.v[0], s.a.v[1]-s.b.v[1], s.a.v[2]-s.b.v[2]]) > 1e-9);
        let twice = collide(&collide(&s, &sp).unwrap(), &sp).unwrap();
        let vscale = 1.0 + norm(s.a.v).max(norm(s.b.v));
        for k in 0..3 {
            prop_assert!((twice.a.v[k] - s.a.v[k]).abs() <= 1e-10 * vscale);
            prop_assert!((twice.b.v[k] - s.b.v[k]).abs() <= 1e-10 * vscale);
            prop_assert!((twice.angles.sigma[k] - s.angles.sigma[k]).abs() <= 1e-10);
        }
        let iscale = 1.0 + s.a.i + s.b.i;
        prop_assert!((twice.a.i - s.a.i).abs() <= 1e-10 * iscale);
        prop_assert!((twice.b.i - s.b.i).abs() <= 1e-10 * iscale);
        prop_assert!((twice.angles.r - s.angles.r).abs() <= 1e-10);
        prop_assert!((twice.angles.r_kin - s.angles.r_kin).abs() <= 1e-10);
    }

    #[test]
    fn transform_conserves_momentum_and_energy(s in collision_state()) {
        let sp = SpeciesParams::dimensionless(1.5).unwrap();
        prop_assume!(norm([s.a.v[0]-s.b.v[0], s.a.v[1]-s.b.v[1], s.a.v[2]-s.b.v[2]]) > 1e-9);
        let post = collide(&s, &sp).unwrap();
        let (p0, p1) = (momentum(&s, sp.m), momentum(&post, sp.m));
        let pscale = 1.0 + norm(p0);
        for k in 0..3 {
            prop_assert!((p1[k] - p0[k]).abs() <= 1e-12 * pscale);
        }
        // Total energy = relative kinetic + internal in the pair frame
        // plus the conserved center-of-mass part.
        let e0 = total_energy(&s.a, &s.b, sp.m);
        let e1 = total_energy(&post.a, &post.b, sp.m);
        prop_assert!((e1 - e0).abs() <= 1e-11 * e0.abs().max(1.0));
        prop_assert!(post.a.i >= 0.0 && post.b.i >= 0.0);
    }

    #[test]
    fn jacobian_is_positive_and_reciprocal(s in collision_state()) {
        let sp = SpeciesParams::dimensionless(0.5).unwrap();
        prop_assume!(norm([s.a.v[0]-s.b.v[0], s.a.v[1]-s.b.v[1], s.a.v[2]-s.b.v[2]]) > 1e-9);
        let j = jacobian(&s, &sp).unwrap();
        prop_assert!(j > 0.0);
        let js = jacobian_speed_form(&s, &sp).unwrap();
        prop_assert!((j - js).abs() <= 1e-10 * j);
        let post = collide(&s, &sp).unwrap();
        let j_back = jacobian(&post, &sp).unwrap();
        prop_assert!((j * j_back - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn invariant_product_is_preserved(s in collision_state()) {
        let sp = SpeciesParams::dimensionless(0.0).unwrap();
        prop_assume!(norm([s.a.v[0]-s.b.v[0], s.a.v[1]-s.b.v[1], s.a.v[2]-s.b.v[2]]) > 1e-9);
        let post = collide(&s, &sp).unwrap();
        let (before, after) = (invariant_product(&s), invariant_product(&post));
        prop_assert!((after - before).abs() <= 1e-10 * before.abs().max(1e-300));
    }

    #[test]
    fn measure_transforms_with_the_jacobian(
        s in collision_state(),
        alpha in -0.9..3.0f64,
    ) {
        let sp = SpeciesParams::dimensionless(alpha).unwrap();
        prop_assume!(norm([s.a.v[0]-s.b.v[0], s.a.v[1]-s.b.v[1], s.a.v[2]-s.b.v[2]]) > 1e-9);
        prop_assume!(s.angles.r > 1e-6 && s.angles.r < 1.0 - 1e-6);
        let post = collide(&s, &sp).unwrap();
        let lhs = measure_weight(&s, &sp);
        let rhs = measure_weight(&post, &sp) * jacobian(&s, &sp).unwrap();
        prop_assert!(
            (lhs - rhs).abs() <= 1e-9 * lhs.abs().max(rhs.abs()),
            "measure {lhs} vs transported {rhs}"
        );
    }

    #[test]
    fn kernel_is_micro_reversible_and_exchange_symmetric(
        s in collision_state(),
        gamma in 0.2..3.0f64,
    ) {
        let sp = SpeciesParams::dimensionless(0.5).unwrap();
        let inter = InteractionParams::constant(gamma, 1.3).unwrap();
        prop_assume!(norm([s.a.v[0]-s.b.v[0], s.a.v[1]-s.b.v[1], s.a.v[2]-s.b.v[2]]) > 1e-9);
        let b = cross_section_model3(&s, &sp, &inter).unwrap();
        let post = collide(&s, &sp).unwrap();
        let b_post = cross_section_model3(&post, &sp, &inter).unwrap();
        prop_assert!((b - b_post).abs() <= 1e-9 * b.abs().max(1.0));
        let swapped = exchange_particles(&s);
        let b_swap = cross_section_model3(&swapped, &sp, &inter).unwrap();
        prop_assert!((b - b_swap).abs() <= 1e-12 * b.abs().max(1.0));
        let w = measure_weight(&s, &sp);
        let w_swap = measure_weight(&swapped, &sp);
        prop_assert!((w - w_swap).abs() <= 1e-12 * w.abs().max(1.0));
    }

    #[test]
    fn six_field_density_is_positive_inside_window(
        alpha in -0.5..4.0f64,
        frac in -0.95..0.95f64,
        cx in -3.0..3.0f64,
        i in 0.001..6.0f64,
    ) {
        let sp = SpeciesParams::dimensionless(alpha).unwrap();
        let hi = 2.0 / 3.0 * (alpha + 1.0);
        // Map frac in (-1, 1) onto the admissible interval.
        let x = if frac >= 0.0 { frac * hi } else { frac };
        let mut h = HydroState::equilibrium(1.0, [0.0; 3], 1.0);
        h.pi = x * h.pressure(&sp);
        let spec = DistributionSpec::new(DistributionKind::SixField, h, sp).unwrap();
        let f = eval_pdf(&spec, &MicroState { v: [cx, 0.3, -0.2], i }).unwrap();
        prop_assert!(f > 0.0);
    }

    #[test]
    fn entropy_production_is_nonnegative_and_opposes_pi(
        alpha in 0.0..3.0f64,
        gamma in 0.3..3.0f64,
        frac in -0.95..0.95f64,
    ) {
        let sp = SpeciesParams::dimensionless(alpha).unwrap();
        let inter = InteractionParams::constant(gamma, 0.7).unwrap();
        let hi = 2.0 / 3.0 * (alpha + 1.0);
        let x = if frac >= 0.0 { frac * hi } else { frac };
        prop_assume!(x.abs() > 1e-6);
        let mut h = HydroState::equilibrium(1.0, [0.0; 3], 1.0);
        h.pi = x * h.pressure(&sp);
        let prod = production_p(&h, &sp, &inter).unwrap();
        prop_assert!(prod * x < 0.0, "production {prod} does not oppose x {x}");
        let sigma = entropy_production_sigma(&h, &sp, &inter).unwrap();
        prop_assert!(sigma >= 0.0, "entropy production {sigma} negative at x {x}");
    }

    #[test]
    fn prandtl_sits_above_eucken_below_the_matching_exponent(
        alpha in 0.0..5.0f64,
        gamma in 0.01..1.99f64,
    ) {
        let delta = delta_prandtl(alpha, gamma).unwrap();
        prop_assert!(delta > 0.0);
        prop_assert!(delta < 0.12);
    }
}

/// Seeded bulk batch of the transform invariants: one fixed generator,
/// many states, tight tolerances.
#[test]
fn transform_invariants_hold_on_a_seeded_batch() {
    let sp = SpeciesParams::dimensionless(0.5).unwrap();
    let mut rng = ChaCha8Rng::seed_from_u64(7);
    let mut worst_inv = 0.0_f64;
    let mut worst_jac = 0.0_f64;
    let mut worst_prod = 0.0_f64;
    for _ in 0..20_000 {
        let s = random_state(&mut rng);
        let post = collide(&s, &sp).unwrap();
        let twice = collide(&post, &sp).unwrap();
        let vscale = 1.0 + norm(s.a.v).max(norm(s.b.v));
        for k in 0..3 {
            worst_inv = worst_inv
                .max((twice.a.v[k] - s.a.v[k]).abs() / vscale)
                .max((twice.b.v[k] - s.b.v[k]).abs() / vscale);
        }
        worst_inv = worst_inv
            .max((twice.a.i - s.a.i).abs() / (1.0 + s.a.i))
            .max((twice.b.i - s.b.i).abs() / (1.0 + s.b.i));
        let j = jacobian(&s, &sp).unwrap();
        worst_jac = worst_jac.max((j * jacobian(&post, &sp).unwrap() - 1.0).abs());
        let before = invariant_product(&s);
        worst_prod = worst_prod.max((invariant_product(&post) - before).abs() / before);
    }
    assert!(worst_inv <= 1e-9, "involution drift {worst_inv}");
    assert!(worst_jac <= 1e-9, "jacobian reciprocal drift {worst_jac}");
    assert!(worst_prod <= 1e-11, "invariant product drift {worst_prod}");
}
