use proptest::prelude::*;
use shockdev::eos::BarotropicEos;
use shockdev::jump::{
    cubic_coefficient, determinism_margin, hugoniot_residual, jump_J, jump_function, jump_scale,
    shock_speed, solve_jump_increment, stress_jumps, JumpPair, MAX_JUMP,
};
use shockdev::state::{char_speeds, RiemannPair};

#[test]
fn radiation_cubic_coefficient_is_minus_one_over_144() {
    let eos = BarotropicEos::radiation();
    let g = cubic_coefficient(&eos, RiemannPair::new(0.2, -0.1)).unwrap();
    assert!((g + 1.0 / 144.0).abs() < 1e-15);
}

#[test]
fn weak_jump_follows_the_cubic_law() {
    let eos = BarotropicEos::radiation();
    let ahead = RiemannPair::new(0.0, 0.0);
    let g = cubic_coefficient(&eos, ahead).unwrap();
    let ratio = |d: f64| solve_jump_increment(&eos, ahead, d).unwrap() / d.powi(3);
    // The ratio tends to G₀ linearly in Δα.
    let limit = 2.0 * ratio(1e-2) - ratio(2e-2);
    assert!((limit - g).abs() < 0.02 * g.abs(), "{limit} vs {g}");
}

#[test]
fn oversized_jump_is_rejected() {
    let eos = BarotropicEos::radiation();
    assert!(solve_jump_increment(&eos, RiemannPair::new(0.0, 0.0), 1.1 * MAX_JUMP).is_err());
    assert_eq!(
        solve_jump_increment(&eos, RiemannPair::new(0.0, 0.0), 0.0).unwrap(),
        0.0
    );
}

proptest! {
    #[test]
    fn jump_function_is_symmetric(a in -0.4f64..0.4, b in -0.4f64..0.4, d in -0.05f64..0.05) {
        let eos = BarotropicEos::radiation();
        let p = RiemannPair::new(a, b);
        let jp = JumpPair::new(p, p.offset(d, 0.3 * d));
        let scale = jump_scale(&eos, p).unwrap();
        let diff = jump_J(&eos, jp).unwrap() - jump_J(&eos, jp.reversed()).unwrap();
        prop_assert!(diff.abs() < 1e-14 * scale);
    }

    #[test]
    fn root_satisfies_both_stress_conditions(a in -0.2f64..0.2, b in -0.2f64..0.2, d in -0.05f64..0.05) {
        prop_assume!(d.abs() > 1e-4);
        let eos = BarotropicEos::poly2(0.5).unwrap();
        let ahead = RiemannPair::new(a, b);
        let db = solve_jump_increment(&eos, ahead, d).unwrap();
        let jp = JumpPair::new(ahead, ahead.offset(d, db));
        let v = shock_speed(&eos, jp).unwrap();
        let s = stress_jumps(&eos, ahead, d, db).unwrap();
        let scale = jump_scale(&eos, ahead).unwrap().sqrt();
        prop_assert!((s.tr - v * s.tt).abs() < 1e-10 * scale);
        prop_assert!((s.rr - v * s.tr).abs() < 1e-10 * scale);
        // A weak shock moves between the two forward characteristic speeds.
        let (ca, cb) = (char_speeds(&eos, ahead).unwrap().0, char_speeds(&eos, jp.behind).unwrap().0);
        prop_assert!(v > ca.min(cb) - 1e-12 && v < ca.max(cb) + 1e-12);
    }
}

#[test]
fn newton_root_matches_a_pure_bisection_oracle() {
    use rand::{Rng, SeedableRng};
    let eos = BarotropicEos::radiation();
    let mut rng = rand_chacha::ChaCha8Rng::seed_from_u64(7);
    for _ in 0..20 {
        let ahead = RiemannPair::new(rng.gen_range(-0.4..0.4), rng.gen_range(-0.4..0.4));
        let d: f64 = rng.gen_range(0.005..0.05) * if rng.gen_bool(0.5) { 1.0 } else { -1.0 };
        let seed = cubic_coefficient(&eos, ahead).unwrap() * d.powi(3);
        let j = |x: f64| jump_function(&eos, ahead, d, x).unwrap();
        let (mut lo, mut hi) = (seed - 2.0 * seed.abs(), seed + 2.0 * seed.abs());
        assert!(j(lo).signum() != j(hi).signum());
        for _ in 0..200 {
            let mid = 0.5 * (lo + hi);
            if mid == lo || mid == hi {
                break;
            }
            if j(mid).signum() == j(lo).signum() {
                lo = mid;
            } else {
                hi = mid;
            }
        }
        let newton = solve_jump_increment(&eos, ahead, d).unwrap();
        assert!((newton - 0.5 * (lo + hi)).abs() < 1e-12, "{newton} vs {lo}");
    }
}

#[test]
fn small_jump_expansion_of_j() {
    let eos = BarotropicEos::radiation();
    let ahead = RiemannPair::new(0.1, -0.2);
    let th = eos.thermo(ahead.rho_tilde()).unwrap();
    let target = th.mu().powi(2) / (192.0 * th.eta * th.eta);
    let scale = jump_scale(&eos, ahead).unwrap();
    let q = |d: f64| jump_function(&eos, ahead, d, 0.0).unwrap() / (scale * d.powi(4));
    let limit = 2.0 * q(5e-4) - q(1e-3);
    assert!(
        (limit - target).abs() < 0.01 * target,
        "{limit} vs {target}"
    );
}

#[test]
fn weak_shock_speed_averages_the_forward_speeds() {
    let eos = BarotropicEos::radiation();
    let ahead = RiemannPair::new(0.0, 0.0);
    let dcp = shockdev::state::PointState::new(&eos, ahead)
        .unwrap()
        .dc_plus()
        .0;
    let cp = char_speeds(&eos, ahead).unwrap().0;
    let speed = |d: f64| {
        let db = solve_jump_increment(&eos, ahead, d).unwrap();
        shock_speed(&eos, JumpPair::new(ahead, ahead.offset(d, db))).unwrap()
    };
    assert!((speed(1e-4) - cp).abs() < 1e-4);
    let slope = (speed(2e-3) - speed(1e-3)) / 1e-3;
    assert!((slope - 0.5 * dcp).abs() < 0.02 * 0.5 * dcp, "{slope}");
}

#[test]
fn determinism_margins_of_a_compressive_jump() {
    let eos = BarotropicEos::radiation();
    let ahead = RiemannPair::new(0.0, 0.0);
    let d = 1e-2;
    let db = solve_jump_increment(&eos, ahead, d).unwrap();
    let m = determinism_margin(&eos, JumpPair::new(ahead, ahead.offset(d, db))).unwrap();
    assert!(m.thermodynamic > 0.0 && m.geometric > 0.0);
}

#[test]
fn hugoniot_residual_is_third_order() {
    let eos = BarotropicEos::radiation();
    let ahead = RiemannPair::new(0.1, 0.0);
    let scaled = |d: f64| {
        let db = solve_jump_increment(&eos, ahead, d).unwrap();
        hugoniot_residual(&eos, JumpPair::new(ahead, ahead.offset(d, db))).unwrap() / d.powi(3)
    };
    let (a, b) = (scaled(1e-2), scaled(5e-3));
    assert!(
        a.is_finite() && (a - b).abs() < 0.1 * a.abs().max(b.abs()),
        "{a} vs {b}"
    );
}
