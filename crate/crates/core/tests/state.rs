use proptest::prelude::*;
use shockdev::eos::BarotropicEos;
use shockdev::state::{
    char_speeds, riemann_from_state, state_from_riemann, stress, FluidState, RiemannPair,
};

#[test]
fn fluid_state_requires_a_timelike_current() {
    assert!(FluidState::new(1.0, 1.0).is_err());
    assert!(FluidState::new(0.5, -0.8).is_err());
    assert!(FluidState::new(f64::INFINITY, 0.0).is_err());
    assert!((FluidState::new(5.0, 3.0).unwrap().enthalpy() - 4.0).abs() < 1e-15);
}

#[test]
fn fluid_at_rest_has_symmetric_speeds() {
    let eos = BarotropicEos::radiation();
    let p = RiemannPair::new(0.3, 0.3);
    assert_eq!(p.velocity(), 0.0);
    let (cp, cm) = char_speeds(&eos, p).unwrap();
    assert!((cp - 1.0 / 3f64.sqrt()).abs() < 1e-14 && (cp + cm).abs() < 1e-14);
}

proptest! {
    #[test]
    fn riemann_state_round_trip(a in -0.5f64..0.5, b in -0.5f64..0.5) {
        let eos = BarotropicEos::radiation();
        let p = RiemannPair::new(a, b);
        let back = riemann_from_state(&eos, state_from_riemann(&eos, p).unwrap()).unwrap();
        prop_assert!((back.alpha - a).abs() < 1e-12 && (back.beta - b).abs() < 1e-12);
    }

    #[test]
    fn speeds_are_ordered_and_subluminal(a in -0.2f64..0.2, b in -0.2f64..0.2) {
        let eos = BarotropicEos::poly2(0.5).unwrap();
        let (cp, cm) = char_speeds(&eos, RiemannPair::new(a, b)).unwrap();
        prop_assert!(-1.0 < cm && cm < cp && cp < 1.0);
    }

    #[test]
    fn swapping_invariants_reflects_the_flow(a in -0.5f64..0.5, b in -0.5f64..0.5) {
        let eos = BarotropicEos::radiation();
        let p = RiemannPair::new(a, b);
        let (s, r) = (stress(&eos, p).unwrap(), stress(&eos, p.swapped()).unwrap());
        prop_assert!((s.tt - r.tt).abs() < 1e-12 * s.tt.abs().max(1.0));
        prop_assert!((s.tr + r.tr).abs() < 1e-12 * s.tt.abs().max(1.0));
        prop_assert!((s.rr - r.rr).abs() < 1e-12 * s.tt.abs().max(1.0));
        let ((cp, cm), (sp, sm)) = (char_speeds(&eos, p).unwrap(), char_speeds(&eos, p.swapped()).unwrap());
        prop_assert!((cp + sm).abs() < 1e-13 && (cm + sp).abs() < 1e-13);
    }
}

#[test]
fn velocity_and_stress_match_the_fluid_variables() {
    let eos = BarotropicEos::poly2(0.5).unwrap();
    for (a, b) in [(0.1, -0.05), (-0.15, 0.1), (0.0, 0.0)] {
        let p = RiemannPair::new(a, b);
        let s = state_from_riemann(&eos, p).unwrap();
        assert!((p.velocity() + s.psi_r / s.psi_t).abs() < 1e-12);
        let th = eos.thermo(p.rho_tilde()).unwrap();
        let v = p.velocity();
        let w = (th.rho + th.p) / (1.0 - v * v);
        let t = stress(&eos, p).unwrap();
        let scale = w.abs();
        assert!(t.tt > 0.0);
        assert!((t.tt - (w - th.p)).abs() < 1e-10 * scale);
        assert!((t.tr - w * v).abs() < 1e-10 * scale);
        assert!((t.rr - (w * v * v + th.p)).abs() < 1e-10 * scale);
    }
}
