use proptest::prelude::*;
use shockdev::eos::BarotropicEos;
use shockdev::error::Error;
use shockdev::state::PointState;
use shockdev::state_ahead::{
    incoming_characteristic, initial_data, synthesize_model, CoefficientOverride, CuspData,
    CuspParams, Field, ValidityBox,
};

fn canonical() -> (BarotropicEos, CuspData) {
    let eos = BarotropicEos::radiation();
    let cusp = CuspData::resolve(&CuspParams::default(), &eos).unwrap();
    (eos, cusp)
}

#[test]
fn cusp_resolution_realises_kappa() {
    let (eos, cusp) = canonical();
    assert!((cusp.alpha_dot0 * cusp.dc_plus0.0 - cusp.kappa).abs() < 1e-14);
    assert!((cusp.c_plus0 - 1.0 / 3f64.sqrt()).abs() < 1e-14);
    assert!((cusp.f_hat0() - 1.0 / 6.0).abs() < 1e-15);
    let bad = CuspParams {
        kappa: -1.0,
        ..Default::default()
    };
    assert!(matches!(
        CuspData::resolve(&bad, &eos),
        Err(Error::InconsistentCusp(_))
    ));
    let bad = CuspParams {
        lambda: 0.0,
        ..Default::default()
    };
    assert!(CuspData::resolve(&bad, &eos).is_err());
}

#[test]
fn model_meets_the_cusp_constraints() {
    let (eos, cusp) = canonical();
    let m = synthesize_model(cusp, &eos, 5, &[]).unwrap();
    let r = |dt, dw| m.eval(Field::Radius, 0.0, 0.0, dt, dw).unwrap();
    assert_eq!(r(0, 0), cusp.r0);
    assert_eq!(r(1, 0), cusp.c_plus0);
    assert_eq!(r(0, 1), 0.0);
    assert_eq!(r(0, 2), 0.0);
    assert!((r(1, 1) - cusp.kappa).abs() < 1e-15);
    assert!((r(0, 3) + cusp.lambda / cusp.kappa).abs() < 1e-14);
    assert!((m.eval(Field::Alpha, 0.0, 0.0, 0, 1).unwrap() - cusp.alpha_dot0).abs() < 1e-15);
    // Along t = 0, the forward speed grows at rate κ.
    let w = 1e-4;
    let cp = |w: f64| {
        PointState::new(&eos, m.pair(0.0, w).unwrap())
            .unwrap()
            .c_plus
    };
    assert!(((cp(w) - cp(-w)) / (2.0 * w) - cusp.kappa).abs() < 1e-7);
}

#[test]
fn constrained_and_oversized_overrides_are_rejected() {
    let (eos, cusp) = canonical();
    let fixed = CoefficientOverride {
        field: Field::Radius,
        t_power: 1,
        w_power: 1,
        value: 2.0,
    };
    assert!(synthesize_model(cusp, &eos, 5, &[fixed]).is_err());
    let high = CoefficientOverride {
        field: Field::Beta,
        t_power: 3,
        w_power: 3,
        value: 1.0,
    };
    assert!(synthesize_model(cusp, &eos, 5, &[high]).is_err());
    let free = CoefficientOverride {
        field: Field::Beta,
        t_power: 1,
        w_power: 1,
        value: 0.2,
    };
    let m = synthesize_model(cusp, &eos, 5, &[free]).unwrap();
    assert_eq!(m.field(Field::Beta).get(1, 1), 0.2);
    assert!(synthesize_model(cusp, &eos, 3, &[]).is_err());
}

#[test]
fn validity_box_is_enforced() {
    let (eos, cusp) = canonical();
    let m = synthesize_model(cusp, &eos, 5, &[])
        .unwrap()
        .with_validity(ValidityBox::for_eps(0.01));
    assert!(m.pair(1e-4, 0.01).is_ok());
    assert!(matches!(m.pair(1e-2, 0.0), Err(Error::OutOfBox { .. })));
}

#[test]
fn incoming_characteristic_starts_cubically() {
    let (eos, cusp) = canonical();
    let m = synthesize_model(cusp, &eos, 5, &[]).unwrap();
    let c = incoming_characteristic(&m, &eos, 0.01, 65).unwrap();
    let k = 8;
    let ratio = c.t[k] / c.w[k].powi(3);
    assert!(
        (ratio - cusp.h_hat0()).abs() < 0.02 * cusp.h_hat0(),
        "{ratio}"
    );
    let init = initial_data(&m.with_validity(ValidityBox::for_eps(0.01)), &eos, 0.01, 64).unwrap();
    assert!((init.h_hat[1] - cusp.h_hat0()).abs() < 1e-3 * cusp.h_hat0());
}

#[test]
fn singular_boundary_leads_with_the_parabola() {
    let (eos, cusp) = canonical();
    let m = synthesize_model(cusp, &eos, 5, &[]).unwrap();
    let w = 1e-4;
    let leading = cusp.lambda * w * w / (2.0 * cusp.kappa * cusp.kappa);
    assert!((m.singular_boundary(w) - leading).abs() < 1e-3 * leading);
}

proptest! {
    #[test]
    fn singular_boundary_zeroes_the_radial_derivative(w in -0.01f64..0.01) {
        prop_assume!(w.abs() > 1e-4);
        let (eos, cusp) = canonical();
        let m = synthesize_model(cusp, &eos, 5, &[]).unwrap();
        let t = m.singular_boundary(w);
        let rw = m.eval(Field::Radius, t, w, 0, 1).unwrap();
        // The expansion is exact through cubic order in w.
        prop_assert!(rw.abs() < 10.0 * w.abs().powi(4));
    }
}

#[test]
fn canonical_cusp_values() {
    let (eos, cusp) = canonical();
    assert!((cusp.alpha_dot0 - 3.0).abs() < 1e-12);
    let m = synthesize_model(cusp, &eos, 5, &[]).unwrap();
    assert!((m.singular_boundary(0.1) - 0.005).abs() < 1e-3);
    let c = incoming_characteristic(&m, &eos, 0.05, 65).unwrap();
    let fit = c.t[4] / c.w[4].powi(3);
    assert!(
        (fit - 3f64.sqrt() / 12.0).abs() < 0.01 * 3f64.sqrt() / 12.0,
        "{fit}"
    );
    assert!(c.t.windows(2).all(|p| p[1] > p[0]));
    let moving = CuspParams {
        alpha_ddot0: 0.4,
        ..Default::default()
    };
    let cusp = CuspData::resolve(&moving, &eos).unwrap();
    let m = synthesize_model(cusp, &eos, 5, &[])
        .unwrap()
        .with_validity(ValidityBox::for_eps(0.01));
    let init = initial_data(&m, &eos, 0.01, 64).unwrap();
    assert!(
        (init.alpha_hat[1] - 0.2).abs() < 0.01,
        "{}",
        init.alpha_hat[1]
    );
}
