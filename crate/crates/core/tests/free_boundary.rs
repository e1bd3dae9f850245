use shockdev::eos::BarotropicEos;
use shockdev::free_boundary::{
    identification_function, median_ratio, run_shock_development, solve_identification,
    DevelopmentSettings,
};
use shockdev::state_ahead::{synthesize_model, CuspData, CuspParams, StateAheadModel};

fn model(params: CuspParams) -> (BarotropicEos, StateAheadModel) {
    let eos = BarotropicEos::radiation();
    let cusp = CuspData::resolve(&params, &eos).unwrap();
    let m = synthesize_model(cusp, &eos, 5, &[]).unwrap();
    (eos, m)
}

/// Root of (λ/6κ) y³ − κ f̂ y + δ̂ = 0 nearest −1, by the trigonometric form.
fn cubic_oracle(kappa: f64, lambda: f64, f_hat: f64, delta_hat: f64) -> f64 {
    let p = -6.0 * kappa * kappa * f_hat / lambda;
    let q = 6.0 * kappa * delta_hat / lambda;
    let m = 2.0 * (-p / 3.0).sqrt();
    let theta = (3.0 * q / (p * m)).acos() / 3.0;
    (0..3)
        .map(|k| m * (theta - 2.0 * std::f64::consts::PI * k as f64 / 3.0).cos())
        .min_by(|a, b| (a + 1.0).abs().total_cmp(&(b + 1.0).abs()))
        .unwrap()
}

#[test]
fn identification_at_the_corner_solves_the_cubic() {
    let (_, m) = model(CuspParams {
        kappa: 1.3,
        lambda: 0.7,
        ..Default::default()
    });
    let c = m.cusp;
    for (f_hat, delta_hat) in [
        (c.f_hat0(), 0.0),
        (1.1 * c.f_hat0(), 0.01),
        (0.9 * c.f_hat0(), -0.02),
    ] {
        let y = solve_identification(&m, f_hat, delta_hat, 0.0, -1.0, 1.0).unwrap();
        let oracle = cubic_oracle(c.kappa, c.lambda, f_hat, delta_hat);
        assert!((y - oracle).abs() < 1e-12, "{y} vs {oracle}");
    }
}

#[test]
fn hatted_and_direct_identification_agree() {
    let (_, m) = model(CuspParams::default());
    let f_hat = m.cusp.f_hat0();
    for v in [1e-3, 4e-3] {
        let hatted = identification_function(&m, v, -0.95, f_hat, 0.002, 1.0).unwrap();
        let direct = identification_function(&m, v, -0.95, f_hat, 0.002, 0.0).unwrap();
        assert!((hatted.0 - direct.0).abs() < 1e-10 && (hatted.1 - direct.1).abs() < 1e-10);
    }
}

#[test]
fn median_ratio_ignores_the_transient() {
    let h = [1.0, 0.9, 0.3, 0.1, 0.0333, 0.0111, 1e-20];
    let r = median_ratio(&h, 2, 1e-12);
    assert!((r - 1.0 / 3.0).abs() < 0.01, "{r}");
}

#[test]
fn canonical_development_converges_to_the_cusp_limits() {
    let (eos, m) = model(CuspParams::default());
    let sol = run_shock_development(
        &eos,
        &m,
        &DevelopmentSettings {
            n: 32,
            ..Default::default()
        },
    )
    .unwrap();
    assert_eq!(sol.eps, 0.01);
    assert!(sol.failed_eps.is_empty());
    assert!(sol.outer_ratio < 1.0 && sol.inner_ratio < 1.0);
    let c = &sol.curve;
    let f0 = m.cusp.f_hat0();
    assert!((c.f_hat[1] - f0).abs() < 0.01 * f0);
    assert!((c.y[1] + 1.0).abs() < 1e-3);
    assert!(c.jump_residual.iter().all(|r| r.abs() < 1e-10));
    // The shock stays strictly before the singular boundary.
    assert!((1..c.v.len()).all(|j| c.f[j] < c.singular_time[j]));
}

#[test]
fn moving_cusp_develops_too() {
    let (eos, m) = model(CuspParams {
        alpha0: -0.2,
        beta0: 0.2,
        ..Default::default()
    });
    let sol = run_shock_development(
        &eos,
        &m,
        &DevelopmentSettings {
            n: 16,
            ..Default::default()
        },
    )
    .unwrap();
    assert!((sol.curve.y[1] + 1.0).abs() < 1e-2);
}

#[test]
fn identification_slope_at_the_corner() {
    let (_, m) = model(CuspParams::default());
    let (value, slope) = identification_function(&m, 0.0, -1.0, m.cusp.f_hat0(), 0.0, 1.0).unwrap();
    assert!(value.abs() < 1e-15);
    assert!((slope - m.cusp.lambda / (3.0 * m.cusp.kappa)).abs() < 1e-14);
}

#[test]
fn canonical_shock_data() {
    let (eos, m) = model(CuspParams::default());
    let sol = run_shock_development(&eos, &m, &DevelopmentSettings::default()).unwrap();
    let c = &sol.curve;
    let last = c.y.len() - 1;
    // y(ε) sits just below −1 here; only the bound |y + 1| ≤ Cε is asserted.
    assert!(
        (c.y[last] + 1.0).abs() <= 2.0 * sol.eps,
        "y(ε) = {}",
        c.y[last]
    );
    let slope = c.d_alpha[1] / c.v[1];
    assert!((slope - 6.0).abs() < 0.3, "[α]/v = {slope}");
}

#[test]
fn inner_ratio_falls_with_eps() {
    use shockdev::harness::config::{Format, SolverConfig};
    use shockdev::harness::{sweep, SweepAxis};
    let cfg = SolverConfig::from_text("[grid]\nn = 32\n", Format::Toml, Vec::new()).unwrap();
    let table = sweep(&cfg, &SweepAxis::Eps(vec![0.02, 0.01, 0.005])).unwrap();
    let ratios: Vec<f64> = table.rows.iter().map(|r| r.inner_ratio.unwrap()).collect();
    assert!(ratios.windows(2).all(|p| p[1] < p[0]), "{ratios:?}");
}
