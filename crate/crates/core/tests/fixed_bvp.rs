use shockdev::eos::BarotropicEos;
use shockdev::error::Error;
use shockdev::fixed_bvp::{
    characteristic_residuals, gamma_inverse, solve_fixed_bvp, solve_linear_t, BoundaryFunctions,
    GammaInverse, InnerOptions, InnerProblem, LinearCoefficients, TriGrid,
};
use shockdev::state::{char_speeds, RiemannPair};
use shockdev::state_ahead::{initial_data, synthesize_model, CuspData, CuspParams, ValidityBox};

struct Setup {
    eos: BarotropicEos,
    cusp: CuspData,
    grid: TriGrid,
    init: shockdev::state_ahead::InitialData,
}

fn setup(eps: f64, n: usize) -> Setup {
    let eos = BarotropicEos::radiation();
    let cusp = CuspData::resolve(&CuspParams::default(), &eos).unwrap();
    let model = synthesize_model(cusp, &eos, 5, &[])
        .unwrap()
        .with_validity(ValidityBox::for_eps(eps));
    let grid = TriGrid::new(eps, n).unwrap();
    let init = initial_data(&model, &eos, eps, n).unwrap();
    Setup {
        eos,
        cusp,
        grid,
        init,
    }
}

fn options() -> InnerOptions {
    InnerOptions {
        tol_inner: 1e-12,
        max_inner: 200,
        v_floor: 1e-14,
    }
}

#[test]
fn seed_solve_matches_corner_asymptotics() {
    let s = setup(0.01, 64);
    let bf = BoundaryFunctions::seed(&s.grid, &s.cusp);
    let p = InnerProblem {
        eos: &s.eos,
        cusp: &s.cusp,
        init: &s.init,
        grid: &s.grid,
        options: options(),
    };
    let sol = solve_fixed_bvp(&bf, &p).unwrap();
    let f = &sol.field;
    let (k, l) = (s.cusp.kappa, s.cusp.lambda);
    for j in [4usize, 16, 64] {
        let v = s.grid.coord(j);
        let id = s.grid.idx(j, j);
        let f_hat = f.t[id] / (v * v);
        let tv = f.dt_dv[id];
        assert!((f_hat - l / (6.0 * k * k)).abs() < 0.05 * l / (6.0 * k * k) + 2.0 * v);
        assert!((tv / v - l / (3.0 * k * k)).abs() < 0.05 + 20.0 * v);
    }
    assert!(sol.contraction < 0.5, "inner ratio {}", sol.contraction);
}

#[test]
fn residuals_are_second_order() {
    let mut prev = None;
    for n in [16usize, 32, 64] {
        let s = setup(0.01, n);
        let bf = BoundaryFunctions::seed(&s.grid, &s.cusp);
        let p = InnerProblem {
            eos: &s.eos,
            cusp: &s.cusp,
            init: &s.init,
            grid: &s.grid,
            options: options(),
        };
        let sol = solve_fixed_bvp(&bf, &p).unwrap();
        let r = characteristic_residuals(&sol.field, &s.eos, &s.cusp).unwrap();
        if let Some(p) = prev {
            let ratio: f64 = p / r.max();
            assert!(ratio > 3.0, "residual ratio {ratio}");
        }
        prev = Some(r.max());
    }
}

#[test]
fn gamma_inverse_oracle() {
    let s = setup(0.01, 64);
    let c = &s.cusp;
    match gamma_inverse(&s.eos, c, c.base(), 0.0, 1e-9, 1e-6).unwrap() {
        GammaInverse::Corner { scaled } => {
            assert!((scaled - (c.c_plus0 - c.c_minus0) / c.kappa).abs() < 1e-15)
        }
        other => panic!("expected the corner branch, got {other:?}"),
    }
    let behind = RiemannPair::new(0.02, 0.0);
    let (cp, cm) = char_speeds(&s.eos, behind).unwrap();
    let off = 0.3 * (cp - c.c_plus0);
    let expected = (c.c_plus0 + off - cm) / (cp - c.c_plus0 - off);
    match gamma_inverse(&s.eos, c, behind, off, 1e-3, 1e-6).unwrap() {
        GammaInverse::Regular(g) => assert!((g - expected).abs() < 1e-13 * expected),
        other => panic!("expected the regular branch, got {other:?}"),
    }
    let too_fast = cp - c.c_plus0;
    assert!(matches!(
        gamma_inverse(&s.eos, c, behind, too_fast, 1e-3, 1e-6),
        Err(Error::SingularGamma { .. })
    ));
}

#[test]
fn linear_solve_without_coupling_is_explicit() {
    // With μ = ν = 0, ∂t/∂u = h′(u) and ∂t/∂v = g h′(v) exactly.
    let s = setup(0.01, 32);
    let len = s.grid.len();
    let coeffs = LinearCoefficients {
        mu: vec![0.0; len],
        nu: vec![0.0; len],
    };
    let g = 0.7;
    let mut gamma = vec![GammaInverse::Regular(g); s.grid.n + 1];
    gamma[0] = GammaInverse::Corner { scaled: 0.0 };
    let sol = solve_linear_t(&coeffs, &gamma, &s.init, &s.grid).unwrap();
    for i in 0..=s.grid.n {
        for j in 0..=i {
            let id = s.grid.idx(i, j);
            assert!((sol.dt_du[id] - s.init.h_prime[i]).abs() < 1e-15);
            let expect = if j == 0 { 0.0 } else { g * s.init.h_prime[j] };
            assert!((sol.dt_dv[id] - expect).abs() < 1e-15, "({i}, {j})");
        }
    }
}

#[test]
fn grid_rejects_bad_sizes() {
    assert!(TriGrid::new(0.01, 0).is_err());
    assert!(TriGrid::new(-0.01, 16).is_err());
}
