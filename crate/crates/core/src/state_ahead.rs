//! Polynomial model of the smooth solution ahead of the shock near the cusp
//! point, in acoustical coordinates (t, w), together with the derived data
//! on the incoming characteristic from the cusp.
//!
//! The model is the minimal polynomial realising the cusp constraints: every
//! coefficient fixed by them is set, all others are zero unless overridden.
//! Two further coefficients are fixed by consistency of the model with the
//! outgoing characteristic equations at the cusp: ∂α*/∂t = Ã and
//! ∂²r*/∂t² = d c₊/dt there. Both may be overridden.

use serde::{Deserialize, Serialize};

use crate::eos::BarotropicEos;
use crate::error::{Error, Result};
use crate::state::{PointState, RiemannPair};

/// Cusp parameters supplied by the user.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields, default)]
pub struct CuspParams {
    pub kappa: f64,
    pub lambda: f64,
    pub alpha0: f64,
    pub beta0: f64,
    pub r0: f64,
    /// (∂²α*/∂w²) at the cusp.
    pub alpha_ddot0: f64,
    /// (∂β*/∂t) at the cusp.
    pub dbeta_dt0: f64,
    /// ξ = κ (∂⁴r*/∂w⁴) at the cusp.
    pub xi: f64,
}

impl Default for CuspParams {
    fn default() -> Self {
        Self {
            kappa: 1.0,
            lambda: 1.0,
            alpha0: 0.0,
            beta0: 0.0,
            r0: 1.0,
            alpha_ddot0: 0.0,
            dbeta_dt0: 0.5,
            xi: 0.0,
        }
    }
}

/// Resolved scalar data at the cusp point.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CuspData {
    pub kappa: f64,
    pub lambda: f64,
    pub alpha0: f64,
    pub beta0: f64,
    pub r0: f64,
    /// (∂α*/∂w) at the cusp, fixed by κ = (∂c₊/∂α)₀ α̇₀.
    pub alpha_dot0: f64,
    pub alpha_ddot0: f64,
    pub dbeta_dt0: f64,
    pub xi: f64,
    /// l = (dc₋/dw) at the cusp.
    pub l: f64,
    pub c_plus0: f64,
    pub c_minus0: f64,
    pub eta0: f64,
    pub mu0: f64,
    /// Ã at the cusp.
    pub a_tilde0: f64,
    /// (∂c₊/∂α, ∂c₊/∂β) at the cusp.
    pub dc_plus0: (f64, f64),
}

impl CuspData {
    pub fn resolve(params: &CuspParams, eos: &BarotropicEos) -> Result<Self> {
        let CuspParams {
            kappa,
            lambda,
            alpha0,
            beta0,
            r0,
            alpha_ddot0,
            dbeta_dt0,
            xi,
        } = *params;
        if !(kappa > 0.0 && kappa.is_finite()) {
            return Err(Error::InconsistentCusp(format!(
                "kappa must be positive, got {kappa}"
            )));
        }
        if !(lambda > 0.0 && lambda.is_finite()) {
            return Err(Error::InconsistentCusp(format!(
                "lambda must be positive, got {lambda}"
            )));
        }
        if !(r0 > 0.0 && r0.is_finite()) {
            return Err(Error::InconsistentCusp(format!(
                "r0 must be positive, got {r0}"
            )));
        }
        let st = PointState::new(eos, RiemannPair::new(alpha0, beta0))?;
        let dc_plus0 = st.dc_plus();
        let alpha_dot0 = alpha_dot_from(kappa, dc_plus0.0)?;
        let l = st.dc_minus().0 * alpha_dot0;
        let a_tilde0 = st.source_terms(r0)?.0;
        Ok(Self {
            kappa,
            lambda,
            alpha0,
            beta0,
            r0,
            alpha_dot0,
            alpha_ddot0,
            dbeta_dt0,
            xi,
            l,
            c_plus0: st.c_plus,
            c_minus0: st.c_minus,
            eta0: st.eta(),
            mu0: st.mu(),
            a_tilde0,
            dc_plus0,
        })
    }

    pub fn base(&self) -> RiemannPair {
        RiemannPair::new(self.alpha0, self.beta0)
    }

    /// λ/(6κ²), the limit of f/v² along the shock.
    pub fn f_hat0(&self) -> f64 {
        self.lambda / (6.0 * self.kappa * self.kappa)
    }

    /// λ/(6κ(c₊₀ − c₋₀)), the limit of t/w³ along the incoming characteristic.
    pub fn h_hat0(&self) -> f64 {
        self.lambda / (6.0 * self.kappa * (self.c_plus0 - self.c_minus0))
    }
}

/// α̇₀ = κ/(∂c₊/∂α)₀, rejecting a vanishing derivative.
pub fn alpha_dot_from(kappa: f64, dc_plus_dalpha: f64) -> Result<f64> {
    if !(dc_plus_dalpha.abs() > 1e-12) {
        return Err(Error::InconsistentCusp(format!(
            "d c_plus / d alpha = {dc_plus_dalpha:e} at the cusp; kappa cannot be realised"
        )));
    }
    let a = kappa / dc_plus_dalpha;
    if !a.is_finite() {
        return Err(Error::InconsistentCusp("alpha_dot0 is not finite".into()));
    }
    Ok(a)
}

/// Which model field.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Field {
    Alpha,
    Beta,
    Radius,
}

/// Polynomial Σ c_ij t^i w^j of total degree ≤ D.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct Poly2d {
    degree: usize,
    coeffs: Vec<f64>,
}

fn falling(n: usize, k: usize) -> f64 {
    (0..k).map(|m| (n - m) as f64).product()
}

impl Poly2d {
    pub fn zeros(degree: usize) -> Self {
        Self {
            degree,
            coeffs: vec![0.0; (degree + 1) * (degree + 1)],
        }
    }

    pub fn degree(&self) -> usize {
        self.degree
    }

    pub fn get(&self, i: usize, j: usize) -> f64 {
        if i + j > self.degree {
            0.0
        } else {
            self.coeffs[i * (self.degree + 1) + j]
        }
    }

    fn set(&mut self, i: usize, j: usize, value: f64) {
        self.coeffs[i * (self.degree + 1) + j] = value;
    }

    /// Nonzero terms as (i, j, c_ij).
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, f64)> + '_ {
        (0..=self.degree).flat_map(move |i| {
            (0..=self.degree - i).filter_map(move |j| {
                let c = self.get(i, j);
                (c != 0.0).then_some((i, j, c))
            })
        })
    }

    /// ∂^a_t ∂^b_w of the polynomial at (t, w).
    pub fn eval(&self, t: f64, w: f64, dt: usize, dw: usize) -> f64 {
        self.terms()
            .filter(|&(i, j, _)| i >= dt && j >= dw)
            .map(|(i, j, c)| {
                c * falling(i, dt)
                    * falling(j, dw)
                    * t.powi((i - dt) as i32)
                    * w.powi((j - dw) as i32)
            })
            .sum()
    }

    /// Value with the listed monomials removed.
    pub fn eval_without(&self, t: f64, w: f64, skip: &[(usize, usize)]) -> f64 {
        self.terms()
            .filter(|&(i, j, _)| !skip.contains(&(i, j)))
            .map(|(i, j, c)| c * t.powi(i as i32) * w.powi(j as i32))
            .sum()
    }
}

/// A user override of one model coefficient c_ij (coefficient of t^i w^j).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct CoefficientOverride {
    pub field: Field,
    pub t_power: usize,
    pub w_power: usize,
    pub value: f64,
}

/// Box |t| ≤ t_max, |w| ≤ w_max in which the model may be evaluated.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct ValidityBox {
    pub t_max: f64,
    pub w_max: f64,
}

impl ValidityBox {
    /// |t| ≤ 10ε², |w| ≤ 2ε.
    pub fn for_eps(eps: f64) -> Self {
        Self {
            t_max: 10.0 * eps * eps,
            w_max: 2.0 * eps,
        }
    }

    fn contains(&self, t: f64, w: f64) -> bool {
        t.abs() <= self.t_max && w.abs() <= self.w_max
    }
}

/// Analytic fields α*, β*, r* ahead of the shock.
#[derive(Debug, Clone, Serialize)]
pub struct StateAheadModel {
    pub cusp: CuspData,
    pub alpha: Poly2d,
    pub beta: Poly2d,
    pub radius: Poly2d,
    pub validity: Option<ValidityBox>,
}

/// Coefficients fixed by the cusp constraints, per field.
fn constrained(field: Field) -> &'static [(usize, usize)] {
    match field {
        Field::Alpha => &[(0, 0), (0, 1), (0, 2)],
        Field::Beta => &[(0, 0), (0, 1), (0, 2)],
        Field::Radius => &[(0, 0), (1, 0), (0, 1), (0, 2), (0, 3), (1, 1), (0, 4)],
    }
}

/// Build the minimal polynomial model for the given cusp data.
pub fn synthesize_model(
    cusp: CuspData,
    eos: &BarotropicEos,
    degree: usize,
    overrides: &[CoefficientOverride],
) -> Result<StateAheadModel> {
    if degree < 4 {
        return Err(Error::InconsistentCusp(format!(
            "model degree must be at least 4, got {degree}"
        )));
    }
    // Re-derive α̇₀ from the EOS so that externally built cusp data is checked.
    let st = PointState::new(eos, cusp.base())?;
    let expected = alpha_dot_from(cusp.kappa, st.dc_plus().0)?;
    if (expected - cusp.alpha_dot0).abs() > 1e-12 * expected.abs().max(1.0) {
        return Err(Error::InconsistentCusp(format!(
            "alpha_dot0 = {} but kappa / (d c_plus / d alpha) = {expected}",
            cusp.alpha_dot0
        )));
    }
    let (k, lam) = (cusp.kappa, cusp.lambda);
    let mut alpha = Poly2d::zeros(degree);
    alpha.set(0, 0, cusp.alpha0);
    alpha.set(0, 1, cusp.alpha_dot0);
    alpha.set(0, 2, 0.5 * cusp.alpha_ddot0);
    alpha.set(1, 0, cusp.a_tilde0);

    let mut beta = Poly2d::zeros(degree);
    beta.set(0, 0, cusp.beta0);
    beta.set(1, 0, cusp.dbeta_dt0);

    let mut radius = Poly2d::zeros(degree);
    radius.set(0, 0, cusp.r0);
    radius.set(1, 0, cusp.c_plus0);
    radius.set(0, 3, -lam / (6.0 * k));
    radius.set(1, 1, k);
    radius.set(0, 4, cusp.xi / (24.0 * k));
    let dcp_dt = cusp.dc_plus0.0 * cusp.a_tilde0 + cusp.dc_plus0.1 * cusp.dbeta_dt0;
    radius.set(2, 0, 0.5 * dcp_dt);

    for o in overrides {
        if o.t_power + o.w_power > degree {
            return Err(Error::InconsistentCusp(format!(
                "override t^{} w^{} exceeds the model degree {degree}",
                o.t_power, o.w_power
            )));
        }
        if constrained(o.field).contains(&(o.t_power, o.w_power)) {
            return Err(Error::InconsistentCusp(format!(
                "coefficient t^{} w^{} of {:?} is fixed by the cusp constraints",
                o.t_power, o.w_power, o.field
            )));
        }
        if !o.value.is_finite() {
            return Err(Error::InconsistentCusp(
                "override value must be finite".into(),
            ));
        }
        let p = match o.field {
            Field::Alpha => &mut alpha,
            Field::Beta => &mut beta,
            Field::Radius => &mut radius,
        };
        p.set(o.t_power, o.w_power, o.value);
    }
    Ok(StateAheadModel {
        cusp,
        alpha,
        beta,
        radius,
        validity: None,
    })
}

impl StateAheadModel {
    pub fn with_validity(mut self, validity: ValidityBox) -> Self {
        self.validity = Some(validity);
        self
    }

    pub fn field(&self, field: Field) -> &Poly2d {
        match field {
            Field::Alpha => &self.alpha,
            Field::Beta => &self.beta,
            Field::Radius => &self.radius,
        }
    }

    fn check(&self, t: f64, w: f64) -> Result<()> {
        match self.validity {
            Some(b) if !b.contains(t, w) => Err(Error::OutOfBox { t, w }),
            _ if !(t.is_finite() && w.is_finite()) => Err(Error::OutOfBox { t, w }),
            _ => Ok(()),
        }
    }

    /// ∂^dt_t ∂^dw_w of a field at (t, w); derivative orders up to 4.
    pub fn eval(&self, field: Field, t: f64, w: f64, dt: usize, dw: usize) -> Result<f64> {
        self.check(t, w)?;
        if dt + dw > 4 {
            return Err(Error::Config(format!(
                "derivative order {} exceeds 4",
                dt + dw
            )));
        }
        Ok(self.field(field).eval(t, w, dt, dw))
    }

    /// (α*, β*) at (t, w).
    pub fn pair(&self, t: f64, w: f64) -> Result<RiemannPair> {
        self.check(t, w)?;
        Ok(RiemannPair::new(
            self.alpha.eval(t, w, 0, 0),
            self.beta.eval(t, w, 0, 0),
        ))
    }

    /// (α* − α₀, β* − β₀) at (t, w), without cancellation.
    pub fn pair_offset(&self, t: f64, w: f64) -> Result<(f64, f64)> {
        self.check(t, w)?;
        Ok((
            self.alpha.eval_without(t, w, &[(0, 0)]),
            self.beta.eval_without(t, w, &[(0, 0)]),
        ))
    }

    /// r* − r₀ − c₊₀ t at (t, w), without cancellation.
    pub fn radius_reduced(&self, t: f64, w: f64) -> Result<f64> {
        self.check(t, w)?;
        Ok(self.radius.eval_without(t, w, &[(0, 0), (1, 0)]))
    }

    /// Singular boundary t*(w): the zero set of ∂r*/∂w through the cusp,
    /// expanded to cubic order.
    pub fn singular_boundary(&self, w: f64) -> f64 {
        let k = self.cusp.kappa;
        let a = self.cusp.lambda / (2.0 * k * k);
        let b = -(4.0 * self.radius.get(0, 4) + 2.0 * self.radius.get(1, 2) * a) / k;
        a * w * w + b * w * w * w
    }

    /// Hatted identification function F̂(v, y) = F/v³ with F = g + r₀ − r*(f, vy),
    /// evaluated through the monomial expansion in f̂ = f/v² and y.
    /// Returns (F̂, ∂F̂/∂y).
    pub fn identification_hatted(&self, v: f64, y: f64, f_hat: f64, delta_hat: f64) -> (f64, f64) {
        let mut value = delta_hat;
        let mut slope = 0.0;
        for (i, j, c) in self.radius.terms() {
            if (i, j) == (0, 0) || (i, j) == (1, 0) {
                continue;
            }
            let e = 2 * i + j;
            debug_assert!(e >= 3, "monomial t^{i} w^{j} is constrained to vanish");
            let vp = v.powi(e as i32 - 3);
            value -= c * vp * f_hat.powi(i as i32) * y.powi(j as i32);
            if j > 0 {
                slope -= c * vp * f_hat.powi(i as i32) * j as f64 * y.powi(j as i32 - 1);
            }
        }
        (value, slope)
    }

    /// (α_i(u) − α₀ − α̇₀u)/u² from ĥ = h/u³, without division.
    pub fn alpha_initial_hatted(&self, u: f64, h_hat: f64) -> f64 {
        self.alpha
            .terms()
            .filter(|&(i, j, _)| (i, j) != (0, 0) && (i, j) != (0, 1))
            .map(|(i, j, c)| c * h_hat.powi(i as i32) * u.powi((3 * i + j) as i32 - 2))
            .sum()
    }

    /// Coefficient dump for reproducibility.
    pub fn to_json(&self) -> serde_json::Value {
        let dump = |p: &Poly2d| {
            p.terms()
                .map(|(i, j, c)| serde_json::json!({ "t_power": i, "w_power": j, "value": c }))
                .collect::<Vec<_>>()
        };
        serde_json::json!({
            "cusp": self.cusp,
            "degree": self.alpha.degree(),
            "alpha": dump(&self.alpha),
            "beta": dump(&self.beta),
            "radius": dump(&self.radius),
            "validity": self.validity,
        })
    }
}

/// Samples of the incoming characteristic t = t̲(w) on [0, w_max].
#[derive(Debug, Clone)]
pub struct CharacteristicSamples {
    pub w: Vec<f64>,
    pub t: Vec<f64>,
    pub dt_dw: Vec<f64>,
}

/// dt̲/dw = −(∂r*/∂w)/(c₊ − c₋) with the speeds evaluated on the model.
fn characteristic_rhs(model: &StateAheadModel, eos: &BarotropicEos, t: f64, w: f64) -> Result<f64> {
    let leave = |e: Error| match e {
        Error::OutOfBox { t, w } => Error::LeftBox { t, w },
        other => other,
    };
    let r_w = model.eval(Field::Radius, t, w, 0, 1).map_err(leave)?;
    let st = PointState::new(eos, model.pair(t, w).map_err(leave)?)?;
    Ok(-r_w / (st.c_plus - st.c_minus))
}

/// Integrate the incoming characteristic from the cusp, sampled at
/// `n_points` equally spaced w in [0, u_max].
pub fn incoming_characteristic(
    model: &StateAheadModel,
    eos: &BarotropicEos,
    u_max: f64,
    n_points: usize,
) -> Result<CharacteristicSamples> {
    if n_points < 2 || !(u_max > 0.0) {
        return Err(Error::Config(
            "incoming characteristic needs u_max > 0 and two points".into(),
        ));
    }
    let c = &model.cusp;
    let dc = c.c_plus0 - c.c_minus0;
    let a3 = c.h_hat0();
    let a4 = -(c.lambda * (4.0 * c.kappa - 3.0 * c.l) / (c.kappa * dc * dc)
        + c.xi / (c.kappa * dc))
        / 24.0;
    let series = |w: f64| w * w * w * (a3 + a4 * w);

    let spacing = u_max / (n_points - 1) as f64;
    let w_series = 1e-2 * spacing;
    const SUBSTEPS: usize = 16;
    let mut w_out = Vec::with_capacity(n_points);
    let mut t_out = Vec::with_capacity(n_points);
    let mut d_out = Vec::with_capacity(n_points);
    w_out.push(0.0);
    t_out.push(0.0);
    d_out.push(0.0);

    let mut w = w_series;
    let mut t = series(w_series);
    for k in 1..n_points {
        let target = if k == n_points - 1 {
            u_max
        } else {
            spacing * k as f64
        };
        let h = (target - w) / SUBSTEPS as f64;
        for _ in 0..SUBSTEPS {
            let k1 = characteristic_rhs(model, eos, t, w)?;
            let k2 = characteristic_rhs(model, eos, t + 0.5 * h * k1, w + 0.5 * h)?;
            let k3 = characteristic_rhs(model, eos, t + 0.5 * h * k2, w + 0.5 * h)?;
            let k4 = characteristic_rhs(model, eos, t + h * k3, w + h)?;
            t += h / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
            w += h;
        }
        w = target;
        w_out.push(target);
        t_out.push(t);
        d_out.push(characteristic_rhs(model, eos, t, target)?);
    }
    Ok(CharacteristicSamples {
        w: w_out,
        t: t_out,
        dt_dw: d_out,
    })
}

/// Data on the incoming characteristic at the grid nodes u_i = iΔ.
#[derive(Debug, Clone)]
pub struct InitialData {
    pub u: Vec<f64>,
    /// h(u) = t̲(u).
    pub h: Vec<f64>,
    /// h′(u).
    pub h_prime: Vec<f64>,
    /// ĥ = h/u³.
    pub h_hat: Vec<f64>,
    /// α_i(u) − α₀.
    pub alpha_offset: Vec<f64>,
    /// α̂_i = (α_i − α₀ − α̇₀u)/u².
    pub alpha_hat: Vec<f64>,
}

impl InitialData {
    pub fn alpha(&self, cusp: &CuspData, i: usize) -> f64 {
        cusp.alpha0 + self.alpha_offset[i]
    }
}

/// Sample h and α_i at u_i = iε/n, i = 0..=n.
pub fn initial_data(
    model: &StateAheadModel,
    eos: &BarotropicEos,
    eps: f64,
    n: usize,
) -> Result<InitialData> {
    let ch = incoming_characteristic(model, eos, eps, n + 1)?;
    let c = &model.cusp;
    let mut h_hat = Vec::with_capacity(n + 1);
    let mut alpha_offset = Vec::with_capacity(n + 1);
    let mut alpha_hat = Vec::with_capacity(n + 1);
    for (k, (&u, &h)) in ch.w.iter().zip(&ch.t).enumerate() {
        if k == 0 {
            h_hat.push(c.h_hat0());
            alpha_offset.push(0.0);
            alpha_hat.push(0.5 * c.alpha_ddot0);
            continue;
        }
        let hh = h / (u * u * u);
        h_hat.push(hh);
        alpha_offset.push(model.pair_offset(h, u)?.0);
        alpha_hat.push(model.alpha_initial_hatted(u, hh));
    }
    Ok(InitialData {
        u: ch.w,
        h: ch.t,
        h_prime: ch.dt_dw,
        h_hat,
        alpha_offset,
        alpha_hat,
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn canonical() -> (BarotropicEos, StateAheadModel) {
        let eos = BarotropicEos::radiation();
        let cusp = CuspData::resolve(&CuspParams::default(), &eos).unwrap();
        let model = synthesize_model(cusp, &eos, 5, &[]).unwrap();
        (eos, model)
    }

    #[test]
    fn canonical_alpha_dot_is_three() {
        let (_, model) = canonical();
        assert!((model.cusp.alpha_dot0 - 3.0).abs() < 1e-14);
    }

    #[test]
    fn cusp_constraints_hold_as_coefficient_identities() {
        let (_, m) = canonical();
        let c = m.cusp;
        let r = |dt, dw| m.eval(Field::Radius, 0.0, 0.0, dt, dw).unwrap();
        assert_eq!(r(0, 0), c.r0);
        assert_eq!(r(1, 0), c.c_plus0);
        assert_eq!(r(0, 1), 0.0);
        assert_eq!(r(0, 2), 0.0);
        assert_eq!(r(0, 3), -c.lambda / c.kappa);
        assert_eq!(r(1, 1), c.kappa);
        let b = |dt, dw| m.eval(Field::Beta, 0.0, 0.0, dt, dw).unwrap();
        assert_eq!((b(0, 0), b(0, 1), b(0, 2)), (c.beta0, 0.0, 0.0));
        let a = |dt, dw| m.eval(Field::Alpha, 0.0, 0.0, dt, dw).unwrap();
        assert_eq!(
            (a(0, 0), a(0, 1), a(0, 2)),
            (c.alpha0, c.alpha_dot0, c.alpha_ddot0)
        );
    }

    #[test]
    fn constrained_coefficients_cannot_be_overridden() {
        let eos = BarotropicEos::radiation();
        let cusp = CuspData::resolve(&CuspParams::default(), &eos).unwrap();
        let bad = CoefficientOverride {
            field: Field::Radius,
            t_power: 1,
            w_power: 1,
            value: 2.0,
        };
        assert!(matches!(
            synthesize_model(cusp, &eos, 5, &[bad]),
            Err(Error::InconsistentCusp(_))
        ));
        let ok = CoefficientOverride {
            field: Field::Beta,
            t_power: 1,
            w_power: 1,
            value: 0.2,
        };
        let m = synthesize_model(cusp, &eos, 5, &[ok]).unwrap();
        assert_eq!(m.eval(Field::Beta, 0.0, 0.0, 1, 1).unwrap(), 0.2);
    }

    #[test]
    fn nonpositive_kappa_is_inconsistent() {
        let eos = BarotropicEos::radiation();
        let p = CuspParams {
            kappa: 0.0,
            ..CuspParams::default()
        };
        assert!(matches!(
            CuspData::resolve(&p, &eos),
            Err(Error::InconsistentCusp(_))
        ));
        assert!(matches!(
            alpha_dot_from(1.0, 0.0),
            Err(Error::InconsistentCusp(_))
        ));
    }

    #[test]
    fn validity_box_is_enforced() {
        let (_, m) = canonical();
        let m = m.with_validity(ValidityBox::for_eps(0.01));
        assert!(m.eval(Field::Alpha, 0.0, 0.019, 0, 0).is_ok());
        assert!(matches!(
            m.eval(Field::Alpha, 0.0, 0.021, 0, 0),
            Err(Error::OutOfBox { .. })
        ));
        assert!(matches!(
            m.eval(Field::Alpha, 0.002, 0.0, 0, 0),
            Err(Error::OutOfBox { .. })
        ));
    }

    #[test]
    fn singular_boundary_leading_term() {
        let (_, m) = canonical();
        assert_eq!(m.singular_boundary(0.0), 0.0);
        assert!((m.singular_boundary(0.1) - 0.005).abs() < 1e-3);
    }

    #[test]
    fn initial_data_limits() {
        let (eos, m) = canonical();
        let d = initial_data(&m, &eos, 0.01, 16).unwrap();
        assert_eq!(d.h[0], 0.0);
        assert_eq!(d.alpha_offset[0], 0.0);
        assert!((d.h_hat[0] - 3f64.sqrt() / 12.0).abs() < 1e-15);
        assert_eq!(d.alpha_hat[0], 0.5 * m.cusp.alpha_ddot0);
    }
}
