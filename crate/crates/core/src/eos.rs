//! Barotropic equations of state and the thermodynamic functions derived from them.
//!
//! The specific volume normalisation is fixed by m = 1, so the enthalpy per unit
//! of the conserved density is h = (ρ + p)/σ with ln σ = ∫ dρ/(ρ + p).
//! The Riemann potential ρ̃ = ∫ dh/(η h) = ∫ η dρ/(ρ + p) vanishes at the
//! reference state. Every operation rejects energy densities outside the
//! declared admissible range instead of extrapolating.

use std::sync::Arc;

use crate::error::{Error, Result};
use crate::numerics::{adaptive_simpson, hermite_cell, locate, MonotoneCubic};

/// Pressure as a function of energy density.
#[derive(Debug, Clone)]
pub enum PressureLaw {
    /// p = ρ/3.
    Radiation,
    /// p = k ρ².
    Poly2 { k: f64 },
    /// Monotone cubic interpolation of ln p against ln ρ from tabulated pairs.
    Table(MonotoneCubic),
}

impl PressureLaw {
    fn pressure(&self, rho: f64) -> f64 {
        match self {
            PressureLaw::Radiation => rho / 3.0,
            PressureLaw::Poly2 { k } => k * rho * rho,
            PressureLaw::Table(t) => t.eval(rho.ln()).0.exp(),
        }
    }

    fn eta2(&self, rho: f64) -> f64 {
        match self {
            PressureLaw::Radiation => 1.0 / 3.0,
            PressureLaw::Poly2 { k } => 2.0 * k * rho,
            PressureLaw::Table(t) => {
                let (lp, slope) = t.eval(rho.ln());
                lp.exp() / rho * slope
            }
        }
    }

    /// dη²/dρ; for tables, of the interpolant p = exp(P(ln ρ)).
    fn d_eta2(&self, rho: f64) -> f64 {
        match self {
            PressureLaw::Radiation => 0.0,
            PressureLaw::Poly2 { k } => 2.0 * k,
            PressureLaw::Table(t) => {
                let x = rho.ln();
                let (lp, slope) = t.eval(x);
                lp.exp() / (rho * rho) * (slope * slope - slope + t.curvature(x))
            }
        }
    }

    fn name(&self) -> &'static str {
        match self {
            PressureLaw::Radiation => "radiation",
            PressureLaw::Poly2 { .. } => "poly2",
            PressureLaw::Table(_) => "table",
        }
    }
}

/// Reference state and admissible range of an equation of state.
#[derive(Debug, Clone, Copy)]
pub struct EosSettings {
    pub rho_ref: f64,
    pub h_ref: f64,
    pub rho_min: f64,
    pub rho_max: f64,
    /// Use closed forms for σ, h and ρ̃ when the pressure law has them.
    pub closed_forms: bool,
}

/// Thermodynamic state at a given Riemann potential.
#[derive(Debug, Clone, Copy)]
pub struct Thermo {
    pub rho: f64,
    pub p: f64,
    pub eta: f64,
    pub h: f64,
    pub sigma: f64,
    /// dη/dρ̃.
    pub d_eta: f64,
}

impl Thermo {
    /// μ = dη/dρ̃ + 1 − η².
    pub fn mu(&self) -> f64 {
        self.d_eta + 1.0 - self.eta * self.eta
    }

    /// The coefficient G = σ/h, so that ρ + p = G h².
    pub fn big_g(&self) -> f64 {
        self.sigma / self.h
    }
}

/// Tabulated ρ̃(x) and ln σ(x) in x = ln ρ with exact nodal slopes.
#[derive(Debug)]
struct PotentialTable {
    x: Vec<f64>,
    rt: Vec<f64>,
    drt: Vec<f64>,
    ls: Vec<f64>,
    dls: Vec<f64>,
}

impl PotentialTable {
    fn cell(&self, x: f64) -> (usize, f64, f64) {
        let i = locate(&self.x, x);
        let h = self.x[i + 1] - self.x[i];
        (i, h, (x - self.x[i]) / h)
    }

    fn potential(&self, x: f64) -> f64 {
        let (i, h, s) = self.cell(x);
        hermite_cell(
            self.rt[i],
            self.rt[i + 1],
            self.drt[i],
            self.drt[i + 1],
            h,
            s,
        )
        .0
    }

    fn ln_sigma(&self, x: f64) -> f64 {
        let (i, h, s) = self.cell(x);
        hermite_cell(
            self.ls[i],
            self.ls[i + 1],
            self.dls[i],
            self.dls[i + 1],
            h,
            s,
        )
        .0
    }

    /// Inverse of the monotone interpolant ρ̃(x).
    fn x_of_potential(&self, target: f64) -> f64 {
        let i = locate(&self.rt, target);
        let (x0, x1) = (self.x[i], self.x[i + 1]);
        let h = x1 - x0;
        let (mut lo, mut hi) = (0.0_f64, 1.0_f64);
        let mut s = ((target - self.rt[i]) / (self.rt[i + 1] - self.rt[i])).clamp(0.0, 1.0);
        for _ in 0..60 {
            let (val, slope) = hermite_cell(
                self.rt[i],
                self.rt[i + 1],
                self.drt[i],
                self.drt[i + 1],
                h,
                s,
            );
            let resid = val - target;
            if resid > 0.0 {
                hi = s;
            } else {
                lo = s;
            }
            let mut next = s - resid / (slope * h);
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - s).abs() <= 1e-16 {
                s = next;
                break;
            }
            s = next;
        }
        x0 + s * h
    }
}

/// A barotropic equation of state p(ρ) with its derived thermodynamic functions.
#[derive(Debug, Clone)]
pub struct BarotropicEos {
    law: PressureLaw,
    label: String,
    rho_ref: f64,
    h_ref: f64,
    ln_sigma_ref: f64,
    rho_min: f64,
    rho_max: f64,
    closed_forms: bool,
    table: Option<Arc<PotentialTable>>,
}

const RANGE_SAMPLES: usize = 257;
const TABLE_STEP: f64 = 4e-3;

impl BarotropicEos {
    /// p = ρ/3 with reference state ρ_ref = h_ref = 1 and range [1e-4, 1e4].
    pub fn radiation() -> Self {
        Self::new(
            PressureLaw::Radiation,
            EosSettings {
                rho_ref: 1.0,
                h_ref: 1.0,
                rho_min: 1e-4,
                rho_max: 1e4,
                closed_forms: true,
            },
        )
        .expect("built-in radiation law is admissible")
    }

    /// p = kρ² with reference ρ_ref = min(1, 0.25/k), h_ref = 1, and range
    /// chosen so that 2kρ ∈ [2e-3, 0.9].
    pub fn poly2(k: f64) -> Result<Self> {
        if !(k > 0.0 && k.is_finite()) {
            return Err(Error::InvalidEos(format!("poly2 needs k > 0, got {k}")));
        }
        Self::new(
            PressureLaw::Poly2 { k },
            EosSettings {
                rho_ref: (0.25 / k).min(1.0),
                h_ref: 1.0,
                rho_min: 1e-3 / k,
                rho_max: 0.45 / k,
                closed_forms: true,
            },
        )
    }

    /// Equation of state from tabulated (ρ, p) rows, interpolated monotonically
    /// in (ln ρ, ln p).
    pub fn from_table(rho: Vec<f64>, p: Vec<f64>, rho_ref: f64, h_ref: f64) -> Result<Self> {
        if rho.iter().chain(&p).any(|&x| !(x > 0.0 && x.is_finite())) {
            return Err(Error::InvalidEos(
                "table densities and pressures must be positive".into(),
            ));
        }
        let ln = |v: Vec<f64>| v.into_iter().map(f64::ln).collect::<Vec<_>>();
        let interp = MonotoneCubic::new(ln(rho), ln(p))?;
        let (rho_min, rho_max) = (interp.x_min().exp(), interp.x_max().exp());
        Self::new(
            PressureLaw::Table(interp),
            EosSettings {
                rho_ref,
                h_ref,
                rho_min,
                rho_max,
                closed_forms: false,
            },
        )
    }

    /// Read a two-column (ρ, p) text table; `#` starts a comment, columns are
    /// separated by whitespace or commas.
    pub fn read_table(path: &std::path::Path, rho_ref: f64, h_ref: f64) -> Result<Self> {
        let text = std::fs::read_to_string(path)?;
        let (mut rho, mut p) = (Vec::new(), Vec::new());
        for (lineno, raw) in text.lines().enumerate() {
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let cols: Vec<&str> = line
                .split(|c: char| c == ',' || c.is_whitespace())
                .filter(|s| !s.is_empty())
                .collect();
            let parse = |s: &str| {
                s.parse::<f64>().map_err(|_| {
                    Error::InvalidEos(format!(
                        "{}:{}: bad number {s:?}",
                        path.display(),
                        lineno + 1
                    ))
                })
            };
            if cols.len() != 2 {
                return Err(Error::InvalidEos(format!(
                    "{}:{}: expected two columns",
                    path.display(),
                    lineno + 1
                )));
            }
            rho.push(parse(cols[0])?);
            p.push(parse(cols[1])?);
        }
        Self::from_table(rho, p, rho_ref, h_ref)
    }

    /// General constructor; validates the law over the admissible range.
    pub fn new(law: PressureLaw, settings: EosSettings) -> Result<Self> {
        let EosSettings {
            rho_ref,
            h_ref,
            rho_min,
            rho_max,
            closed_forms,
        } = settings;
        if !(rho_min > 0.0 && rho_max > rho_min && rho_max.is_finite()) {
            return Err(Error::InvalidEos(format!(
                "admissible range [{rho_min}, {rho_max}] must satisfy 0 < min < max"
            )));
        }
        if !(rho_ref >= rho_min && rho_ref <= rho_max) {
            return Err(Error::InvalidEos(format!(
                "reference density {rho_ref} lies outside [{rho_min}, {rho_max}]"
            )));
        }
        if !(h_ref > 0.0 && h_ref.is_finite()) {
            return Err(Error::InvalidEos(format!(
                "reference enthalpy must be positive, got {h_ref}"
            )));
        }
        let (lmin, lmax) = (rho_min.ln(), rho_max.ln());
        for k in 0..RANGE_SAMPLES {
            let rho = (lmin + (lmax - lmin) * k as f64 / (RANGE_SAMPLES - 1) as f64).exp();
            let p = law.pressure(rho);
            let e2 = law.eta2(rho);
            if !(p > 0.0) {
                return Err(Error::InvalidEos(format!(
                    "pressure {p} not positive at rho = {rho}"
                )));
            }
            if !(e2 > 0.0 && e2 < 1.0) {
                return Err(Error::InvalidEos(format!(
                    "sound speed squared {e2} outside (0, 1) at rho = {rho}"
                )));
            }
        }
        let p_ref = law.pressure(rho_ref);
        let ln_sigma_ref = ((rho_ref + p_ref) / h_ref).ln();
        let closed_forms = closed_forms && !matches!(law, PressureLaw::Table(_));
        let label = law.name().to_string();
        let mut eos = Self {
            law,
            label,
            rho_ref,
            h_ref,
            ln_sigma_ref,
            rho_min,
            rho_max,
            closed_forms,
            table: None,
        };
        if !closed_forms {
            eos.table = Some(Arc::new(eos.build_table()));
        }
        Ok(eos)
    }

    /// The same law evaluated through quadrature and the cached tables only.
    pub fn without_closed_forms(&self) -> Result<Self> {
        Self::new(
            self.law.clone(),
            EosSettings {
                rho_ref: self.rho_ref,
                h_ref: self.h_ref,
                rho_min: self.rho_min,
                rho_max: self.rho_max,
                closed_forms: false,
            },
        )
    }

    pub fn with_label(mut self, label: impl Into<String>) -> Self {
        self.label = label.into();
        self
    }

    pub fn label(&self) -> &str {
        &self.label
    }

    pub fn law(&self) -> &PressureLaw {
        &self.law
    }

    pub fn uses_closed_forms(&self) -> bool {
        self.closed_forms
    }

    pub fn rho_ref(&self) -> f64 {
        self.rho_ref
    }

    pub fn h_ref(&self) -> f64 {
        self.h_ref
    }

    /// σ at the reference state, (ρ_ref + p_ref)/h_ref.
    pub fn sigma_ref(&self) -> f64 {
        self.ln_sigma_ref.exp()
    }

    pub fn rho_range(&self) -> (f64, f64) {
        (self.rho_min, self.rho_max)
    }

    /// Range of the Riemann potential corresponding to the admissible densities.
    pub fn potential_range(&self) -> (f64, f64) {
        (
            self.potential_unchecked(self.rho_min),
            self.potential_unchecked(self.rho_max),
        )
    }

    fn check_rho(&self, rho: f64) -> Result<()> {
        if rho >= self.rho_min && rho <= self.rho_max {
            Ok(())
        } else {
            Err(Error::OutOfRange {
                quantity: "rho",
                value: rho,
            })
        }
    }

    pub fn pressure(&self, rho: f64) -> Result<f64> {
        self.check_rho(rho)?;
        Ok(self.law.pressure(rho))
    }

    /// η² = dp/dρ.
    pub fn sound_speed_sq(&self, rho: f64) -> Result<f64> {
        self.check_rho(rho)?;
        let e2 = self.law.eta2(rho);
        if e2 > 0.0 && e2 < 1.0 {
            Ok(e2)
        } else {
            Err(Error::OutOfRange {
                quantity: "eta^2",
                value: e2,
            })
        }
    }

    /// ln σ(ρ) with σ(ρ_ref) = (ρ_ref + p_ref)/h_ref.
    pub fn ln_sigma(&self, rho: f64) -> Result<f64> {
        self.check_rho(rho)?;
        Ok(self.ln_sigma_unchecked(rho))
    }

    fn ln_sigma_unchecked(&self, rho: f64) -> f64 {
        match (&self.table, &self.law) {
            (Some(t), _) => t.ln_sigma(rho.ln()),
            (None, PressureLaw::Radiation) => self.ln_sigma_ref + 0.75 * (rho / self.rho_ref).ln(),
            (None, PressureLaw::Poly2 { k }) => {
                self.ln_sigma_ref + (rho / (1.0 + k * rho)).ln()
                    - (self.rho_ref / (1.0 + k * self.rho_ref)).ln()
            }
            (None, PressureLaw::Table(_)) => unreachable!("tables always carry a cache"),
        }
    }

    /// h(ρ) = (ρ + p)/σ.
    pub fn enthalpy(&self, rho: f64) -> Result<f64> {
        let p = self.pressure(rho)?;
        Ok((rho + p) / self.ln_sigma_unchecked(rho).exp())
    }

    /// ρ̃ as a function of energy density.
    pub fn potential(&self, rho: f64) -> Result<f64> {
        self.check_rho(rho)?;
        Ok(self.potential_unchecked(rho))
    }

    fn potential_unchecked(&self, rho: f64) -> f64 {
        match (&self.table, &self.law) {
            (Some(t), _) => t.potential(rho.ln()),
            (None, PressureLaw::Radiation) => 0.75 / 3f64.sqrt() * (rho / self.rho_ref).ln(),
            (None, PressureLaw::Poly2 { k }) => {
                2.0 * std::f64::consts::SQRT_2
                    * ((k * rho).sqrt().atan() - (k * self.rho_ref).sqrt().atan())
            }
            (None, PressureLaw::Table(_)) => unreachable!("tables always carry a cache"),
        }
    }

    /// Energy density at Riemann potential ρ̃.
    pub fn rho_from_potential(&self, rt: f64) -> Result<f64> {
        let (lo, hi) = self.potential_range();
        if !(rt >= lo && rt <= hi) {
            return Err(Error::OutOfRange {
                quantity: "rho_tilde",
                value: rt,
            });
        }
        let rho = match (&self.table, &self.law) {
            (Some(t), _) => t.x_of_potential(rt).exp(),
            (None, PressureLaw::Radiation) => self.rho_ref * (4.0 * rt / 3f64.sqrt()).exp(),
            (None, PressureLaw::Poly2 { k }) => {
                let s = (rt / (2.0 * std::f64::consts::SQRT_2) + (k * self.rho_ref).sqrt().atan())
                    .tan();
                s * s / k
            }
            (None, PressureLaw::Table(_)) => unreachable!("tables always carry a cache"),
        };
        Ok(rho.clamp(self.rho_min, self.rho_max))
    }

    /// Energy density at enthalpy h.
    pub fn rho_from_enthalpy(&self, h: f64) -> Result<f64> {
        if !(h > 0.0 && h.is_finite()) {
            return Err(Error::OutOfRange {
                quantity: "h",
                value: h,
            });
        }
        let h_lo = self.enthalpy(self.rho_min)?;
        let h_hi = self.enthalpy(self.rho_max)?;
        if !(h >= h_lo && h <= h_hi) {
            return Err(Error::OutOfRange {
                quantity: "h",
                value: h,
            });
        }
        let rho = match (&self.table, &self.law) {
            (None, PressureLaw::Radiation) => self.rho_ref * (h / self.h_ref).powi(4),
            (None, PressureLaw::Poly2 { k }) => {
                ((1.0 + k * self.rho_ref) * (h / self.h_ref).sqrt() - 1.0) / k
            }
            _ => self.invert_enthalpy(h),
        };
        Ok(rho.clamp(self.rho_min, self.rho_max))
    }

    /// Newton in x = ln ρ on ln h(x) with d ln h/dx = ρη²/(ρ + p), bisection safeguarded.
    fn invert_enthalpy(&self, h: f64) -> f64 {
        let target = h.ln();
        let (mut lo, mut hi) = (self.rho_min.ln(), self.rho_max.ln());
        let mut x = 0.5 * (lo + hi);
        for _ in 0..200 {
            let rho = x.exp();
            let p = self.law.pressure(rho);
            let resid = (rho + p).ln() - self.ln_sigma_unchecked(rho) - target;
            if resid > 0.0 {
                hi = x;
            } else {
                lo = x;
            }
            let slope = rho * self.law.eta2(rho) / (rho + p);
            let mut next = x - resid / slope;
            if !(next > lo && next < hi) {
                next = 0.5 * (lo + hi);
            }
            if (next - x).abs() <= 1e-15 * x.abs().max(1.0) {
                return next.exp();
            }
            x = next;
        }
        x.exp()
    }

    /// ρ̃(h) = ∫_{h_ref}^{h} dh'/(η h').
    pub fn riemann_potential(&self, h: f64) -> Result<f64> {
        let rho = self.rho_from_enthalpy(h)?;
        Ok(self.potential_unchecked(rho))
    }

    /// dη/dρ̃ at density ρ.
    fn d_eta_at(&self, rho: f64) -> f64 {
        let e2 = self.law.eta2(rho);
        (rho + self.law.pressure(rho)) * self.law.d_eta2(rho) / (2.0 * e2)
    }

    /// Full thermodynamic state at Riemann potential ρ̃.
    pub fn thermo(&self, rt: f64) -> Result<Thermo> {
        let rho = self.rho_from_potential(rt)?;
        let p = self.law.pressure(rho);
        let e2 = self.sound_speed_sq(rho)?;
        let sigma = self.ln_sigma_unchecked(rho).exp();
        Ok(Thermo {
            rho,
            p,
            eta: e2.sqrt(),
            h: (rho + p) / sigma,
            sigma,
            d_eta: self.d_eta_at(rho),
        })
    }

    /// μ = dη/dρ̃ + 1 − η² at Riemann potential ρ̃.
    pub fn mu_coefficient(&self, rt: f64) -> Result<f64> {
        Ok(self.thermo(rt)?.mu())
    }

    /// G(H) = σ(H)/√H with H = h².
    pub fn big_g(&self, big_h: f64) -> Result<f64> {
        if !(big_h > 0.0) {
            return Err(Error::OutOfRange {
                quantity: "H",
                value: big_h,
            });
        }
        let h = big_h.sqrt();
        let rho = self.rho_from_enthalpy(h)?;
        Ok(self.ln_sigma_unchecked(rho).exp() / h)
    }

    fn build_table(&self) -> PotentialTable {
        let (xmin, xmax) = (self.rho_min.ln(), self.rho_max.ln());
        let cells = (((xmax - xmin) / TABLE_STEP).ceil() as usize).max(256);
        let dx = (xmax - xmin) / cells as f64;
        let x: Vec<f64> = (0..=cells)
            .map(|i| {
                if i == cells {
                    xmax
                } else {
                    xmin + dx * i as f64
                }
            })
            .collect();
        let law = &self.law;
        let f_rt = |x: f64| {
            let rho = x.exp();
            rho * law.eta2(rho).sqrt() / (rho + law.pressure(rho))
        };
        let f_ls = |x: f64| {
            let rho = x.exp();
            rho / (rho + law.pressure(rho))
        };
        let tol = 1e-15;
        let mut rt = vec![0.0; cells + 1];
        let mut ls = vec![0.0; cells + 1];
        for i in 0..cells {
            rt[i + 1] = rt[i] + adaptive_simpson(&f_rt, x[i], x[i + 1], tol);
            ls[i + 1] = ls[i] + adaptive_simpson(&f_ls, x[i], x[i + 1], tol);
        }
        let xr = self.rho_ref.ln();
        let c = locate(&x, xr);
        let rt_ref = rt[c] + adaptive_simpson(&f_rt, x[c], xr, tol);
        let ls_ref = ls[c] + adaptive_simpson(&f_ls, x[c], xr, tol);
        for v in &mut rt {
            *v -= rt_ref;
        }
        for v in &mut ls {
            *v += self.ln_sigma_ref - ls_ref;
        }
        let drt = x.iter().map(|&xi| f_rt(xi)).collect();
        let dls = x.iter().map(|&xi| f_ls(xi)).collect();
        PotentialTable {
            x,
            rt,
            drt,
            ls,
            dls,
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn sound_speed_examples() {
        let rad = BarotropicEos::radiation();
        assert_eq!(rad.sound_speed_sq(2.0).unwrap(), 1.0 / 3.0);
        let p2 = BarotropicEos::poly2(0.1).unwrap();
        assert!((p2.sound_speed_sq(1.0).unwrap() - 0.2).abs() < 1e-15);
        assert!(matches!(
            p2.sound_speed_sq(6.0),
            Err(Error::OutOfRange { .. })
        ));
    }

    #[test]
    fn reference_state_has_zero_potential() {
        for eos in [
            BarotropicEos::radiation(),
            BarotropicEos::poly2(0.1).unwrap(),
        ] {
            assert!(eos.riemann_potential(eos.h_ref()).unwrap().abs() < 1e-14);
            let numeric = eos.without_closed_forms().unwrap();
            assert!(numeric.riemann_potential(eos.h_ref()).unwrap().abs() < 1e-12);
        }
    }

    #[test]
    fn radiation_potential_closed_form() {
        let rad = BarotropicEos::radiation();
        let e = std::f64::consts::E;
        assert!((rad.riemann_potential(e).unwrap() - 3f64.sqrt()).abs() < 1e-13);
    }

    #[test]
    fn radiation_mu_is_two_thirds() {
        let rad = BarotropicEos::radiation();
        for rt in [-1.0, 0.0, 0.7] {
            assert!((rad.mu_coefficient(rt).unwrap() - 2.0 / 3.0).abs() < 1e-15);
        }
    }

    #[test]
    fn poly2_closed_forms_agree_with_tables() {
        let p2 = BarotropicEos::poly2(0.1).unwrap();
        let num = p2.without_closed_forms().unwrap();
        for rho in [0.05, 0.3, 1.0, 2.5, 4.4] {
            let a = p2.potential(rho).unwrap();
            let b = num.potential(rho).unwrap();
            assert!((a - b).abs() < 1e-10, "{rho}: {a} vs {b}");
            let la = p2.ln_sigma(rho).unwrap();
            let lb = num.ln_sigma(rho).unwrap();
            assert!((la - lb).abs() < 1e-10);
        }
    }

    #[test]
    fn table_constructor_rejects_superluminal_data() {
        let rho = vec![1.0, 2.0, 3.0];
        let p = vec![0.1, 1.5, 3.0];
        assert!(BarotropicEos::from_table(rho, p, 2.0, 1.0).is_err());
    }
}
