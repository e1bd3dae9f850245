//! Riemann invariants, fluid-state conversions, characteristic speeds, source
//! terms and stress components.
//!
//! The internal chart is (ρ̃, ζ) with α = ρ̃ − ζ, β = ρ̃ + ζ and v = −tanh ζ.

use serde::{Deserialize, Serialize};

use crate::eos::{BarotropicEos, Thermo};
use crate::error::{Error, Result};

/// The pair of Riemann invariants (α, β).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct RiemannPair {
    pub alpha: f64,
    pub beta: f64,
}

impl RiemannPair {
    pub fn new(alpha: f64, beta: f64) -> Self {
        Self { alpha, beta }
    }

    pub fn rho_tilde(&self) -> f64 {
        0.5 * (self.alpha + self.beta)
    }

    pub fn zeta(&self) -> f64 {
        0.5 * (self.beta - self.alpha)
    }

    /// Fluid velocity v = −tanh((β − α)/2).
    pub fn velocity(&self) -> f64 {
        -self.zeta().tanh()
    }

    /// The pair with α and β interchanged.
    pub fn swapped(&self) -> Self {
        Self::new(self.beta, self.alpha)
    }

    pub fn offset(&self, d_alpha: f64, d_beta: f64) -> Self {
        Self::new(self.alpha + d_alpha, self.beta + d_beta)
    }
}

/// The components (ψ_t, ψ_r) of the enthalpy current.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FluidState {
    pub psi_t: f64,
    pub psi_r: f64,
}

impl FluidState {
    pub fn new(psi_t: f64, psi_r: f64) -> Result<Self> {
        if psi_t > psi_r.abs() && psi_t.is_finite() {
            Ok(Self { psi_t, psi_r })
        } else {
            Err(Error::OutOfRange {
                quantity: "psi_t - |psi_r|",
                value: psi_t - psi_r.abs(),
            })
        }
    }

    /// h = √(ψ_t² − ψ_r²).
    pub fn enthalpy(&self) -> f64 {
        ((self.psi_t - self.psi_r) * (self.psi_t + self.psi_r)).sqrt()
    }
}

/// Stress components (T^tt, T^tr, T^rr).
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Stress {
    pub tt: f64,
    pub tr: f64,
    pub rr: f64,
}

/// α = ρ̃(h) − ζ, β = ρ̃(h) + ζ with ζ = artanh(ψ_r/ψ_t).
pub fn riemann_from_state(eos: &BarotropicEos, s: FluidState) -> Result<RiemannPair> {
    let rt = eos.riemann_potential(s.enthalpy())?;
    let zeta = (s.psi_r / s.psi_t).atanh();
    Ok(RiemannPair::new(rt - zeta, rt + zeta))
}

/// ψ_t = (e^γ/2)(e^β + e^α), ψ_r = (e^γ/2)(e^β − e^α) with γ = ln h − ρ̃.
pub fn state_from_riemann(eos: &BarotropicEos, p: RiemannPair) -> Result<FluidState> {
    let rt = p.rho_tilde();
    let th = eos.thermo(rt)?;
    let half_eg = 0.5 * (th.h.ln() - rt).exp();
    let (ea, eb) = (p.alpha.exp(), p.beta.exp());
    FluidState::new(half_eg * (eb + ea), half_eg * (eb - ea))
}

/// Characteristic speeds c± = (v ± η)/(1 ± vη).
pub fn char_speeds(eos: &BarotropicEos, p: RiemannPair) -> Result<(f64, f64)> {
    let s = PointState::new(eos, p)?;
    Ok((s.c_plus, s.c_minus))
}

/// Source terms Ã = −2vη/(r(1 + vη)), B̃ = −2vη/(r(1 − vη)).
pub fn source_terms(eos: &BarotropicEos, p: RiemannPair, r: f64) -> Result<(f64, f64)> {
    PointState::new(eos, p)?.source_terms(r)
}

/// T^tt = Gψ_t² − p, T^tr = Gψ_t² v, T^rr = Gψ_t² v² + p.
pub fn stress(eos: &BarotropicEos, p: RiemannPair) -> Result<Stress> {
    Ok(PointState::new(eos, p)?.stress())
}

/// F = (1/η² − 1)/H, so that η² = 1/(1 + HF).
pub fn f_coefficient(eta: f64, big_h: f64) -> f64 {
    (1.0 / (eta * eta) - 1.0) / big_h
}

/// Everything the solver needs at one (α, β), evaluated once.
#[derive(Debug, Clone, Copy)]
pub struct PointState {
    pub pair: RiemannPair,
    pub thermo: Thermo,
    pub v: f64,
    pub c_plus: f64,
    pub c_minus: f64,
    /// Gψ_t² = (ρ + p)/(1 − v²).
    pub weight: f64,
}

impl PointState {
    pub fn new(eos: &BarotropicEos, pair: RiemannPair) -> Result<Self> {
        let thermo = eos.thermo(pair.rho_tilde())?;
        let v = pair.velocity();
        let eta = thermo.eta;
        let one_m_v2 = {
            let c = pair.zeta().cosh();
            1.0 / (c * c)
        };
        Ok(Self {
            pair,
            thermo,
            v,
            c_plus: (v + eta) / (1.0 + v * eta),
            c_minus: (v - eta) / (1.0 - v * eta),
            weight: (thermo.rho + thermo.p) / one_m_v2,
        })
    }

    pub fn eta(&self) -> f64 {
        self.thermo.eta
    }

    pub fn mu(&self) -> f64 {
        self.thermo.mu()
    }

    pub fn one_minus_v2(&self) -> f64 {
        let c = self.pair.zeta().cosh();
        1.0 / (c * c)
    }

    pub fn source_terms(&self, r: f64) -> Result<(f64, f64)> {
        if !(r > 0.0) {
            return Err(Error::OutOfRange {
                quantity: "r",
                value: r,
            });
        }
        let ve = self.v * self.eta();
        Ok((-2.0 * ve / (r * (1.0 + ve)), -2.0 * ve / (r * (1.0 - ve))))
    }

    pub fn stress(&self) -> Stress {
        let w = self.weight;
        Stress {
            tt: w - self.thermo.p,
            tr: w * self.v,
            rr: w * self.v * self.v + self.thermo.p,
        }
    }

    /// (∂T^tt/∂α, ∂T^tt/∂β); the other components follow from
    /// ∂T^tr = c ∂T^tt and ∂T^rr = c² ∂T^tt with c = c₊ for α and c₋ for β.
    pub fn dtt(&self) -> (f64, f64) {
        let (v, eta) = (self.v, self.eta());
        let k = self.weight / (2.0 * eta);
        (k * (1.0 + v * eta).powi(2), k * (1.0 - v * eta).powi(2))
    }

    /// (∂c₊/∂α, ∂c₊/∂β).
    pub fn dc_plus(&self) -> (f64, f64) {
        let (v, eta) = (self.v, self.eta());
        let q = self.one_minus_v2() / (2.0 * (1.0 + v * eta).powi(2));
        let de = self.thermo.d_eta;
        let ome = 1.0 - eta * eta;
        (q * (ome + de), q * (de - ome))
    }

    /// (∂c₋/∂α, ∂c₋/∂β).
    pub fn dc_minus(&self) -> (f64, f64) {
        let (v, eta) = (self.v, self.eta());
        let q = self.one_minus_v2() / (2.0 * (1.0 - v * eta).powi(2));
        let de = self.thermo.d_eta;
        let ome = 1.0 - eta * eta;
        (q * (ome - de), -q * (ome + de))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn reference_state_maps_to_origin() {
        let eos = BarotropicEos::radiation();
        let s = FluidState::new(eos.h_ref(), 0.0).unwrap();
        let p = riemann_from_state(&eos, s).unwrap();
        assert!(p.alpha.abs() < 1e-14 && p.beta.abs() < 1e-14);
        let back = state_from_riemann(&eos, RiemannPair::new(0.0, 0.0)).unwrap();
        assert!(back.psi_r == 0.0 && (back.psi_t - eos.h_ref()).abs() < 1e-14);
    }

    #[test]
    fn swapping_invariants_flips_psi_r() {
        let eos = BarotropicEos::radiation();
        let p = RiemannPair::new(0.1, -0.3);
        let a = state_from_riemann(&eos, p).unwrap();
        let b = state_from_riemann(&eos, p.swapped()).unwrap();
        assert!((a.psi_t - b.psi_t).abs() < 1e-15 && (a.psi_r + b.psi_r).abs() < 1e-15);
    }

    #[test]
    fn speeds_at_rest_and_at_sonic_velocity() {
        let eos = BarotropicEos::radiation();
        let eta = (1.0f64 / 3.0).sqrt();
        let (cp, cm) = char_speeds(&eos, RiemannPair::new(0.2, 0.2)).unwrap();
        assert!((cp - eta).abs() < 1e-15 && (cm + eta).abs() < 1e-15);
        // v = η  <=>  ζ = −artanh η.
        let zeta = -eta.atanh();
        let (_, cm) = char_speeds(&eos, RiemannPair::new(-zeta, zeta)).unwrap();
        assert!(cm.abs() < 1e-15);
    }

    #[test]
    fn sources_vanish_at_rest_and_are_negative_for_outflow() {
        let eos = BarotropicEos::radiation();
        assert_eq!(
            source_terms(&eos, RiemannPair::new(0.1, 0.1), 1.0).unwrap(),
            (0.0, 0.0)
        );
        let p = RiemannPair::new(0.3, -0.3);
        assert!(p.velocity() > 0.0);
        let (a, b) = source_terms(&eos, p, 2.0).unwrap();
        assert!(a < 0.0 && b < 0.0);
    }

    #[test]
    fn stress_at_rest() {
        let eos = BarotropicEos::radiation();
        let s = stress(&eos, RiemannPair::new(0.4, 0.4)).unwrap();
        assert_eq!(s.tr, 0.0);
        assert!(s.tt > 0.0);
    }
}
