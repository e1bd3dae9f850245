//! Jump conditions across the shock: the jump function J, the root solve for
//! β behind the shock, the shock speed, and the determinism diagnostics.
//!
//! Jumps of the stress components are evaluated as line integrals of their
//! gradients along the straight segment joining the two states in the (α, β)
//! plane. Writing a(s) = ∂_αT^tt Δα and b(s) = ∂_βT^tt Δβ, J takes the
//! cancellation free form
//!
//! J = ½∬ a a′ (c₊ − c₊′)² + ∬ a b′ (c₊ − c₋′)² + ½∬ b b′ (c₋ − c₋′)²,
//!
//! which keeps full relative accuracy when J is of order Δα⁴.

use serde::Serialize;

use crate::eos::BarotropicEos;
use crate::error::{Error, Result};
use crate::numerics::gauss8_unit;
use crate::state::{PointState, RiemannPair};

/// The states on either side of the shock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct JumpPair {
    /// State ahead of the shock (α₋, β₋).
    pub ahead: RiemannPair,
    /// State behind the shock (α₊, β₊).
    pub behind: RiemannPair,
}

impl JumpPair {
    pub fn new(ahead: RiemannPair, behind: RiemannPair) -> Self {
        Self { ahead, behind }
    }

    pub fn d_alpha(&self) -> f64 {
        self.behind.alpha - self.ahead.alpha
    }

    pub fn d_beta(&self) -> f64 {
        self.behind.beta - self.ahead.beta
    }

    pub fn reversed(&self) -> Self {
        Self::new(self.behind, self.ahead)
    }
}

/// Jumps [T^tt], [T^tr], [T^rr].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct StressJumps {
    pub tt: f64,
    pub tr: f64,
    pub rr: f64,
}

/// Path samples of a jump: quadrature weights folded into a and b.
struct PathSamples {
    a: [f64; 8],
    b: [f64; 8],
    cp: [f64; 8],
    cm: [f64; 8],
}

impl PathSamples {
    fn new(eos: &BarotropicEos, ahead: RiemannPair, d_alpha: f64, d_beta: f64) -> Result<Self> {
        let mut out = Self {
            a: [0.0; 8],
            b: [0.0; 8],
            cp: [0.0; 8],
            cm: [0.0; 8],
        };
        for (k, (s, w)) in gauss8_unit().into_iter().enumerate() {
            let st = PointState::new(eos, ahead.offset(s * d_alpha, s * d_beta))?;
            let (da, db) = st.dtt();
            out.a[k] = w * da * d_alpha;
            out.b[k] = w * db * d_beta;
            out.cp[k] = st.c_plus;
            out.cm[k] = st.c_minus;
        }
        Ok(out)
    }

    fn jumps(&self) -> StressJumps {
        let mut j = StressJumps {
            tt: 0.0,
            tr: 0.0,
            rr: 0.0,
        };
        for k in 0..8 {
            j.tt += self.a[k] + self.b[k];
            j.tr += self.cp[k] * self.a[k] + self.cm[k] * self.b[k];
            j.rr += self.cp[k] * self.cp[k] * self.a[k] + self.cm[k] * self.cm[k] * self.b[k];
        }
        j
    }

    fn big_j(&self) -> f64 {
        let mut aa = 0.0;
        let mut ab = 0.0;
        let mut bb = 0.0;
        for k in 0..8 {
            for l in 0..8 {
                if l < k {
                    aa += self.a[k] * self.a[l] * (self.cp[k] - self.cp[l]).powi(2);
                    bb += self.b[k] * self.b[l] * (self.cm[k] - self.cm[l]).powi(2);
                }
                ab += self.a[k] * self.b[l] * (self.cp[k] - self.cm[l]).powi(2);
            }
        }
        aa + ab + bb
    }

    /// [T^rr] − 2c[T^tr] + c²[T^tt] for a given speed c.
    fn quadratic_form(&self, c: f64) -> f64 {
        (0..8)
            .map(|k| (self.cp[k] - c).powi(2) * self.a[k] + (self.cm[k] - c).powi(2) * self.b[k])
            .sum()
    }
}

/// Scale (Gψ_t²(1 − v²))² of J at a state; equals (ρ + p)².
pub fn jump_scale(eos: &BarotropicEos, state: RiemannPair) -> Result<f64> {
    let s = PointState::new(eos, state)?;
    Ok((s.weight * s.one_minus_v2()).powi(2))
}

/// Leading coefficient G₀ = −μ²/(192η²) of the cubic law [β] ≈ G₀[α]³.
pub fn cubic_coefficient(eos: &BarotropicEos, state: RiemannPair) -> Result<f64> {
    let th = eos.thermo(state.rho_tilde())?;
    Ok(-th.mu().powi(2) / (192.0 * th.eta * th.eta))
}

/// Stress jumps for an ahead state and increments (Δα, Δβ).
pub fn stress_jumps(
    eos: &BarotropicEos,
    ahead: RiemannPair,
    d_alpha: f64,
    d_beta: f64,
) -> Result<StressJumps> {
    Ok(PathSamples::new(eos, ahead, d_alpha, d_beta)?.jumps())
}

/// J for an ahead state and increments (Δα, Δβ).
pub fn jump_function(
    eos: &BarotropicEos,
    ahead: RiemannPair,
    d_alpha: f64,
    d_beta: f64,
) -> Result<f64> {
    Ok(PathSamples::new(eos, ahead, d_alpha, d_beta)?.big_j())
}

/// J = [T^tt][T^rr] − [T^tr]².
#[allow(non_snake_case)]
pub fn jump_J(eos: &BarotropicEos, jp: JumpPair) -> Result<f64> {
    PointState::new(eos, jp.behind)?;
    jump_function(eos, jp.ahead, jp.d_alpha(), jp.d_beta())
}

/// Largest |Δα| accepted by the root solve.
pub const MAX_JUMP: f64 = 0.5;

/// The increment [β] on the branch of J = 0 through the coincidence point.
pub fn solve_jump_increment(eos: &BarotropicEos, ahead: RiemannPair, d_alpha: f64) -> Result<f64> {
    if d_alpha == 0.0 {
        return Ok(0.0);
    }
    if !(d_alpha.abs() <= MAX_JUMP) {
        return Err(Error::NoRoot(format!(
            "|d_alpha| = {} exceeds the cap {MAX_JUMP}",
            d_alpha.abs()
        )));
    }
    let scale = jump_scale(eos, ahead)?;
    let seed = cubic_coefficient(eos, ahead)? * d_alpha.powi(3);
    let behind_of = |x: f64| ahead.offset(d_alpha, x);
    let eval = |x: f64| -> Result<(f64, f64)> {
        let samples = PathSamples::new(eos, ahead, d_alpha, x)?;
        let behind = PointState::new(eos, behind_of(x))?;
        let slope = behind.dtt().1 * samples.quadratic_form(behind.c_minus);
        Ok((samples.big_j(), slope))
    };

    let mut half = 8.0 * seed.abs() + 1e-3 * d_alpha.abs().powi(3) + f64::MIN_POSITIVE;
    let mut bracket = None;
    for _ in 0..5 {
        let (lo, hi) = (seed - half, seed + half);
        let (jl, jh) = (eval(lo)?.0, eval(hi)?.0);
        if jl == 0.0 {
            return Ok(lo);
        }
        if jh == 0.0 {
            return Ok(hi);
        }
        if jl.signum() != jh.signum() {
            bracket = Some((lo, hi, jl.signum()));
            break;
        }
        half *= 2.0;
    }
    let (mut lo, mut hi, sign_lo) = bracket
        .ok_or_else(|| Error::NoRoot(format!("no sign change of J around [beta] = {seed:e}")))?;

    let mut x = seed;
    let mut history = Vec::new();
    for _ in 0..100 {
        let (j, slope) = eval(x)?;
        history.push(j.abs() / scale);
        if j == 0.0 {
            return Ok(x);
        }
        if j.signum() == sign_lo {
            lo = x;
        } else {
            hi = x;
        }
        let mut next = x - j / slope;
        let (a, b) = if lo < hi { (lo, hi) } else { (hi, lo) };
        if !(next > a && next < b) {
            next = 0.5 * (lo + hi);
        }
        let step = (next - x).abs();
        x = next;
        if step <= 4.0 * f64::EPSILON * x.abs() || (hi - lo).abs() <= 4.0 * f64::EPSILON * x.abs() {
            let j = eval(x)?.0;
            if j.abs() <= 1e-13 * scale {
                return Ok(x);
            }
        }
    }
    Err(Error::NonConvergence {
        what: "jump root solve",
        iterations: 100,
        last_ratio: history.last().copied().unwrap_or(f64::NAN),
        history,
    })
}

/// β₊ solving J = 0 given α₊ and the ahead state.
pub fn solve_jump_beta(eos: &BarotropicEos, alpha_plus: f64, ahead: RiemannPair) -> Result<f64> {
    let d_alpha = alpha_plus - ahead.alpha;
    Ok(ahead.beta + solve_jump_increment(eos, ahead, d_alpha)?)
}

/// Shock speed V = [T^tr]/[T^tt].
pub fn shock_speed(eos: &BarotropicEos, jp: JumpPair) -> Result<f64> {
    let tt_ahead = PointState::new(eos, jp.ahead)?.stress().tt;
    PointState::new(eos, jp.behind)?;
    let j = stress_jumps(eos, jp.ahead, jp.d_alpha(), jp.d_beta())?;
    if !(j.tt.abs() > 1e-12 * tt_ahead.abs()) {
        return Err(Error::DegenerateJump);
    }
    Ok(j.tr / j.tt)
}

/// V − c₊(base) for a jump whose ahead state is given as an offset from `base`.
///
/// The speed differences c₊(s) − c₊(base) along the jump segment are
/// integrated from `base`, so the result keeps its relative accuracy when
/// V − c₊(base) is much smaller than V.
pub fn speed_offset(
    eos: &BarotropicEos,
    base: RiemannPair,
    ahead_offset: (f64, f64),
    d_alpha: f64,
    d_beta: f64,
) -> Result<f64> {
    let ahead = base.offset(ahead_offset.0, ahead_offset.1);
    let base_state = PointState::new(eos, base)?;
    let tt_ahead = PointState::new(eos, ahead)?.stress().tt;
    let rule = gauss8_unit();
    let mut num = 0.0;
    let mut den = 0.0;
    for &(s, w) in &rule {
        let oa = ahead_offset.0 + s * d_alpha;
        let ob = ahead_offset.1 + s * d_beta;
        let st = PointState::new(eos, base.offset(oa, ob))?;
        let mut dcp = 0.0;
        for &(q, wq) in &rule {
            let inner = PointState::new(eos, base.offset(q * oa, q * ob))?;
            let (ga, gb) = inner.dc_plus();
            dcp += wq * (ga * oa + gb * ob);
        }
        let (da, db) = st.dtt();
        let a = w * da * d_alpha;
        let b = w * db * d_beta;
        num += dcp * a + (st.c_minus - base_state.c_plus) * b;
        den += a + b;
    }
    if !(den.abs() > 1e-12 * tt_ahead.abs()) {
        return Err(Error::DegenerateJump);
    }
    Ok(num / den)
}

/// Determinism margins of a jump.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DeterminismMargin {
    /// ησ/√(1 − η²) behind minus ahead; positive when the determinism
    /// condition holds in its thermodynamic form.
    pub thermodynamic: f64,
    /// min(V − c₊(ahead), c₊(behind) − V); zero for coincident states.
    pub geometric: f64,
}

pub fn determinism_margin(eos: &BarotropicEos, jp: JumpPair) -> Result<DeterminismMargin> {
    let a = PointState::new(eos, jp.ahead)?;
    let b = PointState::new(eos, jp.behind)?;
    let m = |s: &PointState| {
        let e = s.eta();
        e * s.thermo.sigma / (1.0 - e * e).sqrt()
    };
    let geometric = match shock_speed(eos, jp) {
        Ok(v) => (v - a.c_plus).min(b.c_plus - v),
        Err(Error::DegenerateJump) => 0.0,
        Err(e) => return Err(e),
    };
    Ok(DeterminismMargin {
        thermodynamic: m(&b) - m(&a),
        geometric,
    })
}

/// q = (1/η² − 1)/σ² at a state; the determinism condition reads [q] < 0.
pub fn determinism_q(eos: &BarotropicEos, state: RiemannPair) -> Result<f64> {
    let th = eos.thermo(state.rho_tilde())?;
    Ok((1.0 / (th.eta * th.eta) - 1.0) / (th.sigma * th.sigma))
}

/// h₊² − h₋² − (p₊ − p₋)(h₊/σ₊ + h₋/σ₋).
pub fn hugoniot_residual(eos: &BarotropicEos, jp: JumpPair) -> Result<f64> {
    let a = eos.thermo(jp.ahead.rho_tilde())?;
    let b = eos.thermo(jp.behind.rho_tilde())?;
    Ok(b.h * b.h - a.h * a.h - (b.p - a.p) * (b.h / b.sigma + a.h / a.sigma))
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn coincident_states() {
        let eos = BarotropicEos::radiation();
        let s = RiemannPair::new(0.05, -0.02);
        let jp = JumpPair::new(s, s);
        assert_eq!(jump_J(&eos, jp).unwrap(), 0.0);
        assert_eq!(solve_jump_beta(&eos, s.alpha, s).unwrap(), s.beta);
        assert!(matches!(shock_speed(&eos, jp), Err(Error::DegenerateJump)));
        let m = determinism_margin(&eos, jp).unwrap();
        assert_eq!((m.thermodynamic, m.geometric), (0.0, 0.0));
        assert_eq!(hugoniot_residual(&eos, jp).unwrap(), 0.0);
    }

    #[test]
    fn canonical_cubic_coefficient() {
        let eos = BarotropicEos::radiation();
        let g0 = cubic_coefficient(&eos, RiemannPair::new(0.0, 0.0)).unwrap();
        assert!((g0 + 1.0 / 144.0).abs() < 1e-15);
    }

    #[test]
    fn oversized_jump_is_rejected() {
        let eos = BarotropicEos::radiation();
        assert!(matches!(
            solve_jump_increment(&eos, RiemannPair::new(0.0, 0.0), 0.9),
            Err(Error::NoRoot(_))
        ));
    }
}
