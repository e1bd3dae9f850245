//! Characteristic solver on the triangle T_ε = {0 ≤ v ≤ u ≤ ε} for given
//! shock boundary data.
//!
//! Unknowns are t, r, α, β on the nodes (u_i, v_j) = (iΔ, jΔ), j ≤ i. The
//! diagonal j = i is the shock and the edge j = 0 the incoming characteristic
//! from the cusp. Each inner step freezes (α, β), solves the linear problem
//! for t through its two Volterra integral forms, recovers r from the
//! hodograph equations, and updates (α, β) from the characteristic equations.
//! The linear problem for t uses the trapezoid rule; the hodograph integrals
//! for r use the local cubic rule of [`cumulative_quadrature`].
//!
//! Quantities that vanish at the cusp are carried as offsets so that they
//! keep full relative precision: α − α₀, β − β₀ and r − r₀ − c₊₀ t.

use serde::Serialize;

use crate::eos::BarotropicEos;
use crate::error::{Error, Result};
use crate::state::{PointState, RiemannPair};
use crate::state_ahead::{CuspData, InitialData};

/// Uniform characteristic grid on T_ε.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct TriGrid {
    pub eps: f64,
    pub n: usize,
    pub delta: f64,
}

impl TriGrid {
    pub fn new(eps: f64, n: usize) -> Result<Self> {
        if !(eps > 0.0 && eps.is_finite()) {
            return Err(Error::Config(format!("eps must be positive, got {eps}")));
        }
        if n < 2 {
            return Err(Error::Config(format!("grid needs n >= 2, got {n}")));
        }
        Ok(Self {
            eps,
            n,
            delta: eps / n as f64,
        })
    }

    /// Number of nodes.
    pub fn len(&self) -> usize {
        (self.n + 1) * (self.n + 2) / 2
    }

    pub fn is_empty(&self) -> bool {
        false
    }

    /// Storage index of node (i, j), j ≤ i. Columns of constant u are contiguous.
    #[inline]
    pub fn idx(&self, i: usize, j: usize) -> usize {
        debug_assert!(j <= i && i <= self.n);
        i * (i + 1) / 2 + j
    }

    #[inline]
    pub fn coord(&self, k: usize) -> f64 {
        if k == self.n {
            self.eps
        } else {
            k as f64 * self.delta
        }
    }

    /// All nodes in storage order.
    pub fn nodes(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..=self.n).flat_map(|i| (0..=i).map(move |j| (i, j)))
    }
}

/// Hatted shock boundary data (y, β̂₊, V̂) sampled at v_j = jΔ:
/// z = vy, β₊ = β₀ + v²β̂₊, V = c₊₀ + (κ/2)(1 + y)v + v²V̂.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BoundaryFunctions {
    pub v: Vec<f64>,
    pub y: Vec<f64>,
    pub beta_hat_plus: Vec<f64>,
    pub v_hat: Vec<f64>,
}

impl BoundaryFunctions {
    /// y ≡ −1, β̂₊ ≡ (λ/6κ²)(∂β*/∂t)₀, V̂ ≡ 0.
    pub fn seed(grid: &TriGrid, cusp: &CuspData) -> Self {
        let m = grid.n + 1;
        Self {
            v: (0..m).map(|j| grid.coord(j)).collect(),
            y: vec![-1.0; m],
            beta_hat_plus: vec![cusp.f_hat0() * cusp.dbeta_dt0; m],
            v_hat: vec![0.0; m],
        }
    }

    /// V − c₊₀ at node j.
    pub fn speed_offset(&self, cusp: &CuspData, j: usize) -> f64 {
        let v = self.v[j];
        0.5 * cusp.kappa * (1.0 + self.y[j]) * v + v * v * self.v_hat[j]
    }

    /// β₊ − β₀ at node j.
    pub fn beta_plus_offset(&self, j: usize) -> f64 {
        self.v[j] * self.v[j] * self.beta_hat_plus[j]
    }

    /// z = vy at node j.
    pub fn z(&self, j: usize) -> f64 {
        self.v[j] * self.y[j]
    }
}

/// 1/γ = (V − c̄₋)/(c̄₊ − V) on the shock.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum GammaInverse {
    /// Below the floor v_floor: only the scaled limit v/γ is meaningful and the
    /// boundary value of ∂t/∂v is zero.
    Corner {
        scaled: f64,
    },
    Regular(f64),
}

/// 1/γ(v) from the state behind the shock and the shock speed.
pub fn gamma_inverse(
    eos: &BarotropicEos,
    cusp: &CuspData,
    behind: RiemannPair,
    speed_offset: f64,
    v: f64,
    v_floor: f64,
) -> Result<GammaInverse> {
    if v < v_floor {
        return Ok(GammaInverse::Corner {
            scaled: (cusp.c_plus0 - cusp.c_minus0) / cusp.kappa,
        });
    }
    let st = PointState::new(eos, behind)?;
    let margin = (st.c_plus - cusp.c_plus0) - speed_offset;
    if !(margin > 0.0) {
        return Err(Error::SingularGamma { v, margin });
    }
    let below = (cusp.c_plus0 - st.c_minus) + speed_offset;
    Ok(GammaInverse::Regular(below / margin))
}

/// Coefficients μ = ∂_u c₊/(c₊ − c₋) and ν = ∂_v c₋/(c₊ − c₋) on the grid.
#[derive(Debug, Clone)]
pub struct LinearCoefficients {
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
}

/// Derivative grids of t and the reconstructed t.
#[derive(Debug, Clone)]
pub struct LinearSolution {
    pub t: Vec<f64>,
    pub dt_du: Vec<f64>,
    pub dt_dv: Vec<f64>,
}

/// Solve the linear problem for t by marching the trapezoid discretisation of
///
/// ∂t/∂u = e^{−K}(h′(u) − ∫₀^v e^{K} μ ∂t/∂v dv′),  K = −∫₀^v ν dv′,
/// ∂t/∂v = e^{−L}(a(v) + ∫_v^u e^{L} ν ∂t/∂u du′),  L = ∫_v^u μ du′,
///
/// with a(v) = b(v)/γ(v), b(v) = ∂t/∂u(v, v), and a = 0 at the corner.
/// Columns are visited in increasing u and nodes in increasing v, so every
/// integral is known up to its own endpoint, whose trapezoid weight is
/// treated implicitly. This is the exact solution of the discrete
/// fixed-point equations.
pub fn solve_linear_t(
    coeffs: &LinearCoefficients,
    gamma: &[GammaInverse],
    init: &InitialData,
    grid: &TriGrid,
) -> Result<LinearSolution> {
    let n = grid.n;
    let d = grid.delta;
    let hd = 0.5 * d;
    let (mu, nu) = (&coeffs.mu, &coeffs.nu);
    let len = grid.len();

    // K along columns, L along rows.
    let mut k_exp = vec![1.0; len];
    for i in 0..=n {
        let mut k = 0.0;
        for j in 1..=i {
            k -= hd * (nu[grid.idx(i, j - 1)] + nu[grid.idx(i, j)]);
            k_exp[grid.idx(i, j)] = k.exp();
        }
    }
    let mut l_exp = vec![1.0; len];
    for j in 0..=n {
        let mut l = 0.0;
        for i in j + 1..=n {
            l += hd * (mu[grid.idx(i - 1, j)] + mu[grid.idx(i, j)]);
            l_exp[grid.idx(i, j)] = l.exp();
        }
    }

    let mut tu = vec![0.0; len];
    let mut tv = vec![0.0; len];
    let mut a = vec![0.0; n + 1];
    // Open trapezoid sums along each row, excluding the next node's half weight.
    let mut row_open = vec![0.0; n + 1];

    for i in 0..=n {
        let hp = init.h_prime[i];
        let mut col_open = 0.0;
        for j in 0..=i {
            let id = grid.idx(i, j);
            let (ek, el) = (k_exp[id], l_exp[id]);
            let p = hd * mu[id];
            let q = hd * nu[id];
            if j == i {
                // Shock node: tv = a = g b, b = tu = X − p a.
                let x = if j == 0 { hp } else { (hp - col_open) / ek };
                match gamma[j] {
                    GammaInverse::Corner { .. } => {
                        tu[id] = x;
                        a[j] = 0.0;
                    }
                    GammaInverse::Regular(g) => {
                        let b = x / (1.0 + p * g);
                        tu[id] = b;
                        a[j] = g * b;
                    }
                }
                tv[id] = a[j];
            } else if j == 0 {
                tu[id] = hp;
                tv[id] = (a[0] + row_open[0]) / el + q * tu[id];
            } else {
                let x = (hp - col_open) / ek;
                let y = (a[j] + row_open[j]) / el;
                tu[id] = (x - p * y) / (1.0 + p * q);
                tv[id] = y + q * tu[id];
            }
            // Advance the column sum of e^K μ tv and the row sum of e^L ν tu.
            let pk = ek * mu[id] * tv[id];
            col_open += if j == 0 { hd * pk } else { d * pk };
            let ql = el * nu[id] * tu[id];
            row_open[j] += if i == j { hd * ql } else { d * ql };
        }
    }

    let mut t = vec![0.0; len];
    for i in 0..=n {
        let mut acc = init.h[i];
        t[grid.idx(i, 0)] = acc;
        for j in 1..=i {
            acc += hd * (tv[grid.idx(i, j - 1)] + tv[grid.idx(i, j)]);
            t[grid.idx(i, j)] = acc;
        }
    }
    Ok(LinearSolution {
        t,
        dt_du: tu,
        dt_dv: tv,
    })
}

/// Solver controls for the inner iteration.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct InnerOptions {
    pub tol_inner: f64,
    pub max_inner: usize,
    pub v_floor: f64,
}

/// All fields on the grid at the inner fixed point.
#[derive(Debug, Clone)]
pub struct FieldGrid {
    pub grid: TriGrid,
    pub t: Vec<f64>,
    pub r: Vec<f64>,
    pub alpha: Vec<f64>,
    pub beta: Vec<f64>,
    pub dt_du: Vec<f64>,
    pub dt_dv: Vec<f64>,
    /// r − r₀ − c₊₀ t.
    pub r_reduced: Vec<f64>,
    /// α − α₀.
    pub alpha_offset: Vec<f64>,
    /// β − β₀.
    pub beta_offset: Vec<f64>,
    pub mu: Vec<f64>,
    pub nu: Vec<f64>,
}

impl FieldGrid {
    pub fn at(&self, field: &[f64], i: usize, j: usize) -> f64 {
        field[self.grid.idx(i, j)]
    }

    /// CSV with columns i, j, u, v, t, r, alpha, beta, dt_du, dt_dv.
    pub fn to_csv(&self) -> String {
        let mut out = String::from("i,j,u,v,t,r,alpha,beta,dt_du,dt_dv\n");
        for (i, j) in self.grid.nodes() {
            let k = self.grid.idx(i, j);
            out.push_str(&format!(
                "{i},{j},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e},{:.16e}\n",
                self.grid.coord(i),
                self.grid.coord(j),
                self.t[k],
                self.r[k],
                self.alpha[k],
                self.beta[k],
                self.dt_du[k],
                self.dt_dv[k]
            ));
        }
        out
    }
}

/// Result of one inner solve.
#[derive(Debug, Clone)]
pub struct FixedBvpSolution {
    pub field: FieldGrid,
    /// Sup-norm change of (α, β) per inner iteration.
    pub history: Vec<f64>,
    /// Observed contraction ratio of the inner iteration.
    pub contraction: f64,
}

/// Derivative of equally spaced samples; `None` when fewer than two samples.
fn diff_1d(values: &[f64], d: f64, out: &mut [f64]) {
    let m = values.len();
    match m {
        0 | 1 => {}
        2 => {
            let s = (values[1] - values[0]) / d;
            out[0] = s;
            out[1] = s;
        }
        _ => {
            out[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * d);
            for k in 1..m - 1 {
                out[k] = (values[k + 1] - values[k - 1]) / (2.0 * d);
            }
            out[m - 1] = (3.0 * values[m - 1] - 4.0 * values[m - 2] + values[m - 3]) / (2.0 * d);
        }
    }
}

/// ∂α/∂u from the α grid. Diagonal nodes use d α₊/dv = ∂α/∂u + ∂α/∂v with the
/// known ∂α/∂v; rows with two nodes use a derivative-assisted one-sided rule.
fn alpha_u(grid: &TriGrid, alpha: &[f64], alpha_v: &[f64]) -> Vec<f64> {
    let n = grid.n;
    let d = grid.delta;
    let diag: Vec<f64> = (0..=n).map(|j| alpha[grid.idx(j, j)]).collect();
    let mut ddiag = vec![0.0; n + 1];
    diff_1d(&diag, d, &mut ddiag);
    let mut out = vec![0.0; grid.len()];
    for j in 0..=n {
        let dj = grid.idx(j, j);
        out[dj] = ddiag[j] - alpha_v[dj];
        for i in j + 1..=n {
            let id = grid.idx(i, j);
            out[id] = if i < n {
                (alpha[grid.idx(i + 1, j)] - alpha[grid.idx(i - 1, j)]) / (2.0 * d)
            } else if n - 2 >= j {
                (3.0 * alpha[id] - 4.0 * alpha[grid.idx(n - 1, j)] + alpha[grid.idx(n - 2, j)])
                    / (2.0 * d)
            } else {
                2.0 * (alpha[id] - alpha[dj]) / d - out[dj]
            };
        }
    }
    out
}

/// ∂β/∂v from the β grid, with the analogous diagonal identity.
fn beta_v(grid: &TriGrid, beta: &[f64], beta_u: &[f64]) -> Vec<f64> {
    let n = grid.n;
    let d = grid.delta;
    let diag: Vec<f64> = (0..=n).map(|j| beta[grid.idx(j, j)]).collect();
    let mut ddiag = vec![0.0; n + 1];
    diff_1d(&diag, d, &mut ddiag);
    let mut out = vec![0.0; grid.len()];
    for i in 0..=n {
        let di = grid.idx(i, i);
        out[di] = ddiag[i] - beta_u[di];
        for j in 0..i {
            let id = grid.idx(i, j);
            out[id] = if j > 0 {
                (beta[grid.idx(i, j + 1)] - beta[grid.idx(i, j - 1)]) / (2.0 * d)
            } else if i >= 2 {
                (-3.0 * beta[id] + 4.0 * beta[grid.idx(i, 1)] - beta[grid.idx(i, 2)]) / (2.0 * d)
            } else {
                2.0 * (beta[di] - beta[id]) / d - out[di]
            };
        }
    }
    out
}

/// Running integrals ∫₀^{x_k} g of equally spaced samples, using local cubic
/// interpolation on each interval (trapezoid or quadratic when fewer samples
/// exist). The radius is recovered with this rule because the diagonal value
/// g − c₊₀f is a small remainder of O(v³) integrals, and the trapezoid error
/// would dominate it near the corner.
pub fn cumulative_quadrature(g: &[f64], d: f64) -> Vec<f64> {
    let m = g.len();
    let mut out = vec![0.0; m];
    for k in 0..m.saturating_sub(1) {
        let piece = match m {
            2 => 0.5 * (g[0] + g[1]),
            3 => {
                if k == 0 {
                    (5.0 * g[0] + 8.0 * g[1] - g[2]) / 12.0
                } else {
                    (-g[0] + 8.0 * g[1] + 5.0 * g[2]) / 12.0
                }
            }
            _ => {
                if k == 0 {
                    (9.0 * g[0] + 19.0 * g[1] - 5.0 * g[2] + g[3]) / 24.0
                } else if k + 2 == m {
                    (g[k - 2] - 5.0 * g[k - 1] + 19.0 * g[k] + 9.0 * g[k + 1]) / 24.0
                } else {
                    (-g[k - 1] + 13.0 * g[k] + 13.0 * g[k + 1] - g[k + 2]) / 24.0
                }
            }
        };
        out[k + 1] = out[k] + d * piece;
    }
    out
}

/// Everything the inner solver needs besides the boundary functions.
#[derive(Debug, Clone, Copy)]
pub struct InnerProblem<'a> {
    pub eos: &'a BarotropicEos,
    pub cusp: &'a CuspData,
    pub init: &'a InitialData,
    pub grid: &'a TriGrid,
    pub options: InnerOptions,
}

/// Geometric-mean contraction ratio over the part of a change history that
/// lies above the given noise floor.
pub fn observed_ratio(history: &[f64], floor: f64) -> f64 {
    let clean: Vec<f64> = history.iter().copied().take_while(|&d| d > floor).collect();
    if clean.len() < 2 {
        return match history {
            [a, b, ..] if *a > 0.0 => b / a,
            _ => 0.0,
        };
    }
    let m = clean.len() - 1;
    (clean[m] / clean[0]).powf(1.0 / m as f64)
}

/// Solve the fixed boundary problem for the given shock data.
pub fn solve_fixed_bvp(bf: &BoundaryFunctions, problem: &InnerProblem) -> Result<FixedBvpSolution> {
    let InnerProblem {
        eos,
        cusp,
        init,
        grid,
        options,
    } = *problem;
    let n = grid.n;
    let d = grid.delta;
    let hd = 0.5 * d;
    let len = grid.len();
    let base = cusp.base();

    let beta_plus: Vec<f64> = (0..=n).map(|j| bf.beta_plus_offset(j)).collect();
    let speed: Vec<f64> = (0..=n).map(|j| bf.speed_offset(cusp, j)).collect();

    // Seed: α = α_i(u), β = β₊(v).
    let mut a_off = vec![0.0; len];
    let mut b_off = vec![0.0; len];
    for (i, j) in grid.nodes() {
        let id = grid.idx(i, j);
        a_off[id] = init.alpha_offset[i];
        b_off[id] = beta_plus[j];
    }
    // Exact ∂α/∂v and ∂β/∂u of the current iterate.
    let mut a_src = vec![0.0; len];
    let mut b_src = vec![0.0; len];

    let mut history = Vec::new();
    let mut first_change = None;
    let mut states = Vec::with_capacity(len);
    for _ in 0..options.max_inner {
        states.clear();
        for k in 0..len {
            states.push(PointState::new(eos, base.offset(a_off[k], b_off[k]))?);
        }
        let au = alpha_u(grid, &a_off, &a_src);
        let bv = beta_v(grid, &b_off, &b_src);
        let mut coeffs = LinearCoefficients {
            mu: vec![0.0; len],
            nu: vec![0.0; len],
        };
        for k in 0..len {
            let s = &states[k];
            let gap = s.c_plus - s.c_minus;
            let (pa, pb) = s.dc_plus();
            let (ma, mb) = s.dc_minus();
            coeffs.mu[k] = (pa * au[k] + pb * b_src[k]) / gap;
            coeffs.nu[k] = (ma * a_src[k] + mb * bv[k]) / gap;
        }
        let mut gamma = Vec::with_capacity(n + 1);
        for j in 0..=n {
            let id = grid.idx(j, j);
            gamma.push(gamma_inverse(
                eos,
                cusp,
                base.offset(a_off[id], b_off[id]),
                speed[j],
                grid.coord(j),
                options.v_floor,
            )?);
        }
        let lin = solve_linear_t(&coeffs, &gamma, init, grid)?;

        // r − r₀ − c₊₀t from the hodograph equations.
        let edge_integrand: Vec<f64> = (0..=n)
            .map(|i| {
                let id = grid.idx(i, 0);
                (states[id].c_minus - cusp.c_plus0) * lin.dt_du[id]
            })
            .collect();
        let edge = cumulative_quadrature(&edge_integrand, d);
        let mut rr = vec![0.0; len];
        let mut column = Vec::with_capacity(n + 1);
        for i in 0..=n {
            column.clear();
            column.extend((0..=i).map(|j| {
                let id = grid.idx(i, j);
                (states[id].c_plus - cusp.c_plus0) * lin.dt_dv[id]
            }));
            for (j, q) in cumulative_quadrature(&column, d).into_iter().enumerate() {
                rr[grid.idx(i, j)] = edge[i] + q;
            }
        }

        // Sources and the updated invariants.
        let mut new_a = vec![0.0; len];
        let mut new_b = vec![0.0; len];
        for k in 0..len {
            let r = cusp.r0 + cusp.c_plus0 * lin.t[k] + rr[k];
            let (sa, sb) = states[k].source_terms(r)?;
            a_src[k] = lin.dt_dv[k] * sa;
            b_src[k] = lin.dt_du[k] * sb;
        }
        for i in 0..=n {
            let mut acc = init.alpha_offset[i];
            new_a[grid.idx(i, 0)] = acc;
            for j in 1..=i {
                acc += hd * (a_src[grid.idx(i, j - 1)] + a_src[grid.idx(i, j)]);
                new_a[grid.idx(i, j)] = acc;
            }
        }
        for j in 0..=n {
            let mut acc = beta_plus[j];
            new_b[grid.idx(j, j)] = acc;
            for i in j + 1..=n {
                acc += hd * (b_src[grid.idx(i - 1, j)] + b_src[grid.idx(i, j)]);
                new_b[grid.idx(i, j)] = acc;
            }
        }
        let mut change: f64 = 0.0;
        let mut size: f64 = 0.0;
        for k in 0..len {
            change = change
                .max((new_a[k] - a_off[k]).abs())
                .max((new_b[k] - b_off[k]).abs());
            size = size.max(new_a[k].abs()).max(new_b[k].abs());
        }
        history.push(change);
        a_off = new_a;
        b_off = new_b;
        let first = *first_change.get_or_insert(change);
        let floor = 64.0 * f64::EPSILON * size;
        if change <= floor || change <= options.tol_inner * first {
            let field = assemble(grid, cusp, &a_off, &b_off, lin, rr, coeffs);
            let contraction = observed_ratio(&history, 1e3 * floor);
            return Ok(FixedBvpSolution {
                field,
                history,
                contraction,
            });
        }
    }
    let last_ratio = match history.as_slice() {
        [.., a, b] if *a > 0.0 => b / a,
        _ => f64::NAN,
    };
    Err(Error::NonConvergence {
        what: "inner iteration",
        iterations: options.max_inner,
        last_ratio,
        history,
    })
}

/// (i, j) of storage index k.
#[cfg(test)]
fn node_of(k: usize) -> (usize, usize) {
    let mut i = (((8 * k + 1) as f64).sqrt() as usize).saturating_sub(1) / 2;
    while (i + 1) * (i + 2) / 2 <= k {
        i += 1;
    }
    while i * (i + 1) / 2 > k {
        i -= 1;
    }
    (i, k - i * (i + 1) / 2)
}

fn assemble(
    grid: &TriGrid,
    cusp: &CuspData,
    a_off: &[f64],
    b_off: &[f64],
    lin: LinearSolution,
    rr: Vec<f64>,
    coeffs: LinearCoefficients,
) -> FieldGrid {
    let r = lin
        .t
        .iter()
        .zip(&rr)
        .map(|(t, q)| cusp.r0 + cusp.c_plus0 * t + q)
        .collect();
    FieldGrid {
        grid: *grid,
        r,
        alpha: a_off.iter().map(|x| cusp.alpha0 + x).collect(),
        beta: b_off.iter().map(|x| cusp.beta0 + x).collect(),
        t: lin.t,
        dt_du: lin.dt_du,
        dt_dv: lin.dt_dv,
        r_reduced: rr,
        alpha_offset: a_off.to_vec(),
        beta_offset: b_off.to_vec(),
        mu: coeffs.mu,
        nu: coeffs.nu,
    }
}

/// Maxima of the centred-difference residuals of the characteristic and
/// hodograph equations on grid edges.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct CharacteristicResiduals {
    /// ∂α/∂v − Ã ∂t/∂v on edges of constant u.
    pub alpha: f64,
    /// ∂β/∂u − B̃ ∂t/∂u on edges of constant v.
    pub beta: f64,
    /// ∂r/∂v − c₊ ∂t/∂v on edges of constant u.
    pub hodograph_v: f64,
    /// ∂r/∂u − c₋ ∂t/∂u on edges of constant v.
    pub hodograph_u: f64,
}

impl CharacteristicResiduals {
    pub fn max(&self) -> f64 {
        self.alpha
            .max(self.beta)
            .max(self.hodograph_v)
            .max(self.hodograph_u)
    }
}

pub fn characteristic_residuals(
    field: &FieldGrid,
    eos: &BarotropicEos,
    cusp: &CuspData,
) -> Result<CharacteristicResiduals> {
    let g = &field.grid;
    let d = g.delta;
    let base = cusp.base();
    let mut states = Vec::with_capacity(g.len());
    for k in 0..g.len() {
        let s = PointState::new(
            eos,
            base.offset(field.alpha_offset[k], field.beta_offset[k]),
        )?;
        let (a, b) = s.source_terms(field.r[k])?;
        states.push((s.c_plus, s.c_minus, a, b));
    }
    let mut res = CharacteristicResiduals {
        alpha: 0.0,
        beta: 0.0,
        hodograph_v: 0.0,
        hodograph_u: 0.0,
    };
    let edge = |k0: usize, k1: usize| {
        let dt = (field.t[k1] - field.t[k0]) / d;
        let dr = (field.r_reduced[k1] - field.r_reduced[k0]) / d + cusp.c_plus0 * dt;
        let da = (field.alpha_offset[k1] - field.alpha_offset[k0]) / d;
        let db = (field.beta_offset[k1] - field.beta_offset[k0]) / d;
        let avg = |f: fn(&(f64, f64, f64, f64)) -> f64| 0.5 * (f(&states[k0]) + f(&states[k1]));
        (
            dt,
            dr,
            da,
            db,
            avg(|s| s.0),
            avg(|s| s.1),
            avg(|s| s.2),
            avg(|s| s.3),
        )
    };
    for (i, j) in g.nodes() {
        if j < i {
            let (dt, dr, da, _, cp, _, sa, _) = edge(g.idx(i, j), g.idx(i, j + 1));
            res.alpha = res.alpha.max((da - sa * dt).abs());
            res.hodograph_v = res.hodograph_v.max((dr - cp * dt).abs());
        }
        if i < g.n {
            let (dt, dr, _, db, _, cm, _, sb) = edge(g.idx(i, j), g.idx(i + 1, j));
            res.beta = res.beta.max((db - sb * dt).abs());
            res.hodograph_u = res.hodograph_u.max((dr - cm * dt).abs());
        }
    }
    Ok(res)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn node_indexing_round_trips() {
        let g = TriGrid::new(1.0, 9).unwrap();
        for (k, (i, j)) in g.nodes().enumerate() {
            assert_eq!(g.idx(i, j), k);
            assert_eq!(node_of(k), (i, j));
        }
        assert_eq!(g.len(), 55);
    }

    #[test]
    fn observed_ratio_of_geometric_sequence() {
        let h: Vec<f64> = (0..10).map(|k| 0.1f64.powi(k)).collect();
        assert!((observed_ratio(&h, 1e-20) - 0.1).abs() < 1e-12);
    }

    #[test]
    fn diff_is_exact_on_quadratics() {
        let v: Vec<f64> = (0..6).map(|k| (k as f64 * 0.5).powi(2)).collect();
        let mut out = vec![0.0; 6];
        diff_1d(&v, 0.5, &mut out);
        for (k, o) in out.iter().enumerate() {
            assert!((o - k as f64).abs() < 1e-12);
        }
    }
}
