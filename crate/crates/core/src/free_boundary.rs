//! Outer iteration: identification of shock events in the state ahead,
//! jump updates, and the shock-development driver.
//!
//! One outer step maps boundary data (y, β̂₊, V̂) to the characteristic
//! solution on T_ε, reads off the shock curve (f, g, α₊), solves the
//! identification equation g + r₀ = r*(f, vy) for y, and recomputes β₊ and V
//! from the jump conditions.

use serde::Serialize;

use crate::eos::BarotropicEos;
use crate::error::{Error, Result};
use crate::fixed_bvp::{
    solve_fixed_bvp, BoundaryFunctions, FieldGrid, InnerOptions, InnerProblem, TriGrid,
};
use crate::jump::{jump_function, jump_scale, solve_jump_increment, speed_offset};
use crate::state::PointState;
use crate::state_ahead::{
    initial_data, CuspData, Field, InitialData, StateAheadModel, ValidityBox,
};

/// Shock curve and everything derived from it, per diagonal node v_j.
#[derive(Debug, Clone, Serialize)]
pub struct ShockCurve {
    pub v: Vec<f64>,
    /// f = t(v, v).
    pub f: Vec<f64>,
    /// g = r(v, v) − r₀.
    pub g: Vec<f64>,
    pub y: Vec<f64>,
    pub alpha_plus: Vec<f64>,
    pub beta_plus: Vec<f64>,
    /// Shock speed V.
    pub speed: Vec<f64>,
    pub f_hat: Vec<f64>,
    pub g_hat: Vec<f64>,
    /// (g − c₊₀f)/v³.
    pub delta_hat: Vec<f64>,
    /// (α₊ − α_i)/v².
    pub alpha_hat_plus: Vec<f64>,
    /// (β₊ − β₀)/v².
    pub beta_hat_plus: Vec<f64>,
    pub v_hat: Vec<f64>,
    /// State ahead (α₋, β₋) = (α*, β*)(f, vy).
    pub alpha_minus: Vec<f64>,
    pub beta_minus: Vec<f64>,
    /// [α] = α₊ − α₋ and [β] = β₊ − β₋.
    pub d_alpha: Vec<f64>,
    pub d_beta: Vec<f64>,
    /// V − c₊₀.
    pub speed_offset: Vec<f64>,
    /// V − c₊ ahead.
    pub margin_ahead: Vec<f64>,
    /// c₊ behind − V.
    pub margin_behind: Vec<f64>,
    /// |J|/scale at the computed jump.
    pub jump_residual: Vec<f64>,
    /// Singular boundary t*(vy).
    pub singular_time: Vec<f64>,
}

impl ShockCurve {
    fn with_len(m: usize) -> Self {
        let z = || vec![0.0; m];
        Self {
            v: z(),
            f: z(),
            g: z(),
            y: z(),
            alpha_plus: z(),
            beta_plus: z(),
            speed: z(),
            f_hat: z(),
            g_hat: z(),
            delta_hat: z(),
            alpha_hat_plus: z(),
            beta_hat_plus: z(),
            v_hat: z(),
            alpha_minus: z(),
            beta_minus: z(),
            d_alpha: z(),
            d_beta: z(),
            speed_offset: z(),
            margin_ahead: z(),
            margin_behind: z(),
            jump_residual: z(),
            singular_time: z(),
        }
    }

    pub fn len(&self) -> usize {
        self.v.len()
    }

    pub fn is_empty(&self) -> bool {
        self.v.is_empty()
    }

    /// CSV with columns v, f, g, V, y, alpha_plus, beta_plus, f_hat, g_hat,
    /// delta_hat, V_hat, alpha_hat_plus, beta_hat_plus.
    pub fn to_csv(&self) -> String {
        let mut out =
            String::from("v,f,g,V,y,alpha_plus,beta_plus,f_hat,g_hat,delta_hat,V_hat,alpha_hat_plus,beta_hat_plus\n");
        for j in 0..self.len() {
            let row = [
                self.v[j],
                self.f[j],
                self.g[j],
                self.speed[j],
                self.y[j],
                self.alpha_plus[j],
                self.beta_plus[j],
                self.f_hat[j],
                self.g_hat[j],
                self.delta_hat[j],
                self.v_hat[j],
                self.alpha_hat_plus[j],
                self.beta_hat_plus[j],
            ];
            let cells: Vec<String> = row.iter().map(|x| format!("{x:.16e}")).collect();
            out.push_str(&cells.join(","));
            out.push('\n');
        }
        out
    }
}

/// Hatted identification function at (v, y) together with ∂/∂y.
///
/// Below `v_floor` the monomial expansion in (f̂, y) is used; above it the
/// function is evaluated directly as (δ − (r* − r₀ − c₊₀t)(f, vy))/v³.
pub fn identification_function(
    model: &StateAheadModel,
    v: f64,
    y: f64,
    f_hat: f64,
    delta_hat: f64,
    v_floor: f64,
) -> Result<(f64, f64)> {
    if v < v_floor {
        return Ok(model.identification_hatted(v, y, f_hat, delta_hat));
    }
    let f = v * v * f_hat;
    let z = v * y;
    let value = delta_hat - model.radius_reduced(f, z)? / (v * v * v);
    let slope = -model.eval(Field::Radius, f, z, 0, 1)? / (v * v);
    Ok((value, slope))
}

/// Solve F̂(v, y) = 0 for y by safeguarded Newton from `y_guess`, with the
/// bracket [y_guess − 0.5, y_guess + 0.5].
pub fn solve_identification(
    model: &StateAheadModel,
    f_hat: f64,
    delta_hat: f64,
    v: f64,
    y_guess: f64,
    v_floor: f64,
) -> Result<f64> {
    let tol = 1e-13 * model.cusp.lambda / model.cusp.kappa;
    let eval = |y: f64| identification_function(model, v, y, f_hat, delta_hat, v_floor);
    let (f0, _) = eval(y_guess)?;
    if f0.abs() < tol {
        return Ok(y_guess);
    }
    let (mut lo, mut hi) = (y_guess - 0.5, y_guess + 0.5);
    let (flo, fhi) = (eval(lo)?.0, eval(hi)?.0);
    if flo.signum() == fhi.signum() {
        return Err(Error::NoRoot(format!(
            "identification at v = {v:e}: no sign change on [{lo}, {hi}]"
        )));
    }
    let sign_lo = flo.signum();
    let mut y = y_guess;
    let mut history = Vec::new();
    for _ in 0..100 {
        let (fy, dy) = eval(y)?;
        history.push(fy.abs());
        if fy.abs() < tol {
            return Ok(y);
        }
        if fy.signum() == sign_lo {
            lo = y;
        } else {
            hi = y;
        }
        let mut next = y - fy / dy;
        let (a, b) = if lo < hi { (lo, hi) } else { (hi, lo) };
        if !(next > a && next < b) {
            next = 0.5 * (lo + hi);
        }
        if next == y {
            break;
        }
        y = next;
    }
    Err(Error::NonConvergence {
        what: "identification solve",
        iterations: history.len(),
        last_ratio: history.last().copied().unwrap_or(f64::NAN),
        history,
    })
}

/// Everything fixed during the outer iteration.
#[derive(Debug, Clone)]
pub struct OuterContext<'a> {
    pub eos: &'a BarotropicEos,
    pub model: &'a StateAheadModel,
    pub grid: TriGrid,
    pub init: InitialData,
    pub inner: InnerOptions,
}

impl<'a> OuterContext<'a> {
    /// Build the context for one ε; the model is restricted to its validity box.
    pub fn new(
        eos: &'a BarotropicEos,
        model: &'a StateAheadModel,
        eps: f64,
        n: usize,
        inner: InnerOptions,
    ) -> Result<Self> {
        let grid = TriGrid::new(eps, n)?;
        let init = initial_data(model, eos, eps, n)?;
        Ok(Self {
            eos,
            model,
            grid,
            init,
            inner,
        })
    }

    pub fn cusp(&self) -> &CuspData {
        &self.model.cusp
    }

    fn problem(&self) -> InnerProblem<'_> {
        InnerProblem {
            eos: self.eos,
            cusp: &self.model.cusp,
            init: &self.init,
            grid: &self.grid,
            options: self.inner,
        }
    }
}

/// Value at 0 from the quadratic through samples 1, 2, 3.
fn extrapolate_to_zero(x: &[f64]) -> f64 {
    3.0 * x[1] - 3.0 * x[2] + x[3]
}

/// Identification and jump updates on a converged grid.
///
/// Returns the shock curve and the boundary data for the next outer step.
pub fn jump_update(
    field: &FieldGrid,
    ctx: &OuterContext,
    y_prev: &[f64],
) -> Result<(ShockCurve, BoundaryFunctions)> {
    let g = &field.grid;
    let n = g.n;
    let cusp = ctx.cusp();
    let model = ctx.model;
    let base = cusp.base();
    let mut c = ShockCurve::with_len(n + 1);

    // Shock curve read off the diagonal.
    for j in 0..=n {
        let id = g.idx(j, j);
        let v = g.coord(j);
        c.v[j] = v;
        c.f[j] = field.t[id];
        c.g[j] = field.r[id] - cusp.r0;
        c.alpha_plus[j] = field.alpha[id];
        if j > 0 {
            c.f_hat[j] = field.t[id] / (v * v);
            c.delta_hat[j] = field.r_reduced[id] / (v * v * v);
            c.alpha_hat_plus[j] = (field.alpha_offset[id] - ctx.init.alpha_offset[j]) / (v * v);
        }
    }
    c.f_hat[0] = cusp.f_hat0();
    c.delta_hat[0] = extrapolate_to_zero(&c.delta_hat);
    c.alpha_hat_plus[0] = cusp.lambda * cusp.a_tilde0 / (6.0 * cusp.kappa * cusp.kappa);
    for j in 0..=n {
        c.g_hat[j] = cusp.c_plus0 * c.f_hat[j] + c.v[j] * c.delta_hat[j];
    }

    // Identification, continued in increasing v. The corner root is exact.
    c.y[0] = solve_identification(model, cusp.f_hat0(), 0.0, 0.0, -1.0, ctx.inner.v_floor)?;
    for j in 1..=n {
        let guess = if j == 1 { y_prev[1] } else { c.y[j - 1] };
        c.y[j] = solve_identification(
            model,
            c.f_hat[j],
            c.delta_hat[j],
            c.v[j],
            guess,
            ctx.inner.v_floor,
        )?;
    }

    // Jump conditions.
    let st0 = PointState::new(ctx.eos, base)?;
    c.beta_plus[0] = cusp.beta0;
    c.beta_hat_plus[0] = cusp.f_hat0() * cusp.dbeta_dt0;
    c.speed[0] = cusp.c_plus0;
    c.alpha_minus[0] = cusp.alpha0;
    c.beta_minus[0] = cusp.beta0;
    c.singular_time[0] = 0.0;
    for j in 1..=n {
        let v = c.v[j];
        let z = v * c.y[j];
        let id = g.idx(j, j);
        let (da_m, db_m) = model.pair_offset(c.f[j], z)?;
        let ahead = base.offset(da_m, db_m);
        let d_alpha = field.alpha_offset[id] - da_m;
        let d_beta = solve_jump_increment(ctx.eos, ahead, d_alpha)?;
        let v_off = speed_offset(ctx.eos, base, (da_m, db_m), d_alpha, d_beta)?;
        let behind = ahead.offset(d_alpha, d_beta);
        let st_a = PointState::new(ctx.eos, ahead)?;
        let st_b = PointState::new(ctx.eos, behind)?;

        c.alpha_minus[j] = ahead.alpha;
        c.beta_minus[j] = ahead.beta;
        c.d_alpha[j] = d_alpha;
        c.d_beta[j] = d_beta;
        c.beta_plus[j] = cusp.beta0 + (db_m + d_beta);
        c.beta_hat_plus[j] = (db_m + d_beta) / (v * v);
        c.speed_offset[j] = v_off;
        c.speed[j] = cusp.c_plus0 + v_off;
        c.v_hat[j] = (v_off - 0.5 * cusp.kappa * (1.0 + c.y[j]) * v) / (v * v);
        c.margin_ahead[j] = v_off - (st_a.c_plus - st0.c_plus);
        c.margin_behind[j] = (st_b.c_plus - st0.c_plus) - v_off;
        c.jump_residual[j] =
            jump_function(ctx.eos, ahead, d_alpha, d_beta)?.abs() / jump_scale(ctx.eos, ahead)?;
        c.singular_time[j] = model.singular_boundary(z);
    }
    c.v_hat[0] = extrapolate_to_zero(&c.v_hat);

    let bf = BoundaryFunctions {
        v: c.v.clone(),
        y: c.y.clone(),
        beta_hat_plus: c.beta_hat_plus.clone(),
        v_hat: c.v_hat.clone(),
    };
    Ok((c, bf))
}

/// Result of one outer step.
#[derive(Debug, Clone)]
pub struct OuterStep {
    pub next: BoundaryFunctions,
    pub field: FieldGrid,
    pub curve: ShockCurve,
    pub inner_history: Vec<f64>,
    pub inner_ratio: f64,
}

pub fn outer_iterate(bf: &BoundaryFunctions, ctx: &OuterContext) -> Result<OuterStep> {
    let sol = solve_fixed_bvp(bf, &ctx.problem())?;
    let (curve, next) = jump_update(&sol.field, ctx, &bf.y)?;
    Ok(OuterStep {
        next,
        field: sol.field,
        curve,
        inner_history: sol.history,
        inner_ratio: sol.contraction,
    })
}

/// Outer convergence metric: max of sup|Δy|, sup|d(Δβ̂₊)/dv| and sup|ΔV̂|.
pub fn boundary_distance(a: &BoundaryFunctions, b: &BoundaryFunctions, delta: f64) -> f64 {
    let m = a.v.len();
    let sup = |x: &[f64], y: &[f64]| {
        x.iter()
            .zip(y)
            .map(|(p, q)| (p - q).abs())
            .fold(0.0, f64::max)
    };
    let diff: Vec<f64> = (0..m)
        .map(|j| a.beta_hat_plus[j] - b.beta_hat_plus[j])
        .collect();
    let mut dmax: f64 = 0.0;
    for j in 0..m {
        let d = if j == 0 {
            (-3.0 * diff[0] + 4.0 * diff[1] - diff[2]) / (2.0 * delta)
        } else if j + 1 == m {
            (3.0 * diff[j] - 4.0 * diff[j - 1] + diff[j - 2]) / (2.0 * delta)
        } else {
            (diff[j + 1] - diff[j - 1]) / (2.0 * delta)
        };
        dmax = dmax.max(d.abs());
    }
    sup(&a.y, &b.y).max(dmax).max(sup(&a.v_hat, &b.v_hat))
}

/// Sup-norm distance between two shock curves on (f, g, y, β₊, V).
pub fn curve_distance(a: &ShockCurve, b: &ShockCurve) -> f64 {
    let sup = |x: &[f64], y: &[f64]| {
        x.iter()
            .zip(y)
            .map(|(p, q)| (p - q).abs())
            .fold(0.0, f64::max)
    };
    sup(&a.f, &b.f)
        .max(sup(&a.g, &b.g))
        .max(sup(&a.y, &b.y))
        .max(sup(&a.beta_plus, &b.beta_plus))
        .max(sup(&a.speed, &b.speed))
}

/// Controls for the outer iteration and the ε-halving retries.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct OuterOptions {
    pub tol_outer: f64,
    pub max_outer: usize,
    pub max_retries: usize,
}

/// Controls of a full shock-development solve.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct DevelopmentSettings {
    pub eps: f64,
    pub n: usize,
    pub tol_inner: f64,
    pub max_inner: usize,
    /// Corner floor as a fraction of Δ.
    pub v_floor_fraction: f64,
    pub outer: OuterOptions,
    /// Initial y is −1 + perturbation·v.
    pub perturbation: f64,
}

impl Default for DevelopmentSettings {
    fn default() -> Self {
        Self {
            eps: 0.01,
            n: 64,
            tol_inner: 1e-12,
            max_inner: 400,
            v_floor_fraction: 0.5,
            outer: OuterOptions {
                tol_outer: 1e-10,
                max_outer: 60,
                max_retries: 3,
            },
            perturbation: 0.0,
        }
    }
}

/// Converged shock development on T_ε.
#[derive(Debug, Clone)]
pub struct ShockSolution {
    pub field: FieldGrid,
    pub curve: ShockCurve,
    pub boundary: BoundaryFunctions,
    /// Outer metric per step.
    pub outer_history: Vec<f64>,
    /// Inner change history of the final step.
    pub inner_history: Vec<f64>,
    pub inner_ratio: f64,
    pub outer_ratio: f64,
    /// ε actually used, after any retries.
    pub eps: f64,
    /// ε values that failed before this one.
    pub failed_eps: Vec<f64>,
    /// |F̂ hatted − F̂ direct| at the first node above the corner floor.
    pub identification_crosscheck: f64,
}

/// Geometric-mean ratio of the last `k` successive entries of a history.
pub fn tail_ratio(history: &[f64], k: usize) -> f64 {
    let m = history.len();
    if m < 2 {
        return 0.0;
    }
    let k = k.min(m - 1);
    let (a, b) = (history[m - 1 - k], history[m - 1]);
    if a <= 0.0 {
        return 0.0;
    }
    (b / a).powf(1.0 / k as f64)
}

/// Median of the successive ratios h[k+1]/h[k] for k ≥ `skip`, using only
/// steps whose later entry lies above `floor`. The alternating outer modes make
/// single ratios noisy; the median is insensitive to the transient.
pub fn median_ratio(history: &[f64], skip: usize, floor: f64) -> f64 {
    let mut r: Vec<f64> = history
        .windows(2)
        .skip(skip)
        .filter(|w| w[1] > floor && w[0] > 0.0)
        .map(|w| w[1] / w[0])
        .collect();
    if r.is_empty() {
        return tail_ratio(history, 5);
    }
    r.sort_by(f64::total_cmp);
    let m = r.len();
    if m % 2 == 1 {
        r[m / 2]
    } else {
        0.5 * (r[m / 2 - 1] + r[m / 2])
    }
}

/// Iterate outer steps from `seed` on a fixed ε.
pub fn iterate_outer(
    ctx: &OuterContext,
    seed: BoundaryFunctions,
    options: &OuterOptions,
) -> Result<ShockSolution> {
    let mut bf = seed;
    let mut history = Vec::new();
    for _ in 0..options.max_outer {
        let step = outer_iterate(&bf, ctx)?;
        let dist = boundary_distance(&step.next, &bf, ctx.grid.delta);
        history.push(dist);
        let diverging = !dist.is_finite() || (history.len() > 3 && dist > 1e3 * history[0]);
        if diverging {
            break;
        }
        bf = step.next.clone();
        if dist < options.tol_outer {
            let crosscheck = identification_crosscheck(ctx, &step.curve)?;
            return Ok(ShockSolution {
                field: step.field,
                curve: step.curve,
                boundary: bf,
                outer_ratio: median_ratio(&history, 2, 10.0 * options.tol_outer),
                outer_history: history,
                inner_history: step.inner_history,
                inner_ratio: step.inner_ratio,
                eps: ctx.grid.eps,
                failed_eps: Vec::new(),
                identification_crosscheck: crosscheck,
            });
        }
    }
    let last_ratio = tail_ratio(&history, 1);
    Err(Error::NonConvergence {
        what: "outer iteration",
        iterations: history.len(),
        last_ratio,
        history,
    })
}

fn identification_crosscheck(ctx: &OuterContext, c: &ShockCurve) -> Result<f64> {
    let j = 1;
    let (v, y) = (c.v[j], c.y[j]);
    let hatted = ctx
        .model
        .identification_hatted(v, y, c.f_hat[j], c.delta_hat[j])
        .0;
    let direct = identification_function(ctx.model, v, y, c.f_hat[j], c.delta_hat[j], 0.0)?.0;
    Ok((hatted - direct).abs())
}

fn retryable(e: &Error) -> bool {
    matches!(
        e,
        Error::NonConvergence { .. }
            | Error::SingularGamma { .. }
            | Error::NoRoot(_)
            | Error::OutOfBox { .. }
            | Error::LeftBox { .. }
            | Error::OutOfRange { .. }
    )
}

/// Full driver: seed, iterate, and halve ε on divergence up to `max_retries` times.
pub fn run_shock_development(
    eos: &BarotropicEos,
    model: &StateAheadModel,
    settings: &DevelopmentSettings,
) -> Result<ShockSolution> {
    let mut eps = settings.eps;
    let mut failed = Vec::new();
    loop {
        let boxed = model.clone().with_validity(ValidityBox::for_eps(eps));
        let inner = InnerOptions {
            tol_inner: settings.tol_inner,
            max_inner: settings.max_inner,
            v_floor: settings.v_floor_fraction * eps / settings.n as f64,
        };
        let attempt = OuterContext::new(eos, &boxed, eps, settings.n, inner).and_then(|ctx| {
            let mut seed = BoundaryFunctions::seed(&ctx.grid, ctx.cusp());
            for (y, v) in seed.y.iter_mut().zip(&seed.v) {
                *y += settings.perturbation * v;
            }
            iterate_outer(&ctx, seed, &settings.outer)
        });
        match attempt {
            Ok(mut sol) => {
                sol.failed_eps = failed;
                return Ok(sol);
            }
            Err(e) if retryable(&e) && failed.len() < settings.outer.max_retries => {
                failed.push(eps);
                eps *= 0.5;
            }
            Err(e) => return Err(e),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::state_ahead::{synthesize_model, CuspParams};

    fn model() -> (BarotropicEos, StateAheadModel) {
        let eos = BarotropicEos::radiation();
        let cusp = CuspData::resolve(&CuspParams::default(), &eos).unwrap();
        let m = synthesize_model(cusp, &eos, 5, &[]).unwrap();
        (eos, m)
    }

    #[test]
    fn corner_root_is_minus_one() {
        let (_, m) = model();
        let y = solve_identification(&m, m.cusp.f_hat0(), 0.0, 0.0, -0.9, 1e-6).unwrap();
        assert!((y + 1.0).abs() < 1e-12);
        let (_, slope) = m.identification_hatted(0.0, -1.0, m.cusp.f_hat0(), 0.0);
        assert!((slope - 1.0 / 3.0).abs() < 1e-15);
    }

    #[test]
    fn hatted_and_direct_paths_agree() {
        let (_, m) = model();
        let m = m.with_validity(ValidityBox::for_eps(0.01));
        let (v, y, fh, dh) = (3e-3, -0.97, 0.17, 1e-3);
        let a = m.identification_hatted(v, y, fh, dh);
        let b = identification_function(&m, v, y, fh, dh, 0.0).unwrap();
        assert!((a.0 - b.0).abs() < 1e-12 && (a.1 - b.1).abs() < 1e-12);
    }

    #[test]
    fn median_ratio_ignores_transient_and_floor() {
        let h = [1.0, 0.9, 0.3, 0.1, 0.1 / 3.0, 1e-12];
        assert!((median_ratio(&h, 2, 1e-9) - 1.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn tail_ratio_of_geometric_history() {
        let h: Vec<f64> = (0..8).map(|k| 0.25f64.powi(k)).collect();
        assert!((tail_ratio(&h, 5) - 0.25).abs() < 1e-12);
    }
}
