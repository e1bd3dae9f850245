//! Independent numerical oracles: finite differences, Richardson
//! extrapolation, limit and power-law fits, convergence orders.

use std::ops::Range;

use crate::numerics::least_squares;

pub use crate::numerics::bisect;

/// Fourth-order central stencils (offset, weight) and the power of h to divide by.
fn stencil(order: usize) -> (&'static [(i32, f64)], i32) {
    match order {
        1 => (
            &[
                (-2, 1.0 / 12.0),
                (-1, -8.0 / 12.0),
                (1, 8.0 / 12.0),
                (2, -1.0 / 12.0),
            ],
            1,
        ),
        2 => (
            &[
                (-2, -1.0 / 12.0),
                (-1, 16.0 / 12.0),
                (0, -30.0 / 12.0),
                (1, 16.0 / 12.0),
                (2, -1.0 / 12.0),
            ],
            2,
        ),
        3 => (
            &[
                (-3, 1.0 / 8.0),
                (-2, -1.0),
                (-1, 13.0 / 8.0),
                (1, -13.0 / 8.0),
                (2, 1.0),
                (3, -1.0 / 8.0),
            ],
            3,
        ),
        4 => (
            &[
                (-3, -1.0 / 6.0),
                (-2, 2.0),
                (-1, -39.0 / 6.0),
                (0, 56.0 / 6.0),
                (1, -39.0 / 6.0),
                (2, 2.0),
                (3, -1.0 / 6.0),
            ],
            4,
        ),
        _ => panic!("derivative order {order} not supported"),
    }
}

/// k-th derivative (k ≤ 4) by a fourth-order central stencil with step h.
pub fn central_derivative<E>(
    f: impl Fn(f64) -> Result<f64, E>,
    x: f64,
    h: f64,
    k: usize,
) -> Result<f64, E> {
    let (st, p) = stencil(k);
    let mut acc = 0.0;
    for &(o, w) in st {
        acc += w * f(x + o as f64 * h)?;
    }
    Ok(acc / h.powi(p))
}

/// Richardson combination of estimates at steps h and h/2 with error order p.
pub fn richardson(coarse: f64, fine: f64, p: i32) -> f64 {
    let r = 2f64.powi(p);
    (r * fine - coarse) / (r - 1.0)
}

/// k-th derivative from the fourth-order stencil at h and h/2, Richardson-combined.
pub fn derivative<E>(
    f: impl Fn(f64) -> Result<f64, E>,
    x: f64,
    h: f64,
    k: usize,
) -> Result<f64, E> {
    let a = central_derivative(&f, x, h, k)?;
    let b = central_derivative(&f, x, 0.5 * h, k)?;
    Ok(richardson(a, b, 4))
}

/// Mixed derivative ∂²g/∂x∂y at the origin by the four-point stencil,
/// Richardson-combined over h and h/2.
pub fn mixed_derivative<E>(g: impl Fn(f64, f64) -> Result<f64, E>, h: f64) -> Result<f64, E> {
    let est = |h: f64| -> Result<f64, E> {
        Ok((g(h, h)? - g(h, -h)? - g(-h, h)? + g(-h, -h)?) / (4.0 * h * h))
    };
    Ok(richardson(est(h)?, est(0.5 * h)?, 2))
}

/// Derivative of equally spaced samples: second-order central in the
/// interior, second-order one-sided at the ends.
pub fn sample_derivative(values: &[f64], d: f64) -> Vec<f64> {
    let m = values.len();
    let mut out = vec![0.0; m];
    if m < 3 {
        if m == 2 {
            let s = (values[1] - values[0]) / d;
            out.fill(s);
        }
        return out;
    }
    out[0] = (-3.0 * values[0] + 4.0 * values[1] - values[2]) / (2.0 * d);
    for k in 1..m - 1 {
        out[k] = (values[k + 1] - values[k - 1]) / (2.0 * d);
    }
    out[m - 1] = (3.0 * values[m - 1] - 4.0 * values[m - 2] + values[m - 3]) / (2.0 * d);
    out
}

/// Nodes of the smallest decade of v available on a uniform grid with n
/// intervals, excluding the three nodes nearest 0: j = 4 ..= 40, clipped to
/// the grid and widened to at least five nodes where possible.
pub fn fit_window(n: usize) -> Range<usize> {
    let start = 4.min(n);
    let end = (10 * start).min(n).max((start + 4).min(n));
    start..end + 1
}

/// Least-squares line through (x, y); returns (intercept, slope).
pub fn line_fit(xs: &[f64], ys: &[f64]) -> Option<(f64, f64)> {
    least_squares(xs, ys, |x| [1.0, x]).map(|c| (c[0], c[1]))
}

/// Value at x = 0 of the least-squares line through the window samples.
pub fn limit_fit(xs: &[f64], ys: &[f64], window: Range<usize>) -> f64 {
    line_fit(&xs[window.clone()], &ys[window]).map_or(f64::NAN, |(a, _)| a)
}

/// Log-log least squares of |y| = c x^p over the window; returns (p, c).
pub fn power_law_fit(xs: &[f64], ys: &[f64], window: Range<usize>) -> (f64, f64) {
    let (lx, ly): (Vec<f64>, Vec<f64>) = window
        .filter(|&k| xs[k] > 0.0 && ys[k] != 0.0)
        .map(|k| (xs[k].ln(), ys[k].abs().ln()))
        .unzip();
    if lx.len() < 2 {
        return (f64::NAN, f64::NAN);
    }
    line_fit(&lx, &ly).map_or((f64::NAN, f64::NAN), |(a, p)| (p, a.exp()))
}

/// Least-squares polynomial a₁x + a₂x² + a₃x³ without constant term.
pub fn odd_start_cubic_fit(xs: &[f64], ys: &[f64]) -> Option<[f64; 3]> {
    least_squares(xs, ys, |x| [x, x * x, x * x * x])
}

/// Observed order log₂(e_coarse/e_fine) for a refinement by two.
pub fn observed_order(coarse: f64, fine: f64) -> f64 {
    (coarse / fine).log2()
}

/// Relative deviation |measured − target|/|target|, absolute when the target is 0.
pub fn relative_error(measured: f64, target: f64) -> f64 {
    if target == 0.0 {
        measured.abs()
    } else {
        ((measured - target) / target).abs()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn ok(f: impl Fn(f64) -> f64) -> impl Fn(f64) -> Result<f64, ()> {
        move |x| Ok(f(x))
    }

    #[test]
    fn stencils_are_exact_on_quartics() {
        let p = |x: f64| 1.0 + x - 2.0 * x.powi(2) + 0.5 * x.powi(3) + x.powi(4);
        let exact = [1.0, -4.0, 3.0, 24.0];
        for k in 1..=4 {
            let d = central_derivative(ok(p), 0.0, 0.1, k).unwrap();
            assert!((d - exact[k - 1]).abs() < 1e-9, "k={k} d={d}");
        }
    }

    #[test]
    fn derivative_of_exponential() {
        for k in 1..=4 {
            let d = derivative(ok(f64::exp), 0.3, 0.05, k).unwrap();
            assert!((d - 0.3f64.exp()).abs() < 1e-8, "k={k}");
        }
    }

    #[test]
    fn fits_recover_known_forms() {
        let xs: Vec<f64> = (0..=64).map(|k| k as f64 * 0.01).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 + 3.0 * x).collect();
        assert!((limit_fit(&xs, &ys, fit_window(64)) - 2.0).abs() < 1e-12);
        let zs: Vec<f64> = xs.iter().map(|x| 5.0 * x * x).collect();
        let (p, c) = power_law_fit(&xs, &zs, fit_window(64));
        assert!((p - 2.0).abs() < 1e-12 && (c - 5.0).abs() < 1e-10);
        assert_eq!(fit_window(64), 4..41);
        assert_eq!(fit_window(8), 4..9);
    }

    #[test]
    fn richardson_removes_leading_error() {
        let est = |h: f64| 1.0 + h * h;
        assert!((richardson(est(0.1), est(0.05), 2) - 1.0).abs() < 1e-15);
    }
}
