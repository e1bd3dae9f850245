//! Small numerical building blocks shared by the solver layers.

use crate::error::{Error, Result};

const GL8_X: [f64; 4] = [
    0.183_434_642_495_649_8,
    0.525_532_409_916_329,
    0.796_666_477_413_626_7,
    0.960_289_856_497_536_3,
];
const GL8_W: [f64; 4] = [
    0.362_683_783_378_362,
    0.313_706_645_877_887_3,
    0.222_381_034_453_374_5,
    0.101_228_536_290_376_3,
];

/// Eight-point Gauss–Legendre rule mapped to [0, 1] as (node, weight) pairs.
pub fn gauss8_unit() -> [(f64, f64); 8] {
    let mut out = [(0.0, 0.0); 8];
    for k in 0..4 {
        out[2 * k] = (0.5 * (1.0 - GL8_X[k]), 0.5 * GL8_W[k]);
        out[2 * k + 1] = (0.5 * (1.0 + GL8_X[k]), 0.5 * GL8_W[k]);
    }
    out
}

/// Adaptive Simpson quadrature of `f` over [a, b] to absolute tolerance `tol`.
pub fn adaptive_simpson<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64, tol: f64) -> f64 {
    if a == b {
        return 0.0;
    }
    let fa = f(a);
    let fb = f(b);
    let m = 0.5 * (a + b);
    let fm = f(m);
    let whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
    simpson_step(f, a, b, fa, fm, fb, whole, tol, 48)
}

#[allow(clippy::too_many_arguments)]
fn simpson_step<F: Fn(f64) -> f64>(
    f: &F,
    a: f64,
    b: f64,
    fa: f64,
    fm: f64,
    fb: f64,
    whole: f64,
    tol: f64,
    depth: u32,
) -> f64 {
    let m = 0.5 * (a + b);
    let lm = 0.5 * (a + m);
    let rm = 0.5 * (m + b);
    let flm = f(lm);
    let frm = f(rm);
    let left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
    let right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
    let diff = left + right - whole;
    if depth == 0 || diff.abs() <= 15.0 * tol {
        return left + right + diff / 15.0;
    }
    simpson_step(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1)
        + simpson_step(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1)
}

/// Cubic Hermite interpolant on one cell, given endpoint values and slopes.
/// Returns (value, first derivative) at local coordinate `s` in [0, 1].
pub fn hermite_cell(y0: f64, y1: f64, d0: f64, d1: f64, h: f64, s: f64) -> (f64, f64) {
    let s2 = s * s;
    let s3 = s2 * s;
    let h00 = 2.0 * s3 - 3.0 * s2 + 1.0;
    let h10 = s3 - 2.0 * s2 + s;
    let h01 = -2.0 * s3 + 3.0 * s2;
    let h11 = s3 - s2;
    let value = h00 * y0 + h10 * h * d0 + h01 * y1 + h11 * h * d1;
    let dh00 = 6.0 * s2 - 6.0 * s;
    let dh10 = 3.0 * s2 - 4.0 * s + 1.0;
    let dh01 = -6.0 * s2 + 6.0 * s;
    let dh11 = 3.0 * s2 - 2.0 * s;
    let slope = (dh00 * y0 + dh01 * y1) / h + dh10 * d0 + dh11 * d1;
    (value, slope)
}

/// Second derivative of the cubic Hermite interpolant on one cell.
pub fn hermite_cell_curvature(y0: f64, y1: f64, d0: f64, d1: f64, h: f64, s: f64) -> f64 {
    let (a, b) = (12.0 * s - 6.0, 6.0 * s);
    (a * (y0 - y1)) / (h * h) + ((b - 4.0) * d0 + (b - 2.0) * d1) / h
}

/// Index of the cell of a sorted abscissa array containing `x` (clamped to valid cells).
pub fn locate(xs: &[f64], x: f64) -> usize {
    let n = xs.len();
    debug_assert!(n >= 2);
    match xs.binary_search_by(|probe| probe.total_cmp(&x)) {
        Ok(i) => i.min(n - 2),
        Err(i) => i.saturating_sub(1).min(n - 2),
    }
}

/// Monotone piecewise-cubic Hermite interpolant. Nodal slopes come from the
/// local Lagrange polynomial through up to five nodes (fourth order on smooth
/// data) and are then limited as in Hyman's filter: zero at local extrema of
/// the data and at most three times the smaller adjacent secant otherwise,
/// which keeps every cell monotone.
#[derive(Debug, Clone)]
pub struct MonotoneCubic {
    xs: Vec<f64>,
    ys: Vec<f64>,
    ds: Vec<f64>,
}

/// Derivative at xs[c] of the Lagrange polynomial through all given nodes.
fn lagrange_slope(xs: &[f64], ys: &[f64], c: usize) -> f64 {
    let x = xs[c];
    let mut d = 0.0;
    for k in 0..xs.len() {
        let w = if k == c {
            (0..xs.len())
                .filter(|&m| m != c)
                .map(|m| 1.0 / (x - xs[m]))
                .sum()
        } else {
            let num: f64 = (0..xs.len())
                .filter(|&m| m != k && m != c)
                .map(|m| x - xs[m])
                .product();
            let den: f64 = (0..xs.len())
                .filter(|&m| m != k)
                .map(|m| xs[k] - xs[m])
                .product();
            num / den
        };
        d += w * ys[k];
    }
    d
}

impl MonotoneCubic {
    pub fn new(xs: Vec<f64>, ys: Vec<f64>) -> Result<Self> {
        let n = xs.len();
        if n < 3 || ys.len() != n {
            return Err(Error::InvalidEos(
                "interpolation table needs at least three (x, y) rows".into(),
            ));
        }
        if xs.windows(2).any(|w| w[1] <= w[0]) {
            return Err(Error::InvalidEos(
                "table abscissae must be strictly increasing".into(),
            ));
        }
        let secant: Vec<f64> = (0..n - 1)
            .map(|i| (ys[i + 1] - ys[i]) / (xs[i + 1] - xs[i]))
            .collect();
        let mut ds = vec![0.0; n];
        for i in 0..n {
            let lo = i.saturating_sub(2).min(n.saturating_sub(5));
            let hi = (lo + 5).min(n);
            let raw = lagrange_slope(&xs[lo..hi], &ys[lo..hi], i - lo);
            let left = if i > 0 { secant[i - 1] } else { secant[0] };
            let right = if i + 1 < n { secant[i] } else { secant[n - 2] };
            ds[i] = if left * right <= 0.0 {
                0.0
            } else {
                let bound = 3.0 * left.abs().min(right.abs());
                if raw * left <= 0.0 {
                    0.0
                } else {
                    raw.signum() * raw.abs().min(bound)
                }
            };
        }
        Ok(Self { xs, ys, ds })
    }

    pub fn x_min(&self) -> f64 {
        self.xs[0]
    }

    pub fn x_max(&self) -> f64 {
        self.xs[self.xs.len() - 1]
    }

    /// Value and first derivative at `x` (must lie inside the table).
    pub fn eval(&self, x: f64) -> (f64, f64) {
        let i = locate(&self.xs, x);
        let h = self.xs[i + 1] - self.xs[i];
        let s = (x - self.xs[i]) / h;
        hermite_cell(self.ys[i], self.ys[i + 1], self.ds[i], self.ds[i + 1], h, s)
    }

    /// Second derivative at `x`; piecewise linear and discontinuous at the nodes.
    pub fn curvature(&self, x: f64) -> f64 {
        let i = locate(&self.xs, x);
        let h = self.xs[i + 1] - self.xs[i];
        let s = (x - self.xs[i]) / h;
        hermite_cell_curvature(self.ys[i], self.ys[i + 1], self.ds[i], self.ds[i + 1], h, s)
    }
}

/// Bisection on a sign-changing bracket; returns the midpoint once the bracket
/// is below `xtol` or after 200 halvings.
pub fn bisect<F: FnMut(f64) -> f64>(mut f: F, mut lo: f64, mut hi: f64, xtol: f64) -> Result<f64> {
    let mut flo = f(lo);
    let fhi = f(hi);
    if flo == 0.0 {
        return Ok(lo);
    }
    if fhi == 0.0 {
        return Ok(hi);
    }
    if flo.signum() == fhi.signum() {
        return Err(Error::NoRoot(format!("no sign change on [{lo}, {hi}]")));
    }
    for _ in 0..200 {
        let mid = 0.5 * (lo + hi);
        if (hi - lo).abs() <= xtol || mid == lo || mid == hi {
            return Ok(mid);
        }
        let fm = f(mid);
        if fm == 0.0 {
            return Ok(mid);
        }
        if fm.signum() == flo.signum() {
            lo = mid;
            flo = fm;
        } else {
            hi = mid;
        }
    }
    Ok(0.5 * (lo + hi))
}

/// Ordinary least squares fit of `ys` against the columns `basis(x)`.
/// Returns the coefficient vector; `None` when the normal equations are singular.
pub fn least_squares<const K: usize>(
    xs: &[f64],
    ys: &[f64],
    basis: impl Fn(f64) -> [f64; K],
) -> Option<[f64; K]> {
    let mut ata = [[0.0; K]; K];
    let mut aty = [0.0; K];
    for (&x, &y) in xs.iter().zip(ys) {
        let row = basis(x);
        for a in 0..K {
            aty[a] += row[a] * y;
            for b in 0..K {
                ata[a][b] += row[a] * row[b];
            }
        }
    }
    solve_dense(ata, aty)
}

/// Gaussian elimination with partial pivoting on a small dense system.
pub fn solve_dense<const K: usize>(mut a: [[f64; K]; K], mut b: [f64; K]) -> Option<[f64; K]> {
    for col in 0..K {
        let pivot = (col..K).max_by(|&i, &j| a[i][col].abs().total_cmp(&a[j][col].abs()))?;
        if a[pivot][col].abs() < 1e-300 {
            return None;
        }
        a.swap(col, pivot);
        b.swap(col, pivot);
        for row in col + 1..K {
            let factor = a[row][col] / a[col][col];
            for k in col..K {
                a[row][k] -= factor * a[col][k];
            }
            b[row] -= factor * b[col];
        }
    }
    let mut x = [0.0; K];
    for row in (0..K).rev() {
        let mut acc = b[row];
        for k in row + 1..K {
            acc -= a[row][k] * x[k];
        }
        x[row] = acc / a[row][row];
    }
    Some(x)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn gauss8_integrates_degree_fifteen_exactly() {
        let q: f64 = gauss8_unit().iter().map(|&(s, w)| w * s.powi(15)).sum();
        assert!((q - 1.0 / 16.0).abs() < 1e-15);
    }

    #[test]
    fn simpson_matches_closed_form() {
        let q = adaptive_simpson(&|x: f64| x.exp(), 0.0, 1.0, 1e-13);
        assert!((q - (std::f64::consts::E - 1.0)).abs() < 1e-12);
    }

    #[test]
    fn monotone_cubic_reproduces_a_line_and_stays_monotone() {
        let xs: Vec<f64> = (0..6).map(f64::from).collect();
        let line =
            MonotoneCubic::new(xs.clone(), xs.iter().map(|x| 2.0 * x + 1.0).collect()).unwrap();
        let (v, d) = line.eval(2.3);
        assert!((v - 5.6).abs() < 1e-14 && (d - 2.0).abs() < 1e-14);

        let steps = MonotoneCubic::new(xs, vec![0.0, 0.0, 1.0, 1.0, 5.0, 5.1]).unwrap();
        let mut last = f64::NEG_INFINITY;
        for k in 0..=500 {
            let (v, _) = steps.eval(5.0 * k as f64 / 500.0);
            assert!(v >= last - 1e-14);
            last = v;
        }
    }

    #[test]
    fn bisection_finds_cube_root() {
        let r = bisect(|x| x * x * x - 2.0, 0.0, 2.0, 1e-15).unwrap();
        assert!((r - 2f64.cbrt()).abs() < 1e-14);
        assert!(bisect(|x| x * x + 1.0, -1.0, 1.0, 1e-12).is_err());
    }

    #[test]
    fn least_squares_recovers_quadratic() {
        let xs: Vec<f64> = (0..10).map(|i| i as f64 * 0.1).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 1.0 - 2.0 * x + 0.5 * x * x).collect();
        let c = least_squares(&xs, &ys, |x| [1.0, x, x * x]).unwrap();
        assert!(
            (c[0] - 1.0).abs() < 1e-12 && (c[1] + 2.0).abs() < 1e-11 && (c[2] - 0.5).abs() < 1e-10
        );
    }
}
