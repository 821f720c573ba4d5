use crate::deformed::{log_q, Deformation};
use crate::error::{Error, Result};
use crate::record::Direction;

/// Default number of grid points for [`scalar_legendre_fenchel`].
pub const LF_GRID: usize = 10_000;

/// `lambda - lambda^(2-q)(log_q lambda - s)`.
///
/// Away from `q = 1` this is evaluated as
/// `lambda (q-2)/(q-1) + lambda^(2-q) (s + 1/(q-1))`, which has no
/// cancellation for large `lambda` near `q = 2`.
pub fn legendre_objective(lambda: f64, s: f64, q: Deformation) -> Result<f64> {
    let power = (q.p() * lambda.ln()).exp();
    let a = q.q() - 1.0;
    if a.abs() >= 0.5 {
        if !(lambda > 0.0) {
            return Err(Error::domain(format!("lambda = {lambda} must be positive")));
        }
        return Ok(lambda * (a - 1.0) / a + power * (s + 1.0 / a));
    }
    Ok(lambda - power * (log_q(lambda, q)? - s))
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ScalarOptimum {
    pub value: f64,
    pub lambda: f64,
}

/// Optimum over `lambda > 0` of [`legendre_objective`] (max for `q <= 2`,
/// min for `q > 2`) by a logarithmic grid on `[1e-6, 1e6]`, widened while the
/// best point sits on an end, then golden-section refinement.
pub fn scalar_legendre_fenchel(s: f64, q: Deformation, grid_size: usize) -> Result<ScalarOptimum> {
    if !q.domain().contains(s) {
        return Err(Error::domain(format!("s = {s} is outside the exp_q domain for q = {}", q.q())));
    }
    if grid_size < 3 {
        return Err(Error::Config("grid needs at least 3 points".into()));
    }
    let sign = Direction::for_q(q.q()).sign();
    let score = |t: f64| match legendre_objective(t.exp(), s, q) {
        Ok(v) if v.is_finite() => sign * v,
        _ => f64::NEG_INFINITY,
    };

    let (mut lo, mut hi) = (1e-6f64.ln(), 1e6f64.ln());
    let (mut a, mut b);
    let mut widenings = 0;
    loop {
        let step = (hi - lo) / (grid_size - 1) as f64;
        let values: Vec<f64> = (0..grid_size).map(|i| score(lo + step * i as f64)).collect();
        let best = (0..grid_size).fold(0, |acc, i| if values[i] > values[acc] { i } else { acc });
        a = lo + step * best.saturating_sub(1) as f64;
        b = lo + step * (best + 1).min(grid_size - 1) as f64;
        // widen only on a strict improvement at the end, not on a plateau
        let strict = |edge: usize, inner: usize| values[edge] > values[inner] + 1e-15 * values[edge].abs();
        let width = hi - lo;
        if best == 0 && widenings < 20 && strict(0, 1) {
            (lo, hi) = (lo - width, lo + step);
        } else if best == grid_size - 1 && widenings < 20 && strict(grid_size - 1, grid_size - 2) {
            (lo, hi) = (hi - step, hi + width);
        } else {
            break;
        }
        widenings += 1;
    }

    let ratio = (5f64.sqrt() - 1.0) / 2.0;
    let mut c = b - ratio * (b - a);
    let mut d = a + ratio * (b - a);
    let (mut fc, mut fd) = (score(c), score(d));
    for _ in 0..200 {
        if (b - a).abs() <= 1e-15 * (1.0 + a.abs().max(b.abs())) {
            break;
        }
        if fc >= fd {
            b = d;
            d = c;
            fd = fc;
            c = b - ratio * (b - a);
            fc = score(c);
        } else {
            a = c;
            c = d;
            fc = fd;
            d = a + ratio * (b - a);
            fd = score(d);
        }
    }
    let t = if fc >= fd { c } else { d };
    let lambda = t.exp();
    Ok(ScalarOptimum { value: legendre_objective(lambda, s, q)?, lambda })
}
