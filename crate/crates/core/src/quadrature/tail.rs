//! Integration over half-lines of the log variable by geometrically growing
//! windows, with Wynn epsilon extrapolation of the partial sums.

use super::kronrod::{adaptive, Tolerance};
use super::sum::NeumaierSum;
use super::{QuadError, QuadResult};

/// Geometry of a one-sided window sweep starting at `start` and extending in
/// `direction` (+1 or -1). Window offsets are `0, first_step, 2 first_step, 4 first_step, ...`
/// clipped at `max_extent`.
#[derive(Clone, Copy, Debug)]
pub struct TailWindow {
    pub start: f64,
    pub direction: f64,
    pub first_step: f64,
    pub min_extent: f64,
    pub max_extent: f64,
}

impl TailWindow {
    pub fn new(start: f64, direction: f64, max_extent: f64) -> Self {
        Self {
            start,
            direction: direction.signum(),
            first_step: 1.0,
            min_extent: 8.0_f64.min(max_extent),
            max_extent,
        }
    }
}

/// Estimate the limit of `seq` with Wynn's epsilon algorithm.
///
/// Returns `(estimate, error)`; the error combines the spread of the last
/// entries of the highest even column.
pub fn wynn_epsilon(seq: &[f64]) -> Option<(f64, f64)> {
    if seq.is_empty() {
        return None;
    }
    let mut even_columns: Vec<Vec<f64>> = vec![seq.to_vec()];
    let mut prev: Vec<f64> = vec![0.0; seq.len() + 1];
    let mut cur: Vec<f64> = seq.to_vec();
    let mut k = 0usize;
    while cur.len() >= 2 {
        let mut next = Vec::with_capacity(cur.len() - 1);
        let mut breakdown = false;
        for j in 0..cur.len() - 1 {
            let diff = cur[j + 1] - cur[j];
            if diff == 0.0 || !diff.is_finite() {
                breakdown = true;
                break;
            }
            let v = prev[j + 1] + 1.0 / diff;
            if !v.is_finite() {
                breakdown = true;
                break;
            }
            next.push(v);
        }
        if breakdown {
            break;
        }
        k += 1;
        if k.is_multiple_of(2) {
            even_columns.push(next.clone());
        }
        prev = cur;
        cur = next;
    }

    let best = even_columns.iter().rev().find(|c| c.len() >= 2)?;
    let n = best.len();
    let est = best[n - 1];
    let mut err = (best[n - 1] - best[n - 2]).abs();
    if n >= 3 {
        err += (best[n - 1] - best[n - 3]).abs();
    }
    err = err.max(4.0 * f64::EPSILON * est.abs());
    Some((est, err))
}

/// Integrate `f` over the one-sided window family described by `window`.
pub(crate) fn integrate_tail<F: Fn(f64) -> f64>(
    f: &F,
    window: TailWindow,
    breakpoints: &[f64],
    rel_tol: f64,
    max_subdivisions: usize,
) -> Result<QuadResult, QuadError> {
    let mut partial = NeumaierSum::new();
    let mut sums: Vec<f64> = Vec::new();
    let mut chunks: Vec<f64> = Vec::new();
    let mut quad_error = NeumaierSum::new();
    let mut subdivisions = 0usize;

    let mut lo_off = 0.0_f64;
    let mut hi_off = window.first_step.min(window.max_extent);
    loop {
        let x0 = window.start + window.direction * lo_off;
        let x1 = window.start + window.direction * hi_off;
        let (a, b) = if x0 < x1 { (x0, x1) } else { (x1, x0) };

        let mut pts = vec![a];
        pts.extend(breakpoints.iter().copied().filter(|&p| p > a && p < b));
        pts.push(b);
        pts.sort_by(f64::total_cmp);

        let so_far = partial.sum().abs();
        let tol = Tolerance {
            rel: 0.5 * rel_tol,
            abs: 0.05 * rel_tol * so_far,
        };
        let chunk = adaptive(f, &pts, tol, max_subdivisions)?;
        partial += chunk.value;
        quad_error += chunk.error_estimate;
        subdivisions += chunk.subdivisions;
        chunks.push(chunk.value);
        let s = partial.sum();
        sums.push(s);

        if hi_off >= window.min_extent && chunks.len() >= 2 {
            let last = chunks[chunks.len() - 1].abs();
            let before = chunks[chunks.len() - 2].abs();
            let scale = s.abs();
            if last <= 0.05 * rel_tol * scale && (last < before || last == 0.0) {
                return Ok(QuadResult {
                    value: s,
                    error_estimate: quad_error.sum() + last,
                    subdivisions,
                });
            }
            if sums.len() >= 4 && last < before {
                if let Some((est, err)) = wynn_epsilon(&sums) {
                    if err <= 0.5 * rel_tol * est.abs() {
                        return Ok(QuadResult {
                            value: est,
                            error_estimate: quad_error.sum() + err,
                            subdivisions,
                        });
                    }
                }
            }
        }

        if hi_off >= window.max_extent {
            let end = window.start + window.direction * window.max_extent;
            if let Some((tail, tail_err)) = exponential_tail(f, end, window.direction, window.max_extent) {
                let value = s + tail;
                let error = quad_error.sum() + tail_err;
                if tail_err <= 0.5 * rel_tol * value.abs() {
                    return Ok(QuadResult {
                        value,
                        error_estimate: error,
                        subdivisions,
                    });
                }
            }
            let best = wynn_epsilon(&sums).map_or(s, |(e, _)| e);
            let error = chunks.last().copied().unwrap_or(0.0).abs() + quad_error.sum();
            return Err(QuadError::TailNonConvergence {
                window: (a.min(window.start), b.max(window.start)),
                best,
                error,
            });
        }
        lo_off = hi_off;
        hi_off = (2.0 * hi_off).min(window.max_extent);
    }
}

/// Tail beyond `end` modelled as `f(end) e^{-λ|x - end|}`, with `λ` read off
/// two consecutive log-slopes just inside the window. Returns the tail and
/// the spread between the two slope estimates.
fn exponential_tail<F: Fn(f64) -> f64>(f: &F, end: f64, direction: f64, extent: f64) -> Option<(f64, f64)> {
    let step = (extent / 16.0).min(0.25);
    let f0 = f(end);
    if f0 == 0.0 {
        return Some((0.0, 0.0));
    }
    let f1 = f(end - direction * step);
    let f2 = f(end - 2.0 * direction * step);
    if !(f0.is_finite() && f1.is_finite() && f2.is_finite()) {
        return None;
    }
    if f0.signum() != f1.signum() || f1.signum() != f2.signum() {
        return None;
    }
    let rate_near = (f1 / f0).ln() / step;
    let rate_far = (f2 / f1).ln() / step;
    if !(rate_near > 0.0 && rate_far > 0.0) {
        return None;
    }
    let tail = f0 / rate_near;
    let spread = (f0 / rate_near - f0 / rate_far).abs();
    Some((tail, spread + 4.0 * f64::EPSILON * tail.abs()))
}
