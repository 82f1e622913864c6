//! C^∞ transition functions used to truncate extremizer forms.

use serde::{Deserialize, Serialize};

/// Share of each half-window occupied by the cutoff transition.
pub const TRANSITION_FRACTION: f64 = 0.5;

#[inline]
fn h(t: f64) -> f64 {
    if t > 0.0 {
        (-1.0 / t).exp()
    } else {
        0.0
    }
}

/// `s(t) = h(t) / (h(t) + h(1 - t))` with `h(t) = e^{-1/t}` for `t > 0`, else 0.
/// Equal to 0 for `t ≤ 0` and 1 for `t ≥ 1`.
pub fn smooth_step(t: f64) -> f64 {
    if t <= 0.0 {
        0.0
    } else if t >= 1.0 {
        1.0
    } else {
        let a = h(t);
        let b = h(1.0 - t);
        a / (a + b)
    }
}

pub fn smooth_step_deriv(t: f64) -> f64 {
    if t <= 0.0 || t >= 1.0 {
        return 0.0;
    }
    let a = h(t);
    let b = h(1.0 - t);
    let da = a / (t * t);
    let db = b / ((1.0 - t) * (1.0 - t));
    let den = a + b;
    (da * b + a * db) / (den * den)
}

/// Plateau window on `[lo, hi]` with smooth transitions of length `width`
/// at both ends: 1 on `[lo + width, hi - width]`, 0 outside `(lo, hi)`.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct LogWindow {
    pub lo: f64,
    pub hi: f64,
    pub width: f64,
}

impl LogWindow {
    /// Window on `[-half, half]` with transitions of `TRANSITION_FRACTION * half`.
    pub fn symmetric(half: f64) -> Self {
        Self {
            lo: -half,
            hi: half,
            width: TRANSITION_FRACTION * half,
        }
    }

    pub fn value(&self, t: f64) -> f64 {
        if t <= self.lo || t >= self.hi {
            return 0.0;
        }
        smooth_step((t - self.lo) / self.width) * smooth_step((self.hi - t) / self.width)
    }

    pub fn deriv(&self, t: f64) -> f64 {
        if t <= self.lo || t >= self.hi {
            return 0.0;
        }
        let up = (t - self.lo) / self.width;
        let down = (self.hi - t) / self.width;
        (smooth_step_deriv(up) * smooth_step(down) - smooth_step(up) * smooth_step_deriv(down)) / self.width
    }

    /// Interval on which the window equals 1.
    pub fn plateau(&self) -> (f64, f64) {
        (self.lo + self.width, self.hi - self.width)
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn step_limits_and_symmetry() {
        assert_eq!(smooth_step(-0.5), 0.0);
        assert_eq!(smooth_step(1.5), 1.0);
        assert!((smooth_step(0.5) - 0.5).abs() < 1e-15);
        for &t in &[0.1, 0.3, 0.77] {
            assert!((smooth_step(t) + smooth_step(1.0 - t) - 1.0).abs() < 1e-15);
        }
    }

    #[test]
    fn step_derivative_matches_central_difference() {
        let d = 1e-6;
        for i in 1..50 {
            let t = i as f64 / 50.0;
            let fd = (smooth_step(t + d) - smooth_step(t - d)) / (2.0 * d);
            assert!((fd - smooth_step_deriv(t)).abs() < 1e-7, "t = {t}");
        }
    }

    #[test]
    fn window_plateau_and_derivative() {
        let w = LogWindow::symmetric(8.0);
        assert_eq!(w.plateau(), (-4.0, 4.0));
        assert_eq!(w.value(0.0), 1.0);
        assert_eq!(w.value(8.0), 0.0);
        let d = 1e-6;
        for &t in &[-7.0, -5.5, -3.0, 5.2, 7.9] {
            let fd = (w.value(t + d) - w.value(t - d)) / (2.0 * d);
            assert!((fd - w.deriv(t)).abs() < 1e-7);
        }
    }
}
