//! Radial profiles `φ(r)` with analytic derivatives.
//!
//! Profiles are evaluated natively in the log variable `t = log r`:
//! [`RadialProfile::value_log`] returns `φ(e^t)` and
//! [`RadialProfile::rderiv_log`] returns `r φ'(r)` at `r = e^t`. Every weighted
//! norm in the radial identities is an integral of these two quantities
//! against `dt`, which keeps very wide truncation windows representable.

use serde::{Deserialize, Serialize};

use super::smooth::LogWindow;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum Decay {
    Gaussian,
    Exponential,
    /// `|φ(r)| = O(r^{-alpha})` at infinity.
    Power(f64),
    /// Vanishes outside `[a, b]`.
    CompactSupport(f64, f64),
    /// Constant at infinity (not decaying).
    None,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum RadialShape {
    Zero,
    Constant,
    /// `e^{-r²/2}`
    Gaussian,
    /// `e^{-r}`
    ExpDecay,
    /// `exp(1 - 1/(1 - y²))` with `y` the affine image of `(a, b)` on `(-1, 1)`.
    Bump {
        a: f64,
        b: f64,
    },
    /// `(1 + r²)^{-alpha/2}`
    PowerCutoff {
        alpha: f64,
    },
    /// `e^{-(log r)²}`
    LogGaussian,
    /// `r^{-exponent} χ(log r)`
    Subcritical {
        exponent: f64,
        window: LogWindow,
    },
    /// `|log(R/r)|^{1/2} χ(log |log(R/r)|)`; vanishes near `r = R`.
    LogExtremizer {
        log_radius: f64,
        window: LogWindow,
    },
}

/// A log extremizer seen from its own sphere at log distance `u`, side `σ`.
#[derive(Clone, Copy, Debug, Default, PartialEq)]
pub struct LogDistancePoint {
    /// `φ - φ_R`
    pub diff: f64,
    /// `r φ'`
    pub rderiv: f64,
    /// `(φ - φ_R) / (σ u)`
    pub quotient: f64,
    /// `r d/dr` of `(φ - φ_R) u^{-1/2}`
    pub w_rderiv: f64,
}

/// `φ(r) = amplitude · shape(λ r)`, stored with `log_scale = log λ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct RadialProfile {
    pub label: String,
    pub shape: RadialShape,
    pub amplitude: f64,
    pub log_scale: f64,
    pub decay: Decay,
}

impl RadialProfile {
    pub fn new(label: impl Into<String>, shape: RadialShape, decay: Decay) -> Self {
        Self {
            label: label.into(),
            shape,
            amplitude: 1.0,
            log_scale: 0.0,
            decay,
        }
    }

    pub fn with_amplitude(mut self, amplitude: f64) -> Self {
        self.amplitude = amplitude;
        self
    }

    /// The profile `r ↦ φ(λ r)`.
    pub fn dilated(&self, lambda: f64) -> Self {
        let mut out = self.clone();
        out.log_scale += lambda.ln();
        out.decay = match self.decay {
            Decay::CompactSupport(a, b) => Decay::CompactSupport(a / lambda, b / lambda),
            d => d,
        };
        out.label = format!("{}@x{}", self.label, lambda);
        out
    }

    /// `φ(e^t)`.
    pub fn value_log(&self, t: f64) -> f64 {
        if self.amplitude == 0.0 {
            return 0.0;
        }
        self.amplitude * shape_value(&self.shape, t + self.log_scale)
    }

    /// `r φ'(r)` at `r = e^t`.
    pub fn rderiv_log(&self, t: f64) -> f64 {
        if self.amplitude == 0.0 {
            return 0.0;
        }
        self.amplitude * shape_rderiv(&self.shape, t + self.log_scale)
    }

    pub fn value(&self, r: f64) -> f64 {
        self.value_log(r.ln())
    }

    pub fn deriv(&self, r: f64) -> f64 {
        self.rderiv_log(r.ln()) / r
    }

    /// Interval of `t` outside of which the profile vanishes identically.
    pub fn log_support(&self) -> Option<(f64, f64)> {
        if self.amplitude == 0.0 {
            return Some((0.0, 0.0));
        }
        let (lo, hi) = match &self.shape {
            RadialShape::Zero => return Some((0.0, 0.0)),
            RadialShape::Bump { a, b } => (a.ln(), b.ln()),
            RadialShape::Subcritical { window, .. } => (window.lo, window.hi),
            RadialShape::LogExtremizer { log_radius, window } => {
                let reach = window.hi.exp();
                (log_radius - reach, log_radius + reach)
            }
            _ => return None,
        };
        Some((lo - self.log_scale, hi - self.log_scale))
    }

    /// A point of `t` near the bulk of the profile, used to seed window sweeps.
    pub fn log_center(&self) -> f64 {
        match self.log_support() {
            Some((lo, hi)) => 0.5 * (lo + hi),
            None => -self.log_scale,
        }
    }

    /// Quantities at `t = t_r - σ u` for a log extremizer centered exactly
    /// at `t_r`, computed from `u` itself so that small `u` keeps full
    /// relative precision. `None` for every other profile.
    pub fn eval_at_log_distance(&self, t_r: f64, sigma: f64, u: f64) -> Option<LogDistancePoint> {
        let RadialShape::LogExtremizer { log_radius, window } = &self.shape else {
            return None;
        };
        if log_radius - self.log_scale != t_r {
            return None;
        }
        let zero = LogDistancePoint::default();
        if self.amplitude == 0.0 || u <= 0.0 {
            return Some(zero);
        }
        let s = u.ln();
        let (chi, dchi) = (window.value(s), window.deriv(s));
        if chi == 0.0 && dchi == 0.0 {
            return Some(zero);
        }
        let su = u.sqrt();
        let a = self.amplitude;
        Some(LogDistancePoint {
            diff: a * su * chi,
            rderiv: -sigma * a * (0.5 * chi + dchi) / su,
            quotient: sigma * a * chi / su,
            w_rderiv: -sigma * a * dchi / u,
        })
    }

    pub fn is_zero(&self) -> bool {
        self.amplitude == 0.0 || self.shape == RadialShape::Zero
    }
}

fn shape_value(shape: &RadialShape, t: f64) -> f64 {
    match *shape {
        RadialShape::Zero => 0.0,
        RadialShape::Constant => 1.0,
        RadialShape::Gaussian => (-0.5 * (2.0 * t).exp()).exp(),
        RadialShape::ExpDecay => (-t.exp()).exp(),
        RadialShape::Bump { a, b } => {
            let r = t.exp();
            if r <= a || r >= b {
                return 0.0;
            }
            let y = (2.0 * r - a - b) / (b - a);
            (1.0 - 1.0 / (1.0 - y * y)).exp()
        }
        RadialShape::PowerCutoff { alpha } => {
            if t > 0.0 {
                (-alpha * t).exp() * (1.0 + (-2.0 * t).exp()).powf(-0.5 * alpha)
            } else {
                (1.0 + (2.0 * t).exp()).powf(-0.5 * alpha)
            }
        }
        RadialShape::LogGaussian => (-t * t).exp(),
        RadialShape::Subcritical { exponent, window } => {
            let chi = window.value(t);
            if chi == 0.0 {
                0.0
            } else {
                (-exponent * t).exp() * chi
            }
        }
        RadialShape::LogExtremizer { log_radius, window } => {
            let u = log_radius - t;
            if u == 0.0 {
                return 0.0;
            }
            let chi = window.value(u.abs().ln());
            if chi == 0.0 {
                0.0
            } else {
                u.abs().sqrt() * chi
            }
        }
    }
}

fn shape_rderiv(shape: &RadialShape, t: f64) -> f64 {
    match *shape {
        RadialShape::Zero | RadialShape::Constant => 0.0,
        RadialShape::Gaussian => {
            let v = shape_value(shape, t);
            if v == 0.0 {
                0.0
            } else {
                -(2.0 * t).exp() * v
            }
        }
        RadialShape::ExpDecay => {
            let v = shape_value(shape, t);
            if v == 0.0 {
                0.0
            } else {
                -t.exp() * v
            }
        }
        RadialShape::Bump { a, b } => {
            let r = t.exp();
            if r <= a || r >= b {
                return 0.0;
            }
            let y = (2.0 * r - a - b) / (b - a);
            let q = 1.0 - y * y;
            let v = (1.0 - 1.0 / q).exp();
            r * v * (-2.0 * y / (q * q)) * (2.0 / (b - a))
        }
        RadialShape::PowerCutoff { alpha } => {
            let v = shape_value(shape, t);
            -alpha * v / (1.0 + (-2.0 * t).exp())
        }
        RadialShape::LogGaussian => -2.0 * t * (-t * t).exp(),
        RadialShape::Subcritical { exponent, window } => {
            let chi = window.value(t);
            let dchi = window.deriv(t);
            if chi == 0.0 && dchi == 0.0 {
                0.0
            } else {
                (-exponent * t).exp() * (dchi - exponent * chi)
            }
        }
        RadialShape::LogExtremizer { log_radius, window } => {
            let u = log_radius - t;
            if u == 0.0 {
                return 0.0;
            }
            let s = u.abs().ln();
            let chi = window.value(s);
            let dchi = window.deriv(s);
            if chi == 0.0 && dchi == 0.0 {
                return 0.0;
            }
            // dφ/du = sign(u) |u|^{-1/2} (χ/2 + χ'), and dt = -du
            -u.signum() * (0.5 * chi + dchi) / u.abs().sqrt()
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn fd_check(p: &RadialProfile, r: f64, step: f64) {
        let h = step * r;
        let central = |h: f64| (p.value(r + h) - p.value(r - h)) / (2.0 * h);
        // one Richardson step; the bump edges are too steep for a bare central difference
        let fd = (4.0 * central(0.5 * h) - central(h)) / 3.0;
        let d = p.deriv(r);
        if p.value(r).abs() < 1e-30 && d.abs() < 1e-30 {
            // flat edge of a C^∞ cutoff, below any differencing resolution
            return;
        }
        let scale = d.abs().max(p.value(r).abs() / r).max(1e-300);
        assert!(
            (fd - d).abs() <= 1e-6 * scale,
            "{}: r = {r}, fd = {fd}, analytic = {d}",
            p.label
        );
    }

    #[test]
    fn gaussian_matches_closed_form() {
        let p = RadialProfile::new("g", RadialShape::Gaussian, Decay::Gaussian);
        for &r in &[0.3, 1.0, 2.5] {
            assert!((p.value(r) - (-r * r / 2.0f64).exp()).abs() < 1e-15);
            assert!((p.deriv(r) + r * (-r * r / 2.0f64).exp()).abs() < 1e-14);
        }
        // far tail stays finite
        assert_eq!(p.value_log(800.0), 0.0);
        assert_eq!(p.rderiv_log(800.0), 0.0);
    }

    #[test]
    fn power_cutoff_is_stable_at_extremes() {
        let p = RadialProfile::new("p", RadialShape::PowerCutoff { alpha: 3.0 }, Decay::Power(3.0));
        assert!(p.value_log(1e6).is_finite());
        assert!(p.rderiv_log(1e6).is_finite());
        assert!((p.value_log(-1e6) - 1.0).abs() < 1e-15);
        assert_eq!(p.rderiv_log(-1e6), 0.0);
        let r: f64 = 7.0;
        assert!((p.value(r) - (1.0 + r * r).powf(-1.5)).abs() < 1e-15);
    }

    #[test]
    fn derivatives_match_finite_differences() {
        let profiles = vec![
            RadialProfile::new("g", RadialShape::Gaussian, Decay::Gaussian),
            RadialProfile::new("e", RadialShape::ExpDecay, Decay::Exponential),
            RadialProfile::new(
                "b",
                RadialShape::Bump { a: 0.5, b: 3.0 },
                Decay::CompactSupport(0.5, 3.0),
            ),
            RadialProfile::new("p", RadialShape::PowerCutoff { alpha: 2.5 }, Decay::Power(2.5)),
            RadialProfile::new("lg", RadialShape::LogGaussian, Decay::Gaussian),
            RadialProfile::new(
                "s",
                RadialShape::Subcritical {
                    exponent: 0.5,
                    window: LogWindow::symmetric(3.0),
                },
                Decay::CompactSupport(3f64.exp().recip(), 3f64.exp()),
            ),
            RadialProfile::new(
                "l",
                RadialShape::LogExtremizer {
                    log_radius: 0.2,
                    window: LogWindow::symmetric(1.5),
                },
                Decay::CompactSupport(0.0, f64::INFINITY),
            ),
        ];
        for p in &profiles {
            for i in 0..40 {
                let r = 0.1 * (100f64).powf(i as f64 / 39.0);
                fd_check(p, r, 1e-5);
                fd_check(&p.dilated(2.0), r, 1e-5);
            }
        }
    }

    #[test]
    fn dilation_shifts_the_log_variable() {
        let p = RadialProfile::new("g", RadialShape::Gaussian, Decay::Gaussian).dilated(3.0);
        assert!((p.value(1.0) - (-4.5f64).exp()).abs() < 1e-15);
        assert!((p.deriv(1.0) + 9.0 * (-4.5f64).exp()).abs() < 1e-13);
    }

    #[test]
    fn log_extremizer_vanishes_near_its_sphere() {
        let w = LogWindow::symmetric(4.0);
        let p = RadialProfile::new(
            "l",
            RadialShape::LogExtremizer {
                log_radius: 0.0,
                window: w,
            },
            Decay::None,
        );
        assert_eq!(p.value(1.0), 0.0);
        assert_eq!(p.value((1e-3f64).exp()), 0.0);
        // on the plateau the profile is exactly |log(R/r)|^{1/2}
        let r = 0.5f64;
        assert!((p.value(r) - (1.0 / r).ln().sqrt()).abs() < 1e-15);
    }
}
