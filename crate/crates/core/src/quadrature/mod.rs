//! Adaptive numerical integration on finite intervals and on `(0, ∞)`.
//!
//! Finite intervals use a globally adaptive G7K15 scheme with forced
//! breakpoints at declared singular points. Half-line integrals go through
//! the substitution `r = e^t`; the `t`-line is covered by geometrically
//! growing windows whose partial sums are accelerated with Wynn's epsilon
//! algorithm. Integrals split at a sphere `r = R` use `u = |log(R/r)|` on each
//! side and integrate in `s = log u`, so the point `r = R` is never sampled.

mod kronrod;
mod sum;
mod tail;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use kronrod::Tolerance;
pub use sum::{compensated_sum, NeumaierSum};
pub use tail::{wynn_epsilon, TailWindow};

/// Default subdivision budget for a single adaptive run.
pub const DEFAULT_MAX_SUBDIVISIONS: usize = 1_000_000;

/// Smallest relative tolerance accepted by the public entry points.
pub const MIN_REL_TOL: f64 = 1e-14;

/// Largest `|log r|` at which `r` is still a finite, nonzero double with room to spare.
pub const MAX_LOG_RADIUS: f64 = 700.0;

const LOG_ENDPOINT_SPLIT: f64 = 0.25;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum QuadError {
    #[error("adaptive quadrature did not converge after {subdivisions} subdivisions (best {best:e}, error {error:e})")]
    NonConvergence { best: f64, error: f64, subdivisions: usize },
    #[error("integrand is not finite at x = {abscissa:e} (value {value})")]
    Domain { abscissa: f64, value: f64 },
    #[error("tail contribution did not settle within the window [{:e}, {:e}] (best {best:e}, error {error:e})", window.0, window.1)]
    TailNonConvergence { window: (f64, f64), best: f64, error: f64 },
    #[error("invalid interval [{a}, {b}]")]
    InvalidInterval { a: f64, b: f64 },
    #[error("relative tolerance {0:e} is outside [1e-14, 1)")]
    InvalidTolerance(f64),
    #[error("decay hint {0} is not integrable")]
    InvalidDecay(String),
}

impl QuadError {
    /// Best available estimate carried by a convergence failure.
    pub fn best_estimate(&self) -> Option<f64> {
        match self {
            QuadError::NonConvergence { best, .. } | QuadError::TailNonConvergence { best, .. } => Some(*best),
            _ => None,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadResult {
    pub value: f64,
    pub error_estimate: f64,
    pub subdivisions: usize,
}

impl QuadResult {
    pub const ZERO: QuadResult = QuadResult {
        value: 0.0,
        error_estimate: 0.0,
        subdivisions: 0,
    };

    /// Multiply value and error by `factor`.
    pub fn scaled(self, factor: f64) -> Self {
        Self {
            value: self.value * factor,
            error_estimate: self.error_estimate * factor.abs(),
            subdivisions: self.subdivisions,
        }
    }

    pub fn combine(self, other: Self) -> Self {
        Self {
            value: self.value + other.value,
            error_estimate: self.error_estimate + other.error_estimate,
            subdivisions: self.subdivisions + other.subdivisions,
        }
    }
}

/// How an integrand on `(0, ∞)` decays at infinity.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub enum DecayHint {
    Exponential,
    /// `|g(r)| = O(r^{-alpha})` with `alpha > 1`.
    Power(f64),
    /// `g` vanishes on `[b, ∞)`.
    CompactSupport(f64),
}

/// A real function of a positive abscissa, plus the points where it (or a
/// derivative) is singular. Singular points become forced breakpoints.
pub struct Integrand<F> {
    eval: F,
    singular_points: Vec<f64>,
}

impl<F: Fn(f64) -> f64> Integrand<F> {
    pub fn new(eval: F) -> Self {
        Self {
            eval,
            singular_points: Vec::new(),
        }
    }

    pub fn with_singular_points<I: IntoIterator<Item = f64>>(mut self, points: I) -> Self {
        self.singular_points.extend(points);
        self.singular_points.sort_by(f64::total_cmp);
        self.singular_points.dedup();
        self
    }

    pub fn eval(&self, x: f64) -> f64 {
        (self.eval)(x)
    }

    pub fn singular_points(&self) -> &[f64] {
        &self.singular_points
    }
}

/// Knobs shared by the entry points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct QuadOptions {
    pub rel_tol: f64,
    pub max_subdivisions: usize,
}

impl QuadOptions {
    pub fn new(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            max_subdivisions: DEFAULT_MAX_SUBDIVISIONS,
        }
    }

    fn validate(&self) -> Result<(), QuadError> {
        if !(self.rel_tol >= MIN_REL_TOL && self.rel_tol < 1.0) {
            return Err(QuadError::InvalidTolerance(self.rel_tol));
        }
        Ok(())
    }
}

/// `∫_a^b g` by adaptive G7K15 bisection, split at every interior singular point.
///
/// When `a == 0` and `0` is a declared singular point, the first panel is
/// mapped through `x = exp(-e^σ)` and integrated on the `σ`-line, which
/// handles logarithmic endpoint singularities such as `1/(x log² x)`.
pub fn integrate_finite<F: Fn(f64) -> f64>(
    g: &Integrand<F>,
    a: f64,
    b: f64,
    rel_tol: f64,
) -> Result<QuadResult, QuadError> {
    integrate_finite_with(g, a, b, &QuadOptions::new(rel_tol))
}

pub fn integrate_finite_with<F: Fn(f64) -> f64>(
    g: &Integrand<F>,
    a: f64,
    b: f64,
    opts: &QuadOptions,
) -> Result<QuadResult, QuadError> {
    opts.validate()?;
    if !(a < b) || !a.is_finite() || !b.is_finite() {
        return Err(QuadError::InvalidInterval { a, b });
    }
    let interior: Vec<f64> = g
        .singular_points()
        .iter()
        .copied()
        .filter(|&p| p > a && p < b)
        .collect();

    let log_endpoint = a == 0.0 && g.singular_points().first() == Some(&0.0);
    if !log_endpoint {
        let mut pts = Vec::with_capacity(interior.len() + 2);
        pts.push(a);
        pts.extend(interior);
        pts.push(b);
        return kronrod::adaptive(
            &|x| g.eval(x),
            &pts,
            Tolerance::relative(opts.rel_tol),
            opts.max_subdivisions,
        );
    }

    // (0, c0] through x = exp(-e^σ): a singularity like 1/(x |log x|^{1+δ})
    // becomes e^{-δσ} in σ. The rest [c0, b] is regular.
    let c0 = interior.first().copied().unwrap_or(b).min(LOG_ENDPOINT_SPLIT);
    let h = |sigma: f64| {
        let e = sigma.exp();
        let x = (-e).exp();
        g.eval(x) * x * e
    };
    let sigma0 = (-c0.ln()).ln();
    let window = TailWindow::new(sigma0, 1.0, MAX_LOG_RADIUS.ln() - sigma0);
    let head = tail::integrate_tail(&h, window, &[], opts.rel_tol, opts.max_subdivisions)?;
    if c0 == b {
        return Ok(head);
    }
    let mut pts = vec![c0];
    pts.extend(interior.into_iter().filter(|&p| p > c0));
    pts.push(b);
    let rest = kronrod::adaptive(
        &|x| g.eval(x),
        &pts,
        Tolerance::relative(opts.rel_tol),
        opts.max_subdivisions,
    )?;
    Ok(head.combine(rest))
}

/// `∫_0^∞ g` via `r = e^t`. Compactly supported integrands reduce to
/// [`integrate_finite`] on the support.
pub fn integrate_halfline<F: Fn(f64) -> f64>(
    g: &Integrand<F>,
    rel_tol: f64,
    decay: DecayHint,
) -> Result<QuadResult, QuadError> {
    let opts = QuadOptions::new(rel_tol);
    opts.validate()?;
    match decay {
        DecayHint::CompactSupport(b) => {
            if !(b > 0.0) {
                return Err(QuadError::InvalidDecay(format!("compact_support({b})")));
            }
            integrate_finite_with(g, 0.0, b, &opts)
        }
        DecayHint::Power(alpha) if !(alpha > 1.0) => Err(QuadError::InvalidDecay(format!("power({alpha})"))),
        DecayHint::Power(_) | DecayHint::Exponential => {
            let h = |t: f64| {
                let r = t.exp();
                g.eval(r) * r
            };
            let breaks: Vec<f64> = g
                .singular_points()
                .iter()
                .filter(|&&p| p > 0.0)
                .map(|p| p.ln())
                .collect();
            integrate_line(&h, 0.0, &breaks, MAX_LOG_RADIUS, &opts)
        }
    }
}

/// `∫_{-∞}^{∞} h(t) dt` for an integrand already expressed in the log
/// variable, sweeping outward from `center` up to `max_extent` on each side.
pub fn integrate_line<F: Fn(f64) -> f64>(
    h: &F,
    center: f64,
    breakpoints: &[f64],
    max_extent: f64,
    opts: &QuadOptions,
) -> Result<QuadResult, QuadError> {
    opts.validate()?;
    let right = tail::integrate_tail(
        h,
        TailWindow::new(center, 1.0, max_extent),
        breakpoints,
        opts.rel_tol,
        opts.max_subdivisions,
    )?;
    let left = tail::integrate_tail(
        h,
        TailWindow::new(center, -1.0, max_extent),
        breakpoints,
        opts.rel_tol,
        opts.max_subdivisions,
    )?;
    Ok(right.combine(left))
}

/// `∫_a^b h(t) dt` on a finite window with optional interior breakpoints.
pub fn integrate_window<F: Fn(f64) -> f64>(
    h: &F,
    a: f64,
    b: f64,
    breakpoints: &[f64],
    opts: &QuadOptions,
) -> Result<QuadResult, QuadError> {
    opts.validate()?;
    if !(a < b) {
        return Err(QuadError::InvalidInterval { a, b });
    }
    let mut pts = vec![a];
    pts.extend(breakpoints.iter().copied().filter(|&p| p > a && p < b));
    pts.push(b);
    pts.sort_by(f64::total_cmp);
    kronrod::adaptive(h, &pts, Tolerance::relative(opts.rel_tol), opts.max_subdivisions)
}

/// Range of `s = log u` explored on each side of a split point.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitRange {
    /// Most negative `s` (closest approach to the sphere).
    pub min_log_u: f64,
    /// Largest `s` (farthest from the sphere).
    pub max_log_u: f64,
    /// The integrands vanish outside the range, which is then integrated
    /// directly rather than swept outward from `s = 0`.
    pub compact: bool,
}

/// Inner (`r < R`) and outer (`r > R`) pieces of a split integral.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SplitResult {
    pub inner: QuadResult,
    pub outer: QuadResult,
}

impl SplitResult {
    pub fn total(&self) -> QuadResult {
        self.inner.combine(self.outer)
    }
}

/// Integrate two functions of `u ∈ (0, ∞)` (one per side of a split point),
/// each through `u = e^s`. `breaks_*` are breakpoints in `u`.
pub fn integrate_split_sides<Fi, Fo>(
    inner: &Fi,
    outer: &Fo,
    breaks_inner: &[f64],
    breaks_outer: &[f64],
    range: SplitRange,
    opts: &QuadOptions,
) -> Result<SplitResult, QuadError>
where
    Fi: Fn(f64) -> f64,
    Fo: Fn(f64) -> f64,
{
    opts.validate()?;
    let side = |hu: &dyn Fn(f64) -> f64, breaks: &[f64]| -> Result<QuadResult, QuadError> {
        let hs = |s: f64| {
            let u = s.exp();
            hu(u) * u
        };
        let sb: Vec<f64> = breaks.iter().filter(|&&u| u > 0.0).map(|u| u.ln()).collect();
        if range.compact {
            return integrate_window(&hs, range.min_log_u, range.max_log_u, &sb, opts);
        }
        let up = tail::integrate_tail(
            &hs,
            TailWindow::new(0.0, 1.0, range.max_log_u),
            &sb,
            opts.rel_tol,
            opts.max_subdivisions,
        )?;
        let down = tail::integrate_tail(
            &hs,
            TailWindow::new(0.0, -1.0, -range.min_log_u),
            &sb,
            opts.rel_tol,
            opts.max_subdivisions,
        )?;
        Ok(up.combine(down))
    };
    Ok(SplitResult {
        inner: side(inner, breaks_inner)?,
        outer: side(outer, breaks_outer)?,
    })
}

/// `∫_0^R g + ∫_R^∞ g`, each side through `t = log r` and then
/// `u = |log(R/r)|`, so that `r = R` is never sampled.
pub fn integrate_log_split<F: Fn(f64) -> f64>(
    g: &Integrand<F>,
    radius: f64,
    rel_tol: f64,
) -> Result<QuadResult, QuadError> {
    integrate_log_split_parts(g, radius, rel_tol).map(|s| s.total())
}

pub fn integrate_log_split_parts<F: Fn(f64) -> f64>(
    g: &Integrand<F>,
    radius: f64,
    rel_tol: f64,
) -> Result<SplitResult, QuadError> {
    if !(radius > 0.0 && radius.is_finite()) {
        return Err(QuadError::InvalidInterval { a: 0.0, b: radius });
    }
    let opts = QuadOptions::new(rel_tol);
    let log_r = radius.ln();
    // u must keep r = R e^{±u} finite and distinct from R
    let range = SplitRange {
        min_log_u: (64.0 * f64::EPSILON).ln(),
        max_log_u: (MAX_LOG_RADIUS - log_r.abs()).ln(),
        compact: false,
    };
    let inner = |u: f64| {
        let r = radius * (-u).exp();
        g.eval(r) * r
    };
    let outer = |u: f64| {
        let r = radius * u.exp();
        g.eval(r) * r
    };
    let mut bi = Vec::new();
    let mut bo = Vec::new();
    for &p in g.singular_points() {
        if p > 0.0 && p < radius {
            bi.push(log_r - p.ln());
        } else if p > radius {
            bo.push(p.ln() - log_r);
        }
    }
    integrate_split_sides(&inner, &outer, &bi, &bo, range, &opts)
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::{LN_2, PI};

    #[test]
    fn polynomial_on_unit_interval() {
        let g = Integrand::new(|x: f64| x * x);
        let r = integrate_finite(&g, 0.0, 1.0, 1e-12).unwrap();
        assert!((r.value - 1.0 / 3.0).abs() <= 1e-12);
    }

    #[test]
    fn sine_over_half_period() {
        let g = Integrand::new(f64::sin);
        let r = integrate_finite(&g, 0.0, PI, 1e-12).unwrap();
        assert!((r.value - 2.0).abs() <= 1e-12);
        assert!(r.error_estimate <= 1e-12 * 2.0);
    }

    #[test]
    fn logarithmic_endpoint_singularity() {
        // antiderivative -1/log x, so the value is 1/log 2
        let g = Integrand::new(|x: f64| 1.0 / (x * x.ln().powi(2))).with_singular_points([0.0]);
        let r = integrate_finite(&g, 0.0, 0.5, 1e-10).unwrap();
        assert!((r.value - 1.0 / LN_2).abs() < 1e-9, "{}", r.value);
    }

    #[test]
    fn interior_singular_points_are_breakpoints() {
        let g = Integrand::new(|x: f64| {
            assert!(x != 0.5, "sampled the singular point");
            (x - 0.5).abs().sqrt()
        })
        .with_singular_points([0.5]);
        let r = integrate_finite(&g, 0.0, 1.0, 1e-10).unwrap();
        let exact = 2.0 * (2.0 / 3.0) * 0.5f64.powf(1.5);
        assert!((r.value - exact).abs() < 1e-9);
    }

    #[test]
    fn nan_sample_names_the_abscissa() {
        let g = Integrand::new(|x: f64| if x > 0.7 { f64::NAN } else { x });
        match integrate_finite(&g, 0.0, 1.0, 1e-8).unwrap_err() {
            QuadError::Domain { abscissa, .. } => assert!(abscissa > 0.7 && abscissa < 1.0),
            e => panic!("{e:?}"),
        }
    }

    #[test]
    fn rejects_bad_interval_and_tolerance() {
        let g = Integrand::new(|x: f64| x);
        assert!(matches!(
            integrate_finite(&g, 1.0, 1.0, 1e-8),
            Err(QuadError::InvalidInterval { .. })
        ));
        assert!(matches!(
            integrate_finite(&g, 0.0, 1.0, 1e-16),
            Err(QuadError::InvalidTolerance(_))
        ));
    }

    #[test]
    fn exponential_on_halfline() {
        let g = Integrand::new(|x: f64| (-x).exp());
        let r = integrate_halfline(&g, 1e-10, DecayHint::Exponential).unwrap();
        assert!((r.value - 1.0).abs() <= 1e-10);
    }

    #[test]
    fn gaussian_moment_on_halfline() {
        let g = Integrand::new(|x: f64| x * x * (-x * x).exp());
        let r = integrate_halfline(&g, 1e-10, DecayHint::Exponential).unwrap();
        assert!((r.value - PI.sqrt() / 4.0).abs() < 1e-10);
    }

    #[test]
    fn compact_support_on_halfline() {
        let g = Integrand::new(|x: f64| if x < 1.0 { x } else { 0.0 });
        let r = integrate_halfline(&g, 1e-10, DecayHint::CompactSupport(1.0)).unwrap();
        assert!((r.value - 0.5).abs() < 1e-10);
    }

    #[test]
    fn power_tail_on_halfline() {
        // ∫_0^∞ dr/(1+r)^3 = 1/2
        let g = Integrand::new(|x: f64| (1.0 + x).powi(-3));
        let r = integrate_halfline(&g, 1e-10, DecayHint::Power(3.0)).unwrap();
        assert!((r.value - 0.5).abs() < 1e-9);
        assert!(integrate_halfline(&g, 1e-10, DecayHint::Power(1.0)).is_err());
    }

    #[test]
    fn split_of_zero_integrand() {
        let g = Integrand::new(|_x: f64| 0.0);
        let r = integrate_log_split(&g, 1.0, 1e-10).unwrap();
        assert_eq!(r.value, 0.0);
    }

    #[test]
    fn split_of_smooth_integrand() {
        let g = Integrand::new(|r: f64| {
            assert!(r != 1.0, "sampled the split point");
            r * (-r).exp()
        });
        let parts = integrate_log_split_parts(&g, 1.0, 1e-10).unwrap();
        let inner_exact = 1.0 - 2.0 * (-1.0f64).exp();
        assert!((parts.inner.value - inner_exact).abs() < 1e-10);
        assert!((parts.total().value - 1.0).abs() < 1e-10);
    }
}
