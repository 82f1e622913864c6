//! Rayleigh-quotient sweeps along truncated extremizer families, and the
//! logarithmic divergence of the exact extremizer forms.

mod fit;

use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::functions::{ExtremizerKind, ExtremizerSpec, ProductTestFunction};
use crate::identities::{
    eval_t2, evaluate, EvalConfig, IdentityError, IdentityId, IdentityParams, IdentityReport, Subject, TestSubject,
};
use crate::quadrature::{integrate_window, QuadOptions};

pub use fit::{affine_fit, AffineFit};

/// Relative floor on quotient budgets, covering rounding in the ratio.
const BUDGET_FLOOR: f64 = 1e-12;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SharpnessError {
    #[error(transparent)]
    Identity(#[from] IdentityError),
    #[error("{0}: main term vanishes, quotient undefined")]
    UndefinedQuotient(IdentityId),
    #[error("{identity}: {reason}")]
    PropertyViolation {
        identity: IdentityId,
        reason: String,
        result: Box<SweepResult>,
    },
    #[error("invalid input: {0}")]
    InvalidInput(String),
}

/// A Rayleigh quotient with the propagated quadrature error.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Quotient {
    pub value: f64,
    pub budget: f64,
}

/// Square of the best constant: `4/(n-2)²`, `4`, or `(2/p)²`.
pub fn sharp_constant(id: IdentityId, params: &IdentityParams) -> Result<f64, SharpnessError> {
    let missing = |what: &str| SharpnessError::InvalidInput(format!("{id} needs `{what}`"));
    Ok(match id.theorem() {
        1 => {
            let n = params.n.ok_or_else(|| missing("n"))?;
            if n < 3 {
                return Err(SharpnessError::InvalidInput(format!("{id} needs n >= 3")));
            }
            4.0 / ((n - 2) as f64).powi(2)
        }
        2 => 4.0,
        _ => {
            let p = params.p.ok_or_else(|| missing("p"))?;
            if !(p > 0.0) {
                return Err(SharpnessError::InvalidInput(format!("{id} needs p > 0")));
            }
            (2.0 / p).powi(2)
        }
    })
}

/// Unscaled left side over the main term, with its error budget.
pub fn rayleigh_quotient_with_budget(
    id: IdentityId,
    subject: Subject<'_>,
    params: &IdentityParams,
    cfg: &EvalConfig,
) -> Result<Quotient, SharpnessError> {
    let sharp = sharp_constant(id, params)?;
    let ev = evaluate(id, subject, params, cfg)?;
    let main = ev
        .term("main_term")
        .map(|t| t.as_result())
        .ok_or(SharpnessError::UndefinedQuotient(id))?;
    let lhs = ev
        .term("lhs")
        .map(|t| t.as_result())
        .ok_or(SharpnessError::UndefinedQuotient(id))?;
    if main.value == 0.0 {
        return Err(SharpnessError::UndefinedQuotient(id));
    }
    // every scaled left side is the unscaled norm over the sharp constant
    let value = sharp * lhs.value / main.value;
    let rel = lhs.error_estimate / lhs.value.abs().max(f64::MIN_POSITIVE) + main.error_estimate / main.value.abs();
    Ok(Quotient {
        value,
        budget: value.abs() * (rel + BUDGET_FLOOR),
    })
}

/// `‖u‖² / ‖v‖²` for the pair `(u, v)` of the identity; its supremum is
/// [`sharp_constant`].
pub fn rayleigh_quotient(
    id: IdentityId,
    subject: Subject<'_>,
    params: &IdentityParams,
    cfg: &EvalConfig,
) -> Result<f64, SharpnessError> {
    rayleigh_quotient_with_budget(id, subject, params, cfg).map(|q| q.value)
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub eps: f64,
    pub quotient: f64,
    pub budget: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct SweepResult {
    pub identity_id: IdentityId,
    pub family_label: String,
    /// Ordered by `eps` descending.
    pub points: Vec<SweepPoint>,
    pub sharp_value: f64,
    /// Final quotient over `sharp_value`.
    pub attained_fraction: f64,
    pub monotone: bool,
    pub bounded: bool,
}

impl SweepResult {
    pub fn passed(&self, min_fraction: f64) -> bool {
        self.monotone && self.bounded && self.attained_fraction >= min_fraction
    }
}

/// Family parameters for truncation `eps`. Families without a truncation
/// parameter give the same function at every `eps`.
fn family_params(family: &str, eps: f64, params: &IdentityParams) -> Vec<f64> {
    match family {
        "subcritical_extremizer_approx" => vec![eps],
        "log_extremizer_approx" => vec![eps, params.R.unwrap_or(1.0)],
        "extremizer_forward_approx" | "extremizer_backward_approx" => vec![params.p.unwrap_or(f64::NAN), eps],
        _ => Vec::new(),
    }
}

/// Quotients of `family` at each truncation `eps`, sorted by `eps`
/// descending; fails if they decrease or exceed the sharp constant beyond
/// the quadrature budget.
pub fn sharpness_sweep(
    id: IdentityId,
    family: &str,
    eps_list: &[f64],
    params: &IdentityParams,
    cfg: &EvalConfig,
) -> Result<SweepResult, SharpnessError> {
    let mut eps: Vec<f64> = eps_list.to_vec();
    if eps.is_empty() || eps.iter().any(|e| !(*e > 0.0)) {
        return Err(SharpnessError::InvalidInput(
            "eps list must be nonempty and positive".into(),
        ));
    }
    eps.sort_by(|a, b| b.total_cmp(a));
    eps.dedup();
    let subjects = eps
        .iter()
        .map(|&e| TestSubject::from_catalogue(id, family, &family_params(family, e, params), params).map(|s| (e, s)))
        .collect::<Result<Vec<_>, _>>()?;
    sweep_subjects(id, family, &subjects, params, cfg)
}

/// As [`sharpness_sweep`] for explicitly constructed functions, which must
/// already be ordered by `eps` descending.
pub fn sweep_subjects(
    id: IdentityId,
    label: &str,
    subjects: &[(f64, TestSubject)],
    params: &IdentityParams,
    cfg: &EvalConfig,
) -> Result<SweepResult, SharpnessError> {
    let sharp = sharp_constant(id, params)?;
    let quotients: Vec<Result<Quotient, SharpnessError>> = std::thread::scope(|scope| {
        let handles: Vec<_> = subjects
            .iter()
            .map(|(_, s)| scope.spawn(move || rayleigh_quotient_with_budget(id, s.as_subject(), params, cfg)))
            .collect();
        handles
            .into_iter()
            .map(|h| h.join().expect("sweep worker panicked"))
            .collect()
    });
    let mut points = Vec::with_capacity(subjects.len());
    for ((eps, _), q) in subjects.iter().zip(quotients) {
        let q = q?;
        points.push(SweepPoint {
            eps: *eps,
            quotient: q.value,
            budget: q.budget,
        });
    }
    let monotone = points
        .windows(2)
        .all(|w| w[1].quotient >= w[0].quotient - (w[0].budget + w[1].budget));
    let bounded = points.iter().all(|p| p.quotient <= sharp + p.budget);
    let last = points.last().map_or(0.0, |p| p.quotient);
    let result = SweepResult {
        identity_id: id,
        family_label: label.to_string(),
        points,
        sharp_value: sharp,
        attained_fraction: last / sharp,
        monotone,
        bounded,
    };
    if !monotone || !bounded {
        let reason = if !monotone {
            "quotient decreases as eps decreases".to_string()
        } else {
            "quotient exceeds the sharp constant".to_string()
        };
        return Err(SharpnessError::PropertyViolation {
            identity: id,
            reason,
            result: Box::new(result),
        });
    }
    Ok(result)
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum WindowSide {
    Whole,
    Inner,
    Outer,
}

/// One windowed integral of an extremizer form's left-side density.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergencePoint {
    pub lo: f64,
    pub hi: f64,
    pub side: WindowSide,
    pub log_width: f64,
    pub integral: f64,
    pub error_estimate: f64,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct DivergenceReport {
    pub identity_id: String,
    pub kind: ExtremizerKind,
    pub points: Vec<DivergencePoint>,
    pub fitted_slope: f64,
    pub fitted_intercept: f64,
    /// Largest deviation from the affine fit over `max(1, max |integral|)`.
    pub fit_residual: f64,
    pub expected_slope: f64,
    pub slope_rel_error: f64,
    pub passed: bool,
}

/// Slope tolerance of the divergence fit.
pub const SLOPE_REL_TOL: f64 = 1e-6;
/// Affine-fit residual tolerance.
pub const FIT_RESIDUAL_TOL: f64 = 1e-8;

/// Integrates the unscaled left-side density of `spec` over each window
/// and fits the integrals against the log of the window.
///
/// Windows are `(ε, M)` in `|x|` for the power forms and `(δ, U)` in
/// `u = |log(R/|x|)|` for the logarithmic form, which is integrated on
/// each side of the sphere separately.
pub fn divergence_diagnostic(
    spec: &ExtremizerSpec,
    windows: &[(f64, f64)],
    cfg: &EvalConfig,
) -> Result<DivergenceReport, SharpnessError> {
    for &(lo, hi) in windows {
        if !(lo > 0.0 && hi > lo && hi.is_finite()) {
            return Err(SharpnessError::InvalidInput(format!(
                "window ({lo}, {hi}) needs 0 < lo < hi"
            )));
        }
    }
    let opts = QuadOptions::new(cfg.rel_tol);
    let quad = |h: &dyn Fn(f64) -> f64, lo: f64, hi: f64| -> Result<(f64, f64), SharpnessError> {
        integrate_window(&h, lo.ln(), hi.ln(), &[], &opts)
            .map(|r| (r.value, r.error_estimate))
            .map_err(|e| SharpnessError::InvalidInput(format!("window ({lo}, {hi}): {e}")))
    };
    let mut points = Vec::new();
    for &(lo, hi) in windows {
        let log_width = (hi / lo).ln();
        match spec.kind {
            ExtremizerKind::Logarithmic { n, radius } => {
                if hi * n as f64 >= crate::quadrature::MAX_LOG_RADIUS {
                    return Err(SharpnessError::InvalidInput(format!("window upper end {hi} too large")));
                }
                for (side, sigma) in [(WindowSide::Inner, 1.0), (WindowSide::Outer, -1.0)] {
                    // r = R e^{-σu}, |dr| = r u ds
                    let h = |s: f64| {
                        let u = s.exp();
                        let r = radius * (-sigma * u).exp();
                        spec.lhs_density(r) * r * u
                    };
                    let (integral, error_estimate) = quad(&h, lo, hi)?;
                    points.push(DivergencePoint {
                        lo,
                        hi,
                        side,
                        log_width,
                        integral,
                        error_estimate,
                    });
                }
            }
            _ => {
                let h = |t: f64| {
                    let x = t.exp();
                    spec.lhs_density(x) * x
                };
                let (integral, error_estimate) = quad(&h, lo, hi)?;
                points.push(DivergencePoint {
                    lo,
                    hi,
                    side: WindowSide::Whole,
                    log_width,
                    integral,
                    error_estimate,
                });
            }
        }
    }
    let xs: Vec<f64> = points.iter().map(|p| p.log_width).collect();
    let ys: Vec<f64> = points.iter().map(|p| p.integral).collect();
    let fit = affine_fit(&xs, &ys)
        .ok_or_else(|| SharpnessError::InvalidInput("need at least two windows of different log width".into()))?;
    let expected = spec.amplitude;
    let slope_rel_error = if expected == 0.0 {
        fit.slope.abs()
    } else {
        (fit.slope - expected).abs() / expected.abs()
    };
    let scale = ys.iter().fold(1.0f64, |m, y| m.max(y.abs()));
    let fit_residual = fit.max_residual / scale;
    Ok(DivergenceReport {
        identity_id: spec.identity_id().to_string(),
        kind: spec.kind,
        points,
        fitted_slope: fit.slope,
        fitted_intercept: fit.intercept,
        fit_residual,
        expected_slope: expected,
        slope_rel_error,
        passed: slope_rel_error <= SLOPE_REL_TOL && fit_residual <= FIT_RESIDUAL_TOL,
    })
}

/// One logarithmic-identity report per radius.
pub fn r_sweep_t2(
    f: &ProductTestFunction,
    radii: &[f64],
    cfg: &EvalConfig,
) -> Result<Vec<IdentityReport>, SharpnessError> {
    if radii.is_empty() {
        return Err(SharpnessError::InvalidInput("empty radius list".into()));
    }
    radii
        .iter()
        .map(|&r| eval_t2(f, r, cfg).map(|ev| ev.report).map_err(SharpnessError::from))
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{make_family, make_profile_1d, AngularFactor};
    use std::f64::consts::PI;

    #[test]
    fn gaussian_quotient_in_three_dimensions() {
        let f = make_family("gaussian", &[], 3).unwrap();
        let q = rayleigh_quotient(
            IdentityId::T1_eq15,
            Subject::Product(&f),
            &IdentityParams::dim(3),
            &EvalConfig::default(),
        )
        .unwrap();
        assert!((q - 4.0 / 3.0).abs() < 1e-9);
    }

    #[test]
    fn frullani_quotient() {
        let f = make_profile_1d("exp_decay", &[]).unwrap();
        let q = rayleigh_quotient(
            IdentityId::T3_eq113,
            Subject::Profile(&f),
            &IdentityParams::exponent(1.0),
            &EvalConfig::default(),
        )
        .unwrap();
        assert!((q - 4.0 * 2f64.ln()).abs() < 1e-9);
    }

    #[test]
    fn zero_main_term_is_undefined() {
        let f = make_family("zero", &[], 3).unwrap();
        let e = rayleigh_quotient(
            IdentityId::T1_eq15,
            Subject::Product(&f),
            &IdentityParams::dim(3),
            &EvalConfig::default(),
        );
        assert_eq!(e, Err(SharpnessError::UndefinedQuotient(IdentityId::T1_eq15)));
    }

    #[test]
    fn non_extremizer_single_point_sweep_stays_below() {
        let r = sharpness_sweep(
            IdentityId::T1_eq15,
            "gaussian",
            &[0.1],
            &IdentityParams::dim(3),
            &EvalConfig::default(),
        )
        .unwrap();
        assert_eq!(r.points.len(), 1);
        assert!(r.attained_fraction < 1.0);
    }

    #[test]
    fn subcritical_sweep_is_monotone() {
        let r = sharpness_sweep(
            IdentityId::T1_eq15,
            "subcritical_extremizer_approx",
            &[1e-4, 1e-1, 1e-2, 1e-3],
            &IdentityParams::dim(3),
            &EvalConfig::default(),
        )
        .unwrap();
        let eps: Vec<f64> = r.points.iter().map(|p| p.eps).collect();
        assert_eq!(eps, vec![1e-1, 1e-2, 1e-3, 1e-4]);
        assert!(r.monotone && r.bounded);
        assert!(r.attained_fraction > 0.5 && r.attained_fraction < 1.0);
    }

    #[test]
    fn power_form_divergence_is_log_linear() {
        let spec = ExtremizerSpec::subcritical(3, &AngularFactor::constant(3, 1.0).unwrap()).unwrap();
        let w = [(1e-1, 10.0), (1e-2, 100.0), (1e-3, 1e3)];
        let r = divergence_diagnostic(&spec, &w, &EvalConfig::default()).unwrap();
        assert!(r.passed, "{r:?}");
        for p in &r.points {
            assert!((p.integral - 4.0 * PI * p.log_width).abs() < 1e-9 * p.integral);
        }
    }

    #[test]
    fn log_form_divergence_per_side() {
        let spec = ExtremizerSpec::logarithmic(2, 1.0, &AngularFactor::constant(2, 1.0).unwrap()).unwrap();
        let w = [(1e-2, 1.0), (1e-4, 1.0), (1e-6, 1.0), (1e-8, 1.0)];
        let r = divergence_diagnostic(&spec, &w, &EvalConfig::default()).unwrap();
        assert!(r.passed, "{r:?}");
        assert_eq!(r.points.len(), 8);
        for p in &r.points {
            assert!((p.integral - 2.0 * PI * p.log_width).abs() < 1e-9 * p.integral);
        }
    }

    #[test]
    fn zero_amplitude_divergence_is_identically_zero() {
        let spec = ExtremizerSpec::subcritical(3, &AngularFactor::zero(3).unwrap()).unwrap();
        let r = divergence_diagnostic(&spec, &[(0.1, 10.0), (0.01, 100.0)], &EvalConfig::default()).unwrap();
        assert!(r.points.iter().all(|p| p.integral == 0.0));
        assert!(r.passed);
    }

    #[test]
    fn divergence_rejects_bad_windows() {
        let spec = ExtremizerSpec::oned_forward(1.0, 1.0).unwrap();
        let cfg = EvalConfig::default();
        assert!(divergence_diagnostic(&spec, &[(1.0, 0.5)], &cfg).is_err());
        assert!(divergence_diagnostic(&spec, &[(0.1, 10.0)], &cfg).is_err());
    }

    #[test]
    fn r_sweep_main_term_is_radius_free() {
        let f = make_family("gaussian", &[], 2).unwrap();
        let reps = r_sweep_t2(&f, &[0.5, 1.0, 2.0], &EvalConfig::default()).unwrap();
        assert!(reps.iter().all(|r| r.passed));
        for r in &reps[1..] {
            assert!((r.main_term - reps[0].main_term).abs() < 1e-10);
        }
        let c = make_family("constant", &[3.0], 2).unwrap();
        assert!(r_sweep_t2(&c, &[0.5, 4.0], &EvalConfig::default())
            .unwrap()
            .iter()
            .all(|r| r.lhs == 0.0));
    }
}
