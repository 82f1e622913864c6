//! One-dimensional identities with the primitives `F = ∫_0^x f` and
//! `G = ∫_x^∞ f`, integrated in `t = log x`.

use super::report::{Evaluation, IdentityId, IdentityParams, IdentityReport, TermBreakdown};
use super::{term_error, weighted_prod, weighted_sq, EvalConfig, IdentityError, LogDomain};
use crate::functions::Profile1D;

pub(crate) fn profile_domain(f: &Profile1D) -> LogDomain {
    let breaks = f.breakpoints().iter().filter(|&&x| x > 0.0).map(|x| x.ln()).collect();
    LogDomain {
        support: if f.is_zero() { Some((0.0, 0.0)) } else { f.log_support() },
        center: 0.0,
        breaks,
    }
}

/// Domain for integrands containing a primitive. `∫_0^x f` and `∫_x^∞ f`
/// stay constant off the support of `f` unless `∫_0^∞ f = 0`.
pub(crate) fn primitive_domain(f: &Profile1D) -> LogDomain {
    let dom = profile_domain(f);
    if f.is_zero() || f.total() == Some(0.0) {
        return dom;
    }
    match dom.support {
        Some((lo, hi)) => LogDomain {
            support: None,
            center: 0.5 * (lo + hi),
            breaks: dom.breaks,
        },
        None => dom,
    }
}

fn check_exponent(id: IdentityId, p: f64) -> Result<(), IdentityError> {
    if p > 0.0 && p.is_finite() {
        Ok(())
    } else {
        Err(IdentityError::Unsupported {
            identity: id,
            reason: format!("p = {p} must be positive"),
        })
    }
}

/// `(p/2)² ∫ x^{1-p} (F/x)² = ∫ x^{1-p} f² - ∫ x^{1-p} (f - pF/(2x))²`,
/// with the second remainder `∫ x (d/dx (x^{-p/2} F))²` in `alternate`.
pub fn eval_t3_forward(f: &Profile1D, p: f64, cfg: &EvalConfig) -> Result<Evaluation, IdentityError> {
    let id = IdentityId::T3_eq113;
    check_exponent(id, p)?;
    let dom = primitive_domain(f);
    let opts = cfg.quad();
    let h = 0.5 * p;
    let main = profile_domain(f)
        .integrate(|t| weighted_sq(f.value(t.exp()), 2.0 - p, t), &opts)
        .map_err(|e| term_error(id, "main_term", false, e))?;
    let norm = dom
        .integrate(|t| weighted_sq(f.forward_primitive(t.exp()), -p, t), &opts)
        .map_err(|e| term_error(id, "lhs", true, e))?;
    let rem = dom
        .integrate(
            |t| {
                let x = t.exp();
                weighted_sq(f.value(x) - h * f.forward_primitive(x) / x, 2.0 - p, t)
            },
            &opts,
        )
        .map_err(|e| term_error(id, "remainder_term", true, e))?;
    // w = x^{-p/2} F and x (dw/dx)² dx = (dw/dt)² dt
    let rem_alt = dom
        .integrate(
            |t| {
                let x = t.exp();
                weighted_sq(x * f.value(x) - h * f.forward_primitive(x), -p, t)
            },
            &opts,
        )
        .map_err(|e| term_error(id, "remainder_term", true, e))?;
    let pairing = dom
        .integrate(
            |t| weighted_prod(f.forward_primitive(t.exp()), f.value(t.exp()), 1.0 - p, t),
            &opts,
        )
        .map_err(|e| term_error(id, "cross_term", true, e))?;

    let params = IdentityParams::exponent(p);
    let lhs = norm.scaled(h * h);
    let cross = pairing.value / h;
    let report = IdentityReport::assemble(id, params, lhs, main, rem, cross, cfg.threshold);
    let alternate = IdentityReport::assemble(id, params, lhs, main, rem_alt, cross, cfg.threshold);
    Ok(Evaluation {
        report,
        alternate,
        terms: vec![
            TermBreakdown::new("lhs", -p - 1.0, 0, norm, h * h),
            TermBreakdown::new("main_term", 1.0 - p, 0, main, 1.0),
            TermBreakdown::new("remainder_term", 1.0 - p, 0, rem, 1.0),
            TermBreakdown::new("remainder_alt", 1.0, 0, rem_alt, 1.0),
            TermBreakdown::new("cross_term", -p, 0, pairing, 1.0 / h),
        ],
        sides: None,
    })
}

/// `(p/2)² ∫ x^{p+1} (G/x)² = ∫ x^{p+1} f² - ∫ x^{p+1} (f - pG/(2x))²`,
/// with the second remainder `∫ x (d/dx (x^{p/2} G))²` in `alternate`.
pub fn eval_t3_backward(f: &Profile1D, p: f64, cfg: &EvalConfig) -> Result<Evaluation, IdentityError> {
    let id = IdentityId::T3_eq117;
    check_exponent(id, p)?;
    let dom = primitive_domain(f);
    let opts = cfg.quad();
    let h = 0.5 * p;
    let main = profile_domain(f)
        .integrate(|t| weighted_sq(f.value(t.exp()), 2.0 + p, t), &opts)
        .map_err(|e| term_error(id, "main_term", false, e))?;
    let norm = dom
        .integrate(|t| weighted_sq(f.tail_primitive(t.exp()), p, t), &opts)
        .map_err(|e| term_error(id, "lhs", true, e))?;
    let rem = dom
        .integrate(
            |t| {
                let x = t.exp();
                weighted_sq(f.value(x) - h * f.tail_primitive(x) / x, 2.0 + p, t)
            },
            &opts,
        )
        .map_err(|e| term_error(id, "remainder_term", true, e))?;
    // w = x^{p/2} G, dw/dt = x^{p/2} (pG/2 - x f)
    let rem_alt = dom
        .integrate(
            |t| {
                let x = t.exp();
                weighted_sq(h * f.tail_primitive(x) - x * f.value(x), p, t)
            },
            &opts,
        )
        .map_err(|e| term_error(id, "remainder_term", true, e))?;
    let pairing = dom
        .integrate(
            |t| weighted_prod(f.tail_primitive(t.exp()), f.value(t.exp()), 1.0 + p, t),
            &opts,
        )
        .map_err(|e| term_error(id, "cross_term", true, e))?;

    let params = IdentityParams::exponent(p);
    let lhs = norm.scaled(h * h);
    let cross = pairing.value / h;
    let report = IdentityReport::assemble(id, params, lhs, main, rem, cross, cfg.threshold);
    let alternate = IdentityReport::assemble(id, params, lhs, main, rem_alt, cross, cfg.threshold);
    Ok(Evaluation {
        report,
        alternate,
        terms: vec![
            TermBreakdown::new("lhs", p - 1.0, 0, norm, h * h),
            TermBreakdown::new("main_term", p + 1.0, 0, main, 1.0),
            TermBreakdown::new("remainder_term", p + 1.0, 0, rem, 1.0),
            TermBreakdown::new("remainder_alt", 1.0, 0, rem_alt, 1.0),
            TermBreakdown::new("cross_term", p, 0, pairing, 1.0 / h),
        ],
        sides: None,
    })
}
