//! Term-by-term evaluation of the remainder identities.
//!
//! Every radial term is `∫|ψ|²dσ` (or the spherical-gradient constant) times
//! a one-dimensional integral in `t = log r`. The one-dimensional identities
//! use `t = log x`. Identities with a sphere `r = R` are integrated on each
//! side separately in `s = log |t - log R|`.

mod dispatch;
mod ibp;
mod report;
mod t1;
mod t2;
mod t3;

use thiserror::Error;

use crate::functions::FunctionError;
use crate::quadrature::{integrate_line, integrate_window, QuadError, QuadOptions, QuadResult, MAX_LOG_RADIUS};

pub use dispatch::{evaluate, TestSubject};
pub use ibp::{cross_check_ibp, weighted_pairing, Subject, WeightedPairing};
pub use report::{Evaluation, IdentityId, IdentityParams, IdentityReport, SideTerms, TermBreakdown, WeightDescriptor};
pub use t1::{eval_t1, eval_t1_fullgradient};
pub use t2::{boundary_control_holds, eval_t2, GUARD_LOG_DISTANCE};
pub use t3::{eval_t3_backward, eval_t3_forward};

/// Default residual threshold for `passed`.
pub const DEFAULT_THRESHOLD: f64 = 1e-7;
/// Default quadrature tolerance.
pub const DEFAULT_REL_TOL: f64 = 1e-9;

#[derive(Clone, Copy, Debug, PartialEq)]
pub struct EvalConfig {
    pub rel_tol: f64,
    pub threshold: f64,
}

impl Default for EvalConfig {
    fn default() -> Self {
        Self {
            rel_tol: DEFAULT_REL_TOL,
            threshold: DEFAULT_THRESHOLD,
        }
    }
}

impl EvalConfig {
    pub fn with_rel_tol(rel_tol: f64) -> Self {
        Self {
            rel_tol,
            ..Self::default()
        }
    }

    fn quad(&self) -> QuadOptions {
        QuadOptions::new(self.rel_tol)
    }
}

#[derive(Debug, Error, Clone, PartialEq)]
pub enum IdentityError {
    #[error(transparent)]
    Function(#[from] FunctionError),
    #[error("{identity}: {reason}")]
    Unsupported { identity: IdentityId, reason: String },
    /// A term failed to converge. With `extremizer_type`, the left side
    /// diverged while the main term stayed finite.
    #[error("{identity}: `{term}` diverges (best estimate {best:e}){}", if *extremizer_type { "; extremizer-type divergence" } else { "" })]
    Divergent {
        identity: IdentityId,
        term: &'static str,
        best: f64,
        extremizer_type: bool,
    },
    #[error("{identity}: quadrature failed on `{term}`: {source}")]
    Quadrature {
        identity: IdentityId,
        term: &'static str,
        source: QuadError,
    },
}

impl IdentityError {
    pub fn is_divergence(&self) -> bool {
        matches!(self, IdentityError::Divergent { .. })
    }
}

/// Classify a failed quadrature of one term.
pub(crate) fn term_error(identity: IdentityId, term: &'static str, main_ok: bool, e: QuadError) -> IdentityError {
    match e {
        QuadError::NonConvergence { best, .. } | QuadError::TailNonConvergence { best, .. } => {
            IdentityError::Divergent {
                identity,
                term,
                best,
                extremizer_type: term == "lhs" && main_ok,
            }
        }
        QuadError::Domain { value, .. } if value.is_infinite() => IdentityError::Divergent {
            identity,
            term,
            best: value,
            extremizer_type: term == "lhs" && main_ok,
        },
        source => IdentityError::Quadrature { identity, term, source },
    }
}

/// Where a one-dimensional integrand in the log variable lives.
#[derive(Clone, Debug, PartialEq)]
pub(crate) struct LogDomain {
    /// Finite interval outside of which every integrand vanishes.
    pub support: Option<(f64, f64)>,
    /// Start of the outward sweep for unbounded domains.
    pub center: f64,
    pub breaks: Vec<f64>,
}

impl LogDomain {
    pub fn integrate<F: Fn(f64) -> f64>(&self, h: F, opts: &QuadOptions) -> Result<QuadResult, QuadError> {
        // a product with an underflowed factor is zero even if the weight overflowed
        let h = |t: f64| {
            let v = h(t);
            if v.is_nan() {
                0.0
            } else {
                v
            }
        };
        match self.support {
            Some((lo, hi)) if lo < hi => integrate_window(&h, lo, hi, &self.breaks, opts),
            Some(_) => Ok(QuadResult::ZERO),
            None => integrate_line(&h, self.center, &self.breaks, MAX_LOG_RADIUS, opts),
        }
    }
}

/// `(a e^{kt/2})²` without forming `e^{kt}` when `a` vanishes.
#[inline]
pub(crate) fn weighted_sq(a: f64, k: f64, t: f64) -> f64 {
    if a == 0.0 {
        0.0
    } else {
        let w = a * (0.5 * k * t).exp();
        w * w
    }
}

/// `a b e^{kt}` with the same convention.
#[inline]
pub(crate) fn weighted_prod(a: f64, b: f64, k: f64, t: f64) -> f64 {
    if a == 0.0 || b == 0.0 {
        0.0
    } else {
        let h = (0.5 * k * t).exp();
        (a * h) * (b * h)
    }
}

/// `lhs ≤ main + budget`: the inequality obtained by dropping the remainder.
pub fn verify_corollary_inequalities(report: &IdentityReport) -> bool {
    report.lhs <= report.main_term + report.quad_error_budget
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn weighted_helpers_absorb_overflow() {
        assert_eq!(weighted_sq(0.0, 3.0, 800.0), 0.0);
        assert_eq!(weighted_prod(1.0, 0.0, 3.0, 800.0), 0.0);
        assert!((weighted_sq(2.0, 1.0, 1.0) - 4.0 * 1f64.exp()).abs() < 1e-14);
        assert!((weighted_prod(2.0, 3.0, -2.0, 0.5) - 6.0 * (-1f64).exp()).abs() < 1e-14);
    }

    #[test]
    fn corollary_follows_from_a_nonnegative_remainder() {
        let q = |v| QuadResult {
            value: v,
            error_estimate: 1e-12,
            subdivisions: 0,
        };
        let r = IdentityReport::assemble(
            IdentityId::T1_eq15,
            IdentityParams::dim(3),
            q(1.0),
            q(3.0),
            q(2.0),
            0.0,
            1e-7,
        );
        assert!(verify_corollary_inequalities(&r));
        let bad = IdentityReport::assemble(
            IdentityId::T1_eq15,
            IdentityParams::dim(3),
            q(4.0),
            q(3.0),
            q(-1.0),
            0.0,
            1e-7,
        );
        assert!(!verify_corollary_inequalities(&bad));
    }
}
