//! Test-function catalogue: radial profiles, angular factors, product
//! functions `φ(|x|) ψ(x/|x|)`, one-dimensional profiles and exact
//! extremizer forms.

pub mod angular;
pub mod extremizer;
pub mod profile1d;
pub mod radial;
pub mod smooth;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use angular::{sphere_surface_measure, AngularFactor};
pub use extremizer::{ExtremizerKind, ExtremizerSpec};
pub use profile1d::{make_profile_1d, Profile1D, Shape1D};
pub use radial::{Decay, LogDistancePoint, RadialProfile, RadialShape};
pub use smooth::{smooth_step, smooth_step_deriv, LogWindow, TRANSITION_FRACTION};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum FunctionError {
    #[error("dimension n = {n} is below the minimum {min}")]
    Dimension { n: usize, min: usize },
    #[error("radial dimension {radial} does not match angular dimension {angular}")]
    DimensionMismatch { radial: usize, angular: usize },
    #[error("unknown family or factor `{0}`")]
    UnknownName(String),
    #[error("`{name}` takes {expected} parameter(s), got {got}")]
    ParamCount { name: String, expected: usize, got: usize },
    #[error("invalid parameters for `{name}`: {reason}")]
    InvalidParams { name: String, reason: String },
    #[error("`{label}` is not admissible: {reason}")]
    Inadmissible { label: String, reason: String },
}

/// `f(x) = φ(|x|) ψ(x/|x|)` on `ℝⁿ`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ProductTestFunction {
    pub radial: RadialProfile,
    pub angular: AngularFactor,
    pub dimension: usize,
}

impl ProductTestFunction {
    pub fn new(radial: RadialProfile, angular: AngularFactor) -> Result<Self, FunctionError> {
        let dimension = angular.dimension;
        if dimension < 2 {
            return Err(FunctionError::Dimension { n: dimension, min: 2 });
        }
        Ok(Self {
            radial,
            angular,
            dimension,
        })
    }

    pub fn label(&self) -> String {
        format!("{}*{}", self.radial.label, self.angular.label)
    }

    pub fn is_zero(&self) -> bool {
        self.radial.is_zero() || self.angular.sphere_norm_sq == 0.0
    }

    /// `φ(λ|x|) ψ(x/|x|)`
    pub fn dilated(&self, lambda: f64) -> Self {
        Self {
            radial: self.radial.dilated(lambda),
            angular: self.angular.clone(),
            dimension: self.dimension,
        }
    }

    pub fn with_angular(&self, angular: AngularFactor) -> Result<Self, FunctionError> {
        Self::new(self.radial.clone(), angular)
    }

    /// `n ≥ 3` and `∫|φ|² r^{n-3}`, `∫|φ'|² r^{n-1}` finite.
    pub fn check_t1(&self) -> Result<(), FunctionError> {
        let n = self.dimension;
        if n < 3 {
            return Err(FunctionError::Dimension { n, min: 3 });
        }
        if self.is_zero() {
            return Ok(());
        }
        let need = 0.5 * (n as f64 - 2.0);
        match self.radial.decay {
            Decay::None => Err(self.inadmissible("no decay at infinity")),
            Decay::Power(alpha) if alpha <= need => {
                Err(self.inadmissible(&format!("decay r^-{alpha} too slow for n = {n}")))
            }
            _ => Ok(()),
        }
    }

    /// `n ≥ 2`; `∫|φ'|² r` finiteness is left to the quadrature.
    pub fn check_t2(&self) -> Result<(), FunctionError> {
        let n = self.dimension;
        if n < 2 {
            return Err(FunctionError::Dimension { n, min: 2 });
        }
        if self.radial.log_support().is_none() && matches!(self.radial.decay, Decay::None) && !self.is_constant() {
            return Err(self.inadmissible("no decay at infinity"));
        }
        Ok(())
    }

    fn is_constant(&self) -> bool {
        self.radial.shape == RadialShape::Constant
    }

    fn inadmissible(&self, reason: &str) -> FunctionError {
        FunctionError::Inadmissible {
            label: self.label(),
            reason: reason.into(),
        }
    }
}

/// Catalogue of radial families, with `ψ ≡ 1`.
///
/// | name | params |
/// |---|---|
/// | `gaussian` | none |
/// | `exp_decay` | none |
/// | `bump` | `a, b` (default `1, 2`) |
/// | `power_cutoff` | `alpha` (default `3`) |
/// | `log_gaussian` | none |
/// | `constant` | `c` (default `1`) |
/// | `zero` | none |
/// | `subcritical_extremizer_approx` | `eps` |
/// | `log_extremizer_approx` | `eps, R` (default `R = 1`) |
pub fn make_family(name: &str, params: &[f64], n: usize) -> Result<ProductTestFunction, FunctionError> {
    if n < 2 {
        return Err(FunctionError::Dimension { n, min: 2 });
    }
    let arity = |lo: usize, hi: usize| -> Result<(), FunctionError> {
        if params.len() < lo || params.len() > hi {
            Err(FunctionError::ParamCount {
                name: name.into(),
                expected: hi,
                got: params.len(),
            })
        } else {
            Ok(())
        }
    };
    let invalid = |msg: String| FunctionError::InvalidParams {
        name: name.into(),
        reason: msg,
    };
    let label = if params.is_empty() {
        name.to_string()
    } else {
        let p: Vec<String> = params.iter().map(|v| v.to_string()).collect();
        format!("{name}[{}]", p.join(","))
    };
    let mut angular = AngularFactor::constant(n, 1.0)?;
    let (shape, decay) = match name {
        "gaussian" => {
            arity(0, 0)?;
            (RadialShape::Gaussian, Decay::Gaussian)
        }
        "exp_decay" => {
            arity(0, 0)?;
            (RadialShape::ExpDecay, Decay::Exponential)
        }
        "log_gaussian" => {
            arity(0, 0)?;
            (RadialShape::LogGaussian, Decay::Gaussian)
        }
        "zero" => {
            arity(0, 0)?;
            angular = AngularFactor::zero(n)?;
            (RadialShape::Zero, Decay::CompactSupport(0.0, 0.0))
        }
        "constant" => {
            arity(0, 1)?;
            let c = params.first().copied().unwrap_or(1.0);
            if !c.is_finite() {
                return Err(invalid(format!("c = {c}")));
            }
            angular = AngularFactor::constant(n, c)?;
            (RadialShape::Constant, Decay::None)
        }
        "bump" => {
            arity(0, 2)?;
            let (a, b) = match params {
                [] => (1.0, 2.0),
                [a, b] => (*a, *b),
                _ => return Err(invalid("bump takes `a, b`".into())),
            };
            if !(a > 0.0 && b > a && b.is_finite()) {
                return Err(invalid(format!("need 0 < a < b, got [{a}, {b}]")));
            }
            (RadialShape::Bump { a, b }, Decay::CompactSupport(a, b))
        }
        "power_cutoff" => {
            arity(0, 1)?;
            let alpha = params.first().copied().unwrap_or(3.0);
            if !(alpha > 0.0 && alpha.is_finite()) {
                return Err(invalid(format!("alpha = {alpha} must be positive")));
            }
            (RadialShape::PowerCutoff { alpha }, Decay::Power(alpha))
        }
        "subcritical_extremizer_approx" => {
            arity(1, 1)?;
            if n < 3 {
                return Err(FunctionError::Dimension { n, min: 3 });
            }
            let eps = params[0];
            let window = truncation_window(eps).ok_or_else(|| invalid(format!("eps = {eps} must lie in (0, 1)")))?;
            let exponent = 0.5 * (n as f64 - 2.0);
            (
                RadialShape::Subcritical { exponent, window },
                Decay::CompactSupport(window.lo.exp(), window.hi.exp()),
            )
        }
        "log_extremizer_approx" => {
            arity(1, 2)?;
            let eps = params[0];
            let radius = params.get(1).copied().unwrap_or(1.0);
            let window = truncation_window(eps).ok_or_else(|| invalid(format!("eps = {eps} must lie in (0, 1)")))?;
            if !(radius > 0.0 && radius.is_finite()) {
                return Err(invalid(format!("R = {radius} must be positive")));
            }
            let reach = window.hi.exp();
            (
                RadialShape::LogExtremizer {
                    log_radius: radius.ln(),
                    window,
                },
                Decay::CompactSupport(
                    (radius.ln() - reach).exp(),
                    (radius.ln() + reach).min(crate::quadrature::MAX_LOG_RADIUS).exp(),
                ),
            )
        }
        _ => return Err(FunctionError::UnknownName(name.into())),
    };
    ProductTestFunction::new(RadialProfile::new(label, shape, decay), angular)
}

/// Log window `[-log(1/ε), log(1/ε)]` for a truncation parameter ε.
/// ε is bounded below so that `1/ε` and the window stay representable.
pub fn truncation_window(eps: f64) -> Option<LogWindow> {
    if (1e-300..1.0).contains(&eps) {
        Some(LogWindow::symmetric(-eps.ln()))
    } else {
        None
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn gaussian_family() {
        let f = make_family("gaussian", &[], 3).unwrap();
        assert!((f.angular.sphere_norm_sq - 4.0 * PI).abs() < 1e-14);
        assert!((f.radial.value(1.5) - (-1.125f64).exp()).abs() < 1e-15);
        assert!((f.radial.deriv(1.5) + 1.5 * (-1.125f64).exp()).abs() < 1e-15);
        assert!(f.check_t1().is_ok());
    }

    #[test]
    fn subcritical_family_is_the_power_on_its_plateau() {
        let eps = 1e-3;
        let f = make_family("subcritical_extremizer_approx", &[eps], 3).unwrap();
        let w = truncation_window(eps).unwrap();
        let (lo, hi) = w.plateau();
        for i in 0..=20 {
            let t = lo + (hi - lo) * i as f64 / 20.0;
            let r = t.exp();
            assert!((f.radial.value(r) - r.powf(-0.5)).abs() <= 1e-12 * r.powf(-0.5));
        }
        assert_eq!(f.radial.value(0.5 * eps), 0.0);
        assert_eq!(f.radial.value(2.0 / eps), 0.0);
        assert!(f.check_t1().is_ok());
    }

    #[test]
    fn log_family_excises_the_sphere() {
        let f = make_family("log_extremizer_approx", &[0.1, 2.0], 2).unwrap();
        assert_eq!(f.radial.value(2.0), 0.0);
        assert_eq!(f.radial.value(2.0 * 0.05f64.exp()), 0.0);
        assert_eq!(f.radial.value(2.0 * (-12.0f64).exp()), 0.0);
        let r = 2.0 * (-1.0f64).exp();
        assert!((f.radial.value(r) - 1.0).abs() < 1e-14);
    }

    #[test]
    fn validation() {
        assert!(make_family("subcritical_extremizer_approx", &[1.0], 3).is_err());
        assert!(make_family("subcritical_extremizer_approx", &[0.1], 2).is_err());
        assert!(make_family("log_extremizer_approx", &[0.1, -1.0], 2).is_err());
        assert!(make_family("bump", &[2.0, 1.0], 2).is_err());
        assert!(make_family("gaussian", &[], 1).is_err());
        assert!(make_family("what", &[], 3).is_err());
        assert!(make_family("constant", &[], 3).unwrap().check_t1().is_err());
        assert!(make_family("power_cutoff", &[1.0], 5).unwrap().check_t1().is_err());
    }

    #[test]
    fn extremizer_approximants_converge_on_compacts() {
        // once the cutoffs leave [2ε₀, 1/(2ε₀)], the family equals the exact form there
        let eps0: f64 = 1e-2;
        let exact = ExtremizerSpec::subcritical(4, &AngularFactor::constant(4, 1.0).unwrap()).unwrap();
        for &eps in &[1e-6, 1e-9] {
            let f = make_family("subcritical_extremizer_approx", &[eps], 4).unwrap();
            let mut sup: f64 = 0.0;
            for i in 0..=200 {
                let t = (2.0 * eps0).ln() + ((0.5 / eps0).ln() - (2.0 * eps0).ln()) * i as f64 / 200.0;
                let r = t.exp();
                sup = sup.max((f.radial.value(r) - exact.form(r)).abs());
            }
            assert!(sup < 1e-10, "eps = {eps}: sup = {sup}");
        }
        let exact = ExtremizerSpec::logarithmic(2, 1.0, &AngularFactor::constant(2, 1.0).unwrap()).unwrap();
        for &eps in &[1e-6, 1e-9] {
            let f = make_family("log_extremizer_approx", &[eps, 1.0], 2).unwrap();
            let mut sup: f64 = 0.0;
            for i in 0..=200 {
                let r = 2.0 * eps0 + (0.5 / eps0 - 2.0 * eps0) * i as f64 / 200.0;
                if (r.ln()).abs() < 2.0 * eps0 {
                    continue;
                }
                sup = sup.max((f.radial.value(r) - exact.form(r)).abs());
            }
            assert!(sup < 1e-10, "eps = {eps}: sup = {sup}");
        }
    }
}
