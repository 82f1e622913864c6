//! Exact extremizer forms. None of them is admissible: their left-side
//! integrands are `amplitude / s` in the appropriate log variable `s`.

use serde::{Deserialize, Serialize};

use super::angular::AngularFactor;
use super::FunctionError;

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case", tag = "kind")]
pub enum ExtremizerKind {
    /// `|x|^{-(n-2)/2} ψ(x/|x|)`
    Subcritical { n: usize },
    /// `|log(R/|x|)|^{1/2} ψ(x/|x|)`
    Logarithmic { n: usize, radius: f64 },
    /// `∫_0^x f = c x^{p/2}`
    OnedForward { p: f64 },
    /// `∫_x^∞ f = c x^{-p/2}`
    OnedBackward { p: f64 },
}

#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct ExtremizerSpec {
    pub kind: ExtremizerKind,
    /// `∫|ψ|² dσ` for the radial forms, `|c|²` in one dimension.
    pub amplitude: f64,
}

impl ExtremizerSpec {
    pub fn subcritical(n: usize, angular: &AngularFactor) -> Result<Self, FunctionError> {
        if n < 3 {
            return Err(FunctionError::Dimension { n, min: 3 });
        }
        check_dimension(n, angular)?;
        Ok(Self {
            kind: ExtremizerKind::Subcritical { n },
            amplitude: angular.sphere_norm_sq,
        })
    }

    pub fn logarithmic(n: usize, radius: f64, angular: &AngularFactor) -> Result<Self, FunctionError> {
        if n < 2 {
            return Err(FunctionError::Dimension { n, min: 2 });
        }
        if !(radius > 0.0 && radius.is_finite()) {
            return Err(FunctionError::InvalidParams {
                name: "logarithmic".into(),
                reason: format!("radius {radius} must be positive"),
            });
        }
        check_dimension(n, angular)?;
        Ok(Self {
            kind: ExtremizerKind::Logarithmic { n, radius },
            amplitude: angular.sphere_norm_sq,
        })
    }

    pub fn oned_forward(p: f64, c: f64) -> Result<Self, FunctionError> {
        check_exponent(p)?;
        Ok(Self {
            kind: ExtremizerKind::OnedForward { p },
            amplitude: c * c,
        })
    }

    pub fn oned_backward(p: f64, c: f64) -> Result<Self, FunctionError> {
        check_exponent(p)?;
        Ok(Self {
            kind: ExtremizerKind::OnedBackward { p },
            amplitude: c * c,
        })
    }

    /// The form with unit coefficient: `φ(r)` for the radial kinds, the
    /// prescribed primitive in one dimension.
    pub fn form(&self, x: f64) -> f64 {
        match self.kind {
            ExtremizerKind::Subcritical { n } => x.powf(-0.5 * (n as f64 - 2.0)),
            ExtremizerKind::Logarithmic { radius, .. } => (radius / x).ln().abs().sqrt(),
            ExtremizerKind::OnedForward { p } => x.powf(0.5 * p),
            ExtremizerKind::OnedBackward { p } => x.powf(-0.5 * p),
        }
    }

    /// Integrand of the unscaled left side in the natural variable (`r` or `x`),
    /// polar measure and amplitude included.
    pub fn lhs_density(&self, x: f64) -> f64 {
        let v = self.form(x);
        self.amplitude
            * match self.kind {
                ExtremizerKind::Subcritical { n } => v * v * x.powi(n as i32 - 3),
                ExtremizerKind::Logarithmic { n, radius } => {
                    let l = (radius / x).ln();
                    // f_R vanishes for this form
                    v * v / (x.powi(n as i32) * l * l) * x.powi(n as i32 - 1)
                }
                ExtremizerKind::OnedForward { p } => x.powf(-p - 1.0) * v * v,
                ExtremizerKind::OnedBackward { p } => x.powf(p - 1.0) * v * v,
            }
    }

    pub fn identity_id(&self) -> &'static str {
        match self.kind {
            ExtremizerKind::Subcritical { .. } => "T1_eq15",
            ExtremizerKind::Logarithmic { .. } => "T2_eq19",
            ExtremizerKind::OnedForward { .. } => "T3_eq113",
            ExtremizerKind::OnedBackward { .. } => "T3_eq117",
        }
    }
}

fn check_dimension(n: usize, angular: &AngularFactor) -> Result<(), FunctionError> {
    if angular.dimension != n {
        return Err(FunctionError::DimensionMismatch {
            radial: n,
            angular: angular.dimension,
        });
    }
    Ok(())
}

fn check_exponent(p: f64) -> Result<(), FunctionError> {
    if !(p > 0.0 && p.is_finite()) {
        return Err(FunctionError::InvalidParams {
            name: "oned".into(),
            reason: format!("p = {p} must be positive"),
        });
    }
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn densities_are_reciprocal_in_the_log_variable() {
        let one3 = AngularFactor::constant(3, 1.0).unwrap();
        let s = ExtremizerSpec::subcritical(3, &one3).unwrap();
        for &r in &[1e-3, 0.7, 40.0] {
            assert!((s.lhs_density(r) * r - 4.0 * PI).abs() < 1e-12);
        }
        let one2 = AngularFactor::constant(2, 1.0).unwrap();
        let l = ExtremizerSpec::logarithmic(2, 1.0, &one2).unwrap();
        for &r in &[0.3, 0.99, 1.01, 5.0] {
            let u = (1.0_f64 / r).ln().abs();
            assert!((l.lhs_density(r) * r * u - 2.0 * PI).abs() < 1e-12);
        }
        let f = ExtremizerSpec::oned_forward(1.5, 2.0).unwrap();
        assert!((f.lhs_density(3.0) * 3.0 - 4.0).abs() < 1e-12);
        let b = ExtremizerSpec::oned_backward(0.5, 1.0).unwrap();
        assert!((b.lhs_density(0.2) * 0.2 - 1.0).abs() < 1e-12);
    }

    #[test]
    fn rejects_bad_inputs() {
        let one2 = AngularFactor::constant(2, 1.0).unwrap();
        assert!(ExtremizerSpec::subcritical(2, &one2).is_err());
        assert!(ExtremizerSpec::logarithmic(3, 1.0, &one2).is_err());
        assert!(ExtremizerSpec::logarithmic(2, -1.0, &one2).is_err());
        assert!(ExtremizerSpec::oned_forward(0.0, 1.0).is_err());
    }
}
