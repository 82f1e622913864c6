use std::fmt;

use serde::{Deserialize, Serialize};

use crate::quadrature::{QuadResult, SplitResult};

#[allow(non_camel_case_types)]
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize, Deserialize)]
pub enum IdentityId {
    T1_eq15,
    T1_eq16,
    T1_eq21,
    T1_dirichlet_decomp,
    T2_eq19,
    T2_eq110,
    T3_eq113,
    T3_eq117,
}

impl IdentityId {
    pub const ALL: [IdentityId; 8] = [
        IdentityId::T1_eq15,
        IdentityId::T1_eq16,
        IdentityId::T1_eq21,
        IdentityId::T1_dirichlet_decomp,
        IdentityId::T2_eq19,
        IdentityId::T2_eq110,
        IdentityId::T3_eq113,
        IdentityId::T3_eq117,
    ];

    pub fn as_str(&self) -> &'static str {
        match self {
            IdentityId::T1_eq15 => "T1_eq15",
            IdentityId::T1_eq16 => "T1_eq16",
            IdentityId::T1_eq21 => "T1_eq21",
            IdentityId::T1_dirichlet_decomp => "T1_dirichlet_decomp",
            IdentityId::T2_eq19 => "T2_eq19",
            IdentityId::T2_eq110 => "T2_eq110",
            IdentityId::T3_eq113 => "T3_eq113",
            IdentityId::T3_eq117 => "T3_eq117",
        }
    }
}

impl fmt::Display for IdentityId {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl std::str::FromStr for IdentityId {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        IdentityId::ALL
            .iter()
            .find(|id| id.as_str() == s)
            .copied()
            .ok_or_else(|| format!("unknown identity `{s}`"))
    }
}

#[allow(non_snake_case)]
#[derive(Clone, Copy, Debug, Default, PartialEq, Serialize, Deserialize)]
pub struct IdentityParams {
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub n: Option<usize>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub R: Option<f64>,
    #[serde(skip_serializing_if = "Option::is_none", default)]
    pub p: Option<f64>,
}

impl IdentityParams {
    pub fn dim(n: usize) -> Self {
        Self {
            n: Some(n),
            ..Self::default()
        }
    }

    pub fn radius(n: usize, r: f64) -> Self {
        Self {
            n: Some(n),
            R: Some(r),
            p: None,
        }
    }

    pub fn exponent(p: f64) -> Self {
        Self {
            p: Some(p),
            ..Self::default()
        }
    }
}

/// Residual record for one instance of an equality `lhs = main - remainder`.
/// Field order is the serialization order.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct IdentityReport {
    pub identity_id: IdentityId,
    pub params: IdentityParams,
    pub lhs: f64,
    pub main_term: f64,
    pub remainder_term: f64,
    /// The unscaled left-side norm computed through the integration-by-parts pairing.
    pub cross_term: f64,
    pub residual_abs: f64,
    pub residual_rel: f64,
    pub quad_error_budget: f64,
    pub passed: bool,
}

impl IdentityReport {
    pub(crate) fn assemble(
        identity_id: IdentityId,
        params: IdentityParams,
        lhs: QuadResult,
        main: QuadResult,
        remainder: QuadResult,
        cross: f64,
        threshold: f64,
    ) -> Self {
        let residual_abs = (lhs.value - (main.value - remainder.value)).abs();
        let residual_rel = residual_abs / main.value.abs().max(1.0);
        let quad_error_budget = lhs.error_estimate + main.error_estimate + remainder.error_estimate;
        Self {
            identity_id,
            params,
            lhs: lhs.value,
            main_term: main.value,
            remainder_term: remainder.value,
            cross_term: cross,
            residual_abs,
            residual_rel,
            quad_error_budget,
            passed: residual_rel.is_finite() && residual_rel <= threshold,
        }
    }

    /// `remainder / main`, the distance of the Rayleigh quotient from its sharp value.
    pub fn remainder_fraction(&self) -> Option<f64> {
        (self.main_term != 0.0).then(|| self.remainder_term / self.main_term)
    }
}

/// Label of a radial (or one-dimensional) weight: `r^exponent |log(R/r)|^log_power`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightDescriptor {
    pub term: String,
    pub exponent: f64,
    pub log_power: i32,
}

/// One term of an identity as `angular_constant × radial_integral`.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct TermBreakdown {
    pub weight: WeightDescriptor,
    pub radial_integral: QuadResult,
    pub angular_constant: f64,
}

impl TermBreakdown {
    pub fn new(term: &str, exponent: f64, log_power: i32, radial_integral: QuadResult, angular_constant: f64) -> Self {
        Self {
            weight: WeightDescriptor {
                term: term.into(),
                exponent,
                log_power,
            },
            radial_integral,
            angular_constant,
        }
    }

    pub fn value(&self) -> f64 {
        self.angular_constant * self.radial_integral.value
    }

    pub fn as_result(&self) -> QuadResult {
        self.radial_integral.scaled(self.angular_constant)
    }
}

/// Contributions of `|x| < R` and `|x| > R` to each term.
#[derive(Clone, Debug, PartialEq)]
pub struct SideTerms {
    pub lhs: SplitResult,
    pub main_term: SplitResult,
    pub remainder_term: SplitResult,
}

/// Full output of an evaluator.
#[derive(Clone, Debug, PartialEq)]
pub struct Evaluation {
    pub report: IdentityReport,
    /// Same identity with the remainder in its second form.
    pub alternate: IdentityReport,
    pub terms: Vec<TermBreakdown>,
    pub sides: Option<SideTerms>,
}

impl Evaluation {
    /// Relative disagreement of the two remainder forms.
    pub fn remainder_disagreement(&self) -> f64 {
        let a = self.report.remainder_term;
        let b = self.alternate.remainder_term;
        let scale = a.abs().max(b.abs());
        if scale == 0.0 {
            0.0
        } else {
            (a - b).abs() / scale
        }
    }

    pub fn term(&self, name: &str) -> Option<&TermBreakdown> {
        self.terms.iter().find(|t| t.weight.term == name)
    }
}
