//! Angular factors `ψ` on the unit sphere, carried by their norm constants.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use super::FunctionError;

/// Surface measure `2 π^{n/2} / Γ(n/2)` of `S^{n-1}`.
pub fn sphere_surface_measure(n: usize) -> Result<f64, FunctionError> {
    if n < 2 {
        return Err(FunctionError::Dimension { n, min: 2 });
    }
    Ok(2.0 * PI.powf(n as f64 / 2.0) / gamma_half_integer(n))
}

/// `Γ(k/2)` for integer `k ≥ 1`, by the recurrence `Γ(x + 1) = x Γ(x)`.
fn gamma_half_integer(k: usize) -> f64 {
    let (mut value, mut x) = if k.is_multiple_of(2) {
        (1.0, 1.0)
    } else {
        (PI.sqrt(), 0.5)
    };
    while 2.0 * x < k as f64 {
        value *= x;
        x += 1.0;
    }
    value
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct AngularFactor {
    pub label: String,
    pub dimension: usize,
    /// `∫ |ψ|² dσ`
    pub sphere_norm_sq: f64,
    /// `∫ |∇_S ψ|² dσ`, when known in closed form.
    pub sphere_deriv_norm_sq: Option<f64>,
}

impl AngularFactor {
    /// `ψ ≡ c`.
    pub fn constant(n: usize, c: f64) -> Result<Self, FunctionError> {
        Ok(Self {
            label: if c == 1.0 { "one".into() } else { format!("const({c})") },
            dimension: n,
            sphere_norm_sq: c * c * sphere_surface_measure(n)?,
            sphere_deriv_norm_sq: Some(0.0),
        })
    }

    pub fn zero(n: usize) -> Result<Self, FunctionError> {
        let mut a = Self::constant(n, 0.0)?;
        a.label = "zero".into();
        Ok(a)
    }

    /// `ψ(ω) = ω_1`, an eigenfunction of the sphere Laplacian with eigenvalue `n - 1`.
    pub fn first_harmonic(n: usize) -> Result<Self, FunctionError> {
        let s = sphere_surface_measure(n)?;
        let nf = n as f64;
        Ok(Self {
            label: "first_harmonic".into(),
            dimension: n,
            sphere_norm_sq: s / nf,
            sphere_deriv_norm_sq: Some((nf - 1.0) * s / nf),
        })
    }

    /// `ψ(θ) = cos kθ` on `S¹`.
    pub fn cos_mode(k: u32) -> Self {
        let kf = k as f64;
        Self {
            label: format!("cos{k}"),
            dimension: 2,
            sphere_norm_sq: if k == 0 { 2.0 * PI } else { PI },
            sphere_deriv_norm_sq: Some(kf * kf * PI),
        }
    }

    /// `ψ` multiplied by a scalar `c`.
    pub fn scaled(&self, c: f64) -> Self {
        Self {
            label: format!("{}*{c}", self.label),
            dimension: self.dimension,
            sphere_norm_sq: c * c * self.sphere_norm_sq,
            sphere_deriv_norm_sq: self.sphere_deriv_norm_sq.map(|d| c * c * d),
        }
    }

    pub fn parse(label: &str, n: usize) -> Result<Self, FunctionError> {
        match label {
            "one" | "constant" => Self::constant(n, 1.0),
            "zero" => Self::zero(n),
            "first_harmonic" | "harmonic" => Self::first_harmonic(n),
            _ => {
                if let Some(k) = label.strip_prefix("cos") {
                    if n != 2 {
                        return Err(FunctionError::Dimension { n, min: 2 });
                    }
                    let k = k.parse::<u32>().map_err(|_| FunctionError::UnknownName(label.into()))?;
                    Ok(Self::cos_mode(k))
                } else {
                    Err(FunctionError::UnknownName(label.into()))
                }
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn surface_measures() {
        assert!((sphere_surface_measure(2).unwrap() - 2.0 * PI).abs() < 1e-14);
        assert!((sphere_surface_measure(3).unwrap() - 4.0 * PI).abs() < 1e-14);
        assert!((sphere_surface_measure(4).unwrap() - 2.0 * PI * PI).abs() < 1e-13);
        // |S^4| = 8π²/3
        assert!((sphere_surface_measure(5).unwrap() - 8.0 * PI * PI / 3.0).abs() < 1e-13);
        assert!(sphere_surface_measure(1).is_err());
    }

    #[test]
    fn harmonic_constants_on_the_circle_agree() {
        let h = AngularFactor::first_harmonic(2).unwrap();
        let c = AngularFactor::cos_mode(1);
        assert!((h.sphere_norm_sq - c.sphere_norm_sq).abs() < 1e-14);
        assert!((h.sphere_deriv_norm_sq.unwrap() - c.sphere_deriv_norm_sq.unwrap()).abs() < 1e-14);
    }

    #[test]
    fn first_harmonic_norm_matches_quadrature_on_s2() {
        // ∫ cos²θ sinθ dθ dφ over S² = 4π/3
        let h = AngularFactor::first_harmonic(3).unwrap();
        assert!((h.sphere_norm_sq - 4.0 * PI / 3.0).abs() < 1e-14);
        assert!((h.sphere_deriv_norm_sq.unwrap() - 8.0 * PI / 3.0).abs() < 1e-14);
    }

    #[test]
    fn parse_labels() {
        assert_eq!(
            AngularFactor::parse("cos3", 2).unwrap().sphere_deriv_norm_sq,
            Some(9.0 * PI)
        );
        assert!(AngularFactor::parse("cos3", 3).is_err());
        assert!(AngularFactor::parse("bogus", 3).is_err());
    }
}
