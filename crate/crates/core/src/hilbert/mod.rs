//! The orthogonality lemma in finite-dimensional complex inner-product
//! spaces: for `c > 0` the relations
//!
//! * `‖u‖² = -2c Re(u|v)`
//! * `‖u‖² = 4c²‖v‖² - ‖u + 2cv‖²`
//! * `Re(u | u + 2cv) = 0`
//!
//! are equivalent, through `‖u + 2cv‖² = ‖u‖² + 4c Re(u|v) + 4c²‖v‖²`.

use num_complex::Complex64;
use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde::{Deserialize, Serialize};
use thiserror::Error;

use crate::identities::{weighted_pairing, EvalConfig, IdentityError, IdentityId, IdentityParams, Subject};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum HilbertError {
    #[error("dimension mismatch: {0} vs {1}")]
    DimensionMismatch(usize, usize),
    #[error("empty vector")]
    Empty,
    #[error("non-finite component")]
    NonFinite,
    #[error("c = {0} must be positive")]
    BadConstant(f64),
    #[error(transparent)]
    Identity(#[from] IdentityError),
}

/// A vector in `ℂ^d`, `d ≥ 1`, with finite components.
#[derive(Clone, Debug, PartialEq)]
pub struct CVec(Vec<Complex64>);

impl CVec {
    pub fn new(components: Vec<Complex64>) -> Result<Self, HilbertError> {
        if components.is_empty() {
            return Err(HilbertError::Empty);
        }
        if components.iter().any(|z| !z.is_finite()) {
            return Err(HilbertError::NonFinite);
        }
        Ok(Self(components))
    }

    pub fn from_real(xs: &[f64]) -> Result<Self, HilbertError> {
        Self::new(xs.iter().map(|&x| Complex64::new(x, 0.0)).collect())
    }

    /// Standard complex normal components.
    pub fn random<R: Rng>(rng: &mut R, dim: usize) -> Self {
        let dim = dim.max(1);
        Self((0..dim).map(|_| Complex64::new(gaussian(rng), gaussian(rng))).collect())
    }

    pub fn dim(&self) -> usize {
        self.0.len()
    }

    pub fn components(&self) -> &[Complex64] {
        &self.0
    }

    pub fn norm_sq(&self) -> f64 {
        self.0.iter().map(|z| z.norm_sqr()).sum()
    }

    /// `self + k other`
    pub fn axpy(&self, k: Complex64, other: &CVec) -> Result<CVec, HilbertError> {
        check_dims(self, other)?;
        Ok(CVec(self.0.iter().zip(&other.0).map(|(a, b)| a + k * b).collect()))
    }

    pub fn scale(&self, k: Complex64) -> CVec {
        CVec(self.0.iter().map(|a| k * a).collect())
    }
}

fn gaussian<R: Rng>(rng: &mut R) -> f64 {
    // Box–Muller
    let u1: f64 = 1.0 - rng.gen::<f64>();
    let u2: f64 = rng.gen::<f64>();
    (-2.0 * u1.ln()).sqrt() * (std::f64::consts::TAU * u2).cos()
}

fn check_dims(u: &CVec, v: &CVec) -> Result<(), HilbertError> {
    if u.dim() == v.dim() {
        Ok(())
    } else {
        Err(HilbertError::DimensionMismatch(u.dim(), v.dim()))
    }
}

/// `(u|v) = Σ u_i conj(v_i)`, linear in the first slot. Only the real part
/// enters the lemma, so the choice of slot is immaterial there.
pub fn inner(u: &CVec, v: &CVec) -> Result<Complex64, HilbertError> {
    check_dims(u, v)?;
    Ok(u.0.iter().zip(&v.0).map(|(a, b)| a * b.conj()).sum())
}

/// The three residuals of the lemma for one `(u, v, c)`.
#[derive(Clone, Debug, PartialEq)]
pub struct LemmaCheck {
    pub u: CVec,
    pub v: CVec,
    pub c: f64,
    /// `‖u‖² + 2c Re(u|v)`
    pub res_1_23: f64,
    /// `‖u‖² - 4c²‖v‖² + ‖u + 2cv‖²`
    pub res_1_24: f64,
    /// `2 Re(u | u + 2cv)`
    pub res_1_25: f64,
}

impl LemmaCheck {
    /// `‖u‖² + 4c²‖v‖²`, the natural size of each residual.
    pub fn scale(&self) -> f64 {
        self.u.norm_sq() + 4.0 * self.c * self.c * self.v.norm_sq()
    }

    /// `|res_1_24 - 2 res_1_23|` and `|res_1_25 - 2 res_1_23|` over the scale.
    pub fn consistency(&self) -> f64 {
        let s = self.scale();
        if s == 0.0 {
            return 0.0;
        }
        let a = (self.res_1_24 - 2.0 * self.res_1_23).abs();
        let b = (self.res_1_25 - 2.0 * self.res_1_23).abs();
        a.max(b) / s
    }

    /// Largest residual over the scale.
    pub fn max_residual(&self) -> f64 {
        let s = self.scale();
        if s == 0.0 {
            return 0.0;
        }
        self.res_1_23.abs().max(self.res_1_24.abs()).max(self.res_1_25.abs()) / s
    }
}

pub fn lemma1_residuals(u: &CVec, v: &CVec, c: f64) -> Result<LemmaCheck, HilbertError> {
    if !(c > 0.0 && c.is_finite()) {
        return Err(HilbertError::BadConstant(c));
    }
    check_dims(u, v)?;
    let nu = u.norm_sq();
    let nv = v.norm_sq();
    let w = u.axpy(Complex64::new(2.0 * c, 0.0), v)?;
    Ok(LemmaCheck {
        u: u.clone(),
        v: v.clone(),
        c,
        res_1_23: nu + 2.0 * c * inner(u, v)?.re,
        res_1_24: nu - 4.0 * c * c * nv + w.norm_sq(),
        res_1_25: 2.0 * inner(u, &w)?.re,
    })
}

/// `‖u + 2cv‖² - ‖u‖² - 4c Re(u|v) - 4c²‖v‖²` over `‖u‖² + 4c²‖v‖²`.
pub fn polarization_defect(u: &CVec, v: &CVec, c: f64) -> Result<f64, HilbertError> {
    let w = u.axpy(Complex64::new(2.0 * c, 0.0), v)?;
    let nu = u.norm_sq();
    let nv = v.norm_sq();
    let d = w.norm_sq() - nu - 4.0 * c * inner(u, v)?.re - 4.0 * c * c * nv;
    let s = nu + 4.0 * c * c * nv;
    Ok(if s == 0.0 { 0.0 } else { d.abs() / s })
}

/// `v = -u/(2c)`, so that `u + 2cv = 0`.
pub fn equality_case(u: &CVec, c: f64) -> CVec {
    u.scale(Complex64::new(-0.5 / c, 0.0))
}

/// A `v` with `Re(u | u + 2cv) = 0`: `u + 2cv` is `w` with its real
/// projection onto `u` removed.
pub fn orthogonal_case(u: &CVec, w: &CVec, c: f64) -> Result<CVec, HilbertError> {
    let nu = u.norm_sq();
    let z = if nu == 0.0 {
        w.clone()
    } else {
        w.axpy(Complex64::new(-inner(u, w)?.re / nu, 0.0), u)?
    };
    Ok(z.axpy(Complex64::new(-1.0, 0.0), u)?
        .scale(Complex64::new(0.5 / c, 0.0)))
}

/// Summary of the randomized lemma suite.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct LemmaSuiteReport {
    pub trials: usize,
    pub dim: usize,
    pub seed: u64,
    /// Worst `|res_1_24 - 2 res_1_23|` and `|res_1_25 - 2 res_1_23|` over the scale.
    pub max_consistency: f64,
    pub max_polarization: f64,
    /// Worst residual of the equality construction `u + 2cv = 0`.
    pub max_equality_residual: f64,
    /// Worst residual of the orthogonal construction.
    pub max_orthogonal_residual: f64,
    /// `‖u‖ ≤ 2c‖v‖` held wherever the residuals vanished.
    pub cauchy_schwarz_ok: bool,
    pub tolerance: f64,
    pub passed: bool,
}

/// Relative tolerance of the randomized suite.
pub const LEMMA_TOL: f64 = 1e-12;

/// `trials` random triples `(u, v, c)` in `ℂ^dim` from a seeded generator,
/// plus the equality and orthogonal constructions built from each `u`.
pub fn randomized_suite(trials: usize, dim: usize, seed: u64) -> Result<LemmaSuiteReport, HilbertError> {
    if dim == 0 {
        return Err(HilbertError::Empty);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut max_consistency: f64 = 0.0;
    let mut max_polarization: f64 = 0.0;
    let mut max_eq: f64 = 0.0;
    let mut max_orth: f64 = 0.0;
    let mut cs = true;
    for _ in 0..trials {
        let u = CVec::random(&mut rng, dim);
        let v = CVec::random(&mut rng, dim);
        let w = CVec::random(&mut rng, dim);
        // log-uniform on [1e-2, 1e2]
        let c = 10f64.powf(rng.gen_range(-2.0..2.0));
        let generic = lemma1_residuals(&u, &v, c)?;
        max_consistency = max_consistency.max(generic.consistency());
        max_polarization = max_polarization.max(polarization_defect(&u, &v, c)?);
        for (v, slot) in [
            (equality_case(&u, c), &mut max_eq),
            (orthogonal_case(&u, &w, c)?, &mut max_orth),
        ] {
            let chk = lemma1_residuals(&u, &v, c)?;
            *slot = slot.max(chk.max_residual());
            max_consistency = max_consistency.max(chk.consistency());
            let (nu, nv) = (u.norm_sq().sqrt(), v.norm_sq().sqrt());
            cs &= nu <= 2.0 * c * nv * (1.0 + LEMMA_TOL) + LEMMA_TOL;
        }
    }
    let passed = max_consistency <= LEMMA_TOL
        && max_polarization <= LEMMA_TOL
        && max_eq <= LEMMA_TOL
        && max_orth <= LEMMA_TOL
        && cs;
    Ok(LemmaSuiteReport {
        trials,
        dim,
        seed,
        max_consistency,
        max_polarization,
        max_equality_residual: max_eq,
        max_orthogonal_residual: max_orth,
        cauchy_schwarz_ok: cs,
        tolerance: LEMMA_TOL,
        passed,
    })
}

/// The lemma with `u`, `v`, `c` taken from an identity and inner products
/// computed by quadrature in its weighted space.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedLemmaCheck {
    pub identity_id: IdentityId,
    pub c: f64,
    pub norm_u_sq: f64,
    pub re_uv: f64,
    pub norm_v_sq: f64,
    pub res_1_23: f64,
    pub res_1_24: f64,
    pub res_1_25: f64,
    /// `|res_1_23|` over `‖u‖² + 4c²‖v‖²`.
    pub relative: f64,
    pub passed: bool,
}

/// Relative tolerance for the weighted-space check.
pub const WEIGHTED_LEMMA_TOL: f64 = 1e-8;

pub fn lemma1_in_weighted_space(
    id: IdentityId,
    subject: Subject<'_>,
    params: &IdentityParams,
    cfg: &EvalConfig,
) -> Result<WeightedLemmaCheck, HilbertError> {
    let w = weighted_pairing(id, subject, params, cfg)?;
    let c = w.c;
    let res_1_23 = w.norm_u_sq + 2.0 * c * w.re_uv;
    let scale = w.norm_u_sq + 4.0 * c * c * w.norm_v_sq;
    let relative = if scale == 0.0 { 0.0 } else { res_1_23.abs() / scale };
    Ok(WeightedLemmaCheck {
        identity_id: id,
        c,
        norm_u_sq: w.norm_u_sq,
        re_uv: w.re_uv,
        norm_v_sq: w.norm_v_sq,
        res_1_23,
        res_1_24: w.norm_u_sq - 4.0 * c * c * w.norm_v_sq + w.norm_sum_sq,
        res_1_25: 2.0 * w.re_u_sum,
        relative,
        passed: relative <= WEIGHTED_LEMMA_TOL,
    })
}
