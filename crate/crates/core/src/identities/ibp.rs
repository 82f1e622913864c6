//! Integration-by-parts routes: each left-side norm `‖u‖²` recomputed as
//! `-2c Re(u|v)`, and the raw pairings of `u` and `v` in the weighted space
//! where each identity is an instance of the orthogonality relation.

use serde::{Deserialize, Serialize};

use super::report::{IdentityId, IdentityParams};
use super::t1::radial_domain;
use super::t3::primitive_domain;
use super::{eval_t1, eval_t1_fullgradient, eval_t2, eval_t3_backward, eval_t3_forward};
use super::{term_error, EvalConfig, IdentityError};
use crate::functions::{ProductTestFunction, Profile1D};
use crate::quadrature::{integrate_split_sides, QuadError};

/// The function an identity is evaluated on.
#[derive(Clone, Copy, Debug)]
pub enum Subject<'a> {
    Product(&'a ProductTestFunction),
    Profile(&'a Profile1D),
}

fn need_product<'a>(id: IdentityId, s: Subject<'a>) -> Result<&'a ProductTestFunction, IdentityError> {
    match s {
        Subject::Product(f) => Ok(f),
        Subject::Profile(_) => Err(IdentityError::Unsupported {
            identity: id,
            reason: "expects a product test function".into(),
        }),
    }
}

fn need_profile<'a>(id: IdentityId, s: Subject<'a>) -> Result<&'a Profile1D, IdentityError> {
    match s {
        Subject::Profile(f) => Ok(f),
        Subject::Product(_) => Err(IdentityError::Unsupported {
            identity: id,
            reason: "expects a one-dimensional profile".into(),
        }),
    }
}

fn need<T>(id: IdentityId, v: Option<T>, what: &str) -> Result<T, IdentityError> {
    v.ok_or_else(|| IdentityError::Unsupported {
        identity: id,
        reason: format!("missing parameter `{what}`"),
    })
}

/// `(direct, via_ibp)`: the unscaled left-side norm computed directly and
/// through the pairing with the derivative term.
pub fn cross_check_ibp(
    id: IdentityId,
    subject: Subject<'_>,
    params: &IdentityParams,
    cfg: &EvalConfig,
) -> Result<(f64, f64), IdentityError> {
    let (lhs, cross, constant) = match id {
        IdentityId::T1_eq15 | IdentityId::T1_eq16 => {
            let f = need_product(id, subject)?;
            let r = eval_t1(f, cfg)?.report;
            let a = 0.5 * (f.dimension as f64 - 2.0);
            (r.lhs, r.cross_term, a * a)
        }
        IdentityId::T1_eq21 | IdentityId::T1_dirichlet_decomp => {
            let f = need_product(id, subject)?;
            let r = eval_t1_fullgradient(f, cfg)?.report;
            let a = 0.5 * (f.dimension as f64 - 2.0);
            (r.lhs, r.cross_term, a * a)
        }
        IdentityId::T2_eq19 | IdentityId::T2_eq110 => {
            let f = need_product(id, subject)?;
            let r = eval_t2(f, need(id, params.R, "R")?, cfg)?.report;
            (r.lhs, r.cross_term, 0.25)
        }
        IdentityId::T3_eq113 => {
            let p = need(id, params.p, "p")?;
            let r = eval_t3_forward(need_profile(id, subject)?, p, cfg)?.report;
            (r.lhs, r.cross_term, 0.25 * p * p)
        }
        IdentityId::T3_eq117 => {
            let p = need(id, params.p, "p")?;
            let r = eval_t3_backward(need_profile(id, subject)?, p, cfg)?.report;
            (r.lhs, r.cross_term, 0.25 * p * p)
        }
    };
    Ok((lhs / constant, cross))
}

/// Pairings of `u` and `v` in the weighted space of an identity, each an
/// independent quadrature.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct WeightedPairing {
    pub c: f64,
    pub norm_u_sq: f64,
    pub re_uv: f64,
    pub norm_v_sq: f64,
    /// `‖u + 2cv‖²`
    pub norm_sum_sq: f64,
    /// `Re(u | u + 2cv)`
    pub re_u_sum: f64,
}

/// `u`, `v`, `c` as used for each identity:
///
/// * T1: `u = f/|x|`, `v = ∂_r f`, `c = 1/(n-2)` in `L²(ℝⁿ)`
/// * T2: `u = (f - f_R)/(|x|^{n/2} log(R/|x|))`, `v = |x|^{1-n/2} ∂_r f`, `c = 1`
/// * T3: `u = F/x` (or `G/x`), `v = -f`, `c = 1/p` in `L²(x^{1∓p} dx)`
pub fn weighted_pairing(
    id: IdentityId,
    subject: Subject<'_>,
    params: &IdentityParams,
    cfg: &EvalConfig,
) -> Result<WeightedPairing, IdentityError> {
    let opts = cfg.quad();
    let q = |e: QuadError| term_error(id, "pairing", true, e);
    match id {
        IdentityId::T1_eq15 | IdentityId::T1_eq16 | IdentityId::T1_eq21 | IdentityId::T1_dirichlet_decomp => {
            let f = need_product(id, subject)?;
            f.check_t1()?;
            let k = f.dimension as f64 - 2.0;
            let c = 1.0 / k;
            let s = f.angular.sphere_norm_sq;
            let p = &f.radial;
            let dom = radial_domain(p);
            // u and v carry half the weight e^{(n-2)t} each
            let uv = |t: f64| {
                let (v, d) = (p.value_log(t), p.rderiv_log(t));
                if v == 0.0 && d == 0.0 {
                    (0.0, 0.0)
                } else {
                    let w = (0.5 * k * t).exp();
                    (v * w, d * w)
                }
            };
            let i = |g: &dyn Fn(f64, f64) -> f64| -> Result<f64, IdentityError> {
                dom.integrate(
                    |t| {
                        let (u, v) = uv(t);
                        g(u, v)
                    },
                    &opts,
                )
                .map(|r| s * r.value)
                .map_err(q)
            };
            pairing_from(c, i)
        }
        IdentityId::T2_eq19 | IdentityId::T2_eq110 => {
            let f = need_product(id, subject)?;
            f.check_t2()?;
            let radius = need(id, params.R, "R")?;
            let s = f.angular.sphere_norm_sq;
            let p = &f.radial;
            let t_r = radius.ln();
            let phi_r = p.value_log(t_r);
            let range = super::t2::split_range(p, t_r);
            let (bi, bo) = super::t2::side_breaks(p, t_r);
            let i = |g: &dyn Fn(f64, f64) -> f64| -> Result<f64, IdentityError> {
                let side = |sigma: f64| {
                    move |u: f64| {
                        let x = super::t2::side_point(p, t_r, phi_r, sigma, u);
                        g(x.q, x.dt)
                    }
                };
                integrate_split_sides(&side(1.0), &side(-1.0), &bi, &bo, range, &opts)
                    .map(|r| s * r.total().value)
                    .map_err(q)
            };
            pairing_from(1.0, i)
        }
        IdentityId::T3_eq113 | IdentityId::T3_eq117 => {
            let f = need_profile(id, subject)?;
            let p = need(id, params.p, "p")?;
            if !(p > 0.0) {
                return Err(IdentityError::Unsupported {
                    identity: id,
                    reason: format!("p = {p} must be positive"),
                });
            }
            let forward = id == IdentityId::T3_eq113;
            // weight x^{1∓p} dx = e^{(2∓p)t} dt
            let k = if forward { 2.0 - p } else { 2.0 + p };
            let dom = primitive_domain(f);
            let uv = |t: f64| {
                let x = t.exp();
                let prim = if forward {
                    f.forward_primitive(x)
                } else {
                    f.tail_primitive(x)
                };
                let v = f.value(x);
                if prim == 0.0 && v == 0.0 {
                    (0.0, 0.0)
                } else {
                    let w = (0.5 * k * t).exp();
                    (prim / x * w, -v * w)
                }
            };
            let i = |g: &dyn Fn(f64, f64) -> f64| -> Result<f64, IdentityError> {
                dom.integrate(
                    |t| {
                        let (u, v) = uv(t);
                        g(u, v)
                    },
                    &opts,
                )
                .map(|r| r.value)
                .map_err(q)
            };
            pairing_from(1.0 / p, i)
        }
    }
}

fn pairing_from<I>(c: f64, integrate: I) -> Result<WeightedPairing, IdentityError>
where
    I: Fn(&dyn Fn(f64, f64) -> f64) -> Result<f64, IdentityError>,
{
    Ok(WeightedPairing {
        c,
        norm_u_sq: integrate(&|u, _| u * u)?,
        re_uv: integrate(&|u, v| u * v)?,
        norm_v_sq: integrate(&|_, v| v * v)?,
        norm_sum_sq: integrate(&|u, v| (u + 2.0 * c * v) * (u + 2.0 * c * v))?,
        re_u_sum: integrate(&|u, v| u * (u + 2.0 * c * v))?,
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::functions::{make_family, make_profile_1d};
    use std::f64::consts::PI;

    #[test]
    fn t1_gaussian_routes_agree() {
        let f = make_family("gaussian", &[], 3).unwrap();
        let (d, v) = cross_check_ibp(
            IdentityId::T1_eq15,
            Subject::Product(&f),
            &IdentityParams::dim(3),
            &EvalConfig::default(),
        )
        .unwrap();
        let want = 2.0 * PI.powf(1.5);
        assert!((d - want).abs() < 1e-9 * want);
        assert!((v - want).abs() < 1e-9 * want);
    }

    #[test]
    fn t3_frullani_routes_agree() {
        let f = make_profile_1d("exp_decay", &[]).unwrap();
        let (d, v) = cross_check_ibp(
            IdentityId::T3_eq113,
            Subject::Profile(&f),
            &IdentityParams::exponent(1.0),
            &EvalConfig::default(),
        )
        .unwrap();
        let want = 2.0 * 2f64.ln();
        assert!((d - want).abs() < 1e-9 && (v - want).abs() < 1e-9);
    }

    #[test]
    fn zero_function_gives_zero_pair() {
        let f = make_family("zero", &[], 3).unwrap();
        let (d, v) = cross_check_ibp(
            IdentityId::T1_eq15,
            Subject::Product(&f),
            &IdentityParams::dim(3),
            &EvalConfig::default(),
        )
        .unwrap();
        assert_eq!((d, v), (0.0, 0.0));
    }

    #[test]
    fn subject_kind_and_params_are_checked() {
        let f = make_family("gaussian", &[], 3).unwrap();
        let cfg = EvalConfig::default();
        assert!(cross_check_ibp(
            IdentityId::T3_eq113,
            Subject::Product(&f),
            &IdentityParams::exponent(1.0),
            &cfg
        )
        .is_err());
        assert!(cross_check_ibp(IdentityId::T2_eq19, Subject::Product(&f), &IdentityParams::dim(3), &cfg).is_err());
    }

    #[test]
    fn pairings_satisfy_the_orthogonality_relation() {
        let cfg = EvalConfig::default();
        let g3 = make_family("gaussian", &[], 3).unwrap();
        let g2 = make_family("log_gaussian", &[], 2).unwrap();
        let e = make_profile_1d("exp_decay", &[]).unwrap();
        let cases = [
            weighted_pairing(
                IdentityId::T1_eq15,
                Subject::Product(&g3),
                &IdentityParams::dim(3),
                &cfg,
            )
            .unwrap(),
            weighted_pairing(
                IdentityId::T2_eq19,
                Subject::Product(&g2),
                &IdentityParams::radius(2, 1.0),
                &cfg,
            )
            .unwrap(),
            weighted_pairing(
                IdentityId::T3_eq113,
                Subject::Profile(&e),
                &IdentityParams::exponent(1.0),
                &cfg,
            )
            .unwrap(),
            weighted_pairing(
                IdentityId::T3_eq117,
                Subject::Profile(&e),
                &IdentityParams::exponent(1.0),
                &cfg,
            )
            .unwrap(),
        ];
        for w in cases {
            let scale = w.norm_u_sq + 4.0 * w.c * w.c * w.norm_v_sq;
            assert!((w.norm_u_sq + 2.0 * w.c * w.re_uv).abs() < 1e-8 * scale, "{w:?}");
            assert!(w.re_u_sum.abs() < 1e-8 * scale, "{w:?}");
        }
    }
}
