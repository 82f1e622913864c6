//! `((n-2)/2)² ‖f/|x|‖² = ‖∂_r f‖² - ‖∂_r f + (n-2) f / (2|x|)‖²` and the
//! full-gradient variant.
//!
//! With `Φ(t) = φ(e^t)` and `Φ_t = r φ'(r)`, each norm is `∫|ψ|²dσ` times
//! `∫ (·)² e^{(n-2)t} dt`.

use super::report::{Evaluation, IdentityId, IdentityParams, IdentityReport, TermBreakdown};
use super::{term_error, weighted_prod, weighted_sq, EvalConfig, IdentityError, LogDomain};
use crate::functions::{ProductTestFunction, RadialProfile, RadialShape};
use crate::quadrature::QuadResult;

/// Integration domain of a radial profile in `t = log r`.
pub(crate) fn radial_domain(p: &RadialProfile) -> LogDomain {
    let shift = p.log_scale;
    let mut breaks: Vec<f64> = match &p.shape {
        RadialShape::Subcritical { window, .. } => {
            let (a, b) = window.plateau();
            vec![a, b]
        }
        RadialShape::LogExtremizer { log_radius, window } => {
            let (a, b) = window.plateau();
            let (lo, hi) = (window.lo.exp(), window.hi.exp());
            let (a, b) = (a.exp(), b.exp());
            vec![
                log_radius - b,
                log_radius - a,
                log_radius - lo,
                *log_radius,
                log_radius + lo,
                log_radius + a,
                log_radius + b,
            ]
            .into_iter()
            .filter(|t| (log_radius - t).abs() <= hi)
            .collect()
        }
        _ => Vec::new(),
    };
    for b in &mut breaks {
        *b -= shift;
    }
    LogDomain {
        support: p.log_support(),
        center: p.log_center(),
        breaks,
    }
}

struct T1Integrals {
    /// `∫ Φ² e^{(n-2)t}`
    hardy: QuadResult,
    /// `∫ Φ_t² e^{(n-2)t}`
    main: QuadResult,
    /// `∫ (Φ_t + aΦ)² e^{(n-2)t}`
    rem15: QuadResult,
    /// `∫ (d/dt (e^{at} Φ))² dt`
    rem16: QuadResult,
    /// `∫ Φ Φ_t e^{(n-2)t}`
    pairing: QuadResult,
}

fn t1_integrals(f: &ProductTestFunction, cfg: &EvalConfig, id: IdentityId) -> Result<T1Integrals, IdentityError> {
    let n = f.dimension as f64;
    let k = n - 2.0;
    let a = 0.5 * k;
    let p = &f.radial;
    let dom = radial_domain(p);
    let opts = cfg.quad();
    let main = dom
        .integrate(|t| weighted_sq(p.rderiv_log(t), k, t), &opts)
        .map_err(|e| term_error(id, "main_term", false, e))?;
    let hardy = dom
        .integrate(|t| weighted_sq(p.value_log(t), k, t), &opts)
        .map_err(|e| term_error(id, "lhs", true, e))?;
    let rem15 = dom
        .integrate(|t| weighted_sq(p.rderiv_log(t) + a * p.value_log(t), k, t), &opts)
        .map_err(|e| term_error(id, "remainder_term", true, e))?;
    let rem16 = dom
        .integrate(
            |t| {
                let (v, d) = (p.value_log(t), p.rderiv_log(t));
                if v == 0.0 && d == 0.0 {
                    return 0.0;
                }
                let g = (a * t).exp();
                // product rule for e^{at} Φ; the weight e^{(n-2)t} e^{-2at} is 1
                let dw = a * (g * v) + g * d;
                dw * dw
            },
            &opts,
        )
        .map_err(|e| term_error(id, "remainder_term", true, e))?;
    let pairing = dom
        .integrate(|t| weighted_prod(p.value_log(t), p.rderiv_log(t), k, t), &opts)
        .map_err(|e| term_error(id, "cross_term", true, e))?;
    Ok(T1Integrals {
        hardy,
        main,
        rem15,
        rem16,
        pairing,
    })
}

/// Both remainder forms. The report carries the first, `alternate` the second.
pub fn eval_t1(f: &ProductTestFunction, cfg: &EvalConfig) -> Result<Evaluation, IdentityError> {
    f.check_t1()?;
    let n = f.dimension;
    let k = n as f64 - 2.0;
    let a = 0.5 * k;
    let s = f.angular.sphere_norm_sq;
    let params = IdentityParams::dim(n);
    let it = t1_integrals(f, cfg, IdentityId::T1_eq15)?;

    let lhs = it.hardy.scaled(a * a * s);
    let main = it.main.scaled(s);
    let cross = -it.pairing.value * s / a;
    let report = IdentityReport::assemble(
        IdentityId::T1_eq15,
        params,
        lhs,
        main,
        it.rem15.scaled(s),
        cross,
        cfg.threshold,
    );
    let alternate = IdentityReport::assemble(
        IdentityId::T1_eq16,
        params,
        lhs,
        main,
        it.rem16.scaled(s),
        cross,
        cfg.threshold,
    );
    let terms = vec![
        TermBreakdown::new("lhs", k - 1.0, 0, it.hardy, a * a * s),
        TermBreakdown::new("main_term", k + 1.0, 0, it.main, s),
        TermBreakdown::new("remainder_term", k + 1.0, 0, it.rem15, s),
        TermBreakdown::new("remainder_alt", k + 1.0, 0, it.rem16, s),
        TermBreakdown::new("cross_term", k, 0, it.pairing, -s / a),
    ];
    Ok(Evaluation {
        report,
        alternate,
        terms,
        sides: None,
    })
}

/// `((n-2)/2)² ‖f/|x|‖² = ‖∇f‖² - ‖∇f + (n-2) x f / (2|x|²)‖²`.
///
/// `alternate` is the radial/spherical decomposition recast as a residual:
/// `lhs` is the radial-derivative remainder, `main_term` the full-gradient
/// remainder and `remainder_term` the spherical Dirichlet component.
pub fn eval_t1_fullgradient(f: &ProductTestFunction, cfg: &EvalConfig) -> Result<Evaluation, IdentityError> {
    let id = IdentityId::T1_eq21;
    let Some(sd) = f.angular.sphere_deriv_norm_sq else {
        return Err(IdentityError::Unsupported {
            identity: id,
            reason: format!(
                "angular factor `{}` has no spherical-gradient constant",
                f.angular.label
            ),
        });
    };
    f.check_t1()?;
    let n = f.dimension;
    let k = n as f64 - 2.0;
    let a = 0.5 * k;
    let s = f.angular.sphere_norm_sq;
    let params = IdentityParams::dim(n);
    let it = t1_integrals(f, cfg, id)?;

    let p = &f.radial;
    let dom = radial_domain(p);
    // expanded square plus the spherical part, as a single integrand
    let rem21 = dom
        .integrate(
            |t| {
                let (v, d) = (p.value_log(t), p.rderiv_log(t));
                if v == 0.0 && d == 0.0 {
                    return 0.0;
                }
                let w = (0.5 * k * t).exp();
                let (v, d) = (v * w, d * w);
                s * (d * d + 2.0 * a * v * d + a * a * v * v) + sd * v * v
            },
            &cfg.quad(),
        )
        .map_err(|e| term_error(id, "remainder_term", true, e))?;

    let spherical = it.hardy.scaled(sd);
    let grad_sq = it.main.scaled(s).combine(spherical);
    let lhs = it.hardy.scaled(a * a * s);
    let cross = -it.pairing.value * s / a;
    let report = IdentityReport::assemble(id, params, lhs, grad_sq, rem21, cross, cfg.threshold);
    let alternate = IdentityReport::assemble(
        IdentityId::T1_dirichlet_decomp,
        params,
        it.rem15.scaled(s),
        rem21,
        spherical,
        cross,
        cfg.threshold,
    );
    let terms = vec![
        TermBreakdown::new("lhs", k - 1.0, 0, it.hardy, a * a * s),
        TermBreakdown::new("main_term", k + 1.0, 0, it.main, s),
        TermBreakdown::new("spherical", k - 1.0, 0, it.hardy, sd),
        TermBreakdown::new("remainder_term", k + 1.0, 0, rem21, 1.0),
        TermBreakdown::new("remainder_radial", k + 1.0, 0, it.rem15, s),
        TermBreakdown::new("cross_term", k, 0, it.pairing, -s / a),
    ];
    Ok(Evaluation {
        report,
        alternate,
        terms,
        sides: None,
    })
}
