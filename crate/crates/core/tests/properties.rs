use num_complex::Complex64;
use proptest::prelude::*;

use hardy_core::functions::{make_family, make_profile_1d};
use hardy_core::hilbert::{equality_case, lemma1_residuals, orthogonal_case, polarization_defect, CVec};
use hardy_core::identities::{
    eval_t1, eval_t2, evaluate, verify_corollary_inequalities, EvalConfig, IdentityId, IdentityParams, Subject,
};
use hardy_core::quadrature::{integrate_finite, integrate_halfline, DecayHint, Integrand};
use hardy_core::sharpness::rayleigh_quotient_with_budget;

fn config() -> ProptestConfig {
    ProptestConfig {
        cases: 48,
        ..ProptestConfig::default()
    }
}

fn cvec(parts: &[(f64, f64)]) -> CVec {
    CVec::new(parts.iter().map(|&(re, im)| Complex64::new(re, im)).collect()).unwrap()
}

fn rel(a: f64, b: f64) -> f64 {
    (a - b).abs() / a.abs().max(b.abs()).max(f64::MIN_POSITIVE)
}

proptest! {
    #![proptest_config(config())]

    #[test]
    fn quadrature_is_linear(al in -3.0..3.0f64, be in -3.0..3.0f64, k in 0.2..4.0f64, m in 0.2..4.0f64) {
        let g = |x: f64| (-k * x).exp();
        let h = |x: f64| x * x * (-m * x * x).exp();
        let tol = 1e-11;
        let rg = integrate_halfline(&Integrand::new(g), tol, DecayHint::Exponential).unwrap();
        let rh = integrate_halfline(&Integrand::new(h), tol, DecayHint::Exponential).unwrap();
        let rs = integrate_halfline(&Integrand::new(|x: f64| al * g(x) + be * h(x)), tol, DecayHint::Exponential).unwrap();
        let combined = al * rg.value + be * rh.value;
        let budget = al.abs() * rg.error_estimate + be.abs() * rh.error_estimate + rs.error_estimate;
        prop_assert!((rs.value - combined).abs() <= budget + 1e-13 * (1.0 + combined.abs()));
    }

    #[test]
    fn finite_integrals_are_additive(a in 0.0..1.0f64, len in 0.1..5.0f64, frac in 0.05..0.95f64, k in 0.5..6.0f64) {
        let b = a + len;
        let c = a + frac * len;
        let g = Integrand::new(|x: f64| (k * x).sin() + x * x);
        let tol = 1e-12;
        let whole = integrate_finite(&g, a, b, tol).unwrap();
        let left = integrate_finite(&g, a, c, tol).unwrap();
        let right = integrate_finite(&g, c, b, tol).unwrap();
        let budget = whole.error_estimate + left.error_estimate + right.error_estimate;
        prop_assert!((left.value + right.value - whole.value).abs() <= budget + 1e-13 * whole.value.abs().max(1.0));
    }

    #[test]
    fn compact_halfline_matches_finite(lo in 0.05..2.0f64, len in 0.1..3.0f64) {
        let hi = lo + len;
        let f = |x: f64| if x > lo && x < hi { ((x - lo) * (hi - x)).powi(2) } else { 0.0 };
        let tol = 1e-10;
        let g = Integrand::new(f).with_singular_points([lo]);
        let half = integrate_halfline(&g, tol, DecayHint::CompactSupport(hi)).unwrap();
        let fin = integrate_finite(&Integrand::new(f), lo, hi, tol).unwrap();
        prop_assert!((half.value - fin.value).abs() <= 2.0 * tol * fin.value.abs().max(1.0));
    }

    #[test]
    fn radial_derivatives_match_differences(r in 0.1..10.0f64, a in 0.2..1.0f64, w in 0.3..2.0f64) {
        for f in [
            make_family("gaussian", &[], 3).unwrap(),
            make_family("exp_decay", &[], 3).unwrap(),
            make_family("bump", &[a, a + w], 3).unwrap(),
            make_family("power_cutoff", &[2.5], 3).unwrap(),
        ] {
            let p = &f.radial;
            let h = 1e-5;
            let fd = (p.value(r + h) - p.value(r - h)) / (2.0 * h);
            let d = p.deriv(r);
            prop_assert!((fd - d).abs() <= 1e-6 * d.abs().max(1e-3), "{}: {} vs {}", f.label(), fd, d);
        }
    }

    #[test]
    fn primitives_sum_to_the_total(x in 0.01..20.0f64, alpha in -0.5..2.0f64, a in 0.1..2.0f64, w in 0.1..3.0f64) {
        for f in [make_profile_1d("exp_decay", &[]).unwrap(), make_profile_1d("power_window", &[alpha, a, a + w]).unwrap()] {
            let total = f.total().unwrap();
            let s = f.forward_primitive(x) + f.tail_primitive(x);
            prop_assert!((s - total).abs() <= 1e-8 * total.abs().max(1e-300));
        }
    }

    #[test]
    fn t1_identity_holds_under_dilation(lambda in 0.05..20.0f64, n in 3usize..6) {
        let cfg = EvalConfig::default();
        let f = make_family("gaussian", &[], n).unwrap();
        let base = eval_t1(&f, &cfg).unwrap().report;
        let ev = eval_t1(&f.dilated(lambda), &cfg).unwrap();
        prop_assert!(ev.report.passed && ev.alternate.passed);
        prop_assert!(ev.remainder_disagreement() <= 1e-8);
        let k = lambda.powi(2 - n as i32);
        prop_assert!(rel(ev.report.lhs, k * base.lhs) <= 1e-8);
        prop_assert!(rel(ev.report.main_term, k * base.main_term) <= 1e-8);
        prop_assert!(rel(ev.report.remainder_term, k * base.remainder_term) <= 1e-8);
    }

    #[test]
    fn t2_identity_holds_for_bumps(a in 0.2..3.0f64, w in 0.1..3.0f64, radius in 0.1..8.0f64, n in 2usize..4) {
        let cfg = EvalConfig::default();
        let f = make_family("bump", &[a, a + w], n).unwrap();
        let ev = eval_t2(&f, radius, &cfg).unwrap();
        prop_assert!(ev.report.passed, "{:?}", ev.report);
        prop_assert!(ev.alternate.passed);
        prop_assert!(ev.remainder_disagreement() <= 1e-8);
        prop_assert!(verify_corollary_inequalities(&ev.report));
    }

    #[test]
    fn t3_identities_hold_for_windows(alpha in -0.5..2.0f64, a in 0.1..2.0f64, w in 0.2..3.0f64, p in 0.25..4.0f64) {
        let cfg = EvalConfig::default();
        let f = make_profile_1d("power_window", &[alpha, a, a + w]).unwrap();
        let params = IdentityParams::exponent(p);
        for id in [IdentityId::T3_eq113, IdentityId::T3_eq117] {
            let ev = evaluate(id, Subject::Profile(&f), &params, &cfg).unwrap();
            prop_assert!(ev.report.passed, "{:?}", ev.report);
            prop_assert!(ev.remainder_disagreement() <= 1e-8);
        }
    }

    #[test]
    fn quotients_stay_below_the_sharp_constant(a in 0.2..3.0f64, w in 0.1..3.0f64, radius in 0.2..5.0f64) {
        let cfg = EvalConfig::default();
        let cases: Vec<(IdentityId, IdentityParams, hardy_core::identities::TestSubject)> = vec![
            (IdentityId::T1_eq15, IdentityParams::dim(3),
             hardy_core::identities::TestSubject::Product(make_family("bump", &[a, a + w], 3).unwrap())),
            (IdentityId::T2_eq19, IdentityParams::radius(2, radius),
             hardy_core::identities::TestSubject::Product(make_family("bump", &[a, a + w], 2).unwrap())),
            (IdentityId::T3_eq113, IdentityParams::exponent(radius),
             hardy_core::identities::TestSubject::Profile(make_profile_1d("power_window", &[1.0, a, a + w]).unwrap())),
        ];
        for (id, params, s) in &cases {
            let q = rayleigh_quotient_with_budget(*id, s.as_subject(), params, &cfg).unwrap();
            let sharp = hardy_core::sharpness::sharp_constant(*id, params).unwrap();
            prop_assert!(q.value <= sharp + q.budget, "{id}: {} > {sharp}", q.value);
            prop_assert!(q.value < sharp);
            let ev = evaluate(*id, s.as_subject(), params, &cfg).unwrap();
            prop_assert!(ev.report.remainder_term > 10.0 * ev.report.quad_error_budget, "{:?}", ev.report);
        }
    }

    #[test]
    fn polarization_is_exact(
        u in prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), 16),
        v in prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), 16),
        log_c in -4.6..4.6f64,
    ) {
        let (u, v, c) = (cvec(&u), cvec(&v), log_c.exp());
        prop_assert!(polarization_defect(&u, &v, c).unwrap() <= 1e-12);
        let check = lemma1_residuals(&u, &v, c).unwrap();
        prop_assert!(check.consistency() <= 1e-12);
    }

    #[test]
    fn lemma_constructions_vanish_together(
        u in prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), 16),
        w in prop::collection::vec((-10.0..10.0f64, -10.0..10.0f64), 16),
        log_c in -4.6..4.6f64,
    ) {
        let (u, w, c) = (cvec(&u), cvec(&w), log_c.exp());
        prop_assume!(u.norm_sq() > 1e-6);
        for v in [equality_case(&u, c), orthogonal_case(&u, &w, c).unwrap()] {
            let check = lemma1_residuals(&u, &v, c).unwrap();
            prop_assert!(check.max_residual() <= 1e-12 * check.scale());
            prop_assert!(u.norm_sq().sqrt() <= 2.0 * c * v.norm_sq().sqrt() * (1.0 + 1e-12) + 1e-12);
        }
    }
}
