//! Reference values from a 10⁷-point midpoint grid, independent of the
//! adaptive engine, checked against closed forms and against the engine.

use std::f64::consts::{LN_2, PI};

use hardy_core::functions::{make_family, make_profile_1d, truncation_window};
use hardy_core::identities::{
    eval_t1, eval_t2, eval_t3_backward, eval_t3_forward, EvalConfig, IdentityId, IdentityParams, Subject,
};
use hardy_core::quadrature::{integrate_finite, integrate_log_split, Integrand};
use hardy_core::sharpness::{rayleigh_quotient, sharp_constant};

const GRID: usize = 10_000_000;

fn midpoint(f: impl Fn(f64) -> f64, a: f64, b: f64) -> f64 {
    let h = (b - a) / GRID as f64;
    let mut sum = 0.0;
    let mut comp = 0.0;
    for k in 0..GRID {
        let y = f(a + (k as f64 + 0.5) * h) - comp;
        let t = sum + y;
        comp = (t - sum) - y;
        sum = t;
    }
    sum * h
}

fn close(got: f64, want: f64, tol: f64, what: &str) {
    assert!(
        (got - want).abs() <= tol,
        "{what}: got {got}, want {want}, diff {:e}",
        (got - want).abs()
    );
}

#[test]
fn gaussian_in_three_dimensions() {
    let s = 4.0 * PI;
    let phi = |r: f64| (-r * r / 2.0).exp();
    let dphi = |r: f64| -r * phi(r);
    let lhs = 0.25 * s * midpoint(|r| phi(r) * phi(r), 0.0, 12.0);
    let main = s * midpoint(|r| dphi(r) * dphi(r) * r * r, 0.0, 12.0);
    let rem = s * midpoint(|r| (r * dphi(r) + 0.5 * phi(r)).powi(2), 0.0, 12.0);

    let c = PI.powf(1.5);
    close(lhs, c / 2.0, 1e-9, "grid lhs");
    close(main, 1.5 * c, 1e-9, "grid main");
    close(rem, c, 1e-9, "grid remainder");

    let ev = eval_t1(&make_family("gaussian", &[], 3).unwrap(), &EvalConfig::default()).unwrap();
    close(ev.report.lhs, lhs, 1e-9, "engine lhs");
    close(ev.report.main_term, main, 1e-9, "engine main");
    close(ev.report.remainder_term, rem, 1e-9, "engine remainder");
    close(ev.alternate.remainder_term, rem, 1e-9, "engine second remainder form");
}

#[test]
fn gaussian_in_higher_dimensions() {
    for n in [4usize, 5] {
        let s = hardy_core::functions::sphere_surface_measure(n).unwrap();
        let a = 0.5 * (n as f64 - 2.0);
        let phi = |r: f64| (-r * r / 2.0).exp();
        let w = |r: f64| r.powi(n as i32 - 1);
        let lhs = a * a * s * midpoint(|r| phi(r) * phi(r) * w(r) / (r * r), 0.0, 12.0);
        let main = s * midpoint(|r| (r * phi(r)).powi(2) * w(r), 0.0, 12.0);
        let ev = eval_t1(&make_family("gaussian", &[], n).unwrap(), &EvalConfig::default()).unwrap();
        close(ev.report.lhs, lhs, 1e-9, "lhs");
        close(ev.report.main_term, main, 1e-9, "main");
        close(ev.report.remainder_term, main - lhs, 1e-9, "remainder");
    }
}

// In t = log x every weight is elementary; [-40, 40] covers (0, ∞) to far
// below the tolerance for these integrands.
#[test]
fn exponential_forward_at_unit_exponent() {
    let big_f = |x: f64| -(-x).exp_m1();
    let lhs = 0.25
        * midpoint(
            |t| {
                let x = t.exp();
                big_f(x).powi(2) / x
            },
            -40.0,
            40.0,
        );
    let main = midpoint(
        |t| {
            let x = t.exp();
            (-2.0 * x).exp() * x
        },
        -40.0,
        40.0,
    );
    let rem = midpoint(
        |t| {
            let x = t.exp();
            ((-x).exp() - big_f(x) / (2.0 * x)).powi(2) * x
        },
        -40.0,
        40.0,
    );
    close(lhs, LN_2 / 2.0, 1e-9, "grid lhs");
    close(main, 0.5, 1e-9, "grid main");
    close(rem, (1.0 - LN_2) / 2.0, 1e-9, "grid remainder");

    let f = make_profile_1d("exp_decay", &[]).unwrap();
    let ev = eval_t3_forward(&f, 1.0, &EvalConfig::default()).unwrap();
    close(ev.report.lhs, lhs, 1e-9, "engine lhs");
    close(ev.report.main_term, main, 1e-9, "engine main");
    close(ev.report.remainder_term, rem, 1e-9, "engine remainder");
    close(ev.alternate.remainder_term, rem, 1e-9, "engine derivative form");
}

#[test]
fn exponential_backward_at_unit_exponent() {
    let lhs = 0.25 * midpoint(|x| (-2.0 * x).exp(), 0.0, 40.0);
    let main = midpoint(|x| x * x * (-2.0 * x).exp(), 0.0, 40.0);
    let rem = midpoint(|x| (-2.0 * x).exp() * (x - 0.5).powi(2), 0.0, 40.0);
    close(lhs, 0.125, 1e-9, "grid lhs");
    close(main, 0.25, 1e-9, "grid main");
    close(rem, 0.125, 1e-9, "grid remainder");

    let f = make_profile_1d("exp_decay", &[]).unwrap();
    let ev = eval_t3_backward(&f, 1.0, &EvalConfig::default()).unwrap();
    close(ev.report.lhs, lhs, 1e-9, "engine lhs");
    close(ev.report.main_term, main, 1e-9, "engine main");
    close(ev.report.remainder_term, rem, 1e-9, "engine remainder");
}

/// Terms of the logarithmic identity for `φ = exp(-(log r)²)` in the plane,
/// on t ∈ [-12, 12]; beyond that `φ` is below 1e-60 and the tails of the
/// left side and the remainder are `φ(R)²/(4 s²)`, integrated exactly.
fn log_gaussian_grid(radius: f64) -> (f64, f64, f64) {
    let s = 2.0 * PI;
    let tr = radius.ln();
    let phi = |t: f64| (-t * t).exp();
    let dphi = |t: f64| -2.0 * t * phi(t);
    let pr = phi(tr);
    let tail = pr * pr / 4.0 * (1.0 / (12.0 - tr) + 1.0 / (12.0 + tr));
    let lhs = s * (0.25 * midpoint(|t| ((phi(t) - pr) / (t - tr)).powi(2), -12.0, 12.0) + tail);
    let main = s * midpoint(|t| dphi(t).powi(2), -12.0, 12.0);
    let rem = s * (midpoint(|t| (dphi(t) + (phi(t) - pr) / (2.0 * (tr - t))).powi(2), -12.0, 12.0) + tail);
    (lhs, main, rem)
}

#[test]
fn log_gaussian_in_the_plane() {
    let f = make_family("log_gaussian", &[], 2).unwrap();
    for radius in [1.0, 2.0] {
        let (lhs, main, rem) = log_gaussian_grid(radius);
        close(main, 2.0 * PI * (PI / 2.0).sqrt(), 1e-9, "grid main");
        close(lhs, main - rem, 1e-8, "grid identity");
        let ev = eval_t2(&f, radius, &EvalConfig::default()).unwrap();
        assert!(ev.report.lhs > 0.0 && ev.report.remainder_term > 0.0 && ev.report.main_term > 0.0);
        assert!(ev.report.residual_rel <= 1e-8);
        close(ev.report.lhs, lhs, 1e-8, "engine lhs");
        close(ev.report.main_term, main, 1e-8, "engine main");
        close(ev.report.remainder_term, rem, 1e-8, "engine remainder");
        close(ev.alternate.remainder_term, rem, 1e-8, "engine second remainder form");
    }
}

#[test]
fn bounded_log_singularity_across_the_split() {
    let g = |r: f64| (1.0 - r).powi(2) / (r * r.ln().powi(2));
    // trapezoid on (1/2, 2); r = 1 sits at node index GRID/3, which is not an integer
    let (a, b) = (0.5, 2.0);
    let h = (b - a) / GRID as f64;
    let inner: f64 = (1..GRID).map(|k| g(a + k as f64 * h)).sum();
    let oracle = h * (0.5 * (g(a) + g(b)) + inner);

    let windowed = Integrand::new(|r: f64| if r > a && r < b { g(r) } else { 0.0 }).with_singular_points([a, b]);
    let split = integrate_log_split(&windowed, 1.0, 1e-10).unwrap();
    close(split.value, oracle, 1e-8, "log split");
    let finite = integrate_finite(&Integrand::new(g).with_singular_points([1.0]), a, b, 1e-10).unwrap();
    close(finite.value, oracle, 1e-8, "finite with breakpoint");
}

/// For `φ = r^{-a} χ(log r)` the quotient over its sharp value is
/// `∫χ² / (∫χ² + ∫χ'²/a²)`.
#[test]
fn sweep_fraction_matches_window_integrals() {
    let cfg = EvalConfig::default();
    for (n, eps) in [(3usize, 1e-2), (3, 1e-4), (4, 1e-4), (5, 1e-8)] {
        let w = truncation_window(eps).unwrap();
        let a = 0.5 * (n as f64 - 2.0);
        let chi2 = midpoint(|t| w.value(t).powi(2), w.lo, w.hi);
        let dchi2 = midpoint(|t| w.deriv(t).powi(2), w.lo, w.hi);
        let oracle = chi2 / (chi2 + dchi2 / (a * a));

        let f = make_family("subcritical_extremizer_approx", &[eps], n).unwrap();
        let params = IdentityParams::dim(n);
        let q = rayleigh_quotient(IdentityId::T1_eq15, Subject::Product(&f), &params, &cfg).unwrap();
        let sharp = sharp_constant(IdentityId::T1_eq15, &params).unwrap();
        close(q / sharp, oracle, 1e-8, &format!("n={n}, eps={eps}"));
    }
}
