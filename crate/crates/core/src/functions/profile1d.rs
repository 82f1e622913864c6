//! One-dimensional profiles `f` on `(0, ∞)` together with the primitives
//! `F(x) = ∫_0^x f` and `G(x) = ∫_x^∞ f`.

use std::collections::BTreeMap;
use std::fmt;
use std::sync::Mutex;

use super::smooth::LogWindow;
use super::FunctionError;
use crate::quadrature::{integrate_window, QuadOptions};

/// Accuracy of quadrature-backed primitives.
const PRIMITIVE_REL_TOL: f64 = 1e-12;

pub enum Shape1D {
    Zero,
    /// `e^{-x}`
    ExpDecay,
    /// `x^k e^{-x}` for integer `k ≥ 0`.
    GammaKernel {
        k: u32,
    },
    /// `x^alpha` on `[a, b]`, zero elsewhere.
    PowerWindow {
        alpha: f64,
        a: f64,
        b: f64,
    },
    /// Smooth bump supported on `[a, b]`; primitives by memoized quadrature.
    Bump {
        a: f64,
        b: f64,
        memo: PrimitiveMemo,
    },
    /// `F(x) = x^{p/2} χ(log x)`.
    ExtremizerForward {
        p: f64,
        window: LogWindow,
    },
    /// `G(x) = x^{-p/2} χ(log x)`.
    ExtremizerBackward {
        p: f64,
        window: LogWindow,
    },
    /// `x^{-2} f(1/x)`, which swaps the roles of the two primitives.
    Inverted(Box<Profile1D>),
}

/// Cache of forward primitive values keyed by abscissa. New requests extend
/// from the nearest cached abscissa below, so each piece of the support is
/// integrated once.
#[derive(Default)]
pub struct PrimitiveMemo {
    forward: Mutex<BTreeMap<u64, f64>>,
    tail: Mutex<BTreeMap<u64, f64>>,
}

impl Clone for PrimitiveMemo {
    fn clone(&self) -> Self {
        Self::default()
    }
}

impl Clone for Shape1D {
    fn clone(&self) -> Self {
        match self {
            Shape1D::Zero => Shape1D::Zero,
            Shape1D::ExpDecay => Shape1D::ExpDecay,
            Shape1D::GammaKernel { k } => Shape1D::GammaKernel { k: *k },
            Shape1D::PowerWindow { alpha, a, b } => Shape1D::PowerWindow {
                alpha: *alpha,
                a: *a,
                b: *b,
            },
            Shape1D::Bump { a, b, .. } => Shape1D::Bump {
                a: *a,
                b: *b,
                memo: PrimitiveMemo::default(),
            },
            Shape1D::ExtremizerForward { p, window } => Shape1D::ExtremizerForward { p: *p, window: *window },
            Shape1D::ExtremizerBackward { p, window } => Shape1D::ExtremizerBackward { p: *p, window: *window },
            Shape1D::Inverted(inner) => Shape1D::Inverted(inner.clone()),
        }
    }
}

impl fmt::Debug for Shape1D {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Shape1D::Zero => write!(f, "Zero"),
            Shape1D::ExpDecay => write!(f, "ExpDecay"),
            Shape1D::GammaKernel { k } => write!(f, "GammaKernel({k})"),
            Shape1D::PowerWindow { alpha, a, b } => write!(f, "PowerWindow({alpha}, {a}, {b})"),
            Shape1D::Bump { a, b, .. } => write!(f, "Bump({a}, {b})"),
            Shape1D::ExtremizerForward { p, window } => write!(f, "ExtremizerForward({p}, {window:?})"),
            Shape1D::ExtremizerBackward { p, window } => write!(f, "ExtremizerBackward({p}, {window:?})"),
            Shape1D::Inverted(inner) => write!(f, "Inverted({:?})", inner.shape),
        }
    }
}

#[derive(Clone, Debug)]
pub struct Profile1D {
    pub label: String,
    pub shape: Shape1D,
}

fn bump_value(a: f64, b: f64, x: f64) -> f64 {
    if x <= a || x >= b {
        return 0.0;
    }
    let y = (2.0 * x - a - b) / (b - a);
    (1.0 - 1.0 / (1.0 - y * y)).exp()
}

fn factorial(k: u32) -> f64 {
    (1..=k).map(f64::from).product()
}

/// `∫_x^∞ y^k e^{-y} dy = k! e^{-x} Σ_{j ≤ k} x^j / j!`
fn gamma_upper(k: u32, x: f64) -> f64 {
    let mut term = 1.0;
    let mut sum = 1.0;
    for j in 1..=k {
        term *= x / f64::from(j);
        sum += term;
    }
    factorial(k) * (-x).exp() * sum
}

/// `∫_0^x y^k e^{-y} dy`, by its power series for small `x`.
fn gamma_lower(k: u32, x: f64) -> f64 {
    if x >= 1.0 {
        return factorial(k) - gamma_upper(k, x);
    }
    let mut sum = 0.0;
    let mut coef = 1.0; // (-1)^m / m!
    let mut xp = x.powi(k as i32 + 1);
    for m in 0..60 {
        let term = coef * xp / (f64::from(k) + 1.0 + m as f64);
        sum += term;
        if term.abs() <= 1e-18 * sum.abs() {
            break;
        }
        coef *= -1.0 / (m as f64 + 1.0);
        xp *= x;
    }
    sum
}

fn power_primitive(alpha: f64, lo: f64, hi: f64) -> f64 {
    if hi <= lo {
        return 0.0;
    }
    if alpha == -1.0 {
        (hi / lo).ln()
    } else {
        let e = alpha + 1.0;
        (hi.powf(e) - lo.powf(e)) / e
    }
}

impl Profile1D {
    pub fn new(label: impl Into<String>, shape: Shape1D) -> Self {
        Self {
            label: label.into(),
            shape,
        }
    }

    /// `f(x)`.
    pub fn value(&self, x: f64) -> f64 {
        match &self.shape {
            Shape1D::Zero => 0.0,
            Shape1D::ExpDecay => (-x).exp(),
            Shape1D::GammaKernel { k } => {
                if x == 0.0 {
                    if *k == 0 {
                        1.0
                    } else {
                        0.0
                    }
                } else {
                    (f64::from(*k) * x.ln() - x).exp()
                }
            }
            Shape1D::PowerWindow { alpha, a, b } => {
                if x < *a || x > *b {
                    0.0
                } else {
                    x.powf(*alpha)
                }
            }
            Shape1D::Bump { a, b, .. } => bump_value(*a, *b, x),
            Shape1D::ExtremizerForward { p, window } => {
                let t = x.ln();
                let (chi, dchi) = (window.value(t), window.deriv(t));
                if chi == 0.0 && dchi == 0.0 {
                    0.0
                } else {
                    ((0.5 * p - 1.0) * t).exp() * (0.5 * p * chi + dchi)
                }
            }
            Shape1D::ExtremizerBackward { p, window } => {
                let t = x.ln();
                let (chi, dchi) = (window.value(t), window.deriv(t));
                if chi == 0.0 && dchi == 0.0 {
                    0.0
                } else {
                    ((-0.5 * p - 1.0) * t).exp() * (0.5 * p * chi - dchi)
                }
            }
            Shape1D::Inverted(inner) => {
                let v = inner.value(1.0 / x);
                if v == 0.0 {
                    0.0
                } else {
                    v / (x * x)
                }
            }
        }
    }

    /// `∫_0^x f`.
    pub fn forward_primitive(&self, x: f64) -> f64 {
        match &self.shape {
            Shape1D::Zero => 0.0,
            Shape1D::ExpDecay => -(-x).exp_m1(),
            Shape1D::GammaKernel { k } => gamma_lower(*k, x),
            Shape1D::PowerWindow { alpha, a, b } => power_primitive(*alpha, *a, x.min(*b)),
            Shape1D::Bump { a, b, memo } => {
                if x <= *a {
                    0.0
                } else {
                    let x = x.min(*b);
                    memo_extend(&memo.forward, *a, x, |lo, hi| self.quad(lo, hi))
                }
            }
            Shape1D::ExtremizerForward { p, window } => {
                let t = x.ln();
                let chi = window.value(t);
                if chi == 0.0 {
                    0.0
                } else {
                    (0.5 * p * t).exp() * chi
                }
            }
            Shape1D::ExtremizerBackward { .. } => -self.tail_primitive(x),
            Shape1D::Inverted(inner) => inner.tail_primitive(1.0 / x),
        }
    }

    /// `∫_x^∞ f`.
    pub fn tail_primitive(&self, x: f64) -> f64 {
        match &self.shape {
            Shape1D::Zero => 0.0,
            Shape1D::ExpDecay => (-x).exp(),
            Shape1D::GammaKernel { k } => gamma_upper(*k, x),
            Shape1D::PowerWindow { alpha, a, b } => power_primitive(*alpha, x.max(*a), *b),
            Shape1D::Bump { a, b, memo } => {
                if x >= *b {
                    0.0
                } else {
                    // mirror image: extend downward from b
                    let x = x.max(*a);
                    memo_extend(&memo.tail, -*b, -x, |lo, hi| self.quad(-hi, -lo))
                }
            }
            Shape1D::ExtremizerForward { .. } => -self.forward_primitive(x),
            Shape1D::ExtremizerBackward { p, window } => {
                let t = x.ln();
                let chi = window.value(t);
                if chi == 0.0 {
                    0.0
                } else {
                    (-0.5 * p * t).exp() * chi
                }
            }
            Shape1D::Inverted(inner) => inner.forward_primitive(1.0 / x),
        }
    }

    /// `∫_0^∞ f`, if finite.
    pub fn total(&self) -> Option<f64> {
        match &self.shape {
            Shape1D::Zero | Shape1D::ExtremizerForward { .. } | Shape1D::ExtremizerBackward { .. } => Some(0.0),
            Shape1D::ExpDecay => Some(1.0),
            Shape1D::GammaKernel { k } => Some(factorial(*k)),
            Shape1D::PowerWindow { alpha, a, b } => Some(power_primitive(*alpha, *a, *b)),
            Shape1D::Bump { b, .. } => Some(self.forward_primitive(*b)),
            Shape1D::Inverted(inner) => inner.total(),
        }
    }

    /// Points where `f` or its derivatives jump.
    pub fn breakpoints(&self) -> Vec<f64> {
        match &self.shape {
            Shape1D::PowerWindow { a, b, .. } | Shape1D::Bump { a, b, .. } => vec![*a, *b],
            Shape1D::ExtremizerForward { window, .. } | Shape1D::ExtremizerBackward { window, .. } => {
                let (p0, p1) = window.plateau();
                [window.lo, p0, p1, window.hi].iter().map(|t| t.exp()).collect()
            }
            Shape1D::Inverted(inner) => {
                let mut b: Vec<f64> = inner.breakpoints().iter().map(|x| 1.0 / x).collect();
                b.sort_by(f64::total_cmp);
                b
            }
            _ => Vec::new(),
        }
    }

    /// Interval of `log x` outside of which `f` vanishes.
    pub fn log_support(&self) -> Option<(f64, f64)> {
        match &self.shape {
            Shape1D::Zero => Some((0.0, 0.0)),
            Shape1D::PowerWindow { a, b, .. } | Shape1D::Bump { a, b, .. } => Some((a.ln(), b.ln())),
            Shape1D::ExtremizerForward { window, .. } | Shape1D::ExtremizerBackward { window, .. } => {
                Some((window.lo, window.hi))
            }
            Shape1D::Inverted(inner) => inner.log_support().map(|(lo, hi)| (-hi, -lo)),
            _ => None,
        }
    }

    pub fn is_zero(&self) -> bool {
        matches!(self.shape, Shape1D::Zero)
    }

    /// `x ↦ x^{-2} f(1/x)`.
    pub fn inverted(&self) -> Profile1D {
        Profile1D::new(
            format!("inv({})", self.label),
            Shape1D::Inverted(Box::new(self.clone())),
        )
    }

    fn quad(&self, lo: f64, hi: f64) -> f64 {
        if hi <= lo {
            return 0.0;
        }
        let f = |x: f64| self.value(x);
        match integrate_window(&f, lo, hi, &[], &QuadOptions::new(PRIMITIVE_REL_TOL)) {
            Ok(r) => r.value,
            Err(e) => e.best_estimate().unwrap_or(f64::NAN),
        }
    }
}

/// `∫_{origin}^{x}` using the cached value at the largest key not above `x`.
fn memo_extend(memo: &Mutex<BTreeMap<u64, f64>>, origin: f64, x: f64, integrate: impl Fn(f64, f64) -> f64) -> f64 {
    // order-preserving key for finite doubles
    let key = |v: f64| {
        let bits = v.to_bits();
        if v.is_sign_negative() {
            !bits
        } else {
            bits | (1 << 63)
        }
    };
    let unkey = |k: u64| {
        if k & (1 << 63) != 0 {
            f64::from_bits(k & !(1 << 63))
        } else {
            f64::from_bits(!k)
        }
    };
    let mut cache = memo.lock().unwrap_or_else(|e| e.into_inner());
    if let Some(v) = cache.get(&key(x)) {
        return *v;
    }
    let (start, base) = cache
        .range(..key(x))
        .next_back()
        .map(|(k, v)| (unkey(*k), *v))
        .filter(|(s, _)| *s >= origin)
        .unwrap_or((origin, 0.0));
    let value = base + integrate(start, x);
    cache.insert(key(x), value);
    value
}

/// Catalogue of one-dimensional profiles.
///
/// | name | params |
/// |---|---|
/// | `exp_decay` | none |
/// | `gamma_kernel` | `k` (integer) |
/// | `power_window` | `alpha, a, b` |
/// | `bump` | `a, b` |
/// | `extremizer_forward_approx` | `p, eps` |
/// | `extremizer_backward_approx` | `p, eps` |
/// | `zero` | none |
pub fn make_profile_1d(name: &str, params: &[f64]) -> Result<Profile1D, FunctionError> {
    let want = |k: usize| -> Result<(), FunctionError> {
        if params.len() != k {
            Err(FunctionError::ParamCount {
                name: name.into(),
                expected: k,
                got: params.len(),
            })
        } else {
            Ok(())
        }
    };
    let invalid = |msg: &str| FunctionError::InvalidParams {
        name: name.into(),
        reason: msg.into(),
    };
    let label = if params.is_empty() {
        name.to_string()
    } else {
        let p: Vec<String> = params.iter().map(|v| v.to_string()).collect();
        format!("{name}[{}]", p.join(","))
    };
    let shape = match name {
        "zero" => {
            want(0)?;
            Shape1D::Zero
        }
        "exp_decay" => {
            want(0)?;
            Shape1D::ExpDecay
        }
        "gamma_kernel" => {
            want(1)?;
            let k = params[0];
            if !(k >= 0.0 && k.fract() == 0.0 && k <= 100.0) {
                return Err(invalid("k must be an integer in [0, 100]"));
            }
            Shape1D::GammaKernel { k: k as u32 }
        }
        "power_window" => {
            want(3)?;
            let (alpha, a, b) = (params[0], params[1], params[2]);
            if !(alpha.is_finite() && a > 0.0 && b > a && b.is_finite()) {
                return Err(invalid("need finite alpha and 0 < a < b"));
            }
            Shape1D::PowerWindow { alpha, a, b }
        }
        "bump" => {
            want(2)?;
            let (a, b) = (params[0], params[1]);
            if !(a > 0.0 && b > a && b.is_finite()) {
                return Err(invalid("need 0 < a < b"));
            }
            Shape1D::Bump {
                a,
                b,
                memo: PrimitiveMemo::default(),
            }
        }
        "extremizer_forward_approx" | "extremizer_backward_approx" => {
            want(2)?;
            let (p, eps) = (params[0], params[1]);
            if !(p > 0.0 && p.is_finite()) {
                return Err(invalid("p must be positive"));
            }
            let window = log_window_for(eps).ok_or_else(|| invalid("eps must lie in [1e-100, 1)"))?;
            if name == "extremizer_forward_approx" {
                Shape1D::ExtremizerForward { p, window }
            } else {
                Shape1D::ExtremizerBackward { p, window }
            }
        }
        _ => return Err(FunctionError::UnknownName(name.into())),
    };
    Ok(Profile1D::new(label, shape))
}

/// Symmetric window `[-log(1/ε), log(1/ε)]` for a truncation parameter ε.
pub(crate) fn log_window_for(eps: f64) -> Option<LogWindow> {
    if (1e-100..1.0).contains(&eps) {
        Some(LogWindow::symmetric(-eps.ln()))
    } else {
        None
    }
}
