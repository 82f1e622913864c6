//! Globally adaptive 7-point Gauss / 15-point Kronrod integration.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use super::sum::NeumaierSum;
use super::{QuadError, QuadResult};

// Positive abscissae of the 15-point Kronrod rule; odd indices are the Gauss nodes.
#[allow(clippy::excessive_precision)]
const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_5,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_48,
    0.0,
];

#[allow(clippy::excessive_precision)]
const WGK: [f64; 8] = [
    0.022_935_322_010_529_224,
    0.063_092_092_629_978_56,
    0.104_790_010_322_250_19,
    0.140_653_259_715_525_92,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_42,
    0.204_432_940_075_298_89,
    0.209_482_141_084_727_82,
];

#[allow(clippy::excessive_precision)]
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_64,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Stopping rule for the adaptive loop: stop once the total error estimate
/// is below `max(abs, rel * |value|)`.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct Tolerance {
    pub rel: f64,
    pub abs: f64,
}

impl Tolerance {
    pub fn relative(rel: f64) -> Self {
        Self { rel, abs: 0.0 }
    }

    pub fn target(&self, value: f64) -> f64 {
        self.abs.max(self.rel * value.abs())
    }
}

#[derive(Clone, Copy, Debug)]
pub(crate) struct Segment {
    pub a: f64,
    pub b: f64,
    pub value: f64,
    pub error: f64,
}

impl PartialEq for Segment {
    fn eq(&self, other: &Self) -> bool {
        self.error.total_cmp(&other.error) == Ordering::Equal
    }
}

impl Eq for Segment {}

impl PartialOrd for Segment {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Segment {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn sample<F: Fn(f64) -> f64>(f: &F, x: f64) -> Result<f64, QuadError> {
    let y = f(x);
    if y.is_finite() {
        Ok(y)
    } else {
        Err(QuadError::Domain { abscissa: x, value: y })
    }
}

/// One G7K15 panel on `[a, b]`. Endpoints are never sampled.
pub(crate) fn gk15<F: Fn(f64) -> f64>(f: &F, a: f64, b: f64) -> Result<Segment, QuadError> {
    let center = 0.5 * (a + b);
    let half = 0.5 * (b - a);
    let f_center = sample(f, center)?;

    let mut res_k = f_center * WGK[7];
    let mut res_g = f_center * WG[3];
    let mut res_abs = f_center.abs() * WGK[7];
    let mut fv1 = [0.0; 7];
    let mut fv2 = [0.0; 7];

    for j in 0..7 {
        let dx = half * XGK[j];
        let f1 = sample(f, center - dx)?;
        let f2 = sample(f, center + dx)?;
        fv1[j] = f1;
        fv2[j] = f2;
        res_k += WGK[j] * (f1 + f2);
        res_abs += WGK[j] * (f1.abs() + f2.abs());
        if j % 2 == 1 {
            res_g += WG[j / 2] * (f1 + f2);
        }
    }

    let mean = 0.5 * res_k;
    let mut res_asc = WGK[7] * (f_center - mean).abs();
    for j in 0..7 {
        res_asc += WGK[j] * ((fv1[j] - mean).abs() + (fv2[j] - mean).abs());
    }

    let width = half.abs();
    let value = res_k * half;
    res_abs *= width;
    res_asc *= width;

    let mut error = ((res_k - res_g) * half).abs();
    if res_asc != 0.0 && error != 0.0 {
        error = res_asc * (200.0 * error / res_asc).powf(1.5).min(1.0);
    }
    if res_abs > f64::MIN_POSITIVE / (50.0 * f64::EPSILON) {
        error = error.max(50.0 * f64::EPSILON * res_abs);
    }

    Ok(Segment { a, b, value, error })
}

/// Global adaptive integration over the panels delimited by `breakpoints`
/// (sorted, at least two entries). The worst panel is bisected until the
/// summed error estimate meets `tol` or `max_subdivisions` is exhausted.
pub(crate) fn adaptive<F: Fn(f64) -> f64>(
    f: &F,
    breakpoints: &[f64],
    tol: Tolerance,
    max_subdivisions: usize,
) -> Result<QuadResult, QuadError> {
    debug_assert!(breakpoints.len() >= 2);
    let mut heap = BinaryHeap::new();
    let mut frozen: Vec<Segment> = Vec::new();
    let mut value = NeumaierSum::new();
    let mut error = NeumaierSum::new();

    for w in breakpoints.windows(2) {
        if w[1] > w[0] {
            let seg = gk15(f, w[0], w[1])?;
            value += seg.value;
            error += seg.error;
            heap.push(seg);
        }
    }

    let mut subdivisions = 0usize;
    loop {
        let v = value.sum();
        let e = error.sum().max(0.0);
        if e <= tol.target(v) {
            break;
        }
        let Some(worst) = heap.pop() else {
            // every remaining panel is at floating-point resolution
            let (value, error_estimate) = totals(&heap, &frozen);
            return Err(QuadError::NonConvergence {
                best: value,
                error: error_estimate,
                subdivisions,
            });
        };
        let mid = 0.5 * (worst.a + worst.b);
        if !(worst.a < mid && mid < worst.b) {
            frozen.push(worst);
            continue;
        }
        if subdivisions >= max_subdivisions {
            heap.push(worst);
            let (value, error_estimate) = totals(&heap, &frozen);
            return Err(QuadError::NonConvergence {
                best: value,
                error: error_estimate,
                subdivisions,
            });
        }
        let left = gk15(f, worst.a, mid)?;
        let right = gk15(f, mid, worst.b)?;
        value += left.value;
        value += right.value;
        value += -worst.value;
        error += left.error;
        error += right.error;
        error += -worst.error;
        heap.push(left);
        heap.push(right);
        subdivisions += 1;
    }

    let (value, error_estimate) = totals(&heap, &frozen);
    Ok(QuadResult {
        value,
        error_estimate,
        subdivisions,
    })
}

fn totals(heap: &BinaryHeap<Segment>, frozen: &[Segment]) -> (f64, f64) {
    let mut value = NeumaierSum::new();
    let mut error = NeumaierSum::new();
    for seg in heap.iter().chain(frozen.iter()) {
        value += seg.value;
        error += seg.error;
    }
    (value.sum(), error.sum())
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn single_panel_is_exact_for_low_degree_polynomials() {
        // the Kronrod rule integrates degree <= 22 exactly
        let seg = gk15(&|x: f64| x.powi(10) - 3.0 * x.powi(3), -1.0, 2.0).unwrap();
        let exact = (2f64.powi(11) + 1.0) / 11.0 - 0.75 * (16.0 - 1.0);
        assert!((seg.value - exact).abs() < 1e-12);
    }

    #[test]
    fn never_samples_endpoints() {
        let seg = gk15(
            &|x: f64| {
                assert!(x > 0.0 && x < 1.0);
                x.sqrt()
            },
            0.0,
            1.0,
        )
        .unwrap();
        assert!(seg.value > 0.6 && seg.value < 0.7);
    }

    #[test]
    fn reports_non_finite_samples() {
        let err = gk15(&|x: f64| if x > 0.5 { f64::NAN } else { 1.0 }, 0.0, 1.0).unwrap_err();
        match err {
            QuadError::Domain { abscissa, .. } => assert!(abscissa > 0.5),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn subdivision_budget_is_enforced() {
        let f = |x: f64| x.sin() / x.sqrt();
        let err = adaptive(&f, &[0.0, 100.0], Tolerance::relative(1e-14), 3).unwrap_err();
        assert!(matches!(err, QuadError::NonConvergence { subdivisions: 3, .. }));
    }
}
