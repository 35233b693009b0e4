//! Globally adaptive Gauss–Kronrod (7/15) quadrature.

use std::cmp::Ordering;
use std::collections::BinaryHeap;

use crate::error::{Error, Result};

const XGK: [f64; 8] = [
    0.991_455_371_120_812_6,
    0.949_107_912_342_758_5,
    0.864_864_423_359_769_1,
    0.741_531_185_599_394_4,
    0.586_087_235_467_691_1,
    0.405_845_151_377_397_2,
    0.207_784_955_007_898_5,
    0.0,
];
const WGK: [f64; 8] = [
    0.022_935_322_010_529_22,
    0.063_092_092_629_978_55,
    0.104_790_010_322_250_2,
    0.140_653_259_715_525_9,
    0.169_004_726_639_267_9,
    0.190_350_578_064_785_4,
    0.204_432_940_075_298_9,
    0.209_482_141_084_727_8,
];
// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5) and the centre.
const WG: [f64; 4] = [
    0.129_484_966_168_869_7,
    0.279_705_391_489_276_7,
    0.381_830_050_505_118_9,
    0.417_959_183_673_469_4,
];

/// Adaptive integrator settings.
#[derive(Debug, Clone, Copy)]
pub struct Quadrature {
    pub abs_tol: f64,
    pub rel_tol: f64,
    pub max_intervals: usize,
}

impl Default for Quadrature {
    fn default() -> Self {
        Self {
            abs_tol: 1e-10,
            rel_tol: 0.0,
            max_intervals: 4000,
        }
    }
}

struct Panel {
    a: f64,
    b: f64,
    value: f64,
    error: f64,
}

impl PartialEq for Panel {
    fn eq(&self, other: &Self) -> bool {
        self.error == other.error
    }
}
impl Eq for Panel {}
impl PartialOrd for Panel {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}
impl Ord for Panel {
    fn cmp(&self, other: &Self) -> Ordering {
        self.error.total_cmp(&other.error)
    }
}

fn gk15(f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = fc * WGK[7];
    let mut gauss = fc * WG[3];
    for j in 0..7 {
        let dx = h * XGK[j];
        let pair = f(c - dx) + f(c + dx);
        kronrod += WGK[j] * pair;
        if j % 2 == 1 {
            gauss += WG[j / 2] * pair;
        }
    }
    let value = kronrod * h;
    let err = ((kronrod - gauss) * h).abs();
    (value, err)
}

impl Quadrature {
    pub fn with_tol(abs_tol: f64) -> Self {
        Self {
            abs_tol,
            ..Self::default()
        }
    }

    pub fn relative(rel_tol: f64, abs_tol: f64) -> Self {
        Self {
            abs_tol,
            rel_tol,
            ..Self::default()
        }
    }

    /// Integrates `f` over `[lo, hi]`; `hi` may be `+∞`, in which case the
    /// substitution `t = lo + x/(1−x)` maps the range onto `[0, 1)`.
    pub fn integrate(&self, mut f: impl FnMut(f64) -> f64, lo: f64, hi: f64) -> Result<f64> {
        if !(self.abs_tol > 0.0 || self.rel_tol > 0.0) {
            return Err(Error::invalid("quadrature tolerance must be positive"));
        }
        if lo.is_nan() || hi.is_nan() || lo.is_infinite() {
            return Err(Error::invalid(format!("unsupported integration range [{lo}, {hi}]")));
        }
        if hi == lo {
            return Ok(0.0);
        }
        if hi < lo {
            return self.integrate(f, hi, lo).map(|v| -v);
        }
        if hi.is_infinite() {
            let mut g = |x: f64| {
                let one_minus = 1.0 - x;
                let t = lo + x / one_minus;
                f(t) / (one_minus * one_minus)
            };
            self.adapt(&mut g, 0.0, 1.0)
        } else {
            self.adapt(&mut f, lo, hi)
        }
    }

    /// Integrates over the finite range spanned by `points` (sorted ascending),
    /// starting the global refinement from one panel per consecutive pair.
    /// Useful when the integrand's features (peaks, kinks) are known in advance.
    pub fn integrate_over(&self, mut f: impl FnMut(f64) -> f64, points: &[f64]) -> Result<f64> {
        if !(self.abs_tol > 0.0 || self.rel_tol > 0.0) {
            return Err(Error::invalid("quadrature tolerance must be positive"));
        }
        if points.iter().any(|p| !p.is_finite()) || points.windows(2).any(|w| w[1] < w[0]) {
            return Err(Error::invalid("breakpoints must be finite and ascending"));
        }
        let panels: Vec<(f64, f64)> = points
            .windows(2)
            .filter(|w| w[1] > w[0])
            .map(|w| (w[0], w[1]))
            .collect();
        if panels.is_empty() {
            return Ok(0.0);
        }
        self.adapt_panels(&mut f, &panels)
    }

    fn adapt(&self, f: &mut impl FnMut(f64) -> f64, a: f64, b: f64) -> Result<f64> {
        self.adapt_panels(f, &[(a, b)])
    }

    fn adapt_panels(&self, f: &mut impl FnMut(f64) -> f64, panels: &[(f64, f64)]) -> Result<f64> {
        let mut heap = BinaryHeap::new();
        let mut total = 0.0;
        let mut total_err = 0.0;
        for &(a, b) in panels {
            let (v, e) = gk15(f, a, b);
            heap.push(Panel { a, b, value: v, error: e });
            total += v;
            total_err += e;
        }
        loop {
            if !total.is_finite() {
                return Err(Error::numeric("integrate", "integrand produced a non-finite value"));
            }
            let target = self.abs_tol.max(self.rel_tol * total.abs());
            if total_err <= target {
                return Ok(total);
            }
            if heap.len() >= self.max_intervals {
                return Err(Error::NumericFailure {
                    context: "integrate",
                    detail: format!(
                        "error estimate {total_err:.3e} above {target:.3e} after {} panels",
                        heap.len()
                    ),
                    best_estimate: Some(total),
                });
            }
            let worst = heap.pop().expect("heap is never empty");
            let mid = 0.5 * (worst.a + worst.b);
            if mid <= worst.a || mid >= worst.b {
                // Panel cannot be split further; accept it as is.
                total_err -= worst.error;
                heap.push(Panel { error: 0.0, ..worst });
                continue;
            }
            let (v1, e1) = gk15(f, worst.a, mid);
            let (v2, e2) = gk15(f, mid, worst.b);
            total += v1 + v2 - worst.value;
            total_err += e1 + e2 - worst.error;
            heap.push(Panel { a: worst.a, b: mid, value: v1, error: e1 });
            heap.push(Panel { a: mid, b: worst.b, value: v2, error: e2 });
            if heap.len() % 64 == 0 {
                // Re-sum to keep accumulated rounding out of the running totals.
                total = heap.iter().map(|p| p.value).sum();
                total_err = heap.iter().map(|p| p.error).sum();
            }
        }
    }
}

/// `∫_lo^hi f` to absolute tolerance `tol`.
pub fn integrate(f: impl FnMut(f64) -> f64, lo: f64, hi: f64, tol: f64) -> Result<f64> {
    Quadrature::with_tol(tol).integrate(f, lo, hi)
}
