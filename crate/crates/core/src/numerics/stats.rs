//! Small-sample summaries used when reporting Monte Carlo estimates.

use super::special::standard_normal_cdf;

/// z-value of a two-sided 95% normal interval.
pub const Z95: f64 = 1.959_963_984_540_054;

/// Mean and 95% normal-approximation half-width.
pub fn mean_ci(xs: &[f64]) -> (f64, f64) {
    let n = xs.len();
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let mean = xs.iter().sum::<f64>() / n as f64;
    if n == 1 {
        return (mean, 0.0);
    }
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    (mean, Z95 * (var / n as f64).sqrt())
}

/// Binomial proportion with its 95% normal-approximation half-width.
pub fn proportion_ci(successes: usize, n: usize) -> (f64, f64) {
    if n == 0 {
        return (f64::NAN, f64::NAN);
    }
    let p = successes as f64 / n as f64;
    (p, Z95 * (p * (1.0 - p) / n as f64).sqrt())
}

/// One-sided paired test of `E[a − b] > 0`.
///
/// Uses the large-sample normal reference for the t statistic; returns 1 when
/// every difference is zero (no evidence either way).
pub fn paired_greater_p_value(a: &[f64], b: &[f64]) -> f64 {
    assert_eq!(a.len(), b.len(), "paired samples must have equal length");
    let diffs: Vec<f64> = a.iter().zip(b).map(|(x, y)| x - y).collect();
    let n = diffs.len();
    if n < 2 {
        return 1.0;
    }
    let mean = diffs.iter().sum::<f64>() / n as f64;
    let var = diffs.iter().map(|d| (d - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    if var == 0.0 {
        return if mean > 0.0 { 0.0 } else { 1.0 };
    }
    let t = mean / (var / n as f64).sqrt();
    1.0 - standard_normal_cdf(t)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn constant_sample_has_zero_width() {
        assert_eq!(mean_ci(&[2.0, 2.0, 2.0]), (2.0, 0.0));
    }

    #[test]
    fn proportion_interval_matches_formula() {
        let (p, h) = proportion_ci(30, 100);
        assert!((p - 0.3).abs() < 1e-15);
        assert!((h - Z95 * (0.21f64 / 100.0).sqrt()).abs() < 1e-15);
    }

    #[test]
    fn paired_test_detects_consistent_shift() {
        let a: Vec<f64> = (0..200).map(|i| (i as f64 * 0.37).sin() + 0.2).collect();
        let b: Vec<f64> = (0..200).map(|i| (i as f64 * 0.37).sin() + 0.05 * (i as f64).cos()).collect();
        assert!(paired_greater_p_value(&a, &b) < 1e-6);
        assert!(paired_greater_p_value(&b, &a) > 0.99);
        assert_eq!(paired_greater_p_value(&a, &a), 1.0);
    }
}
