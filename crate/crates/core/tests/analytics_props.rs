use multiris::analytics::{
    cascade_gamma_approx, cond_cdf_eta, ergodic_coverage, los_assoc_prob, nearest_los_pdf, prob_reflective,
    serving_dist_pdf, AnalyticsParams, LosModel,
};
use multiris::channel::{db_to_linear, SystemConfig};
use multiris::numerics::{integrate, ln_gamma};
use proptest::prelude::*;

fn params(lambda: f64) -> AnalyticsParams {
    AnalyticsParams::from_system(&SystemConfig::default(), lambda)
}

#[test]
fn distance_laws_integrate_to_one() {
    for lambda in [3e-4, 1e-3, 5e-3] {
        let p = params(lambda);
        let f = integrate(|x| nearest_los_pdf(x, &p).unwrap(), 0.0, f64::INFINITY, 1e-8).unwrap();
        let g = integrate(|x| serving_dist_pdf(x, &p).unwrap(), 0.0, f64::INFINITY, 1e-8).unwrap();
        assert!((f - 1.0).abs() < 1e-4, "f_L mass {f} at {lambda}");
        assert!((g - 1.0).abs() < 1e-4, "f̂_L mass {g} at {lambda}");
    }
}

#[test]
fn bounded_support_is_normalized_too() {
    let mut p = params(1e-3);
    p.support_max = Some(60.0);
    let f = integrate(|x| nearest_los_pdf(x, &p).unwrap(), 0.0, 60.0, 1e-9).unwrap();
    assert!((f - 1.0).abs() < 1e-5, "{f}");
}

#[test]
fn homogeneous_los_gives_rayleigh_nearest_distance() {
    // With every RIS in LoS the nearest-neighbour law is 2πλx·e^{-πλx²}.
    let mut p = params(1e-3);
    p.los = LosModel::Constant { p: 1.0 };
    for x in [2.0, 10.0, 25.0, 60.0] {
        let expected = 2.0 * std::f64::consts::PI * 1e-3 * x * (-std::f64::consts::PI * 1e-3 * x * x).exp();
        assert!((nearest_los_pdf(x, &p).unwrap() - expected).abs() < 1e-9 * expected.max(1e-6));
    }
}

#[test]
fn association_probability_is_a_probability() {
    for lambda in [1e-4, 1e-3, 1e-2] {
        let a = los_assoc_prob(&params(lambda)).unwrap();
        assert!((0.0..=1.0).contains(&a));
    }
}

#[test]
fn eta_cdf_is_monotone_and_saturates() {
    let p = params(2e-3);
    for xi in [10.0, 50.0, 95.0] {
        let limit = prob_reflective(xi, &p).unwrap();
        let mut prev = 0.0;
        for k in 1..=40 {
            let x = (k as f64 * 400.0).powi(2) / 40.0;
            let v = cond_cdf_eta(x, xi, 0.0, &p).unwrap();
            assert!(v >= prev - 1e-9, "non-monotone at xi={xi}, x={x}");
            prev = v;
        }
        assert!((cond_cdf_eta(1e9, xi, 0.0, &p).unwrap() - limit).abs() < 1e-6);
    }
}

#[test]
fn cascade_moments_match_closed_form() {
    // m_h = m_g = 2, Ω = 1, unit element gain:
    // E|h| = Γ(2.5)/(Γ(2)√2), E|h|² = 1, so μ₁ = Γ(2.5)²/2 and μ₂ = 1.
    let c = cascade_gamma_approx(2.0, 1.0, 2.0, 1.0, 1.0, 32).unwrap();
    let e_abs = (ln_gamma(2.5)).exp() / 2f64.sqrt();
    assert!((c.mu1 - e_abs * e_abs).abs() < 1e-12);
    assert!((c.mu2 - 1.0).abs() < 1e-12);
    // Sum of 32 i.i.d. terms: mean 32μ₁, variance 32(μ₂ − μ₁²).
    assert!((c.mean() - 32.0 * c.mu1).abs() < 1e-10);
    assert!((c.std_dev().powi(2) - 32.0 * (c.mu2 - c.mu1 * c.mu1)).abs() < 1e-10);
}

#[test]
fn ergodic_coverage_orders_by_threshold_and_density() {
    let cfg = SystemConfig::default();
    let lambdas = [3e-4, 1e-3, 3e-3];
    let thresholds = [-5.0, 5.0, 15.0];
    let grid: Vec<Vec<f64>> = lambdas
        .iter()
        .map(|&l| {
            thresholds
                .iter()
                .map(|&t| ergodic_coverage(db_to_linear(t), &cfg, &params(l)).unwrap())
                .collect()
        })
        .collect();
    for row in &grid {
        assert!(row.windows(2).all(|w| w[1] <= w[0] + 1e-6), "{row:?}");
    }
    for j in 0..thresholds.len() {
        assert!(grid.windows(2).all(|w| w[1][j] >= w[0][j] - 1e-6), "column {j}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(32))]

    #[test]
    fn cascade_approximation_has_positive_parameters(
        mh in 0.5f64..6.0, mg in 0.5f64..6.0, oh in 0.1f64..4.0, og in 0.1f64..4.0, l in 1usize..512,
    ) {
        let c = cascade_gamma_approx(mh, oh, mg, og, 1.0, l).unwrap();
        prop_assert!(c.alpha_u > 0.0 && c.beta_u > 0.0);
        // Jensen: E[U]² ≤ E[U²].
        prop_assert!(c.mu1 * c.mu1 <= c.mu2);
        // The Gamma CDF is monotone from 0 to 1.
        prop_assert!(c.cdf(0.0) == 0.0 && c.cdf(c.mean() * 50.0) > 1.0 - 1e-9);
    }

    #[test]
    fn reflective_probability_is_a_probability(xi in 0.0f64..100.0, lambda in 0.0f64..1e-2) {
        let v = prob_reflective(xi, &params(lambda)).unwrap();
        prop_assert!((0.0..=1.0).contains(&v));
    }
}
