use multiris::numerics::{
    eig_hermitian, gamma_cdf, gamma_fn, integrate, lower_incomplete_gamma_regularized, randomized_qb, sample_gamma,
    sample_nakagami, sample_poisson, svd, ComplexMatrix, RngStream, C64,
};
use proptest::prelude::*;

fn matrix_strategy(max_dim: usize) -> impl Strategy<Value = ComplexMatrix> {
    (1..=max_dim, 1..=max_dim).prop_flat_map(|(r, c)| {
        prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0), r * c).prop_map(move |v| {
            ComplexMatrix::from_row_major(r, c, v.into_iter().map(|(re, im)| C64::new(re, im)).collect()).unwrap()
        })
    })
}

fn reconstruct(u: &ComplexMatrix, s: &[f64], v: &ComplexMatrix) -> ComplexMatrix {
    let mut us = u.clone();
    for (j, &sj) in s.iter().enumerate() {
        let col: Vec<C64> = us.column(j).iter().map(|z| z * sj).collect();
        us.set_column(j, &col);
    }
    us.matmul(&v.adjoint()).unwrap()
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn svd_reconstructs_input(a in matrix_strategy(9)) {
        let r = svd(&a).unwrap();
        let back = reconstruct(&r.left_vectors, &r.singular_values, &r.right_vectors);
        let err = a.sub(&back).unwrap().frobenius_norm();
        prop_assert!(err <= 1e-9 * a.frobenius_norm().max(1e-300));
        prop_assert!(r.singular_values.windows(2).all(|w| w[0] >= w[1]));
    }

    #[test]
    fn svd_vectors_are_orthonormal(a in matrix_strategy(8)) {
        let r = svd(&a).unwrap();
        for m in [&r.left_vectors, &r.right_vectors] {
            let g = m.adjoint_matmul(m).unwrap();
            let k = g.rows();
            let off = g.sub(&ComplexMatrix::identity(k)).unwrap().frobenius_norm();
            prop_assert!(off < 1e-9 * k as f64, "gram deviation {off}");
        }
    }

    #[test]
    fn top_singular_value_matches_gram_eigenvalue(a in matrix_strategy(8)) {
        let s1 = svd(&a).unwrap().singular_values[0];
        let lam = eig_hermitian(&a.adjoint_matmul(&a).unwrap()).unwrap().values[0];
        prop_assert!((s1 * s1 - lam).abs() <= 1e-8 * lam.max(1.0));
    }

    #[test]
    fn qb_then_eig_recovers_singular_values(a in matrix_strategy(7), seed in any::<u64>()) {
        let mut rng = RngStream::new(seed, 0).rng();
        let qb = randomized_qb(&a, 2, 1e-12, &mut rng).unwrap();
        let s = svd(&a).unwrap().singular_values;
        prop_assume!(qb.tau == s.len());
        let bbh = qb.b.matmul(&qb.b.adjoint()).unwrap();
        let ev = eig_hermitian(&bbh).unwrap().values;
        for (sv, lam) in s.iter().zip(&ev) {
            prop_assert!((sv - lam.max(0.0).sqrt()).abs() <= 1e-6 * s[0].max(1.0));
        }
    }

    #[test]
    fn qb_meets_tolerance_with_orthonormal_basis(a in matrix_strategy(10), tol in 0.05f64..0.9, seed in any::<u64>()) {
        let mut rng = RngStream::new(seed, 1).rng();
        let qb = randomized_qb(&a, 3, tol, &mut rng).unwrap();
        let resid = a.sub(&qb.q.matmul(&qb.b).unwrap()).unwrap().frobenius_norm() / a.frobenius_norm();
        prop_assert!(resid <= tol + 1e-12 || qb.saturated);
        let g = qb.q.adjoint_matmul(&qb.q).unwrap();
        prop_assert!(g.sub(&ComplexMatrix::identity(qb.tau)).unwrap().frobenius_norm() < 1e-9);
    }

    #[test]
    fn incomplete_gamma_is_a_cdf(a in 0.05f64..40.0, x in 0.0f64..100.0, dx in 0.0f64..10.0) {
        let lo = lower_incomplete_gamma_regularized(a, x);
        let hi = lower_incomplete_gamma_regularized(a, x + dx);
        prop_assert!((0.0..=1.0).contains(&lo));
        prop_assert!(hi >= lo - 1e-14);
        prop_assert_eq!(lower_incomplete_gamma_regularized(a, 0.0), 0.0);
    }

    #[test]
    fn samplers_replay_from_equal_streams(seed in any::<u64>(), stream in any::<u64>()) {
        let draw = |s: RngStream| {
            let mut rng = s.rng();
            (
                sample_poisson(7.5, &mut rng).unwrap(),
                sample_gamma(2.5, 1.5, &mut rng).unwrap(),
                sample_nakagami(1.5, 2.0, &mut rng).unwrap(),
            )
        };
        prop_assert_eq!(draw(RngStream::new(seed, stream)), draw(RngStream::new(seed, stream)));
    }
}

#[test]
fn incomplete_gamma_tends_to_one() {
    for a in [0.3, 1.0, 2.5, 17.0] {
        assert!(lower_incomplete_gamma_regularized(a, 1e3) > 1.0 - 1e-12);
    }
}

#[test]
fn gamma_function_reference_values() {
    // Γ(1/2) = √π, Γ(5) = 24, Γ(3.5) = 15√π/8.
    assert!((gamma_fn(0.5) - std::f64::consts::PI.sqrt()).abs() < 1e-13);
    assert!((gamma_fn(5.0) - 24.0).abs() < 1e-11);
    assert!((gamma_fn(3.5) - 15.0 * std::f64::consts::PI.sqrt() / 8.0).abs() < 1e-12);
}

#[test]
fn erlang_cdf_has_closed_form() {
    // Shape-3 Gamma: 1 − e^{-x}(1 + x + x²/2).
    for x in [0.1, 1.0, 2.5, 7.0] {
        let expected = 1.0 - (-x as f64).exp() * (1.0 + x + x * x / 2.0);
        assert!((gamma_cdf(3.0, 1.0, x) - expected).abs() < 1e-13);
    }
}

#[test]
fn quadrature_of_gaussian_tail() {
    // ∫₀^∞ e^{-x²} dx = √π/2.
    let v = integrate(|x| (-x * x).exp(), 0.0, f64::INFINITY, 1e-10).unwrap();
    assert!((v - std::f64::consts::PI.sqrt() / 2.0).abs() < 1e-9);
}

#[test]
fn gamma_sample_moments() {
    let mut rng = RngStream::new(11, 0).rng();
    let n = 200_000;
    let xs: Vec<f64> = (0..n).map(|_| sample_gamma(2.5, 0.5, &mut rng).unwrap()).collect();
    let mean = xs.iter().sum::<f64>() / n as f64;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
    // shape/rate = 5, shape/rate² = 10.
    assert!((mean - 5.0).abs() < 0.05, "mean {mean}");
    assert!((var - 10.0).abs() < 0.3, "var {var}");
}
