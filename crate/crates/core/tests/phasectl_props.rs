use multiris::channel::{sample_channel_matrix, FadingLink};
use multiris::numerics::{ComplexMatrix, RngStream};
use multiris::phasectl::{
    cascade_matrix, cascade_objective, objective, optimal_phases, optimal_phases_multi, quantize_phases,
    random_phases, suboptimal_phases, PhasePlan, DEFAULT_QB_BLOCK, DEFAULT_QB_TOL,
};
use proptest::prelude::*;

fn channels(seed: u64, nb: usize, nu: usize, l: usize) -> (ComplexMatrix, ComplexMatrix) {
    let mut rng = RngStream::new(seed, 0).rng();
    let h = sample_channel_matrix(nb, l, &FadingLink::normalized(2.5), &mut rng).unwrap();
    let g = sample_channel_matrix(nu, l, &FadingLink::normalized(1.5), &mut rng).unwrap();
    (h, g)
}

fn shifted(plan: &PhasePlan, c: f64) -> PhasePlan {
    let mut p = plan.clone();
    for v in &mut p.phases {
        for t in v.iter_mut() {
            *t += c;
        }
    }
    p
}

#[test]
fn scheme_ordering_holds_on_average() {
    let (mut opt, mut sub, mut quant, mut rnd) = (0.0, 0.0, 0.0, 0.0);
    let seeds = 200;
    for seed in 0..seeds {
        let (h, g) = channels(seed, 8, 4, 32);
        let mut rng = RngStream::new(seed, 1).rng();
        let o = optimal_phases(&h, &g).unwrap();
        let s = suboptimal_phases(&[h.clone()], &[g.clone()], DEFAULT_QB_BLOCK, DEFAULT_QB_TOL, &mut rng).unwrap();
        let q = quantize_phases(&o, 4).unwrap();
        let r = random_phases(&[32], &mut rng);
        opt += objective(&[h.clone()], &[g.clone()], &o).unwrap();
        sub += objective(&[h.clone()], &[g.clone()], &s).unwrap();
        quant += objective(&[h.clone()], &[g.clone()], &q).unwrap();
        rnd += objective(&[h], &[g], &r).unwrap();
    }
    assert!(opt >= sub, "optimal {opt} < suboptimal {sub}");
    assert!(opt > quant, "optimal {opt} <= quantized {quant}");
    assert!(quant > rnd && sub > rnd, "random {rnd} not last");
}

#[test]
fn joint_design_beats_either_ris_alone() {
    for seed in 0..20 {
        let (h1, g1) = channels(seed, 4, 2, 16);
        let (h2, g2) = channels(seed + 1000, 4, 2, 16);
        let joint = optimal_phases_multi(&[h1.clone(), h2.clone()], &[g1.clone(), g2.clone()]).unwrap();
        let both = objective(&[h1.clone(), h2.clone()], &[g1.clone(), g2.clone()], &joint).unwrap();
        let e = cascade_matrix(&[h1.clone(), h2.clone()], &[g1.clone(), g2.clone()]).unwrap();
        assert!((cascade_objective(&e, &joint).unwrap() - both).abs() < 1e-9 * both);
        // Stacked-cascade power is σ₁² at best; single-RIS designs can only reach their own σ₁².
        let one = objective(&[h1.clone()], &[g1.clone()], &optimal_phases(&h1, &g1).unwrap()).unwrap();
        let two = objective(&[h2.clone()], &[g2.clone()], &optimal_phases(&h2, &g2).unwrap()).unwrap();
        assert!(both > 0.9 * one.max(two), "seed {seed}: joint {both}, singles {one} / {two}");
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn every_plan_is_unit_modulus(seed in any::<u64>(), l in 1usize..40, bits in 1u32..6) {
        let (h, g) = channels(seed, 3, 2, l);
        let mut rng = RngStream::new(seed, 2).rng();
        let o = optimal_phases(&h, &g).unwrap();
        let plans = [
            o.clone(),
            suboptimal_phases(&[h.clone()], &[g.clone()], 4, 0.3, &mut rng).unwrap(),
            quantize_phases(&o, bits).unwrap(),
            random_phases(&[l], &mut rng),
        ];
        for p in &plans {
            prop_assert_eq!(p.total_elements(), l);
            for w in p.coefficients() {
                prop_assert!((w.norm() - 1.0).abs() < 1e-15);
            }
        }
    }

    #[test]
    fn objective_ignores_a_common_phase(seed in any::<u64>(), c in -10.0f64..10.0) {
        let (h, g) = channels(seed, 4, 3, 24);
        let o = optimal_phases(&h, &g).unwrap();
        let a = objective(&[h.clone()], &[g.clone()], &o).unwrap();
        let b = objective(&[h], &[g], &shifted(&o, c)).unwrap();
        prop_assert!((a - b).abs() <= 1e-10 * a.max(1.0));
    }

    #[test]
    fn scalar_chain_sums_amplitudes(seed in any::<u64>(), l in 1usize..80) {
        let (h, g) = channels(seed, 1, 1, l);
        let o = optimal_phases(&h, &g).unwrap();
        let amp = objective(&[h.clone()], &[g.clone()], &o).unwrap().sqrt();
        let expected: f64 = h.row(0).iter().zip(g.row(0)).map(|(a, b)| a.norm() * b.norm()).sum();
        prop_assert!((amp - expected).abs() <= 1e-9 * expected);
    }

    #[test]
    fn optimal_dominates_random_plans(seed in any::<u64>()) {
        // Rank-1 cascade: the co-phasing design is the exact maximizer.
        let (h, g) = channels(seed, 1, 1, 16);
        let best = objective(&[h.clone()], &[g.clone()], &optimal_phases(&h, &g).unwrap()).unwrap();
        let mut rng = RngStream::new(seed, 3).rng();
        for _ in 0..20 {
            let r = objective(&[h.clone()], &[g.clone()], &random_phases(&[16], &mut rng)).unwrap();
            prop_assert!(r <= best * (1.0 + 1e-12));
        }
    }
}
