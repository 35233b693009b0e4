use multiris::channel::{
    expected_misaligned_gain, linear_to_db, sample_channel_matrix, sectored_gain, AntennaPattern, FadingLink,
    SystemParams,
};
use multiris::numerics::RngStream;
use proptest::prelude::*;

#[test]
fn table_noise_power_is_about_minus_81_dbm() {
    let cfg = SystemParams::default().resolve().unwrap();
    let dbm = linear_to_db(cfg.noise_power_w) + 30.0;
    assert!((dbm - (-80.9897)).abs() < 1e-3, "{dbm}");
}

#[test]
fn misaligned_gain_average_matches_enumeration() {
    let tx = AntennaPattern::from_db(10.0, -10.0, 60.0).unwrap();
    let rx = AntennaPattern::from_db(10.0, -10.0, 90.0).unwrap();
    let exact = expected_misaligned_gain(&tx, &rx);
    // Four outcomes: (M,M) 1/6·1/4, (M,m) 1/6·3/4, (m,M) 5/6·1/4, (m,m) 5/6·3/4.
    let (big, small) = (10.0, 0.1);
    let enumerated = big * big / 24.0 + big * small * 3.0 / 24.0 + small * big * 5.0 / 24.0 + small * small * 15.0 / 24.0;
    assert!((exact - enumerated).abs() < 1e-12 * enumerated);

    let mut rng = RngStream::new(1, 0).rng();
    let n = 400_000;
    let mc = (0..n).map(|_| sectored_gain(&tx, &rx, false, &mut rng)).sum::<f64>() / n as f64;
    assert!((mc - exact).abs() < 0.02 * exact, "{mc} vs {exact}");
}

#[test]
fn channels_from_distinct_streams_are_uncorrelated() {
    let link = FadingLink::normalized(2.5);
    let n = 100_000;
    let a = sample_channel_matrix(1, n, &link, &mut RngStream::new(4, 1).rng()).unwrap();
    let b = sample_channel_matrix(1, n, &link, &mut RngStream::new(4, 2).rng()).unwrap();
    let xs: Vec<f64> = a.row(0).iter().map(|z| z.norm_sqr()).collect();
    let ys: Vec<f64> = b.row(0).iter().map(|z| z.norm_sqr()).collect();
    let mx = xs.iter().sum::<f64>() / n as f64;
    let my = ys.iter().sum::<f64>() / n as f64;
    let cov = xs.iter().zip(&ys).map(|(x, y)| (x - mx) * (y - my)).sum::<f64>() / n as f64;
    let sx = (xs.iter().map(|x| (x - mx).powi(2)).sum::<f64>() / n as f64).sqrt();
    let sy = (ys.iter().map(|y| (y - my).powi(2)).sum::<f64>() / n as f64).sqrt();
    let rho = cov / (sx * sy);
    assert!(rho.abs() < 3.0 / (n as f64).sqrt(), "correlation {rho}");
}

proptest! {
    #[test]
    fn channel_entries_have_unit_mean_power(m in 0.5f64..5.0, seed in any::<u64>()) {
        let h = sample_channel_matrix(8, 256, &FadingLink::normalized(m), &mut RngStream::new(seed, 0).rng()).unwrap();
        let p = h.frobenius_norm_sqr() / 2048.0;
        // Var of |h|² is 1/m; 2048 draws give a standard error below 0.032.
        prop_assert!((p - 1.0).abs() < 0.16, "power {}", p);
    }

    #[test]
    fn expected_gain_lies_between_side_and_main(main in 0.0f64..30.0, side in -30.0f64..0.0, width in 1.0f64..360.0) {
        let p = AntennaPattern::from_db(main, side, width).unwrap();
        let g = p.expected_gain();
        prop_assert!(g >= p.side_lobe_gain - 1e-12 && g <= p.main_lobe_gain + 1e-12);
    }
}
