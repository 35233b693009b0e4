//! Seeded random streams and the samplers used by the simulator.

use std::f64::consts::PI;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, Gamma, Poisson, StandardNormal};
use serde::{Deserialize, Serialize};

use super::matrix::C64;
use crate::error::{Error, Result};

/// A `(seed, stream)` pair naming an independent ChaCha8 sequence.
///
/// Equal pairs always yield equal draws, whichever thread consumes them.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct RngStream {
    pub seed: u64,
    pub stream: u64,
}

impl RngStream {
    pub fn new(seed: u64, stream: u64) -> Self {
        Self { seed, stream }
    }

    pub fn rng(&self) -> ChaCha8Rng {
        let mut rng = ChaCha8Rng::seed_from_u64(self.seed);
        rng.set_stream(self.stream);
        rng
    }

    /// A stream keyed by an extra label, for draws that must not perturb the
    /// main sequence (e.g. scheme-specific randomness under common random numbers).
    pub fn derive(&self, label: u64) -> Self {
        Self {
            seed: splitmix64(self.seed ^ splitmix64(label.wrapping_add(0x5851_f42d_4c95_7f2d))),
            stream: self.stream,
        }
    }
}

fn splitmix64(mut x: u64) -> u64 {
    x = x.wrapping_add(0x9e37_79b9_7f4a_7c15);
    x = (x ^ (x >> 30)).wrapping_mul(0xbf58_476d_1ce4_e5b9);
    x = (x ^ (x >> 27)).wrapping_mul(0x94d0_49bb_1331_11eb);
    x ^ (x >> 31)
}

pub fn sample_poisson<R: Rng + ?Sized>(mean: f64, rng: &mut R) -> Result<u64> {
    if !(mean >= 0.0) || !mean.is_finite() {
        return Err(Error::invalid(format!("Poisson mean must be finite and >= 0, got {mean}")));
    }
    if mean == 0.0 {
        return Ok(0);
    }
    let d = Poisson::new(mean).map_err(|e| Error::invalid(e.to_string()))?;
    Ok(d.sample(rng) as u64)
}

/// Gamma variate with the given shape and *rate*.
pub fn sample_gamma<R: Rng + ?Sized>(shape: f64, rate: f64, rng: &mut R) -> Result<f64> {
    if !(shape > 0.0 && rate > 0.0) {
        return Err(Error::invalid(format!(
            "Gamma needs positive shape and rate, got ({shape}, {rate})"
        )));
    }
    let d = Gamma::new(shape, 1.0 / rate).map_err(|e| Error::invalid(e.to_string()))?;
    Ok(d.sample(rng))
}

/// Nakagami-m envelope: the square root of a Gamma(m, scale Ω/m) power.
pub fn sample_nakagami<R: Rng + ?Sized>(m: f64, omega: f64, rng: &mut R) -> Result<f64> {
    if !(m > 0.0 && omega > 0.0) {
        return Err(Error::invalid(format!(
            "Nakagami needs positive m and omega, got ({m}, {omega})"
        )));
    }
    Ok(sample_gamma(m, m / omega, rng)?.sqrt())
}

/// Repeated Nakagami draws sharing one parameter validation.
pub(crate) struct NakagamiSampler {
    power: Gamma<f64>,
}

impl NakagamiSampler {
    pub fn new(m: f64, omega: f64) -> Result<Self> {
        if !(m > 0.0 && omega > 0.0) {
            return Err(Error::invalid(format!(
                "Nakagami needs positive m and omega, got ({m}, {omega})"
            )));
        }
        let power = Gamma::new(m, omega / m).map_err(|e| Error::invalid(e.to_string()))?;
        Ok(Self { power })
    }

    #[inline]
    pub fn envelope<R: Rng + ?Sized>(&self, rng: &mut R) -> f64 {
        self.power.sample(rng).sqrt()
    }

    /// Envelope with an independent uniform phase.
    #[inline]
    pub fn complex<R: Rng + ?Sized>(&self, rng: &mut R) -> C64 {
        let r = self.envelope(rng);
        C64::from_polar(r, uniform_phase(rng))
    }
}

#[inline]
pub fn uniform_phase<R: Rng + ?Sized>(rng: &mut R) -> f64 {
    rng.random::<f64>() * 2.0 * PI
}

/// Circularly-symmetric complex Gaussian with unit variance.
#[inline]
pub fn standard_complex_normal<R: Rng + ?Sized>(rng: &mut R) -> C64 {
    let re: f64 = StandardNormal.sample(rng);
    let im: f64 = StandardNormal.sample(rng);
    C64::new(re, im) * std::f64::consts::FRAC_1_SQRT_2
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn identical_streams_repeat_and_distinct_streams_differ() {
        let draw = |s: RngStream| {
            let mut r = s.rng();
            (0..4).map(|_| r.random::<u64>()).collect::<Vec<_>>()
        };
        let (a, b, c) = (draw(RngStream::new(7, 3)), draw(RngStream::new(7, 3)), draw(RngStream::new(7, 4)));
        assert_eq!(a, b);
        assert_ne!(a, c);
        assert_ne!(RngStream::new(7, 3).derive(1), RngStream::new(7, 3).derive(2));
    }

    #[test]
    fn poisson_zero_mean_is_always_zero() {
        let mut rng = RngStream::new(1, 0).rng();
        assert!((0..100).all(|_| sample_poisson(0.0, &mut rng).unwrap() == 0));
        assert!(sample_poisson(-1.0, &mut rng).is_err());
    }

    #[test]
    fn nakagami_power_is_normalized() {
        let mut rng = RngStream::new(11, 0).rng();
        let n = 1_000_000;
        let mean = (0..n).map(|_| sample_nakagami(1.0, 1.0, &mut rng).unwrap().powi(2)).sum::<f64>() / n as f64;
        assert!((mean - 1.0).abs() < 0.005, "{mean}");
    }

    #[test]
    fn nakagami_power_variance_is_omega_sq_over_m() {
        let mut rng = RngStream::new(12, 0).rng();
        let n = 1_000_000;
        let xs: Vec<f64> = (0..n).map(|_| sample_nakagami(2.5, 1.0, &mut rng).unwrap().powi(2)).collect();
        let mean = xs.iter().sum::<f64>() / n as f64;
        let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / (n - 1) as f64;
        assert!((var - 0.4).abs() < 0.01, "{var}");
    }

    #[test]
    fn gamma_rejects_non_positive_parameters() {
        let mut rng = RngStream::new(0, 0).rng();
        assert!(sample_gamma(0.0, 1.0, &mut rng).is_err());
        assert!(sample_gamma(1.0, -2.0, &mut rng).is_err());
        assert!(sample_nakagami(1.0, 0.0, &mut rng).is_err());
    }
}
