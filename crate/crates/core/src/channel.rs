//! System constants, path loss, sectored antenna gains, Nakagami-m channel
//! matrices and interference synthesis.
//!
//! [`SystemParams`] is the file-facing description (dB units in key names);
//! [`SystemConfig`] is its resolved, linear-unit form used everywhere else.

use std::f64::consts::PI;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::geometry::{los_probability, los_probability_unchecked, Deployment, Point2D};
use crate::numerics::{ComplexMatrix, NakagamiSampler, C64};

pub const SPEED_OF_LIGHT: f64 = 299_792_458.0;
pub const THERMAL_NOISE_DBM_PER_HZ: f64 = -174.0;

pub fn db_to_linear(db: f64) -> f64 {
    10f64.powf(db / 10.0)
}

pub fn linear_to_db(x: f64) -> f64 {
    10.0 * x.log10()
}

pub fn dbm_to_watts(dbm: f64) -> f64 {
    db_to_linear(dbm - 30.0)
}

/// Piecewise-constant (sectored) beam pattern.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct AntennaPattern {
    pub main_lobe_gain: f64,
    pub side_lobe_gain: f64,
    /// Main-lobe width in radians.
    pub main_lobe_width: f64,
}

impl AntennaPattern {
    pub fn new(main_lobe_gain: f64, side_lobe_gain: f64, main_lobe_width: f64) -> Result<Self> {
        let p = Self {
            main_lobe_gain,
            side_lobe_gain,
            main_lobe_width,
        };
        p.validate()?;
        Ok(p)
    }

    /// Pattern given as `[M dB, m dB, ψ degrees]`.
    pub fn from_db(main_db: f64, side_db: f64, width_deg: f64) -> Result<Self> {
        Self::new(db_to_linear(main_db), db_to_linear(side_db), width_deg.to_radians())
    }

    /// Pattern of an `n`-element uniform array: `M = n`, `m = 1/sin²(3π/(2√n))`
    /// (capped at `M` for the tiny arrays where the formula overshoots), and
    /// main-lobe width `2π/√n`.
    pub fn from_array(n: usize) -> Result<Self> {
        if n == 0 {
            return Err(Error::invalid("antenna count must be at least 1"));
        }
        let nf = n as f64;
        let side = 1.0 / (3.0 * PI / (2.0 * nf.sqrt())).sin().powi(2);
        Self::new(nf, side.min(nf), 2.0 * PI / nf.sqrt())
    }

    fn validate(&self) -> Result<()> {
        let ok = self.main_lobe_gain >= self.side_lobe_gain
            && self.side_lobe_gain > 0.0
            && self.main_lobe_width > 0.0
            && self.main_lobe_width <= 2.0 * PI + 1e-12
            && self.main_lobe_gain.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("invalid antenna pattern {self:?}")))
        }
    }

    /// Probability that a random direction falls in the main lobe.
    pub fn main_lobe_fraction(&self) -> f64 {
        (self.main_lobe_width / (2.0 * PI)).min(1.0)
    }

    pub fn expected_gain(&self) -> f64 {
        let q = self.main_lobe_fraction();
        q * self.main_lobe_gain + (1.0 - q) * self.side_lobe_gain
    }
}

/// Product gain of a transmit/receive pattern pair; aligned beams give `M_t M_r`.
pub fn sectored_gain<R: Rng + ?Sized>(
    tx: &AntennaPattern,
    rx: &AntennaPattern,
    aligned: bool,
    rng: &mut R,
) -> f64 {
    if aligned {
        return tx.main_lobe_gain * rx.main_lobe_gain;
    }
    let t = if rng.random::<f64>() < tx.main_lobe_fraction() {
        tx.main_lobe_gain
    } else {
        tx.side_lobe_gain
    };
    let r = if rng.random::<f64>() < rx.main_lobe_fraction() {
        rx.main_lobe_gain
    } else {
        rx.side_lobe_gain
    };
    t * r
}

/// E[ρ] under independent misalignment (the four-outcome enumeration).
pub fn expected_misaligned_gain(tx: &AntennaPattern, rx: &AntennaPattern) -> f64 {
    tx.expected_gain() * rx.expected_gain()
}

/// How RIS cascades are represented in simulation.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum ChannelModel {
    /// One antenna pair per link: the array gain lives entirely in `M_t M_r`.
    #[default]
    Scalar,
    /// Full `N_b`-column BS→RIS and `N_u`-column RIS→UE matrices; the fading
    /// power entering the SINR is `‖·‖_F² / (N_u N_b)`.
    Matrix,
}

/// Configuration-file view of the system, in the units named by each key.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default, deny_unknown_fields)]
pub struct SystemParams {
    pub carrier_ghz: f64,
    pub bandwidth_mhz: f64,
    pub tx_power_dbm: f64,
    /// Interferer transmit power; defaults to `tx_power_dbm`.
    pub interferer_power_dbm: Option<f64>,
    pub noise_figure_db: f64,
    pub n_bs_antennas: usize,
    pub n_ue_antennas: usize,
    pub cell_radius_m: f64,
    pub path_loss_exponent: f64,
    pub gain_bs_dbi: f64,
    pub gain_ris_dbi: f64,
    pub gain_ue_dbi: f64,
    pub nakagami_m_los: f64,
    pub nakagami_m_nlos: f64,
    pub ris_elements: usize,
    pub n_users: usize,
    pub h_ut_m: f64,
    pub reference_distance_m: f64,
    /// Optional `[M dB, m dB, ψ deg]` overrides of the array-derived patterns.
    pub tx_pattern: Option<[f64; 3]>,
    pub rx_pattern: Option<[f64; 3]>,
    pub channel_model: ChannelModel,
}

impl Default for SystemParams {
    fn default() -> Self {
        Self {
            carrier_ghz: 28.0,
            bandwidth_mhz: 200.0,
            tx_power_dbm: 8.0,
            interferer_power_dbm: None,
            noise_figure_db: 10.0,
            n_bs_antennas: 64,
            n_ue_antennas: 4,
            cell_radius_m: 100.0,
            path_loss_exponent: 2.0,
            gain_bs_dbi: 10.0,
            gain_ris_dbi: 10.0,
            gain_ue_dbi: 5.0,
            nakagami_m_los: 2.5,
            nakagami_m_nlos: 1.5,
            ris_elements: 64,
            n_users: 10,
            h_ut_m: 1.5,
            reference_distance_m: 1.0,
            tx_pattern: None,
            rx_pattern: None,
            channel_model: ChannelModel::Scalar,
        }
    }
}

impl SystemParams {
    pub fn resolve(&self) -> Result<SystemConfig> {
        let positive = [
            ("carrier_ghz", self.carrier_ghz),
            ("bandwidth_mhz", self.bandwidth_mhz),
            ("cell_radius_m", self.cell_radius_m),
            ("nakagami_m_los", self.nakagami_m_los),
            ("nakagami_m_nlos", self.nakagami_m_nlos),
            ("reference_distance_m", self.reference_distance_m),
        ];
        for (name, v) in positive {
            if !(v > 0.0 && v.is_finite()) {
                return Err(Error::invalid(format!("{name} must be positive, got {v}")));
            }
        }
        let counts = [
            ("n_bs_antennas", self.n_bs_antennas),
            ("n_ue_antennas", self.n_ue_antennas),
            ("ris_elements", self.ris_elements),
            ("n_users", self.n_users),
        ];
        for (name, v) in counts {
            if v == 0 {
                return Err(Error::invalid(format!("{name} must be at least 1")));
            }
        }
        if !(self.path_loss_exponent >= 2.0) {
            return Err(Error::invalid(format!(
                "path_loss_exponent must be >= 2, got {}",
                self.path_loss_exponent
            )));
        }
        for (name, v) in [
            ("tx_power_dbm", self.tx_power_dbm),
            ("noise_figure_db", self.noise_figure_db),
            ("gain_bs_dbi", self.gain_bs_dbi),
            ("gain_ris_dbi", self.gain_ris_dbi),
            ("gain_ue_dbi", self.gain_ue_dbi),
        ] {
            if !v.is_finite() {
                return Err(Error::invalid(format!("{name} must be finite")));
            }
        }
        los_probability(0.0, self.h_ut_m)?;
        let pattern = |o: Option<[f64; 3]>, n: usize| match o {
            Some([m, s, w]) => AntennaPattern::from_db(m, s, w),
            None => AntennaPattern::from_array(n),
        };
        let bandwidth_hz = self.bandwidth_mhz * 1e6;
        let noise_dbm = THERMAL_NOISE_DBM_PER_HZ + linear_to_db(bandwidth_hz) + self.noise_figure_db;
        Ok(SystemConfig {
            carrier_hz: self.carrier_ghz * 1e9,
            bandwidth_hz,
            tx_power_w: dbm_to_watts(self.tx_power_dbm),
            interferer_power_w: dbm_to_watts(self.interferer_power_dbm.unwrap_or(self.tx_power_dbm)),
            noise_power_w: dbm_to_watts(noise_dbm),
            n_bs_antennas: self.n_bs_antennas,
            n_ue_antennas: self.n_ue_antennas,
            cell_radius_m: self.cell_radius_m,
            path_loss_exponent: self.path_loss_exponent,
            gain_bs: db_to_linear(self.gain_bs_dbi),
            gain_ris: db_to_linear(self.gain_ris_dbi),
            gain_ue: db_to_linear(self.gain_ue_dbi),
            nakagami_m_los: self.nakagami_m_los,
            nakagami_m_nlos: self.nakagami_m_nlos,
            ris_elements: self.ris_elements,
            n_users: self.n_users,
            h_ut_m: self.h_ut_m,
            reference_distance_m: self.reference_distance_m,
            tx_pattern: pattern(self.tx_pattern, self.n_bs_antennas)?,
            rx_pattern: pattern(self.rx_pattern, self.n_ue_antennas)?,
            channel_model: self.channel_model,
        })
    }
}

/// Resolved system constants in linear SI units.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SystemConfig {
    pub carrier_hz: f64,
    pub bandwidth_hz: f64,
    pub tx_power_w: f64,
    pub interferer_power_w: f64,
    pub noise_power_w: f64,
    pub n_bs_antennas: usize,
    pub n_ue_antennas: usize,
    pub cell_radius_m: f64,
    pub path_loss_exponent: f64,
    pub gain_bs: f64,
    pub gain_ris: f64,
    pub gain_ue: f64,
    pub nakagami_m_los: f64,
    pub nakagami_m_nlos: f64,
    pub ris_elements: usize,
    pub n_users: usize,
    pub h_ut_m: f64,
    pub reference_distance_m: f64,
    pub tx_pattern: AntennaPattern,
    pub rx_pattern: AntennaPattern,
    pub channel_model: ChannelModel,
}

impl Default for SystemConfig {
    fn default() -> Self {
        SystemParams::default().resolve().expect("defaults are valid")
    }
}

impl SystemConfig {
    pub fn wavelength_m(&self) -> f64 {
        SPEED_OF_LIGHT / self.carrier_hz
    }

    /// Reference path loss ζ = (λ/4π)² at 1 m.
    pub fn zeta(&self) -> f64 {
        (self.wavelength_m() / (4.0 * PI)).powi(2)
    }

    /// Aligned beamforming gain `M_t M_r` of the serving link.
    pub fn array_gain(&self) -> f64 {
        self.tx_pattern.main_lobe_gain * self.rx_pattern.main_lobe_gain
    }

    /// Antenna-gain product of the BS→UE link.
    pub fn direct_link_gain(&self) -> f64 {
        self.gain_bs * self.gain_ue
    }

    /// Antenna-gain product of the BS→RIS→UE cascade: the RIS counts once per hop.
    pub fn reflective_link_gain(&self) -> f64 {
        self.gain_bs * self.gain_ris * self.gain_ris * self.gain_ue
    }

    /// `(rows, cols)` of the simulated per-RIS channel blocks: `(N_u, N_b)` in
    /// matrix mode, `(1, 1)` in scalar mode.
    pub fn antenna_dims(&self) -> (usize, usize) {
        match self.channel_model {
            ChannelModel::Scalar => (1, 1),
            ChannelModel::Matrix => (self.n_ue_antennas, self.n_bs_antennas),
        }
    }

    pub fn clamp_distance(&self, d: f64) -> f64 {
        d.max(self.reference_distance_m)
    }
}

/// Mean power of a single hop at `distance`: `ζ · d^{-α} · gain`.
///
/// Distances below the reference distance are clamped to it; the flag reports
/// whether that happened.
pub fn pathloss_omega(distance: f64, cfg: &SystemConfig, link_gain: f64) -> (f64, bool) {
    let clamped = distance < cfg.reference_distance_m;
    let d = cfg.clamp_distance(distance);
    (cfg.zeta() * d.powf(-cfg.path_loss_exponent) * link_gain, clamped)
}

/// Nakagami-m parameters of one link.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct FadingLink {
    pub m: f64,
    pub omega: f64,
    pub distance: f64,
}

impl FadingLink {
    /// Unit-power link with shape `m`.
    pub fn normalized(m: f64) -> Self {
        Self {
            m,
            omega: 1.0,
            distance: 1.0,
        }
    }
}

/// i.i.d. entries `r e^{jφ}` with `r ~ Nakagami(m, Ω)` and uniform `φ`.
pub fn sample_channel_matrix<R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    link: &FadingLink,
    rng: &mut R,
) -> Result<ComplexMatrix> {
    let s = NakagamiSampler::new(link.m, link.omega)?;
    let data = (0..rows * cols).map(|_| s.complex(rng)).collect();
    ComplexMatrix::from_row_major(rows, cols, data)
}

/// Per-RIS and direct channels of one user. Path loss is not folded in: every
/// entry has unit mean power.
#[derive(Debug, Clone)]
pub struct ChannelRealization {
    /// BS→RIS n, `N_b × L` (column l holds the element-l channel across BS antennas).
    pub h_list: Vec<ComplexMatrix>,
    /// RIS n→UE, `N_u × L`.
    pub g_list: Vec<ComplexMatrix>,
    /// BS→UE, `N_u × N_b`.
    pub h_d: ComplexMatrix,
    pub interference_power: f64,
}

/// `|Σ_l a_l b_l e^{jφ_l}|²` for independent unit-power envelopes and uniform phases:
/// the power of an uncontrolled RIS cascade.
fn random_cascade_power<R: Rng + ?Sized>(
    first: &NakagamiSampler,
    second: &NakagamiSampler,
    elements: usize,
    rng: &mut R,
) -> f64 {
    let mut acc = C64::new(0.0, 0.0);
    for _ in 0..elements {
        let amp = first.envelope(rng) * second.envelope(rng);
        acc += C64::from_polar(amp, crate::numerics::uniform_phase(rng));
    }
    acc.norm_sqr()
}

/// Intra-cell interference at `target` from the other users.
///
/// Each interferer at distance ξ_k reaches the target directly with probability
/// `Pr_LoS(ξ_k)`; otherwise via a uniformly chosen idle RIS with random phases
/// (falling back to an NLoS direct path when no idle RIS exists). Each term is
/// scaled by a misaligned sectored-gain draw and the interferer power.
pub fn sample_interference<R: Rng + ?Sized>(
    cfg: &SystemConfig,
    deployment: &Deployment,
    target: usize,
    idle_ris: &[usize],
    rng: &mut R,
) -> Result<f64> {
    sample_interference_with(cfg, deployment, target, idle_ris, rng, |d| {
        los_probability_unchecked(d, cfg.h_ut_m)
    })
}

/// [`sample_interference`] with an explicit LoS-probability function.
pub fn sample_interference_with<R: Rng + ?Sized>(
    cfg: &SystemConfig,
    deployment: &Deployment,
    target: usize,
    idle_ris: &[usize],
    rng: &mut R,
    los: impl Fn(f64) -> f64,
) -> Result<f64> {
    let users = &deployment.user_points;
    if target >= users.len() {
        return Err(Error::invalid(format!("target user {target} out of range")));
    }
    let tu = users[target];
    let los_direct = NakagamiSampler::new(cfg.nakagami_m_los, 1.0)?;
    let nlos = NakagamiSampler::new(cfg.nakagami_m_nlos, 1.0)?;
    let zeta = cfg.zeta();
    let alpha = cfg.path_loss_exponent;
    let mut total = 0.0;
    for (k, iu) in users.iter().enumerate() {
        if k == target {
            continue;
        }
        let xi = iu.distance(&tu);
        let rho = sectored_gain(&cfg.tx_pattern, &cfg.rx_pattern, false, rng);
        let power = if rng.random::<f64>() < los(xi) {
            los_direct.envelope(rng).powi(2) * pathloss_omega(xi, cfg, cfg.direct_link_gain()).0
        } else if !idle_ris.is_empty() {
            let j = idle_ris[rng.random_range(0..idle_ris.len())];
            let ris = deployment.ris_points[j];
            let d1 = cfg.clamp_distance(iu.distance(&ris));
            let d2 = cfg.clamp_distance(ris.distance(&tu));
            random_cascade_power(&nlos, &nlos, cfg.ris_elements, rng)
                * zeta
                * zeta
                * (d1 * d2).powf(-alpha)
                * cfg.reflective_link_gain()
        } else {
            nlos.envelope(rng).powi(2) * pathloss_omega(xi, cfg, cfg.direct_link_gain()).0
        };
        total += rho * cfg.interferer_power_w * power;
    }
    Ok(total)
}

/// Interference that the serving RISs reflect from other users toward the
/// target. The serving beams point at the target, so the gain is `M_t M_r`;
/// the RIS phases are matched to the target, not the interferers, so each
/// cascade adds with random phases.
pub fn alive_ris_interference<R: Rng + ?Sized>(
    cfg: &SystemConfig,
    deployment: &Deployment,
    target: usize,
    serving: &[usize],
    rng: &mut R,
) -> Result<f64> {
    let users = &deployment.user_points;
    let tu: Point2D = users[target];
    let first = NakagamiSampler::new(cfg.nakagami_m_nlos, 1.0)?;
    let second = NakagamiSampler::new(cfg.nakagami_m_los, 1.0)?;
    let zeta = cfg.zeta();
    let mut total = 0.0;
    for &n in serving {
        let ris = deployment.ris_points[n];
        let d2 = cfg.clamp_distance(ris.distance(&tu));
        for (k, iu) in users.iter().enumerate() {
            if k == target {
                continue;
            }
            let d1 = cfg.clamp_distance(iu.distance(&ris));
            total += random_cascade_power(&first, &second, cfg.ris_elements, rng)
                * zeta
                * zeta
                * (d1 * d2).powf(-cfg.path_loss_exponent)
                * cfg.reflective_link_gain()
                * cfg.array_gain()
                * cfg.interferer_power_w;
        }
    }
    Ok(total)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::RngStream;

    #[test]
    fn zeta_at_28_ghz() {
        let cfg = SystemConfig::default();
        assert!((cfg.zeta() - 7.269e-7).abs() / 7.269e-7 < 2e-3);
    }

    #[test]
    fn noise_power_for_table_constants() {
        let cfg = SystemConfig::default();
        assert!((linear_to_db(cfg.noise_power_w) + 30.0 - (-174.0 + 83.0103 + 10.0)).abs() < 1e-3);
    }

    #[test]
    fn inverse_square_law_and_antenna_factor() {
        let cfg = SystemConfig::default();
        let (a, _) = pathloss_omega(20.0, &cfg, 1.0);
        let (b, _) = pathloss_omega(40.0, &cfg, 1.0);
        assert!((a / b - 4.0).abs() < 1e-12);
        assert!((cfg.direct_link_gain() - 10f64.powf(1.5)).abs() < 1e-9);
        let (c, clamped) = pathloss_omega(0.2, &cfg, 1.0);
        assert!(clamped);
        assert_eq!(c, cfg.zeta());
    }

    #[test]
    fn array_patterns() {
        let bs = AntennaPattern::from_array(64).unwrap();
        assert_eq!(bs.main_lobe_gain, 64.0);
        assert!((bs.side_lobe_gain - 3.240).abs() < 1e-3);
        let ue = AntennaPattern::from_array(4).unwrap();
        assert!((ue.side_lobe_gain - 2.0).abs() < 1e-12);
        let single = AntennaPattern::from_array(1).unwrap();
        assert_eq!((single.main_lobe_gain, single.side_lobe_gain), (1.0, 1.0));
    }

    #[test]
    fn full_width_beams_are_always_aligned() {
        let p = AntennaPattern::new(8.0, 0.5, 2.0 * PI).unwrap();
        let mut rng = RngStream::new(0, 0).rng();
        assert!((0..100).all(|_| sectored_gain(&p, &p, false, &mut rng) == 64.0));
    }

    #[test]
    fn expected_gain_enumerates_four_outcomes() {
        let tx = AntennaPattern::from_db(10.0, -10.0, 60.0).unwrap();
        let rx = AntennaPattern::from_db(10.0, -10.0, 90.0).unwrap();
        let (qt, qr) = (1.0 / 6.0, 0.25);
        let want = qt * qr * 100.0 + qt * (1.0 - qr) * 1.0 + (1.0 - qt) * qr * 1.0 + (1.0 - qt) * (1.0 - qr) * 0.01;
        assert!((expected_misaligned_gain(&tx, &rx) - want).abs() < 1e-12);
    }

    #[test]
    fn invalid_system_params_are_rejected() {
        let p = SystemParams { path_loss_exponent: 1.5, ..Default::default() };
        assert!(p.resolve().is_err());
        let p = SystemParams { n_users: 0, ..Default::default() };
        assert!(p.resolve().is_err());
        let p = SystemParams { h_ut_m: 30.0, ..Default::default() };
        assert!(p.resolve().is_err());
    }

    #[test]
    fn single_user_sees_no_interference() {
        let cfg = SystemConfig::default();
        let mut rng = RngStream::new(1, 0).rng();
        let d = Deployment::sample(&crate::geometry::DeploymentModel::Ppp, 1e-3, 1, 100.0, 1.5, &mut rng).unwrap();
        assert_eq!(sample_interference(&cfg, &d, 0, &[], &mut rng).unwrap(), 0.0);
    }
}
