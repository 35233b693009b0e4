//! SINR of direct and reflective links, and RIS–user association.

use itertools::Itertools;
use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::channel::{pathloss_omega, SystemConfig};
use crate::error::{Error, Result};
use crate::numerics::ComplexMatrix;
use crate::phasectl::{cascade_objective, PhaseController, PhasePlan};

/// SINR components of one user, all linear.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SinrBreakdown {
    pub direct: f64,
    pub reflective: f64,
    pub total: f64,
    pub selected_ris: Vec<usize>,
    pub noise_power: f64,
    pub interference_power: f64,
}

impl SinrBreakdown {
    pub fn new(direct: f64, reflective: f64, selected_ris: Vec<usize>, noise_power: f64, interference_power: f64) -> Self {
        Self {
            direct,
            reflective,
            total: direct + reflective,
            selected_ris,
            noise_power,
            interference_power,
        }
    }
}

/// Mean fading power per antenna pair: `‖·‖_F² / (rows·cols)`.
pub fn fading_power(m: &ComplexMatrix) -> f64 {
    m.frobenius_norm_sqr() / (m.rows() * m.cols()).max(1) as f64
}

/// `γ_D` for a BS→UE channel `h_d` (unit-power entries) at distance `r_sd`.
pub fn sinr_direct(h_d: &ComplexMatrix, cfg: &SystemConfig, r_sd: f64, interference: f64) -> f64 {
    let (omega, _) = pathloss_omega(r_sd, cfg, cfg.direct_link_gain());
    fading_power(h_d) * cfg.array_gain() * cfg.tx_power_w * omega / (cfg.noise_power_w + interference)
}

/// One candidate RIS as seen by a user: unit-power channels and hop lengths.
#[derive(Debug, Clone)]
pub struct RisLink {
    pub index: usize,
    /// BS→RIS, `N_b × L`.
    pub h: ComplexMatrix,
    /// RIS→UE, `N_u × L`.
    pub g: ComplexMatrix,
    pub r_bs: f64,
    pub r_ue: f64,
}

impl RisLink {
    pub fn distance_product(&self) -> f64 {
        self.r_bs * self.r_ue
    }

    /// `ζ² (r s)^{-α}` times the cascade antenna gains.
    pub fn path_gain(&self, cfg: &SystemConfig) -> f64 {
        let (a, _) = pathloss_omega(self.r_bs, cfg, 1.0);
        let (b, _) = pathloss_omega(self.r_ue, cfg, 1.0);
        a * b * cfg.reflective_link_gain()
    }

    /// Khatri-Rao cascade with the path gain folded in as an amplitude factor.
    fn scaled_cascade(&self, cfg: &SystemConfig) -> Result<ComplexMatrix> {
        Ok(ComplexMatrix::khatri_rao(&self.h, &self.g)?.scale_real(self.path_gain(cfg).sqrt()))
    }
}

/// Stacked, path-loss-weighted cascade of several RISs.
pub fn joint_cascade(links: &[&RisLink], cfg: &SystemConfig) -> Result<(ComplexMatrix, Vec<usize>)> {
    if links.is_empty() {
        return Err(Error::invalid("joint cascade needs at least one RIS"));
    }
    let blocks = links.iter().map(|l| l.scaled_cascade(cfg)).collect::<Result<Vec<_>>>()?;
    let lens = links.iter().map(|l| l.h.cols()).collect();
    Ok((ComplexMatrix::hstack(&blocks.iter().collect::<Vec<_>>())?, lens))
}

fn reflective_from_power(power: f64, rows: usize, cfg: &SystemConfig, interference: f64) -> f64 {
    power / rows as f64 * cfg.array_gain() * cfg.tx_power_w / (cfg.noise_power_w + interference)
}

/// `γ_I` of the RISs in `links` driven by `plan` (one block per link).
pub fn sinr_reflective(links: &[&RisLink], plan: &PhasePlan, cfg: &SystemConfig, interference: f64) -> Result<f64> {
    let (e, _) = joint_cascade(links, cfg)?;
    Ok(reflective_from_power(cascade_objective(&e, plan)?, e.rows(), cfg, interference))
}

/// Designs phases for `links` jointly and returns `(γ_I, plan)`.
pub fn design_and_evaluate<R: Rng + ?Sized>(
    links: &[&RisLink],
    controller: &PhaseController,
    cfg: &SystemConfig,
    interference: f64,
    rng: &mut R,
) -> Result<(f64, PhasePlan)> {
    let (e, lens) = joint_cascade(links, cfg)?;
    let plan = controller.design(&e, &lens, rng)?;
    let g = reflective_from_power(cascade_objective(&e, &plan)?, e.rows(), cfg, interference);
    Ok((g, plan))
}

fn better(a: (f64, f64, usize), b: (f64, f64, usize)) -> bool {
    // (sinr, distance product, index): larger SINR, then shorter product, then smaller index.
    a.0 > b.0 || (a.0 == b.0 && (a.1 < b.1 || (a.1 == b.1 && a.2 < b.2)))
}

/// Single-RIS association: the candidate whose designed cascade maximizes
/// `γ_D + γ_I`. Returns `None` when there is no candidate (direct link only).
pub fn select_best_ris<R: Rng + ?Sized>(
    candidates: &[RisLink],
    controller: &PhaseController,
    cfg: &SystemConfig,
    direct_sinr: f64,
    interference: f64,
    rng: &mut R,
) -> Result<Option<(usize, SinrBreakdown)>> {
    let mut best: Option<(f64, f64, usize)> = None;
    for link in candidates {
        let (g, _) = design_and_evaluate(&[link], controller, cfg, interference, rng)?;
        let key = (direct_sinr + g, link.distance_product(), link.index);
        if best.is_none_or(|b| better(key, b)) {
            best = Some(key);
        }
    }
    Ok(best.map(|(total, _, index)| {
        let reflective = total - direct_sinr;
        (
            index,
            SinrBreakdown::new(direct_sinr, reflective, vec![index], cfg.noise_power_w, interference),
        )
    }))
}

/// How K-subsets are searched.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum SubsetSearch {
    Exhaustive,
    Greedy,
    /// Exhaustive up to [`EXHAUSTIVE_LIMIT`] subsets, greedy beyond.
    #[default]
    Auto,
}

pub const EXHAUSTIVE_LIMIT: u128 = 10_000;

fn binomial(n: usize, k: usize) -> u128 {
    let k = k.min(n - k);
    (0..k).fold(1u128, |acc, i| acc * (n - i) as u128 / (i + 1) as u128)
}

/// K-RIS association with joint phase design per evaluated subset.
pub fn select_ris_subset<R: Rng + ?Sized>(
    candidates: &[RisLink],
    k: usize,
    controller: &PhaseController,
    cfg: &SystemConfig,
    direct_sinr: f64,
    interference: f64,
    mode: SubsetSearch,
    rng: &mut R,
) -> Result<(Vec<usize>, SinrBreakdown)> {
    let n = candidates.len();
    if k == 0 || k > n {
        return Err(Error::invalid(format!("cannot select {k} of {n} RISs")));
    }
    let exhaustive = match mode {
        SubsetSearch::Exhaustive => true,
        SubsetSearch::Greedy => false,
        SubsetSearch::Auto => binomial(n, k) <= EXHAUSTIVE_LIMIT,
    };
    let chosen: Vec<usize>;
    let gamma: f64;
    if k == n {
        let all: Vec<&RisLink> = candidates.iter().collect();
        gamma = design_and_evaluate(&all, controller, cfg, interference, rng)?.0;
        chosen = (0..n).collect();
    } else if exhaustive {
        let mut best: Option<(f64, Vec<usize>)> = None;
        for subset in (0..n).combinations(k) {
            let links: Vec<&RisLink> = subset.iter().map(|&i| &candidates[i]).collect();
            let (g, _) = design_and_evaluate(&links, controller, cfg, interference, rng)?;
            if best.as_ref().is_none_or(|(b, _)| g > *b) {
                best = Some((g, subset));
            }
        }
        let (g, s) = best.expect("at least one subset");
        gamma = g;
        chosen = s;
    } else {
        let mut picked: Vec<usize> = Vec::with_capacity(k);
        let mut current = 0.0;
        for _ in 0..k {
            let mut step: Option<(f64, usize)> = None;
            for i in (0..n).filter(|i| !picked.contains(i)) {
                let links: Vec<&RisLink> = picked.iter().chain([&i]).map(|&j| &candidates[j]).collect();
                let (g, _) = design_and_evaluate(&links, controller, cfg, interference, rng)?;
                if step.is_none_or(|(b, _)| g > b) {
                    step = Some((g, i));
                }
            }
            let (g, i) = step.expect("candidates remain");
            picked.push(i);
            current = g;
        }
        gamma = current;
        chosen = picked;
    }
    let indices: Vec<usize> = chosen.iter().map(|&i| candidates[i].index).collect();
    Ok((
        indices.clone(),
        SinrBreakdown::new(direct_sinr, gamma, indices, cfg.noise_power_w, interference),
    ))
}

/// `γ_new = Pr_LoS·γ_D + (1 − Pr_LoS)·P_R^s·γ_I`.
pub fn weighted_sinr(gamma_d: f64, gamma_i: f64, p_los: f64, p_rs: f64) -> Result<f64> {
    for (name, p) in [("Pr_LoS", p_los), ("P_R^s", p_rs)] {
        if !(0.0..=1.0).contains(&p) {
            return Err(Error::invalid(format!("{name} must lie in [0, 1], got {p}")));
        }
    }
    Ok(p_los * gamma_d + (1.0 - p_los) * p_rs * gamma_i)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::channel::{sample_channel_matrix, FadingLink};
    use crate::numerics::{RngStream, C64};
    use crate::phasectl::Scheme;

    fn link(index: usize, l: usize, r: f64, s: f64, rng: &mut impl Rng) -> RisLink {
        RisLink {
            index,
            h: sample_channel_matrix(1, l, &FadingLink::normalized(2.5), rng).unwrap(),
            g: sample_channel_matrix(1, l, &FadingLink::normalized(1.5), rng).unwrap(),
            r_bs: r,
            r_ue: s,
        }
    }

    #[test]
    fn direct_sinr_is_snr_times_budget() {
        let cfg = SystemConfig::default();
        let one = ComplexMatrix::from_row_major(1, 1, vec![C64::new(1.0, 0.0)]).unwrap();
        let (omega, _) = pathloss_omega(50.0, &cfg, cfg.direct_link_gain());
        let want = cfg.tx_power_w * omega * cfg.array_gain() / cfg.noise_power_w;
        assert!((sinr_direct(&one, &cfg, 50.0, 0.0) / want - 1.0).abs() < 1e-12);
    }

    #[test]
    fn halving_both_hops_scales_by_two_to_the_two_alpha() {
        let cfg = SystemConfig::default();
        let mut rng = RngStream::new(3, 0).rng();
        let mut a = link(0, 16, 40.0, 30.0, &mut rng);
        let plan = PhaseController::new(Scheme::Optimal)
            .design(&joint_cascade(&[&a], &cfg).unwrap().0, &[16], &mut rng)
            .unwrap();
        let far = sinr_reflective(&[&a], &plan, &cfg, 0.0).unwrap();
        a.r_bs /= 2.0;
        a.r_ue /= 2.0;
        let near = sinr_reflective(&[&a], &plan, &cfg, 0.0).unwrap();
        assert!((near / far - 2f64.powf(2.0 * cfg.path_loss_exponent)).abs() < 1e-9);
    }

    #[test]
    fn identical_candidates_tie_break_to_first() {
        let cfg = SystemConfig::default();
        let mut rng = RngStream::new(4, 0).rng();
        let base = link(7, 8, 30.0, 20.0, &mut rng);
        let mut other = base.clone();
        other.index = 9;
        let ctl = PhaseController::new(Scheme::Optimal);
        let (idx, _) = select_best_ris(&[base, other], &ctl, &cfg, 0.0, 0.0, &mut rng).unwrap().unwrap();
        assert_eq!(idx, 7);
        assert!(select_best_ris(&[], &ctl, &cfg, 0.0, 0.0, &mut rng).unwrap().is_none());
    }

    #[test]
    fn subset_of_everything_skips_search() {
        let cfg = SystemConfig::default();
        let mut rng = RngStream::new(5, 0).rng();
        let cands: Vec<RisLink> = (0..3).map(|i| link(i, 8, 30.0 + i as f64, 20.0, &mut rng)).collect();
        let ctl = PhaseController::new(Scheme::Optimal);
        let (idx, b) = select_ris_subset(&cands, 3, &ctl, &cfg, 0.0, 0.0, SubsetSearch::Auto, &mut rng).unwrap();
        assert_eq!(idx, vec![0, 1, 2]);
        assert!(b.reflective > 0.0);
        assert!(select_ris_subset(&cands, 4, &ctl, &cfg, 0.0, 0.0, SubsetSearch::Auto, &mut rng).is_err());
    }

    #[test]
    fn weighted_sinr_reference_value() {
        let g = weighted_sinr(2.0, 1.0, 0.6494, 0.9568).unwrap();
        assert!((g - 1.6343).abs() < 1e-4);
        assert!(weighted_sinr(1.0, 1.0, 1.2, 0.5).is_err());
    }

    #[test]
    fn binomial_counts() {
        assert_eq!(binomial(5, 2), 10);
        assert_eq!(binomial(170, 3), 804_440);
    }
}
