//! Monte Carlo experiment engine.
//!
//! A trial samples a deployment, then for every user draws the direct channel,
//! the channels of its LoS RISs and the interference, designs RIS phases with
//! the configured scheme, associates, and reports the SINR. Trial `i` is a pure
//! function of `(base_seed, i)`, and each user/RIS pair draws its channels from
//! its own derived stream, so different schemes see identical channels (common
//! random numbers) and results do not depend on the degree of parallelism.

use rand::Rng;
use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::analytics::{prob_reflective, AnalyticsParams};
use crate::channel::{
    alive_ris_interference, db_to_linear, sample_channel_matrix, sample_interference, FadingLink, SystemConfig,
};
use crate::error::{Error, Result};
use crate::geometry::{los_probability_unchecked, uniform_in_disk, Deployment, DeploymentModel, Point2D};
use crate::linkselect::{select_best_ris, select_ris_subset, sinr_direct, RisLink, SinrBreakdown, SubsetSearch};
use crate::numerics::stats::{mean_ci, proportion_ci};
use crate::numerics::{uniform_phase, RngStream};
use crate::phasectl::{PhaseController, Scheme, DEFAULT_QB_BLOCK, DEFAULT_QB_TOL};

/// How a user's SINR is scored.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize, Default)]
#[serde(rename_all = "snake_case")]
pub enum MetricMode {
    /// Direct link if LoS (a blocked direct link contributes nothing) plus the
    /// associated reflective link: `γ = 1{LoS}·γ_D + γ_I`.
    #[default]
    Associated,
    /// Probability-weighted `γ_new = Pr_LoS·γ_D + (1 − Pr_LoS)·P_R^s·γ_I`, with
    /// `γ_D` drawn as if unblocked.
    Weighted,
    /// Direct link when it is LoS, otherwise the reflective link; the
    /// association the analytical coverage is built on.
    Exclusive,
}

/// Phase control and association settings.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeConfig {
    pub control: Scheme,
    /// K, the number of RISs associated per user (ignored by `era`).
    pub selected_ris: usize,
    pub subset_search: SubsetSearch,
    /// Candidates kept after ranking LoS RISs by distance product; 0 keeps all.
    pub shortlist: usize,
    pub qb_block: usize,
    pub qb_tol: f64,
    pub metric: MetricMode,
    pub interference: bool,
}

impl Default for SchemeConfig {
    fn default() -> Self {
        Self {
            control: Scheme::Optimal,
            selected_ris: 1,
            subset_search: SubsetSearch::Auto,
            shortlist: 4,
            qb_block: DEFAULT_QB_BLOCK,
            qb_tol: DEFAULT_QB_TOL,
            metric: MetricMode::Associated,
            interference: true,
        }
    }
}

impl SchemeConfig {
    pub fn controller(&self) -> PhaseController {
        PhaseController {
            scheme: self.control,
            qb_block: self.qb_block,
            qb_tol: self.qb_tol,
        }
    }
}

/// Everything that determines a simulation run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct ExperimentConfig {
    pub system: SystemConfig,
    /// λ_R, per m².
    pub ris_density: f64,
    pub deployment: DeploymentModel,
    pub scheme: SchemeConfig,
    pub thresholds_db: Vec<f64>,
    pub n_trials: usize,
    pub base_seed: u64,
    /// SINR cap of the rate metric, dB.
    pub rate_cap_db: f64,
    /// Target-user mode: only user 0 is scored, placed at this distance.
    pub user_distance: Option<f64>,
}

impl Default for ExperimentConfig {
    fn default() -> Self {
        Self {
            system: SystemConfig::default(),
            ris_density: 1e-3,
            deployment: DeploymentModel::Ppp,
            scheme: SchemeConfig::default(),
            thresholds_db: (-10..=30).step_by(5).map(f64::from).collect(),
            n_trials: 1000,
            base_seed: 1,
            rate_cap_db: -3.0,
            user_distance: None,
        }
    }
}

impl ExperimentConfig {
    pub fn validate(&self) -> Result<()> {
        if self.n_trials == 0 {
            return Err(Error::invalid("n_trials must be at least 1"));
        }
        if !(self.ris_density >= 0.0 && self.ris_density.is_finite()) {
            return Err(Error::invalid(format!("RIS density must be >= 0, got {}", self.ris_density)));
        }
        if self.thresholds_db.iter().any(|t| !t.is_finite()) {
            return Err(Error::invalid("thresholds must be finite"));
        }
        if !self.rate_cap_db.is_finite() {
            return Err(Error::invalid("rate cap must be finite"));
        }
        if self.scheme.selected_ris == 0 {
            return Err(Error::invalid("selected_ris must be at least 1"));
        }
        if self.scheme.qb_block == 0 || !(self.scheme.qb_tol > 0.0) {
            return Err(Error::invalid("QB block must be >= 1 and tolerance > 0"));
        }
        if let Some(d) = self.user_distance {
            if !(0.0..=self.system.cell_radius_m).contains(&d) {
                return Err(Error::invalid(format!("user distance {d} outside the cell")));
            }
        }
        if let DeploymentModel::Pcp { mean_per_cluster, scatter_std } = self.deployment {
            if !(mean_per_cluster > 0.0 && scatter_std >= 0.0) {
                return Err(Error::invalid("PCP needs a positive cluster size and non-negative scatter"));
            }
        }
        Ok(())
    }
}

/// Monte Carlo coverage estimate per threshold.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CoverageCurve {
    pub threshold_db: Vec<f64>,
    pub coverage: Vec<f64>,
    pub ci_halfwidth: Vec<f64>,
}

impl CoverageCurve {
    /// Empirical `Pr(γ > T)` over pooled SINR samples.
    pub fn from_samples(sinr: &[f64], thresholds_db: &[f64]) -> Self {
        let n = sinr.len();
        let (coverage, ci_halfwidth) = thresholds_db
            .iter()
            .map(|&t| {
                let lin = db_to_linear(t);
                proportion_ci(sinr.iter().filter(|&&g| g > lin).count(), n)
            })
            .unzip();
        Self {
            threshold_db: thresholds_db.to_vec(),
            coverage,
            ci_halfwidth,
        }
    }
}

/// Rates with the SINR capped at `cap_db`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct RateSummary {
    /// Mean rate of each user slot, bits/s.
    pub per_user: Vec<f64>,
    pub sum_rate: f64,
    /// Mean over all users and its 95% half-width.
    pub mean_rate: f64,
    pub mean_ci: f64,
    pub cap_db: f64,
}

/// `BW·log₂(1 + min(γ, T))`.
pub fn capped_rate(sinr: f64, cap_linear: f64, bandwidth_hz: f64) -> f64 {
    bandwidth_hz * (1.0 + sinr.min(cap_linear)).log2()
}

/// Per-trial result: one breakdown per scored user.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct TrialOutcome {
    pub trial: u64,
    pub users: Vec<SinrBreakdown>,
}

// Labels of the derived streams inside a trial.
const LABEL_DEPLOYMENT: u64 = 0;
const LABEL_INTERFERENCE: u64 = 1 << 60;
const LABEL_DIRECT: u64 = 2 << 60;
const LABEL_RIS: u64 = 3 << 60;
const LABEL_SCHEME: u64 = 4 << 60;

/// A validated configuration with its precomputed lookup tables.
#[derive(Debug, Clone)]
pub struct Experiment {
    config: ExperimentConfig,
    /// P_R^s on a uniform ξ grid, for the weighted metric.
    reflective_table: Option<Vec<f64>>,
}

const TABLE_POINTS: usize = 129;

impl Experiment {
    pub fn new(config: ExperimentConfig) -> Result<Self> {
        config.validate()?;
        let reflective_table = match config.scheme.metric {
            MetricMode::Associated | MetricMode::Exclusive => None,
            MetricMode::Weighted => {
                let p = AnalyticsParams::from_system(&config.system, config.ris_density);
                let r = config.system.cell_radius_m;
                Some(
                    (0..TABLE_POINTS)
                        .map(|i| prob_reflective(r * i as f64 / (TABLE_POINTS - 1) as f64, &p))
                        .collect::<Result<_>>()?,
                )
            }
        };
        Ok(Self {
            config,
            reflective_table,
        })
    }

    pub fn config(&self) -> &ExperimentConfig {
        &self.config
    }

    fn reflective_prob(&self, xi: f64) -> f64 {
        let table = self.reflective_table.as_ref().expect("weighted metric has a table");
        let pos = (xi / self.config.system.cell_radius_m).clamp(0.0, 1.0) * (TABLE_POINTS - 1) as f64;
        let i = (pos.floor() as usize).min(TABLE_POINTS - 2);
        let f = pos - i as f64;
        table[i] * (1.0 - f) + table[i + 1] * f
    }

    fn sample_deployment(&self, trial: &RngStream) -> Result<Deployment> {
        let c = &self.config;
        let s = &c.system;
        let mut rng = trial.derive(LABEL_DEPLOYMENT).rng();
        match c.user_distance {
            None => Deployment::sample(&c.deployment, c.ris_density, s.n_users, s.cell_radius_m, s.h_ut_m, &mut rng),
            Some(d) => {
                let ris = crate::geometry::sample_ris_points(&c.deployment, c.ris_density, s.cell_radius_m, &mut rng)?;
                let mut users = vec![Point2D::polar(d, uniform_phase(&mut rng))];
                users.extend((1..s.n_users).map(|_| uniform_in_disk(s.cell_radius_m, &mut rng)));
                Deployment::from_points(ris, users, s.cell_radius_m, s.h_ut_m, &mut rng)
            }
        }
    }

    /// Runs trial `index`; errors carry the trial index.
    pub fn run_trial(&self, index: u64) -> Result<TrialOutcome> {
        self.run_trial_inner(index).map_err(|e| Error::Trial {
            trial: index,
            source: Box::new(e),
        })
    }

    fn run_trial_inner(&self, index: u64) -> Result<TrialOutcome> {
        let trial = RngStream::new(self.config.base_seed, index);
        let dep = self.sample_deployment(&trial)?;
        let scored = if self.config.user_distance.is_some() { 1 } else { dep.user_points.len() };
        let users = (0..scored)
            .map(|u| self.score_user(&dep, u, &trial))
            .collect::<Result<Vec<_>>>()?;
        Ok(TrialOutcome { trial: index, users })
    }

    /// Runs trial `index` on a given deployment (LoS marks included).
    pub fn run_on_deployment(&self, dep: &Deployment, index: u64) -> Result<TrialOutcome> {
        let trial = RngStream::new(self.config.base_seed, index);
        let users = (0..dep.user_points.len())
            .map(|u| self.score_user(dep, u, &trial))
            .collect::<Result<Vec<_>>>()?;
        Ok(TrialOutcome { trial: index, users })
    }

    fn score_user(&self, dep: &Deployment, u: usize, trial: &RngStream) -> Result<SinrBreakdown> {
        let c = &self.config;
        let cfg = &c.system;
        let sc = &c.scheme;
        let user = dep.user_points[u];
        let xi = user.norm();
        let (rows, cols) = cfg.antenna_dims();
        let u64_ = u as u64;

        let mut irng = trial.derive(LABEL_INTERFERENCE | u64_).rng();
        let base_interference = if sc.interference {
            let idle: Vec<usize> = (0..dep.ris_points.len()).filter(|&n| !dep.ris_los[u][n]).collect();
            sample_interference(cfg, dep, u, &idle, &mut irng)?
        } else {
            0.0
        };

        // Direct link: drawn with the LoS law; blocked links count only in the weighted metric.
        let mut drng = trial.derive(LABEL_DIRECT | u64_).rng();
        let h_d = sample_channel_matrix(rows, cols, &FadingLink::normalized(cfg.nakagami_m_los), &mut drng)?;
        let gamma_d_unblocked = sinr_direct(&h_d, cfg, xi, base_interference);
        let los_direct = dep.direct_los[u];

        // LoS RIS candidates, nearest by distance product first.
        let mut cands: Vec<(f64, usize)> = dep
            .los_ris(u)
            .map(|n| {
                let ris = dep.ris_points[n];
                (ris.norm() * ris.distance(&user), n)
            })
            .collect();
        cands.sort_by(|a, b| a.0.total_cmp(&b.0).then(a.1.cmp(&b.1)));
        if sc.control != Scheme::Era && sc.shortlist > 0 {
            cands.truncate(sc.shortlist);
        }
        let l = cfg.ris_elements;
        let m = cfg.nakagami_m_los;
        let links = cands
            .iter()
            .map(|&(_, n)| {
                let mut r = trial.derive(LABEL_RIS | (u64_ << 32) | n as u64).rng();
                let ris = dep.ris_points[n];
                Ok(RisLink {
                    index: n,
                    h: sample_channel_matrix(cols, l, &FadingLink::normalized(m), &mut r)?,
                    g: sample_channel_matrix(rows, l, &FadingLink::normalized(m), &mut r)?,
                    r_bs: ris.norm(),
                    r_ue: ris.distance(&user),
                })
            })
            .collect::<Result<Vec<_>>>()?;

        let controller = sc.controller();
        let mut srng = trial.derive(LABEL_SCHEME | u64_).rng();
        // Association is scored on the reflective part alone so that the
        // choice does not depend on the direct link.
        let (gamma_i, selected) = if links.is_empty() {
            (0.0, Vec::new())
        } else if sc.control == Scheme::Era {
            let (idx, b) = select_ris_subset(
                &links,
                links.len(),
                &controller,
                cfg,
                0.0,
                base_interference,
                sc.subset_search,
                &mut srng,
            )?;
            (b.reflective, idx)
        } else if sc.selected_ris == 1 {
            match select_best_ris(&links, &controller, cfg, 0.0, base_interference, &mut srng)? {
                Some((i, b)) => (b.reflective, vec![i]),
                None => (0.0, Vec::new()),
            }
        } else {
            let k = sc.selected_ris.min(links.len());
            let (idx, b) = select_ris_subset(
                &links,
                k,
                &controller,
                cfg,
                0.0,
                base_interference,
                sc.subset_search,
                &mut srng,
            )?;
            (b.reflective, idx)
        };

        // Serving RISs also reflect the other users toward this one.
        let alive = if sc.interference && !selected.is_empty() {
            alive_ris_interference(cfg, dep, u, &selected, &mut irng)?
        } else {
            0.0
        };
        let interference = base_interference + alive;
        let rescale = (cfg.noise_power_w + base_interference) / (cfg.noise_power_w + interference);
        let gamma_d_unblocked = gamma_d_unblocked * rescale;
        let gamma_i = gamma_i * rescale;

        let (direct, reflective) = match sc.metric {
            MetricMode::Associated => (if los_direct { gamma_d_unblocked } else { 0.0 }, gamma_i),
            MetricMode::Exclusive if los_direct => (gamma_d_unblocked, 0.0),
            MetricMode::Exclusive => (0.0, gamma_i),
            MetricMode::Weighted => {
                let p_los = los_probability_unchecked(xi, cfg.h_ut_m);
                let p_rs = self.reflective_prob(xi);
                (p_los * gamma_d_unblocked, (1.0 - p_los) * p_rs * gamma_i)
            }
        };
        Ok(SinrBreakdown::new(direct, reflective, selected, cfg.noise_power_w, interference))
    }

    /// All trials in index order.
    pub fn run(&self) -> Result<Vec<TrialOutcome>> {
        (0..self.config.n_trials as u64)
            .into_par_iter()
            .map(|i| self.run_trial(i))
            .collect()
    }

    /// Pooled total SINRs of all scored users, trial-major.
    pub fn sinr_samples(&self) -> Result<Vec<f64>> {
        Ok(flatten_total(&self.run()?))
    }

    pub fn summarize(&self, outcomes: &[TrialOutcome]) -> (CoverageCurve, RateSummary) {
        let samples = flatten_total(outcomes);
        let curve = CoverageCurve::from_samples(&samples, &self.config.thresholds_db);
        (curve, self.rate_summary_from(outcomes))
    }

    fn rate_summary_from(&self, outcomes: &[TrialOutcome]) -> RateSummary {
        let cap = db_to_linear(self.config.rate_cap_db);
        let bw = self.config.system.bandwidth_hz;
        let slots = outcomes.first().map_or(0, |o| o.users.len());
        let mut per_user = vec![0.0; slots];
        let mut all = Vec::with_capacity(outcomes.len() * slots);
        for o in outcomes {
            for (k, b) in o.users.iter().enumerate() {
                let r = capped_rate(b.total, cap, bw);
                per_user[k] += r;
                all.push(r);
            }
        }
        let n = outcomes.len().max(1) as f64;
        per_user.iter_mut().for_each(|r| *r /= n);
        let (mean_rate, mean_ci) = mean_ci(&all);
        RateSummary {
            sum_rate: per_user.iter().sum(),
            per_user,
            mean_rate,
            mean_ci,
            cap_db: self.config.rate_cap_db,
        }
    }
}

fn flatten_total(outcomes: &[TrialOutcome]) -> Vec<f64> {
    outcomes.iter().flat_map(|o| o.users.iter().map(|b| b.total)).collect()
}

pub fn run_trial(config: &ExperimentConfig, trial_index: u64) -> Result<TrialOutcome> {
    Experiment::new(config.clone())?.run_trial(trial_index)
}

pub fn coverage_curve(config: &ExperimentConfig) -> Result<CoverageCurve> {
    let e = Experiment::new(config.clone())?;
    Ok(CoverageCurve::from_samples(&e.sinr_samples()?, &config.thresholds_db))
}

pub fn rate_summary(config: &ExperimentConfig) -> Result<RateSummary> {
    let e = Experiment::new(config.clone())?;
    Ok(e.rate_summary_from(&e.run()?))
}

/// One scheme's results from a paired comparison.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SchemeResult {
    pub scheme: Scheme,
    pub coverage: CoverageCurve,
    pub rate: RateSummary,
    /// Capped rate of every (trial, user) sample, in the same order for every scheme.
    pub rate_samples: Vec<f64>,
}

/// Runs the same trials under each scheme; channels and geometry are shared.
pub fn compare_schemes(config: &ExperimentConfig, schemes: &[Scheme]) -> Result<Vec<SchemeResult>> {
    if schemes.len() < 2 {
        return Err(Error::invalid("a comparison needs at least two schemes"));
    }
    schemes
        .iter()
        .map(|&scheme| {
            let mut c = config.clone();
            c.scheme.control = scheme;
            let e = Experiment::new(c)?;
            let outcomes = e.run()?;
            let (coverage, rate) = e.summarize(&outcomes);
            let cap = db_to_linear(config.rate_cap_db);
            let rate_samples = flatten_total(&outcomes)
                .into_iter()
                .map(|g| capped_rate(g, cap, config.system.bandwidth_hz))
                .collect();
            Ok(SchemeResult {
                scheme,
                coverage,
                rate,
                rate_samples,
            })
        })
        .collect()
}

/// One point of a parameter sweep.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct SweepPoint {
    pub value: f64,
    pub coverage: CoverageCurve,
    pub rate: RateSummary,
}

/// Re-runs the experiment for each value, applying `apply` to a copy of the config.
pub fn sweep(
    config: &ExperimentConfig,
    values: &[f64],
    apply: impl Fn(&mut ExperimentConfig, f64) -> Result<()>,
) -> Result<Vec<SweepPoint>> {
    values
        .iter()
        .map(|&v| {
            let mut c = config.clone();
            apply(&mut c, v)?;
            let e = Experiment::new(c)?;
            let (coverage, rate) = e.summarize(&e.run()?);
            Ok(SweepPoint { value: v, coverage, rate })
        })
        .collect()
}

/// Coverage and rate across RIS densities.
pub fn density_sweep(config: &ExperimentConfig, densities: &[f64]) -> Result<Vec<SweepPoint>> {
    sweep(config, densities, |c, v| {
        c.ris_density = v;
        Ok(())
    })
}

/// Draws a uniform point in the disk; exposed for target-user experiments.
pub fn random_user<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> Point2D {
    uniform_in_disk(radius, rng)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small() -> ExperimentConfig {
        ExperimentConfig {
            n_trials: 20,
            system: crate::channel::SystemParams {
                n_users: 4,
                ris_elements: 16,
                ..Default::default()
            }
            .resolve()
            .unwrap(),
            ..Default::default()
        }
    }

    #[test]
    fn no_ris_means_direct_only() {
        let mut c = small();
        c.ris_density = 0.0;
        let e = Experiment::new(c).unwrap();
        for o in e.run().unwrap() {
            for b in o.users {
                assert_eq!(b.reflective, 0.0);
                assert!(b.selected_ris.is_empty());
            }
        }
    }

    #[test]
    fn trials_are_reproducible() {
        let e = Experiment::new(small()).unwrap();
        assert_eq!(e.run_trial(3).unwrap(), e.run_trial(3).unwrap());
    }

    #[test]
    fn single_user_has_no_interference() {
        let mut c = small();
        c.system.n_users = 1;
        for o in Experiment::new(c).unwrap().run().unwrap() {
            assert_eq!(o.users[0].interference_power, 0.0);
        }
    }

    #[test]
    fn saturated_rate_equals_cap() {
        let cap = db_to_linear(-3.0);
        assert_eq!(capped_rate(1e3, cap, 2e8), 2e8 * (1.0 + cap).log2());
    }

    #[test]
    fn target_user_mode_scores_one_user() {
        let mut c = small();
        c.user_distance = Some(40.0);
        let o = Experiment::new(c).unwrap().run_trial(0).unwrap();
        assert_eq!(o.users.len(), 1);
    }
}
