//! Numerical evaluation of the analytical coverage and rate expressions:
//! LoS-RIS distance laws, reflective-link existence, the Gamma approximation
//! of the co-phased cascade, the path-length-product CDF, and conditional,
//! ergodic and rate-domain coverage.
//!
//! Interference is neglected throughout (noise-limited evaluation); compare
//! against the simulator with interference disabled.

use std::f64::consts::PI;

use serde::{Deserialize, Serialize};

use crate::channel::{SystemConfig, SPEED_OF_LIGHT};
use crate::error::{Error, Result};
use crate::geometry::{height_factor, los_probability_unchecked};
use crate::numerics::{gamma_cdf, gamma_pdf, ln_gamma, nakagami_cdf, Quadrature};

/// Ground distance up to which the UMi LoS probability is exactly 1.
const LOS_CERTAIN_RADIUS: f64 = 18.0;

const INNER_TOL_FACTOR: f64 = 1e-2;

/// LoS probability as a function of ground distance.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum LosModel {
    /// 3GPP UMi law for terminals at `h_ut` meters.
    Umi { h_ut: f64 },
    /// Distance-independent probability (1 recovers the homogeneous case).
    Constant { p: f64 },
}

impl LosModel {
    pub fn prob(&self, d: f64) -> f64 {
        match *self {
            LosModel::Umi { h_ut } => los_probability_unchecked(d, h_ut),
            LosModel::Constant { p } => p,
        }
    }

    fn validate(&self) -> Result<()> {
        match *self {
            LosModel::Umi { h_ut } if !(0.0..=23.0).contains(&h_ut) => {
                Err(Error::invalid(format!("terminal height {h_ut} m is outside the LoS model")))
            }
            LosModel::Constant { p } if !(0.0..=1.0).contains(&p) => {
                Err(Error::invalid(format!("LoS probability {p} is not in [0, 1]")))
            }
            _ => Ok(()),
        }
    }

    /// `∫₀^r t·Pr_LoS(t) dt`.
    pub fn area_integral(&self, r: f64, quad: &Quadrature) -> Result<f64> {
        let r = r.max(0.0);
        match *self {
            LosModel::Constant { p } => Ok(0.5 * p * r * r),
            LosModel::Umi { h_ut } if height_factor(h_ut) == 0.0 => {
                let c = LOS_CERTAIN_RADIUS;
                if r <= c {
                    return Ok(0.5 * r * r);
                }
                // t·Pr(t) = 18 + e^{-t/63}(t − 18) beyond 18 m.
                let k = 63.0;
                let anti = |t: f64| -k * (-t / k).exp() * (t - c) - k * k * (-t / k).exp();
                Ok(0.5 * c * c + c * (r - c) + anti(r) - anti(c))
            }
            LosModel::Umi { .. } => {
                let c = LOS_CERTAIN_RADIUS;
                if r <= c {
                    return Ok(0.5 * r * r);
                }
                Ok(0.5 * c * c + quad.integrate(|t| t * self.prob(t), c, r)?)
            }
        }
    }
}

/// Radial user density λ_u(ξ).
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum UserDensity {
    Constant { value: f64 },
    /// `scale · ξ^exponent`.
    PowerLaw { scale: f64, exponent: f64 },
}

impl UserDensity {
    pub fn at(&self, xi: f64) -> f64 {
        match *self {
            UserDensity::Constant { value } => value,
            UserDensity::PowerLaw { scale, exponent } => scale * xi.powf(exponent),
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = match *self {
            UserDensity::Constant { value } => value > 0.0 && value.is_finite(),
            UserDensity::PowerLaw { scale, exponent } => {
                scale > 0.0 && scale.is_finite() && exponent > -2.0 && exponent.is_finite()
            }
        };
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("invalid user density {self:?}")))
        }
    }
}

/// Inputs of the analytical model that are not link-budget constants.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct AnalyticsParams {
    /// λ_R, per m².
    pub ris_density: f64,
    pub user_density: UserDensity,
    pub radius: f64,
    pub los: LosModel,
    /// Path-loss intercepts and exponents of the LoS/NLoS association rule.
    pub c_los: f64,
    pub c_nlos: f64,
    pub alpha_los: f64,
    pub alpha_nlos: f64,
    /// Relative quadrature tolerance.
    pub quad_tol: f64,
    /// Outer radius of the nearest-LoS-RIS law; `None` for the unbounded plane.
    pub support_max: Option<f64>,
}

impl AnalyticsParams {
    pub fn new(ris_density: f64, radius: f64, h_ut: f64) -> Self {
        let zeta = (SPEED_OF_LIGHT / 28e9 / (4.0 * PI)).powi(2);
        Self {
            ris_density,
            user_density: UserDensity::Constant { value: 1.0 },
            radius,
            los: LosModel::Umi { h_ut },
            c_los: zeta,
            c_nlos: zeta,
            alpha_los: 2.0,
            alpha_nlos: 4.0,
            quad_tol: 1e-5,
            support_max: None,
        }
    }

    pub fn from_system(cfg: &SystemConfig, ris_density: f64) -> Self {
        let mut p = Self::new(ris_density, cfg.cell_radius_m, cfg.h_ut_m);
        p.c_los = cfg.zeta();
        p.c_nlos = cfg.zeta();
        p
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.ris_density >= 0.0 && self.ris_density.is_finite()) {
            return Err(Error::invalid(format!("RIS density must be >= 0, got {}", self.ris_density)));
        }
        if !(self.radius > 0.0 && self.radius.is_finite()) {
            return Err(Error::invalid(format!("radius must be positive, got {}", self.radius)));
        }
        if !(self.alpha_los >= 2.0 && self.alpha_nlos >= 2.0) {
            return Err(Error::invalid("path-loss exponents must be >= 2"));
        }
        if !(self.c_los > 0.0 && self.c_nlos > 0.0) {
            return Err(Error::invalid("path-loss intercepts must be positive"));
        }
        if !(self.quad_tol > 0.0 && self.quad_tol < 1.0) {
            return Err(Error::invalid(format!("quadrature tolerance must be in (0, 1), got {}", self.quad_tol)));
        }
        if let Some(m) = self.support_max {
            if !(m > 0.0) {
                return Err(Error::invalid("support_max must be positive"));
            }
        }
        self.los.validate()?;
        self.user_density.validate()
    }

    fn quad(&self) -> Quadrature {
        Quadrature::relative(self.quad_tol, 1e-14)
    }

    /// Tighter rule for integrals nested inside other quadratures, so their
    /// noise does not force needless refinement of the outer rule.
    fn inner_quad(&self) -> Quadrature {
        Quadrature::relative(self.quad_tol * INNER_TOL_FACTOR, 1e-15)
    }

    /// `2πλ_R ∫₀^r t·Pr_LoS(t) dt`, the mean number of LoS RISs within `r`.
    fn los_mass(&self, r: f64) -> Result<f64> {
        Ok(2.0 * PI * self.ris_density * self.los.area_integral(r, &self.quad())?)
    }

    /// `2πλ_R ∫₀^r t·(1 − Pr_LoS(t)) dt`.
    fn nlos_mass(&self, r: f64) -> Result<f64> {
        Ok(PI * self.ris_density * r * r - self.los_mass(r)?)
    }

    /// ψ_L(x) = (C_N/C_L)^{1/α_N} x^{α_L/α_N}.
    pub fn psi_l(&self, x: f64) -> f64 {
        (self.c_nlos / self.c_los).powf(1.0 / self.alpha_nlos) * x.powf(self.alpha_los / self.alpha_nlos)
    }

    /// Normalizer B_L of the nearest-LoS-RIS law: the probability that any LoS
    /// RIS lies within the support.
    pub fn b_l(&self) -> Result<f64> {
        match self.support_max {
            Some(m) => Ok(-(-self.los_mass(m)?).exp_m1()),
            None if self.ris_density > 0.0 && self.los != (LosModel::Constant { p: 0.0 }) => Ok(1.0),
            None => Ok(0.0),
        }
    }

    fn support(&self) -> f64 {
        self.support_max.unwrap_or(f64::INFINITY)
    }
}

/// Density of the distance to the nearest LoS RIS.
pub fn nearest_los_pdf(x: f64, p: &AnalyticsParams) -> Result<f64> {
    p.validate()?;
    let b = p.b_l()?;
    if b == 0.0 {
        return Err(Error::numeric("nearest_los_pdf", "no LoS RIS can exist: B_L = 0"));
    }
    nearest_los_pdf_with(x, p, b)
}

fn nearest_los_pdf_with(x: f64, p: &AnalyticsParams, b: f64) -> Result<f64> {
    if !(x > 0.0) || x > p.support() {
        return Ok(0.0);
    }
    Ok(2.0 * PI * p.ris_density * x * p.los.prob(x) * (-p.los_mass(x)?).exp() / b)
}

fn nlos_void(x: f64, p: &AnalyticsParams) -> Result<f64> {
    Ok((-p.nlos_mass(p.psi_l(x))?).exp())
}

/// A_L, the probability that the user associates with a LoS RIS rather than an NLoS one.
pub fn los_assoc_prob(p: &AnalyticsParams) -> Result<f64> {
    p.validate()?;
    let b = p.b_l()?;
    if b == 0.0 {
        return Ok(0.0);
    }
    let mut err = None;
    let v = p.quad().integrate(
        |x| match (nlos_void(x, p), nearest_los_pdf_with(x, p, b)) {
            (Ok(a), Ok(f)) => a * f,
            (Err(e), _) | (_, Err(e)) => {
                err.get_or_insert(e);
                0.0
            }
        },
        0.0,
        p.support(),
    )?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok((b * v).clamp(0.0, 1.0))
}

/// Density of the distance to the serving (LoS-associated) RIS.
pub fn serving_dist_pdf(x: f64, p: &AnalyticsParams) -> Result<f64> {
    let a = los_assoc_prob(p)?;
    if a == 0.0 {
        return Err(Error::numeric("serving_dist_pdf", "LoS association probability is zero"));
    }
    serving_dist_pdf_with(x, p, p.b_l()?, a)
}

fn serving_dist_pdf_with(x: f64, p: &AnalyticsParams, b: f64, a: f64) -> Result<f64> {
    Ok(b * nearest_los_pdf_with(x, p, b)? / a * nlos_void(x, p)?)
}

/// Mean serving distance, `∫ x f̂_L(x) dx`.
pub fn expected_serving_distance(p: &AnalyticsParams) -> Result<f64> {
    let a = los_assoc_prob(p)?;
    if a == 0.0 {
        return Err(Error::numeric("expected_serving_distance", "LoS association probability is zero"));
    }
    let b = p.b_l()?;
    let v = p
        .quad()
        .integrate(|x| x * serving_dist_pdf_with(x, p, b, a).unwrap_or(f64::NAN), 0.0, p.support())?;
    if !v.is_finite() {
        return Err(Error::numeric("expected_serving_distance", "non-finite integrand"));
    }
    Ok(v)
}

fn check_xi(xi: f64, p: &AnalyticsParams) -> Result<()> {
    if !(0.0..=p.radius * (1.0 + 1e-12)).contains(&xi) {
        return Err(Error::invalid(format!("user distance {xi} outside [0, {}]", p.radius)));
    }
    Ok(())
}

/// LoS-weighted area of the cell seen from a user at distance `xi`:
/// `∫_disk Pr_LoS(|p − u|) dA`.
fn los_disk_measure(xi: f64, p: &AnalyticsParams) -> Result<f64> {
    let r = p.radius;
    let quad = p.inner_quad();
    if xi <= 1e-12 * r {
        return Ok(2.0 * PI * p.los.area_integral(r, &quad)?);
    }
    let mut err = None;
    let half = quad.integrate(
        |psi| {
            let s = psi.sin();
            let reach = (r * r - xi * xi * s * s).max(0.0).sqrt() - xi * psi.cos();
            p.los.area_integral(reach, &quad).unwrap_or_else(|e| {
                err.get_or_insert(e);
                0.0
            })
        },
        0.0,
        PI,
    )?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(2.0 * half)
}

/// P_R^s(ξ): probability that at least one RIS in the cell is LoS to a user at `xi`.
pub fn prob_reflective(xi: f64, p: &AnalyticsParams) -> Result<f64> {
    p.validate()?;
    check_xi(xi, p)?;
    if p.ris_density == 0.0 {
        return Ok(0.0);
    }
    Ok(-(-p.ris_density * los_disk_measure(xi, p)?).exp_m1())
}

/// `(Pr_Ad, Pr_AI)`: direct association and reflective association probabilities.
pub fn assoc_probs(xi: f64, p: &AnalyticsParams) -> Result<(f64, f64)> {
    let los = p.los.prob(xi);
    let ps = prob_reflective(xi, p)?;
    Ok((los, (1.0 - los) * ps))
}

/// Moment-matched Gamma law of the co-phased cascade amplitude `Σ_l |h_l||g_l||ω_l|`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct CascadeGammaParams {
    /// Per-element shape α_U.
    pub alpha_u: f64,
    /// Rate β_U.
    pub beta_u: f64,
    pub elements: usize,
    pub mu1: f64,
    pub mu2: f64,
    pub eta_bar: f64,
}

impl CascadeGammaParams {
    pub fn shape(&self) -> f64 {
        self.elements as f64 * self.alpha_u
    }

    pub fn mean(&self) -> f64 {
        self.shape() / self.beta_u
    }

    pub fn std_dev(&self) -> f64 {
        self.shape().sqrt() / self.beta_u
    }

    pub fn cdf(&self, z: f64) -> f64 {
        gamma_cdf(self.shape(), self.beta_u, z)
    }

    pub fn pdf(&self, z: f64) -> f64 {
        gamma_pdf(self.shape(), self.beta_u, z)
    }

    /// Density of `|R|²` at `x`: `f_R(√x) / (2√x)`.
    pub fn power_pdf(&self, x: f64) -> f64 {
        if x <= 0.0 {
            return 0.0;
        }
        let z = x.sqrt();
        self.pdf(z) / (2.0 * z)
    }
}

/// Moment matching of `U = |h||g||ω|` with `h ~ Nakagami(m_h, Ω_h)`, `g ~ Nakagami(m_g, Ω_g)`.
pub fn cascade_gamma_approx(
    m_h: f64,
    omega_h: f64,
    m_g: f64,
    omega_g: f64,
    element_gain: f64,
    elements: usize,
) -> Result<CascadeGammaParams> {
    let all_positive = [m_h, omega_h, m_g, omega_g, element_gain].iter().all(|v| *v > 0.0 && v.is_finite());
    if !all_positive || elements == 0 {
        return Err(Error::invalid("cascade parameters must be positive"));
    }
    let eta_bar = ((m_h / omega_h) * (m_g / omega_g) / (element_gain * element_gain)).sqrt();
    let mu = |m: f64| {
        (ln_gamma(m_h + m / 2.0) + ln_gamma(m_g + m / 2.0) - ln_gamma(m_h) - ln_gamma(m_g)).exp()
            * eta_bar.powf(-m)
    };
    let (mu1, mu2) = (mu(1.0), mu(2.0));
    let var = mu2 - mu1 * mu1;
    if !(var > 1e-14 * mu2) {
        return Err(Error::numeric("cascade_gamma_approx", format!("degenerate variance {var}")));
    }
    Ok(CascadeGammaParams {
        alpha_u: mu1 * mu1 / var,
        beta_u: mu1 / var,
        elements,
        mu1,
        mu2,
        eta_bar,
    })
}

/// Angular measure, around the user, of the directions in which a RIS at
/// distance `rho` from the user lies in the cell and has `ṡ·rho ≤ x`, with
/// `ṡ² = rho² + ξ² + 2 rho ξ cos ψ` its distance to the BS. Both constraints
/// bound `cos ψ` from above, so the admissible set is a single arc.
fn admissible_arc(rho: f64, xi: f64, x: f64, r: f64) -> f64 {
    if rho == 0.0 {
        return 2.0 * PI;
    }
    let denom = 2.0 * rho * xi;
    let c_product = if x.is_finite() {
        ((x / rho).powi(2) - rho * rho - xi * xi) / denom
    } else {
        f64::INFINITY
    };
    let c_disk = (r * r - rho * rho - xi * xi) / denom;
    2.0 * (PI - c_product.min(c_disk).clamp(-1.0, 1.0).acos())
}

/// LoS-weighted area of `{RIS in the cell : ṡ·|RIS − UE| ≤ x}` for a user at `xi`.
///
/// Integrating in user-centred polar coordinates leaves a one-dimensional
/// integral over the RIS–user distance, because the LoS probability depends on
/// that distance only and the admissible directions form one arc.
fn product_measure(x: f64, xi: f64, p: &AnalyticsParams) -> Result<f64> {
    if !(x > 0.0) {
        return Ok(0.0);
    }
    let r = p.radius;
    let quad = p.inner_quad();
    if xi <= 1e-9 * r {
        // Both hops have the same length: ṡ² ≤ x.
        return Ok(2.0 * PI * p.los.area_integral(x.sqrt().min(r), &quad)?);
    }
    let rho_max = r + xi;
    // Kinks: arc switching between empty, partial and full, the disk edge,
    // the product/disk crossover and the LoS-certainty radius.
    let mut cuts = vec![0.0, r - xi, LOS_CERTAIN_RADIUS, rho_max];
    if x.is_finite() {
        let disc = (xi * xi + 4.0 * x).sqrt();
        cuts.extend([(disc - xi) / 2.0, (disc + xi) / 2.0, x / r]);
        if xi * xi >= 4.0 * x {
            let d = (xi * xi - 4.0 * x).sqrt();
            cuts.extend([(xi - d) / 2.0, (xi + d) / 2.0]);
        }
    }
    cuts.retain(|c| (0.0..=rho_max).contains(c));
    cuts.sort_by(f64::total_cmp);
    cuts.dedup();
    let mut total = 0.0;
    for w in cuts.windows(2) {
        if w[1] > w[0] {
            total += quad.integrate(
                |rho| p.los.prob(rho) * rho * admissible_arc(rho, xi, x, r),
                w[0],
                w[1],
            )?;
        }
    }
    Ok(total)
}

/// CDF of the minimum path-length product `η = min_n r_n s_n` over LoS RISs,
/// for a user at `xi`. Values `x ≤ r_floor` return 0. The CDF saturates at
/// P_R^s(ξ) (no LoS RIS means no finite product).
pub fn cond_cdf_eta(x: f64, xi: f64, r_floor: f64, p: &AnalyticsParams) -> Result<f64> {
    p.validate()?;
    check_xi(xi, p)?;
    if x <= r_floor || p.ris_density == 0.0 {
        return Ok(0.0);
    }
    Ok(-(-p.ris_density * product_measure(x, xi, p)?).exp_m1())
}

/// Link-budget coefficients of the noise-limited SINRs:
/// `γ_D = k_direct·|h|²·ξ^{-α}`, `γ_I = k_reflect·|R|²·(r s)^{-α}`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CoverageBudget {
    pub k_direct: f64,
    pub k_reflect: f64,
    pub alpha: f64,
    pub m_direct: f64,
    pub cascade: CascadeGammaParams,
    pub reference_distance: f64,
}

impl CoverageBudget {
    pub fn from_system(cfg: &SystemConfig) -> Result<Self> {
        let base = cfg.tx_power_w * cfg.array_gain() / cfg.noise_power_w;
        let m = cfg.nakagami_m_los;
        Ok(Self {
            k_direct: base * cfg.zeta() * cfg.direct_link_gain(),
            k_reflect: base * cfg.zeta() * cfg.zeta() * cfg.reflective_link_gain(),
            alpha: cfg.path_loss_exponent,
            m_direct: m,
            cascade: cascade_gamma_approx(m, 1.0, m, 1.0, 1.0, cfg.ris_elements)?,
            reference_distance: cfg.reference_distance_m,
        })
    }
}

/// Direct-link coverage `Pr(γ_D > T)` at distance `xi` for a linear threshold.
pub fn cov_direct(xi: f64, t: f64, cfg: &SystemConfig) -> Result<f64> {
    Ok(cov_direct_with(xi, t, &CoverageBudget::from_system(cfg)?))
}

fn cov_direct_with(xi: f64, t: f64, b: &CoverageBudget) -> f64 {
    if t <= 0.0 {
        return 1.0;
    }
    let d = xi.max(b.reference_distance);
    let gain = b.k_direct * d.powf(-b.alpha);
    1.0 - nakagami_cdf(b.m_direct, 1.0, (t / gain).sqrt())
}

/// Reflective-link coverage `Pr(γ_I > T)` given that at least one LoS RIS exists.
/// Zero when no LoS RIS can exist.
pub fn cov_reflective(xi: f64, t: f64, cfg: &SystemConfig, p: &AnalyticsParams) -> Result<f64> {
    let ps = prob_reflective(xi, p)?;
    cov_reflective_with(xi, t, &CoverageBudget::from_system(cfg)?, p, ps)
}

fn cov_reflective_with(xi: f64, t: f64, b: &CoverageBudget, p: &AnalyticsParams, ps: f64) -> Result<f64> {
    if ps <= 0.0 {
        return Ok(0.0);
    }
    if t <= 0.0 {
        return Ok(1.0);
    }
    let g = &b.cascade;
    let (mean, sd) = (g.mean(), g.std_dev());
    // Panels resolve the peak of the amplitude density up front.
    let mut points: Vec<f64> = [-12.0, -4.0, 0.0, 4.0, 12.0]
        .iter()
        .map(|k| (mean + k * sd).max(0.0))
        .collect();
    points.dedup();
    let mut err = None;
    let v = p.quad().integrate_over(
        |z| {
            let x = (b.k_reflect * z * z / t).powf(1.0 / b.alpha);
            match cond_cdf_eta(x, xi, 0.0, p) {
                Ok(f) => f * g.pdf(z),
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            }
        },
        &points,
    )?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok((v / ps).clamp(0.0, 1.0))
}

/// `P_cov|ξ(T) = Pr_Ad·P_d + Pr_AI·P_I`.
pub fn cond_coverage(xi: f64, t: f64, cfg: &SystemConfig, p: &AnalyticsParams) -> Result<f64> {
    cond_coverage_with(xi, t, &CoverageBudget::from_system(cfg)?, p)
}

fn cond_coverage_with(xi: f64, t: f64, b: &CoverageBudget, p: &AnalyticsParams) -> Result<f64> {
    let los = p.los.prob(xi);
    let ps = prob_reflective(xi, p)?;
    let direct = if los > 0.0 { cov_direct_with(xi, t, b) } else { 0.0 };
    let refl = if los < 1.0 { cov_reflective_with(xi, t, b, p, ps)? } else { 0.0 };
    Ok((los * direct + (1.0 - los) * ps * refl).clamp(0.0, 1.0))
}

/// Splits `[0, R]` at the LoS-certainty radius, where the integrands have a kink.
fn radial_pieces(r: f64) -> Vec<(f64, f64)> {
    if r > LOS_CERTAIN_RADIUS {
        vec![(0.0, LOS_CERTAIN_RADIUS), (LOS_CERTAIN_RADIUS, r)]
    } else {
        vec![(0.0, r)]
    }
}

/// Cell-ergodic coverage: `P_cov|ξ` averaged over the user density.
pub fn ergodic_coverage(t: f64, cfg: &SystemConfig, p: &AnalyticsParams) -> Result<f64> {
    p.validate()?;
    let b = CoverageBudget::from_system(cfg)?;
    let quad = p.quad();
    let mut err = None;
    let (mut num, mut den) = (0.0, 0.0);
    for (lo, hi) in radial_pieces(p.radius) {
        num += quad.integrate(
            |xi| {
                let w = p.user_density.at(xi) * 2.0 * PI * xi;
                if w == 0.0 {
                    return 0.0;
                }
                match cond_coverage_with(xi, t, &b, p) {
                    Ok(c) => c * w,
                    Err(e) => {
                        err.get_or_insert(e);
                        0.0
                    }
                }
            },
            lo,
            hi,
        )?;
        den += quad.integrate(|xi| p.user_density.at(xi) * 2.0 * PI * xi, lo, hi)?;
    }
    if let Some(e) = err {
        return Err(e);
    }
    if !(den > 0.0) {
        return Err(Error::invalid("user density has zero mass in the cell"));
    }
    Ok((num / den).clamp(0.0, 1.0))
}

/// Ergodic rate (bits/s) of a user at `xi` with the SINR capped at `t_cap`:
/// `∫₀^{BW log₂(1+T)} P_cov|ξ(2^{τ/BW} − 1) dτ`.
pub fn ergodic_rate(xi: f64, t_cap: f64, cfg: &SystemConfig, p: &AnalyticsParams) -> Result<f64> {
    p.validate()?;
    if !(t_cap > 0.0) {
        return Err(Error::invalid(format!("rate cap must be positive, got {t_cap}")));
    }
    let b = CoverageBudget::from_system(cfg)?;
    let bw = cfg.bandwidth_hz;
    let mut err = None;
    let v = p.quad().integrate(
        |u| {
            // u = τ/BW in bits/s/Hz.
            match cond_coverage_with(xi, u.exp2() - 1.0, &b, p) {
                Ok(c) => c,
                Err(e) => {
                    err.get_or_insert(e);
                    0.0
                }
            }
        },
        0.0,
        (1.0 + t_cap).log2(),
    )?;
    if let Some(e) = err {
        return Err(e);
    }
    Ok(bw * v)
}

/// Sum of ergodic rates over users at the given distances.
pub fn sum_rate(distances: &[f64], t_cap: f64, cfg: &SystemConfig, p: &AnalyticsParams) -> Result<f64> {
    distances.iter().map(|&xi| ergodic_rate(xi, t_cap, cfg, p)).sum()
}
