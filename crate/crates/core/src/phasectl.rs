//! RIS phase-shift control: optimal (SVD), sub-optimal (randomized QB),
//! quantized and random designs, the end-to-end channel and the MRT precoder.
//!
//! Every design maximizes `‖E ω‖²` with `E = [H_1 ∘ G_1, …, H_K ∘ G_K]` the
//! stacked column-wise Khatri-Rao product and `ω` the unit-modulus reflection
//! vector. For a single-antenna chain (`E` is one row) the SVD recipe reduces
//! to co-phasing, which is used directly.

use std::f64::consts::{PI, TAU};
use std::fmt;
use std::str::FromStr;

use rand::Rng;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::{eig_hermitian, randomized_qb, svd_with, uniform_phase, ComplexMatrix, SvdJob, C64};

/// Phase-control scheme, named in configs as `optimal`, `suboptimal`,
/// `quantized:<bits>`, `random` or `era`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash)]
pub enum Scheme {
    Optimal,
    Suboptimal,
    Quantized(u32),
    Random,
    /// Exhaustive RIS-aided: every LoS RIS is associated and jointly optimized.
    Era,
}

impl fmt::Display for Scheme {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Scheme::Optimal => f.write_str("optimal"),
            Scheme::Suboptimal => f.write_str("suboptimal"),
            Scheme::Quantized(b) => write!(f, "quantized:{b}"),
            Scheme::Random => f.write_str("random"),
            Scheme::Era => f.write_str("era"),
        }
    }
}

impl FromStr for Scheme {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "optimal" => Ok(Scheme::Optimal),
            "suboptimal" => Ok(Scheme::Suboptimal),
            "random" => Ok(Scheme::Random),
            "era" => Ok(Scheme::Era),
            other => {
                let bits = other
                    .strip_prefix("quantized:")
                    .ok_or_else(|| Error::invalid(format!("unknown scheme `{other}`")))?;
                let bits: u32 = bits
                    .parse()
                    .map_err(|_| Error::invalid(format!("bad quantizer bit count in `{other}`")))?;
                if !(1..=30).contains(&bits) {
                    return Err(Error::invalid(format!("quantizer bits must be in 1..=30, got {bits}")));
                }
                Ok(Scheme::Quantized(bits))
            }
        }
    }
}

impl Serialize for Scheme {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Scheme {
    fn deserialize<D: serde::Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// How a plan was produced.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum PlanKind {
    Optimal,
    Suboptimal,
    Quantized(u32),
    Random,
}

/// Per-RIS phase vectors, each entry in `[0, 2π)`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct PhasePlan {
    pub phases: Vec<Vec<f64>>,
    pub kind: PlanKind,
    /// The cascade was identically zero; phases are all zero.
    pub degenerate: bool,
    /// The sub-optimal design fell back to the exact SVD.
    pub fallback: bool,
}

impl PhasePlan {
    fn new(phases: Vec<Vec<f64>>, kind: PlanKind) -> Self {
        Self {
            phases,
            kind,
            degenerate: false,
            fallback: false,
        }
    }

    pub fn total_elements(&self) -> usize {
        self.phases.iter().map(Vec::len).sum()
    }

    /// Stacked reflection vector `ω`.
    pub fn coefficients(&self) -> Vec<C64> {
        self.phases
            .iter()
            .flatten()
            .map(|&t| C64::from_polar(1.0, t))
            .collect()
    }

    /// Splits a flat phase vector into per-RIS blocks of the given lengths.
    fn from_flat(flat: Vec<f64>, lens: &[usize], kind: PlanKind) -> Self {
        let mut out = Vec::with_capacity(lens.len());
        let mut it = flat.into_iter();
        for &l in lens {
            out.push(it.by_ref().take(l).collect());
        }
        Self::new(out, kind)
    }
}

/// Wraps an angle into `[0, 2π)`.
pub fn wrap_phase(t: f64) -> f64 {
    let w = t.rem_euclid(TAU);
    if w >= TAU {
        0.0
    } else {
        w
    }
}

/// The effective `N_u × N_b` channel through the listed RISs (plus `H_d` if given).
#[derive(Debug, Clone)]
pub struct E2eChannel {
    pub matrix: ComplexMatrix,
    pub contributing_ris_indices: Vec<usize>,
}

fn check_pairs(h_list: &[ComplexMatrix], g_list: &[ComplexMatrix]) -> Result<()> {
    if h_list.is_empty() || h_list.len() != g_list.len() {
        return Err(Error::invalid(format!(
            "need matching nonempty channel lists, got {} and {}",
            h_list.len(),
            g_list.len()
        )));
    }
    let (nb, nu) = (h_list[0].rows(), g_list[0].rows());
    for (h, g) in h_list.iter().zip(g_list) {
        if h.cols() != g.cols() || h.rows() != nb || g.rows() != nu {
            return Err(Error::invalid(format!(
                "inconsistent RIS channel shapes {:?} / {:?}",
                h.shape(),
                g.shape()
            )));
        }
    }
    Ok(())
}

/// `Σ_n Σ_l g_{n,l} e^{jθ_{nl}} h_{n,l}ᵀ (+ H_d)`.
pub fn e2e_channel(
    h_list: &[ComplexMatrix],
    g_list: &[ComplexMatrix],
    plan: &PhasePlan,
    h_d: Option<&ComplexMatrix>,
) -> Result<E2eChannel> {
    check_pairs(h_list, g_list)?;
    if plan.phases.len() != h_list.len() {
        return Err(Error::invalid(format!(
            "plan covers {} RISs, channels list {}",
            plan.phases.len(),
            h_list.len()
        )));
    }
    let (nb, nu) = (h_list[0].rows(), g_list[0].rows());
    let mut out = match h_d {
        Some(d) if d.shape() != (nu, nb) => {
            return Err(Error::invalid(format!("H_d is {:?}, expected {:?}", d.shape(), (nu, nb))))
        }
        Some(d) => d.clone(),
        None => ComplexMatrix::zeros(nu, nb),
    };
    for ((h, g), phases) in h_list.iter().zip(g_list).zip(&plan.phases) {
        if phases.len() != h.cols() {
            return Err(Error::invalid(format!(
                "plan has {} phases for a {}-element RIS",
                phases.len(),
                h.cols()
            )));
        }
        for (l, &t) in phases.iter().enumerate() {
            let w = C64::from_polar(1.0, t);
            for u in 0..nu {
                let gw = g[(u, l)] * w;
                for b in 0..nb {
                    out[(u, b)] += gw * h[(b, l)];
                }
            }
        }
    }
    Ok(E2eChannel {
        matrix: out,
        contributing_ris_indices: (0..h_list.len()).collect(),
    })
}

/// Stacked Khatri-Rao matrix `[H_1 ∘ G_1, …, H_K ∘ G_K]`.
pub fn cascade_matrix(h_list: &[ComplexMatrix], g_list: &[ComplexMatrix]) -> Result<ComplexMatrix> {
    check_pairs(h_list, g_list)?;
    let blocks = h_list
        .iter()
        .zip(g_list)
        .map(|(h, g)| ComplexMatrix::khatri_rao(h, g))
        .collect::<Result<Vec<_>>>()?;
    ComplexMatrix::hstack(&blocks.iter().collect::<Vec<_>>())
}

/// `‖E ω‖²`, the received cascade power per unit transmit power.
pub fn objective(h_list: &[ComplexMatrix], g_list: &[ComplexMatrix], plan: &PhasePlan) -> Result<f64> {
    Ok(e2e_channel(h_list, g_list, plan, None)?.matrix.frobenius_norm_sqr())
}

/// `‖E ω‖²` for a precomputed cascade matrix.
pub fn cascade_objective(e: &ComplexMatrix, plan: &PhasePlan) -> Result<f64> {
    let w = plan.coefficients();
    if w.len() != e.cols() {
        return Err(Error::invalid("plan length does not match the cascade matrix"));
    }
    Ok(e.mul_vec(&w)?.iter().map(|z| z.norm_sqr()).sum())
}

fn lens(h_list: &[ComplexMatrix]) -> Vec<usize> {
    h_list.iter().map(|h| h.cols()).collect()
}

fn phases_of(v: &[C64]) -> Vec<f64> {
    v.iter().map(|z| wrap_phase(z.arg())).collect()
}

fn zero_plan(lens: &[usize], kind: PlanKind) -> PhasePlan {
    let mut p = PhasePlan::from_flat(vec![0.0; lens.iter().sum()], lens, kind);
    p.degenerate = true;
    p
}

/// Phases of the dominant right singular vector of `e`.
fn svd_phases(e: &ComplexMatrix) -> Result<Vec<f64>> {
    if e.rows() == 1 {
        // v₁ ∝ conj(e): co-phase every term.
        return Ok(e.row(0).iter().map(|z| wrap_phase(-z.arg())).collect());
    }
    let s = svd_with(e, SvdJob::RIGHT_ONLY)?;
    Ok(phases_of(&s.right_vectors.column(0)))
}

/// Single-RIS optimal design.
pub fn optimal_phases(h: &ComplexMatrix, g: &ComplexMatrix) -> Result<PhasePlan> {
    optimal_phases_multi(std::slice::from_ref(h), std::slice::from_ref(g))
}

/// Joint design over several RISs: the SVD recipe on the stacked cascade,
/// laid out block-diagonally.
pub fn optimal_phases_multi(h_list: &[ComplexMatrix], g_list: &[ComplexMatrix]) -> Result<PhasePlan> {
    let e = cascade_matrix(h_list, g_list)?;
    optimal_from_cascade(&e, &lens(h_list))
}

pub(crate) fn optimal_from_cascade(e: &ComplexMatrix, lens: &[usize]) -> Result<PhasePlan> {
    if e.frobenius_norm_sqr() == 0.0 {
        return Ok(zero_plan(lens, PlanKind::Optimal));
    }
    Ok(PhasePlan::from_flat(svd_phases(e)?, lens, PlanKind::Optimal))
}

/// Sub-optimal design: randomized QB of the stacked cascade, eigendecomposition
/// of the small Gram matrix `B Bᴴ = U Σ Uᴴ`, and `v₁ᴴ = σ₁^{-1/2} u₁ᴴ B`.
pub fn suboptimal_phases<R: Rng + ?Sized>(
    h_list: &[ComplexMatrix],
    g_list: &[ComplexMatrix],
    block: usize,
    tol: f64,
    rng: &mut R,
) -> Result<PhasePlan> {
    let e = cascade_matrix(h_list, g_list)?;
    suboptimal_from_cascade(&e, &lens(h_list), block, tol, rng)
}

pub(crate) fn suboptimal_from_cascade<R: Rng + ?Sized>(
    e: &ComplexMatrix,
    lens: &[usize],
    block: usize,
    tol: f64,
    rng: &mut R,
) -> Result<PhasePlan> {
    if e.frobenius_norm_sqr() == 0.0 {
        return Ok(zero_plan(lens, PlanKind::Suboptimal));
    }
    if e.rows() == 1 {
        // A single row is its own rank-1 factorization.
        return Ok(PhasePlan::from_flat(svd_phases(e)?, lens, PlanKind::Suboptimal));
    }
    let qb = randomized_qb(e, block, tol, rng)?;
    if qb.saturated || qb.tau == 0 {
        let mut plan = PhasePlan::from_flat(svd_phases(e)?, lens, PlanKind::Suboptimal);
        plan.fallback = true;
        return Ok(plan);
    }
    let gram = qb.b.matmul(&qb.b.adjoint())?;
    let eig = eig_hermitian(&gram)?;
    let u1 = eig.vectors.column(0);
    let lambda = eig.values[0].max(f64::MIN_POSITIVE);
    let scale = lambda.sqrt().recip();
    // v₁ = Bᴴ u₁ / σ₁; only its phases matter, the scale is kept for clarity.
    let v1: Vec<C64> = (0..qb.b.cols())
        .map(|c| (0..qb.b.rows()).map(|r| qb.b[(r, c)].conj() * u1[r]).sum::<C64>() * scale)
        .collect();
    Ok(PhasePlan::from_flat(phases_of(&v1), lens, PlanKind::Suboptimal))
}

/// Snaps every phase to the nearest point of the `2^bits` uniform grid.
pub fn quantize_phases(plan: &PhasePlan, bits: u32) -> Result<PhasePlan> {
    if !(1..=30).contains(&bits) {
        return Err(Error::invalid(format!("quantizer bits must be in 1..=30, got {bits}")));
    }
    let q = (1u64 << bits) as f64;
    let step = TAU / q;
    let phases = plan
        .phases
        .iter()
        .map(|v| {
            v.iter()
                .map(|&t| {
                    let k = (wrap_phase(t) / step).round() % q;
                    k * step
                })
                .collect()
        })
        .collect();
    Ok(PhasePlan {
        phases,
        kind: PlanKind::Quantized(bits),
        degenerate: plan.degenerate,
        fallback: plan.fallback,
    })
}

/// i.i.d. uniform phases.
pub fn random_phases<R: Rng + ?Sized>(lens: &[usize], rng: &mut R) -> PhasePlan {
    let phases = lens
        .iter()
        .map(|&l| (0..l).map(|_| uniform_phase(rng)).collect())
        .collect();
    PhasePlan::new(phases, PlanKind::Random)
}

/// Frobenius-normalized maximum-ratio precoder for the effective channel.
pub fn mrt_beamformer(e2e: &E2eChannel) -> Result<ComplexMatrix> {
    let norm = e2e.matrix.frobenius_norm();
    if !(norm > 0.0) || !norm.is_finite() {
        return Err(Error::invalid("MRT needs a nonzero finite channel"));
    }
    Ok(e2e.matrix.scale_real(norm.recip()))
}

/// Received power `|⟨W, H⟩|²` of a precoder `W` on channel `H` (Frobenius inner product).
pub fn received_power(channel: &ComplexMatrix, w: &ComplexMatrix) -> Result<f64> {
    if channel.shape() != w.shape() {
        return Err(Error::invalid("precoder shape differs from the channel"));
    }
    let ip: C64 = channel
        .as_slice()
        .iter()
        .zip(w.as_slice())
        .map(|(h, w)| w.conj() * h)
        .sum();
    Ok(ip.norm_sqr())
}

/// Scheme parameters needed to produce a plan from a cascade.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct PhaseController {
    pub scheme: Scheme,
    pub qb_block: usize,
    pub qb_tol: f64,
}

impl PhaseController {
    pub fn new(scheme: Scheme) -> Self {
        Self {
            scheme,
            qb_block: DEFAULT_QB_BLOCK,
            qb_tol: DEFAULT_QB_TOL,
        }
    }

    /// Designs phases for the stacked cascade `e` (blocks of `lens` columns).
    /// The quantized scheme snaps the optimal plan.
    pub fn design<R: Rng + ?Sized>(&self, e: &ComplexMatrix, lens: &[usize], rng: &mut R) -> Result<PhasePlan> {
        match self.scheme {
            Scheme::Optimal | Scheme::Era => optimal_from_cascade(e, lens),
            Scheme::Suboptimal => suboptimal_from_cascade(e, lens, self.qb_block, self.qb_tol, rng),
            Scheme::Quantized(bits) => quantize_phases(&optimal_from_cascade(e, lens)?, bits),
            Scheme::Random => Ok(random_phases(lens, rng)),
        }
    }
}

pub const DEFAULT_QB_BLOCK: usize = 8;
pub const DEFAULT_QB_TOL: f64 = 0.35;

/// Largest phase error a `bits`-bit quantizer can introduce.
pub fn max_quantization_error(bits: u32) -> f64 {
    PI / (1u64 << bits) as f64
}
