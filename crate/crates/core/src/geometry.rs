//! Deployments inside a disk cell: PPP and Thomas-cluster RIS layouts, uniform
//! users, and the 3GPP UMi line-of-sight probability used for thinning.

use std::f64::consts::PI;

use rand::Rng;
use rand_distr::{Distribution, Normal};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::numerics::sample_poisson;

#[derive(Debug, Clone, Copy, PartialEq, Default, Serialize, Deserialize)]
pub struct Point2D {
    pub x: f64,
    pub y: f64,
}

impl Point2D {
    pub const ORIGIN: Point2D = Point2D { x: 0.0, y: 0.0 };

    pub fn new(x: f64, y: f64) -> Self {
        Self { x, y }
    }

    pub fn polar(r: f64, phi: f64) -> Self {
        Self::new(r * phi.cos(), r * phi.sin())
    }

    pub fn norm(&self) -> f64 {
        self.x.hypot(self.y)
    }

    pub fn distance(&self, other: &Point2D) -> f64 {
        (self.x - other.x).hypot(self.y - other.y)
    }
}

/// Thomas cluster process: Poisson parents, Poisson(`mean_per_cluster`)
/// offspring per parent, isotropic Gaussian scatter.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct PcpParams {
    pub parent_density: f64,
    pub mean_per_cluster: f64,
    pub scatter_std: f64,
}

impl PcpParams {
    /// Parent density chosen so the total intensity equals `total_density`.
    pub fn matching_intensity(total_density: f64, mean_per_cluster: f64, scatter_std: f64) -> Self {
        Self {
            parent_density: total_density / mean_per_cluster,
            mean_per_cluster,
            scatter_std,
        }
    }

    fn validate(&self) -> Result<()> {
        let ok = self.parent_density >= 0.0
            && self.mean_per_cluster > 0.0
            && self.scatter_std >= 0.0
            && self.parent_density.is_finite()
            && self.scatter_std.is_finite();
        if ok {
            Ok(())
        } else {
            Err(Error::invalid(format!("invalid cluster parameters {self:?}")))
        }
    }
}

fn check_radius(radius: f64) -> Result<()> {
    if radius > 0.0 && radius.is_finite() {
        Ok(())
    } else {
        Err(Error::invalid(format!("cell radius must be positive, got {radius}")))
    }
}

/// A point uniform on the disk of the given radius (radius by the √U transform).
pub fn uniform_in_disk<R: Rng + ?Sized>(radius: f64, rng: &mut R) -> Point2D {
    let r = radius * rng.random::<f64>().sqrt();
    Point2D::polar(r, rng.random::<f64>() * 2.0 * PI)
}

pub fn sample_fixed_disk<R: Rng + ?Sized>(count: usize, radius: f64, rng: &mut R) -> Result<Vec<Point2D>> {
    check_radius(radius)?;
    Ok((0..count).map(|_| uniform_in_disk(radius, rng)).collect())
}

pub fn sample_ppp_disk<R: Rng + ?Sized>(density: f64, radius: f64, rng: &mut R) -> Result<Vec<Point2D>> {
    check_radius(radius)?;
    if !(density >= 0.0) || !density.is_finite() {
        return Err(Error::invalid(format!("density must be finite and >= 0, got {density}")));
    }
    let n = sample_poisson(density * PI * radius * radius, rng)? as usize;
    sample_fixed_disk(n, radius, rng)
}

/// Offspring that land outside the disk are redrawn around the same parent.
pub fn sample_pcp_disk<R: Rng + ?Sized>(params: &PcpParams, radius: f64, rng: &mut R) -> Result<Vec<Point2D>> {
    params.validate()?;
    let parents = sample_ppp_disk(params.parent_density, radius, rng)?;
    let scatter = if params.scatter_std > 0.0 {
        Some(Normal::new(0.0, params.scatter_std).map_err(|e| Error::invalid(e.to_string()))?)
    } else {
        None
    };
    let mut out = Vec::new();
    for p in parents {
        let k = sample_poisson(params.mean_per_cluster, rng)?;
        for _ in 0..k {
            let child = match &scatter {
                None => p,
                Some(normal) => loop {
                    let c = Point2D::new(p.x + normal.sample(rng), p.y + normal.sample(rng));
                    if c.norm() <= radius {
                        break c;
                    }
                },
            };
            out.push(child);
        }
    }
    Ok(out)
}

/// 3GPP UMi line-of-sight probability at ground distance `d2d` for a terminal at height `h_ut`.
pub fn los_probability(d2d: f64, h_ut: f64) -> Result<f64> {
    if h_ut > 23.0 {
        return Err(Error::invalid(format!(
            "terminal height {h_ut} m is outside the LoS model (<= 23 m)"
        )));
    }
    if !(d2d >= 0.0) {
        return Err(Error::invalid(format!("distance must be >= 0, got {d2d}")));
    }
    Ok(los_probability_unchecked(d2d, h_ut))
}

/// `los_probability` for callers that have already validated `h_ut`.
#[inline]
pub fn los_probability_unchecked(d2d: f64, h_ut: f64) -> f64 {
    if d2d <= 18.0 {
        return 1.0;
    }
    let base = 18.0 / d2d + (-d2d / 63.0).exp() * (1.0 - 18.0 / d2d);
    let c = height_factor(h_ut);
    let boost = if c == 0.0 {
        1.0
    } else {
        1.0 + c * 1.25 * (d2d / 100.0).powi(3) * (-d2d / 150.0).exp()
    };
    (base * boost).clamp(0.0, 1.0)
}

/// C̄(h_ut): zero up to 13 m, `((h − 13)/10)^1.5` above.
pub fn height_factor(h_ut: f64) -> f64 {
    if h_ut <= 13.0 {
        0.0
    } else {
        ((h_ut - 13.0) / 10.0).powf(1.5)
    }
}

/// Independent Bernoulli marks with location-dependent retention probability.
pub fn thin_with<R: Rng + ?Sized>(
    points: &[Point2D],
    observer: Point2D,
    mut prob: impl FnMut(f64) -> f64,
    rng: &mut R,
) -> Vec<bool> {
    points
        .iter()
        .map(|p| rng.random::<f64>() < prob(p.distance(&observer)))
        .collect()
}

pub fn thin_los<R: Rng + ?Sized>(
    points: &[Point2D],
    observer: Point2D,
    h_ut: f64,
    rng: &mut R,
) -> Result<Vec<bool>> {
    los_probability(0.0, h_ut)?;
    Ok(thin_with(points, observer, |d| los_probability_unchecked(d, h_ut), rng))
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
#[serde(tag = "kind", rename_all = "snake_case")]
pub enum DeploymentModel {
    /// Poisson count with mean λπR².
    Ppp,
    /// Thomas cluster process with total intensity λ.
    Pcp { mean_per_cluster: f64, scatter_std: f64 },
    /// Exactly round(λπR²) RISs.
    FixedCount,
}

pub fn sample_ris_points<R: Rng + ?Sized>(
    model: &DeploymentModel,
    density: f64,
    radius: f64,
    rng: &mut R,
) -> Result<Vec<Point2D>> {
    match *model {
        DeploymentModel::Ppp => sample_ppp_disk(density, radius, rng),
        DeploymentModel::Pcp {
            mean_per_cluster,
            scatter_std,
        } => sample_pcp_disk(
            &PcpParams::matching_intensity(density, mean_per_cluster, scatter_std),
            radius,
            rng,
        ),
        DeploymentModel::FixedCount => {
            let n = (density * PI * radius * radius).round() as usize;
            sample_fixed_disk(n, radius, rng)
        }
    }
}

pub const DEPLOYMENT_FORMAT_VERSION: u32 = 1;

/// One spatial realization: BS at the origin, RISs and users in the disk, and
/// the per-user LoS state of the direct link and of every RIS→user link.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Deployment {
    pub version: u32,
    pub cell_radius: f64,
    pub bs: Point2D,
    pub ris_points: Vec<Point2D>,
    pub user_points: Vec<Point2D>,
    /// `ris_los[u][n]`: whether RIS `n` is in LoS of user `u`.
    pub ris_los: Vec<Vec<bool>>,
    /// Whether the BS→user link of user `u` is LoS.
    pub direct_los: Vec<bool>,
}

impl Deployment {
    pub fn sample<R: Rng + ?Sized>(
        model: &DeploymentModel,
        ris_density: f64,
        n_users: usize,
        radius: f64,
        h_ut: f64,
        rng: &mut R,
    ) -> Result<Self> {
        let ris_points = sample_ris_points(model, ris_density, radius, rng)?;
        let user_points = sample_fixed_disk(n_users, radius, rng)?;
        Self::from_points(ris_points, user_points, radius, h_ut, rng)
    }

    /// Marks LoS states for given positions.
    pub fn from_points<R: Rng + ?Sized>(
        ris_points: Vec<Point2D>,
        user_points: Vec<Point2D>,
        radius: f64,
        h_ut: f64,
        rng: &mut R,
    ) -> Result<Self> {
        check_radius(radius)?;
        let tol = radius * (1.0 + 1e-12);
        if ris_points.iter().chain(&user_points).any(|p| !(p.norm() <= tol)) {
            return Err(Error::invalid("deployment point outside the cell"));
        }
        let mut ris_los = Vec::with_capacity(user_points.len());
        let mut direct_los = Vec::with_capacity(user_points.len());
        for u in &user_points {
            ris_los.push(thin_los(&ris_points, *u, h_ut, rng)?);
            direct_los.push(rng.random::<f64>() < los_probability_unchecked(u.norm(), h_ut));
        }
        Ok(Self {
            version: DEPLOYMENT_FORMAT_VERSION,
            cell_radius: radius,
            bs: Point2D::ORIGIN,
            ris_points,
            user_points,
            ris_los,
            direct_los,
        })
    }

    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("deployment serializes")
    }

    pub fn from_json(s: &str) -> Result<Self> {
        let d: Deployment = serde_json::from_str(s).map_err(|e| Error::invalid(e.to_string()))?;
        if d.version != DEPLOYMENT_FORMAT_VERSION {
            return Err(Error::invalid(format!("unsupported deployment version {}", d.version)));
        }
        if d.ris_los.len() != d.user_points.len()
            || d.direct_los.len() != d.user_points.len()
            || d.ris_los.iter().any(|m| m.len() != d.ris_points.len())
        {
            return Err(Error::invalid("deployment LoS marks do not match point counts"));
        }
        Ok(d)
    }

    /// Indices of RISs in LoS of user `u`.
    pub fn los_ris(&self, u: usize) -> impl Iterator<Item = usize> + '_ {
        self.ris_los[u].iter().enumerate().filter(|(_, &m)| m).map(|(i, _)| i)
    }
}
