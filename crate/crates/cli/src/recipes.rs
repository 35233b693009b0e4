//! Desk-scale figure recipes: each one varies a single factor and writes the trend as CSV.
//!
//! Each recipe has a base configuration (the shared desk settings plus the
//! figure's fixed parameters) and a runner that sweeps the figure's axes and
//! writes one long-format CSV per curve family. User configuration and
//! overrides are layered on top of the base before the runner sees it.

use std::path::Path;

use multiris::channel::ChannelModel;
use multiris::mcsim::MetricMode;

use crate::config::{ConfigFile, ModelKind};
use crate::output::{num, write_table, OutputFile, Table};
use crate::run::{analytical_grid, monte_carlo, push_curve};
use crate::CliError;

/// Interferer power of the desk configurations, dBm. At the serving power,
/// every other user transmitting at once buries the reflective links, while
/// the analytical model treats the cell as noise-limited.
pub const DESK_INTERFERER_DBM: f64 = -20.0;

pub struct Recipe {
    pub name: &'static str,
    pub summary: &'static str,
    pub base: fn() -> ConfigFile,
    pub run: fn(&ConfigFile, &Path) -> Result<Vec<OutputFile>, CliError>,
}

pub const RECIPES: &[Recipe] = &[
    Recipe {
        name: "fig4",
        summary: "coverage vs threshold for several RIS densities",
        base: fig4_base,
        run: fig4,
    },
    Recipe {
        name: "fig5",
        summary: "coverage vs threshold for several UE antenna counts",
        base: fig5_base,
        run: fig5,
    },
    Recipe {
        name: "fig6",
        summary: "rate vs RIS density for several RIS sizes",
        base: fig6_base,
        run: rate_by_elements,
    },
    Recipe {
        name: "fig7",
        summary: "rate vs RIS density per phase-control scheme",
        base: fig7_base,
        run: fig7,
    },
    Recipe {
        name: "fig8",
        summary: "coverage vs threshold for several BS antenna patterns",
        base: pattern_base,
        run: fig8,
    },
    Recipe {
        name: "fig9",
        summary: "coverage vs RIS density for several BS antenna patterns",
        base: fig9_base,
        run: fig9,
    },
    Recipe {
        name: "fig10",
        summary: "analytical vs simulated coverage over RIS density",
        base: fig10_base,
        run: fig10,
    },
    Recipe {
        name: "fig11",
        summary: "PPP vs PCP deployments across cell radii and user counts",
        base: fig11_base,
        run: fig11,
    },
    Recipe {
        name: "fig13",
        summary: "rate vs RIS density up to saturation for several RIS sizes",
        base: fig13_base,
        run: rate_by_elements,
    },
];

pub fn find(name: &str) -> Result<&'static Recipe, CliError> {
    RECIPES.iter().find(|r| r.name == name).ok_or_else(|| CliError::UnknownRecipe {
        name: name.to_string(),
        available: RECIPES.iter().map(|r| r.name).collect::<Vec<_>>().join(", "),
    })
}

/// Shared desk settings: default system constants with reduced interferer power.
pub fn desk() -> ConfigFile {
    let mut c = ConfigFile::default();
    c.system.interferer_power_dbm = Some(DESK_INTERFERER_DBM);
    c
}

fn fig4_base() -> ConfigFile {
    let mut c = desk();
    c.system.n_users = 30;
    c.system.n_ue_antennas = 4;
    c.sweep.ris_densities = vec![1.5e-4, 1.5e-3, 5.5e-3];
    c
}

fn fig4(cfg: &ConfigFile, out: &Path) -> Result<Vec<OutputFile>, CliError> {
    let mut t = Table::new(&["ris_density", "threshold_db", "coverage", "ci"]);
    for &l in &cfg.sweep.ris_densities {
        let mut c = cfg.clone();
        c.deployment.ris_density = l;
        push_curve(&mut t, &[num(l)], &monte_carlo(&c)?.0);
    }
    Ok(vec![write_table(out, "fig4_coverage.csv", &t)?])
}

fn fig5_base() -> ConfigFile {
    let mut c = desk();
    c.system.n_users = 30;
    c.deployment.ris_density = 5.5e-3;
    c
}

pub const FIG5_UE_ANTENNAS: &[usize] = &[1, 4, 8];

fn fig5(cfg: &ConfigFile, out: &Path) -> Result<Vec<OutputFile>, CliError> {
    let mut t = Table::new(&["n_ue_antennas", "threshold_db", "coverage", "ci"]);
    for &n in FIG5_UE_ANTENNAS {
        let mut c = cfg.clone();
        c.system.n_ue_antennas = n;
        push_curve(&mut t, &[n.to_string()], &monte_carlo(&c)?.0);
    }
    Ok(vec![write_table(out, "fig5_coverage.csv", &t)?])
}

pub const FIG6_ELEMENTS: &[usize] = &[16, 64, 256];
pub const FIG13_ELEMENTS: &[usize] = &[64, 128, 256];

fn fig6_base() -> ConfigFile {
    let mut c = desk();
    c.sweep.ris_densities = vec![1.5e-4, 5e-4, 1.5e-3, 3e-3, 5.5e-3];
    c.sweep.trials = 500;
    c
}

fn fig13_base() -> ConfigFile {
    let mut c = desk();
    c.sweep.ris_densities = vec![1e-3, 3e-3, 5.5e-3, 8.5e-3, 1.2e-2];
    c.sweep.trials = 300;
    c
}

fn rate_by_elements(cfg: &ConfigFile, out: &Path) -> Result<Vec<OutputFile>, CliError> {
    // fig13 extends fig6 to the saturation region with larger surfaces.
    let (elements, name) = if cfg.sweep.ris_densities.iter().any(|&l| l > 6e-3) {
        (FIG13_ELEMENTS, "fig13_rate.csv")
    } else {
        (FIG6_ELEMENTS, "fig6_rate.csv")
    };
    let mut t = Table::new(&["ris_elements", "ris_density", "mean_rate_bps", "ci", "sum_rate_bps"]);
    for &n in elements {
        for &l in &cfg.sweep.ris_densities {
            let mut c = cfg.clone();
            c.system.ris_elements = n;
            c.deployment.ris_density = l;
            let r = monte_carlo(&c)?.1;
            t.push(vec![n.to_string(), num(l), num(r.mean_rate), num(r.mean_ci), num(r.sum_rate)]);
        }
    }
    Ok(vec![write_table(out, name, &t)?])
}

pub const FIG7_ELEMENTS: &[usize] = &[64, 256];

/// Full-matrix channels with a single-antenna UE: the cascade has rank above
/// one, so optimal and randomized low-rank control differ.
pub fn fig7_base() -> ConfigFile {
    let mut c = desk();
    c.system.channel_model = ChannelModel::Matrix;
    c.system.n_ue_antennas = 1;
    c.deployment.ris_density = 1e-3;
    c.sweep.ris_densities = vec![5e-4, 1e-3, 2e-3];
    c.sweep.trials = 50;
    c
}

fn fig7(cfg: &ConfigFile, out: &Path) -> Result<Vec<OutputFile>, CliError> {
    let mut t = Table::new(&["ris_elements", "ris_density", "scheme", "mean_rate_bps", "ci", "sum_rate_bps"]);
    for &n in FIG7_ELEMENTS {
        for &l in &cfg.sweep.ris_densities {
            let mut c = cfg.clone();
            c.system.ris_elements = n;
            c.deployment.ris_density = l;
            for r in multiris::mcsim::compare_schemes(&c.experiment()?, &c.scheme.compare)? {
                t.push(vec![
                    n.to_string(),
                    num(l),
                    r.scheme.to_string(),
                    num(r.rate.mean_rate),
                    num(r.rate.mean_ci),
                    num(r.rate.sum_rate),
                ]);
            }
        }
    }
    Ok(vec![write_table(out, "fig7_rate.csv", &t)?])
}

/// BS patterns `[M dB, m dB, ψ deg]` compared in fig8/fig9.
pub const TX_PATTERNS: &[[f64; 3]] = &[[10.0, -10.0, 60.0], [20.0, -10.0, 60.0], [20.0, -10.0, 30.0]];
pub const RX_PATTERN: [f64; 3] = [10.0, -10.0, 90.0];

pub fn pattern_base() -> ConfigFile {
    let mut c = desk();
    c.system.n_ue_antennas = 1;
    c.system.tx_pattern = Some(TX_PATTERNS[0]);
    c.system.rx_pattern = Some(RX_PATTERN);
    c.deployment.ris_density = 1.5e-3;
    c.sweep.thresholds_db = (-10..=35).step_by(5).map(f64::from).collect();
    c
}

fn pattern_cells(p: &[f64; 3]) -> Vec<String> {
    p.iter().map(|v| num(*v)).collect()
}

fn fig8(cfg: &ConfigFile, out: &Path) -> Result<Vec<OutputFile>, CliError> {
    let mut t = Table::new(&["tx_main_db", "tx_side_db", "tx_width_deg", "threshold_db", "coverage", "ci"]);
    for p in TX_PATTERNS {
        let mut c = cfg.clone();
        c.system.tx_pattern = Some(*p);
        push_curve(&mut t, &pattern_cells(p), &monte_carlo(&c)?.0);
    }
    Ok(vec![write_table(out, "fig8_coverage.csv", &t)?])
}

fn fig9_base() -> ConfigFile {
    let mut c = pattern_base();
    c.sweep.thresholds_db = vec![10.0];
    c.sweep.ris_densities = vec![5e-4, 1e-3, 2e-3, 3e-3, 5e-3];
    c
}

fn fig9(cfg: &ConfigFile, out: &Path) -> Result<Vec<OutputFile>, CliError> {
    let mut t = Table::new(&[
        "tx_main_db",
        "tx_side_db",
        "tx_width_deg",
        "ris_density",
        "threshold_db",
        "coverage",
        "ci",
    ]);
    for p in TX_PATTERNS {
        for &l in &cfg.sweep.ris_densities {
            let mut c = cfg.clone();
            c.system.tx_pattern = Some(*p);
            c.deployment.ris_density = l;
            let mut lead = pattern_cells(p);
            lead.push(num(l));
            push_curve(&mut t, &lead, &monte_carlo(&c)?.0);
        }
    }
    Ok(vec![write_table(out, "fig9_coverage.csv", &t)?])
}

/// Interference-free, direct-else-reflective association: the setting the
/// analytical coverage describes.
pub fn fig10_base() -> ConfigFile {
    let mut c = pattern_base();
    c.scheme.interference = false;
    c.scheme.metric = MetricMode::Exclusive;
    c.sweep.thresholds_db = vec![0.0, 10.0];
    c.analytics.thresholds_db = vec![0.0, 10.0];
    c.sweep.trials = 2000;
    c
}

fn fig10(cfg: &ConfigFile, out: &Path) -> Result<Vec<OutputFile>, CliError> {
    let thresholds = &cfg.analytics.thresholds_db;
    let grid: Vec<(f64, f64)> = cfg
        .sweep
        .ris_densities
        .iter()
        .flat_map(|&l| thresholds.iter().map(move |&t| (l, t)))
        .collect();
    let analytical = analytical_grid(cfg, &grid)?;
    let mut t = Table::new(&["ris_density", "threshold_db", "analytical", "simulated", "ci"]);
    for (i, &l) in cfg.sweep.ris_densities.iter().enumerate() {
        let mut c = cfg.clone();
        c.deployment.ris_density = l;
        c.sweep.thresholds_db = thresholds.clone();
        let sim = monte_carlo(&c)?.0;
        for (j, th) in thresholds.iter().enumerate() {
            t.push(vec![
                num(l),
                num(*th),
                num(analytical[i * thresholds.len() + j]),
                num(sim.coverage[j]),
                num(sim.ci_halfwidth[j]),
            ]);
        }
    }
    Ok(vec![write_table(out, "fig10_coverage.csv", &t)?])
}

pub const FIG11_RADII: &[f64] = &[100.0, 150.0];
pub const FIG11_USERS: &[usize] = &[10, 30];

fn fig11_base() -> ConfigFile {
    let mut c = desk();
    c.system.n_ue_antennas = 1;
    c.deployment.ris_density = 5.5e-3;
    c.deployment.mean_per_cluster = 3.0;
    c.sweep.trials = 300;
    c
}

fn fig11(cfg: &ConfigFile, out: &Path) -> Result<Vec<OutputFile>, CliError> {
    let mut t = Table::new(&["deployment", "cell_radius_m", "n_users", "threshold_db", "coverage", "ci"]);
    for (model, label) in [(ModelKind::Ppp, "ppp"), (ModelKind::Pcp, "pcp")] {
        for &r in FIG11_RADII {
            for &u in FIG11_USERS {
                let mut c = cfg.clone();
                c.deployment.model = model;
                c.system.cell_radius_m = r;
                c.system.n_users = u;
                push_curve(
                    &mut t,
                    &[label.to_string(), num(r), u.to_string()],
                    &monte_carlo(&c)?.0,
                );
            }
        }
    }
    Ok(vec![write_table(out, "fig11_coverage.csv", &t)?])
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn every_recipe_base_validates() {
        for r in RECIPES {
            (r.base)().validate().unwrap_or_else(|e| panic!("{}: {e}", r.name));
        }
    }

    #[test]
    fn unknown_recipe_lists_the_available_ones() {
        let err = find("fig12").err().unwrap().to_string();
        assert!(err.contains("fig4") && err.contains("fig13"), "{err}");
    }
}
