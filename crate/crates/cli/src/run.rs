//! The `simulate`, `analyze` and `compare` commands.

use std::path::Path;

use multiris::analytics::ergodic_coverage;
use multiris::channel::db_to_linear;
use multiris::mcsim::{compare_schemes, CoverageCurve, Experiment, RateSummary};
use multiris::numerics::stats::paired_greater_p_value;
use rayon::prelude::*;

use crate::config::ConfigFile;
use crate::output::{num, write_table, OutputFile, Table};
use crate::CliError;

/// Runs the Monte Carlo experiment described by `cfg`.
pub fn monte_carlo(cfg: &ConfigFile) -> Result<(CoverageCurve, RateSummary), CliError> {
    let e = Experiment::new(cfg.experiment()?)?;
    let outcomes = e.run()?;
    Ok(e.summarize(&outcomes))
}

/// Appends one row per threshold, after the given leading cells.
pub fn push_curve(table: &mut Table, lead: &[String], curve: &CoverageCurve) {
    for i in 0..curve.threshold_db.len() {
        let mut row = lead.to_vec();
        row.extend([num(curve.threshold_db[i]), num(curve.coverage[i]), num(curve.ci_halfwidth[i])]);
        table.push(row);
    }
}

pub fn simulate(cfg: &ConfigFile, out: &Path) -> Result<Vec<OutputFile>, CliError> {
    let (curve, rate) = monte_carlo(cfg)?;
    let mut cov = Table::new(&["threshold_db", "coverage", "ci"]);
    push_curve(&mut cov, &[], &curve);
    let mut rt = Table::new(&["user", "rate_bps"]);
    for (u, r) in rate.per_user.iter().enumerate() {
        rt.push(vec![u.to_string(), num(*r)]);
    }
    rt.push(vec!["mean".into(), num(rate.mean_rate)]);
    rt.push(vec!["sum".into(), num(rate.sum_rate)]);
    Ok(vec![write_table(out, "coverage.csv", &cov)?, write_table(out, "rate.csv", &rt)?])
}

/// Analytical ergodic coverage at each `(density, threshold_db)` pair, in order.
pub fn analytical_grid(cfg: &ConfigFile, points: &[(f64, f64)]) -> Result<Vec<f64>, CliError> {
    let system = cfg.system.resolve()?;
    points
        .par_iter()
        .map(|&(lambda, t)| {
            let p = cfg.analytics(lambda)?;
            Ok(ergodic_coverage(db_to_linear(t), &system, &p)?)
        })
        .collect()
}

pub fn analyze(cfg: &ConfigFile, out: &Path) -> Result<Vec<OutputFile>, CliError> {
    cfg.analytics(cfg.deployment.ris_density)?;
    let thresholds = &cfg.analytics.thresholds_db;
    let grid: Vec<(f64, f64)> = cfg
        .sweep
        .ris_densities
        .iter()
        .flat_map(|&l| thresholds.iter().map(move |&t| (l, t)))
        .collect();
    let values = analytical_grid(cfg, &grid)?;
    let mut header = vec!["ris_density".to_string()];
    header.extend(thresholds.iter().map(|t| format!("coverage_{t}db")));
    let mut dens = Table {
        header,
        rows: Vec::new(),
    };
    for (i, l) in cfg.sweep.ris_densities.iter().enumerate() {
        let mut row = vec![num(*l)];
        row.extend(values[i * thresholds.len()..(i + 1) * thresholds.len()].iter().map(|v| num(*v)));
        dens.push(row);
    }

    let lambda = cfg.deployment.ris_density;
    let curve_points: Vec<(f64, f64)> = cfg.sweep.thresholds_db.iter().map(|&t| (lambda, t)).collect();
    let curve = analytical_grid(cfg, &curve_points)?;
    let mut cov = Table::new(&["threshold_db", "coverage"]);
    for (t, c) in cfg.sweep.thresholds_db.iter().zip(curve) {
        cov.push(vec![num(*t), num(c)]);
    }
    Ok(vec![
        write_table(out, "analytical_density.csv", &dens)?,
        write_table(out, "analytical_coverage.csv", &cov)?,
    ])
}

pub fn compare(cfg: &ConfigFile, out: &Path) -> Result<Vec<OutputFile>, CliError> {
    let results = compare_schemes(&cfg.experiment()?, &cfg.scheme.compare)?;
    let mut rate = Table::new(&["scheme", "mean_rate_bps", "ci", "sum_rate_bps", "p_greater_than_next"]);
    for (i, r) in results.iter().enumerate() {
        let p = results
            .get(i + 1)
            .map(|next| num(paired_greater_p_value(&r.rate_samples, &next.rate_samples)))
            .unwrap_or_default();
        rate.push(vec![
            r.scheme.to_string(),
            num(r.rate.mean_rate),
            num(r.rate.mean_ci),
            num(r.rate.sum_rate),
            p,
        ]);
    }
    let mut cov = Table::new(&["scheme", "threshold_db", "coverage", "ci"]);
    for r in &results {
        push_curve(&mut cov, &[r.scheme.to_string()], &r.coverage);
    }
    Ok(vec![
        write_table(out, "compare_rate.csv", &rate)?,
        write_table(out, "compare_coverage.csv", &cov)?,
    ])
}
