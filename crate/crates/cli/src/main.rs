use std::path::PathBuf;
use std::process::ExitCode;
use std::time::Instant;

use clap::{Args, Parser, Subcommand};
use multiris_cli::config::{ConfigBuilder, ConfigFile};
use multiris_cli::output::RunManifest;
use multiris_cli::{recipes, run, CliError};

/// Multi-RIS mmWave cell simulator and analytical evaluator.
#[derive(Parser)]
#[command(name = "multiris", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Monte Carlo coverage and rate.
    Simulate(Common),
    /// Analytical ergodic coverage over the density and threshold grids.
    Analyze(Common),
    /// Figure-trend reproduction.
    Figure {
        /// Recipe name (fig4, fig5, fig6, fig7, fig8, fig9, fig10, fig11, fig13).
        recipe: String,
        #[command(flatten)]
        common: Common,
    },
    /// Paired comparison of phase-control schemes on common random numbers.
    Compare(Common),
}

#[derive(Args)]
struct Common {
    /// TOML configuration, or a manifest.json from an earlier run.
    #[arg(long)]
    config: Option<PathBuf>,
    /// Override a configuration key (`key=value` or `section.key=value`).
    #[arg(long = "set", value_name = "KEY=VALUE")]
    overrides: Vec<String>,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    trials: Option<usize>,
    /// Output directory.
    #[arg(long, default_value = "out")]
    out: PathBuf,
    /// Worker threads; results do not depend on this.
    #[arg(long)]
    threads: Option<usize>,
}

impl Common {
    fn build(&self, base: &ConfigFile) -> Result<ConfigFile, CliError> {
        let mut b = ConfigBuilder::new(base);
        if let Some(p) = &self.config {
            b = b.file(p)?;
        }
        for o in &self.overrides {
            b = b.set(o)?;
        }
        if let Some(s) = self.seed {
            b = b.set(&format!("sweep.seed={s}"))?;
        }
        if let Some(t) = self.trials {
            b = b.set(&format!("sweep.trials={t}"))?;
        }
        let cfg = b.build()?;
        cfg.validate()?;
        Ok(cfg)
    }
}

fn execute(cli: Cli) -> Result<(), CliError> {
    let (name, recipe, common) = match &cli.command {
        Command::Simulate(c) => ("simulate", None, c),
        Command::Analyze(c) => ("analyze", None, c),
        Command::Compare(c) => ("compare", None, c),
        Command::Figure { recipe, common } => ("figure", Some(recipes::find(recipe)?), common),
    };
    if let Some(n) = common.threads {
        rayon::ThreadPoolBuilder::new()
            .num_threads(n)
            .build_global()
            .map_err(|e| CliError::Config {
                origin: "--threads".into(),
                message: e.to_string(),
            })?;
    }
    let base = recipe.map_or_else(ConfigFile::default, |r| (r.base)());
    let cfg = common.build(&base)?;
    std::fs::create_dir_all(&common.out).map_err(|e| CliError::Io {
        context: format!("creating {}", common.out.display()),
        source: e,
    })?;

    let start = Instant::now();
    let outputs = match (&cli.command, recipe) {
        (Command::Simulate(_), _) => run::simulate(&cfg, &common.out)?,
        (Command::Analyze(_), _) => run::analyze(&cfg, &common.out)?,
        (Command::Compare(_), _) => run::compare(&cfg, &common.out)?,
        (Command::Figure { .. }, Some(r)) => (r.run)(&cfg, &common.out)?,
        (Command::Figure { .. }, None) => unreachable!("recipe resolved above"),
    };
    let mut manifest = RunManifest::new(name, recipe.map(|r| r.name), &cfg);
    manifest.runtime_s = start.elapsed().as_secs_f64();
    manifest.outputs = outputs;
    let path = manifest.write(&common.out)?;
    for o in &manifest.outputs {
        println!("wrote {} ({} rows)", common.out.join(&o.name).display(), o.rows);
    }
    println!("wrote {} in {:.2} s", path.display(), manifest.runtime_s);
    Ok(())
}

fn main() -> ExitCode {
    match execute(Cli::parse()) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code() as u8)
        }
    }
}
