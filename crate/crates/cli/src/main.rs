//! `tdi-sense`: run sweeps, bounds tables, worst-case searches and
//! multi-level studies from a JSON config, writing CSV plus a manifest.

use std::path::{Path, PathBuf};
use std::time::Instant;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use tdi_sense::bounds::BoundReport;
use tdi_sense::experiment::{self, ExperimentConfig, Manifest, Mode, Table};

#[derive(Parser)]
#[command(
    name = "tdi-sense",
    version,
    about = "Frequency estimation under time-domain imperfections"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// MSE of every strategy over the ε grid and ω samples.
    Sweep(Common),
    /// Closed-form bounds over the ε grid.
    Bounds(Common),
    /// Largest relative bias over a family of dilation laws.
    WorstCase(Common),
    /// FE and CE protocols against multi-mode phonon environments.
    Multilevel(Common),
}

#[derive(Args)]
struct Common {
    #[arg(long)]
    config: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    threads: Option<usize>,
    #[arg(long, value_enum)]
    mode: Option<ModeArg>,
    #[arg(long)]
    out_dir: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum ModeArg {
    Exact,
    Mc,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Self::Sweep(_) => "sweep",
            Self::Bounds(_) => "bounds",
            Self::WorstCase(_) => "worst-case",
            Self::Multilevel(_) => "multilevel",
        }
    }

    fn common(&self) -> &Common {
        match self {
            Self::Sweep(c) | Self::Bounds(c) | Self::WorstCase(c) | Self::Multilevel(c) => c,
        }
    }
}

/// Config file with command-line overrides applied.
fn load(common: &Common) -> Result<ExperimentConfig> {
    let mut cfg = ExperimentConfig::load(&common.config)
        .with_context(|| format!("reading {}", common.config.display()))?;
    if let Some(seed) = common.seed {
        cfg.seed = seed;
    }
    if let Some(t) = common.threads {
        cfg.threads = Some(t);
    }
    if let Some(m) = common.mode {
        cfg.mode = match m {
            ModeArg::Exact => Mode::Exact,
            ModeArg::Mc => Mode::MonteCarlo,
        };
    }
    if let Some(dir) = &common.out_dir {
        cfg.out_dir = Some(dir.display().to_string());
    }
    cfg.validate()?;
    Ok(cfg)
}

fn bound_reports(cfg: &ExperimentConfig) -> Result<serde_json::Value> {
    let p = cfg.params(cfg.omega.representative());
    let reports: Vec<BoundReport> = cfg
        .epsilons
        .values()
        .into_iter()
        .map(|e| BoundReport::new(&p, cfg.nu as f64, e, cfg.worst_case.xi_points))
        .collect();
    Ok(serde_json::to_value(reports)?)
}

fn execute(
    command: &Command,
    cfg: &ExperimentConfig,
) -> Result<(Vec<Table>, Vec<(String, serde_json::Value)>)> {
    Ok(match command {
        Command::Sweep(_) => {
            let r = experiment::sweep_epsilon(cfg)?;
            (r.tables(), vec![("bounds".into(), bound_reports(cfg)?)])
        }
        Command::Bounds(_) => {
            let r = experiment::bounds_table(cfg)?;
            (
                r.tables(),
                vec![("bounds".into(), serde_json::to_value(&r.reports)?)],
            )
        }
        Command::WorstCase(_) => (experiment::worst_case_sweep(cfg)?.tables(), vec![]),
        Command::Multilevel(_) => (experiment::multilevel_sweep(cfg)?.tables(), vec![]),
    })
}

fn run(cli: Cli) -> Result<(Manifest, PathBuf)> {
    let mut cfg = load(cli.command.common())?;
    if matches!(cli.command, Command::WorstCase(_)) {
        // the search compares exact outcome laws
        cfg.mode = Mode::Exact;
    }
    let dir = cfg
        .out_dir
        .as_ref()
        .map(PathBuf::from)
        .unwrap_or_else(|| Path::new("out").join(cli.command.name()));
    let start = Instant::now();
    let (tables, extras) = experiment::with_threads(cfg.threads, || execute(&cli.command, &cfg))??;
    let manifest = experiment::emit(
        cli.command.name(),
        &cfg,
        &tables,
        &extras,
        &dir,
        start.elapsed().as_secs_f64(),
    )?;
    Ok((manifest, dir))
}

fn main() -> Result<()> {
    let (manifest, dir) = run(Cli::parse())?;
    for f in &manifest.files {
        println!(
            "{}  {} rows  {}",
            dir.join(&f.path).display(),
            f.rows,
            f.sha256
        );
    }
    println!("{}", dir.join("manifest.json").display());
    Ok(())
}
