//! Command-line front end for the ILW toolkit.
//!
//! Exit status: 0 when every verdict passes, 2 when a verdict fails or is
//! inconclusive, 1 on an execution error.

pub mod config;
pub mod manifest;

use std::path::{Path, PathBuf};

use anyhow::{Context, Result};
use chrono::Utc;
use clap::{Parser, Subcommand};
use ilw_core::dynamics::{evolve_from, l2_drift, write_trajectory, TrajectoryRecord};
use ilw_core::experiments::{
    run_convergence, run_equicontinuity, run_fd_check, run_instability, run_resonance_sweep,
    ExperimentReport, Verdict,
};
use ilw_core::{EquationKind, Error};

pub use config::{parse_config, parse_config_str, Config, EvolveSpec};
pub use manifest::{RunManifest, MANIFEST_FILE};

pub const EXIT_OK: i32 = 0;
pub const EXIT_ERROR: i32 = 1;
pub const EXIT_VERDICT: i32 = 2;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Subcommand)]
pub enum Command {
    /// Resonance identity, series oracle, BX5, comparability, Jacobian and gap sweeps.
    ResonanceSweep,
    /// Evolve one equation and export the trajectory.
    Evolve,
    /// Shallow-water convergence of the low-frequency system to KdV.
    Converge,
    /// Uniform-in-depth high-frequency tails.
    Equicont,
    /// Mesh-free second-derivative growth witness.
    Instability,
    /// Finite-difference check of the second Gâteaux derivative.
    FdCheck,
    /// Quick sanity suite over every module.
    Selftest,
}

impl Command {
    pub fn name(self) -> &'static str {
        match self {
            Command::ResonanceSweep => "resonance-sweep",
            Command::Evolve => "evolve",
            Command::Converge => "converge",
            Command::Equicont => "equicont",
            Command::Instability => "instability",
            Command::FdCheck => "fd-check",
            Command::Selftest => "selftest",
        }
    }
}

#[derive(Debug, Parser)]
#[command(name = "ilw", version, about = "ILW / KdV pseudospectral toolkit")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    /// TOML configuration; missing keys take their defaults.
    #[arg(long, global = true)]
    pub config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, global = true, default_value = "out")]
    pub out: PathBuf,
    /// Worker threads (0 or unset: one per core).
    #[arg(long, global = true, env = "ILW_THREADS")]
    pub threads: Option<usize>,
    /// Overrides the seed in the config.
    #[arg(long, global = true, value_parser = clap::value_parser!(u64).range(..=config::MAX_SEED))]
    pub seed: Option<u64>,
}

#[derive(Debug)]
pub struct RunOutcome {
    pub report: ExperimentReport,
    pub manifest: RunManifest,
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        if self.report.passed() {
            EXIT_OK
        } else {
            EXIT_VERDICT
        }
    }
}

fn evolve_report(spec: &EvolveSpec, rec: &TrajectoryRecord) -> ExperimentReport {
    let mut report = ExperimentReport::new(
        "evolve",
        serde_json::to_value(spec).unwrap_or_default(),
        &["time", "l2", "hs", "edge_fraction", "high_band_mass", "mean", "residual_l2"],
    );
    for d in &rec.diagnostics {
        report.rows.push(vec![
            d.time,
            d.l2,
            d.hs,
            d.edge_fraction,
            d.high_band_mass,
            d.mean,
            d.residual_l2,
        ]);
    }
    let drift = l2_drift(rec);
    report.notes.push(format!(
        "l2 drift {} ({})",
        drift.value,
        if drift.absolute { "absolute" } else { "relative" }
    ));
    report
        .verdicts
        .push(Verdict::check("completed", rec.times.last().copied().unwrap_or(0.0), true, "reached the horizon"));
    if spec.kind == EquationKind::LowFrequency {
        let mass = rec.diagnostics.iter().map(|d| d.high_band_mass).fold(0.0, f64::max);
        report.verdicts.push(Verdict::check(
            "high_band_mass_zero",
            mass,
            mass == 0.0,
            "exactly 0 at every snapshot",
        ));
    }
    report
}

fn selftest_report() -> ExperimentReport {
    let mut report = ExperimentReport::new("selftest", serde_json::json!({}), &[]);
    for c in ilw_core::selftest::run() {
        let mut v = Verdict::check(
            &format!("{}::{}", c.module, c.name),
            if c.passed { 1.0 } else { 0.0 },
            c.passed,
            "check holds",
        );
        if !c.detail.is_empty() {
            v.tolerance = format!("check holds ({})", c.detail);
        }
        report.verdicts.push(v);
    }
    report
}

fn compute(command: Command, cfg: &Config, seed: u64, out: &Path) -> Result<(ExperimentReport, Vec<PathBuf>)> {
    let mut files = Vec::new();
    let report = match command {
        Command::ResonanceSweep => run_resonance_sweep(&cfg.resonance_sweep, seed, Some(out))?,
        Command::Evolve => {
            let spec = &cfg.evolve;
            let mut sc = spec.settings.solver_config(spec.delta, spec.horizon, spec.s)?;
            if spec.linear_only {
                sc = sc.linear_only();
            }
            let phi = spec.profile.sample(sc.grid);
            match evolve_from(spec.kind, &phi, &sc) {
                Ok(rec) => {
                    files.extend(write_trajectory(&rec, &out.join("trajectory"))?);
                    evolve_report(spec, &rec)
                }
                Err(Error::BlowUp { time, partial }) => {
                    if let Some(p) = partial {
                        write_trajectory(&p, &out.join("trajectory"))?;
                    }
                    anyhow::bail!("blow-up at t = {time}; partial trajectory written");
                }
                Err(e) => return Err(e.into()),
            }
        }
        Command::Converge => run_convergence(&cfg.converge)?,
        Command::Equicont => run_equicontinuity(&cfg.equicont)?,
        Command::Instability => run_instability(&cfg.instability)?,
        Command::FdCheck => run_fd_check(&cfg.fd_check)?,
        Command::Selftest => selftest_report(),
    };
    if command == Command::ResonanceSweep {
        files.push(out.join("comparability_samples.csv"));
    }
    files.extend(report.write(out, command.name())?);
    Ok((report, files))
}

/// Runs `command` with an explicit configuration and writes all artifacts under `out`.
pub fn execute(
    command: Command,
    cfg: &Config,
    out: &Path,
    threads: Option<usize>,
    seed: Option<u64>,
) -> Result<RunOutcome> {
    let started = Utc::now();
    std::fs::create_dir_all(out).with_context(|| format!("creating {}", out.display()))?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(threads.unwrap_or(0))
        .build()
        .context("building thread pool")?;
    let seed = seed.unwrap_or_else(|| cfg.seed());
    if seed > config::MAX_SEED {
        anyhow::bail!("seed must satisfy seed ≤ {}, got {seed}", config::MAX_SEED);
    }
    let (report, files) = pool.install(|| compute(command, cfg, seed, out))?;

    let mut resolved = cfg.clone();
    resolved.seed = Some(seed);
    let manifest = RunManifest {
        schema_version: manifest::MANIFEST_SCHEMA_VERSION,
        command: command.name().into(),
        config: serde_json::to_value(&resolved)?,
        seed,
        threads: pool.current_num_threads(),
        tool_version: env!("CARGO_PKG_VERSION").into(),
        started,
        finished: Utc::now(),
        exit_status: if report.passed() { EXIT_OK } else { EXIT_VERDICT },
        outputs: manifest::inventory(out, &files)?,
    };
    manifest.write(out)?;
    Ok(RunOutcome { report, manifest })
}

/// Parses the config named on the command line (or defaults) and runs.
pub fn run(cli: &Cli) -> Result<RunOutcome> {
    let cfg = match &cli.config {
        Some(p) => parse_config(p)?,
        None => Config::default(),
    };
    execute(cli.command, &cfg, &cli.out, cli.threads, cli.seed)
}

/// Full CLI behaviour including the exit status.
pub fn main_with(cli: &Cli) -> i32 {
    match run(cli) {
        Ok(outcome) => {
            for v in &outcome.report.verdicts {
                println!(
                    "{:<14} {:<40} {:>24.16e}  {}",
                    format!("{:?}", v.outcome).to_lowercase(),
                    v.name,
                    v.measured,
                    v.tolerance
                );
            }
            println!("wrote {} files to {}", outcome.manifest.outputs.len() + 1, cli.out.display());
            outcome.exit_code()
        }
        Err(e) => {
            eprintln!("error: {e:#}");
            EXIT_ERROR
        }
    }
}
