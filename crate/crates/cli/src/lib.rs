//! Command-line driver for `lnratio`.
//!
//! Exit codes: 0 success, 2 usage error, 3 data or domain error,
//! 4 verification failure, 5 budget refusal.

pub mod error;
pub mod format;
pub mod manifest;

use std::fs::File;
use std::io::{self, BufReader, BufWriter, Read, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::json;

use lnratio::montecarlo::{DEFAULT_MASTER_SEED, DEFAULT_MAX_DRAWS};
use lnratio::oracle::{self, TermKind, VerifyConfig};
use lnratio::{
    efficiency_curve, params_from_gk, run_grid, EstimateReport, GridConfig, LogNormalParams,
    Spacing,
};

pub use error::CliError;
use format::g17;
use manifest::RunManifest;

/// Environment variable holding the per-cell cap on drawn variates.
pub const BUDGET_ENV: &str = "LNRATIO_MAX_DRAWS";

#[derive(Debug, Parser)]
#[command(
    name = "lnratio",
    version,
    about = "Lognormal C_v^2 from arithmetic and harmonic sample means"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate k_hat, g_hat and friends from a sample file
    Estimate(EstimateArgs),
    /// Draw lognormal variates, one per line
    Sample(SampleArgs),
    /// Monte Carlo grid of k_hat mean and sd against their predictions
    Simulate(SimulateArgs),
    /// Large-sample efficiency of k_hat relative to the UMVUE
    Efficiency(EfficiencyArgs),
    /// Check the covariance-class oracle against the closed forms
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OutputFormat {
    Text,
    Csv,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Sample file; standard input when omitted or "-"
    pub input: Option<PathBuf>,
    #[arg(long, value_enum, default_value = "text")]
    pub format: OutputFormat,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    /// Log-space mean (with --sigma2)
    #[arg(long, allow_negative_numbers = true)]
    pub mu: Option<f64>,
    /// Log-space variance (with --mu)
    #[arg(long, allow_negative_numbers = true)]
    pub sigma2: Option<f64>,
    /// Geometric mean (with --k)
    #[arg(long, allow_negative_numbers = true)]
    pub g: Option<f64>,
    /// Relative ratio, equal to C_v^2 (with --g)
    #[arg(long, allow_negative_numbers = true)]
    pub k: Option<f64>,
    #[arg(long)]
    pub n: usize,
    #[arg(long, default_value_t = DEFAULT_MASTER_SEED)]
    pub seed: u64,
    /// Output file; standard output when omitted
    #[arg(long, short)]
    pub output: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    /// Sample sizes
    #[arg(long = "n", value_delimiter = ',', default_values_t = vec![2u64, 10, 100])]
    pub n_values: Vec<u64>,
    /// Population coefficients of variation
    #[arg(long = "cv", value_delimiter = ',', default_values_t = vec![0.1f64, 0.5, 1.0])]
    pub cv_values: Vec<f64>,
    /// Fixed number of runs per cell
    #[arg(long)]
    pub runs: Option<u64>,
    /// Cap on the default floor(1e7/(n-1)) runs
    #[arg(long, default_value_t = 1_000_000, conflicts_with = "uncapped")]
    pub runs_cap: u64,
    /// Use floor(1e7/(n-1)) runs without a cap
    #[arg(long)]
    pub uncapped: bool,
    #[arg(long, default_value_t = DEFAULT_MASTER_SEED)]
    pub seed: u64,
    #[arg(long, default_value_t = 0.0, allow_negative_numbers = true)]
    pub mu_y: f64,
    /// Maximum variates per cell
    #[arg(long, env = BUDGET_ENV, default_value_t = DEFAULT_MAX_DRAWS)]
    pub max_draws: u128,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    /// Manifest path; defaults to <output>.manifest.json
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SpacingArg {
    Linear,
    Log,
}

#[derive(Debug, Args)]
pub struct EfficiencyArgs {
    #[arg(long, default_value_t = 0.01, allow_negative_numbers = true)]
    pub min: f64,
    #[arg(long, default_value_t = 4.0, allow_negative_numbers = true)]
    pub max: f64,
    #[arg(long, default_value_t = 100)]
    pub points: usize,
    #[arg(long, value_enum, default_value = "linear")]
    pub spacing: SpacingArg,
    #[arg(long, short)]
    pub output: Option<PathBuf>,
    #[arg(long)]
    pub manifest: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    #[arg(long, default_value_t = 12)]
    pub max_n: u64,
    #[arg(long = "omega", value_delimiter = ',', default_values_t = vec![1.0f64, 1.1, 2.0, 5.0, 10.0])]
    pub omegas: Vec<f64>,
    /// Test hook: add one to the named class multiplicity
    #[arg(long, hide = true)]
    pub inject_fault: Option<String>,
}

/// Standard streams, injectable for tests.
pub struct Io<'a> {
    pub stdin: &'a mut dyn Read,
    pub stdout: &'a mut dyn Write,
    pub stderr: &'a mut dyn Write,
}

pub fn run(cli: Cli, io: Io<'_>) -> Result<(), CliError> {
    match cli.command {
        Command::Estimate(args) => cmd_estimate(&args, io),
        Command::Sample(args) => cmd_sample(&args, io),
        Command::Simulate(args) => cmd_simulate(&args, io),
        Command::Efficiency(args) => cmd_efficiency(&args, io),
        Command::Verify(args) => cmd_verify(&args, io),
    }
}

fn with_output<F>(path: Option<&Path>, stdout: &mut dyn Write, body: F) -> Result<(), CliError>
where
    F: FnOnce(&mut dyn Write) -> io::Result<()>,
{
    match path {
        Some(p) if p != Path::new("-") => {
            let mut w = BufWriter::new(File::create(p)?);
            body(&mut w)?;
            w.flush()?;
        }
        _ => {
            body(stdout)?;
            stdout.flush()?;
        }
    }
    Ok(())
}

fn write_manifest(
    manifest: &RunManifest,
    output: Option<&Path>,
    explicit: Option<&Path>,
    stderr: &mut dyn Write,
) -> Result<(), CliError> {
    let target = explicit.map(Path::to_path_buf).or_else(|| {
        output.filter(|p| *p != Path::new("-")).map(|p| {
            let mut name = p.as_os_str().to_owned();
            name.push(".manifest.json");
            PathBuf::from(name)
        })
    });
    match target {
        Some(path) => std::fs::write(path, manifest.to_json() + "\n")?,
        None => writeln!(
            stderr,
            "manifest: {}",
            serde_json::to_string(manifest).expect("serializable")
        )?,
    }
    Ok(())
}

const REPORT_FIELDS: [&str; 10] = [
    "n",
    "a_n",
    "h_n",
    "k_n",
    "k_hat",
    "g_hat",
    "cv2_conventional",
    "predicted_sd_k_hat",
    "cost_collective",
    "cost_conventional",
];

fn report_values(r: &EstimateReport) -> [String; 10] {
    [
        r.n.to_string(),
        g17(r.a_n),
        g17(r.h_n),
        g17(r.k_n),
        g17(r.k_hat),
        g17(r.g_hat),
        g17(r.cv2_conventional),
        g17(r.predicted_sd_k_hat),
        r.cost_collective.to_string(),
        r.cost_conventional.to_string(),
    ]
}

pub fn cmd_estimate(args: &EstimateArgs, io: Io<'_>) -> Result<(), CliError> {
    let acc = match args.input.as_deref() {
        Some(p) if p != Path::new("-") => {
            let file =
                File::open(p).map_err(|e| CliError::Data(format!("{}: {e}", p.display())))?;
            format::read_sample(BufReader::new(file))?
        }
        _ => format::read_sample(BufReader::new(io.stdin))?,
    };
    let report = EstimateReport::from_accumulator(&acc)?;
    let values = report_values(&report);
    let out = io.stdout;
    match args.format {
        OutputFormat::Csv => {
            writeln!(out, "{}", REPORT_FIELDS.join(","))?;
            writeln!(out, "{}", values.join(","))?;
        }
        OutputFormat::Text => {
            for (name, value) in REPORT_FIELDS.iter().zip(&values) {
                writeln!(out, "{name:<20}{value}")?;
            }
            writeln!(
                out,
                "# predicted_sd_k_hat is a plug-in diagnostic at k = k_hat"
            )?;
        }
    }
    Ok(())
}

pub fn cmd_sample(args: &SampleArgs, io: Io<'_>) -> Result<(), CliError> {
    let params = match (args.mu, args.sigma2, args.g, args.k) {
        (Some(mu), Some(sigma2), None, None) => LogNormalParams::new(mu, sigma2)?,
        (None, None, Some(g), Some(k)) => params_from_gk(g, k)?,
        _ => {
            return Err(CliError::Usage(
                "give exactly one parameterization: --mu and --sigma2, or --g and --k".into(),
            ))
        }
    };
    if args.n == 0 {
        return Err(CliError::Usage("--n must be >= 1".into()));
    }
    let xs = lnratio::sample(params, args.n, args.seed)?;
    with_output(args.output.as_deref(), io.stdout, |w| {
        for x in &xs {
            writeln!(w, "{}", g17(*x))?;
        }
        Ok(())
    })
}

pub const SIMULATION_HEADER: &str = "n,cv,runs,seed,mean_khat,sd_khat,pred_mean,pred_sd,se_mean";

pub fn cmd_simulate(args: &SimulateArgs, io: Io<'_>) -> Result<(), CliError> {
    let cfg = GridConfig {
        n_values: args.n_values.clone(),
        cv_values: args.cv_values.clone(),
        runs_override: args.runs,
        runs_cap: (!args.uncapped).then_some(args.runs_cap),
        master_seed: args.seed,
        mu_y: args.mu_y,
    };
    cfg.validate().map_err(|e| CliError::Usage(e.to_string()))?;
    let cells = run_grid(&cfg, args.max_draws)?;

    for cell in cells.iter().filter(|c| c.slow_convergence) {
        writeln!(
            io.stderr,
            "warning: cell n={} cv={} has cv > 2; sd_khat converges slowly",
            cell.n,
            g17(cell.cv)
        )?;
    }
    with_output(args.output.as_deref(), io.stdout, |w| {
        writeln!(w, "{SIMULATION_HEADER}")?;
        for c in &cells {
            writeln!(
                w,
                "{},{},{},{},{},{},{},{},{}",
                c.n,
                g17(c.cv),
                c.runs,
                c.seed,
                g17(c.mean_khat),
                g17(c.sd_khat),
                g17(c.pred_mean),
                g17(c.pred_sd),
                g17(c.se_mean)
            )?;
        }
        Ok(())
    })?;

    let slow: Vec<_> = cells
        .iter()
        .filter(|c| c.slow_convergence)
        .map(|c| json!({"n": c.n, "cv": c.cv}))
        .collect();
    let manifest = RunManifest::new(
        "simulate",
        json!({
            "n": cfg.n_values,
            "cv": cfg.cv_values,
            "runs": cfg.runs_override,
            "runs_cap": cfg.runs_cap,
            "mu_y": cfg.mu_y,
            "max_draws": args.max_draws.to_string(),
            "cell_seeds": cells.iter().map(|c| c.seed).collect::<Vec<_>>(),
            "slow_convergence_cells": slow,
        }),
        Some(cfg.master_seed),
    );
    write_manifest(
        &manifest,
        args.output.as_deref(),
        args.manifest.as_deref(),
        io.stderr,
    )
}

pub fn cmd_efficiency(args: &EfficiencyArgs, io: Io<'_>) -> Result<(), CliError> {
    let spacing = match args.spacing {
        SpacingArg::Linear => Spacing::Linear,
        SpacingArg::Log => Spacing::Log,
    };
    let curve = efficiency_curve(args.min, args.max, args.points, spacing)
        .map_err(|e| CliError::Usage(e.to_string()))?;
    with_output(args.output.as_deref(), io.stdout, |w| {
        writeln!(w, "sigma2,efficiency")?;
        for (s2, eff) in &curve {
            writeln!(w, "{},{}", g17(*s2), g17(*eff))?;
        }
        Ok(())
    })?;
    let manifest = RunManifest::new(
        "efficiency",
        json!({
            "min": args.min,
            "max": args.max,
            "points": args.points,
            "spacing": format!("{:?}", args.spacing).to_lowercase(),
        }),
        None,
    );
    write_manifest(
        &manifest,
        args.output.as_deref(),
        args.manifest.as_deref(),
        io.stderr,
    )
}

pub fn cmd_verify(args: &VerifyArgs, io: Io<'_>) -> Result<(), CliError> {
    let fault = args
        .inject_fault
        .as_deref()
        .map(str::parse::<TermKind>)
        .transpose()
        .map_err(|e| CliError::Usage(e.to_string()))?;
    let cfg = VerifyConfig {
        max_n: args.max_n,
        omegas: args.omegas.clone(),
        fault,
        ..VerifyConfig::default()
    };
    let report = oracle::verify(&cfg).map_err(|e| CliError::Usage(e.to_string()))?;
    let out = io.stdout;
    writeln!(
        out,
        "covariance oracle vs closed forms: n = 2..={}, omega = {:?}, tolerance {:e}",
        cfg.max_n, cfg.omegas, cfg.tolerance
    )?;
    match report.first_mismatch() {
        None => {
            writeln!(out, "PASS {} checks", report.checks)?;
            Ok(())
        }
        Some(first) => {
            writeln!(
                out,
                "FAIL {} of {} checks",
                report.mismatches.len(),
                report.checks
            )?;
            writeln!(out, "first mismatch: {first}")?;
            Err(CliError::Verify(first.to_string()))
        }
    }
}
