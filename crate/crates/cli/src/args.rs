//! Command-line parsing into a [`RunConfig`].

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::{BackendKind, CommandKind, RunConfig};
use crate::CliError;

#[derive(Debug, Parser)]
#[command(name = "lagp", version, about = "Local GP constitutive surrogates and FE benchmarks")]
#[command(args_conflicts_with_subcommands = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,

    /// Replay a saved run_config.toml instead of parsing a subcommand.
    #[arg(long)]
    pub config: Option<PathBuf>,

    /// Output directory override for a replayed config.
    #[arg(long, requires = "config")]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Build a nested-hypercube training set from an analytical law.
    Generate(Shared),
    /// Compare laGPR and 1-NN stress errors on a Latin hypercube test set.
    FitEval(FitEvalArgs),
    /// Run a finite-element benchmark.
    Solve(SolveArgs),
    /// Merge the CSV reports of earlier runs.
    Report(ReportArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum OnOff {
    On,
    Off,
}

#[derive(Debug, Args)]
pub struct Shared {
    /// Half-width ΔT of the applied-stretch domain.
    #[arg(long, default_value_t = 0.175)]
    pub domain: f64,
    /// Number of hypercube layers.
    #[arg(long, default_value_t = 20)]
    pub layers: usize,
    #[arg(long, default_value = "trans-iso", value_parser = ["trans-iso", "neo-hooke"])]
    pub oracle: String,
    /// Training rows per local GP.
    #[arg(long, default_value_t = lagp_core::lagpr::DEFAULT_N_LOCAL)]
    pub n_local: usize,
    /// Keep the default length-scales instead of optimizing them per fit.
    #[arg(long)]
    pub freeze_theta: bool,
    /// Share one length-scale vector across the stress and one across the tangent outputs.
    #[arg(long)]
    pub share_theta: bool,
    /// Freeze Gauss-point surrogates once C settles.
    #[arg(long, value_enum, default_value_t = OnOff::On)]
    pub freeze: OnOff,
    #[arg(long, default_value_t = 0.01)]
    pub c_tol: f64,
    /// Relative residual tolerance.
    #[arg(long, default_value_t = 1e-8)]
    pub g_tol: f64,
    #[arg(long, default_value_t = 12)]
    pub max_iter: usize,
    #[arg(long, default_value_t = 2024)]
    pub seed: u64,
    /// Worker threads (default: all cores).
    #[arg(long)]
    pub workers: Option<usize>,
    /// Existing output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct FitEvalArgs {
    #[command(flatten)]
    pub shared: Shared,
    /// Training CSV; repeat to evaluate several sets against one test set.
    #[arg(long, required = true)]
    pub data: Vec<PathBuf>,
    /// Number of Latin hypercube test points.
    #[arg(long, default_value_t = 1000)]
    pub n_test: usize,
}

#[derive(Debug, Args)]
pub struct SolveArgs {
    #[command(flatten)]
    pub shared: Shared,
    /// cube-normal, cube-shear-a, cube-shear-b, punch or cook.
    #[arg(long)]
    pub problem: String,
    #[arg(long, value_enum, default_value_t = BackendKind::Lagpr)]
    pub backend: BackendKind,
    /// Training CSV for the surrogate back-ends.
    #[arg(long)]
    pub data: Option<PathBuf>,
    /// Prescribed displacement (default: the problem's calibrated value).
    #[arg(long, allow_negative_numbers = true)]
    pub magnitude: Option<f64>,
    #[arg(long, default_value_t = 1)]
    pub load_steps: usize,
}

#[derive(Debug, Args)]
pub struct ReportArgs {
    /// Run directories holding report.csv or summary.csv.
    #[arg(required = true)]
    pub runs: Vec<PathBuf>,
    /// Existing output directory.
    #[arg(long, default_value = ".")]
    pub out: PathBuf,
}

impl Shared {
    fn apply(self, cfg: &mut RunConfig) {
        cfg.delta_t = self.domain;
        cfg.n_h = self.layers;
        cfg.oracle = self.oracle;
        cfg.n_local = self.n_local;
        cfg.freeze_theta = self.freeze_theta;
        cfg.share_theta = self.share_theta;
        cfg.freeze = self.freeze == OnOff::On;
        cfg.c_tol = self.c_tol;
        cfg.g_tol = self.g_tol;
        cfg.max_iter = self.max_iter;
        cfg.seed = self.seed;
        cfg.workers = self.workers;
        cfg.out = self.out;
    }
}

impl Cli {
    pub fn into_config(self) -> Result<RunConfig, CliError> {
        if let Some(path) = self.config {
            let mut cfg = RunConfig::load(&path)?;
            if let Some(out) = self.out {
                cfg.out = out;
            }
            return Ok(cfg);
        }
        let command = self
            .command
            .ok_or_else(|| CliError::Config("expected a subcommand or --config".into()))?;
        Ok(match command {
            Command::Generate(shared) => {
                let mut cfg = RunConfig::new(CommandKind::Generate);
                shared.apply(&mut cfg);
                cfg
            }
            Command::FitEval(a) => {
                let mut cfg = RunConfig::new(CommandKind::FitEval);
                a.shared.apply(&mut cfg);
                cfg.data = a.data;
                cfg.n_test = a.n_test;
                cfg
            }
            Command::Solve(a) => {
                let mut cfg = RunConfig::new(CommandKind::Solve);
                a.shared.apply(&mut cfg);
                cfg.problem = Some(a.problem);
                cfg.backend = a.backend;
                cfg.data = a.data.into_iter().collect();
                cfg.magnitude = a.magnitude;
                cfg.load_steps = a.load_steps;
                cfg
            }
            Command::Report(a) => {
                let mut cfg = RunConfig::new(CommandKind::Report);
                cfg.inputs = a.runs;
                cfg.out = a.out;
                cfg
            }
        })
    }
}
