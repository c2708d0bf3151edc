//! The serialized description of one run.

use std::fs;
use std::path::{Path, PathBuf};

use lagp_core::fem::FreezeRule;
use lagp_core::gpr::ThetaSharing;
use lagp_core::lagpr::{LagprConfig, ThetaPolicy, MIN_N_LOCAL};
use lagp_core::{NrConfig, Oracle, Problem};
use serde::{Deserialize, Serialize};

use crate::CliError;

pub const CONFIG_FILE: &str = "run_config.toml";

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum CommandKind {
    Generate,
    FitEval,
    Solve,
    Report,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize, Deserialize, clap::ValueEnum)]
#[serde(rename_all = "kebab-case")]
pub enum BackendKind {
    Oracle,
    Lagpr,
    Knn,
}

#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
#[serde(deny_unknown_fields)]
pub struct RunConfig {
    pub command: CommandKind,
    pub oracle: String,
    pub delta_t: f64,
    pub n_h: usize,
    pub n_local: usize,
    /// Keep the default length-scales instead of optimizing per fit.
    pub freeze_theta: bool,
    /// One length-scale vector for the stress block and one for the tangent.
    pub share_theta: bool,
    pub problem: Option<String>,
    pub backend: BackendKind,
    pub magnitude: Option<f64>,
    pub load_steps: usize,
    pub freeze: bool,
    pub c_tol: f64,
    pub g_tol: f64,
    pub max_iter: usize,
    pub n_test: usize,
    pub seed: u64,
    pub workers: Option<usize>,
    pub data: Vec<PathBuf>,
    pub inputs: Vec<PathBuf>,
    pub out: PathBuf,
}

impl RunConfig {
    pub fn new(command: CommandKind) -> Self {
        let nr = NrConfig::default();
        RunConfig {
            command,
            oracle: "trans-iso".into(),
            delta_t: 0.175,
            n_h: 20,
            n_local: lagp_core::lagpr::DEFAULT_N_LOCAL,
            freeze_theta: false,
            share_theta: false,
            problem: None,
            backend: BackendKind::Lagpr,
            magnitude: None,
            load_steps: nr.load_steps,
            freeze: nr.freeze_enabled,
            c_tol: nr.c_tol,
            g_tol: nr.g_tol,
            max_iter: nr.max_iter,
            n_test: 1000,
            seed: 2024,
            workers: None,
            data: Vec::new(),
            inputs: Vec::new(),
            out: PathBuf::from("."),
        }
    }

    pub fn load(path: &Path) -> Result<Self, CliError> {
        let text = fs::read_to_string(path).map_err(|e| CliError::io(path, e))?;
        toml::from_str(&text).map_err(|e| CliError::Config(format!("{}: {e}", path.display())))
    }

    pub fn to_toml(&self) -> String {
        toml::to_string(self).expect("run config serializes")
    }

    pub fn oracle(&self) -> Result<Oracle, CliError> {
        Ok(self.oracle.parse::<Oracle>()?)
    }

    pub fn problem(&self) -> Result<Problem, CliError> {
        let tag = self
            .problem
            .as_deref()
            .ok_or_else(|| CliError::Config("solve needs --problem".into()))?;
        Ok(tag.parse::<Problem>()?)
    }

    pub fn lagpr_config(&self) -> LagprConfig {
        LagprConfig {
            n_local: self.n_local,
            sharing: if self.share_theta {
                ThetaSharing::StressTangent
            } else {
                ThetaSharing::PerChannel
            },
            policy: if self.freeze_theta {
                ThetaPolicy::Frozen
            } else {
                ThetaPolicy::Optimize
            },
            ..LagprConfig::default()
        }
    }

    pub fn nr_config(&self) -> NrConfig {
        NrConfig {
            c_tol: self.c_tol,
            g_tol: self.g_tol,
            max_iter: self.max_iter,
            freeze_enabled: self.freeze,
            load_steps: self.load_steps,
        }
    }

    pub fn freeze_rule(&self) -> FreezeRule {
        self.nr_config().freeze_rule()
    }

    /// Checks everything that can be checked without touching the disk.
    pub fn validate(&self) -> Result<(), CliError> {
        let bad = |msg: String| Err(CliError::Config(msg));
        self.oracle()?;
        if !(self.delta_t > 0.0 && self.delta_t < 1.0) {
            return bad(format!("--domain must lie in (0, 1), got {}", self.delta_t));
        }
        if self.n_h == 0 {
            return bad("--layers must be at least 1".into());
        }
        if self.n_local < MIN_N_LOCAL {
            return bad(format!(
                "--n-local must be at least {MIN_N_LOCAL}, got {}",
                self.n_local
            ));
        }
        if self.workers == Some(0) {
            return bad("--workers must be at least 1".into());
        }
        self.nr_config().validate()?;
        match self.command {
            CommandKind::Generate | CommandKind::Report => {}
            CommandKind::FitEval => {
                if self.n_test == 0 {
                    return bad("--n-test must be at least 1".into());
                }
                if self.data.is_empty() {
                    return bad("fit-eval needs at least one --data file".into());
                }
            }
            CommandKind::Solve => {
                self.problem()?;
                if self.backend != BackendKind::Oracle && self.data.len() != 1 {
                    return bad("a surrogate back-end needs exactly one --data file".into());
                }
                if self.magnitude.is_some_and(|m| !m.is_finite()) {
                    return bad("--magnitude must be finite".into());
                }
            }
        }
        Ok(())
    }
}
