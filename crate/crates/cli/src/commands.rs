//! Command implementations. Every command writes its `RunConfig` next to
//! its outputs.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use lagp_core::baselines::knn1_evaluate;
use lagp_core::mech::{compose_f, right_cauchy_green};
use lagp_core::metrics::{component_nmse, stress_error};
use lagp_core::neighbors::NeighborIndex;
use lagp_core::{
    apply_benchmark, build_training_set, hypercube_layers, lhs_sample, load_csv, save_csv, solve_modified_nr,
    HyperelasticLaw, KnnBackend, LagprBackend, LagprModel, OracleBackend, SolveOutcome, TrainingSet, VoigtStrain,
    VoigtStress,
};
use log::info;
use rayon::prelude::*;

use crate::config::{BackendKind, CommandKind, RunConfig, CONFIG_FILE};
use crate::{CliError, EXIT_NON_CONVERGENCE, EXIT_OK};

pub const TRAIN_FILE: &str = "train.csv";
pub const REPORT_FILE: &str = "report.csv";
pub const COMPONENTS_FILE: &str = "components.csv";
pub const TRACE_FILE: &str = "trace.csv";
pub const NODES_FILE: &str = "nodes.csv";
pub const GAUSS_FILE: &str = "gauss.csv";
pub const SUMMARY_FILE: &str = "summary.csv";
pub const COMBINED_REPORT_FILE: &str = "combined_report.csv";
pub const COMBINED_SUMMARY_FILE: &str = "combined_summary.csv";

/// One line of the error report.
#[derive(Clone, Debug, PartialEq)]
pub struct ReportRow {
    pub method: &'static str,
    pub n_train: usize,
    pub e_s: f64,
    pub wall_time: f64,
    pub n_test: usize,
    /// Test points whose nearest training row lies beyond the layer spacing.
    pub extrapolated: usize,
    pub nmse: [f64; 6],
}

#[derive(Clone, Debug, PartialEq)]
pub struct SolveSummary {
    pub problem: String,
    pub backend: BackendKind,
    pub converged: bool,
    pub iterations: usize,
    pub res_rel: f64,
    pub max_f_deviation: f64,
    pub max_abs_f12: f64,
    pub extrapolations: usize,
    pub wall_time: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub enum RunOutcome {
    Generated { path: PathBuf, rows: usize },
    Evaluated(Vec<ReportRow>),
    Solved(SolveSummary),
    Reported { runs: usize },
}

impl RunOutcome {
    pub fn exit_code(&self) -> i32 {
        match self {
            RunOutcome::Solved(s) if !s.converged => EXIT_NON_CONVERGENCE,
            _ => EXIT_OK,
        }
    }
}

/// Validates `cfg` and executes it.
pub fn run(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    cfg.validate()?;
    if let Some(n) = cfg.workers {
        // A pool can only be installed once per process; later calls keep it.
        let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    }
    if !cfg.out.is_dir() {
        return Err(CliError::io(
            &cfg.out,
            std::io::Error::new(std::io::ErrorKind::NotFound, "output directory does not exist"),
        ));
    }
    write_file(&cfg.out.join(CONFIG_FILE), &cfg.to_toml())?;
    match cfg.command {
        CommandKind::Generate => generate(cfg),
        CommandKind::FitEval => fit_eval(cfg),
        CommandKind::Solve => solve(cfg),
        CommandKind::Report => report(cfg),
    }
}

fn write_file(path: &Path, text: &str) -> Result<(), CliError> {
    fs::write(path, text).map_err(|e| CliError::io(path, e))
}

fn generate(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    let design = hypercube_layers(cfg.delta_t, cfg.n_h)?;
    let ts = build_training_set(&design, &cfg.oracle()?)?;
    let path = cfg.out.join(TRAIN_FILE);
    save_csv(&ts, &path)?;
    println!("{} rows written to {}", ts.len(), path.display());
    Ok(RunOutcome::Generated { path, rows: ts.len() })
}

fn fit_eval(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    let test = lhs_sample(cfg.delta_t, cfg.n_test, cfg.seed)?;
    let queries: Vec<VoigtStrain> = test
        .points
        .iter()
        .map(|p| right_cauchy_green(&compose_f(p)))
        .collect::<lagp_core::Result<_>>()?;
    let mut rows = Vec::new();
    for path in &cfg.data {
        let ts = load_csv(path)?;
        info!("{}: {} rows, {}", path.display(), ts.len(), ts.meta.oracle);
        rows.extend(evaluate_dataset(cfg, &ts, &queries)?);
    }

    let mut report = String::from("method,n_train,E_S,wall_time\n");
    let mut components =
        String::from("method,n_train,n_test,extrapolated,nmse_s11,nmse_s22,nmse_s33,nmse_s23,nmse_s31,nmse_s12\n");
    for r in &rows {
        let _ = writeln!(report, "{},{},{:e},{:.3}", r.method, r.n_train, r.e_s, r.wall_time);
        let _ = write!(components, "{},{},{},{}", r.method, r.n_train, r.n_test, r.extrapolated);
        for v in r.nmse {
            let _ = write!(components, ",{v:e}");
        }
        components.push('\n');
    }
    write_file(&cfg.out.join(REPORT_FILE), &report)?;
    write_file(&cfg.out.join(COMPONENTS_FILE), &components)?;
    print!("{report}");
    Ok(RunOutcome::Evaluated(rows))
}

fn evaluate_dataset(cfg: &RunConfig, ts: &TrainingSet, queries: &[VoigtStrain]) -> Result<Vec<ReportRow>, CliError> {
    let oracle = ts.meta.oracle;
    let truth: Vec<VoigtStress> = queries
        .par_iter()
        .map(|c| oracle.stress(c))
        .collect::<lagp_core::Result<_>>()?;

    let start = Instant::now();
    let index = NeighborIndex::build(ts.inputs())?;
    let knn: Vec<VoigtStress> = queries
        .par_iter()
        .map(|c| knn1_evaluate(&index, ts, c).map(|r| r.0))
        .collect::<lagp_core::Result<_>>()?;
    let knn_time = start.elapsed().as_secs_f64();

    let start = Instant::now();
    let model = LagprModel::new(ts, cfg.lagpr_config())?;
    let gp: Vec<VoigtStress> = queries
        .par_iter()
        .map(|c| model.predict(c).map(|r| r.0))
        .collect::<lagp_core::Result<_>>()?;
    let gp_time = start.elapsed().as_secs_f64();
    let extrapolated = model.extrapolation_count();

    let row = |method: &'static str, pred: &[VoigtStress], wall_time: f64| ReportRow {
        method,
        n_train: ts.len(),
        e_s: stress_error(pred, &truth),
        wall_time,
        n_test: queries.len(),
        extrapolated,
        nmse: component_nmse(pred, &truth),
    };
    Ok(vec![row("lagpr", &gp, gp_time), row("1nn", &knn, knn_time)])
}

fn solve(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    let problem = cfg.problem()?;
    let (mesh, bcs) = apply_benchmark(problem, cfg.magnitude)?;
    let nr = cfg.nr_config();
    let start = Instant::now();
    let outcome = match cfg.backend {
        BackendKind::Oracle => solve_modified_nr(&mesh, &bcs, &OracleBackend(cfg.oracle()?), &nr)?,
        BackendKind::Lagpr => {
            let ts = load_csv(&cfg.data[0])?;
            let backend = LagprBackend::new(LagprModel::new(&ts, cfg.lagpr_config())?);
            solve_modified_nr(&mesh, &bcs, &backend, &nr)?
        }
        BackendKind::Knn => solve_modified_nr(&mesh, &bcs, &KnnBackend::new(load_csv(&cfg.data[0])?)?, &nr)?,
    };
    let wall_time = start.elapsed().as_secs_f64();
    write_file(&cfg.out.join(TRACE_FILE), &trace_csv(&outcome))?;
    write_file(&cfg.out.join(NODES_FILE), &nodes_csv(&mesh.nodes, &outcome.u))?;
    write_file(&cfg.out.join(GAUSS_FILE), &gauss_csv(&outcome))?;

    let summary = SolveSummary {
        problem: problem.to_string(),
        backend: cfg.backend,
        converged: outcome.converged(),
        iterations: outcome.iterations(),
        res_rel: outcome.final_residual(),
        max_f_deviation: outcome.max_f_deviation(),
        max_abs_f12: outcome.max_abs_f12(),
        extrapolations: outcome.extrapolations,
        wall_time,
    };
    let text = format!(
        "problem,backend,status,iterations,res_rel,max_f_deviation,max_abs_f12,extrapolations,wall_time\n\
         {},{},{},{},{:e},{:e},{:e},{},{:.3}\n",
        summary.problem,
        backend_name(summary.backend),
        if summary.converged {
            "converged"
        } else {
            "not-converged"
        },
        summary.iterations,
        summary.res_rel,
        summary.max_f_deviation,
        summary.max_abs_f12,
        summary.extrapolations,
        summary.wall_time,
    );
    write_file(&cfg.out.join(SUMMARY_FILE), &text)?;
    print!("{text}");
    Ok(RunOutcome::Solved(summary))
}

fn backend_name(b: BackendKind) -> &'static str {
    match b {
        BackendKind::Oracle => "oracle",
        BackendKind::Lagpr => "lagpr",
        BackendKind::Knn => "knn",
    }
}

fn trace_csv(outcome: &SolveOutcome) -> String {
    let mut out = String::from("iter,res_abs,res_rel,n_refit,n_frozen\n");
    for r in &outcome.trace {
        let _ = writeln!(
            out,
            "{},{:e},{:e},{},{}",
            r.iter, r.res_abs, r.res_rel, r.n_refit, r.n_frozen
        );
    }
    out
}

fn nodes_csv(nodes: &[[f64; 3]], u: &[f64]) -> String {
    let mut out = String::from("node,x,y,z,ux,uy,uz\n");
    for (n, x) in nodes.iter().enumerate() {
        let d = &u[3 * n..3 * n + 3];
        let _ = writeln!(
            out,
            "{n},{:e},{:e},{:e},{:e},{:e},{:e}",
            x[0], x[1], x[2], d[0], d[1], d[2]
        );
    }
    out
}

fn gauss_csv(outcome: &SolveOutcome) -> String {
    let mut out = String::from("element,gp,F11,F12,F13,F21,F22,F23,F31,F32,F33,S11,S22,S33,S23,S31,S12\n");
    for (e, records) in outcome.gauss.iter().enumerate() {
        for (g, rec) in records.iter().enumerate() {
            let _ = write!(out, "{e},{g}");
            for i in 0..3 {
                for j in 0..3 {
                    let _ = write!(out, ",{:e}", rec.f[(i, j)]);
                }
            }
            for v in rec.s.0 {
                let _ = write!(out, ",{v:e}");
            }
            out.push('\n');
        }
    }
    out
}

/// Concatenates the reports and solve summaries of earlier run directories,
/// tagging each row with its directory.
fn report(cfg: &RunConfig) -> Result<RunOutcome, CliError> {
    if cfg.inputs.is_empty() {
        return Err(CliError::Config("report needs at least one run directory".into()));
    }
    let mut reports = String::new();
    let mut summaries = String::new();
    let mut runs = 0;
    for dir in &cfg.inputs {
        if !dir.is_dir() {
            return Err(CliError::io(
                dir,
                std::io::Error::new(std::io::ErrorKind::NotFound, "run directory does not exist"),
            ));
        }
        let mut found = false;
        for (file, acc) in [(REPORT_FILE, &mut reports), (SUMMARY_FILE, &mut summaries)] {
            let path = dir.join(file);
            if !path.is_file() {
                continue;
            }
            found = true;
            let (header, body) = read_table(&path)?;
            if acc.is_empty() {
                let _ = writeln!(acc, "run,{header}");
            } else if !acc.starts_with(&format!("run,{header}\n")) {
                return Err(CliError::Config(format!(
                    "{}: columns differ from earlier runs",
                    path.display()
                )));
            }
            for line in body {
                let _ = writeln!(acc, "{},{line}", dir.display());
            }
        }
        if !found {
            return Err(CliError::Config(format!(
                "{}: no {REPORT_FILE} or {SUMMARY_FILE}",
                dir.display()
            )));
        }
        runs += 1;
    }
    for (file, acc) in [(COMBINED_REPORT_FILE, &reports), (COMBINED_SUMMARY_FILE, &summaries)] {
        if !acc.is_empty() {
            write_file(&cfg.out.join(file), acc)?;
            print!("{acc}");
        }
    }
    Ok(RunOutcome::Reported { runs })
}

fn read_table(path: &Path) -> Result<(String, Vec<String>), CliError> {
    let bad = |e: csv::Error| CliError::Config(format!("{}: {e}", path.display()));
    let file = fs::File::open(path).map_err(|e| CliError::io(path, e))?;
    let mut reader = csv::Reader::from_reader(file);
    let header = reader.headers().map_err(bad)?.iter().collect::<Vec<_>>().join(",");
    let mut body = Vec::new();
    for rec in reader.records() {
        body.push(rec.map_err(bad)?.iter().collect::<Vec<_>>().join(","));
    }
    Ok((header, body))
}
