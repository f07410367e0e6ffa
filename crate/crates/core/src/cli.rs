//! Command-line front end: `run`, `oc`, `export-qubo`, `bench`.
//!
//! Exit codes: 0 success, 2 invalid input or arguments, 3 solver or FEM failure.

use std::fmt::Write as _;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Duration;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rayon::prelude::*;

use crate::driver::{run_annealing_optimization, RunConfig, RunFailure, RunResult};
use crate::error::Error;
use crate::fem::FemModel;
use crate::model::{build_benchmark, load_problem, Problem};
use crate::oc::{run_oc, OcParams};
use crate::output::{fmt_f64, write_bundle, RunSummary};
use crate::qubo::{build_qubo, make_layout, PenaltyConfig};
use crate::solvers::{write_exchange, SaParams, SolverChoice, EXHAUSTIVE_CAP};

pub const EXIT_OK: i32 = 0;
pub const EXIT_INVALID: i32 = 2;
pub const EXIT_FAILURE: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "anneal-topo", version, about = "Topology optimization with QUBO design updates")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run the annealing optimization loop and write a result bundle.
    Run(RunArgs),
    /// Run the optimality-criteria baseline.
    Oc(OcArgs),
    /// Write the QUBO of one design iteration in exchange format.
    ExportQubo(ExportArgs),
    /// Run a benchmark suite and print a summary table.
    Bench(BenchArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum SolverName {
    Sa,
    Exhaustive,
    Remote,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Truss,
    Continuum,
}

#[derive(Debug, Clone, Args)]
pub struct ProblemArgs {
    /// Problem file or `benchmark:<name>`.
    #[arg(long)]
    pub problem: String,
    /// Multiplies every applied load.
    #[arg(long)]
    pub load_scale: Option<f64>,
}

#[derive(Debug, Clone, Args)]
pub struct ConfigArgs {
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Element cap Θ_e.
    #[arg(long)]
    pub theta: Option<f64>,
    #[arg(long)]
    pub theta_s: Option<f64>,
    #[arg(long)]
    pub rho0: Option<f64>,
    #[arg(long)]
    pub v_target: Option<f64>,
    /// Qubits per element.
    #[arg(long)]
    pub nq: Option<usize>,
    /// Slack qubits.
    #[arg(long)]
    pub ns: Option<usize>,
    #[arg(long)]
    pub max_iter: Option<usize>,
    /// Relative objective change counted as settled.
    #[arg(long)]
    pub tol: Option<f64>,
    #[arg(long)]
    pub window: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct SolverArgs {
    #[arg(long, value_enum, default_value = "sa")]
    pub solver: SolverName,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long)]
    pub sweeps: Option<usize>,
    #[arg(long)]
    pub restarts: Option<usize>,
    /// Fixed initial SA temperature (default: probed).
    #[arg(long)]
    pub t0: Option<f64>,
    #[arg(long)]
    pub cooling: Option<f64>,
    /// Qubit limit of the exhaustive solver.
    #[arg(long, default_value_t = EXHAUSTIVE_CAP)]
    pub cap: usize,
    /// HTTP endpoint of the remote solver.
    #[arg(long)]
    pub endpoint: Option<String>,
    /// Remote request timeout, seconds.
    #[arg(long, default_value_t = 60.0)]
    pub timeout: f64,
}

#[derive(Debug, Clone, Args)]
pub struct RunArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct OcArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[arg(long)]
    pub v_target: f64,
    #[arg(long, default_value_t = 0.2)]
    pub move_limit: f64,
    #[arg(long, default_value_t = 0.5)]
    pub eta: f64,
    #[arg(long, default_value_t = 200)]
    pub max_iter: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct ExportArgs {
    #[command(flatten)]
    pub problem: ProblemArgs,
    #[command(flatten)]
    pub config: ConfigArgs,
    #[command(flatten)]
    pub solver: SolverArgs,
    /// Design iteration whose QUBO is written; earlier iterations are run
    /// with the chosen solver.
    #[arg(long, default_value_t = 0)]
    pub iteration: usize,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Clone, Args)]
pub struct BenchArgs {
    #[arg(long, value_enum)]
    pub suite: Suite,
    /// Seeded annealing runs per benchmark.
    #[arg(long, default_value_t = 1)]
    pub seeds: u64,
    #[arg(long)]
    pub out: PathBuf,
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_cli<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<std::ffi::OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(c) => c,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_INVALID } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    let result = match cli.command {
        Command::Run(a) => cmd_run(&a),
        Command::Oc(a) => cmd_oc(&a),
        Command::ExportQubo(a) => cmd_export_qubo(&a),
        Command::Bench(a) => cmd_bench(&a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

pub fn exit_code(e: &Error) -> i32 {
    if e.is_validation() {
        EXIT_INVALID
    } else {
        EXIT_FAILURE
    }
}

/// Resolves `benchmark:<name>` or a file path.
pub fn resolve_problem(args: &ProblemArgs) -> Result<(String, Problem, Option<RunConfig>), Error> {
    let (name, problem, config) = match args.problem.strip_prefix("benchmark:") {
        Some(name) => (name.to_string(), build_benchmark(name)?, RunConfig::for_benchmark(name)),
        None => {
            let p = load_problem(&args.problem)?;
            let name = p.name.clone().unwrap_or_else(|| {
                Path::new(&args.problem)
                    .file_stem()
                    .map_or_else(|| args.problem.clone(), |s| s.to_string_lossy().into_owned())
            });
            (name, p, None)
        }
    };
    let problem = match args.load_scale {
        Some(s) if !(s.is_finite() && s != 0.0) => {
            return Err(Error::Config(format!("load scale must be finite and nonzero, got {s}")))
        }
        Some(s) => problem.with_load_scale(s),
        None => problem,
    };
    Ok((name, problem, config))
}

fn build_config(problem: &Problem, base: Option<RunConfig>, c: &ConfigArgs, s: &SolverArgs) -> Result<RunConfig, Error> {
    let mut cfg = base.unwrap_or_else(|| RunConfig::for_problem(problem));
    if let Some(v) = c.lambda {
        cfg.lambda = v;
    }
    if let Some(v) = c.theta {
        cfg.theta_e = v;
    }
    if let Some(v) = c.theta_s {
        cfg.theta_s = v;
    }
    if let Some(v) = c.rho0 {
        cfg.rho0 = v;
    }
    if let Some(v) = c.v_target {
        cfg.v_target = v;
    }
    if let Some(v) = c.nq {
        cfg.n_q = v;
    }
    if let Some(v) = c.ns {
        cfg.n_s = v;
    }
    if let Some(v) = c.max_iter {
        cfg.max_iterations = v;
    }
    if let Some(v) = c.tol {
        cfg.tolerance = v;
    }
    if let Some(v) = c.window {
        cfg.window = v;
    }
    cfg.seed = s.seed;
    cfg.solver = match s.solver {
        SolverName::Sa => {
            let d = SaParams::default();
            SolverChoice::Sa(SaParams {
                sweeps: s.sweeps.unwrap_or(d.sweeps),
                restarts: s.restarts.unwrap_or(d.restarts),
                initial_temperature: s.t0,
                cooling: s.cooling.unwrap_or(d.cooling),
                seed: s.seed,
            })
        }
        SolverName::Exhaustive => SolverChoice::Exhaustive { cap: s.cap },
        SolverName::Remote => {
            let endpoint = s
                .endpoint
                .clone()
                .ok_or_else(|| Error::Config("--solver remote requires --endpoint".into()))?;
            if !(s.timeout > 0.0 && s.timeout.is_finite()) {
                return Err(Error::Config(format!("timeout must be positive, got {}", s.timeout)));
            }
            SolverChoice::Remote {
                endpoint,
                timeout: Duration::from_secs_f64(s.timeout),
            }
        }
    };
    cfg.validate()?;
    Ok(cfg)
}

fn report(result: &RunResult, dir: &Path) {
    println!(
        "{}: objective {} volume ratio {} after {} iterations (converged: {}), TFS {} s -> {}",
        result.method,
        fmt_f64(result.final_objective),
        fmt_f64(result.final_volume_ratio),
        result.iterations,
        result.converged,
        fmt_f64(result.tfs_s),
        dir.display()
    );
}

fn failure(f: RunFailure) -> Error {
    if !f.history.is_empty() {
        eprintln!("run aborted after {} completed iterations", f.history.len());
    }
    f.error
}

pub fn cmd_run(a: &RunArgs) -> Result<(), Error> {
    let (name, problem, base) = resolve_problem(&a.problem)?;
    let cfg = build_config(&problem, base, &a.config, &a.solver)?;
    let result = run_annealing_optimization(&problem, &cfg).map_err(failure)?;
    let summary = RunSummary::new(&name, &problem, &result, cfg.v_target, Some(cfg.seed));
    write_bundle(&a.out, &problem, &result, &summary)?;
    report(&result, &a.out);
    Ok(())
}

pub fn cmd_oc(a: &OcArgs) -> Result<(), Error> {
    let (name, problem, _) = resolve_problem(&a.problem)?;
    let params = OcParams {
        move_limit: a.move_limit,
        eta: a.eta,
        max_iterations: a.max_iter,
        ..OcParams::default()
    };
    params.validate().map_err(|e| Error::Config(e.to_string()))?;
    if !(a.v_target > 0.0 && a.v_target <= 1.0) {
        return Err(Error::Config(format!("v_target must lie in (0, 1], got {}", a.v_target)));
    }
    let result = run_oc(&problem, &params, a.v_target).map_err(failure)?;
    let summary = RunSummary::new(&name, &problem, &result, a.v_target, None);
    write_bundle(&a.out, &problem, &result, &summary)?;
    report(&result, &a.out);
    Ok(())
}

pub fn cmd_export_qubo(a: &ExportArgs) -> Result<(), Error> {
    let (_, problem, base) = resolve_problem(&a.problem)?;
    let mut cfg = build_config(&problem, base, &a.config, &a.solver)?;
    cfg.max_iterations = a.iteration;
    cfg.window = a.iteration + 1;
    let state = run_annealing_optimization(&problem, &cfg).map_err(failure)?.final_state;
    let model = FemModel::new(&problem);
    let (_, u) = model.solve(&state.rho)?;
    let se = model.strain_energies(&state.rho, &u);
    let layout = make_layout(problem.n_elements(), cfg.n_q, cfg.n_s)?;
    let penalty = PenaltyConfig {
        lambda: cfg.lambda,
        theta_s: cfg.theta_s,
        v_target: cfg.v_target,
    };
    let qubo = build_qubo(&problem, &state, &se, &penalty, &layout)?;
    if let Some(parent) = a.out.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent)?;
    }
    write_exchange(&qubo, fs::File::create(&a.out)?)?;
    println!("wrote {} qubits to {}", qubo.n_qubits(), a.out.display());
    Ok(())
}

/// Benchmarks of a suite.
pub fn suite_members(suite: Suite) -> &'static [&'static str] {
    match suite {
        Suite::Truss => &["truss6", "truss21", "truss29"],
        Suite::Continuum => &["coat_hanger", "cantilever_80x40", "cube_20", "lshape_40x40x5"],
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct BenchRow {
    pub benchmark: String,
    pub method: String,
    pub runs: usize,
    pub mean_objective: f64,
    pub best_objective: f64,
    pub volume_ratio: f64,
    pub iterations: f64,
    pub tfs_s: f64,
    pub status: String,
}

pub const BENCH_HEADER: &str = "benchmark\tmethod\truns\tmean_f_obj\tbest_f_obj\tvolume_ratio\tI_N\tTFS_s\tstatus";

fn bench_row(benchmark: &str, method: &str, runs: Vec<Result<RunResult, String>>) -> BenchRow {
    let ok: Vec<&RunResult> = runs.iter().filter_map(|r| r.as_ref().ok()).collect();
    let errors: Vec<&String> = runs.iter().filter_map(|r| r.as_ref().err()).collect();
    let n = ok.len().max(1) as f64;
    let best = ok.iter().min_by(|a, b| a.final_objective.total_cmp(&b.final_objective));
    BenchRow {
        benchmark: benchmark.into(),
        method: method.into(),
        runs: ok.len(),
        mean_objective: ok.iter().map(|r| r.final_objective).sum::<f64>() / n,
        best_objective: best.map_or(f64::NAN, |r| r.final_objective),
        volume_ratio: best.map_or(f64::NAN, |r| r.final_volume_ratio),
        iterations: ok.iter().map(|r| r.iterations as f64).sum::<f64>() / n,
        tfs_s: ok.iter().map(|r| r.tfs_s).sum::<f64>() / n,
        status: match errors.first() {
            None => "ok".into(),
            Some(e) => format!("{} failed: {e}", errors.len()),
        },
    }
}

/// Runs every benchmark of the suite with `seeds` seeded annealing runs and
/// one OC run. Runs are spread over worker threads.
pub fn run_bench(suite: Suite, seeds: u64) -> Vec<BenchRow> {
    let names = suite_members(suite);
    let jobs: Vec<(&str, Option<u64>)> = names
        .iter()
        .flat_map(|&n| (0..seeds).map(move |s| (n, Some(s))).chain(std::iter::once((n, None))))
        .collect();
    let results: Vec<Result<RunResult, String>> = jobs
        .par_iter()
        .map(|&(name, seed)| {
            let problem = build_benchmark(name).map_err(|e| e.to_string())?;
            let cfg = RunConfig::for_benchmark(name).expect("benchmark has parameters");
            match seed {
                Some(s) => {
                    let cfg = RunConfig { seed: s, ..cfg };
                    run_annealing_optimization(&problem, &cfg).map_err(|e| e.to_string())
                }
                None => run_oc(&problem, &OcParams::default(), cfg.v_target).map_err(|e| e.to_string()),
            }
        })
        .collect();
    let mut rows = Vec::new();
    let mut it = jobs.iter().zip(results);
    for &name in names {
        let sa: Vec<_> = it.by_ref().take(seeds as usize).map(|(_, r)| r).collect();
        let oc: Vec<_> = it.by_ref().take(1).map(|(_, r)| r).collect();
        if seeds > 0 {
            rows.push(bench_row(name, "sa", sa));
        }
        rows.push(bench_row(name, "oc", oc));
    }
    rows
}

pub fn bench_table(rows: &[BenchRow]) -> String {
    let mut s = String::from(BENCH_HEADER);
    s.push('\n');
    for r in rows {
        let _ = writeln!(
            s,
            "{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}\t{}",
            r.benchmark,
            r.method,
            r.runs,
            fmt_f64(r.mean_objective),
            fmt_f64(r.best_objective),
            fmt_f64(r.volume_ratio),
            r.iterations,
            fmt_f64(r.tfs_s),
            r.status
        );
    }
    s
}

pub fn cmd_bench(a: &BenchArgs) -> Result<(), Error> {
    let rows = run_bench(a.suite, a.seeds);
    let table = bench_table(&rows);
    fs::create_dir_all(&a.out)?;
    fs::write(a.out.join("bench.tsv"), &table)?;
    print!("{table}");
    if rows.iter().any(|r| r.runs > 0) {
        Ok(())
    } else {
        Err(Error::Io(std::io::Error::other("every benchmark run failed")))
    }
}
