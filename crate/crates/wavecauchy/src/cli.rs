//! Command-line front end.
//!
//! Exit codes: 0 success, 1 numerical-check failure, 2 config error,
//! 3 I/O or trace-file error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use rayon::prelude::*;
use wavecauchy_core::domain::Domain;
use wavecauchy_core::kernel::KernelParams;
use wavecauchy_core::reconstruct::{first_increase, h_sweep, reconstruct_point, suggest_h, ReconstructError, ReconstructionResult, TargetPoint};
use wavecauchy_core::synth::{add_noise, BoundaryTrace, GroundTruth};

use crate::bench::{stability_bench, write_bench, BenchSetup};
use crate::checks::run_all;
use crate::config::{ConfigError, RunConfig};
use crate::data::{fd_trace, par_exact_trace};
use crate::results::{num, write_results};
use crate::trace_io::{read_trace, write_trace, ParseError};

#[derive(Debug, Parser)]
#[command(name = "wavecauchy", version, about = "Interior wave fields from boundary normal-derivative traces")]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true, env = "WAVECAUCHY_THREADS")]
    threads: Option<usize>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run the kernel invariant suite; writes validate_kernel.csv.
    ValidateKernel(Common),
    /// Closed-form mode trace, optionally noisy; writes trace.csv.
    GenData(Common),
    /// Finite-difference trace on a rectangle; writes trace.csv.
    SolveFd(Common),
    /// Reconstruct at the configured targets; writes reconstruct.csv.
    Reconstruct(Common),
    /// Reconstruct over `sweep.h_list`; writes sweep.csv.
    Sweep(Common),
    /// Full- versus partial-boundary errors across noise levels; writes stability.csv.
    StabilityBench(Common),
}

#[derive(Debug, Args)]
struct Common {
    /// Run configuration (TOML).
    #[arg(long)]
    config: Option<PathBuf>,
    /// Output directory.
    #[arg(long, default_value = ".")]
    out: PathBuf,
}

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error(transparent)]
    Config(#[from] ConfigError),
    #[error("{path}: {source}")]
    Io { path: PathBuf, source: std::io::Error },
    #[error("{path}: {source}")]
    Parse { path: PathBuf, source: ParseError },
    #[error("{0}")]
    Numerical(String),
}

impl CliError {
    pub fn exit_code(&self) -> i32 {
        match self {
            CliError::Numerical(_) => 1,
            CliError::Config(_) => 2,
            CliError::Io { .. } | CliError::Parse { .. } => 3,
        }
    }
}

impl From<ReconstructError> for CliError {
    fn from(e: ReconstructError) -> Self {
        match e {
            ReconstructError::Kernel(k) => CliError::Numerical(k.to_string()),
            ReconstructError::WindowCoverage { .. } => CliError::Config(ConfigError::new("trace", e.to_string())),
            other => CliError::Config(ConfigError::new("targets", other.to_string())),
        }
    }
}

fn io_err(path: &Path) -> impl FnOnce(std::io::Error) -> CliError + '_ {
    move |source| CliError::Io { path: path.to_path_buf(), source }
}

/// Parses arguments, runs the command and returns the exit code.
pub fn run<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { 2 } else { 0 };
        }
    };
    let mut pool = rayon::ThreadPoolBuilder::new();
    if let Some(n) = cli.threads {
        if n == 0 {
            eprintln!("error: --threads must be at least 1");
            return 2;
        }
        pool = pool.num_threads(n);
    }
    let pool = match pool.build() {
        Ok(p) => p,
        Err(e) => {
            eprintln!("error: {e}");
            return 1;
        }
    };
    match pool.install(|| execute(&cli.command)) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            e.exit_code()
        }
    }
}

struct Loaded {
    config: RunConfig,
    dir: PathBuf,
    out: PathBuf,
}

fn load(common: &Common, required: bool) -> Result<Loaded, CliError> {
    let (config, dir) = match &common.config {
        Some(path) => {
            let text = fs::read_to_string(path).map_err(io_err(path))?;
            let dir = path.parent().map(Path::to_path_buf).unwrap_or_default();
            (RunConfig::parse(&text)?, dir)
        }
        None if required => return Err(ConfigError::new("--config", "this command needs a config file").into()),
        None => (RunConfig::default(), PathBuf::new()),
    };
    fs::create_dir_all(&common.out).map_err(io_err(&common.out))?;
    Ok(Loaded { config, dir, out: common.out.clone() })
}

fn create(path: &Path) -> Result<fs::File, CliError> {
    fs::File::create(path).map_err(io_err(path))
}

fn execute(command: &Command) -> Result<i32, CliError> {
    match command {
        Command::ValidateKernel(c) => validate_kernel(&load(c, false)?),
        Command::GenData(c) => gen_data(&load(c, true)?),
        Command::SolveFd(c) => solve_fd(&load(c, true)?),
        Command::Reconstruct(c) => reconstruct(&load(c, true)?),
        Command::Sweep(c) => sweep(&load(c, true)?),
        Command::StabilityBench(c) => stability(&load(c, true)?),
    }
}

fn validate_kernel(run: &Loaded) -> Result<i32, CliError> {
    let kp = run.config.kernel_params(Some(0.1))?;
    let reports = run_all(&kp);
    let path = run.out.join("validate_kernel.csv");
    let mut text = String::from("check,value,tolerance,margin,pass\n");
    for r in &reports {
        text.push_str(&format!("{},{},{},{},{}\n", r.name, num(r.value), num(r.tolerance), num(r.margin()), r.passed()));
    }
    fs::write(&path, text).map_err(io_err(&path))?;
    let failed: Vec<&str> = reports.iter().filter(|r| !r.passed()).map(|r| r.name).collect();
    if failed.is_empty() {
        println!("validate-kernel: {} checks passed (h = {})", reports.len(), kp.h);
        Ok(0)
    } else {
        println!("validate-kernel: failed {}", failed.join(", "));
        Ok(1)
    }
}

fn write_trace_file(trace: &BoundaryTrace, out: &Path) -> Result<(), CliError> {
    let path = out.join("trace.csv");
    write_trace(trace, create(&path)?).map_err(io_err(&path))
}

fn noisy(config: &RunConfig, trace: BoundaryTrace) -> Result<BoundaryTrace, CliError> {
    let (level, seed) = config.noise()?;
    add_noise(&trace, level, seed).map_err(|e| ConfigError::new("trace.noise", e.to_string()).into())
}

fn generated(config: &RunConfig) -> Result<BoundaryTrace, CliError> {
    let gt = config.ground_truth()?;
    par_exact_trace(&gt, config.n_boundary()?, config.time_grid()?).map_err(|e| ConfigError::new("trace", e.to_string()).into())
}

fn gen_data(run: &Loaded) -> Result<i32, CliError> {
    let trace = noisy(&run.config, generated(&run.config)?)?;
    write_trace_file(&trace, &run.out)?;
    println!("gen-data: {} × {} samples", trace.n_boundary(), trace.times.n);
    Ok(0)
}

fn solve_fd(run: &Loaded) -> Result<i32, CliError> {
    let gt = run.config.ground_truth()?;
    if !matches!(gt.domain(), Domain::Rectangle { .. }) {
        return Err(ConfigError::new("domain.kind", "the finite-difference solver needs `rect`").into());
    }
    let fd = run.config.fd.as_ref().ok_or_else(|| ConfigError::new("fd", "missing section"))?;
    let solution = fd_trace(&gt, fd.cells_per_unit, fd.courant, fd.half_window).map_err(|e| ConfigError::new("fd", e.to_string()))?;
    let exact = par_exact_trace(&gt, solution.trace.n_boundary(), solution.trace.times).map_err(|e| CliError::Numerical(e.to_string()))?;
    let error = trace_difference(&solution.trace, &exact);
    // the solver fixes its own sampling, so `[trace]` only matters for noise
    let trace = if run.config.trace.is_some() { noisy(&run.config, solution.trace)? } else { solution.trace };
    write_trace_file(&trace, &run.out)?;
    println!("solve-fd: {} × {} samples, max deviation from closed form {:.3e}", trace.n_boundary(), trace.times.n, error);
    Ok(0)
}

/// Largest difference over samples with nonzero quadrature weight.
pub fn trace_difference(a: &BoundaryTrace, b: &BoundaryTrace) -> f64 {
    (0..a.n_boundary())
        .filter(|&j| a.samples[j].weight > 0.0)
        .flat_map(|j| a.row(j).iter().zip(b.row(j)).map(|(x, y)| (x - y).abs()))
        .fold(0.0, f64::max)
}

/// The trace named in the config, or a generated one.
fn input_trace(run: &Loaded) -> Result<BoundaryTrace, CliError> {
    match run.config.trace_file(&run.dir) {
        Some(path) => {
            let text = fs::read_to_string(&path).map_err(io_err(&path))?;
            read_trace(&text).map_err(|source| CliError::Parse { path, source })
        }
        None => noisy(&run.config, generated(&run.config)?),
    }
}

/// Ground truth from the config when it describes the trace's domain.
fn truth_for(config: &RunConfig, trace: &BoundaryTrace) -> Result<Option<GroundTruth>, CliError> {
    if config.modes.is_empty() {
        return Ok(None);
    }
    let gt = config.ground_truth()?;
    Ok((gt.domain() == trace.domain).then_some(gt))
}

fn default_h(config: &RunConfig, trace: &BoundaryTrace) -> f64 {
    let noise = config.trace.as_ref().map_or(0.0, |t| t.noise);
    suggest_h(noise, trace.times.step())
}

fn attach(r: ReconstructionResult, tp: &TargetPoint, gt: &Option<GroundTruth>) -> ReconstructionResult {
    match gt {
        Some(gt) => r.with_truth(gt.u(tp.x, tp.y, tp.t)),
        None => r,
    }
}

fn reconstruct(run: &Loaded) -> Result<i32, CliError> {
    let trace = input_trace(run)?;
    let kp = run.config.kernel_params(Some(default_h(&run.config, &trace)))?;
    let targets = run.config.targets(trace.domain)?;
    let gt = truth_for(&run.config, &trace)?;
    let results = targets
        .par_iter()
        .map(|tp| reconstruct_point(&trace, tp, &kp).map(|r| (*tp, attach(r, tp, &gt))))
        .collect::<Result<Vec<_>, _>>()?;
    let path = run.out.join("reconstruct.csv");
    write_results(&results, create(&path)?).map_err(io_err(&path))?;
    summary("reconstruct", &results, kp.h);
    Ok(0)
}

fn summary(name: &str, results: &[(TargetPoint, ReconstructionResult)], h: f64) {
    let worst = results.iter().filter_map(|(_, r)| r.abs_error).fold(None, |m: Option<f64>, e| Some(m.map_or(e, |m| m.max(e))));
    match worst {
        Some(e) => println!("{name}: {} targets at h = {h}, max abs_error {e:.6e}", results.len()),
        None => println!("{name}: {} targets at h = {h}", results.len()),
    }
}

fn sweep(run: &Loaded) -> Result<i32, CliError> {
    let trace = input_trace(run)?;
    let kp = run.config.kernel_params(Some(default_h(&run.config, &trace)))?;
    let hs = run.config.h_list()?;
    let targets = run.config.targets(trace.domain)?;
    let gt = truth_for(&run.config, &trace)?;
    let per_target = targets
        .par_iter()
        .map(|tp| {
            let truth = gt.as_ref().map(|g| g.u(tp.x, tp.y, tp.t));
            h_sweep(&trace, tp, &hs, &kp, truth).map(|rs| rs.into_iter().map(|r| (*tp, r)).collect::<Vec<_>>())
        })
        .collect::<Result<Vec<_>, _>>()?;
    for rows in &per_target {
        let errors: Vec<f64> = rows.iter().filter_map(|(_, r)| r.abs_error).collect();
        if let (Some((tp, _)), false) = (rows.first(), errors.is_empty()) {
            match first_increase(&errors) {
                Some(i) => println!("sweep: ({}, {}, {}) error stops decreasing at h = {}", tp.x, tp.y, tp.t, hs[i]),
                None => println!("sweep: ({}, {}, {}) error decreases over the whole sweep", tp.x, tp.y, tp.t),
            }
        }
    }
    let rows: Vec<_> = per_target.into_iter().flatten().collect();
    let path = run.out.join("sweep.csv");
    write_results(&rows, create(&path)?).map_err(io_err(&path))?;
    Ok(0)
}

fn stability(run: &Loaded) -> Result<i32, CliError> {
    let config = &run.config;
    let gt = config.ground_truth()?;
    let clean = generated(config)?;
    let kp: KernelParams = config.kernel_params(None)?;
    let section = config.stability.clone().ok_or_else(|| ConfigError::new("stability", "missing section"))?;
    for (i, &level) in section.noise_levels.iter().enumerate() {
        if !(level.is_finite() && level >= 0.0) {
            return Err(ConfigError::new(format!("stability.noise_levels[{i}]"), "must be nonnegative").into());
        }
    }
    if let Some(alpha) = section.alpha {
        if !(-std::f64::consts::PI..=std::f64::consts::PI).contains(&alpha) {
            return Err(ConfigError::new("stability.alpha", "must lie in [-π, π]").into());
        }
    }
    let setup = BenchSetup {
        kp,
        levels: section.noise_levels.clone(),
        seeds: section.seeds,
        base_seed: config.trace.as_ref().map_or(0, |t| t.seed),
        alpha: section.alpha,
    };
    let targets = config.targets(clean.domain)?;
    let rows = stability_bench(&clean, &targets, |tp| gt.u(tp.x, tp.y, tp.t), &setup)?;
    let path = run.out.join("stability.csv");
    write_bench(&rows, create(&path)?).map_err(io_err(&path))?;
    for r in &rows {
        println!(
            "stability-bench: noise {} full error {:.3e} partial error {:.3e} noise ratio {:.3}",
            r.noise,
            r.full_abs_error(),
            r.partial_abs_error(),
            r.noise_ratio()
        );
    }
    Ok(0)
}
