//! The `wpcj` command line.

use std::path::PathBuf;

use clap::{Args, Parser, Subcommand};
use wpcj_core::oracle::{oracle_srm, oracle_tpm};
use wpcj_core::sdp_schemes::{solve_b_cj_srm, solve_b_cj_tpm};

use crate::bench::benchmark_scaling;
use crate::config::{get, get_list, read_kv, KeyValues};
use crate::csv_io::emit_csv;
use crate::error::{HarnessError, Result};
use crate::experiment::{run_experiment, ExperimentSpec, FigureId, SchemeId};
use crate::fixtures::Fixture;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILURE: i32 = 1;
pub const EXIT_VIOLATION: i32 = 2;

/// Relative tolerance between the solvers and exhaustive search.
pub const ORACLE_REL_TOL: f64 = 0.02;

#[derive(Debug, Parser)]
#[command(name = "wpcj", version, about = "Secure beamforming with wireless-powered jamming nodes")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a figure sweep and write a result table.
    Run(RunArgs),
    /// Fit the growth of solve time with the number of nodes.
    Bench(BenchArgs),
    /// Compare the solvers with exhaustive search on a stored channel.
    Oracle(OracleArgs),
}

#[derive(Debug, Args)]
pub struct RunArgs {
    /// Key-value file with defaults for any of these flags.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long, value_parser = clap::value_parser!(u32).range(2..=6))]
    pub figure: Option<u32>,
    /// Comma-separated subset of srm, tpm, lc-srm, lc-tpm, zf.
    #[arg(long, value_delimiter = ',')]
    pub schemes: Option<Vec<String>>,
    /// Replaces the preset's sweep values.
    #[arg(long, value_delimiter = ',')]
    pub values: Option<Vec<f64>>,
    #[arg(long)]
    pub trials: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long)]
    pub gamma_e: Option<f64>,
    #[arg(long)]
    pub rician_k: Option<f64>,
    #[arg(long)]
    pub theta1: Option<f64>,
    /// Stopping threshold of LC-TPM in dB.
    #[arg(long)]
    pub theta2: Option<f64>,
    /// Fill the wall-time column. Output is then no longer reproducible.
    #[arg(long)]
    pub timing: bool,
}

#[derive(Debug, Args)]
pub struct BenchArgs {
    #[arg(long)]
    pub scheme: String,
    #[arg(long, value_delimiter = ',', default_value = "4,8,16,32")]
    pub n: Vec<usize>,
    #[arg(long, default_value_t = 8)]
    pub m: usize,
    #[arg(long, default_value_t = 3)]
    pub trials: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct OracleArgs {
    #[arg(long)]
    pub fixture: PathBuf,
    #[arg(long, default_value_t = 64)]
    pub grid: usize,
}

fn pick<T: std::str::FromStr>(cli: Option<T>, kv: &KeyValues, key: &str) -> Result<Option<T>> {
    match cli {
        Some(v) => Ok(Some(v)),
        None => get(kv, key),
    }
}

/// Builds the experiment from the flags, falling back to the config file
/// and then to the figure preset.
pub fn resolve_run(args: &RunArgs) -> Result<(ExperimentSpec, PathBuf)> {
    let kv = match &args.config {
        Some(p) => read_kv(p)?,
        None => KeyValues::new(),
    };
    let figure = pick(args.figure, &kv, "figure")?.ok_or_else(|| HarnessError::InvalidSpec("--figure is required".into()))?;
    let mut spec = ExperimentSpec::preset(FigureId::from_number(figure)?);
    let schemes = match &args.schemes {
        Some(s) => Some(s.clone()),
        None => get_list::<String>(&kv, "schemes")?,
    };
    if let Some(s) = schemes {
        spec.schemes = s.iter().map(|x| x.parse()).collect::<Result<_>>()?;
    }
    let values = match &args.values {
        Some(v) => Some(v.clone()),
        None => get_list(&kv, "values")?,
    };
    if let Some(v) = values {
        spec.values = v;
    }
    if let Some(t) = pick(args.trials, &kv, "trials")? {
        spec.trials = t;
    }
    if let Some(s) = pick(args.seed, &kv, "seed")? {
        spec.seed = s;
    }
    if let Some(g) = pick(args.gamma_e, &kv, "gamma-e")? {
        spec.template = spec.template.with_gamma_e(g)?;
    }
    if let Some(k) = pick(args.rician_k, &kv, "rician-k")? {
        spec.template = spec.template.with_rician_k(k)?;
    }
    if let Some(t) = pick(args.theta1, &kv, "theta1")? {
        spec.theta1 = t;
    }
    if let Some(t) = pick(args.theta2, &kv, "theta2")? {
        spec.theta2_db = t;
    }
    spec.record_timing = args.timing || get(&kv, "timing")?.unwrap_or(false);
    let out = match &args.out {
        Some(p) => p.clone(),
        None => get::<PathBuf>(&kv, "out")?.ok_or_else(|| HarnessError::InvalidSpec("--out is required".into()))?,
    };
    spec.validate()?;
    Ok((spec, out))
}

fn run(args: &RunArgs) -> Result<i32> {
    let (spec, out) = resolve_run(args)?;
    let report = run_experiment(&spec)?;
    emit_csv(&report.records, &out)?;
    for v in &report.violations {
        eprintln!("violation: {v}");
    }
    Ok(if report.violations.is_empty() { EXIT_OK } else { EXIT_VIOLATION })
}

fn bench(args: &BenchArgs) -> Result<i32> {
    let scheme: SchemeId = args.scheme.parse()?;
    let fit = benchmark_scaling(scheme, &args.n, args.m, args.trials, args.seed)?;
    for (n, t) in &fit.points {
        println!("N={n} mean_time_s={t:.6}");
    }
    println!("slope={:.3} r2={:.4}", fit.slope, fit.r2);
    Ok(EXIT_OK)
}

fn oracle(args: &OracleArgs) -> Result<i32> {
    let fx = Fixture::load(&args.fixture)?;
    let mut ok = true;
    let srm = solve_b_cj_srm(&fx.ch, &fx.cfg)?;
    let o = oracle_srm(&fx.ch, &fx.cfg, args.grid)?;
    let gap = (srm.sinr_d - o.value).abs() / srm.sinr_d;
    ok &= gap <= ORACLE_REL_TOL;
    println!("srm sinr_d={:.6e} oracle={:.6e} rel_gap={gap:.3e}", srm.sinr_d, o.value);
    match (solve_b_cj_tpm(&fx.ch, &fx.cfg), oracle_tpm(&fx.ch, &fx.cfg, args.grid)) {
        (Ok(t), Ok(o)) => {
            let p = t.design.bs_power();
            let gap = (o.value - p) / p;
            ok &= gap >= -ORACLE_REL_TOL;
            println!("tpm power_w={p:.6e} oracle={:.6e} rel_gap={gap:.3e}", o.value);
        }
        (Err(_), Err(_)) => println!("tpm infeasible (both)"),
        (t, o) => {
            ok = false;
            println!("tpm disagreement: solver {:?}, oracle {:?}", t.map(|r| r.objective).err(), o.map(|r| r.value).err());
        }
    }
    Ok(if ok { EXIT_OK } else { EXIT_VIOLATION })
}

/// Runs a parsed command line and returns the process exit code.
pub fn execute(cli: &Cli) -> i32 {
    let res = match &cli.command {
        Command::Run(a) => run(a),
        Command::Bench(a) => bench(a),
        Command::Oracle(a) => oracle(a),
    };
    match res {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e}");
            EXIT_FAILURE
        }
    }
}
