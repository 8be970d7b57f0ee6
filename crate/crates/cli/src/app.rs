//! Argument parsing and dispatch.

use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand};
use serde_json::Value;

use crate::commands::{run_assemble, run_plan, run_solve, run_test1, run_test2};
use crate::config::{Config, RunConfig};
use crate::error::CliError;

#[derive(Debug, Parser)]
#[command(name = "wos", version, about = "Walk-on-spheres solver for the Dirichlet Poisson problem")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Estimate u at the configured points.
    Solve(Common),
    /// Plan (eps0, K, M, N) for a target accuracy gamma and confidence eta.
    Plan(PlanArgs),
    /// Shell survival probability against its bound over an M sweep.
    Test1(Common),
    /// L1 and sup errors against the exact solution over an N sweep.
    Test2(Common),
    /// Build the frozen-randomness solution network and audit it.
    AssembleNn(Common),
}

#[derive(Debug, Args, Clone, Default)]
pub struct Common {
    /// Flat key-value JSON configuration file.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Master seed (overrides WOS_SEED and solver.seed).
    #[arg(long)]
    pub seed: Option<u64>,
    /// Worker threads (results do not depend on it).
    #[arg(long)]
    pub threads: Option<usize>,
    /// Output path (CSV, or network JSON for assemble-nn).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Override a configuration key, e.g. --set solver.N=1000.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    pub overrides: Vec<String>,
}

#[derive(Debug, Args, Clone, Default)]
pub struct PlanArgs {
    #[command(flatten)]
    pub common: Common,
    #[arg(long)]
    pub gamma: Option<f64>,
    #[arg(long)]
    pub eta: Option<f64>,
    /// Hölder exponent of g and f.
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub g_inf: Option<f64>,
    #[arg(long)]
    pub g_alpha: Option<f64>,
    #[arg(long)]
    pub f_inf: Option<f64>,
    #[arg(long)]
    pub f_alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
    /// Use the defective-convex step count (default: when the domain has one).
    #[arg(long)]
    pub defective: Option<bool>,
    /// Domain kind (hypercube, annular_hypercube, ball, annulus).
    #[arg(long)]
    pub domain: Option<String>,
    #[arg(long)]
    pub dim: Option<usize>,
}

#[derive(Debug, Default)]
pub struct Output {
    pub stdout: String,
    /// Set when a checked inequality failed; outputs are still written.
    pub failure: Option<String>,
}

/// Loads the configuration and applies overrides: file, then `--set`,
/// then `WOS_SEED`, then `--seed` and `--out`.
pub fn load_config(common: &Common, env_seed: Option<&str>) -> Result<Config, CliError> {
    let mut cfg = match &common.config {
        Some(p) => Config::load(p)?,
        None => Config::empty(),
    };
    for kv in &common.overrides {
        let (k, v) = kv.split_once('=').ok_or_else(|| CliError::Config(format!("--set expects KEY=VALUE, got '{kv}'")))?;
        cfg.set_raw(k.trim(), v.trim())?;
    }
    if let Some(s) = env_seed {
        let s: u64 = s.trim().parse().map_err(|_| CliError::Config(format!("WOS_SEED must be a u64, got '{s}'")))?;
        cfg.set("solver.seed", Value::from(s))?;
    }
    if let Some(s) = common.seed {
        cfg.set("solver.seed", Value::from(s))?;
    }
    if let Some(o) = &common.out {
        cfg.set("out", Value::from(o.display().to_string()))?;
    }
    Ok(cfg)
}

fn write(path: &Path, bytes: &[u8]) -> Result<(), CliError> {
    if let Some(dir) = path.parent().filter(|d| !d.as_os_str().is_empty()) {
        std::fs::create_dir_all(dir)?;
    }
    std::fs::write(path, bytes).map_err(|e| CliError::Io(format!("{}: {e}", path.display())))
}

/// `<stem>_hist.csv` next to `out`.
pub fn hist_path(out: &Path) -> PathBuf {
    let stem = out.file_stem().map_or("out".into(), |s| s.to_string_lossy().into_owned());
    out.with_file_name(format!("{stem}_hist.csv"))
}

/// CSV to the output path, or to stdout when none is given.
fn emit_csv(out: &mut Output, path: Option<&Path>, csv: String) -> Result<(), CliError> {
    match path {
        Some(p) => write(p, csv.as_bytes()),
        None => {
            out.stdout.push_str(&csv);
            Ok(())
        }
    }
}

fn plan_overrides(cfg: &mut Config, a: &PlanArgs) -> Result<(), CliError> {
    let nums = [
        ("plan.gamma", a.gamma),
        ("plan.eta", a.eta),
        ("problem.alpha", a.alpha),
        ("problem.g_inf", a.g_inf),
        ("problem.g_alpha", a.g_alpha),
        ("problem.f_inf", a.f_inf),
        ("problem.f_alpha", a.f_alpha),
        ("solver.beta", a.beta),
    ];
    for (k, v) in nums {
        if let Some(v) = v {
            cfg.set(k, Value::from(v))?;
        }
    }
    if let Some(b) = a.defective {
        cfg.set("plan.defective", Value::from(b))?;
    }
    if let Some(k) = &a.domain {
        cfg.set("domain.kind", Value::from(k.clone()))?;
    }
    if let Some(d) = a.dim {
        cfg.set("domain.dim", Value::from(d))?;
    }
    Ok(())
}

fn run(command: &Command, cfg: &Config) -> Result<Output, CliError> {
    let rc = RunConfig::from_config(cfg)?;
    let mut out = Output::default();
    let path = rc.out.clone();
    match command {
        Command::Solve(_) => {
            let t = run_solve(cfg, &rc)?;
            emit_csv(&mut out, path.as_deref(), t.to_csv()?)?;
        }
        Command::Test1(_) => {
            let r = run_test1(cfg, &rc)?;
            emit_csv(&mut out, path.as_deref(), r.table.to_csv()?)?;
            if !r.violations.is_empty() {
                out.failure = Some(r.violations.join("; "));
            }
        }
        Command::Test2(_) => {
            let r = run_test2(cfg, &rc)?;
            emit_csv(&mut out, path.as_deref(), r.table.to_csv()?)?;
            let hist = match (cfg.str("test2.hist")?, &path) {
                (Some(h), _) => Some(PathBuf::from(h)),
                (None, Some(p)) => Some(hist_path(p)),
                (None, None) => None,
            };
            if let Some(h) = hist {
                write(&h, r.hist.to_csv()?.as_bytes())?;
            }
        }
        Command::Plan(_) => {
            let r = run_plan(cfg, &rc)?;
            if let Some(p) = &path {
                write(p, r.text.as_bytes())?;
            }
            out.stdout = r.text;
        }
        Command::AssembleNn(_) => {
            let r = run_assemble(cfg, &rc)?;
            if let Some(p) = &path {
                let dense = cfg.usize("nn.dense_limit")?.unwrap_or(4096);
                let json = serde_json::to_string(&r.net.to_json(dense)).map_err(|e| CliError::Io(e.to_string()))?;
                write(p, json.as_bytes())?;
            }
            out.stdout = r.text();
            if !r.violations.is_empty() {
                out.failure = Some(r.violations.join("; "));
            }
        }
    }
    Ok(out)
}

pub fn execute(cli: &Cli, env_seed: Option<&str>) -> Result<Output, CliError> {
    let common = match &cli.command {
        Command::Solve(c) | Command::Test1(c) | Command::Test2(c) | Command::AssembleNn(c) => c,
        Command::Plan(p) => &p.common,
    };
    let mut cfg = load_config(common, env_seed)?;
    if let Command::Plan(p) = &cli.command {
        plan_overrides(&mut cfg, p)?;
    }
    match common.threads {
        Some(0) => Err(CliError::Config("--threads must be at least 1".into())),
        Some(n) => wos_core::wos::with_workers(n, || run(&cli.command, &cfg))?,
        None => run(&cli.command, &cfg),
    }
}
