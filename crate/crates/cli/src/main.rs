//! `greensolve`: Green functions and bounded mild solutions of `u' = Au + φ` from JSON scenarios.

mod commands;
mod failure;
mod scenario;

use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use clap::{Parser, Subcommand};
use serde_json::{json, Value};

use commands::{Outcome, Settings};
use failure::{Failure, CHECK_FAILED};
use scenario::Scenario;

const DEFAULT_SEED: u64 = 0x5eed_2024;
const DEFAULT_OUT: &str = "greensolve-out";

#[derive(Parser, Debug)]
#[command(name = "greensolve", version, about = "Green functions and bounded mild solutions of u' = Au + phi")]
struct Cli {
    #[command(subcommand)]
    command: Command,
    /// Scenario JSON file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Output directory; overrides the scenario's `output_dir`.
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    #[arg(long, global = true, default_value_t = 1e-3)]
    tol_residual: f64,
    #[arg(long, global = true, default_value_t = 1e-3)]
    tol_transform: f64,
    /// Seed for randomized probes.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
    #[arg(long, global = true)]
    grid_t_max: Option<f64>,
    #[arg(long, global = true)]
    grid_n_near: Option<usize>,
}

#[derive(Subcommand, Debug, Clone, Copy)]
enum Command {
    /// Build G, export it and check its Fourier transform against the cutoff resolvent.
    Green,
    /// Run the full solution pipeline.
    Solve,
    /// Frequency set of the input.
    Spectrum,
    /// Residuals of a provided solution.
    Verify,
    /// Spike-train input with a bounded but not uniformly continuous solution.
    Counterexample {
        #[arg(long)]
        n_max: Option<usize>,
    },
    /// Resolvent decay fit.
    Decay,
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::Green => "green",
            Command::Solve => "solve",
            Command::Spectrum => "spectrum",
            Command::Verify => "verify",
            Command::Counterexample { .. } => "counterexample",
            Command::Decay => "decay",
        }
    }
}

fn fail(f: &Failure) -> ExitCode {
    eprintln!("{}", json!({ "error": f.to_json() }));
    ExitCode::from(f.code)
}

fn configure_threads() -> Result<Option<usize>, Failure> {
    let Ok(v) = std::env::var("GREENSOLVE_THREADS") else { return Ok(None) };
    let n: usize = v
        .trim()
        .parse()
        .ok()
        .filter(|&n| n > 0)
        .ok_or_else(|| Failure::config("Invalid", format!("GREENSOLVE_THREADS must be a positive integer, got {v:?}")))?;
    rayon::ThreadPoolBuilder::new().num_threads(n).build_global().map_err(|e| Failure::config("Invalid", e.to_string()))?;
    Ok(Some(n))
}

fn load_scenario(cli: &Cli) -> Result<Scenario, Failure> {
    let mut s = match (&cli.config, cli.command) {
        (Some(p), _) => Scenario::load(p)?,
        (None, Command::Counterexample { .. }) => Scenario::named("spike_train"),
        (None, c) => return Err(Failure::config("Invalid", format!("`{}` needs --config", c.name()))),
    };
    if let Some(t) = cli.grid_t_max {
        s.grid.t_max = t;
    }
    if let Some(n) = cli.grid_n_near {
        s.grid.n_near = n;
    }
    if let Command::Counterexample { n_max: Some(n) } = cli.command {
        s.n_max = n;
    }
    s.validate()?;
    Ok(s)
}

fn write_json(path: &Path, v: &Value) -> Result<(), Failure> {
    let mut text = serde_json::to_string_pretty(v).expect("json values serialize");
    text.push('\n');
    fs::write(path, text).map_err(Failure::io)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let threads = match configure_threads() {
        Ok(t) => t,
        Err(f) => return fail(&f),
    };
    let scenario = match load_scenario(&cli) {
        Ok(s) => s,
        Err(f) => return fail(&f),
    };
    let out = cli.out.clone().or_else(|| scenario.output_dir.clone()).unwrap_or_else(|| PathBuf::from(DEFAULT_OUT));
    if let Err(e) = fs::create_dir_all(&out) {
        return fail(&Failure::io(e));
    }
    let settings = Settings { tol_residual: cli.tol_residual, tol_transform: cli.tol_transform, seed: cli.seed };
    let run = match cli.command {
        Command::Green => commands::green,
        Command::Solve => commands::solve,
        Command::Spectrum => commands::spectrum,
        Command::Verify => commands::verify,
        Command::Counterexample { .. } => commands::counterexample,
        Command::Decay => commands::decay,
    };

    let (outcome, error) = match run(&scenario, &settings, &out) {
        Ok(o) => (o, None),
        Err(f) if f.code == CHECK_FAILED => (Outcome { checks: vec![], result: Value::Null, artifacts: vec![] }, Some(f)),
        Err(f) => return fail(&f),
    };
    let pass = error.is_none() && outcome.checks.iter().all(|c| c.pass);
    let report = json!({
        "command": cli.command.name(),
        "scenario": scenario.name,
        "status": if pass { "pass" } else { "fail" },
        "checks": outcome.checks,
        "error": error.as_ref().map(Failure::to_json),
        "result": outcome.result,
    });
    let mut artifacts = outcome.artifacts;
    artifacts.push("report.json".into());
    artifacts.push("manifest.json".into());
    let manifest = json!({
        "tool": "greensolve",
        "version": env!("CARGO_PKG_VERSION"),
        "command": cli.command.name(),
        "scenario": scenario,
        "settings": settings,
        "threads": threads,
        "artifacts": artifacts,
        "timestamp": SystemTime::now().duration_since(UNIX_EPOCH).map(|d| d.as_secs()).unwrap_or(0),
    });
    if let Err(f) = write_json(&out.join("report.json"), &report).and_then(|_| write_json(&out.join("manifest.json"), &manifest)) {
        return fail(&f);
    }
    match error {
        Some(f) => fail(&f),
        None if pass => ExitCode::SUCCESS,
        None => ExitCode::from(CHECK_FAILED),
    }
}
