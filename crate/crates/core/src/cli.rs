//! The `orgsim` command line: `run`, `validate`, `compare` and `models`.
//!
//! Exit codes are 0 on success, 1 for configuration or usage errors and 2
//! for failures during a run. Diagnostics go to standard error.

use std::ffi::OsString;
use std::fs;
use std::path::{Path, PathBuf};
use std::time::Instant;

use clap::{Parser, Subcommand};
use serde_json::{json, Map, Value};

use crate::error::Error;
use crate::harness::{self, BatchResult, ModelConfig, Scenario};

#[derive(Debug, Parser)]
#[command(name = "orgsim", version, about = "Replicated agent-based simulation experiments")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Run a scenario and write its metrics CSV and summary JSON.
    Run {
        scenario: PathBuf,
        #[arg(long)]
        seed: Option<u64>,
        #[arg(long)]
        ticks: Option<u64>,
        #[arg(long)]
        replications: Option<u32>,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// Check batch means against reference values with tolerances.
    Validate {
        scenario: PathBuf,
        #[arg(long)]
        reference: PathBuf,
    },
    /// Welch comparison of one final metric between two scenarios.
    Compare {
        a: PathBuf,
        b: PathBuf,
        #[arg(long)]
        metric: String,
        #[arg(long, default_value = ".")]
        out: PathBuf,
    },
    /// List the built-in models with their default parameters.
    Models,
}

pub const EXIT_OK: i32 = 0;
pub const EXIT_CONFIG: i32 = 1;
pub const EXIT_RUNTIME: i32 = 2;

#[derive(Debug)]
pub struct CliError {
    pub code: i32,
    pub message: String,
}

impl CliError {
    fn config(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_CONFIG,
            message: message.into(),
        }
    }

    fn runtime(message: impl Into<String>) -> Self {
        Self {
            code: EXIT_RUNTIME,
            message: message.into(),
        }
    }
}

impl From<Error> for CliError {
    fn from(e: Error) -> Self {
        if e.is_config() {
            CliError::config(e.to_string())
        } else {
            CliError::runtime(e.to_string())
        }
    }
}

type CliResult<T> = Result<T, CliError>;

/// Parses `args` (program name first), runs the command and returns the
/// process exit code.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { EXIT_CONFIG } else { EXIT_OK };
            let _ = e.print();
            return code;
        }
    };
    match execute(cli.command) {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("orgsim: {}", e.message);
            e.code
        }
    }
}

pub fn execute(command: Command) -> CliResult<()> {
    match command {
        Command::Run {
            scenario,
            seed,
            ticks,
            replications,
            out,
        } => cmd_run(&scenario, seed, ticks, replications, &out),
        Command::Validate { scenario, reference } => cmd_validate(&scenario, &reference),
        Command::Compare { a, b, metric, out } => cmd_compare(&a, &b, &metric, &out),
        Command::Models => {
            print!("{}", models_listing());
            Ok(())
        }
    }
}

fn read(path: &Path) -> CliResult<String> {
    fs::read_to_string(path).map_err(|e| CliError::config(format!("cannot read {}: {e}", path.display())))
}

fn write(path: &Path, contents: &str) -> CliResult<()> {
    fs::write(path, contents).map_err(|e| CliError::runtime(format!("cannot write {}: {e}", path.display())))
}

fn load(path: &Path) -> CliResult<Scenario> {
    harness::load_scenario(&read(path)?).map_err(|e| CliError::config(format!("{}: {e}", path.display())))
}

fn out_dir(dir: &Path) -> CliResult<()> {
    fs::create_dir_all(dir).map_err(|e| CliError::runtime(format!("cannot create {}: {e}", dir.display())))
}

/// File-name-safe form of a scenario name.
pub fn file_stem(name: &str) -> String {
    name.chars()
        .map(|c| if c.is_ascii_alphanumeric() || "-_.".contains(c) { c } else { '_' })
        .collect()
}

fn to_value<T: serde::Serialize>(x: &T) -> Value {
    serde_json::to_value(x).expect("serializable")
}

fn means(batch: &BatchResult) -> Map<String, Value> {
    batch
        .metric_names()
        .into_iter()
        .map(|m| {
            let xs = batch.final_metric(m).expect("metric listed by the batch");
            (m.to_string(), json!(harness::stats::mean(&xs)))
        })
        .collect()
}

fn cmd_run(
    path: &Path,
    seed: Option<u64>,
    ticks: Option<u64>,
    replications: Option<u32>,
    out: &Path,
) -> CliResult<()> {
    let mut scenario = load(path)?;
    let mut overrides = Map::new();
    if let Some(s) = seed {
        scenario.seed = s;
        overrides.insert("seed".into(), json!(s));
    }
    if let Some(t) = ticks {
        scenario.ticks = t;
        overrides.insert("ticks".into(), json!(t));
    }
    if let Some(r) = replications {
        scenario.replications = r;
        overrides.insert("replications".into(), json!(r));
    }
    scenario.validate()?;
    let started = Instant::now();
    let batch = harness::run_batch(&scenario)?;
    let wall = started.elapsed().as_secs_f64();
    out_dir(out)?;
    let stem = file_stem(&scenario.name);
    let csv_path = out.join(format!("{stem}.metrics.csv"));
    let summary_path = out.join(format!("{stem}.summary.json"));
    let runs: Vec<Value> = batch
        .replications
        .iter()
        .map(|r| json!({"replication": r.replication, "seed": r.seed, "ticks_run": r.ticks_run, "final": r.summary}))
        .collect();
    let summary = json!({
        "scenario": scenario.name,
        "model": batch.model,
        "source": path.display().to_string(),
        "seed": scenario.seed,
        "ticks": scenario.ticks,
        "replications": scenario.replications,
        "metric_interval": scenario.metric_interval,
        "overrides": overrides,
        "wall_time_seconds": wall,
        "parameters": to_value(&scenario),
        "mean_final": means(&batch),
        "runs": runs,
    });
    write(&csv_path, &harness::export_csv(&batch))?;
    write(&summary_path, &(serde_json::to_string_pretty(&summary).expect("json") + "\n"))?;
    println!("{}", csv_path.display());
    println!("{}", summary_path.display());
    Ok(())
}

fn cmd_validate(path: &Path, reference: &Path) -> CliResult<()> {
    let scenario = load(path)?;
    let refs =
        harness::load_reference(&read(reference)?).map_err(|e| CliError::config(format!("{}: {e}", reference.display())))?;
    let batch = harness::run_batch(&scenario)?;
    let report = harness::validate_baseline(&batch, &refs)?;
    println!("{}", serde_json::to_string_pretty(&report).expect("json"));
    for m in report.metrics.iter().filter(|m| !m.pass) {
        eprintln!(
            "orgsim: {} mean {} deviates from {} by {} (tolerance {})",
            m.metric, m.simulated_mean, m.reference, m.deviation, m.tolerance
        );
    }
    Ok(())
}

fn cmd_compare(a: &Path, b: &Path, metric: &str, out: &Path) -> CliResult<()> {
    let sa = load(a)?;
    let sb = load(b)?;
    if sa.model.name() != sb.model.name() {
        return Err(CliError::config(format!(
            "cannot compare model {} ({}) with model {} ({})",
            sa.model.name(),
            a.display(),
            sb.model.name(),
            b.display()
        )));
    }
    if sa.replications < 2 || sb.replications < 2 {
        return Err(Error::InsufficientReplications {
            n_a: sa.replications as usize,
            n_b: sb.replications as usize,
        }
        .into());
    }
    let ba = harness::run_batch(&sa)?;
    let bb = harness::run_batch(&sb)?;
    let cmp = harness::compare(&ba, &bb, metric)?;
    out_dir(out)?;
    let path = out.join(format!(
        "{}-vs-{}.{}.comparison.json",
        file_stem(&sa.name),
        file_stem(&sb.name),
        file_stem(metric)
    ));
    write(&path, &(serde_json::to_string_pretty(&cmp).expect("json") + "\n"))?;
    println!("{}", cmp.summary_line());
    Ok(())
}

/// Text printed by `orgsim models`.
pub fn models_listing() -> String {
    let mut out = String::new();
    for (name, about) in harness::MODELS {
        let model = ModelConfig::default_for(name).expect("built-in model");
        let defaults = Scenario::new(name, model).to_json();
        out.push_str(&format!("{name}: {about}\n"));
        for line in defaults.lines() {
            out.push_str("    ");
            out.push_str(line);
            out.push('\n');
        }
    }
    out
}
