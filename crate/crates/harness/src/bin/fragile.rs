//! `fragile`: generate inputs, run experiments, verify bounds, aggregate reports.
//!
//! Exit codes: 0 ok, 1 verification failure, 2 configuration error.

use std::fs;
use std::io::{self, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fragile_harness::generators::gen_random;
use fragile_harness::report::{aggregate, aggregate_table};
use fragile_harness::runner::generate_input;
use fragile_harness::seeds::child_rng;
use fragile_harness::verify::{all_pass, verdict_table};
use fragile_harness::{run_experiment, verify, ExperimentSpec, HarnessError, Report};

#[derive(Parser)]
#[command(
    name = "fragile",
    version,
    about = "Fragile-complexity experiment harness"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Emit one generated input, one value per line.
    Generate(SpecArgs),
    /// Run an experiment and write its report.
    Run(SpecArgs),
    /// Check a report against a bound set; exits 1 if any bound fails.
    Verify {
        report: PathBuf,
        /// Bound set: an algorithm name or `correctness`. Defaults to the
        /// report's algorithm.
        #[arg(long)]
        bounds: Option<String>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
    },
    /// Aggregate several reports into one table.
    Report {
        #[arg(required = true)]
        reports: Vec<PathBuf>,
        #[arg(long, value_enum, default_value_t = Format::Text)]
        format: Format,
        #[arg(long)]
        out: Option<PathBuf>,
    },
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
    Csv,
}

/// Experiment parameters. Flags override keys read from `--spec`.
#[derive(Args)]
struct SpecArgs {
    /// Plain-text `key = value` spec file.
    #[arg(long)]
    spec: Option<PathBuf>,
    #[arg(long)]
    algo: Option<String>,
    #[arg(long)]
    n: Option<usize>,
    #[arg(long)]
    trials: Option<usize>,
    #[arg(long)]
    seed: Option<u64>,
    /// Shorthand for `--generator controlled_inv(INV)`.
    #[arg(long, conflicts_with_all = ["runs", "generator"])]
    inv: Option<u64>,
    /// Shorthand for `--generator controlled_runs(RUNS)`.
    #[arg(long, conflicts_with = "generator")]
    runs: Option<usize>,
    /// random, controlled_inv(t), controlled_runs(t), adversarial_run_plus_one,
    /// two_runs(split) or lower_bound(k).
    #[arg(long)]
    generator: Option<String>,
    #[arg(long)]
    epsilon: Option<f64>,
    /// network_sort or mom.
    #[arg(long)]
    backend: Option<String>,
    #[arg(long)]
    k: Option<usize>,
    #[arg(long)]
    queries: Option<usize>,
    /// uniform, skewed or sweep.
    #[arg(long)]
    workload: Option<String>,
    #[arg(long)]
    duplicates: bool,
    /// Trial index whose input `generate` emits.
    #[arg(long, default_value_t = 0)]
    trial: usize,
    #[arg(long)]
    out: Option<PathBuf>,
    /// `json` writes the JSON-lines report; `csv` writes per-element profiles.
    #[arg(long, value_enum, default_value_t = Format::Json)]
    format: Format,
}

impl SpecArgs {
    fn build(&self) -> Result<ExperimentSpec, HarnessError> {
        let mut spec = match &self.spec {
            Some(path) => ExperimentSpec::from_text(&fs::read_to_string(path)?)?,
            None => {
                let algo = self
                    .algo
                    .as_deref()
                    .ok_or_else(|| config("--algo or --spec is required"))?;
                let n = self.n.ok_or_else(|| config("--n or --spec is required"))?;
                ExperimentSpec::new(algo.parse().map_err(config)?, n)
            }
        };
        let mut set = |key: &str, value: Option<String>| -> Result<(), HarnessError> {
            match value {
                Some(v) => spec.set(key, &v).map_err(config),
                None => Ok(()),
            }
        };
        set("algorithm", self.algo.clone())?;
        set("n", self.n.map(|v| v.to_string()))?;
        set("trials", self.trials.map(|v| v.to_string()))?;
        set("seed", self.seed.map(|v| v.to_string()))?;
        set("generator", self.generator.clone())?;
        set(
            "generator",
            self.inv.map(|v| format!("controlled_inv({v})")),
        )?;
        set(
            "generator",
            self.runs.map(|v| format!("controlled_runs({v})")),
        )?;
        set("epsilon", self.epsilon.map(|v| v.to_string()))?;
        set("backend", self.backend.clone())?;
        set("k", self.k.map(|v| v.to_string()))?;
        set("queries", self.queries.map(|v| v.to_string()))?;
        set("workload", self.workload.clone())?;
        if self.duplicates {
            spec.duplicates = true;
        }
        if self.format == Format::Csv {
            spec.profiles = true;
        }
        spec.validate()?;
        Ok(spec)
    }
}

fn config(msg: impl Into<String>) -> HarnessError {
    HarnessError::Config(msg.into())
}

fn emit(out: Option<&Path>, text: &str) -> Result<(), HarnessError> {
    match out {
        Some(path) => fs::write(path, text)?,
        None => io::stdout().lock().write_all(text.as_bytes())?,
    }
    Ok(())
}

fn execute(command: Command) -> Result<ExitCode, HarnessError> {
    match command {
        Command::Generate(args) => {
            let spec = args.build()?;
            let mut rng = child_rng(spec.seed, args.trial);
            let values = if spec.algorithm.is_search() {
                // search trials draw queries, not inputs; emit a permutation
                gen_random(spec.n, &mut rng)
            } else {
                generate_input(&spec, &mut rng)?
            };
            let text: String = values.iter().map(|v| format!("{v}\n")).collect();
            emit(args.out.as_deref(), &text)?;
        }
        Command::Run(args) => {
            let spec = args.build()?;
            let report = run_experiment(&spec)?;
            let text = match args.format {
                Format::Csv => report.to_csv(),
                _ => report.to_json_lines(),
            };
            emit(args.out.as_deref(), &text)?;
        }
        Command::Verify {
            report,
            bounds,
            format,
        } => {
            let report = Report::from_json_lines(&fs::read_to_string(report)?)?;
            let set = bounds.unwrap_or_else(|| report.spec.algorithm.to_string());
            let verdicts = verify(&report, &set)?;
            let text = match format {
                Format::Json => serde_json::to_string_pretty(&verdicts)? + "\n",
                _ => verdict_table(&verdicts),
            };
            emit(None, &text)?;
            if !all_pass(&verdicts) {
                return Ok(ExitCode::from(1));
            }
        }
        Command::Report {
            reports,
            format,
            out,
        } => {
            let mut loaded = Vec::with_capacity(reports.len());
            for path in reports {
                let report = Report::from_json_lines(&fs::read_to_string(&path)?)?;
                loaded.push((path.display().to_string(), report));
            }
            let rows = aggregate(&loaded);
            let text = match format {
                Format::Json => serde_json::to_string_pretty(&rows)? + "\n",
                Format::Csv => {
                    let mut s = String::from(
                        "source,algorithm,generator,n,trials,correct,mean_inv,p50,p90,max\n",
                    );
                    for r in &rows {
                        s += &format!(
                            "{},{},\"{}\",{},{},{},{},{},{},{}\n",
                            r.source,
                            r.algorithm,
                            r.generator,
                            r.n,
                            r.trials,
                            r.correct,
                            r.mean_inv,
                            r.max_fragility.p50,
                            r.max_fragility.p90,
                            r.max_fragility.max
                        );
                    }
                    s
                }
                Format::Text => aggregate_table(&rows),
            };
            emit(out.as_deref(), &text)?;
        }
    }
    Ok(ExitCode::SUCCESS)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => code,
        Err(e) => {
            eprintln!("fragile: {e}");
            ExitCode::from(2)
        }
    }
}
