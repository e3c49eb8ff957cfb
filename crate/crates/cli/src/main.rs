use std::fmt;
use std::io::Write;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use anyhow::{Context, Result};
use clap::{Args, Parser, Subcommand};
use serde_json::json;

use qci_core::anomaly::{self, AnomalyError, AnomalyKind, AnomalySpec, Mode};
use qci_core::bench::{self, BenchConfig, BenchError, BenchSummary, Thresholds};
use qci_core::circuit::{structural_profile, Circuit};
use qci_core::graph::build_interaction_graph;
use qci_core::metrics::{compute_igs, compute_ois, compute_sis, IgsWeights, SisWeights};
use qci_core::qasm::{emit_qasm, parse_qasm_named};
use qci_core::simulator::{sample_distribution, SimError, Simulator, DEFAULT_QUBIT_CAP};

const EXIT_PARSE: u8 = 2;
const EXIT_QUBIT_CAP: u8 = 3;
const EXIT_INELIGIBLE: u8 = 4;
const EXIT_EMPTY_CORPUS: u8 = 5;

/// An error that maps to a specific exit status.
#[derive(Debug)]
struct Exit {
    code: u8,
    message: String,
}

impl fmt::Display for Exit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&self.message)
    }
}

impl std::error::Error for Exit {}

fn exit(code: u8, message: impl Into<String>) -> anyhow::Error {
    Exit {
        code,
        message: message.into(),
    }
    .into()
}

#[derive(Parser)]
#[command(
    name = "qci",
    version,
    about = "Quantum circuit integrity metrics and anomaly benchmark"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Compare a test circuit against a reference and print SIS, OIS and IGS as JSON.
    Validate(ValidateArgs),
    /// Inject one anomaly and print the mutated circuit.
    Inject(InjectArgs),
    /// Run the anomaly benchmark over a corpus directory.
    Bench(BenchArgs),
    /// Recompute the summary tables from an existing records CSV.
    Report(ReportArgs),
    /// Print the interaction graph of a circuit in DOT format.
    Graph { input: PathBuf },
}

#[derive(Args)]
struct ValidateArgs {
    reference: PathBuf,
    test: PathBuf,
    /// Skip simulation; OIS fields are null.
    #[arg(long)]
    no_sim: bool,
    /// Compare sampled distributions instead of exact ones.
    #[arg(long)]
    shots: Option<u64>,
    /// Seed for sampling; both sides share it.
    #[arg(long, env = "QCI_SEED", default_value_t = 42)]
    seed: u64,
    #[arg(long, default_value_t = DEFAULT_QUBIT_CAP)]
    qubit_cap: usize,
    /// Four comma-separated SIS weights.
    #[arg(long, value_delimiter = ',', num_args = 4)]
    sis_weights: Option<Vec<f64>>,
    /// Five comma-separated IGS weights.
    #[arg(long, value_delimiter = ',', num_args = 5)]
    igs_weights: Option<Vec<f64>>,
}

#[derive(Args)]
struct InjectArgs {
    input: PathBuf,
    #[arg(long)]
    kind: String,
    /// One minimal perturbation.
    #[arg(long, conflicts_with = "severity", required_unless_present = "severity")]
    fixed: bool,
    /// Fraction of eligible sites to perturb, in (0, 1].
    #[arg(long)]
    severity: Option<f64>,
    #[arg(long, env = "QCI_SEED", default_value_t = 42)]
    seed: u64,
    /// Write the circuit here instead of stdout.
    #[arg(short, long)]
    output: Option<PathBuf>,
}

#[derive(Args)]
struct BenchArgs {
    /// `key = value` configuration file.
    #[arg(long)]
    config: Option<PathBuf>,
    #[arg(long)]
    corpus: Option<PathBuf>,
    /// Output directory for records.csv, summary.json and runtime.csv.
    #[arg(short, long, default_value = "bench-out")]
    out: PathBuf,
    /// Overrides QCI_SEED and the config file.
    #[arg(long)]
    seed: Option<u64>,
    #[arg(long)]
    workers: Option<usize>,
    #[arg(long)]
    shots: Option<u64>,
    #[arg(long)]
    kinds: Option<String>,
    #[arg(long)]
    severities: Option<String>,
    #[arg(long)]
    exact_reference: bool,
    /// Extra `key=value` settings, applied last.
    #[arg(long = "set", value_name = "KEY=VALUE")]
    settings: Vec<String>,
}

#[derive(Args)]
struct ReportArgs {
    records: PathBuf,
    /// Write summary.json and runtime.csv here instead of printing the summary.
    #[arg(short, long)]
    out: Option<PathBuf>,
    #[arg(long, default_value_t = 0.95)]
    sis_blind_threshold: f64,
    #[arg(long, default_value_t = 0.95)]
    detection_threshold: f64,
}

fn load(path: &Path) -> Result<Circuit> {
    let text = std::fs::read_to_string(path).with_context(|| format!("reading {}", path.display()))?;
    let name = path
        .file_stem()
        .map_or_else(|| "circuit".into(), |s| s.to_string_lossy());
    match parse_qasm_named(&name, &text) {
        Ok(out) => {
            for w in out.warnings {
                eprintln!("{}:{w}", path.display());
            }
            Ok(out.circuit)
        }
        Err(diags) => {
            let lines: Vec<String> = diags.iter().map(|d| format!("{}:{d}", path.display())).collect();
            Err(exit(EXIT_PARSE, lines.join("\n")))
        }
    }
}

fn validate(args: ValidateArgs) -> Result<()> {
    let reference = load(&args.reference)?;
    let test = load(&args.test)?;
    let sis_w = match args.sis_weights {
        Some(w) => SisWeights(w.try_into().expect("clap enforces 4 values")),
        None => SisWeights::default(),
    };
    let igs_w = match args.igs_weights {
        Some(w) => IgsWeights(w.try_into().expect("clap enforces 5 values")),
        None => IgsWeights::default(),
    };
    let sis = compute_sis(&structural_profile(&reference), &structural_profile(&test), sis_w)?;
    let igs = compute_igs(
        &build_interaction_graph(&reference),
        &build_interaction_graph(&test),
        igs_w,
    )?;
    let ois = if args.no_sim {
        None
    } else {
        let sim = Simulator::with_cap(args.qubit_cap);
        let run = |c: &Circuit| -> Result<_> {
            let exact = sim.simulate_exact(c).map_err(|e| match e {
                SimError::CapacityExceeded { .. } => exit(EXIT_QUBIT_CAP, format!("{e}; use --no-sim to skip OIS")),
                other => other.into(),
            })?;
            Ok(match args.shots {
                Some(shots) => sample_distribution(&exact, shots, args.seed)?,
                None => exact,
            })
        };
        Some(compute_ois(&run(&reference)?, &run(&test)?)?)
    };
    let report = json!({
        "reference": args.reference.display().to_string(),
        "test": args.test.display().to_string(),
        "sis": sis,
        "igs": igs,
        "ois": ois,
        "distribution": if args.no_sim { "none" } else if args.shots.is_some() { "sampled" } else { "exact" },
    });
    println!("{}", serde_json::to_string_pretty(&report)?);
    Ok(())
}

fn inject(args: InjectArgs) -> Result<()> {
    let circuit = load(&args.input)?;
    let kind = AnomalyKind::from_name(&args.kind)?;
    let mode = match args.severity {
        Some(s) => Mode::severity(s)?,
        None => Mode::Fixed,
    };
    let spec = AnomalySpec {
        kind,
        mode,
        seed: args.seed,
    };
    let (mutated, log) = anomaly::inject(&circuit, &spec).map_err(|e| match e {
        AnomalyError::Ineligible(k) => exit(EXIT_INELIGIBLE, format!("circuit has no eligible site for `{k}`")),
        other => other.into(),
    })?;
    let text = emit_qasm(&mutated);
    match &args.output {
        Some(path) => std::fs::write(path, &text).with_context(|| format!("writing {}", path.display()))?,
        None => std::io::stdout().write_all(text.as_bytes())?,
    }
    eprintln!("{}", serde_json::to_string(&json!({ "spec": spec, "log": log }))?);
    Ok(())
}

fn bench_config(args: &BenchArgs) -> Result<BenchConfig> {
    let mut config = BenchConfig::default();
    if let Some(path) = &args.config {
        config
            .apply_file(path)
            .with_context(|| format!("loading {}", path.display()))?;
    }
    config.apply_env()?;
    if let Some(dir) = &args.corpus {
        config.corpus_dir = dir.clone();
    }
    if let Some(seed) = args.seed {
        config.master_seed = seed;
    }
    if let Some(w) = args.workers {
        config.parallelism = w;
    }
    if let Some(s) = args.shots {
        config.shots = s;
    }
    if let Some(k) = &args.kinds {
        config.set("kinds", k)?;
    }
    if let Some(s) = &args.severities {
        config.set("severities", s)?;
    }
    if args.exact_reference {
        config.exact_reference = true;
    }
    for kv in &args.settings {
        let (k, v) = kv
            .split_once('=')
            .with_context(|| format!("expected KEY=VALUE, got `{kv}`"))?;
        config.set(k, v)?;
    }
    config.validate()?;
    Ok(config)
}

fn print_blind_spots(summary: &BenchSummary) {
    let pct = |p: Option<f64>| p.map_or_else(|| "-".to_string(), |p| format!("{p:.2}%"));
    let t = &summary.blind_spot_table;
    eprintln!("{:<10} {:>8} {:>10} {:>10}", "severity", "blind", "IGS", "OIS");
    for row in t.rows.iter().chain(std::iter::once(&t.total)) {
        eprintln!(
            "{:<10} {:>8} {:>10} {:>10}",
            row.severity,
            row.blind_cases,
            pct(row.igs_pct),
            pct(row.ois_pct)
        );
    }
}

fn run_bench(args: BenchArgs) -> Result<()> {
    let config = bench_config(&args)?;
    let run = bench::run_benchmark(&config).map_err(|e| match e {
        BenchError::EmptyCorpus => exit(
            EXIT_EMPTY_CORPUS,
            format!("no circuits in {} pass the filter", config.corpus_dir.display()),
        ),
        other => other.into(),
    })?;
    for r in &run.corpus.parse_failures {
        eprintln!("skipped {} (parse failure): {}", r.id, r.reason);
    }
    for r in &run.corpus.filtered_out {
        eprintln!("skipped {} (filter): {}", r.id, r.reason);
    }
    run.write_outputs(&args.out)?;
    eprintln!(
        "{} circuits, {} records written to {}",
        run.corpus.entries.len(),
        run.records.len(),
        args.out.display()
    );
    print_blind_spots(&run.summary());
    Ok(())
}

fn report(args: ReportArgs) -> Result<()> {
    let file = std::fs::File::open(&args.records).with_context(|| format!("opening {}", args.records.display()))?;
    let records = bench::read_records(file)?;
    let thresholds = Thresholds {
        sis_blind: args.sis_blind_threshold,
        detection: args.detection_threshold,
    };
    let config = json!({
        "records": args.records.display().to_string(),
        "sis_blind_threshold": thresholds.sis_blind,
        "detection_threshold": thresholds.detection,
    });
    let summary = BenchSummary::build(config, Default::default(), &records, thresholds);
    match &args.out {
        Some(dir) => {
            std::fs::create_dir_all(dir)?;
            std::fs::write(dir.join("summary.json"), summary.to_json(true) + "\n")?;
            bench::write_runtime_csv(std::fs::File::create(dir.join("runtime.csv"))?, &summary.runtime_table)?;
            print_blind_spots(&summary);
        }
        None => println!("{}", summary.to_json(true)),
    }
    Ok(())
}

fn graph(input: &Path) -> Result<()> {
    let circuit = load(input)?;
    print!("{}", build_interaction_graph(&circuit).to_dot());
    Ok(())
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Validate(a) => validate(a),
        Command::Inject(a) => inject(a),
        Command::Bench(a) => run_bench(a),
        Command::Report(a) => report(a),
        Command::Graph { input } => graph(&input),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => match e.downcast_ref::<Exit>() {
            Some(x) => {
                eprintln!("error: {x}");
                ExitCode::from(x.code)
            }
            None => {
                eprintln!("error: {e:#}");
                ExitCode::FAILURE
            }
        },
    }
}
