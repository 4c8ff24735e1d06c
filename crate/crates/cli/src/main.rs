use std::fs;
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::thread;

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand, ValueEnum};
use serde::{Deserialize, Serialize};

use memtune::config::{ReportFormat, RunConfig};
use memtune::controller::{ControllerConfig, MemoryRequest, MetricsSnapshot, ARITIES, PARAMETER_COUNT, PARAMETER_NAMES};
use memtune::explain::explain_decision;
use memtune::report::{compare, simulate_run, RunSummary};
use memtune::rl::{read_qtables, run_episode, write_qtables, ControllerEnvironment, EpisodeOptions, QTable};
use memtune::trace::{gen_gemm, gen_irregular, gen_stream, parse_trace, serialize_trace, TraceRecord};

mod output;

use output::ExplainRow;

#[derive(Parser)]
#[command(name = "memtune", version, about = "DRAM controller simulator with an explainable online tuner")]
struct Cli {
    /// Run configuration (TOML); built-in defaults when omitted.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Report format: csv or json.
    #[arg(long, global = true)]
    format: Option<ReportFormat>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Run a trace under one fixed controller configuration.
    Simulate(SimulateArgs),
    /// Tune the controller online over a trace.
    Tune(TuneArgs),
    /// Compare two run summaries.
    Compare(CompareArgs),
    /// Explain each agent's greedy choice from saved Q-tables.
    Explain(ExplainArgs),
    /// Write a synthetic trace.
    GenTrace(GenTraceArgs),
}

#[derive(Args)]
struct SimulateArgs {
    #[arg(long)]
    trace: PathBuf,
    /// Output directory. The partition table goes to stdout when omitted.
    #[arg(long)]
    out: Option<PathBuf>,
    #[arg(long)]
    trace_split: Option<usize>,
    /// Controller as ten comma-separated action indices (default: the baseline).
    #[arg(long, value_delimiter = ',')]
    action: Option<Vec<usize>>,
}

#[derive(Args)]
struct TuneArgs {
    #[arg(long)]
    trace: PathBuf,
    /// Output directory.
    #[arg(long)]
    out: PathBuf,
    #[arg(long)]
    seed: Option<u64>,
    /// Run several seeds in parallel, each into `<out>/seed-<n>`.
    #[arg(long, value_delimiter = ',', conflicts_with = "seed")]
    seeds: Vec<u64>,
    #[arg(long)]
    timesteps: Option<usize>,
    #[arg(long)]
    warmup: Option<usize>,
    #[arg(long)]
    alpha: Option<f64>,
    #[arg(long)]
    gamma: Option<f64>,
    #[arg(long)]
    epsilon_new: Option<f64>,
    #[arg(long)]
    epsilon_old: Option<f64>,
    #[arg(long)]
    trace_split: Option<usize>,
    /// Also write explanations of every greedy choice.
    #[arg(long)]
    explain: bool,
}

#[derive(Args)]
struct CompareArgs {
    /// Summary file of the baseline run.
    #[arg(long)]
    baseline: PathBuf,
    /// Summary file of the tuned run.
    #[arg(long)]
    tuned: PathBuf,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct ExplainArgs {
    #[arg(long)]
    qtables: PathBuf,
    /// Local state of each agent, comma separated (default: the baseline).
    #[arg(long, value_delimiter = ',')]
    state: Option<Vec<usize>>,
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Clone, Copy, ValueEnum)]
enum TraceKind {
    Stream,
    Gemm,
    Irregular,
}

#[derive(Args)]
struct GenTraceArgs {
    kind: TraceKind,
    /// Records for stream and irregular traces.
    #[arg(long, default_value_t = 100_000)]
    count: usize,
    #[arg(long, default_value_t = 0)]
    start: u64,
    #[arg(long, default_value_t = 64)]
    stride: u64,
    /// Matrix dimension for gemm.
    #[arg(long, default_value_t = 32)]
    n: usize,
    /// Block size for gemm.
    #[arg(long, default_value_t = 8)]
    block: usize,
    /// Address space in bytes for irregular.
    #[arg(long, default_value_t = 1 << 30)]
    space: u64,
    #[arg(long, default_value_t = 42)]
    seed: u64,
    /// Cycles between records (default: trace.gap from the config).
    #[arg(long)]
    gap: Option<u64>,
    #[arg(long)]
    out: Option<PathBuf>,
}

/// `summary.json`: the input format of `compare`.
#[derive(Serialize, Deserialize)]
struct SummaryFile {
    controller: ControllerConfig,
    action: [usize; PARAMETER_COUNT],
    aggregate: MetricsSnapshot,
    cumulative_reward: Option<f64>,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    last_partition_reward: Option<LastPartition>,
}

#[derive(Serialize, Deserialize)]
struct LastPartition {
    baseline: f64,
    tuned: f64,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("memtune: error: {}", format!("{e:#}").replace('\n', " "));
            ExitCode::FAILURE
        }
    }
}

fn run(cli: Cli) -> Result<()> {
    let mut config = match &cli.config {
        Some(path) => RunConfig::load(path)?,
        None => RunConfig::default(),
    };
    if let Some(format) = cli.format {
        config.output.format = format;
    }
    match cli.command {
        Command::Simulate(args) => simulate(config, args),
        Command::Tune(args) => tune(config, args),
        Command::Compare(args) => compare_cmd(config, args),
        Command::Explain(args) => explain(config, args),
        Command::GenTrace(args) => gen_trace(config, args),
    }
}

fn ext(format: ReportFormat) -> &'static str {
    match format {
        ReportFormat::Csv => "csv",
        ReportFormat::Json => "json",
    }
}

fn write_file(path: &Path, content: &str) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("cannot create {}", parent.display()))?;
    }
    fs::write(path, content).with_context(|| format!("cannot write {}", path.display()))
}

fn emit(out: Option<&Path>, content: &str) -> Result<()> {
    match out {
        Some(path) => write_file(path, content),
        None => {
            print!("{content}");
            Ok(())
        }
    }
}

fn load_partitions(config: &RunConfig, trace: &Path) -> Result<Vec<Vec<MemoryRequest>>> {
    let file = fs::File::open(trace).with_context(|| format!("cannot open trace {}", trace.display()))?;
    let records: Vec<TraceRecord> = parse_trace(std::io::BufReader::new(file))?;
    if records.is_empty() {
        bail!("no partitions: trace {} has no records", trace.display());
    }
    Ok(config.partitions(&records))
}

fn parse_action(values: &[usize]) -> Result<ControllerConfig> {
    let indices: [usize; PARAMETER_COUNT] = values
        .try_into()
        .map_err(|_| anyhow::anyhow!("--action needs {PARAMETER_COUNT} indices, got {}", values.len()))?;
    ControllerConfig::from_indices(&indices)
        .with_context(|| format!("--action out of range; domain sizes are {ARITIES:?}"))
}

fn simulate(mut config: RunConfig, args: SimulateArgs) -> Result<()> {
    if let Some(split) = args.trace_split {
        config.trace.split = split;
    }
    config.validate()?;
    let controller = match &args.action {
        Some(values) => parse_action(values)?,
        None => config.baseline,
    };
    let partitions = load_partitions(&config, &args.trace)?;
    let run = simulate_run(&config.device(), &partitions, &controller, &config.learner)?;
    let format = config.output.format;
    let table = match format {
        ReportFormat::Csv => output::partitions_csv(&run)?,
        ReportFormat::Json => output::json(&run)?,
    };
    match &args.out {
        None => emit(None, &table),
        Some(dir) => {
            write_file(&dir.join(format!("partitions.{}", ext(format))), &table)?;
            let summary = SummaryFile {
                controller,
                action: controller.to_indices(),
                aggregate: run.summary.aggregate,
                cumulative_reward: run.summary.cumulative_reward,
                last_partition_reward: None,
            };
            write_file(&dir.join("summary.json"), &output::json(&summary)?)
        }
    }
}

fn tune(mut config: RunConfig, args: TuneArgs) -> Result<()> {
    let learner = &mut config.learner;
    if let Some(v) = args.seed {
        learner.seed = v;
    }
    if let Some(v) = args.timesteps {
        learner.timesteps = v;
    }
    if let Some(v) = args.warmup {
        learner.warmup = v;
    }
    if let Some(v) = args.alpha {
        learner.alpha = v;
    }
    if let Some(v) = args.gamma {
        learner.gamma = v;
    }
    if let Some(v) = args.epsilon_new {
        learner.epsilon_new = v;
    }
    if let Some(v) = args.epsilon_old {
        learner.epsilon_old = v;
    }
    if let Some(v) = args.trace_split {
        config.trace.split = v;
    }
    config.validate()?;
    let partitions = load_partitions(&config, &args.trace)?;

    if args.seeds.is_empty() {
        return tune_one(&config, &partitions, config.learner.seed, &args.out, args.explain);
    }
    let results: Vec<Result<()>> = thread::scope(|scope| {
        let handles: Vec<_> = args
            .seeds
            .iter()
            .map(|&seed| {
                let (config, partitions, out) = (&config, &partitions, args.out.join(format!("seed-{seed}")));
                scope.spawn(move || tune_one(config, partitions, seed, &out, args.explain))
            })
            .collect();
        handles.into_iter().map(|h| h.join().expect("tuning thread panicked")).collect()
    });
    for (seed, result) in args.seeds.iter().zip(results) {
        result.with_context(|| format!("seed {seed}"))?;
    }
    Ok(())
}

fn tune_one(config: &RunConfig, partitions: &[Vec<MemoryRequest>], seed: u64, out: &Path, explain: bool) -> Result<()> {
    let device = config.device();
    let learner = memtune::rl::LearnerConfig { seed, ..config.learner };
    let mut env = ControllerEnvironment::new(device, partitions.to_vec())?;
    let options = EpisodeOptions { explain, agent_order: None };
    let result = run_episode(&mut env, &learner, &config.baseline, &options)?;

    let format = config.output.format;
    write_file(&out.join("qtables.txt"), &write_qtables(&result.tables))?;
    let steps = match format {
        ReportFormat::Csv => output::steps_csv(&result.log)?,
        ReportFormat::Json => output::json(&result.log)?,
    };
    write_file(&out.join(format!("steps.{}", ext(format))), &steps)?;
    if explain {
        let rows: Vec<ExplainRow> = result
            .decisions
            .iter()
            .flat_map(|d| {
                d.explanations.iter().map(move |e| ExplainRow {
                    step: Some(d.step),
                    agent: d.agent,
                    parameter: PARAMETER_NAMES[d.agent].to_string(),
                    chosen_label: ControllerConfig::value_label(d.agent, e.chosen),
                    alternative_label: ControllerConfig::value_label(d.agent, e.alternative),
                    explanation: e.clone(),
                })
            })
            .collect();
        let text = match format {
            ReportFormat::Csv => output::explanations_csv(&rows)?,
            ReportFormat::Json => output::json(&rows)?,
        };
        write_file(&out.join(format!("explanations.{}", ext(format))), &text)?;
    }

    let action = result.greedy_final();
    let tuned = ControllerConfig::from_indices(&action).expect("greedy actions are in range");
    let tuned_run = simulate_run(&device, partitions, &tuned, &learner)?;
    let baseline_run = simulate_run(&device, partitions, &config.baseline, &learner)?;
    let last = |run: &memtune::report::SimulationRun| run.partitions.last().map_or(0.0, |p| p.total_reward);
    let summary = SummaryFile {
        controller: tuned,
        action,
        aggregate: tuned_run.summary.aggregate,
        cumulative_reward: Some(result.cumulative_reward),
        last_partition_reward: Some(LastPartition { baseline: last(&baseline_run), tuned: last(&tuned_run) }),
    };
    write_file(&out.join("summary.json"), &output::json(&summary)?)
}

fn read_summary(path: &Path) -> Result<RunSummary> {
    let text = fs::read_to_string(path).with_context(|| format!("cannot read {}", path.display()))?;
    serde_json::from_str(&text).with_context(|| format!("{} is not a run summary", path.display()))
}

fn compare_cmd(config: RunConfig, args: CompareArgs) -> Result<()> {
    let report = compare(&read_summary(&args.baseline)?, &read_summary(&args.tuned)?);
    let text = match config.output.format {
        ReportFormat::Csv => output::comparison_csv(&report)?,
        ReportFormat::Json => output::json(&report)?,
    };
    emit(args.out.as_deref(), &text)
}

fn explain(config: RunConfig, args: ExplainArgs) -> Result<()> {
    let text = fs::read_to_string(&args.qtables).with_context(|| format!("cannot read {}", args.qtables.display()))?;
    let tables: Vec<QTable> = read_qtables(&text)?;
    let arities: Vec<usize> = tables.iter().map(QTable::arity).collect();
    let controller_tables = arities == ARITIES;
    let state = match args.state {
        Some(state) => state,
        None if controller_tables => config.baseline.to_indices().to_vec(),
        None => vec![0; tables.len()],
    };
    if state.len() != tables.len() {
        bail!("--state needs {} values, got {}", tables.len(), state.len());
    }
    if let Some(i) = (0..tables.len()).find(|&i| state[i] >= arities[i]) {
        bail!("--state value {} for agent {i} is outside 0..{}", state[i], arities[i]);
    }
    let label = |agent: usize, v: usize| {
        if controller_tables {
            ControllerConfig::value_label(agent, v)
        } else {
            v.to_string()
        }
    };
    let mut rows = Vec::new();
    for (agent, q) in tables.iter().enumerate() {
        let s = state[agent];
        let chosen = q.greedy_action(s);
        let alternatives: Vec<usize> = (0..q.arity()).filter(|&a| a != chosen).collect();
        for e in explain_decision(q, s, chosen, &alternatives, |v| label(agent, v))? {
            rows.push(ExplainRow {
                step: None,
                agent,
                parameter: if controller_tables { PARAMETER_NAMES[agent].to_string() } else { format!("agent{agent}") },
                chosen_label: label(agent, e.chosen),
                alternative_label: label(agent, e.alternative),
                explanation: e,
            });
        }
    }
    let text = match config.output.format {
        ReportFormat::Csv => output::explanations_csv(&rows)?,
        ReportFormat::Json => output::json(&rows)?,
    };
    emit(args.out.as_deref(), &text)
}

fn gen_trace(config: RunConfig, args: GenTraceArgs) -> Result<()> {
    let gap = args.gap.unwrap_or(config.trace.gap);
    let records = match args.kind {
        TraceKind::Stream => gen_stream(args.count, args.start, args.stride, gap)?,
        TraceKind::Gemm => gen_gemm(args.n, args.block, gap)?,
        TraceKind::Irregular => gen_irregular(args.count, args.space, args.seed, gap)?,
    };
    emit(args.out.as_deref(), &serialize_trace(&records))
}
