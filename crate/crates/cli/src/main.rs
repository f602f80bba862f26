//! `cascadelab` command-line front end.

use std::fs::{self, File};
use std::io::{BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};
use std::process::ExitCode;
use std::time::{SystemTime, UNIX_EPOCH};

use anyhow::{bail, Context, Result};
use clap::{Args, Parser, Subcommand};

use cascadelab::cascade::{CascadeParams, DecayClock, SeedPolicy};
use cascadelab::netgen::{generate_ba, plant_group, read_edge_list, write_edge_list, GenParams, Graph};
use cascadelab::pipeline::{simulate_log, SimulationSpec};
use cascadelab::seed::mix;
use cascadelab::spreadstats::{
    equalize_groups, fit_power_law, partition_messages, recurrence_curve, repetition_counts, user_stats,
    write_curve_csv, write_histogram_csv, write_user_stats_csv, FitMethod, PartitionConfig, RepetitionTable,
};
use cascadelab::sweep::{
    run_sweep, summarize_policy_ratios, write_ratios_csv, write_rows_csv, write_summary_csv, SweepGrid,
};
use cascadelab::tweetlog::{cashtag_filter, parse_log, read_symbols, write_log, LogFormat, MessageLog, ParseOptions};

#[derive(Parser, Debug)]
#[command(
    name = "cascadelab",
    version,
    about = "Information cascades on scale-free networks and message-log analytics"
)]
struct Cli {
    /// Omit the timestamp from output metadata so reruns are byte-identical.
    #[arg(long, global = true, env = "CASCADELAB_REPRODUCIBLE")]
    reproducible: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Generate a preferential-attachment graph with a planted group.
    Gen(GenArgs),
    /// Run cascades on a graph and write them as a message log.
    Simulate(SimulateArgs),
    /// Run the seeding-policy parameter sweep.
    Sweep(SweepArgs),
    /// Parse, merge and optionally cashtag-filter message logs.
    Ingest(IngestArgs),
    /// Repetition histogram, power-law fit and high/low partition.
    Analyze(AnalyzeArgs),
    /// Recurrence-rate curves of earliest spreaders.
    Curve(CurveArgs),
    /// Per-user tweets, retweets and average retweets per tweet.
    Userstats(UserstatsArgs),
}

#[derive(Args, Debug, Clone)]
struct GraphArgs {
    #[arg(long, default_value_t = 10_000, env = "CASCADELAB_N")]
    n: usize,
    #[arg(long, default_value_t = 2, env = "CASCADELAB_M_ATTACH")]
    m_attach: usize,
    /// Group size as a fraction of n.
    #[arg(long, default_value_t = 0.03, env = "CASCADELAB_R")]
    r: f64,
    #[arg(long, default_value_t = 0.1, env = "CASCADELAB_Q_INTRA")]
    q_intra: f64,
}

#[derive(Args, Debug)]
struct GenArgs {
    #[command(flatten)]
    graph: GraphArgs,
    #[arg(long, env = "CASCADELAB_SEED")]
    seed: Option<u64>,
    /// Edge-list output path.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct CascadeArgs {
    #[arg(long, default_value_t = 0.05, env = "CASCADELAB_P0")]
    p0: f64,
    /// Loss factor: the transmission probability is divided by it each step.
    #[arg(long, default_value_t = 3.0, env = "CASCADELAB_C")]
    c: f64,
    #[arg(long, default_value_t = 1e-6, env = "CASCADELAB_P_FLOOR")]
    p_floor: f64,
    #[arg(long, default_value_t = 10_000, env = "CASCADELAB_MAX_STEPS")]
    max_steps: u32,
    /// node (age since a node was exposed) or message (age of the message).
    #[arg(long, default_value_t = DecayClock::Node, env = "CASCADELAB_CLOCK")]
    clock: DecayClock,
}

#[derive(Args, Debug)]
struct SimulateArgs {
    /// Edge list to run on; generated from the graph flags when absent.
    #[arg(long)]
    graph: Option<PathBuf>,
    #[command(flatten)]
    graph_params: GraphArgs,
    #[command(flatten)]
    cascade: CascadeArgs,
    /// random, group or centrality.
    #[arg(long, default_value_t = SeedPolicy::RandomGroup, env = "CASCADELAB_POLICY")]
    policy: SeedPolicy,
    /// Seeds per message.
    #[arg(long, default_value_t = 25, env = "CASCADELAB_SEED_COUNT")]
    seed_count: usize,
    /// Number of independent cascades (messages).
    #[arg(long, default_value_t = 20, env = "CASCADELAB_MESSAGES")]
    messages: usize,
    #[arg(long, env = "CASCADELAB_SEED")]
    seed: Option<u64>,
    #[arg(long, default_value = "sim")]
    run_prefix: String,
    #[arg(long, default_value = "u")]
    user_prefix: String,
    /// Output format; defaults to the output file extension.
    #[arg(long)]
    format: Option<LogFormat>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct SweepArgs {
    /// Use the published grid (4,860 runs on 10,000 nodes).
    #[arg(long)]
    paper_grid: bool,
    #[arg(long, default_value_t = 2_000)]
    n: usize,
    #[arg(long, default_value_t = 2)]
    m_attach: usize,
    #[arg(long, default_value_t = 0.1)]
    q_intra: f64,
    #[arg(long, value_delimiter = ',', default_value = "0.03")]
    ratios: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "25")]
    seed_counts: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0.05")]
    p0: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "3")]
    c: Vec<f64>,
    #[arg(long, value_delimiter = ',', default_value = "random,group,centrality")]
    policies: Vec<SeedPolicy>,
    #[arg(long, default_value_t = 20)]
    replicates: usize,
    #[arg(long, default_value_t = DecayClock::Node, env = "CASCADELAB_CLOCK")]
    clock: DecayClock,
    #[arg(long, env = "CASCADELAB_SEED")]
    seed: Option<u64>,
    /// Worker threads; results do not depend on it.
    #[arg(long, env = "CASCADELAB_JOBS")]
    jobs: Option<usize>,
    /// Directory for rows.csv, summary.csv and ratios.csv.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct InputArgs {
    /// Input format; defaults to each file's extension.
    #[arg(long)]
    format: Option<LogFormat>,
    /// Skip malformed rows instead of stopping at the first one.
    #[arg(long, env = "CASCADELAB_LENIENT")]
    lenient: bool,
    /// Keep a leading "RT @name:" when deriving message ids from text.
    #[arg(long)]
    keep_rt_prefix: bool,
}

#[derive(Args, Debug)]
struct IngestArgs {
    #[arg(required = true)]
    inputs: Vec<PathBuf>,
    #[command(flatten)]
    input: InputArgs,
    /// Keep only records mentioning one of these symbols as a cashtag.
    #[arg(long)]
    symbols: Option<PathBuf>,
    #[arg(long)]
    output_format: Option<LogFormat>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args, Debug, Clone, Copy)]
struct ThresholdArgs {
    #[arg(long, default_value_t = 700)]
    high_threshold: u64,
    #[arg(long, default_value_t = 100)]
    low_min: u64,
    #[arg(long, default_value_t = 400)]
    low_max: u64,
    #[arg(long, default_value_t = 10_000)]
    outlier_cutoff: u64,
}

impl ThresholdArgs {
    fn config(self) -> PartitionConfig {
        PartitionConfig {
            high_threshold: self.high_threshold,
            low_min: self.low_min,
            low_max: self.low_max,
            outlier_cutoff: self.outlier_cutoff,
        }
    }
}

#[derive(Args, Debug)]
struct AnalyzeArgs {
    log: PathBuf,
    #[command(flatten)]
    input: InputArgs,
    #[arg(long, default_value_t = 1)]
    xmin: u64,
    #[arg(long, default_value_t = 300)]
    xmax: u64,
    #[command(flatten)]
    thresholds: ThresholdArgs,
    /// Directory for histogram.csv, fit.csv and partition.csv.
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct CurveArgs {
    log: PathBuf,
    #[command(flatten)]
    input: InputArgs,
    /// One curve over every repeated message instead of high/low groups.
    #[arg(long)]
    all: bool,
    #[command(flatten)]
    thresholds: ThresholdArgs,
    #[arg(long, default_value_t = 200)]
    m_max: usize,
    /// Seed for down-sampling the larger group.
    #[arg(long, env = "CASCADELAB_SEED")]
    seed: Option<u64>,
    #[arg(short, long)]
    output: PathBuf,
}

#[derive(Args, Debug)]
struct UserstatsArgs {
    log: PathBuf,
    #[command(flatten)]
    input: InputArgs,
    #[arg(short, long)]
    output: PathBuf,
}

/// The `# cascadelab ...` line at the top of every output file.
struct Metadata {
    fields: Vec<(String, String)>,
}

impl Metadata {
    fn new(command: &str, reproducible: bool) -> Self {
        let mut fields = vec![("command".to_string(), command.to_string())];
        if !reproducible {
            let now = SystemTime::now().duration_since(UNIX_EPOCH).map_or(0, |d| d.as_secs());
            fields.push(("timestamp".into(), now.to_string()));
        }
        Self { fields }
    }

    fn with(mut self, key: &str, value: impl ToString) -> Self {
        self.fields.push((key.to_string(), value.to_string()));
        self
    }

    fn line(&self) -> String {
        let mut s = format!("# cascadelab {}", env!("CARGO_PKG_VERSION"));
        for (k, v) in &self.fields {
            s.push_str(&format!(" {k}={}", v.replace(char::is_whitespace, "_")));
        }
        s
    }
}

fn resolve_seed(seed: Option<u64>) -> u64 {
    seed.unwrap_or_else(|| {
        let s = rand::random::<u64>();
        eprintln!("no --seed given; using generated seed {s}");
        s
    })
}

fn write_artifact(path: &Path, meta: &Metadata, body: impl FnOnce(&mut dyn Write) -> Result<()>) -> Result<()> {
    if let Some(parent) = path.parent().filter(|p| !p.as_os_str().is_empty()) {
        fs::create_dir_all(parent).with_context(|| format!("creating {}", parent.display()))?;
    }
    let file = File::create(path).with_context(|| format!("creating {}", path.display()))?;
    let mut out = BufWriter::new(file);
    writeln!(out, "{}", meta.line())?;
    body(&mut out)?;
    out.flush().with_context(|| format!("writing {}", path.display()))?;
    Ok(())
}

fn read_log(path: &Path, input: &InputArgs) -> Result<MessageLog> {
    let options = ParseOptions {
        format: input.format.unwrap_or_else(|| LogFormat::from_path(path)),
        lenient: input.lenient,
        strip_rt_prefix: !input.keep_rt_prefix,
    };
    let file = File::open(path).with_context(|| format!("opening {}", path.display()))?;
    let outcome = parse_log(BufReader::new(file), &options).with_context(|| format!("parsing {}", path.display()))?;
    for (line, reason) in &outcome.skipped {
        eprintln!("{}:{line}: skipped: {reason}", path.display());
    }
    Ok(outcome.log)
}

fn build_graph(g: &GraphArgs, seed: u64) -> Result<Graph> {
    let params = GenParams {
        n: g.n,
        m_attach: g.m_attach,
        r: g.r,
        q_intra: g.q_intra,
        rng_seed: mix(seed, &[0]),
    };
    let base = generate_ba(&params)?;
    Ok(plant_group(base, g.r, g.q_intra, mix(seed, &[1])))
}

fn graph_meta(meta: Metadata, g: &GraphArgs) -> Metadata {
    meta.with("n", g.n)
        .with("m_attach", g.m_attach)
        .with("r", g.r)
        .with("q_intra", g.q_intra)
}

fn cmd_gen(args: GenArgs, reproducible: bool) -> Result<()> {
    let seed = resolve_seed(args.seed);
    let graph = build_graph(&args.graph, seed).context("gen: graph generation failed")?;
    let meta = graph_meta(Metadata::new("gen", reproducible).with("seed", seed), &args.graph);
    write_artifact(&args.output, &meta, |w| Ok(write_edge_list(&graph, w)?)).context("gen: writing edge list")
}

fn cmd_simulate(args: SimulateArgs, reproducible: bool) -> Result<()> {
    let seed = resolve_seed(args.seed);
    let mut meta = Metadata::new("simulate", reproducible).with("seed", seed);
    let graph = match &args.graph {
        Some(path) => {
            let file = File::open(path).with_context(|| format!("simulate: opening {}", path.display()))?;
            meta = meta.with("graph", path.display());
            read_edge_list(BufReader::new(file)).context("simulate: reading edge list")?
        }
        None => {
            meta = graph_meta(meta, &args.graph_params);
            build_graph(&args.graph_params, seed).context("simulate: graph generation failed")?
        }
    };
    let c = &args.cascade;
    let spec = SimulationSpec {
        policy: args.policy,
        seed_count: args.seed_count,
        cascade: CascadeParams {
            p0: c.p0,
            c: c.c,
            p_floor: c.p_floor,
            max_steps: c.max_steps,
            clock: c.clock,
            rng_seed: mix(seed, &[2]),
        },
        messages: args.messages,
        run_prefix: args.run_prefix.clone(),
        user_prefix: args.user_prefix.clone(),
    };
    let (log, traces) = simulate_log(&graph, &spec).context("simulate: cascade failed")?;
    let truncated = traces.iter().filter(|t| t.truncated).count();
    if truncated > 0 {
        eprintln!("warning: {truncated} cascades hit max_steps");
    }
    let meta = meta
        .with("policy", args.policy)
        .with("seed_count", args.seed_count)
        .with("messages", args.messages)
        .with("p0", c.p0)
        .with("c", c.c)
        .with("p_floor", c.p_floor)
        .with("max_steps", c.max_steps)
        .with("clock", c.clock);
    let format = args.format.unwrap_or_else(|| LogFormat::from_path(&args.output));
    write_artifact(&args.output, &meta, |w| Ok(write_log(&log, format, w)?)).context("simulate: writing log")
}

fn join<T: ToString>(values: &[T]) -> String {
    values.iter().map(T::to_string).collect::<Vec<_>>().join(";")
}

fn cmd_sweep(args: SweepArgs, reproducible: bool) -> Result<()> {
    let seed = resolve_seed(args.seed);
    let grid = if args.paper_grid {
        SweepGrid {
            clock: args.clock,
            ..SweepGrid::published(seed)
        }
    } else {
        SweepGrid {
            n: args.n,
            m_attach: args.m_attach,
            q_intra: args.q_intra,
            group_ratios: args.ratios.clone(),
            seed_counts: args.seed_counts.clone(),
            p0_values: args.p0.clone(),
            c_values: args.c.clone(),
            policies: args.policies.clone(),
            replicates: args.replicates,
            clock: args.clock,
            ..SweepGrid::published(seed)
        }
    };
    let result = run_sweep(&grid, args.jobs).context("sweep: run failed")?;
    for s in &result.summaries {
        eprintln!(
            "cell {} policy={} r={} k={} p0={} c={}: mean exposed {:.2} over {} runs ({} failed)",
            s.cell.index,
            s.cell.policy,
            s.cell.r,
            s.cell.seed_count,
            s.cell.p0,
            s.cell.c,
            s.mean_exposed,
            s.runs,
            s.failed
        );
    }
    let ratios = summarize_policy_ratios(&result);
    let meta = Metadata::new("sweep", reproducible)
        .with("seed", seed)
        .with("paper_grid", args.paper_grid)
        .with("n", grid.n)
        .with("m_attach", grid.m_attach)
        .with("q_intra", grid.q_intra)
        .with("ratios", join(&grid.group_ratios))
        .with("seed_counts", join(&grid.seed_counts))
        .with("p0", join(&grid.p0_values))
        .with("c", join(&grid.c_values))
        .with("policies", join(&grid.policies))
        .with("replicates", grid.replicates)
        .with("p_floor", grid.p_floor)
        .with("max_steps", grid.max_steps)
        .with("clock", grid.clock);
    let dir = &args.output;
    write_artifact(&dir.join("rows.csv"), &meta, |w| Ok(write_rows_csv(&result, w)?)).context("sweep: writing rows")?;
    write_artifact(&dir.join("summary.csv"), &meta, |w| Ok(write_summary_csv(&result, w)?))
        .context("sweep: writing summary")?;
    write_artifact(&dir.join("ratios.csv"), &meta, |w| Ok(write_ratios_csv(&ratios, w)?))
        .context("sweep: writing ratios")?;
    if let Some(g) = ratios.overall.group_over_random() {
        eprintln!("pooled group/random mean-exposure ratio: {g:.3}");
    }
    Ok(())
}

fn cmd_ingest(args: IngestArgs, reproducible: bool) -> Result<()> {
    let mut log = MessageLog::default();
    for path in &args.inputs {
        log.extend(read_log(path, &args.input).context("ingest: parse failed")?);
    }
    let total = log.len();
    let mut meta = Metadata::new("ingest", reproducible)
        .with(
            "inputs",
            join(&args.inputs.iter().map(|p| p.display()).collect::<Vec<_>>()),
        )
        .with("lenient", args.input.lenient);
    if let Some(path) = &args.symbols {
        let file = File::open(path).with_context(|| format!("ingest: opening {}", path.display()))?;
        let symbols = read_symbols(BufReader::new(file)).context("ingest: reading symbols")?;
        log = cashtag_filter(&log, &symbols);
        meta = meta.with("symbols", path.display()).with("symbol_count", symbols.len());
    }
    eprintln!("ingest: kept {} of {total} records", log.len());
    let format = args.output_format.unwrap_or_else(|| LogFormat::from_path(&args.output));
    write_artifact(&args.output, &meta, |w| Ok(write_log(&log, format, w)?)).context("ingest: writing log")
}

fn write_partition_csv(table: &RepetitionTable, config: &PartitionConfig, w: &mut dyn Write) -> Result<()> {
    let p = partition_messages(table, config)?;
    writeln!(w, "message_id,count,band")?;
    for (id, &count) in &table.counts {
        let band = if p.high.contains(id) {
            "high"
        } else if p.low.contains(id) {
            "low"
        } else if p.discarded.contains(id) {
            "other"
        } else if count > 1 {
            "outlier"
        } else {
            continue;
        };
        writeln!(w, "{id},{count},{band}")?;
    }
    Ok(())
}

fn cmd_analyze(args: AnalyzeArgs, reproducible: bool) -> Result<()> {
    let log = read_log(&args.log, &args.input).context("analyze: parse failed")?;
    let table = repetition_counts(&log);
    let config = args.thresholds.config();
    config.validate().context("analyze: partition thresholds")?;
    let fit = fit_power_law(&table, args.xmin, args.xmax).context("analyze: power-law fit")?;
    let meta = Metadata::new("analyze", reproducible)
        .with("log", args.log.display())
        .with("xmin", args.xmin)
        .with("xmax", args.xmax)
        .with("high_threshold", config.high_threshold)
        .with("low_min", config.low_min)
        .with("low_max", config.low_max)
        .with("outlier_cutoff", config.outlier_cutoff);
    let dir = &args.output;
    write_artifact(&dir.join("histogram.csv"), &meta, |w| {
        Ok(write_histogram_csv(&table.histogram(), w)?)
    })
    .context("analyze: writing histogram")?;
    write_artifact(&dir.join("fit.csv"), &meta, |w| {
        let method = match fit.method {
            FitMethod::Exact => "exact",
            FitMethod::ClosedForm => "closed_form",
        };
        writeln!(w, "alpha,closed_form_alpha,n,xmin,xmax,method")?;
        writeln!(
            w,
            "{},{},{},{},{},{method}",
            fit.alpha, fit.closed_form_alpha, fit.n, fit.xmin, fit.xmax
        )?;
        Ok(())
    })
    .context("analyze: writing fit")?;
    write_artifact(&dir.join("partition.csv"), &meta, |w| {
        write_partition_csv(&table, &config, w)
    })
    .context("analyze: writing partition")?;
    eprintln!(
        "alpha = {:.4} from {} messages in [{}, {}]",
        fit.alpha, fit.n, fit.xmin, fit.xmax
    );
    Ok(())
}

fn cmd_curve(args: CurveArgs, reproducible: bool) -> Result<()> {
    let log = read_log(&args.log, &args.input).context("curve: parse failed")?;
    let table = repetition_counts(&log);
    let mut meta = Metadata::new("curve", reproducible)
        .with("log", args.log.display())
        .with("m_max", args.m_max);
    let curves = if args.all {
        let ids: Vec<&String> = table.counts.iter().filter(|(_, &c)| c > 1).map(|(id, _)| id).collect();
        if ids.is_empty() {
            bail!("curve: the log has no repeated messages");
        }
        meta = meta.with("group", "all");
        vec![recurrence_curve(&log, &ids, args.m_max, "all").context("curve: recurrence")?]
    } else {
        let seed = resolve_seed(args.seed);
        let config = args.thresholds.config();
        let partition = partition_messages(&table, &config).context("curve: partition")?;
        let (high, low) = equalize_groups(&partition, seed).context("curve: equalizing groups")?;
        meta = meta
            .with("seed", seed)
            .with("high_threshold", config.high_threshold)
            .with("low_min", config.low_min)
            .with("low_max", config.low_max)
            .with("outlier_cutoff", config.outlier_cutoff)
            .with("group_size", high.len());
        vec![
            recurrence_curve(&log, &high, args.m_max, "high").context("curve: recurrence (high)")?,
            recurrence_curve(&log, &low, args.m_max, "low").context("curve: recurrence (low)")?,
        ]
    };
    write_artifact(&args.output, &meta, |w| Ok(write_curve_csv(&curves, w)?)).context("curve: writing curves")
}

fn cmd_userstats(args: UserstatsArgs, reproducible: bool) -> Result<()> {
    let log = read_log(&args.log, &args.input).context("userstats: parse failed")?;
    let rows = user_stats(&log);
    let meta = Metadata::new("userstats", reproducible).with("log", args.log.display());
    write_artifact(&args.output, &meta, |w| Ok(write_user_stats_csv(&rows, w)?)).context("userstats: writing table")
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let r = cli.reproducible;
    let result = match cli.command {
        Command::Gen(a) => cmd_gen(a, r),
        Command::Simulate(a) => cmd_simulate(a, r),
        Command::Sweep(a) => cmd_sweep(a, r),
        Command::Ingest(a) => cmd_ingest(a, r),
        Command::Analyze(a) => cmd_analyze(a, r),
        Command::Curve(a) => cmd_curve(a, r),
        Command::Userstats(a) => cmd_userstats(a, r),
    };
    match result {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::FAILURE
        }
    }
}
