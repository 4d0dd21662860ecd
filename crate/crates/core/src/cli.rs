//! The `mfgprep` command line.
//!
//! Exit status: 0 on success, 1 for usage errors and bad parameters, 2 for
//! I/O or file-format errors, 3 when a validation or digest check fails.

use std::ffi::OsString;
use std::fs::File;
use std::io::{self, BufReader, BufWriter, Write};
use std::path::{Path, PathBuf};

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::bench::{record_trace, sweep};
use crate::checks::{run_validation, ValidateConfig};
use crate::error::{Error, Result};
use crate::graph::{
    generate_features, generate_labels, load_csr, load_features, load_labels, parse_edge_list,
    save_csr, save_features, save_labels, synth_graph, CsrGraph, Dtype, FeatureMatrix, LabelVector,
};
use crate::pipeline::{
    ablation_report, list_schedule, run_live_epoch, run_pipelined, run_serial, standard_configs,
    write_ablation_csv, write_breakdown_csv, BatchWork, ComputeModel, ExecMode, PrepCostModel,
    PrepTiming, Timeline, TransferModel,
};
use crate::prep::{
    make_epoch_plan, prepare_batch, run_epoch_prep, write_throughput_csv, Delivery, EpochPlan,
    PrepConfig, PrepInputs,
};
use crate::sampler::{parse_variant_list, FanoutSpec, SamplerVariant};

pub const EXIT_OK: i32 = 0;
pub const EXIT_USAGE: i32 = 1;
pub const EXIT_IO: i32 = 2;
pub const EXIT_VALIDATION: i32 = 3;

#[derive(Debug, Parser)]
#[command(name = "mfgprep", version, about = "GNN mini-batch preparation engine")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Convert an edge list (or a synthetic graph) into graph/feature/label files.
    Ingest(IngestArgs),
    /// Measure parallel batch preparation for one or more worker counts.
    Sample(SampleArgs),
    /// Record a hop trace and sweep sampler variants over it.
    Explore(ExploreArgs),
    /// Run the transfer/compute pipeline and report blocking times.
    Pipeline(PipelineArgs),
    /// Per-epoch time as optimizations are enabled one by one.
    Ablate(AblateArgs),
    /// Run the oracle self-checks on a synthetic graph.
    Validate(ValidateArgs),
    /// Degree statistics and histogram.
    Stats(StatsArgs),
}

/// Where the graph comes from: a directory written by `ingest`, or a
/// synthetic graph generated on the fly.
#[derive(Debug, Clone, Args)]
pub struct DataArgs {
    /// Directory holding graph.csr, features.feat and labels.labl.
    #[arg(long)]
    pub data: Option<PathBuf>,
    #[arg(long, default_value_t = 50_000)]
    pub nodes: usize,
    #[arg(long, default_value_t = 20.0)]
    pub avg_degree: f64,
    /// Power-law exponent of the synthetic degree sequence ("inf" for uniform).
    #[arg(long, default_value_t = 2.5)]
    pub exponent: f64,
    #[arg(long, default_value_t = 100)]
    pub feature_dim: usize,
    #[arg(long, default_value = "f16")]
    pub dtype: Dtype,
    #[arg(long, default_value_t = 47)]
    pub classes: u32,
}

#[derive(Debug, Clone, Args)]
pub struct BatchArgs {
    #[arg(long, default_value = "15,10,5")]
    pub fanouts: FanoutSpec,
    #[arg(long, default_value_t = 1024)]
    pub batch_size: usize,
    /// Fraction of nodes used as training seeds (every k-th node).
    #[arg(long, default_value_t = 1.0)]
    pub train_fraction: f64,
    /// Stop after this many batches.
    #[arg(long)]
    pub max_batches: Option<usize>,
}

#[derive(Debug, Clone, Args)]
pub struct TransferArgs {
    /// Peak host-to-device bandwidth in bytes per second.
    #[arg(long, default_value_t = 12.3e9)]
    pub bandwidth: f64,
    #[arg(long, default_value_t = 1.0)]
    pub efficiency: f64,
    #[arg(long, default_value_t = 0.0)]
    pub base_latency: f64,
    /// Add validation round trips to every transfer.
    #[arg(long)]
    pub validate_transfers: bool,
    #[arg(long, default_value_t = 2)]
    pub round_trips: u32,
    #[arg(long, default_value_t = 50e-6)]
    pub rt_latency: f64,
}

impl TransferArgs {
    fn model(&self) -> Result<TransferModel> {
        let m = TransferModel {
            bandwidth: self.bandwidth,
            efficiency: self.efficiency,
            base_latency: self.base_latency,
            validate_on_transfer: self.validate_transfers,
            round_trips: self.round_trips,
            rt_latency: self.rt_latency,
        };
        m.validate()?;
        Ok(m)
    }
}

#[derive(Debug, Clone, Args)]
pub struct ComputeArgs {
    /// Fixed seconds per batch.
    #[arg(long, default_value_t = 1e-3)]
    pub alpha: f64,
    /// Seconds per MFG node.
    #[arg(long, default_value_t = 2e-8)]
    pub beta: f64,
    /// Seconds per MFG edge.
    #[arg(long, default_value_t = 5e-9)]
    pub gamma: f64,
    /// CSV of measured `num_nodes,num_edges,seconds` to fit instead.
    #[arg(long)]
    pub compute_samples: Option<PathBuf>,
}

impl ComputeArgs {
    fn model(&self) -> Result<ComputeModel> {
        let Some(path) = &self.compute_samples else {
            return Ok(ComputeModel {
                alpha: self.alpha,
                beta: self.beta,
                gamma: self.gamma,
            });
        };
        let file = File::open(path).map_err(|e| Error::io(path, e))?;
        let mut r = csv::ReaderBuilder::new().from_reader(BufReader::new(file));
        let samples = r
            .deserialize::<(u64, u64, f64)>()
            .collect::<std::result::Result<Vec<_>, _>>()?;
        ComputeModel::fit(&samples)
    }
}

#[derive(Debug, Clone, Args)]
pub struct PrepCostArgs {
    #[arg(long, default_value_t = 250e-9)]
    pub std_hash_s_per_edge: f64,
    #[arg(long, default_value_t = 100e-9)]
    pub flat_s_per_edge: f64,
    #[arg(long, default_value_t = 0.25e-9)]
    pub slicing_s_per_byte: f64,
}

impl PrepCostArgs {
    fn model(&self) -> PrepCostModel {
        PrepCostModel {
            std_hash_s_per_edge: self.std_hash_s_per_edge,
            flat_s_per_edge: self.flat_s_per_edge,
            slicing_s_per_byte: self.slicing_s_per_byte,
        }
    }
}

#[derive(Debug, Args)]
pub struct IngestArgs {
    /// Whitespace-separated "src dst" edge list; synthesize when absent.
    #[arg(long)]
    pub edges: Option<PathBuf>,
    /// Node count (defaults to the largest ID plus one).
    #[arg(long)]
    pub num_nodes: Option<usize>,
    /// Keep edges one-directional.
    #[arg(long)]
    pub directed: bool,
    #[command(flatten)]
    pub data: DataArgs,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct SampleArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub batch: BatchArgs,
    /// Comma-separated worker counts, one CSV row each.
    #[arg(long, default_value = "1", value_delimiter = ',')]
    pub workers: Vec<usize>,
    #[arg(long, default_value_t = SamplerVariant::fast())]
    pub variant: SamplerVariant,
    /// Output queue capacity (default 4 x workers).
    #[arg(long)]
    pub queue_capacity: Option<usize>,
    #[arg(long)]
    pub completion_order: bool,
    /// CSV destination (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ExploreArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub batch: BatchArgs,
    /// "all" or a comma-separated list of variant descriptors.
    #[arg(long, default_value = "all")]
    pub variants: String,
    #[arg(long, default_value_t = SamplerVariant::baseline())]
    pub baseline: SamplerVariant,
    #[arg(long, default_value_t = 5)]
    pub repetitions: usize,
    /// Where to write the recorded trace.
    #[arg(long)]
    pub trace: Option<PathBuf>,
    /// Sweep CSV destination (stdout when absent).
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ClockMode {
    Virtual,
    Live,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Schedule {
    Serial,
    Pipelined,
}

#[derive(Debug, Args)]
pub struct PipelineArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub batch: BatchArgs,
    #[command(flatten)]
    pub transfer: TransferArgs,
    #[command(flatten)]
    pub compute: ComputeArgs,
    #[command(flatten)]
    pub prep_cost: PrepCostArgs,
    #[arg(long, value_enum, default_value_t = ClockMode::Virtual)]
    pub mode: ClockMode,
    #[arg(long, value_enum, default_value_t = Schedule::Pipelined)]
    pub schedule: Schedule,
    #[arg(long, default_value_t = 1)]
    pub prefetch_depth: usize,
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
    #[arg(long, default_value_t = SamplerVariant::fast())]
    pub variant: SamplerVariant,
    /// Events CSV (batch_id,stage,start_s,end_s).
    #[arg(long)]
    pub events_out: Option<PathBuf>,
    /// JSON summary.
    #[arg(long)]
    pub summary_out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PrepTimingArg {
    Modeled,
    Measured,
}

#[derive(Debug, Args)]
pub struct AblateArgs {
    #[command(flatten)]
    pub data: DataArgs,
    #[command(flatten)]
    pub batch: BatchArgs,
    #[command(flatten)]
    pub transfer: TransferArgs,
    #[command(flatten)]
    pub compute: ComputeArgs,
    #[command(flatten)]
    pub prep_cost: PrepCostArgs,
    /// Prep workers for the parallel rows.
    #[arg(long, default_value_t = 20)]
    pub workers: usize,
    #[arg(long, value_enum, default_value_t = PrepTimingArg::Modeled)]
    pub prep_timing: PrepTimingArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long, default_value_t = 3000)]
    pub nodes: usize,
    #[arg(long, default_value_t = 8.0)]
    pub avg_degree: f64,
    #[arg(long, default_value_t = 2.5)]
    pub exponent: f64,
    #[arg(long, default_value_t = 16)]
    pub feature_dim: usize,
    #[arg(long, default_value_t = 256)]
    pub hidden: usize,
    #[arg(long, default_value = "15,10,5")]
    pub fanouts: FanoutSpec,
    #[arg(long, default_value_t = 1024)]
    pub batch_size: usize,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

#[derive(Debug, Args)]
pub struct StatsArgs {
    #[command(flatten)]
    pub data: DataArgs,
    /// Histogram CSV (degree,count); stdout when absent.
    #[arg(long)]
    pub out: Option<PathBuf>,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
}

struct Dataset {
    graph: CsrGraph,
    features: FeatureMatrix,
    labels: LabelVector,
}

impl Dataset {
    fn inputs(&self) -> Result<PrepInputs<'_>> {
        PrepInputs::new(&self.graph, &self.features, &self.labels)
    }
}

const GRAPH_FILE: &str = "graph.csr";
const FEATURE_FILE: &str = "features.feat";
const LABEL_FILE: &str = "labels.labl";

fn attach(graph: CsrGraph, d: &DataArgs, seed: u64) -> Result<Dataset> {
    let n = graph.num_nodes();
    Ok(Dataset {
        features: generate_features(n, d.feature_dim, d.dtype, seed),
        labels: generate_labels(n, d.classes, seed)?,
        graph,
    })
}

fn load_graph_only(d: &DataArgs, seed: u64) -> Result<CsrGraph> {
    match &d.data {
        Some(dir) => load_csr(dir.join(GRAPH_FILE)),
        None => synth_graph(d.nodes, d.avg_degree, d.exponent, seed),
    }
}

fn load_dataset(d: &DataArgs, seed: u64) -> Result<Dataset> {
    match &d.data {
        Some(dir) => Ok(Dataset {
            graph: load_csr(dir.join(GRAPH_FILE))?,
            features: load_features(dir.join(FEATURE_FILE))?,
            labels: load_labels(dir.join(LABEL_FILE))?,
        }),
        None => attach(
            synth_graph(d.nodes, d.avg_degree, d.exponent, seed)?,
            d,
            seed,
        ),
    }
}

fn epoch_plan(num_nodes: usize, b: &BatchArgs, seed: u64) -> Result<EpochPlan> {
    if !(b.train_fraction > 0.0 && b.train_fraction <= 1.0) {
        return Err(Error::invalid("train fraction must be in (0, 1]"));
    }
    let stride = (1.0 / b.train_fraction).round().max(1.0) as usize;
    let train: Vec<u32> = (0..num_nodes as u32).step_by(stride).collect();
    let mut plan = make_epoch_plan(&train, b.batch_size, seed)?;
    if let Some(k) = b.max_batches {
        plan.batches.truncate(k);
    }
    Ok(plan)
}

fn output(path: Option<&Path>) -> Result<Box<dyn Write>> {
    Ok(match path {
        Some(p) => Box::new(BufWriter::new(
            File::create(p).map_err(|e| Error::io(p, e))?,
        )),
        None => Box::new(io::stdout().lock()),
    })
}

fn ingest(a: &IngestArgs) -> Result<()> {
    let graph = match &a.edges {
        Some(path) => {
            let file = File::open(path).map_err(|e| Error::io(path, e))?;
            let (edges, max_plus_one) = parse_edge_list(BufReader::new(file))?;
            CsrGraph::from_edge_list(&edges, a.num_nodes.unwrap_or(max_plus_one), !a.directed)?
        }
        None => synth_graph(a.data.nodes, a.data.avg_degree, a.data.exponent, a.seed)?,
    };
    std::fs::create_dir_all(&a.out).map_err(|e| Error::io(&a.out, e))?;
    let ds = attach(graph, &a.data, a.seed)?;
    save_csr(&ds.graph, a.out.join(GRAPH_FILE))?;
    save_features(&ds.features, a.out.join(FEATURE_FILE))?;
    save_labels(&ds.labels, a.out.join(LABEL_FILE))?;
    eprintln!(
        "wrote {} nodes, {} edge slots, {}x{} {:?} features to {}",
        ds.graph.num_nodes(),
        ds.graph.num_edges(),
        ds.features.rows(),
        ds.features.cols(),
        ds.features.dtype(),
        a.out.display()
    );
    Ok(())
}

fn sample(a: &SampleArgs) -> Result<()> {
    if a.workers.is_empty() {
        return Err(Error::invalid("at least one worker count is required"));
    }
    let ds = load_dataset(&a.data, a.seed)?;
    let inputs = ds.inputs()?;
    let plan = epoch_plan(ds.graph.num_nodes(), &a.batch, a.seed)?;
    let mut rows = Vec::with_capacity(a.workers.len());
    for &p in &a.workers {
        let mut cfg = PrepConfig::new(p, a.batch.fanouts.clone(), a.variant);
        if let Some(c) = a.queue_capacity {
            cfg = cfg.with_queue_capacity(c);
        }
        if a.completion_order {
            cfg = cfg.with_delivery(Delivery::CompletionOrder);
        }
        let (res, report) = run_epoch_prep(&inputs, &plan, &cfg, a.seed, |it| {
            it.try_for_each(|b| b.map(drop))
        })?;
        res?;
        eprintln!(
            "P={p}: {} batches in {:.3} s",
            report.batches.len(),
            report.wall_s
        );
        rows.push(report.throughput_row());
    }
    write_throughput_csv(&rows, output(a.out.as_deref())?)
}

fn explore(a: &ExploreArgs) -> Result<()> {
    let graph = load_graph_only(&a.data, a.seed)?;
    let variants = parse_variant_list(&a.variants)?;
    let plan = epoch_plan(graph.num_nodes(), &a.batch, a.seed)?;
    let trace = record_trace(&graph, &plan, &a.batch.fanouts, a.seed)?;
    if let Some(p) = &a.trace {
        trace.save(p)?;
    }
    let result = sweep(&trace, &graph, &variants, a.baseline, a.repetitions)?;
    for (v, total) in result.totals() {
        eprintln!("{v:<45} {total:.6} s");
    }
    result.write_csv(output(a.out.as_deref())?)
}

/// Batch shapes with ready times from the prep cost model, list-scheduled
/// over `workers`.
fn modeled_work(
    ds: &Dataset,
    plan: &EpochPlan,
    fanouts: &FanoutSpec,
    variant: SamplerVariant,
    cost: &PrepCostModel,
    workers: usize,
    seed: u64,
) -> Result<Vec<BatchWork>> {
    let inputs = ds.inputs()?;
    let mut work = Vec::with_capacity(plan.len());
    for seeds in &plan.batches {
        let b = prepare_batch(&inputs, seeds, fanouts, variant, seed)?;
        work.push(BatchWork::from_prepared(&b, 0.0));
    }
    let durations: Vec<f64> = work
        .iter()
        .map(|w| cost.batch_time(variant, w.num_edges, w.bytes))
        .collect();
    for (w, r) in work.iter_mut().zip(list_schedule(&durations, workers)) {
        w.ready_s = r;
    }
    Ok(work)
}

fn pipeline(a: &PipelineArgs) -> Result<()> {
    let ds = load_dataset(&a.data, a.seed)?;
    let plan = epoch_plan(ds.graph.num_nodes(), &a.batch, a.seed)?;
    let tm = a.transfer.model()?;
    let cm = a.compute.model()?;
    let mode = match a.schedule {
        Schedule::Serial => ExecMode::Serial,
        Schedule::Pipelined => ExecMode::Pipelined {
            prefetch_depth: a.prefetch_depth,
        },
    };
    let timeline: Timeline = match a.mode {
        ClockMode::Virtual => {
            let work = modeled_work(
                &ds,
                &plan,
                &a.batch.fanouts,
                a.variant,
                &a.prep_cost.model(),
                a.workers,
                a.seed,
            )?;
            match mode {
                ExecMode::Serial => run_serial(&work, &tm, &cm),
                ExecMode::Pipelined { prefetch_depth } => {
                    run_pipelined(&work, &tm, &cm, prefetch_depth)?
                }
            }
        }
        ClockMode::Live => {
            let cfg = PrepConfig::new(a.workers, a.batch.fanouts.clone(), a.variant);
            let (run, _) = run_live_epoch(&ds.inputs()?, &plan, &cfg, a.seed, &tm, &cm, mode)?;
            run.timeline
        }
    };
    if let Some(p) = &a.events_out {
        timeline.write_events_csv(output(Some(p))?)?;
    }
    if let Some(p) = &a.summary_out {
        timeline.write_summary_json(output(Some(p))?)?;
    }
    let label = format!("{:?}/{:?}", a.mode, a.schedule).to_lowercase();
    write_breakdown_csv(&[(label, timeline.breakdown())], output(None)?)
}

fn ablate(a: &AblateArgs) -> Result<()> {
    let ds = load_dataset(&a.data, a.seed)?;
    let plan = epoch_plan(ds.graph.num_nodes(), &a.batch, a.seed)?;
    let timing = match a.prep_timing {
        PrepTimingArg::Modeled => PrepTiming::Modeled(a.prep_cost.model()),
        PrepTimingArg::Measured => PrepTiming::Measured,
    };
    let rows = ablation_report(
        &ds.inputs()?,
        &plan,
        &a.batch.fanouts,
        a.seed,
        &standard_configs(a.workers),
        &a.transfer.model()?,
        &a.compute.model()?,
        timing,
    )?;
    write_ablation_csv(&rows, output(a.out.as_deref())?)
}

fn validate(a: &ValidateArgs) -> Result<bool> {
    let report = run_validation(&ValidateConfig {
        nodes: a.nodes,
        avg_degree: a.avg_degree,
        exponent: a.exponent,
        feature_dim: a.feature_dim,
        hidden: a.hidden,
        fanouts: a.fanouts.clone(),
        batch_size: a.batch_size,
        seed: a.seed,
    })?;
    for c in &report.checks {
        println!(
            "{} {:<24} {}",
            if c.passed { "PASS" } else { "FAIL" },
            c.name,
            c.detail
        );
    }
    Ok(report.all_passed())
}

fn stats(a: &StatsArgs) -> Result<()> {
    let g = load_graph_only(&a.data, a.seed)?;
    let h = g.degree_histogram();
    eprintln!(
        "nodes {}  edge slots {}  mean degree {:.3}  max degree {}",
        g.num_nodes(),
        g.num_edges(),
        h.mean_degree(),
        g.max_degree()
    );
    h.write_csv(output(a.out.as_deref())?)
}

fn exit_code(e: &Error) -> i32 {
    match e {
        Error::DigestMismatch { .. } => EXIT_VALIDATION,
        e if e.is_io_or_format() => EXIT_IO,
        _ => EXIT_USAGE,
    }
}

/// Runs one parsed command and returns its exit status.
pub fn dispatch(cli: &Cli) -> i32 {
    let result = match &cli.command {
        Command::Ingest(a) => ingest(a),
        Command::Sample(a) => sample(a),
        Command::Explore(a) => explore(a),
        Command::Pipeline(a) => pipeline(a),
        Command::Ablate(a) => ablate(a),
        Command::Validate(a) => match validate(a) {
            Ok(true) => Ok(()),
            Ok(false) => return EXIT_VALIDATION,
            Err(e) => Err(e),
        },
        Command::Stats(a) => stats(a),
    };
    match result {
        Ok(()) => EXIT_OK,
        Err(e) => {
            eprintln!("error: {e}");
            exit_code(&e)
        }
    }
}

/// Parses `args` (program name first) and runs the command.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => dispatch(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let _ = e.print();
            code
        }
    }
}
