//! `netgauss` — seeded, reproducible experiments over Gaussian network
//! representations: generate random graphs, compare pairs with the full
//! relation toolkit, trace evolution experiments, and run the protein and
//! compound pipelines. Identical invocations produce byte-identical
//! output.

mod classify;
mod compounds;
mod config;
mod error;
mod protein;
mod stats;
mod synth;
mod trace;

use std::fs::{self, File};
use std::path::{Path, PathBuf};
use std::str::FromStr;

use clap::{Args, Parser, Subcommand, ValueEnum};
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use serde_json::{json, Value};

use netgauss::{
    align_pair, default_foreign, fisher_quantity, generate, laplacian_centralities, read_graph,
    relate, represent, write_edge_list_file, Coupling, DisconnectPolicy, EvolutionSpec,
    FisherSetup, ForeignRule, Graph, ModelKind, ModelSpec, Process, RepresentationMode,
    SamplingConfig,
};

use crate::compounds::{parse_metric_list, CompoundsSettings};
use crate::config::{resolve, resolve_opt, FileConfig};
use crate::error::{CliError, Result};
use crate::protein::ProteinSettings;
use crate::trace::{
    draw_theta, run_evolution, trace_correlations, write_correlations_csv, write_trace_csv,
    EvolveSettings, RowStatus,
};

const AFTER_HELP: &str = "\
Defaults:
  --seed 0, --mode sigma, --samples 2000, --partitions 10, --knn-k 3,
  --coupling common, --out .
  Causal measures condition on random node sets of size k = floor(n/2),
  averaged over the --partitions independent draws per direction.

Config file (--config): flat key=value lines, '#' comments; recognized
keys are seed, mode, samples, partitions, knn_k, coupling, out and
largest_component. Command-line flags override file values.

Exit codes:
  0  success
  2  usage error (bad flags, bad config)
  3  I/O failure
  4  unparseable or malformed input file
  5  numerical failure
  6  degenerate input (valid but unanalyzable)";

#[derive(Parser, Debug)]
#[command(
    name = "netgauss",
    version,
    about = "Graphs as Gaussians: information measures between networks",
    after_help = AFTER_HELP
)]
struct Cli {
    #[command(flatten)]
    global: GlobalArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct GlobalArgs {
    /// Master RNG seed [default: 0]
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Representation mode [default: sigma]
    #[arg(long, global = true, value_enum)]
    mode: Option<ModeArg>,
    /// Coupled sample rows for estimator-backed measures [default: 2000]
    #[arg(long, global = true)]
    samples: Option<usize>,
    /// Random conditioning partitions per causal direction [default: 10]
    #[arg(long, global = true)]
    partitions: Option<usize>,
    /// Neighbor order of the entropy estimator [default: 3]
    #[arg(long, global = true)]
    knn_k: Option<usize>,
    /// How the two sample streams are tied together [default: common]
    #[arg(long, global = true, value_enum)]
    coupling: Option<CouplingArg>,
    /// key=value settings file; flags given here override it
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    /// Directory for commands that write files [default: .]
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Analyze the largest component of disconnected input graphs
    /// instead of rejecting them
    #[arg(long, global = true)]
    largest_component: bool,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModeArg {
    /// Covariance = Laplacian + J/n (smooth signals are *unlikely*)
    Sigma,
    /// Covariance = pseudoinverse + J/n (smooth signals are likely)
    SigmaDual,
}

impl FromStr for ModeArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "sigma" => Ok(ModeArg::Sigma),
            "sigma-dual" => Ok(ModeArg::SigmaDual),
            other => Err(format!("unknown mode '{other}' (sigma or sigma-dual)")),
        }
    }
}

impl From<ModeArg> for RepresentationMode {
    fn from(m: ModeArg) -> Self {
        match m {
            ModeArg::Sigma => RepresentationMode::Sigma,
            ModeArg::SigmaDual => RepresentationMode::SigmaDual,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum CouplingArg {
    /// Both representations color the same underlying draw
    Common,
    /// Each representation draws its own noise
    Independent,
}

impl FromStr for CouplingArg {
    type Err = String;

    fn from_str(s: &str) -> std::result::Result<Self, String> {
        match s {
            "common" => Ok(CouplingArg::Common),
            "independent" => Ok(CouplingArg::Independent),
            other => Err(format!(
                "unknown coupling '{other}' (common or independent)"
            )),
        }
    }
}

impl From<CouplingArg> for Coupling {
    fn from(c: CouplingArg) -> Self {
        match c {
            CouplingArg::Common => Coupling::CommonSource,
            CouplingArg::Independent => Coupling::Independent,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ModelArg {
    /// Watts–Strogatz small world
    Ws,
    /// Erdős–Rényi independent edges
    Er,
    /// Barabási–Albert preferential attachment
    Ba,
}

impl From<ModelArg> for ModelKind {
    fn from(m: ModelArg) -> Self {
        match m {
            ModelArg::Ws => ModelKind::Ws,
            ModelArg::Er => ModelKind::Er,
            ModelArg::Ba => ModelKind::Ba,
        }
    }
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum ProcessArg {
    /// Remove a uniformly chosen node each iteration
    Delete,
    /// Re-wire a uniformly chosen node by the foreign rule
    Rewire,
    /// Append a node wired by the foreign rule
    Add,
}

impl From<ProcessArg> for Process {
    fn from(p: ProcessArg) -> Self {
        match p {
            ProcessArg::Delete => Process::Delete,
            ProcessArg::Rewire => Process::Rewire,
            ProcessArg::Add => Process::Add,
        }
    }
}

/// Random-graph family parameters, shared by `generate` and `evolve`.
/// Only the flags for the chosen family are consulted.
#[derive(Args, Debug)]
struct ModelArgs {
    /// Graph family to draw from
    #[arg(long, value_enum)]
    model: ModelArg,
    /// Node count of the generated graph
    #[arg(long, default_value_t = 300)]
    n0: usize,
    /// WS: ring-neighbor count
    #[arg(long, default_value_t = 15)]
    alpha: usize,
    /// WS: rewiring probability
    #[arg(long, default_value_t = 0.7)]
    beta: f64,
    /// ER: edge probability
    #[arg(long, default_value_t = 0.15)]
    rho: f64,
    /// BA: connected seed size (capped at n0)
    #[arg(long, default_value_t = 50)]
    kappa: usize,
    /// BA: edges attached per new node
    #[arg(long, default_value_t = 5)]
    m: usize,
}

impl ModelArgs {
    fn spec(&self) -> ModelSpec {
        ModelSpec {
            kind: self.model.into(),
            n0: self.n0,
            ws_alpha: self.alpha,
            ws_beta: self.beta,
            er_rho: self.rho,
            ba_kappa: self.kappa.min(self.n0),
            ba_m: self.m,
        }
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Draw a random graph and write it as an edge list
    Generate {
        #[command(flatten)]
        model: ModelArgs,
        /// Output file name inside --out [default: <model>.edges]
        #[arg(long)]
        name: Option<String>,
    },
    /// Full relation report between two graphs, as JSON on stdout
    Metrics {
        /// First graph (edge list or Pajek; format is sniffed)
        a: PathBuf,
        /// Second graph
        b: PathBuf,
        /// Parameters per decoding-precision draw (capped at aligned n)
        #[arg(long, default_value_t = 10)]
        theta_len: usize,
        /// Independent decoding-precision draws per side
        #[arg(long, default_value_t = 1)]
        theta_draws: usize,
    },
    /// Evolve a graph and trace every relation measure per iteration
    Evolve {
        #[command(flatten)]
        model: ModelArgs,
        /// Which process runs each iteration
        #[arg(long, value_enum)]
        process: ProcessArg,
        /// Iteration count
        #[arg(long, default_value_t = 200)]
        iters: usize,
        /// Parameters per decoding-precision draw (capped at aligned n)
        #[arg(long, default_value_t = 10)]
        theta_len: usize,
        /// Decoding-precision draws per iteration
        #[arg(long, default_value_t = 4)]
        theta_draws: usize,
        /// Foreign wiring: attach to each node with this probability
        /// [default: rule chosen by the origin family]
        #[arg(long)]
        foreign_rho: Option<f64>,
        /// Foreign wiring: attach to this many nearest nodes by index
        #[arg(long)]
        foreign_alpha: Option<usize>,
        /// Foreign wiring: rewiring probability for --foreign-alpha edges
        #[arg(long)]
        foreign_beta: Option<f64>,
    },
    /// Ego-net similarity pipeline over a labeled network (four CSVs)
    Protein {
        /// Pajek file with a class column on every vertex
        file: PathBuf,
        /// Parameters per decoding-precision draw
        #[arg(long, default_value_t = 3)]
        theta_len: usize,
    },
    /// All-pairs compound comparison and activity classification
    Compounds {
        /// Compound collection (see docs/compound-format.md)
        file: PathBuf,
        /// Parameters per decoding-precision draw
        #[arg(long, default_value_t = 15)]
        theta_len: usize,
        /// Comma-separated metrics to compute; mi/gc/te sample the
        /// representations and are far more expensive than kl/fi
        #[arg(long, default_value = "kl,fi")]
        metrics: String,
        /// Train/test splits per proportion (median F1 is reported)
        #[arg(long, default_value_t = 10)]
        class_seeds: u64,
    },
    /// Laplacian centrality of every node, CSV on stdout
    Centrality {
        /// Graph file (edge list or Pajek)
        file: PathBuf,
    },
}

/// Fully resolved global settings: flag, else config file, else default.
struct Settings {
    seed: u64,
    mode: RepresentationMode,
    sampling: SamplingConfig,
    partitions: usize,
    out: PathBuf,
    use_largest_component: bool,
}

const CONFIG_KEYS: [&str; 8] = [
    "seed",
    "mode",
    "samples",
    "partitions",
    "knn_k",
    "coupling",
    "out",
    "largest_component",
];

fn resolve_settings(g: &GlobalArgs) -> Result<Settings> {
    let file = match &g.config {
        Some(path) => FileConfig::load(path)?,
        None => FileConfig::default(),
    };
    file.ensure_known(&CONFIG_KEYS)?;

    let mode: ModeArg = resolve(g.mode, &file, "mode", ModeArg::Sigma)?;
    let coupling: CouplingArg = resolve(g.coupling, &file, "coupling", CouplingArg::Common)?;
    let out: Option<PathBuf> = resolve_opt(g.out.clone(), &file, "out")?;
    Ok(Settings {
        seed: resolve(g.seed, &file, "seed", 0)?,
        mode: mode.into(),
        sampling: SamplingConfig {
            samples: resolve(g.samples, &file, "samples", 2000)?,
            knn_k: resolve(g.knn_k, &file, "knn_k", 3)?,
            coupling: coupling.into(),
        },
        partitions: resolve(g.partitions, &file, "partitions", 10)?,
        out: out.unwrap_or_else(|| PathBuf::from(".")),
        use_largest_component: resolve(
            g.largest_component.then_some(true),
            &file,
            "largest_component",
            false,
        )?,
    })
}

/// Annotates a library error with the file it came from, preserving its
/// exit class.
fn at_path(path: &Path, err: netgauss::Error) -> CliError {
    match CliError::from(err) {
        CliError::Io(m) => CliError::Io(format!("{}: {m}", path.display())),
        CliError::Parse(m) => CliError::Parse(format!("{}: {m}", path.display())),
        other => other,
    }
}

/// Loads a graph in either supported format and enforces the connectivity
/// contract: disconnected graphs are rejected unless --largest-component
/// opted into extraction.
fn load_graph(path: &Path, settings: &Settings) -> Result<Graph<f64>> {
    let graph: Graph<f64> = read_graph(path).map_err(|e| at_path(path, e))?;
    if graph.is_connected() {
        return Ok(graph);
    }
    if settings.use_largest_component {
        graph.largest_component().map_err(|e| at_path(path, e))
    } else {
        Err(CliError::Parse(format!(
            "{}: graph is not connected (pass --largest-component to analyze its largest component)",
            path.display()
        )))
    }
}

fn ensure_out_dir(settings: &Settings) -> Result<()> {
    fs::create_dir_all(&settings.out)
        .map_err(|e| CliError::io(&settings.out, e))
}

fn create_out_file(settings: &Settings, name: &str) -> Result<File> {
    let path = settings.out.join(name);
    File::create(&path).map_err(|e| CliError::io(&path, e))
}

/// JSON encoding of one measurement under the sentinel policy: finite
/// values are numbers, infinities are the strings "inf"/"-inf", missing
/// values (NaN) are null.
fn json_num(v: f64) -> Value {
    if v.is_nan() {
        Value::Null
    } else if v == f64::INFINITY {
        Value::String("inf".into())
    } else if v == f64::NEG_INFINITY {
        Value::String("-inf".into())
    } else {
        json!(v)
    }
}

fn json_list(vs: &[f64]) -> Value {
    Value::Array(vs.iter().map(|&v| json_num(v)).collect())
}

fn run_generate(settings: &Settings, model: &ModelArgs, name: Option<String>) -> Result<()> {
    let spec = model.spec();
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let graph: Graph<f64> = generate(&spec, &mut rng)?;
    ensure_out_dir(settings)?;
    let name = name.unwrap_or_else(|| format!("{}.edges", spec.kind));
    let path = settings.out.join(&name);
    write_edge_list_file(&graph, &path).map_err(|e| at_path(&path, e))?;
    eprintln!(
        "generate: {} with {} nodes, {} edges",
        spec.kind,
        graph.n(),
        graph.edge_count()
    );
    println!("{}", path.display());
    Ok(())
}

fn run_metrics(
    settings: &Settings,
    a_path: &Path,
    b_path: &Path,
    theta_len: usize,
    theta_draws: usize,
) -> Result<()> {
    if theta_len == 0 || theta_draws == 0 {
        return Err(CliError::Usage(
            "theta-len and theta-draws must be at least 1".into(),
        ));
    }
    let raw_a = load_graph(a_path, settings)?;
    let raw_b = load_graph(b_path, settings)?;
    let (ga, gb, gamma_a, gamma_b) = align_pair(&raw_a, &raw_b, DisconnectPolicy::default())?;
    let ra = represent(&ga, settings.mode)?;
    let rb = represent(&gb, settings.mode)?;

    // RNG order: the Θ draws on a, the Θ draws on b, then the relation
    // sampling — documented so reruns are byte-identical.
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let setups_a: Vec<FisherSetup<f64>> = (0..theta_draws)
        .map(|_| draw_theta(&gb, &ra, theta_len, &mut rng))
        .collect::<Result<_>>()?;
    let setups_b: Vec<FisherSetup<f64>> = (0..theta_draws)
        .map(|_| draw_theta(&ga, &rb, theta_len, &mut rng))
        .collect::<Result<_>>()?;

    let analysis = relate(
        &ra,
        &rb,
        gamma_a,
        gamma_b,
        &setups_a[0],
        settings.partitions,
        &settings.sampling,
        &mut rng,
    )?;
    let mut fisher_a = vec![analysis.report.fisher_quantity];
    for setup in &setups_a[1..] {
        fisher_a.push(fisher_quantity(setup, &ra)?);
    }
    let fisher_b: Vec<f64> = setups_b
        .iter()
        .map(|s| fisher_quantity(s, &rb))
        .collect::<netgauss::Result<_>>()?;
    let mean = |vs: &[f64]| vs.iter().sum::<f64>() / vs.len() as f64;

    let report = analysis.report;
    let kl_mean = 0.5 * (report.kl_ab + report.kl_ba);
    let doc = json!({
        "inputs": { "a": a_path.display().to_string(), "b": b_path.display().to_string() },
        "settings": {
            "mode": mode_name(settings.mode),
            "coupling": settings.sampling.coupling.to_string(),
            "samples": settings.sampling.samples,
            "knn_k": settings.sampling.knn_k,
            "partitions": settings.partitions,
            "seed": settings.seed,
            "theta_len": theta_len,
            "theta_draws": theta_draws,
        },
        "aligned_n": ra.n(),
        "gamma_a": json_num(report.gamma_a),
        "gamma_b": json_num(report.gamma_b),
        "entropy_a": json_num(ra.entropy()),
        "entropy_b": json_num(rb.entropy()),
        "kl_ab": json_num(report.kl_ab),
        "kl_ba": json_num(report.kl_ba),
        "kl_mean": json_num(kl_mean),
        "mi": json_num(report.mi),
        "fisher_a": { "draws": json_list(&fisher_a), "mean": json_num(mean(&fisher_a)) },
        "fisher_b": { "draws": json_list(&fisher_b), "mean": json_num(mean(&fisher_b)) },
        "granger_ab": json_num(report.granger_ab),
        "granger_ba": json_num(report.granger_ba),
        "granger_mean": json_num(0.5 * (report.granger_ab + report.granger_ba)),
        "te_ab": json_num(report.te_ab),
        "te_ba": json_num(report.te_ba),
        "te_mean": json_num(0.5 * (report.te_ab + report.te_ba)),
        "per_partition": {
            "granger_ab": json_list(&analysis.tg_ab),
            "granger_ba": json_list(&analysis.tg_ba),
            "te_ab": json_list(&analysis.tt_ab),
            "te_ba": json_list(&analysis.tt_ba),
        },
        "degenerate": analysis.degenerate.clone().map_or(Value::Null, Value::String),
    });
    println!("{}", serde_json::to_string_pretty(&doc).expect("valid JSON"));
    Ok(())
}

fn mode_name(mode: RepresentationMode) -> &'static str {
    match mode {
        RepresentationMode::Sigma => "sigma",
        RepresentationMode::SigmaDual => "sigma-dual",
    }
}

fn foreign_rule(
    kind: ModelKind,
    rho: Option<f64>,
    alpha: Option<usize>,
    beta: Option<f64>,
) -> Result<ForeignRule> {
    match (rho, alpha.is_some() || beta.is_some()) {
        (Some(_), true) => Err(CliError::Usage(
            "--foreign-rho conflicts with --foreign-alpha/--foreign-beta".into(),
        )),
        (Some(r), false) => Ok(ForeignRule::Er { rho: r }),
        (None, true) => Ok(ForeignRule::WsLocal {
            alpha: alpha.unwrap_or(40),
            beta: beta.unwrap_or(0.1),
        }),
        (None, false) => Ok(default_foreign(kind)),
    }
}

#[allow(clippy::too_many_arguments)]
fn run_evolve(
    settings: &Settings,
    model: &ModelArgs,
    process: ProcessArg,
    iters: usize,
    theta_len: usize,
    theta_draws: usize,
    foreign_rho: Option<f64>,
    foreign_alpha: Option<usize>,
    foreign_beta: Option<f64>,
) -> Result<()> {
    let spec = model.spec();
    let foreign = foreign_rule(spec.kind, foreign_rho, foreign_alpha, foreign_beta)?;
    let evolve_settings = EvolveSettings {
        model: spec,
        evolution: EvolutionSpec {
            process: process.into(),
            iterations: iters,
            foreign,
        },
        mode: settings.mode,
        sampling: settings.sampling,
        partitions: settings.partitions,
        theta_len,
        theta_draws,
        seed: settings.seed,
    };
    let trace = run_evolution(&evolve_settings)?;

    ensure_out_dir(settings)?;
    write_trace_csv(&trace, create_out_file(settings, "trace.csv")?)?;
    let correlations = trace_correlations(&trace);
    write_correlations_csv(&correlations, create_out_file(settings, "trace_correlations.csv")?)?;

    let ok = trace
        .records
        .iter()
        .filter(|r| matches!(r.status, RowStatus::Ok))
        .count();
    let degenerate = trace
        .records
        .iter()
        .filter(|r| matches!(r.status, RowStatus::Degenerate(_)))
        .count();
    let failed = trace.records.len() - ok - degenerate;
    eprint!(
        "evolve: {} iterations recorded ({} ok, {} degenerate, {} failed)",
        trace.records.len(),
        ok,
        degenerate,
        failed
    );
    match &trace.stopped_early {
        Some(reason) => eprintln!("; stopped early: {}", reason),
        None => eprintln!(),
    }
    Ok(())
}

fn run_protein_cmd(settings: &Settings, file: &Path, theta_len: usize) -> Result<()> {
    let graph = load_graph(file, settings)?;
    let protein_settings = ProteinSettings {
        mode: settings.mode,
        sampling: settings.sampling,
        partitions: settings.partitions,
        theta_len,
        seed: settings.seed,
    };
    let report = protein::run_protein(&graph, &protein_settings)?;

    ensure_out_dir(settings)?;
    protein::write_pairs_csv(&report, graph.node_ids(), create_out_file(settings, "protein_pairs.csv")?)?;
    protein::write_class_table_csv(&report, create_out_file(settings, "protein_class_table.csv")?)?;
    protein::write_distance_curve_csv(
        &report,
        create_out_file(settings, "protein_distance_curve.csv")?,
    )?;
    protein::write_closeness_csv(&report, create_out_file(settings, "protein_closeness.csv")?)?;

    let degenerate = report
        .pairs
        .iter()
        .filter(|p| matches!(p.status, RowStatus::Degenerate(_)))
        .count();
    let failed = report
        .pairs
        .iter()
        .filter(|p| matches!(p.status, RowStatus::Error(_)))
        .count();
    eprintln!(
        "protein: {} nodes, {} edges, {} classes; {} qualifying nodes, {} pairs ({} degenerate, {} failed)",
        report.node_count,
        report.edge_count,
        report.class_count,
        report.eligible.len(),
        report.pairs.len(),
        degenerate,
        failed
    );
    Ok(())
}

fn run_compounds_cmd(
    settings: &Settings,
    file: &Path,
    theta_len: usize,
    metrics: &str,
    class_seeds: u64,
) -> Result<()> {
    let collection = compounds::read_compounds(&file.display().to_string())?;
    let compounds_settings = CompoundsSettings {
        mode: settings.mode,
        sampling: settings.sampling,
        partitions: settings.partitions,
        theta_len,
        seed: settings.seed,
        metrics: parse_metric_list(metrics)?,
        proportions: (1..=9).map(|t| f64::from(t) / 10.0).collect(),
        class_seeds,
    };
    let report = compounds::run_compounds(&collection, &compounds_settings)?;

    ensure_out_dir(settings)?;
    for &metric in &compounds_settings.metrics {
        compounds::write_features_csv(
            &report,
            metric,
            create_out_file(settings, &format!("compounds_features_{metric}.csv"))?,
        )?;
    }
    compounds::write_class_summary_csv(
        &report,
        create_out_file(settings, "compounds_class_summary.csv")?,
    )?;
    compounds::write_f1_csv(&report, create_out_file(settings, "compounds_f1.csv")?)?;

    eprintln!(
        "compounds: {} compounds, metrics {}; {} pairs flagged",
        report.ids.len(),
        compounds_settings
            .metrics
            .iter()
            .map(|m| m.name())
            .collect::<Vec<_>>()
            .join(","),
        report.flagged.len()
    );
    Ok(())
}

fn run_centrality(settings: &Settings, file: &Path) -> Result<()> {
    let graph = load_graph(file, settings)?;
    let centralities = laplacian_centralities(&graph)?;
    let mut w = csv::Writer::from_writer(std::io::stdout());
    w.write_record(["node", "centrality"])
        .map_err(|e| CliError::Io(e.to_string()))?;
    for (id, c) in graph.node_ids().iter().zip(centralities.iter()) {
        w.write_record([id.clone(), format!("{c}")])
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

fn run() -> Result<()> {
    let cli = Cli::parse();
    let settings = resolve_settings(&cli.global)?;
    match cli.command {
        Command::Generate { model, name } => run_generate(&settings, &model, name),
        Command::Metrics {
            a,
            b,
            theta_len,
            theta_draws,
        } => run_metrics(&settings, &a, &b, theta_len, theta_draws),
        Command::Evolve {
            model,
            process,
            iters,
            theta_len,
            theta_draws,
            foreign_rho,
            foreign_alpha,
            foreign_beta,
        } => run_evolve(
            &settings,
            &model,
            process,
            iters,
            theta_len,
            theta_draws,
            foreign_rho,
            foreign_alpha,
            foreign_beta,
        ),
        Command::Protein { file, theta_len } => run_protein_cmd(&settings, &file, theta_len),
        Command::Compounds {
            file,
            theta_len,
            metrics,
            class_seeds,
        } => run_compounds_cmd(&settings, &file, theta_len, &metrics, class_seeds),
        Command::Centrality { file } => run_centrality(&settings, &file),
    }
}

fn main() {
    match run() {
        Ok(()) => {}
        Err(err) => {
            eprintln!("error: {err}");
            std::process::exit(err.exit_code());
        }
    }
}
