use std::fmt::Write as _;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use dcsbm::baselines::{
    adjacency_spectral_with, frobenius_threshold_with, laplacian_spectral_with, score_cluster_with, BaselineError,
    ClusterOptions, ThresholdRule,
};
use dcsbm::clustering::Clustering;
use dcsbm::detect::{detect_communities, detect_with_known_L, DetectConfig, DetectError, LeftoverPolicy, Regime};
use dcsbm::experiment::{format_rows, run_experiment, ExperimentError, ExperimentSpec, Method, Source};
use dcsbm::io::{
    csv_preamble, format_eigvec_csv, read_edge_list, read_gml, read_matrix, read_model, read_truth, write_edge_list,
    write_labels, write_text, EdgeListOptions, IoError,
};
use dcsbm::metrics::{concentration_report, misclassification, random_walk_checks, MetricsError};
use dcsbm::model::{sample_graph, DcsbmParams, Graph, ModelError};
use dcsbm::presets::{Preset, PresetError};
use dcsbm::spectra::{
    adjacency, alignment_report, eigs_topk, inflated_normalized_adjacency, laplacian, normalized_adjacency, SpectraError,
    SymMatrix, DEFAULT_TOL,
};
use thiserror::Error;

#[derive(Debug, Error)]
enum CliError {
    #[error("{0}")]
    Usage(String),
    #[error("{0}")]
    Io(#[from] IoError),
    #[error("{0}")]
    Numerical(SpectraError),
}

impl CliError {
    fn exit_code(&self) -> u8 {
        match self {
            CliError::Usage(_) => 2,
            CliError::Io(_) => 3,
            CliError::Numerical(_) => 4,
        }
    }
}

impl From<SpectraError> for CliError {
    fn from(e: SpectraError) -> Self {
        match e {
            SpectraError::NoConvergence { .. } => CliError::Numerical(e),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<DetectError> for CliError {
    fn from(e: DetectError) -> Self {
        match e {
            DetectError::Spectra(s) => s.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<BaselineError> for CliError {
    fn from(e: BaselineError) -> Self {
        match e {
            BaselineError::Spectra(s) => s.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<MetricsError> for CliError {
    fn from(e: MetricsError) -> Self {
        match e {
            MetricsError::Spectra(s) => s.into(),
            other => CliError::Usage(other.to_string()),
        }
    }
}

impl From<ModelError> for CliError {
    fn from(e: ModelError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<PresetError> for CliError {
    fn from(e: PresetError) -> Self {
        CliError::Usage(e.to_string())
    }
}

impl From<ExperimentError> for CliError {
    fn from(e: ExperimentError) -> Self {
        CliError::Usage(e.to_string())
    }
}

/// Spectral community detection on degree-corrected block models.
#[derive(Debug, Parser)]
#[command(name = "dcsbm", version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Sample a graph from a preset or a model file.
    Generate(GenerateArgs),
    /// Run normalized-adjacency community detection on an edge list.
    Detect(DetectArgs),
    /// Run a baseline clustering method on an edge list.
    Baseline(BaselineArgs),
    /// Concentration and random-walk diagnostics, one CSV row per seed.
    Verify(VerifyArgs),
    /// Sweep sizes, seeds and methods into a CSV.
    Experiment(ExperimentArgs),
    /// Eigenvector alignment diagnostics for A and A + δA.
    Alignment(AlignmentArgs),
    /// Export top eigenvectors of a graph operator as CSV.
    Eigvecs(EigvecsArgs),
    /// Convert a GML network to an edge list and labels.
    ImportGml(ImportGmlArgs),
}

#[derive(Debug, Args)]
struct ModelSource {
    /// Named preset.
    #[arg(long, conflicts_with = "model", required_unless_present = "model")]
    preset: Option<Preset>,
    /// TOML model file.
    #[arg(long)]
    model: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct GraphInput {
    /// Edge list with one `u v` pair per line.
    #[arg(long)]
    graph: PathBuf,
    /// Vertex ids in the file start at 1.
    #[arg(long)]
    one_indexed: bool,
    /// Vertex count, when trailing vertices are isolated.
    #[arg(long)]
    n: Option<usize>,
    /// Ground-truth labels; prints the misclassification rate.
    #[arg(long)]
    truth: Option<PathBuf>,
    /// Where to write the labels.
    #[arg(long)]
    out: Option<PathBuf>,
}

impl GraphInput {
    fn load(&self) -> Result<Graph, CliError> {
        Ok(read_edge_list(&self.graph, &EdgeListOptions { one_indexed: self.one_indexed, n: self.n })?)
    }
}

#[derive(Debug, Args)]
struct GenerateArgs {
    #[command(flatten)]
    source: ModelSource,
    /// Number of vertices (ignored for model files).
    #[arg(long, default_value_t = 2000)]
    n: usize,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Edge list output.
    #[arg(long)]
    edges: PathBuf,
    /// Truth labels output.
    #[arg(long)]
    labels: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct DetectArgs {
    #[command(flatten)]
    input: GraphInput,
    #[arg(long, default_value = "superlog")]
    regime: Regime,
    #[arg(long = "f-mult", default_value_t = 1.0)]
    f_mult: f64,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    /// Number of communities, when known.
    #[arg(long = "known-L", requires = "alpha_min")]
    known_l: Option<usize>,
    /// Smallest community fraction, used with `--known-L`.
    #[arg(long)]
    alpha_min: Option<f64>,
    #[arg(long, default_value = "unassigned")]
    leftover: LeftoverPolicy,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum BaselineMethod {
    Adjacency,
    Laplacian,
    Score,
    Frobenius,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Operator {
    Hhat,
    Hinflated,
    Laplacian,
    Adjacency,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Threshold {
    Zero,
    TwoMeans,
}

#[derive(Debug, Args)]
struct OperatorArgs {
    #[arg(long, value_enum, default_value = "hhat")]
    operator: Operator,
    /// Degree floor for `hinflated`.
    #[arg(long, default_value_t = 1.0)]
    floor: f64,
    /// Regulariser for `laplacian`.
    #[arg(long, default_value_t = 0.0)]
    tau: f64,
}

impl OperatorArgs {
    fn build(&self, g: &Graph) -> Result<SymMatrix, CliError> {
        Ok(match self.operator {
            Operator::Hhat => normalized_adjacency(g),
            Operator::Hinflated => inflated_normalized_adjacency(g, self.floor)?,
            Operator::Laplacian => laplacian(g, self.tau)?,
            Operator::Adjacency => adjacency(g),
        })
    }
}

#[derive(Debug, Args)]
struct BaselineArgs {
    #[command(flatten)]
    input: GraphInput,
    #[arg(long, value_enum)]
    method: BaselineMethod,
    /// Number of clusters.
    #[arg(long = "K", default_value_t = 2)]
    k: usize,
    #[command(flatten)]
    op: OperatorArgs,
    /// 1-based eigenvector index for `frobenius`.
    #[arg(long, default_value_t = 2)]
    eig_index: usize,
    #[arg(long, value_enum, default_value = "zero")]
    threshold: Threshold,
    /// Embedding dimension; defaults to K.
    #[arg(long)]
    dims: Option<usize>,
    #[arg(long, default_value_t = 0)]
    seed: u64,
    #[arg(long, default_value_t = 50)]
    restarts: usize,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    #[command(flatten)]
    source: ModelSource,
    #[arg(long, default_value_t = 1000)]
    n: usize,
    /// Seeds, comma separated.
    #[arg(long, value_delimiter = ',', default_value = "0")]
    seeds: Vec<u64>,
    /// CSV output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct ExperimentArgs {
    #[command(flatten)]
    source: ModelSource,
    #[arg(long, default_value = "experiment")]
    name: String,
    /// Sizes, comma separated (ignored for model files).
    #[arg(long, value_delimiter = ',', default_value = "2000")]
    sizes: Vec<usize>,
    #[arg(long, value_delimiter = ',', default_value = "0")]
    seeds: Vec<u64>,
    #[arg(long, value_delimiter = ',', default_value = "hhat,laplacian,adjacency")]
    methods: Vec<Method>,
    #[arg(long, default_value = "superlog")]
    regime: Regime,
    #[arg(long = "f-mult", default_value_t = 1.0)]
    f_mult: f64,
    /// Laplacian regulariser; chosen per graph when absent.
    #[arg(long)]
    tau: Option<f64>,
    /// Add concentration columns.
    #[arg(long)]
    concentration: bool,
    /// Add a runtime column.
    #[arg(long)]
    timings: bool,
    /// CSV output; stdout when absent.
    #[arg(long)]
    out: Option<PathBuf>,
}

#[derive(Debug, Args)]
struct AlignmentArgs {
    /// Matrix file for A.
    a: PathBuf,
    /// Matrix file for δA.
    delta: PathBuf,
}

#[derive(Debug, Args)]
struct EigvecsArgs {
    #[arg(long)]
    graph: PathBuf,
    #[arg(long)]
    one_indexed: bool,
    #[arg(long)]
    n: Option<usize>,
    #[command(flatten)]
    op: OperatorArgs,
    /// Number of eigenvectors.
    #[arg(long, default_value_t = 2)]
    k: usize,
    #[arg(long)]
    out: PathBuf,
}

#[derive(Debug, Args)]
struct ImportGmlArgs {
    gml: PathBuf,
    #[arg(long)]
    edges: PathBuf,
    /// Labels taken from the integer `value` node attribute.
    #[arg(long)]
    labels: Option<PathBuf>,
}

fn model_params(source: &ModelSource, n: usize) -> Result<(Option<DcsbmParams>, Option<Preset>), CliError> {
    match (&source.preset, &source.model) {
        (_, Some(path)) => Ok((Some(read_model(path)?), None)),
        (Some(p), None) => Ok((p.params(n)?, Some(*p))),
        (None, None) => Err(CliError::Usage("one of --preset or --model is required".into())),
    }
}

fn sizes_line(c: &Clustering) -> String {
    let sizes: Vec<String> = c.sizes().iter().map(|s| s.to_string()).collect();
    format!("clusters={} sizes=[{}] unassigned={}", c.count(), sizes.join(","), c.unassigned())
}

fn finish_clustering(input: &GraphInput, c: &Clustering) -> Result<(), CliError> {
    println!("{}", sizes_line(c));
    if let Some(path) = &input.truth {
        let truth = read_truth(path)?;
        let m = misclassification(c, &truth)?;
        println!("misclassified={} fraction={:.6}", m.errors, m.fraction);
    }
    if let Some(path) = &input.out {
        write_labels(path, c.labels())?;
    }
    Ok(())
}

fn emit(out: &Option<PathBuf>, text: &str) -> Result<(), CliError> {
    match out {
        Some(path) => Ok(write_text(path, text)?),
        None => {
            print!("{text}");
            Ok(())
        }
    }
}

fn run_generate(args: &GenerateArgs) -> Result<(), CliError> {
    let (graph, truth) = match model_params(&args.source, args.n)? {
        (Some(p), _) => (sample_graph(&p, args.seed)?, p.sigma().to_vec()),
        (None, Some(preset)) => {
            let (g, t, _) = preset.instance(args.n, args.seed)?;
            (g, t)
        }
        (None, None) => unreachable!("model_params returns a preset or parameters"),
    };
    write_edge_list(&args.edges, &graph)?;
    if let Some(path) = &args.labels {
        let labels: Vec<Option<usize>> = truth.iter().map(|&t| Some(t)).collect();
        write_labels(path, &labels)?;
    }
    let isolated = graph.degrees().iter().filter(|&&d| d == 0).count();
    println!(
        "n={} edges={} avg_degree={:.4} isolated={}",
        graph.n(),
        graph.num_edges(),
        graph.average_degree(),
        isolated
    );
    Ok(())
}

fn run_detect(args: &DetectArgs) -> Result<(), CliError> {
    let graph = args.input.load()?;
    let config = DetectConfig {
        regime: args.regime,
        f_multiplier: args.f_mult,
        seed: args.seed,
        leftover_policy: args.leftover,
        ..DetectConfig::default()
    };
    let d = match (args.known_l, args.alpha_min) {
        (Some(l), Some(a)) => detect_with_known_L(&graph, l, a, &config)?,
        _ => detect_communities(&graph, &config)?,
    };
    let eps = d.eps.map_or("none".to_string(), |e| format!("{e:.6}"));
    println!("L_hat={} f={:.6} threshold={:.6e} eps={}", d.l_hat, d.f, d.threshold, eps);
    for w in &d.warnings {
        eprintln!("warning: {w}");
    }
    finish_clustering(&args.input, &d.clustering)
}

fn run_baseline(args: &BaselineArgs) -> Result<(), CliError> {
    let graph = args.input.load()?;
    let opts = ClusterOptions { seed: args.seed, restarts: args.restarts, dims: args.dims };
    let c = match args.method {
        BaselineMethod::Adjacency => adjacency_spectral_with(&graph, args.k, &opts)?,
        BaselineMethod::Laplacian => laplacian_spectral_with(&graph, args.k, args.op.tau, &opts)?,
        BaselineMethod::Score => score_cluster_with(&graph, args.k, &opts)?,
        BaselineMethod::Frobenius => {
            let rule = match args.threshold {
                Threshold::Zero => ThresholdRule::Zero,
                Threshold::TwoMeans => ThresholdRule::TwoMeans,
            };
            let c = frobenius_threshold_with(&args.op.build(&graph)?, args.eig_index, rule)?;
            if c.is_degenerate() {
                eprintln!("warning: eigenvector {} has one sign; split is degenerate", args.eig_index);
            }
            c
        }
    };
    finish_clustering(&args.input, &c)
}

fn run_verify(args: &VerifyArgs) -> Result<(), CliError> {
    let params = match model_params(&args.source, args.n)? {
        (Some(p), _) => p,
        _ => return Err(CliError::Usage("verify needs a preset with model parameters".into())),
    };
    let mut out = csv_preamble("verify");
    out.push_str(
        "seed,n,d_bar,rho_hat_h_dbar,rho_h_eh_dbar,rho_eh_p_dbar,rho_w_dbar,gap_p,rho_w_over_gap,triangle,\
         rw_identity_residual,rw_lambda_max,rw_lower_holds,rw_upper_holds,rw_edge_product_error\n",
    );
    for &seed in &args.seeds {
        let graph = sample_graph(&params, seed)?;
        let c = concentration_report(&graph, &params)?;
        let rw = random_walk_checks(&graph)?;
        writeln!(
            out,
            "{seed},{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            graph.n(),
            c.d_bar,
            c.scaled_hat_h(),
            c.scaled_h_eh(),
            c.scaled_eh_p(),
            c.scaled_w(),
            c.gap_p,
            c.w_over_gap(),
            c.triangle_holds(),
            rw.identity_residual,
            rw.lambda_max,
            rw.lower_holds,
            rw.upper_holds,
            rw.edge_product_error
        )
        .unwrap();
    }
    emit(&args.out, &out)
}

fn run_experiment_cmd(args: &ExperimentArgs) -> Result<(), CliError> {
    let source = match (&args.source.preset, &args.source.model) {
        (_, Some(path)) => Source::Model(read_model(path)?),
        (Some(p), None) => Source::Preset(*p),
        (None, None) => return Err(CliError::Usage("one of --preset or --model is required".into())),
    };
    let mut spec = ExperimentSpec::new(&args.name, source, args.sizes.clone(), args.seeds.clone(), args.methods.clone());
    spec.detect = DetectConfig { regime: args.regime, f_multiplier: args.f_mult, ..DetectConfig::default() };
    spec.tau = args.tau;
    spec.concentration = args.concentration;
    spec.timings = args.timings;
    let rows = run_experiment(&spec)?;
    emit(&args.out, &format_rows(&rows, args.timings))
}

fn run_alignment(args: &AlignmentArgs) -> Result<(), CliError> {
    let a = read_matrix(&args.a)?;
    let delta = read_matrix(&args.delta)?;
    let r = alignment_report(&a, &delta)?;
    let bound = r.bound.map_or("none".to_string(), |b| format!("{b:.6}"));
    println!("rho_delta={:.6e} gap={:.6e} bound={bound}", r.rho_delta, r.gap);
    println!("i,lambda,mu,shift,weyl,dim_perturbed,dim_unperturbed,best_dot");
    for (i, e) in r.entries.iter().enumerate() {
        println!(
            "{},{:.10},{:.10},{:.3e},{},{},{},{:.6}",
            i + 1,
            e.lambda,
            e.mu,
            e.eigenvalue_shift,
            e.weyl_holds,
            e.perturbed_dim,
            e.unperturbed_dim,
            e.best_dot
        );
    }
    println!(
        "hypothesis={} weyl={} dimension={} dot={}",
        r.hypothesis_holds(),
        r.weyl_holds(),
        r.dimension_holds(),
        r.dot_holds()
    );
    Ok(())
}

fn run_eigvecs(args: &EigvecsArgs) -> Result<(), CliError> {
    let graph = read_edge_list(&args.graph, &EdgeListOptions { one_indexed: args.one_indexed, n: args.n })?;
    let m = args.op.build(&graph)?;
    let eigs = eigs_topk(&m, args.k, DEFAULT_TOL, (10 * m.n()).max(1000))?;
    let vectors: Vec<&[f64]> = eigs.vectors.iter().map(|v| v.as_slice()).collect();
    write_text(&args.out, &format_eigvec_csv(&vectors))?;
    let values: Vec<String> = eigs.values.iter().map(|v| format!("{v:.10}")).collect();
    println!("eigenvalues=[{}]", values.join(","));
    Ok(())
}

fn run_import_gml(args: &ImportGmlArgs) -> Result<(), CliError> {
    let g = read_gml(&args.gml)?;
    write_edge_list(&args.edges, &g.graph)?;
    if let Some(path) = &args.labels {
        let values = g
            .values
            .as_ref()
            .ok_or_else(|| CliError::Usage(format!("{}: nodes carry no integer value attribute", args.gml.display())))?;
        let labels = relabel(values);
        write_labels(path, &labels)?;
    }
    println!(
        "n={} edges={} self_loops_dropped={} duplicates_dropped={}",
        g.graph.n(),
        g.graph.num_edges(),
        g.self_loops_dropped,
        g.duplicates_dropped
    );
    Ok(())
}

/// Maps arbitrary integer values to `0..C` in increasing order.
fn relabel(values: &[i64]) -> Vec<Option<usize>> {
    let mut distinct = values.to_vec();
    distinct.sort_unstable();
    distinct.dedup();
    values.iter().map(|v| distinct.binary_search(v).ok()).collect()
}

fn run(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Generate(a) => run_generate(a),
        Command::Detect(a) => run_detect(a),
        Command::Baseline(a) => run_baseline(a),
        Command::Verify(a) => run_verify(a),
        Command::Experiment(a) => run_experiment_cmd(a),
        Command::Alignment(a) => run_alignment(a),
        Command::Eigvecs(a) => run_eigvecs(a),
        Command::ImportGml(a) => run_import_gml(a),
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 2 } else { 0 };
            let _ = e.print();
            return ExitCode::from(code);
        }
    };
    match run(&cli) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}
