//! Sweeps over sizes, seeds and methods, with one CSV row per run.

use std::fmt::{self, Write as _};
use std::str::FromStr;
use std::time::Instant;

use rayon::prelude::*;
use thiserror::Error;

use crate::baselines::{adjacency_spectral, laplacian_spectral_with, score_cluster, ClusterOptions};
use crate::clustering::Clustering;
use crate::detect::{detect_communities, detect_with_known_L, DetectConfig};
use crate::io::csv_preamble;
use crate::metrics::{concentration_report, misclassification, DENSE_LIMIT};
use crate::model::{sample_graph, DcsbmParams, Graph};
use crate::presets::{Preset, PresetError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ExperimentError {
    #[error("experiment needs at least one {0}")]
    Empty(&'static str),
    #[error("unknown method {0:?}")]
    UnknownMethod(String),
    #[error(transparent)]
    Preset(#[from] PresetError),
}

/// Clustering methods an experiment can compare.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Method {
    /// [`detect_communities`].
    Hhat,
    /// [`detect_with_known_L`] with `L = K` and the smallest truth fraction.
    HhatKnown,
    /// [`laplacian_spectral`](crate::baselines::laplacian_spectral) with `K`
    /// eigenvectors.
    Laplacian,
    /// Laplacian clustering on the top eigenvector only.
    LaplacianTop,
    Adjacency,
    Score,
}

impl Method {
    pub const ALL: [Method; 6] =
        [Method::Hhat, Method::HhatKnown, Method::Laplacian, Method::LaplacianTop, Method::Adjacency, Method::Score];

    pub fn name(self) -> &'static str {
        match self {
            Method::Hhat => "hhat",
            Method::HhatKnown => "hhat-known",
            Method::Laplacian => "laplacian",
            Method::LaplacianTop => "laplacian-top",
            Method::Adjacency => "adjacency",
            Method::Score => "score",
        }
    }
}

impl fmt::Display for Method {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Method {
    type Err = ExperimentError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Method::ALL.into_iter().find(|m| m.name() == s).ok_or_else(|| ExperimentError::UnknownMethod(s.to_string()))
    }
}

/// Where instances come from.
#[derive(Debug, Clone, PartialEq)]
pub enum Source {
    Preset(Preset),
    /// A fixed model; its `n` overrides the sweep.
    Model(DcsbmParams),
}

#[derive(Debug, Clone, PartialEq)]
pub struct ExperimentSpec {
    pub name: String,
    pub source: Source,
    pub sizes: Vec<usize>,
    pub seeds: Vec<u64>,
    pub methods: Vec<Method>,
    pub detect: DetectConfig,
    /// Laplacian regulariser; `None` uses 0 when no vertex is isolated and
    /// the average degree otherwise.
    pub tau: Option<f64>,
    /// Add concentration columns when model parameters are known.
    pub concentration: bool,
    /// Add a wall-clock column, which makes reruns differ.
    pub timings: bool,
}

impl ExperimentSpec {
    pub fn new(name: impl Into<String>, source: Source, sizes: Vec<usize>, seeds: Vec<u64>, methods: Vec<Method>) -> Self {
        Self {
            name: name.into(),
            source,
            sizes,
            seeds,
            methods,
            detect: DetectConfig::default(),
            tau: None,
            concentration: false,
            timings: false,
        }
    }

    pub fn validate(&self) -> Result<(), ExperimentError> {
        if self.sizes.is_empty() && !matches!(self.source, Source::Model(_)) {
            return Err(ExperimentError::Empty("size"));
        }
        if self.seeds.is_empty() {
            return Err(ExperimentError::Empty("seed"));
        }
        if self.methods.is_empty() {
            return Err(ExperimentError::Empty("method"));
        }
        Ok(())
    }
}

/// One run's outcome. `status` is `ok` or the error text.
#[derive(Debug, Clone, PartialEq)]
pub struct Row {
    pub name: String,
    pub n: usize,
    pub seed: u64,
    pub method: Method,
    pub status: String,
    pub error_fraction: Option<f64>,
    pub errors: Option<usize>,
    pub clusters: Option<usize>,
    pub unassigned: Option<usize>,
    pub l_hat: Option<usize>,
    pub eps: Option<f64>,
    pub f: Option<f64>,
    /// `ρ(W) · D̄` and `ρ(W) / Δ(P)`.
    pub concentration: Option<(f64, f64)>,
    pub runtime_ms: Option<f64>,
}

struct Instance {
    n: usize,
    seed: u64,
    graph: Graph,
    truth: Vec<usize>,
    params: Option<DcsbmParams>,
}

fn build(spec: &ExperimentSpec, n: usize, seed: u64) -> Result<Instance, String> {
    match &spec.source {
        Source::Preset(p) => {
            let (graph, truth, params) = p.instance(n, seed).map_err(|e| e.to_string())?;
            Ok(Instance { n, seed, graph, truth, params })
        }
        Source::Model(params) => {
            let graph = sample_graph(params, seed).map_err(|e| e.to_string())?;
            Ok(Instance { n: params.n(), seed, graph, truth: params.sigma().to_vec(), params: Some(params.clone()) })
        }
    }
}

struct Outcome {
    clustering: Clustering,
    l_hat: Option<usize>,
    eps: Option<f64>,
    f: Option<f64>,
}

fn run_method(spec: &ExperimentSpec, inst: &Instance, method: Method) -> Result<Outcome, String> {
    let g = &inst.graph;
    let k = inst.truth.iter().max().map_or(1, |m| m + 1);
    let cfg = DetectConfig { seed: spec.detect.seed ^ inst.seed, ..spec.detect.clone() };
    let plain = |clustering| Outcome { clustering, l_hat: None, eps: None, f: None };
    let tau = spec.tau.unwrap_or_else(|| if g.degrees().contains(&0) { g.average_degree() } else { 0.0 });
    let opts = ClusterOptions { seed: inst.seed, ..ClusterOptions::default() };
    match method {
        Method::Hhat | Method::HhatKnown => {
            let d = if method == Method::Hhat {
                detect_communities(g, &cfg)
            } else {
                let mut sizes = vec![0usize; k];
                inst.truth.iter().for_each(|&t| sizes[t] += 1);
                let alpha_min = *sizes.iter().min().unwrap() as f64 / inst.n as f64;
                detect_with_known_L(g, k, alpha_min, &cfg)
            }
            .map_err(|e| e.to_string())?;
            Ok(Outcome { l_hat: Some(d.l_hat), eps: d.eps, f: Some(d.f), clustering: d.clustering })
        }
        Method::Laplacian => laplacian_spectral_with(g, k, tau, &opts).map(plain).map_err(|e| e.to_string()),
        Method::LaplacianTop => {
            let opts = ClusterOptions { dims: Some(1), ..opts };
            laplacian_spectral_with(g, k, tau, &opts).map(plain).map_err(|e| e.to_string())
        }
        Method::Adjacency => adjacency_spectral(g, k).map(plain).map_err(|e| e.to_string()),
        Method::Score => score_cluster(g, k).map(plain).map_err(|e| e.to_string()),
    }
}

fn empty_row(spec: &ExperimentSpec, n: usize, seed: u64, method: Method, status: String) -> Row {
    Row {
        name: spec.name.clone(),
        n,
        seed,
        method,
        status,
        error_fraction: None,
        errors: None,
        clusters: None,
        unassigned: None,
        l_hat: None,
        eps: None,
        f: None,
        concentration: None,
        runtime_ms: None,
    }
}

fn rows_for(spec: &ExperimentSpec, n: usize, seed: u64) -> Vec<Row> {
    let inst = match build(spec, n, seed) {
        Ok(i) => i,
        Err(e) => return spec.methods.iter().map(|&m| empty_row(spec, n, seed, m, e.clone())).collect(),
    };
    let concentration = match (&inst.params, spec.concentration) {
        (Some(p), true) if inst.n <= DENSE_LIMIT => concentration_report(&inst.graph, p)
            .ok()
            .map(|r| (r.scaled_w(), r.w_over_gap())),
        _ => None,
    };
    spec.methods
        .iter()
        .map(|&method| {
            let start = Instant::now();
            let result = run_method(spec, &inst, method);
            let elapsed = start.elapsed().as_secs_f64() * 1e3;
            let mut row = empty_row(spec, inst.n, seed, method, "ok".into());
            row.concentration = concentration;
            row.runtime_ms = spec.timings.then_some(elapsed);
            match result {
                Ok(out) => match misclassification(&out.clustering, &inst.truth) {
                    Ok(m) => {
                        row.error_fraction = Some(m.fraction);
                        row.errors = Some(m.errors);
                        row.clusters = Some(out.clustering.count());
                        row.unassigned = Some(out.clustering.unassigned());
                        row.l_hat = out.l_hat;
                        row.eps = out.eps;
                        row.f = out.f;
                    }
                    Err(e) => row.status = e.to_string(),
                },
                Err(e) => row.status = e,
            }
            row
        })
        .collect()
}

/// Runs every `(n, seed, method)` combination. Instances are processed in
/// parallel; rows come back ordered by `n`, then seed, then method as listed.
pub fn run_experiment(spec: &ExperimentSpec) -> Result<Vec<Row>, ExperimentError> {
    spec.validate()?;
    let sizes = match &spec.source {
        Source::Model(p) => vec![p.n()],
        Source::Preset(_) => spec.sizes.clone(),
    };
    let jobs: Vec<(usize, u64)> = sizes.iter().flat_map(|&n| spec.seeds.iter().map(move |&s| (n, s))).collect();
    let rows: Vec<Vec<Row>> = jobs.par_iter().map(|&(n, s)| rows_for(spec, n, s)).collect();
    Ok(rows.concat())
}

fn opt<T: fmt::Display>(x: &Option<T>) -> String {
    x.as_ref().map_or(String::new(), |v| v.to_string())
}

fn csv_field(s: &str) -> String {
    if s.contains([',', '"', '\n']) {
        format!("\"{}\"", s.replace('"', "\"\""))
    } else {
        s.to_string()
    }
}

/// Versioned CSV with one line per row.
pub fn format_rows(rows: &[Row], timings: bool) -> String {
    let mut out = csv_preamble("experiment");
    out.push_str("name,n,seed,method,status,error_fraction,errors,clusters,unassigned,l_hat,eps,f,rho_w_dbar,rho_w_over_gap");
    if timings {
        out.push_str(",runtime_ms");
    }
    out.push('\n');
    for r in rows {
        let (c1, c2) = match r.concentration {
            Some((a, b)) => (a.to_string(), b.to_string()),
            None => (String::new(), String::new()),
        };
        write!(
            out,
            "{},{},{},{},{},{},{},{},{},{},{},{},{},{}",
            csv_field(&r.name),
            r.n,
            r.seed,
            r.method,
            csv_field(&r.status),
            opt(&r.error_fraction),
            opt(&r.errors),
            opt(&r.clusters),
            opt(&r.unassigned),
            opt(&r.l_hat),
            opt(&r.eps),
            opt(&r.f),
            c1,
            c2
        )
        .unwrap();
        if timings {
            write!(out, ",{}", opt(&r.runtime_ms)).unwrap();
        }
        out.push('\n');
    }
    out
}

#[cfg(test)]
mod tests {
    use super::*;

    fn small(methods: Vec<Method>) -> ExperimentSpec {
        ExperimentSpec::new("t", Source::Preset(Preset::Eppm), vec![400], vec![1, 2], methods)
    }

    #[test]
    fn one_row_per_combination() {
        let spec = ExperimentSpec::new("t", Source::Preset(Preset::Eppm), vec![400], vec![3], vec![Method::Adjacency]);
        let rows = run_experiment(&spec).unwrap();
        assert_eq!(rows.len(), 1);
        assert_eq!(rows[0].status, "ok");
        assert!(rows[0].error_fraction.is_some());
    }

    #[test]
    fn deterministic_csv() {
        let spec = small(vec![Method::Hhat, Method::LaplacianTop, Method::Score]);
        let a = format_rows(&run_experiment(&spec).unwrap(), false);
        let b = format_rows(&run_experiment(&spec).unwrap(), false);
        assert_eq!(a, b);
        assert!(a.starts_with("# dcsbm-csv v1 experiment\nname,n,seed,method"));
        assert_eq!(a.lines().count(), 2 + 6);
    }

    #[test]
    fn failures_are_recorded_per_row() {
        let spec = ExperimentSpec::new("t", Source::Preset(Preset::PlantedHubs), vec![50], vec![0], vec![Method::Adjacency]);
        let rows = run_experiment(&spec).unwrap();
        assert_eq!(rows.len(), 1);
        assert_ne!(rows[0].status, "ok");
    }

    #[test]
    fn empty_spec_rejected() {
        assert!(run_experiment(&small(vec![])).is_err());
        assert_eq!("laplacian-top".parse::<Method>().unwrap(), Method::LaplacianTop);
        assert!("spectral".parse::<Method>().is_err());
    }

    #[test]
    fn csv_quoting() {
        assert_eq!(csv_field("a,b"), "\"a,b\"");
        assert_eq!(csv_field("plain"), "plain");
    }
}
