//! Python bindings: model parameters, graphs, detection and the baselines.

use std::path::PathBuf;

use dcsbm::baselines::{self, BaselineError, ClusterOptions};
use dcsbm::clustering::Clustering;
use dcsbm::detect::{self, DetectConfig, DetectError, LeftoverPolicy, Regime};
use dcsbm::io::{self, EdgeListOptions, IoError};
use dcsbm::metrics::{self, MetricsError};
use dcsbm::model::{self, DcsbmParams, ModelError};
use dcsbm::presets::{Preset, PresetError};
use dcsbm::spectra::{self, SpectraError, DEFAULT_TOL};
use pyo3::create_exception;
use pyo3::exceptions::{PyIOError, PyRuntimeError, PyValueError};
use pyo3::prelude::*;
use pyo3::types::PyDict;

create_exception!(dcsbm_py, ConvergenceError, PyRuntimeError, "An eigensolver failed to converge.");

fn spectra_err(e: SpectraError) -> PyErr {
    match e {
        SpectraError::NoConvergence { .. } => ConvergenceError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn detect_err(e: DetectError) -> PyErr {
    match e {
        DetectError::Spectra(s) => spectra_err(s),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn baseline_err(e: BaselineError) -> PyErr {
    match e {
        BaselineError::Spectra(s) => spectra_err(s),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn metrics_err(e: MetricsError) -> PyErr {
    match e {
        MetricsError::Spectra(s) => spectra_err(s),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn io_err(e: IoError) -> PyErr {
    match e {
        IoError::File { .. } => PyIOError::new_err(e.to_string()),
        other => PyValueError::new_err(other.to_string()),
    }
}

fn value_err(e: impl ToString) -> PyErr {
    PyValueError::new_err(e.to_string())
}

/// DC-SBM parameters: community fractions, a `K × K` block matrix, one
/// weight per vertex and optional labels.
#[pyclass(name = "Params", module = "dcsbm_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyParams {
    inner: DcsbmParams,
}

#[pymethods]
impl PyParams {
    #[new]
    #[pyo3(signature = (alpha, block, weights, sigma=None))]
    fn new(alpha: Vec<f64>, block: Vec<Vec<f64>>, weights: Vec<f64>, sigma: Option<Vec<usize>>) -> PyResult<Self> {
        let flat = block.into_iter().flatten().collect();
        let inner = DcsbmParams::new(alpha, flat, weights, sigma).map_err(value_err)?;
        Ok(Self { inner })
    }

    /// Reads a TOML model file.
    #[staticmethod]
    fn from_file(path: PathBuf) -> PyResult<Self> {
        Ok(Self { inner: io::read_model(&path).map_err(io_err)? })
    }

    /// Parameters of a named preset family, or `None` for hand-wired presets.
    #[staticmethod]
    fn preset(name: &str, n: usize) -> PyResult<Option<Self>> {
        let p: Preset = name.parse().map_err(|e: PresetError| value_err(e))?;
        Ok(p.params(n).map_err(value_err)?.map(|inner| Self { inner }))
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn k(&self) -> usize {
        self.inner.k()
    }

    #[getter]
    fn alpha(&self) -> Vec<f64> {
        self.inner.alpha().to_vec()
    }

    #[getter]
    fn block(&self) -> Vec<Vec<f64>> {
        self.inner.block().chunks(self.inner.k()).map(<[f64]>::to_vec).collect()
    }

    #[getter]
    fn weights(&self) -> Vec<f64> {
        self.inner.weights().to_vec()
    }

    #[getter]
    fn sigma(&self) -> Vec<usize> {
        self.inner.sigma().to_vec()
    }

    /// Violated invariants as strings; empty when the parameters are valid.
    fn violations(&self) -> Vec<String> {
        model::validate(&self.inner).violations.iter().map(|v| v.to_string()).collect()
    }

    fn aggregates<'py>(&self, py: Python<'py>) -> PyResult<Bound<'py, PyDict>> {
        let a = model::aggregates(&self.inner);
        let d = PyDict::new(py);
        d.set_item("d_bar", a.d_bar)?;
        d.set_item("d_bar_per_block", a.d_bar_per_block)?;
        d.set_item("m", a.m)?;
        d.set_item("m_bar", a.m_bar)?;
        d.set_item("d_ratio", a.d_ratio)?;
        Ok(d)
    }

    fn expected_degrees(&self) -> Vec<f64> {
        model::expected_degrees(&self.inner)
    }

    /// Draws a graph; identical seeds give identical graphs.
    #[pyo3(signature = (seed=0))]
    fn sample(&self, seed: u64) -> PyResult<PyGraph> {
        let g = model::sample_graph(&self.inner, seed).map_err(|e: ModelError| value_err(e))?;
        Ok(PyGraph { inner: g })
    }

    fn __repr__(&self) -> String {
        format!("Params(n={}, K={})", self.inner.n(), self.inner.k())
    }
}

/// A simple undirected graph on vertices `0..n`.
#[pyclass(name = "Graph", module = "dcsbm_py", frozen, skip_from_py_object)]
#[derive(Clone)]
struct PyGraph {
    inner: model::Graph,
}

#[pymethods]
impl PyGraph {
    #[new]
    fn new(n: usize, edges: Vec<(usize, usize)>) -> PyResult<Self> {
        Ok(Self { inner: model::Graph::from_edges(n, &edges).map_err(value_err)? })
    }

    #[staticmethod]
    #[pyo3(signature = (path, one_indexed=false, n=None))]
    fn read_edge_list(path: PathBuf, one_indexed: bool, n: Option<usize>) -> PyResult<Self> {
        let g = io::read_edge_list(&path, &EdgeListOptions { one_indexed, n }).map_err(io_err)?;
        Ok(Self { inner: g })
    }

    fn write_edge_list(&self, path: PathBuf) -> PyResult<()> {
        io::write_edge_list(&path, &self.inner).map_err(io_err)
    }

    #[getter]
    fn n(&self) -> usize {
        self.inner.n()
    }

    #[getter]
    fn num_edges(&self) -> usize {
        self.inner.num_edges()
    }

    #[getter]
    fn edges(&self) -> Vec<(usize, usize)> {
        self.inner.edges().to_vec()
    }

    #[getter]
    fn degrees(&self) -> Vec<usize> {
        self.inner.degrees().to_vec()
    }

    fn average_degree(&self) -> f64 {
        self.inner.average_degree()
    }

    fn neighbors(&self, u: usize) -> PyResult<Vec<usize>> {
        if u >= self.inner.n() {
            return Err(value_err(format!("vertex {u} out of range")));
        }
        Ok(self.inner.neighbors(u).to_vec())
    }

    fn __len__(&self) -> usize {
        self.inner.n()
    }

    fn __repr__(&self) -> String {
        format!("Graph(n={}, edges={})", self.inner.n(), self.inner.num_edges())
    }
}

/// Result of [`detect_communities`].
#[pyclass(name = "Detection", module = "dcsbm_py", frozen, get_all)]
struct PyDetection {
    /// Cluster per vertex, `None` when unassigned.
    labels: Vec<Option<usize>>,
    count: usize,
    sizes: Vec<usize>,
    l_hat: usize,
    f: f64,
    threshold: f64,
    eps: Option<f64>,
    eigenvalues: Vec<f64>,
    warnings: Vec<String>,
    degenerate: bool,
}

#[pymethods]
impl PyDetection {
    fn __repr__(&self) -> String {
        format!("Detection(l_hat={}, count={}, sizes={:?})", self.l_hat, self.count, self.sizes)
    }
}

/// Runs normalized-adjacency detection. Passing `known_L` together with
/// `alpha_min` fixes the number of communities.
#[pyfunction]
#[pyo3(signature = (graph, regime="superlog", f_multiplier=1.0, seed=0, leftover="unassigned", known_L=None, alpha_min=None))]
#[allow(non_snake_case)]
fn detect_communities(
    graph: &PyGraph,
    regime: &str,
    f_multiplier: f64,
    seed: u64,
    leftover: &str,
    known_L: Option<usize>,
    alpha_min: Option<f64>,
) -> PyResult<PyDetection> {
    let config = DetectConfig {
        regime: regime.parse::<Regime>().map_err(detect_err)?,
        f_multiplier,
        seed,
        leftover_policy: leftover.parse::<LeftoverPolicy>().map_err(detect_err)?,
        ..DetectConfig::default()
    };
    let d = match (known_L, alpha_min) {
        (Some(l), Some(a)) => detect::detect_with_known_L(&graph.inner, l, a, &config),
        (None, None) => detect::detect_communities(&graph.inner, &config),
        _ => return Err(value_err("known_L and alpha_min must be given together")),
    }
    .map_err(detect_err)?;
    Ok(PyDetection {
        labels: d.clustering.labels().to_vec(),
        count: d.clustering.count(),
        sizes: d.clustering.sizes(),
        degenerate: d.clustering.is_degenerate(),
        l_hat: d.l_hat,
        f: d.f,
        threshold: d.threshold,
        eps: d.eps,
        eigenvalues: d.eigenvalues,
        warnings: d.warnings.iter().map(|w| w.to_string()).collect(),
    })
}

fn options(seed: u64, restarts: usize, dims: Option<usize>) -> ClusterOptions {
    ClusterOptions { seed, restarts, dims }
}

/// k-means on the top `k` adjacency eigenvectors.
#[pyfunction]
#[pyo3(signature = (graph, k, seed=0, restarts=50))]
fn adjacency_spectral(graph: &PyGraph, k: usize, seed: u64, restarts: usize) -> PyResult<Vec<Option<usize>>> {
    let c = baselines::adjacency_spectral_with(&graph.inner, k, &options(seed, restarts, None)).map_err(baseline_err)?;
    Ok(c.labels().to_vec())
}

/// Regularised Laplacian spectral clustering; `dims=1` uses the top
/// eigenvector only.
#[pyfunction]
#[pyo3(signature = (graph, k, tau=0.0, seed=0, restarts=50, dims=None))]
fn laplacian_spectral(
    graph: &PyGraph,
    k: usize,
    tau: f64,
    seed: u64,
    restarts: usize,
    dims: Option<usize>,
) -> PyResult<Vec<Option<usize>>> {
    let c = baselines::laplacian_spectral_with(&graph.inner, k, tau, &options(seed, restarts, dims))
        .map_err(baseline_err)?;
    Ok(c.labels().to_vec())
}

/// SCORE: k-means on entrywise ratios to the leading eigenvector.
#[pyfunction]
#[pyo3(signature = (graph, k, seed=0, restarts=50))]
fn score_cluster(graph: &PyGraph, k: usize, seed: u64, restarts: usize) -> PyResult<Vec<Option<usize>>> {
    let c = baselines::score_cluster_with(&graph.inner, k, &options(seed, restarts, None)).map_err(baseline_err)?;
    Ok(c.labels().to_vec())
}

/// Fraction and count of misclassified vertices under the best matching of
/// clusters to truth labels. Unassigned vertices count as errors.
#[pyfunction]
fn misclassification(labels: Vec<Option<usize>>, truth: Vec<usize>) -> PyResult<(f64, usize)> {
    let m = metrics::misclassification(&Clustering::from_labels(&labels), &truth).map_err(metrics_err)?;
    Ok((m.fraction, m.errors))
}

/// Top `k` eigenpairs by `|λ|` of `"hhat"`, `"adjacency"` or `"laplacian"`.
#[pyfunction]
#[pyo3(signature = (graph, k, operator="hhat", tau=0.0))]
fn eigenpairs(graph: &PyGraph, k: usize, operator: &str, tau: f64) -> PyResult<(Vec<f64>, Vec<Vec<f64>>)> {
    let g = &graph.inner;
    let m = match operator {
        "hhat" => spectra::normalized_adjacency(g),
        "adjacency" => spectra::adjacency(g),
        "laplacian" => spectra::laplacian(g, tau).map_err(spectra_err)?,
        other => return Err(value_err(format!("unknown operator {other:?}"))),
    };
    let eigs = spectra::eigs_topk(&m, k, DEFAULT_TOL, (10 * g.n()).max(1000)).map_err(spectra_err)?;
    Ok((eigs.values, eigs.vectors))
}

/// Spectral radii of the pieces of `Ĥ − P`, unscaled, plus `Δ(P)` and `D̄`.
#[pyfunction]
fn concentration_report<'py>(py: Python<'py>, graph: &PyGraph, params: &PyParams) -> PyResult<Bound<'py, PyDict>> {
    let r = metrics::concentration_report(&graph.inner, &params.inner).map_err(metrics_err)?;
    let d = PyDict::new(py);
    d.set_item("rho_hat_h", r.rho_hat_h)?;
    d.set_item("rho_h_eh", r.rho_h_eh)?;
    d.set_item("rho_eh_p", r.rho_eh_p)?;
    d.set_item("rho_w", r.rho_w)?;
    d.set_item("gap_p", r.gap_p)?;
    d.set_item("d_bar", r.d_bar)?;
    d.set_item("triangle_holds", r.triangle_holds())?;
    Ok(d)
}

/// A sampled instance of a named preset: `(graph, truth, params or None)`.
#[pyfunction]
#[pyo3(signature = (name, n, seed=0))]
fn preset_instance(name: &str, n: usize, seed: u64) -> PyResult<(PyGraph, Vec<usize>, Option<PyParams>)> {
    let p: Preset = name.parse().map_err(|e: PresetError| value_err(e))?;
    let (g, truth, params) = p.instance(n, seed).map_err(value_err)?;
    Ok((PyGraph { inner: g }, truth, params.map(|inner| PyParams { inner })))
}

#[pyfunction]
fn read_labels(path: PathBuf) -> PyResult<Vec<Option<usize>>> {
    io::read_labels(&path).map_err(io_err)
}

#[pyfunction]
fn write_labels(path: PathBuf, labels: Vec<Option<usize>>) -> PyResult<()> {
    io::write_labels(&path, &labels).map_err(io_err)
}

#[pymodule]
fn dcsbm_py(m: &Bound<'_, PyModule>) -> PyResult<()> {
    m.add_class::<PyParams>()?;
    m.add_class::<PyGraph>()?;
    m.add_class::<PyDetection>()?;
    m.add("ConvergenceError", m.py().get_type::<ConvergenceError>())?;
    m.add("CSV_SCHEMA_VERSION", io::CSV_SCHEMA_VERSION)?;
    m.add_function(wrap_pyfunction!(detect_communities, m)?)?;
    m.add_function(wrap_pyfunction!(adjacency_spectral, m)?)?;
    m.add_function(wrap_pyfunction!(laplacian_spectral, m)?)?;
    m.add_function(wrap_pyfunction!(score_cluster, m)?)?;
    m.add_function(wrap_pyfunction!(misclassification, m)?)?;
    m.add_function(wrap_pyfunction!(eigenpairs, m)?)?;
    m.add_function(wrap_pyfunction!(concentration_report, m)?)?;
    m.add_function(wrap_pyfunction!(preset_instance, m)?)?;
    m.add_function(wrap_pyfunction!(read_labels, m)?)?;
    m.add_function(wrap_pyfunction!(write_labels, m)?)?;
    Ok(())
}
