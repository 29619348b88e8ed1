//! Clustering quality, concentration measurements, random-walk identities and
//! identifiable-quantity estimators.

use nalgebra::DMatrix;
use pathfinding::prelude::{kuhn_munkres, Matrix};
use thiserror::Error;

use crate::clustering::Clustering;
use crate::model::{aggregates, block_weight_sums, DcsbmParams, Graph};
use crate::spectra::{
    eigen_gap, expected_model_normalized, model_normalized, normalized_adjacency, population_matrix,
    spectral_radius, z_eigenpairs, SpectraError,
};

/// Largest `n` accepted by [`concentration_report`].
pub const DENSE_LIMIT: usize = 4096;

const RADIUS_TOL: f64 = 1e-13;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum MetricsError {
    #[error("length mismatch: {0} predicted labels vs {1} truth labels")]
    Length(usize, usize),
    #[error("n = {0} exceeds the dense limit {DENSE_LIMIT}")]
    TooLarge(usize),
    #[error("cluster {0} is empty")]
    EmptyCluster(usize),
    #[error("clustering has no clusters")]
    NoClusters,
    #[error(transparent)]
    Spectra(#[from] SpectraError),
}

/// Outcome of [`misclassification`].
#[derive(Debug, Clone, PartialEq)]
pub struct Misclassification {
    pub fraction: f64,
    pub errors: usize,
    /// Truth label matched to each predicted cluster, if any.
    pub matching: Vec<Option<usize>>,
}

/// Counts `C × T` of (predicted cluster, truth label) pairs.
pub fn confusion(predicted: &Clustering, truth: &[usize]) -> Vec<Vec<usize>> {
    let t = truth.iter().max().map_or(0, |m| m + 1);
    let mut conf = vec![vec![0usize; t]; predicted.count()];
    for (l, &tr) in predicted.labels().iter().zip(truth) {
        if let Some(c) = l {
            conf[*c][tr] += 1;
        }
    }
    conf
}

/// Fraction of vertices not matched to their truth label under the best
/// injective map from predicted clusters to truth labels. Unassigned vertices
/// always count as errors.
pub fn misclassification(predicted: &Clustering, truth: &[usize]) -> Result<Misclassification, MetricsError> {
    let n = truth.len();
    if predicted.n() != n {
        return Err(MetricsError::Length(predicted.n(), n));
    }
    let conf = confusion(predicted, truth);
    let c = conf.len();
    let t = truth.iter().max().map_or(0, |m| m + 1);
    let s = c.max(t);
    let mut matching = vec![None; c];
    let mut matched = 0usize;
    if s > 0 {
        let mut weights = Matrix::new(s, s, 0i64);
        for (i, row) in conf.iter().enumerate() {
            for (j, &x) in row.iter().enumerate() {
                weights[(i, j)] = x as i64;
            }
        }
        let (_, assignment) = kuhn_munkres(&weights);
        for i in 0..c {
            let j = assignment[i];
            if j < t {
                matching[i] = Some(j);
                matched += conf[i][j];
            }
        }
    }
    let errors = n - matched;
    let fraction = if n == 0 { 0.0 } else { errors as f64 / n as f64 };
    Ok(Misclassification { fraction, errors, matching })
}

/// Spectral radii of the pieces of `W = Ĥ − P`.
#[derive(Debug, Clone, PartialEq)]
pub struct ConcentrationReport {
    /// `ρ(Ĥ − H)`.
    pub rho_hat_h: f64,
    /// `ρ(H − E[H])`.
    pub rho_h_eh: f64,
    /// `ρ(E[H] − P)`.
    pub rho_eh_p: f64,
    /// `ρ(Ĥ − P)`.
    pub rho_w: f64,
    /// `Δ(P)`.
    pub gap_p: f64,
    pub d_bar: f64,
}

impl ConcentrationReport {
    pub fn scaled_hat_h(&self) -> f64 {
        self.rho_hat_h * self.d_bar
    }

    pub fn scaled_h_eh(&self) -> f64 {
        self.rho_h_eh * self.d_bar
    }

    pub fn scaled_eh_p(&self) -> f64 {
        self.rho_eh_p * self.d_bar
    }

    pub fn scaled_w(&self) -> f64 {
        self.rho_w * self.d_bar
    }

    /// `ρ(W) / Δ(P)`.
    pub fn w_over_gap(&self) -> f64 {
        self.rho_w / self.gap_p
    }

    /// `ρ(W) ≤ ρ(Ĥ−H) + ρ(H−E[H]) + ρ(E[H]−P)`, with float slack.
    pub fn triangle_holds(&self) -> bool {
        let sum = self.rho_hat_h + self.rho_h_eh + self.rho_eh_p;
        self.rho_w <= sum * (1.0 + 1e-9) + 1e-15
    }
}

/// Spectrum of `P`: `Z`'s eigenvalues over `D̄`, plus zero when `n > K`.
pub fn population_spectrum(params: &DcsbmParams) -> Result<Vec<f64>, SpectraError> {
    let d_bar = aggregates(params).d_bar;
    let mut values: Vec<f64> = z_eigenpairs(params)?.into_iter().map(|(l, _)| l / d_bar).collect();
    if params.n() > params.k() {
        values.push(0.0);
    }
    Ok(values)
}

/// Measures every term of the decomposition `Ĥ − P = (Ĥ − H) + (H − E[H]) + (E[H] − P)`.
pub fn concentration_report(graph: &Graph, params: &DcsbmParams) -> Result<ConcentrationReport, MetricsError> {
    let n = graph.n();
    if n > DENSE_LIMIT {
        return Err(MetricsError::TooLarge(n));
    }
    if params.n() != n {
        return Err(MetricsError::Length(n, params.n()));
    }
    let hh = normalized_adjacency(graph);
    let h = model_normalized(graph, params)?;
    let eh = expected_model_normalized(params)?;
    let p = population_matrix(params)?;
    let rho = |a: &crate::spectra::SymMatrix, b: &crate::spectra::SymMatrix| spectral_radius(&a.sub(b)?, RADIUS_TOL);
    Ok(ConcentrationReport {
        rho_hat_h: rho(&hh, &h)?,
        rho_h_eh: rho(&h, &eh)?,
        rho_eh_p: rho(&eh, &p)?,
        rho_w: rho(&hh, &p)?,
        gap_p: eigen_gap(&population_spectrum(params)?)?,
        d_bar: aggregates(params).d_bar,
    })
}

/// Outcome of [`random_walk_checks`].
#[derive(Debug, Clone, PartialEq)]
pub struct RandomWalkReport {
    /// `‖D̂ᵀĤ − 1{D̂ ≠ 0}‖_∞`.
    pub identity_residual: f64,
    /// `λ_max(Ĥ)`.
    pub lambda_max: f64,
    /// `1 / max_u D̂_u`, absent for graphs without edges.
    pub lower_bound: Option<f64>,
    /// `max_u Σ_v Ĥ[u][v]`.
    pub upper_bound: f64,
    pub lower_holds: bool,
    pub upper_holds: bool,
    /// Largest `|Ĥ[u][v] − (A[u][v]/D̂_u)(A[v][u]/D̂_v)|` over sampled edges.
    pub edge_product_error: f64,
}

/// Checks the random-walk identities of `Ĥ`.
pub fn random_walk_checks(graph: &Graph) -> Result<RandomWalkReport, MetricsError> {
    let n = graph.n();
    let deg = graph.degrees();
    let h = normalized_adjacency(graph);
    let dv: Vec<f64> = deg.iter().map(|&d| d as f64).collect();
    let row = h.apply(&dv);
    let identity_residual = row
        .iter()
        .zip(deg)
        .map(|(x, &d)| (x - if d > 0 { 1.0 } else { 0.0 }).abs())
        .fold(0.0, f64::max);
    let lambda_max = if n == 0 { 0.0 } else { spectral_radius(&h, crate::spectra::DEFAULT_TOL)? };
    let upper_bound = h.row_sums().into_iter().fold(0.0, f64::max);
    let lower_bound = deg.iter().max().filter(|&&d| d > 0).map(|&d| 1.0 / d as f64);
    let edges = graph.edges();
    let stride = (edges.len() / 1000).max(1);
    let edge_product_error = edges
        .iter()
        .step_by(stride)
        .map(|&(u, v)| (h.get(u, v) - (1.0 / dv[u]) * (1.0 / dv[v])).abs())
        .fold(0.0, f64::max);
    Ok(RandomWalkReport {
        identity_residual,
        lambda_max,
        lower_bound,
        upper_bound,
        lower_holds: lower_bound.is_none_or(|b| lambda_max >= b - 1e-10),
        upper_holds: lambda_max <= upper_bound + 1e-10,
        edge_product_error,
    })
}

/// Estimates `B[i][j] / (M̄_i M̄_j)` from a graph and a clustering:
/// `(Σ_u D̂_u) · (Σ_{τ_u=i} Σ_{τ_v=j} Ĥ[u][v]) / (n_i n_j)`.
pub fn estimate_block_ratios(graph: &Graph, clustering: &Clustering) -> Result<DMatrix<f64>, MetricsError> {
    if clustering.n() != graph.n() {
        return Err(MetricsError::Length(clustering.n(), graph.n()));
    }
    let c = clustering.count();
    if c == 0 {
        return Err(MetricsError::NoClusters);
    }
    let sizes = clustering.sizes();
    if let Some(i) = sizes.iter().position(|&s| s == 0) {
        return Err(MetricsError::EmptyCluster(i));
    }
    let deg = graph.degrees();
    let total: f64 = deg.iter().map(|&d| d as f64).sum();
    let mut sums = DMatrix::<f64>::zeros(c, c);
    for &(u, v) in graph.edges() {
        if let (Some(i), Some(j)) = (clustering.label(u), clustering.label(v)) {
            let w = 1.0 / (deg[u] as f64 * deg[v] as f64);
            sums[(i, j)] += w;
            sums[(j, i)] += w;
        }
    }
    Ok(DMatrix::from_fn(c, c, |i, j| total * sums[(i, j)] / (sizes[i] as f64 * sizes[j] as f64)))
}

/// Both sides of the edge-fraction identity for communities `i`, `l` and
/// target `j`.
///
/// `ratio(x, j)` is the expected number of edge endpoints in `x` leading to
/// `j`, divided by the expected total degree of `x`. The main values sum the
/// kernel over all ordered pairs, including `u = v`, which gives
/// `ratio(x, j) = S_j B[x][j] / M_x`. The `exact_*` values drop the `u = v`
/// terms, as a sampled graph does.
#[derive(Debug, Clone, PartialEq)]
pub struct ObservationReport {
    /// `B[i][j]/M_i = B[l][j]/M_l` to relative 1e-9.
    pub premise_holds: bool,
    pub lhs: f64,
    pub rhs: f64,
    /// `lhs = rhs` to relative 1e-9.
    pub equal: bool,
    pub exact_lhs: f64,
    pub exact_rhs: f64,
}

impl ObservationReport {
    /// The premise implies equality.
    pub fn implication_holds(&self) -> bool {
        !self.premise_holds || self.equal
    }
}

fn close(a: f64, b: f64) -> bool {
    (a - b).abs() <= 1e-9 * a.abs().max(b.abs())
}

pub fn observation_ratio_check(params: &DcsbmParams, i: usize, j: usize, l: usize) -> ObservationReport {
    let agg = aggregates(params);
    let s = block_weight_sums(params);
    let mut sq = vec![0.0; params.k()];
    for (u, &d) in params.weights().iter().enumerate() {
        sq[params.sigma()[u]] += d * d;
    }
    let ratio = |x: usize| s[j] * params.b(x, j) / agg.m[x];
    let exact = |x: usize| {
        let self_pairs = if x == j { sq[x] } else { 0.0 };
        (s[x] * s[j] - self_pairs) * params.b(x, j) / (s[x] * agg.m[x] - params.b(x, x) * sq[x])
    };
    let (lhs, rhs) = (ratio(i), ratio(l));
    ObservationReport {
        premise_holds: close(params.b(i, j) / agg.m[i], params.b(l, j) / agg.m[l]),
        lhs,
        rhs,
        equal: close(lhs, rhs),
        exact_lhs: exact(i),
        exact_rhs: exact(l),
    }
}
