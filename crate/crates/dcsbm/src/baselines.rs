//! Comparison methods: spectral clustering on the adjacency matrix and on the
//! regularised Laplacian, eigenvector-ratio clustering, eigenvector
//! thresholding, and the star-dominance diagnostic for high-degree hubs.

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

use crate::clustering::Clustering;
use crate::model::Graph;
use crate::spectra::{adjacency, eigen_gap, eigs_topk, laplacian, EigenSystem, SpectraError, SymMatrix, DEFAULT_TOL};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum BaselineError {
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("leading eigenvector vanishes at vertex {0}")]
    ZeroLeading(usize),
    #[error(transparent)]
    Spectra(#[from] SpectraError),
}

const LLOYD_MAX_ITER: usize = 300;

/// Result of [`kmeans`].
#[derive(Debug, Clone, PartialEq)]
pub struct KMeans {
    pub assignment: Vec<usize>,
    pub centres: Vec<Vec<f64>>,
    /// Within-cluster sum of squares of the best restart.
    pub wcss: f64,
    /// WCSS after each assignment step of the best restart.
    pub history: Vec<f64>,
    /// Index of the best restart.
    pub restart: usize,
}

fn sq_dist(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
}

fn nearest(p: &[f64], centres: &[Vec<f64>]) -> (usize, f64) {
    let mut best = (0, f64::INFINITY);
    for (c, z) in centres.iter().enumerate() {
        let d = sq_dist(p, z);
        if d < best.1 {
            best = (c, d);
        }
    }
    best
}

fn plus_plus(points: &[Vec<f64>], k: usize, rng: &mut ChaCha8Rng) -> Vec<Vec<f64>> {
    let n = points.len();
    let mut centres = vec![points[rng.random_range(0..n)].clone()];
    let mut d2: Vec<f64> = points.iter().map(|p| sq_dist(p, &centres[0])).collect();
    while centres.len() < k {
        let total: f64 = d2.iter().sum();
        let pick = if total > 0.0 {
            let mut r = rng.random::<f64>() * total;
            let mut chosen = n - 1;
            for (i, &w) in d2.iter().enumerate() {
                if w > 0.0 && r < w {
                    chosen = i;
                    break;
                }
                r -= w;
            }
            if d2[chosen] == 0.0 {
                chosen = d2.iter().rposition(|&w| w > 0.0).unwrap_or(chosen);
            }
            chosen
        } else {
            rng.random_range(0..n)
        };
        let c = points[pick].clone();
        for (p, d) in points.iter().zip(d2.iter_mut()) {
            *d = d.min(sq_dist(p, &c));
        }
        centres.push(c);
    }
    centres
}

fn lloyd(points: &[Vec<f64>], mut centres: Vec<Vec<f64>>) -> (Vec<usize>, Vec<Vec<f64>>, Vec<f64>) {
    let (n, k) = (points.len(), centres.len());
    let dim = points[0].len();
    let mut assignment = vec![usize::MAX; n];
    let mut history = Vec::new();
    for _ in 0..LLOYD_MAX_ITER {
        let mut changed = false;
        let mut cost = vec![0.0; n];
        for (u, p) in points.iter().enumerate() {
            let (c, d) = nearest(p, &centres);
            cost[u] = d;
            if assignment[u] != c {
                assignment[u] = c;
                changed = true;
            }
        }
        // An empty cluster takes over the point farthest from its centre.
        let mut sizes = vec![0usize; k];
        assignment.iter().for_each(|&c| sizes[c] += 1);
        for c in 0..k {
            if sizes[c] == 0 {
                let far = (0..n)
                    .filter(|&u| sizes[assignment[u]] > 1)
                    .max_by(|&a, &b| cost[a].total_cmp(&cost[b]).then(b.cmp(&a)));
                if let Some(u) = far {
                    sizes[assignment[u]] -= 1;
                    assignment[u] = c;
                    sizes[c] = 1;
                    cost[u] = 0.0;
                    centres[c] = points[u].clone();
                    changed = true;
                }
            }
        }
        history.push(cost.iter().sum());
        if !changed {
            break;
        }
        let mut sums = vec![vec![0.0; dim]; k];
        for (p, &c) in points.iter().zip(&assignment) {
            for (s, x) in sums[c].iter_mut().zip(p) {
                *s += x;
            }
        }
        for c in 0..k {
            if sizes[c] > 0 {
                centres[c] = sums[c].iter().map(|s| s / sizes[c] as f64).collect();
            }
        }
    }
    (assignment, centres, history)
}

/// Lloyd's algorithm from k-means++ seeding, best of `restarts` runs by WCSS
/// (ties go to the lowest restart index). Restart `r` draws from ChaCha8
/// stream `r` under `seed`, so the result does not depend on thread count.
pub fn kmeans(points: &[Vec<f64>], k: usize, seed: u64, restarts: usize) -> Result<KMeans, BaselineError> {
    let n = points.len();
    if k == 0 || k > n {
        return Err(BaselineError::Argument(format!("k = {k} must lie in 1..={n}")));
    }
    let dim = points[0].len();
    if points.iter().any(|p| p.len() != dim) {
        return Err(BaselineError::Argument("points have differing dimensions".into()));
    }
    let runs: Vec<KMeans> = (0..restarts.max(1))
        .into_par_iter()
        .map(|r| {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            rng.set_stream(r as u64);
            let (assignment, centres, history) = lloyd(points, plus_plus(points, k, &mut rng));
            let wcss = points.iter().zip(&assignment).map(|(p, &c)| sq_dist(p, &centres[c])).sum();
            KMeans { assignment, centres, wcss, history, restart: r }
        })
        .collect();
    Ok(runs
        .into_iter()
        .reduce(|best, run| if run.wcss < best.wcss { run } else { best })
        .expect("at least one restart"))
}

/// Options shared by the embedding-based baselines.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ClusterOptions {
    pub seed: u64,
    pub restarts: usize,
    /// Number of eigenvectors to embed with; `None` uses `K`.
    pub dims: Option<usize>,
}

impl Default for ClusterOptions {
    fn default() -> Self {
        Self { seed: 0, restarts: 50, dims: None }
    }
}

fn solver_budget(n: usize) -> usize {
    (10 * n).max(1000)
}

fn top_rows(m: &SymMatrix, dims: usize) -> Result<Vec<Vec<f64>>, BaselineError> {
    let eigs = eigs_topk(m, dims, DEFAULT_TOL, solver_budget(m.n()))?;
    Ok((0..m.n()).map(|u| eigs.vectors.iter().map(|x| x[u]).collect()).collect())
}

fn check_k(k: usize, n: usize) -> Result<(), BaselineError> {
    if k == 0 || k > n {
        return Err(BaselineError::Argument(format!("K = {k} must lie in 1..={n}")));
    }
    Ok(())
}

fn with_centres(assignment: &[usize], k: usize, centres: Vec<Vec<f64>>) -> Clustering {
    let labels = assignment.iter().map(|&c| Some(c)).collect();
    Clustering::new(labels, k, centres).expect("k-means clusters are nonempty")
}

/// Top-`K` eigenvectors of `A` by `|λ|`, rows clustered by k-means.
pub fn adjacency_spectral(graph: &Graph, k: usize) -> Result<Clustering, BaselineError> {
    adjacency_spectral_with(graph, k, &ClusterOptions::default())
}

pub fn adjacency_spectral_with(graph: &Graph, k: usize, opts: &ClusterOptions) -> Result<Clustering, BaselineError> {
    check_k(k, graph.n())?;
    let rows = top_rows(&adjacency(graph), opts.dims.unwrap_or(k))?;
    let km = kmeans(&rows, k, opts.seed, opts.restarts)?;
    Ok(with_centres(&km.assignment, k, km.centres))
}

/// Top-`K` eigenvectors of `D_τ^{-1/2} A D_τ^{-1/2}`, rows projected onto the
/// unit sphere, clustered by k-means. Zero rows stay unassigned.
pub fn laplacian_spectral(graph: &Graph, k: usize, tau: f64) -> Result<Clustering, BaselineError> {
    laplacian_spectral_with(graph, k, tau, &ClusterOptions::default())
}

/// As [`laplacian_spectral`]. With a one-dimensional embedding the rows are
/// clustered as they are, since projecting scalars onto the unit sphere
/// keeps only their sign.
pub fn laplacian_spectral_with(graph: &Graph, k: usize, tau: f64, opts: &ClusterOptions) -> Result<Clustering, BaselineError> {
    check_k(k, graph.n())?;
    let dims = opts.dims.unwrap_or(k);
    let rows = top_rows(&laplacian(graph, tau)?, dims)?;
    let kept: Vec<usize> = (0..rows.len()).filter(|&u| rows[u].iter().any(|&x| x != 0.0)).collect();
    let points: Vec<Vec<f64>> = kept
        .iter()
        .map(|&u| {
            let r = &rows[u];
            if dims == 1 {
                return r.clone();
            }
            let norm = r.iter().map(|x| x * x).sum::<f64>().sqrt();
            r.iter().map(|x| x / norm).collect()
        })
        .collect();
    if points.len() < k {
        return Err(BaselineError::Argument(format!("only {} vertices have nonzero rows for K = {k}", points.len())));
    }
    let km = kmeans(&points, k, opts.seed, opts.restarts)?;
    let mut labels = vec![None; graph.n()];
    for (&u, &c) in kept.iter().zip(&km.assignment) {
        labels[u] = Some(c);
    }
    Ok(Clustering::new(labels, k, km.centres).expect("k-means clusters are nonempty"))
}

/// Ratios of the next `K − 1` adjacency eigenvectors to the leading one on
/// the largest connected component, clipped to `[−ln n, ln n]` and clustered
/// by k-means. Vertices outside the component are unassigned.
pub fn score_cluster(graph: &Graph, k: usize) -> Result<Clustering, BaselineError> {
    score_cluster_with(graph, k, &ClusterOptions::default())
}

pub fn score_cluster_with(graph: &Graph, k: usize, opts: &ClusterOptions) -> Result<Clustering, BaselineError> {
    if k < 2 {
        return Err(BaselineError::Argument(format!("K must be at least 2, got {k}")));
    }
    let giant = graph.largest_component();
    check_k(k, giant.len())?;
    let sub = graph.induced(&giant);
    let eigs = eigs_topk(&adjacency(&sub), k, DEFAULT_TOL, solver_budget(sub.n()))?;
    let bound = (graph.n() as f64).ln();
    let mut points = Vec::with_capacity(giant.len());
    for (i, &u) in giant.iter().enumerate() {
        let lead = eigs.vectors[0][i];
        let row: Vec<f64> = (1..k)
            .map(|j| {
                let r = eigs.vectors[j][i] / lead;
                if r.is_nan() { f64::NAN } else { r.clamp(-bound, bound) }
            })
            .collect();
        if row.iter().any(|x| x.is_nan()) {
            return Err(BaselineError::ZeroLeading(u));
        }
        points.push(row);
    }
    let km = kmeans(&points, k, opts.seed, opts.restarts)?;
    let mut labels = vec![None; graph.n()];
    for (&u, &c) in giant.iter().zip(&km.assignment) {
        labels[u] = Some(c);
    }
    Ok(Clustering::new(labels, k, km.centres).expect("k-means clusters are nonempty"))
}

/// Where to split the entries of an eigenvector.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum ThresholdRule {
    /// Positive entries versus the rest.
    #[default]
    Zero,
    /// The split of the sorted entries that minimises the two-cluster WCSS.
    TwoMeans,
}

/// Splits vertices by the sign of the `index`-th eigenvector (by `|λ|`,
/// 1-based). One-sided splits come back as a single flagged cluster.
pub fn frobenius_threshold(matrix: &SymMatrix, index: usize) -> Result<Clustering, BaselineError> {
    frobenius_threshold_with(matrix, index, ThresholdRule::Zero)
}

pub fn frobenius_threshold_with(matrix: &SymMatrix, index: usize, rule: ThresholdRule) -> Result<Clustering, BaselineError> {
    let n = matrix.n();
    if index == 0 || index > n {
        return Err(BaselineError::Argument(format!("index {index} must lie in 1..={n}")));
    }
    let eigs = eigs_topk(matrix, index, DEFAULT_TOL, solver_budget(n))?;
    let x = &eigs.vectors[index - 1];
    let cut = match rule {
        ThresholdRule::Zero => 0.0,
        ThresholdRule::TwoMeans => two_means_cut(x),
    };
    let labels: Vec<usize> = x.iter().map(|&v| usize::from(v <= cut)).collect();
    let c = Clustering::from_assignment(&labels);
    Ok(if c.count() < 2 { c.flagged_degenerate() } else { c })
}

/// Midpoint of the optimal two-means split of scalar values.
pub fn two_means_cut(values: &[f64]) -> f64 {
    let mut s = values.to_vec();
    s.sort_by(f64::total_cmp);
    let n = s.len();
    if n < 2 {
        return s.first().copied().unwrap_or(0.0);
    }
    let mut prefix = vec![0.0; n + 1];
    let mut prefix_sq = vec![0.0; n + 1];
    for i in 0..n {
        prefix[i + 1] = prefix[i] + s[i];
        prefix_sq[i + 1] = prefix_sq[i] + s[i] * s[i];
    }
    let cost = |a: usize, b: usize| {
        let m = (b - a) as f64;
        let sum = prefix[b] - prefix[a];
        prefix_sq[b] - prefix_sq[a] - sum * sum / m
    };
    let best = (1..n)
        .filter(|&i| s[i] > s[i - 1])
        .min_by(|&a, &b| (cost(0, a) + cost(a, n)).total_cmp(&(cost(0, b) + cost(b, n))));
    match best {
        Some(i) => (s[i - 1] + s[i]) / 2.0,
        None => s[n - 1],
    }
}

/// One star of the hub decomposition and its matched eigenvector.
#[derive(Debug, Clone, PartialEq)]
pub struct StarEntry {
    pub centre: usize,
    pub leaves: Vec<usize>,
    /// `√(leaf count)`, the star's top eigenvalue.
    pub star_eigenvalue: f64,
    /// Matched adjacency eigenvalue.
    pub eigenvalue: f64,
    /// `|⟨x, s⟩|` with the unit star vector `s` (`1/√2` on the centre,
    /// `1/√(2d)` on each leaf).
    pub cosine: f64,
    /// Share of `‖x‖²` on the star's vertices.
    pub localization: f64,
}

#[derive(Debug, Clone, PartialEq)]
pub struct StarDominanceReport {
    pub stars: Vec<StarEntry>,
    /// Smallest gap between distinct eigenvalues of the star system.
    pub gap: f64,
}

impl StarDominanceReport {
    pub fn min_cosine(&self) -> f64 {
        self.stars.iter().map(|s| s.cosine).fold(f64::INFINITY, f64::min)
    }
}

/// Compares the top `k` adjacency eigenvectors with the stars around the
/// `k` highest-degree vertices.
///
/// Centres are taken by descending degree (ties by index). A centre's leaves
/// are its neighbours that are neither centres nor adjacent to an earlier
/// centre. Stars sorted by leaf count are matched with the top `k`
/// eigenvectors in descending signed order, chosen from the top `2k + 10`
/// by `|λ|`.
pub fn star_dominance(graph: &Graph, k: usize) -> Result<StarDominanceReport, BaselineError> {
    let n = graph.n();
    check_k(k, n)?;
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| graph.degree(b).cmp(&graph.degree(a)).then(a.cmp(&b)));
    let centres = &order[..k];
    let is_centre = {
        let mut mask = vec![false; n];
        centres.iter().for_each(|&c| mask[c] = true);
        mask
    };
    let mut stars: Vec<(usize, Vec<usize>)> = Vec::with_capacity(k);
    for (i, &c) in centres.iter().enumerate() {
        let leaves = graph
            .neighbors(c)
            .iter()
            .copied()
            .filter(|&v| !is_centre[v] && centres[..i].iter().all(|&e| !graph.has_edge(e, v)))
            .collect();
        stars.push((c, leaves));
    }
    stars.sort_by(|a, b| b.1.len().cmp(&a.1.len()).then(a.0.cmp(&b.0)));

    let eigs = eigs_topk(&adjacency(graph), (2 * k + 10).min(n), DEFAULT_TOL, solver_budget(n))?;
    let mut by_value: Vec<usize> = (0..eigs.len()).collect();
    by_value.sort_by(|&a, &b| eigs.values[b].total_cmp(&eigs.values[a]));

    let entries: Vec<StarEntry> = stars
        .into_iter()
        .zip(by_value)
        .map(|((centre, leaves), j)| star_entry(&eigs, j, centre, leaves))
        .collect();
    let mut system: Vec<f64> = Vec::new();
    for s in &entries {
        system.extend([s.star_eigenvalue, -s.star_eigenvalue]);
    }
    system.push(0.0);
    let gap = eigen_gap(&system).unwrap_or(f64::INFINITY);
    Ok(StarDominanceReport { stars: entries, gap })
}

fn star_entry(eigs: &EigenSystem, j: usize, centre: usize, leaves: Vec<usize>) -> StarEntry {
    let x = &eigs.vectors[j];
    let d = leaves.len();
    let (cosine, star_eigenvalue) = if d == 0 {
        (x[centre].abs(), 0.0)
    } else {
        let leaf_w = 1.0 / (2.0 * d as f64).sqrt();
        let dot = x[centre] / 2f64.sqrt() + leaves.iter().map(|&v| x[v] * leaf_w).sum::<f64>();
        (dot.abs(), (d as f64).sqrt())
    };
    let mass = x[centre] * x[centre] + leaves.iter().map(|&v| x[v] * x[v]).sum::<f64>();
    StarEntry { centre, leaves, star_eigenvalue, eigenvalue: eigs.values[j], cosine, localization: mass }
}
