//! Spectral community detection with the normalised adjacency `Ĥ`.
//!
//! The pipeline computes a threshold `f` from the degree regime, counts the
//! eigenvalues of `Ĥ` above `f / avg_degree`, embeds every vertex by the
//! corresponding eigenvector entries, estimates the separation `ε` between
//! clusters from a few random pairs, and peels off balls of radius `ε/4`
//! around dense centres.
//!
//! All distances in the embedding are scaled by `√n`.

use std::collections::HashSet;
use std::fmt;
use std::str::FromStr;

use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::clustering::Clustering;
use crate::model::Graph;
use crate::spectra::{eigs_topk, normalized_adjacency, EigenSystem, SpectraError, SymMatrix, DEFAULT_TOL};

/// Growth regime of the minimum expected degree.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum Regime {
    /// Degrees grow faster than `log n`.
    #[default]
    SuperLog,
    /// Degrees of order `log n`.
    LogOrder,
}

impl FromStr for Regime {
    type Err = DetectError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "superlog" => Ok(Regime::SuperLog),
            "logorder" => Ok(Regime::LogOrder),
            _ => Err(DetectError::Config(format!("unknown regime {s:?}"))),
        }
    }
}

impl fmt::Display for Regime {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(match self {
            Regime::SuperLog => "superlog",
            Regime::LogOrder => "logorder",
        })
    }
}

/// What happens to vertices left over after ball clustering.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum LeftoverPolicy {
    #[default]
    Unassigned,
    /// Join the cluster with the nearest centre.
    Nearest,
}

impl FromStr for LeftoverPolicy {
    type Err = DetectError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        match s.to_ascii_lowercase().as_str() {
            "unassigned" => Ok(LeftoverPolicy::Unassigned),
            "nearest" | "nearest-centre" | "nearest-center" => Ok(LeftoverPolicy::Nearest),
            _ => Err(DetectError::Config(format!("unknown leftover policy {s:?}"))),
        }
    }
}

#[derive(Debug, Clone, PartialEq)]
pub struct DetectConfig {
    pub regime: Regime,
    pub f_multiplier: f64,
    /// Seed for the pair sampling in [`gap_estimate`].
    pub seed: u64,
    pub leftover_policy: LeftoverPolicy,
    /// Number of sampled pairs; 0 means `⌈f^{-1/3}⌉`.
    pub tau: usize,
}

impl Default for DetectConfig {
    fn default() -> Self {
        Self { regime: Regime::SuperLog, f_multiplier: 1.0, seed: 0, leftover_policy: LeftoverPolicy::Unassigned, tau: 0 }
    }
}

impl DetectConfig {
    pub fn validate(&self) -> Result<(), DetectError> {
        if !(self.f_multiplier.is_finite() && self.f_multiplier > 0.0) {
            return Err(DetectError::Config(format!("f_multiplier must be finite and positive, got {}", self.f_multiplier)));
        }
        Ok(())
    }
}

#[derive(Debug, Clone, PartialEq, Error)]
pub enum DetectError {
    #[error("invalid configuration: {0}")]
    Config(String),
    #[error("invalid argument: {0}")]
    Argument(String),
    #[error("graph has no vertex with nonzero degree")]
    NoEdges,
    #[error(transparent)]
    Spectra(#[from] SpectraError),
}

/// Non-fatal conditions met while running the pipeline.
#[derive(Debug, Clone, PartialEq)]
pub enum DetectWarning {
    /// `f / avg_degree ≥ |λ̂_1|`, so `L̂ = 0`.
    NoCommunities { lambda1: f64, threshold: f64 },
    /// No sampled distance exceeded `f^{2/3}`.
    SingleClusterEvidence,
    /// No vertex had a dense enough ball on the first pass.
    NoQualifyingCentre,
    /// Isolated vertices were left unassigned.
    IsolatedVertices(usize),
    /// The graph has no edges.
    NoEdges,
}

impl fmt::Display for DetectWarning {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            DetectWarning::NoCommunities { lambda1, threshold } => {
                write!(f, "no communities detected: threshold {threshold:.6e} >= |lambda_1| = {lambda1:.6e}")
            }
            DetectWarning::SingleClusterEvidence => f.write_str("single cluster evidence: no sampled distance exceeds f^(2/3)"),
            DetectWarning::NoQualifyingCentre => f.write_str("no vertex has a dense enough ball; returning one community"),
            DetectWarning::IsolatedVertices(c) => write!(f, "{c} isolated vertices left unassigned"),
            DetectWarning::NoEdges => f.write_str("graph has no edges"),
        }
    }
}

/// Rows `ẑ_u = (x̂_1(u), …, x̂_L(u))` of the top eigenvectors.
#[derive(Debug, Clone, PartialEq)]
pub struct Embedding {
    rows: Vec<Vec<f64>>,
    dim: usize,
}

impl Embedding {
    /// Every row must have the same length.
    pub fn from_rows(rows: Vec<Vec<f64>>) -> Result<Self, DetectError> {
        let dim = rows.first().map_or(0, Vec::len);
        if let Some(u) = rows.iter().position(|r| r.len() != dim) {
            return Err(DetectError::Argument(format!("row {u} has length {} instead of {dim}", rows[u].len())));
        }
        Ok(Self { rows, dim })
    }

    pub fn n(&self) -> usize {
        self.rows.len()
    }

    pub fn dim(&self) -> usize {
        self.dim
    }

    pub fn row(&self, u: usize) -> &[f64] {
        &self.rows[u]
    }

    pub fn rows(&self) -> &[Vec<f64>] {
        &self.rows
    }

    fn raw_sq(a: &[f64], b: &[f64]) -> f64 {
        a.iter().zip(b).map(|(x, y)| (x - y) * (x - y)).sum()
    }

    /// `√n · ‖ẑ_u − ẑ_v‖`.
    pub fn distance(&self, u: usize, v: usize) -> f64 {
        (self.n() as f64 * Self::raw_sq(&self.rows[u], &self.rows[v])).sqrt()
    }

    /// `√n · ‖ẑ_u − c‖` for a point `c` in the same space.
    pub fn distance_to(&self, u: usize, c: &[f64]) -> f64 {
        (self.n() as f64 * Self::raw_sq(&self.rows[u], c)).sqrt()
    }
}

/// Output of [`detect_communities`] and [`detect_with_known_L`].
#[derive(Debug, Clone, PartialEq)]
pub struct Detection {
    pub clustering: Clustering,
    pub l_hat: usize,
    pub f: f64,
    /// `f / avg_degree`.
    pub threshold: f64,
    pub eps: Option<f64>,
    /// Eigenvalues of `Ĥ` that were computed, by descending `|λ|`.
    pub eigenvalues: Vec<f64>,
    pub warnings: Vec<DetectWarning>,
}

/// Threshold `f = f_multiplier · √b`, clamped to the open interval (0, 1),
/// where `b` is the regime's error bound at `n` and minimum degree `d1_hat`.
pub fn f_value(config: &DetectConfig, n: usize, d1_hat: usize) -> Result<f64, DetectError> {
    config.validate()?;
    if n < 2 {
        return Err(DetectError::Argument(format!("n must be at least 2, got {n}")));
    }
    if d1_hat == 0 {
        return Err(DetectError::NoEdges);
    }
    let log_n = (n as f64).ln();
    let d1 = d1_hat as f64;
    let b = 1.0 / d1
        + 1.0 / log_n.sqrt()
        + match config.regime {
            Regime::SuperLog => (log_n / d1).sqrt(),
            Regime::LogOrder => log_n.powf(-1.0 / 3.0),
        };
    let f = config.f_multiplier * b.sqrt();
    let below_one = 1.0 - f64::EPSILON;
    Ok(f.clamp(f64::MIN_POSITIVE, below_one))
}

/// `L̂ = #{i : |λ̂_i| > f / avg_degree}`.
pub fn rank_estimate(eigs: &EigenSystem, f: f64, avg_degree: f64) -> usize {
    let threshold = f / avg_degree;
    eigs.values.iter().filter(|l| l.abs() > threshold).count()
}

/// Rows of the first `l_hat` eigenvectors.
pub fn embed(eigs: &EigenSystem, l_hat: usize) -> Result<Embedding, DetectError> {
    if l_hat > eigs.len() {
        return Err(DetectError::Argument(format!("L = {l_hat} exceeds the {} available eigenpairs", eigs.len())));
    }
    let n = eigs.vectors.first().map_or(0, Vec::len);
    let rows = (0..n).map(|u| (0..l_hat).map(|i| eigs.vectors[i][u]).collect()).collect();
    Ok(Embedding { rows, dim: l_hat })
}

/// `τ = ⌈f^{-1/3}⌉`.
pub fn default_tau(f: f64) -> usize {
    (1.0 / f.cbrt()).ceil().max(1.0) as usize
}

/// Samples `tau` distinct unordered pairs of distinct entries of `pool`.
/// Returns all pairs when fewer than `tau` exist.
fn sample_pairs(pool: &[usize], tau: usize, seed: u64) -> Vec<(usize, usize)> {
    let m = pool.len();
    let total = m * m.saturating_sub(1) / 2;
    if tau >= total {
        return (0..m).flat_map(|i| (i + 1..m).map(move |j| (pool[i], pool[j]))).collect();
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut seen = HashSet::with_capacity(tau);
    let mut pairs = Vec::with_capacity(tau);
    while pairs.len() < tau {
        let a = rng.random_range(0..m);
        let b = rng.random_range(0..m);
        if a == b {
            continue;
        }
        let key = (a.min(b), a.max(b));
        if seen.insert(key) {
            pairs.push((pool[key.0], pool[key.1]));
        }
    }
    pairs
}

/// `ε = min{δ(t) : δ(t) > f^{2/3}}` over `tau` random pairs of distinct
/// vertices, where `δ(t)` is the scaled distance of pair `t`. `tau = 0`
/// selects [`default_tau`]. `None` means no sampled pair was far enough
/// apart, which is evidence of a single cluster.
pub fn gap_estimate(emb: &Embedding, f: f64, tau: usize, seed: u64) -> Result<Option<f64>, DetectError> {
    let all: Vec<usize> = (0..emb.n()).collect();
    gap_estimate_among(emb, f, tau, seed, &all)
}

/// [`gap_estimate`] with pairs drawn from `pool` only.
pub fn gap_estimate_among(emb: &Embedding, f: f64, tau: usize, seed: u64, pool: &[usize]) -> Result<Option<f64>, DetectError> {
    if pool.len() < 2 {
        return Err(DetectError::Argument(format!("need at least 2 vertices to sample pairs, got {}", pool.len())));
    }
    let tau = if tau == 0 { default_tau(f) } else { tau };
    let floor = f.powf(2.0 / 3.0);
    Ok(sample_pairs(pool, tau, seed)
        .into_iter()
        .map(|(u, v)| emb.distance(u, v))
        .filter(|&d| d > floor)
        .min_by(f64::total_cmp))
}

/// Size requirement on the `ε/8`-ball around a candidate centre.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum MinBall {
    /// Strictly more than this many vertices.
    Exceeds(f64),
    /// At least this many vertices.
    AtLeast(f64),
}

impl MinBall {
    fn accepts(self, count: usize) -> bool {
        match self {
            MinBall::Exceeds(t) => count as f64 > t,
            MinBall::AtLeast(t) => count as f64 >= t,
        }
    }
}

/// Ball clustering with the rule `|ball(m, ε/8)| > f^{1/3} · n`.
pub fn ball_cluster(emb: &Embedding, eps: f64, f: f64, policy: LeftoverPolicy) -> Result<Clustering, DetectError> {
    let rule = MinBall::Exceeds(f.cbrt() * emb.n() as f64);
    ball_cluster_with(emb, eps, rule, policy, None)
}

/// Iterative ball clustering.
///
/// Remaining vertices are scanned in ascending index. The first `m` whose
/// `ε/8`-ball among remaining vertices satisfies `rule` becomes a centre, and
/// its `ε/4`-ball among remaining vertices becomes a community and is
/// removed. Balls only shrink as vertices are removed, so a rejected
/// candidate is never reconsidered.
///
/// Vertices with `eligible[u] == false` take no part in the search and are
/// only assigned under [`LeftoverPolicy::Nearest`]. When no centre qualifies,
/// all eligible vertices form one community and the result is flagged
/// degenerate.
pub fn ball_cluster_with(
    emb: &Embedding,
    eps: f64,
    rule: MinBall,
    policy: LeftoverPolicy,
    eligible: Option<&[bool]>,
) -> Result<Clustering, DetectError> {
    if !(eps > 0.0 && eps.is_finite()) {
        return Err(DetectError::Argument(format!("eps must be positive and finite, got {eps}")));
    }
    let n = emb.n();
    if eligible.is_some_and(|e| e.len() != n) {
        return Err(DetectError::Argument("eligibility mask length differs from n".into()));
    }
    let is_eligible = |u: usize| eligible.is_none_or(|e| e[u]);
    // Compare raw squared distances against (r/√n)².
    let radius_sq = |r: f64| r * r / n as f64;
    let (inner, outer) = (radius_sq(eps / 8.0), radius_sq(eps / 4.0));

    let mut remaining: Vec<bool> = (0..n).map(is_eligible).collect();
    let mut labels: Vec<Option<usize>> = vec![None; n];
    let mut centres: Vec<Vec<f64>> = Vec::new();
    for m in 0..n {
        if !remaining[m] {
            continue;
        }
        let zm = emb.row(m);
        let count = (0..n).filter(|&v| remaining[v] && Embedding::raw_sq(zm, emb.row(v)) <= inner).count();
        if !rule.accepts(count) {
            continue;
        }
        let c = centres.len();
        for v in 0..n {
            if remaining[v] && Embedding::raw_sq(zm, emb.row(v)) <= outer {
                remaining[v] = false;
                labels[v] = Some(c);
            }
        }
        centres.push(zm.to_vec());
    }

    if centres.is_empty() {
        let labels = (0..n).map(|u| is_eligible(u).then_some(0)).collect::<Vec<_>>();
        let count = usize::from(labels.iter().any(Option::is_some));
        return Ok(Clustering::new(labels, count, Vec::new())
            .expect("single community is consistent")
            .flagged_degenerate());
    }
    if policy == LeftoverPolicy::Nearest {
        for (u, label) in labels.iter_mut().enumerate() {
            if label.is_none() {
                *label = (0..centres.len()).min_by(|&a, &b| {
                    Embedding::raw_sq(emb.row(u), &centres[a]).total_cmp(&Embedding::raw_sq(emb.row(u), &centres[b]))
                });
            }
        }
    }
    let count = centres.len();
    Ok(Clustering::new(labels, count, centres).expect("every centre owns its own vertex"))
}

fn solver_budget(n: usize) -> usize {
    (10 * n).max(1000)
}

/// Top eigenpairs of `Ĥ`, doubling `k` until the smallest computed `|λ|`
/// falls to `threshold` or below, or the whole spectrum is computed.
fn eigs_above(h: &SymMatrix, threshold: f64) -> Result<EigenSystem, SpectraError> {
    let n = h.n();
    let mut k = n.min(4);
    loop {
        let eigs = eigs_topk(h, k, DEFAULT_TOL, solver_budget(n))?;
        let last = eigs.values.last().map_or(0.0, |v| v.abs());
        if last <= threshold || k == n {
            return Ok(eigs);
        }
        k = (2 * k).min(n);
    }
}

struct Prepared {
    f: f64,
    avg: f64,
    eligible: Vec<bool>,
    pool: Vec<usize>,
    warnings: Vec<DetectWarning>,
}

fn prepare(graph: &Graph, config: &DetectConfig) -> Result<Result<Prepared, Detection>, DetectError> {
    config.validate()?;
    let n = graph.n();
    if n == 0 {
        return Err(DetectError::Argument("graph has no vertices".into()));
    }
    let Some(d1) = graph.min_nonzero_degree() else {
        let clustering = Clustering::new(vec![None; n], 0, Vec::new()).expect("empty clustering");
        return Ok(Err(Detection {
            clustering,
            l_hat: 0,
            f: f64::NAN,
            threshold: f64::NAN,
            eps: None,
            eigenvalues: Vec::new(),
            warnings: vec![DetectWarning::NoEdges],
        }));
    };
    let f = f_value(config, n, d1)?;
    let eligible: Vec<bool> = graph.degrees().iter().map(|&d| d > 0).collect();
    let pool: Vec<usize> = (0..n).filter(|&u| eligible[u]).collect();
    let mut warnings = Vec::new();
    if pool.len() < n {
        warnings.push(DetectWarning::IsolatedVertices(n - pool.len()));
    }
    Ok(Ok(Prepared { f, avg: graph.average_degree(), eligible, pool, warnings }))
}

fn single_community(eligible: &[bool]) -> Clustering {
    let labels = eligible.iter().map(|&e| e.then_some(0)).collect();
    Clustering::new(labels, 1, Vec::new()).expect("at least one vertex has an edge").flagged_degenerate()
}

/// Runs embedding, gap estimation and ball clustering on prepared inputs.
fn finish(
    eigs: &EigenSystem,
    dims: usize,
    rule: MinBall,
    prep: Prepared,
    config: &DetectConfig,
) -> Result<Detection, DetectError> {
    let Prepared { f, avg, eligible, pool, mut warnings } = prep;
    let emb = embed(eigs, dims)?;
    let eps = if pool.len() >= 2 { gap_estimate_among(&emb, f, config.tau, config.seed, &pool)? } else { None };
    let clustering = match eps {
        None => {
            warnings.push(DetectWarning::SingleClusterEvidence);
            single_community(&eligible)
        }
        Some(eps) => {
            let c = ball_cluster_with(&emb, eps, rule, config.leftover_policy, Some(&eligible))?;
            if c.is_degenerate() {
                warnings.push(DetectWarning::NoQualifyingCentre);
            }
            c
        }
    };
    Ok(Detection {
        clustering,
        l_hat: dims,
        f,
        threshold: f / avg,
        eps,
        eigenvalues: eigs.values.clone(),
        warnings,
    })
}

/// Full pipeline with the number of communities estimated from the spectrum.
///
/// Isolated vertices embed at the origin, are excluded from the pair sampling
/// and the centre search, and are assigned only under
/// [`LeftoverPolicy::Nearest`].
pub fn detect_communities(graph: &Graph, config: &DetectConfig) -> Result<Detection, DetectError> {
    let prep = match prepare(graph, config)? {
        Ok(p) => p,
        Err(done) => return Ok(done),
    };
    let threshold = prep.f / prep.avg;
    let h = normalized_adjacency(graph);
    let eigs = eigs_above(&h, threshold)?;
    let l_hat = rank_estimate(&eigs, prep.f, prep.avg);
    if l_hat == 0 {
        let Prepared { f, eligible, mut warnings, .. } = prep;
        warnings.push(DetectWarning::NoCommunities { lambda1: eigs.values[0].abs(), threshold });
        return Ok(Detection {
            clustering: single_community(&eligible),
            l_hat,
            f,
            threshold,
            eps: None,
            eigenvalues: eigs.values,
            warnings,
        });
    }
    let rule = MinBall::Exceeds(prep.f.cbrt() * graph.n() as f64);
    finish(&eigs, l_hat, rule, prep, config)
}

/// Pipeline with a known number of communities `l` and minimum community
/// fraction `alpha_min`: embeds with exactly `l` eigenvectors and accepts a
/// centre when its `ε/8`-ball holds at least `alpha_min · n / 2` vertices.
#[allow(non_snake_case)]
pub fn detect_with_known_L(graph: &Graph, l: usize, alpha_min: f64, config: &DetectConfig) -> Result<Detection, DetectError> {
    let n = graph.n();
    if l == 0 || l > n {
        return Err(DetectError::Argument(format!("L must lie in 1..={n}, got {l}")));
    }
    if !(alpha_min > 0.0 && alpha_min <= 1.0) {
        return Err(DetectError::Argument(format!("alpha_min must lie in (0, 1], got {alpha_min}")));
    }
    let prep = match prepare(graph, config)? {
        Ok(p) => p,
        Err(done) => return Ok(done),
    };
    let h = normalized_adjacency(graph);
    let eigs = eigs_topk(&h, l, DEFAULT_TOL, solver_budget(n))?;
    let rule = MinBall::AtLeast(alpha_min * n as f64 / 2.0);
    finish(&eigs, l, rule, prep, config)
}

#[cfg(test)]
mod tests {
    use super::*;

    fn system(values: &[f64]) -> EigenSystem {
        let n = values.len();
        EigenSystem {
            values: values.to_vec(),
            vectors: (0..n).map(|i| (0..n).map(|j| f64::from(u8::from(i == j))).collect()).collect(),
            residuals: vec![0.0; n],
        }
    }

    fn two_masses(n: usize, sep: f64) -> Embedding {
        let s = sep / (n as f64).sqrt();
        Embedding::from_rows((0..n).map(|u| vec![if u < n / 2 { 0.0 } else { s }]).collect()).unwrap()
    }

    #[test]
    fn f_value_examples() {
        let cfg = DetectConfig::default();
        assert!((f_value(&cfg, 10_000, 100).unwrap() - 0.801867).abs() < 5e-6);
        let cfg = DetectConfig { regime: Regime::LogOrder, ..cfg };
        assert!((f_value(&cfg, 10_000, 10).unwrap() - 0.952138).abs() < 5e-6);
        assert!(matches!(f_value(&cfg, 10_000, 0), Err(DetectError::NoEdges)));
        assert!(f_value(&cfg, 1, 1).is_err());
    }

    #[test]
    fn f_value_monotone_in_multiplier() {
        let mut last = f64::INFINITY;
        for m in [1.0, 0.5, 1e-2, 1e-4, 1e-8] {
            let cfg = DetectConfig { f_multiplier: m, ..Default::default() };
            let f = f_value(&cfg, 5000, 30).unwrap();
            assert!(f > 0.0 && f < 1.0 && f < last);
            last = f;
        }
        let cfg = DetectConfig { f_multiplier: 100.0, ..Default::default() };
        assert!(f_value(&cfg, 5000, 30).unwrap() < 1.0);
        let cfg = DetectConfig { f_multiplier: 0.0, ..Default::default() };
        assert!(f_value(&cfg, 5000, 30).is_err());
    }

    #[test]
    fn rank_examples() {
        assert_eq!(rank_estimate(&system(&[0.5, 0.4, 0.01]), 0.1, 1.0), 2);
        assert_eq!(rank_estimate(&system(&[0.05, 0.01]), 0.1, 1.0), 0);
    }

    #[test]
    fn embed_rows_and_columns() {
        let eigs = system(&[3.0, 2.0, 1.0]);
        let e = embed(&eigs, 1).unwrap();
        assert_eq!(e.dim(), 1);
        assert_eq!(e.row(0), &[1.0]);
        assert_eq!(e.row(2), &[0.0]);
        let e = embed(&eigs, 2).unwrap();
        for i in 0..2 {
            let norm: f64 = e.rows().iter().map(|r| r[i] * r[i]).sum();
            assert!((norm - 1.0).abs() < 1e-15);
        }
        assert!(embed(&eigs, 4).is_err());
    }

    #[test]
    fn gap_cases() {
        let same = Embedding::from_rows(vec![vec![0.3]; 20]).unwrap();
        assert_eq!(gap_estimate(&same, 0.01, 0, 1).unwrap(), None);
        let two = two_masses(20, 1.0);
        let eps = gap_estimate(&two, 1e-3, 190, 3).unwrap().unwrap();
        assert!((eps - 1.0).abs() < 1e-12);
    }

    #[test]
    fn tau_default() {
        assert_eq!(default_tau(0.125), 2);
        assert_eq!(default_tau(0.001), 10);
        assert_eq!(default_tau(0.9), 2);
    }

    #[test]
    fn ball_two_masses() {
        let c = ball_cluster(&two_masses(40, 1.0), 1.0, 0.01, LeftoverPolicy::Unassigned).unwrap();
        assert_eq!(c.count(), 2);
        assert_eq!(c.unassigned(), 0);
        assert_eq!(c.sizes(), vec![20, 20]);
    }

    #[test]
    fn ball_one_mass() {
        let e = Embedding::from_rows(vec![vec![0.1, 0.2]; 10]).unwrap();
        let c = ball_cluster(&e, 1.0, 0.01, LeftoverPolicy::Unassigned).unwrap();
        assert_eq!(c.count(), 1);
        assert!(!c.is_degenerate());
    }

    #[test]
    fn ball_fallback_and_leftovers() {
        // Spread points: no ball is dense enough.
        let n = 10;
        let e = Embedding::from_rows((0..n).map(|u| vec![u as f64]).collect()).unwrap();
        let c = ball_cluster(&e, 1.0, 0.5, LeftoverPolicy::Unassigned).unwrap();
        assert!(c.is_degenerate());
        assert_eq!(c.count(), 1);

        // A dense mass plus one straggler.
        let mut rows = vec![vec![0.0]; 9];
        rows.push(vec![10.0]);
        let e = Embedding::from_rows(rows).unwrap();
        let c = ball_cluster_with(&e, 1.0, MinBall::AtLeast(3.0), LeftoverPolicy::Unassigned, None).unwrap();
        assert_eq!(c.unassigned(), 1);
        let c = ball_cluster_with(&e, 1.0, MinBall::AtLeast(3.0), LeftoverPolicy::Nearest, None).unwrap();
        assert_eq!(c.unassigned(), 0);
        assert!(ball_cluster(&e, 0.0, 0.1, LeftoverPolicy::Unassigned).is_err());
    }

    #[test]
    fn complete_graph_single_cluster() {
        let g = Graph::complete(30);
        let d = detect_communities(&g, &DetectConfig::default()).unwrap();
        assert_eq!(d.clustering.count(), 1);
        assert_eq!(d.clustering.unassigned(), 0);
        let d = detect_with_known_L(&g, 1, 1.0, &DetectConfig::default()).unwrap();
        assert_eq!(d.clustering.count(), 1);
        assert_eq!(d.clustering.unassigned(), 0);
    }

    #[test]
    fn degenerate_graphs_do_not_panic() {
        let d = detect_communities(&Graph::empty(5), &DetectConfig::default()).unwrap();
        assert_eq!(d.warnings, vec![DetectWarning::NoEdges]);
        assert_eq!(d.clustering.unassigned(), 5);
        let g = Graph::from_edges(5, &[(0, 1)]).unwrap();
        let d = detect_communities(&g, &DetectConfig::default()).unwrap();
        assert_eq!(d.clustering.label(2), None);
        assert!(d.warnings.contains(&DetectWarning::IsolatedVertices(3)));
        assert!(detect_with_known_L(&g, 0, 0.5, &DetectConfig::default()).is_err());
        assert!(detect_with_known_L(&g, 1, 0.0, &DetectConfig::default()).is_err());
    }

    #[test]
    fn parse_options() {
        assert_eq!("SuperLog".parse::<Regime>().unwrap(), Regime::SuperLog);
        assert_eq!("logorder".parse::<Regime>().unwrap(), Regime::LogOrder);
        assert!("fast".parse::<Regime>().is_err());
        assert_eq!("nearest".parse::<LeftoverPolicy>().unwrap(), LeftoverPolicy::Nearest);
    }
}
