//! Degree-corrected stochastic block model instances.
//!
//! A model on `n` vertices assigns each vertex a community `σ_u ∈ 0..K` and a
//! weight `D_u > 0`. Given a symmetric nonnegative `K × K` block matrix `B`,
//! each pair `u ≠ v` is joined independently with probability
//!
//! ```text
//! P(u ~ v) = D_u · D_v · B[σ_u][σ_v] / (n · D̄),     D̄ = (1/n) Σ_l D_l
//! ```
//!
//! and there are no self-loops. [`validate`] checks that this is a
//! probability for every pair. [`sample_graph`] draws a [`Graph`] with a
//! counter-based generator so the output depends only on `(params, seed)`.

use std::fmt;

use rand::{RngCore, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rayon::prelude::*;
use thiserror::Error;

pub use crate::graph::{Graph, GraphError};

/// Relative tolerance used by the identifiability test.
pub const IDENTIFIABILITY_TOL: f64 = 1e-9;

const ALPHA_TOL: f64 = 1e-12;
const SYMMETRY_TOL: f64 = 1e-12;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ModelError {
    #[error("shape mismatch: {0}")]
    Shape(String),
    #[error("invalid parameters: {0}")]
    Invalid(ValidationReport),
    #[error("edge probability {p} > 1 at (u,v)=({u},{v})")]
    ProbabilityAboveOne { p: f64, u: usize, v: usize },
    #[error("community {0} has zero aggregate M̄")]
    ZeroAggregate(usize),
    #[error("communities ({0}, {1}) are identifiable; no equivalent reparameterisation exists")]
    Identifiable(usize, usize),
    #[error("reparameterisation check failed: {0}")]
    Reparameterisation(String),
}

/// Full description of a DC-SBM instance.
#[derive(Debug, Clone, PartialEq)]
pub struct DcsbmParams {
    n: usize,
    k: usize,
    alpha: Vec<f64>,
    sigma: Vec<usize>,
    weights: Vec<f64>,
    block: Vec<f64>,
}

/// Splits `n` vertices into blocks of size `round(α_k · n)`, using largest
/// remainders so the sizes add up to `n`. Ties in the remainder go to the
/// lower community index.
pub fn block_sizes(alpha: &[f64], n: usize) -> Vec<usize> {
    let exact: Vec<f64> = alpha.iter().map(|a| a * n as f64).collect();
    let mut sizes: Vec<usize> = exact.iter().map(|x| x.floor().max(0.0) as usize).collect();
    let assigned: usize = sizes.iter().sum();
    let mut order: Vec<usize> = (0..alpha.len()).collect();
    order.sort_by(|&a, &b| {
        let ra = exact[a] - exact[a].floor();
        let rb = exact[b] - exact[b].floor();
        rb.total_cmp(&ra).then(a.cmp(&b))
    });
    for &k in order.iter().cycle().take(n.saturating_sub(assigned)) {
        sizes[k] += 1;
    }
    sizes
}

/// Contiguous labels: the first `size_0` vertices in community 0, and so on.
pub fn contiguous_labels(alpha: &[f64], n: usize) -> Vec<usize> {
    block_sizes(alpha, n)
        .iter()
        .enumerate()
        .flat_map(|(k, &s)| std::iter::repeat_n(k, s))
        .collect()
}

impl DcsbmParams {
    /// Assembles parameters after checking shapes. `block` is row-major
    /// `K × K`. Labels default to contiguous blocks. Semantic invariants are
    /// reported by [`validate`] rather than enforced here.
    pub fn new(
        alpha: Vec<f64>,
        block: Vec<f64>,
        weights: Vec<f64>,
        sigma: Option<Vec<usize>>,
    ) -> Result<Self, ModelError> {
        let k = alpha.len();
        let n = weights.len();
        if k == 0 {
            return Err(ModelError::Shape("K must be at least 1".into()));
        }
        if block.len() != k * k {
            return Err(ModelError::Shape(format!(
                "block has {} entries, expected K²={}",
                block.len(),
                k * k
            )));
        }
        let sigma = sigma.unwrap_or_else(|| contiguous_labels(&alpha, n));
        if sigma.len() != n {
            return Err(ModelError::Shape(format!(
                "sigma has {} entries but there are {} weights",
                sigma.len(),
                n
            )));
        }
        if let Some(u) = sigma.iter().position(|&s| s >= k) {
            return Err(ModelError::Shape(format!(
                "sigma[{u}]={} is not a community in 0..{k}",
                sigma[u]
            )));
        }
        Ok(Self { n, k, alpha, sigma, weights, block })
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn k(&self) -> usize {
        self.k
    }

    pub fn alpha(&self) -> &[f64] {
        &self.alpha
    }

    pub fn sigma(&self) -> &[usize] {
        &self.sigma
    }

    pub fn weights(&self) -> &[f64] {
        &self.weights
    }

    /// Row-major block matrix.
    pub fn block(&self) -> &[f64] {
        &self.block
    }

    pub fn b(&self, i: usize, j: usize) -> f64 {
        self.block[i * self.k + j]
    }

    /// Number of vertices in each community.
    pub fn community_sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.k];
        for &s in &self.sigma {
            sizes[s] += 1;
        }
        sizes
    }

    /// Realised community fractions `n_k / n`.
    pub fn realised_fractions(&self) -> Vec<f64> {
        self.community_sizes().iter().map(|&s| s as f64 / self.n as f64).collect()
    }

    /// Returns a copy with vertices relabelled so that old vertex `u`
    /// becomes `perm[u]`.
    pub fn permuted(&self, perm: &[usize]) -> Self {
        let mut sigma = vec![0; self.n];
        let mut weights = vec![0.0; self.n];
        for u in 0..self.n {
            sigma[perm[u]] = self.sigma[u];
            weights[perm[u]] = self.weights[u];
        }
        Self { sigma, weights, ..self.clone() }
    }

    /// `Σ_l D_l`.
    pub fn total_weight(&self) -> f64 {
        self.weights.iter().sum()
    }

    /// Unchecked edge kernel `D_u D_v B / (n D̄)`, also for `u = v`.
    pub(crate) fn kernel(&self, u: usize, v: usize) -> f64 {
        self.weights[u] * self.weights[v] * self.b(self.sigma[u], self.sigma[v])
            / self.total_weight()
    }

    pub fn ensure_valid(&self) -> Result<(), ModelError> {
        let report = validate(self);
        if report.is_valid() {
            Ok(())
        } else {
            Err(ModelError::Invalid(report))
        }
    }
}

/// A broken invariant of [`DcsbmParams`].
#[derive(Debug, Clone, PartialEq)]
pub enum Violation {
    AlphaSum(f64),
    AlphaNonPositive { k: usize, value: f64 },
    BlockSize { k: usize, expected: usize, found: usize },
    BlockAsymmetric { i: usize, j: usize },
    BlockNegative { i: usize, j: usize, value: f64 },
    WeightNonPositive { u: usize, value: f64 },
    EdgeProbability { p: f64, u: usize, v: usize },
}

impl fmt::Display for Violation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Violation::AlphaSum(s) => write!(f, "alpha sums to {s}, not 1"),
            Violation::AlphaNonPositive { k, value } => write!(f, "alpha[{k}] = {value} is not positive"),
            Violation::BlockSize { k, expected, found } => {
                write!(f, "community {k} has {found} vertices, expected {expected}")
            }
            Violation::BlockAsymmetric { i, j } => write!(f, "block matrix not symmetric at ({i},{j})"),
            Violation::BlockNegative { i, j, value } => write!(f, "block[{i}][{j}] = {value} is negative"),
            Violation::WeightNonPositive { u, value } => write!(f, "weight D[{u}] = {value} is not positive"),
            Violation::EdgeProbability { p, u, v } => write!(f, "edge probability {p} > 1 at (u,v)=({u},{v})"),
        }
    }
}

/// A condition that does not invalidate the model but weakens guarantees.
#[derive(Debug, Clone, PartialEq)]
pub enum Advisory {
    /// `D_1² / D̄ < log n`, with `D_1` the smallest weight.
    SparseWeights { ratio: f64, log_n: f64 },
    /// Communities `i < l` have proportional normalised rows.
    Unidentifiable { i: usize, l: usize },
    /// The identifiability check could not run.
    ZeroAggregate(usize),
}

impl fmt::Display for Advisory {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Advisory::SparseWeights { ratio, log_n } => {
                write!(f, "weight condition D_1²/D̄ = {ratio:.4} < log n = {log_n:.4}")
            }
            Advisory::Unidentifiable { i, l } => write!(f, "identifiability violated for pair ({i},{l})"),
            Advisory::ZeroAggregate(i) => write!(f, "community {i} has zero aggregate M̄"),
        }
    }
}

/// Outcome of [`validate`].
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<Violation>,
    pub advisories: Vec<Advisory>,
    /// Largest pairwise edge probability and the pair attaining it.
    pub max_edge_probability: Option<(f64, usize, usize)>,
}

impl ValidationReport {
    pub fn is_valid(&self) -> bool {
        self.violations.is_empty()
    }
}

impl fmt::Display for ValidationReport {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let parts: Vec<String> = self.violations.iter().map(|v| v.to_string()).collect();
        if parts.is_empty() {
            write!(f, "valid")
        } else {
            write!(f, "{}", parts.join("; "))
        }
    }
}

/// Lists every violated invariant together with advisory checks.
pub fn validate(params: &DcsbmParams) -> ValidationReport {
    let mut report = ValidationReport::default();
    let k = params.k;
    let n = params.n;

    let sum: f64 = params.alpha.iter().sum();
    if (sum - 1.0).abs() > ALPHA_TOL {
        report.violations.push(Violation::AlphaSum(sum));
    }
    for (i, &a) in params.alpha.iter().enumerate() {
        if !(a > 0.0) {
            report.violations.push(Violation::AlphaNonPositive { k: i, value: a });
        }
    }
    let expected = block_sizes(&params.alpha, n);
    for (i, (&e, f)) in expected.iter().zip(params.community_sizes()).enumerate() {
        if e != f {
            report.violations.push(Violation::BlockSize { k: i, expected: e, found: f });
        }
    }
    for i in 0..k {
        for j in 0..k {
            let b = params.b(i, j);
            if j > i && (b - params.b(j, i)).abs() > SYMMETRY_TOL {
                report.violations.push(Violation::BlockAsymmetric { i, j });
            }
            if b < 0.0 {
                report.violations.push(Violation::BlockNegative { i, j, value: b });
            }
        }
    }
    let mut weights_ok = true;
    for (u, &d) in params.weights.iter().enumerate() {
        if !(d > 0.0) || !d.is_finite() {
            report.violations.push(Violation::WeightNonPositive { u, value: d });
            weights_ok = false;
        }
    }

    if weights_ok && n >= 2 {
        if let Some((p, u, v)) = max_edge_probability(params) {
            report.max_edge_probability = Some((p, u, v));
            if p > 1.0 {
                report.violations.push(Violation::EdgeProbability { p, u, v });
            }
        }
        let d1 = params.weights.iter().copied().fold(f64::INFINITY, f64::min);
        let d_bar = params.total_weight() / n as f64;
        let log_n = (n as f64).ln();
        let ratio = d1 * d1 / d_bar;
        if ratio < log_n {
            report.advisories.push(Advisory::SparseWeights { ratio, log_n });
        }
        match identifiability_check(params) {
            Ok(pairs) => report
                .advisories
                .extend(pairs.into_iter().map(|(i, l)| Advisory::Unidentifiable { i, l })),
            Err(ModelError::ZeroAggregate(i)) => report.advisories.push(Advisory::ZeroAggregate(i)),
            Err(_) => {}
        }
    }
    report
}

/// Largest edge probability over pairs `u < v`, computed per block pair from
/// the two heaviest vertices of each community.
fn max_edge_probability(params: &DcsbmParams) -> Option<(f64, usize, usize)> {
    let k = params.k;
    let mut top: Vec<Vec<usize>> = vec![Vec::with_capacity(2); k];
    for u in 0..params.n {
        let t = &mut top[params.sigma[u]];
        let w = params.weights[u];
        match t.len() {
            0 => t.push(u),
            1 if w > params.weights[t[0]] => t.insert(0, u),
            1 => t.push(u),
            _ if w > params.weights[t[0]] => {
                t[1] = t[0];
                t[0] = u;
            }
            _ if w > params.weights[t[1]] => t[1] = u,
            _ => {}
        }
    }
    let mut best: Option<(f64, usize, usize)> = None;
    for i in 0..k {
        for j in i..k {
            let pair = if i == j {
                if top[i].len() < 2 {
                    continue;
                }
                (top[i][0], top[i][1])
            } else {
                match (top[i].first(), top[j].first()) {
                    (Some(&a), Some(&b)) => (a, b),
                    _ => continue,
                }
            };
            let (u, v) = (pair.0.min(pair.1), pair.0.max(pair.1));
            let p = params.kernel(u, v);
            let better = match best {
                None => true,
                Some((bp, bu, bv)) => p > bp || (p == bp && (u, v) < (bu, bv)),
            };
            if better {
                best = Some((p, u, v));
            }
        }
    }
    best
}

/// Exact finite-`n` aggregates of a model.
#[derive(Debug, Clone, PartialEq)]
pub struct ModelAggregates {
    /// `D̄ = (1/n) Σ D_l`.
    pub d_bar: f64,
    /// `D̄_i = Σ_{σ_l = i} D_l / (α_i n)`.
    pub d_bar_per_block: Vec<f64>,
    /// `M_i = Σ_l D_l B[i][σ_l]`.
    pub m: Vec<f64>,
    /// `M̄_i = M_i / Σ_l D_l`.
    pub m_bar: Vec<f64>,
    /// `D̄_i / D̄`.
    pub d_ratio: Vec<f64>,
}

/// Per-community weight sums `Σ_{σ_u = i} D_u`.
pub fn block_weight_sums(params: &DcsbmParams) -> Vec<f64> {
    let mut s = vec![0.0; params.k];
    for (u, &d) in params.weights.iter().enumerate() {
        s[params.sigma[u]] += d;
    }
    s
}

pub fn aggregates(params: &DcsbmParams) -> ModelAggregates {
    let k = params.k;
    let n = params.n as f64;
    let total = params.total_weight();
    let s = block_weight_sums(params);
    let d_bar = total / n;
    let d_bar_per_block: Vec<f64> = (0..k).map(|i| s[i] / (params.alpha[i] * n)).collect();
    let m: Vec<f64> = (0..k).map(|i| (0..k).map(|j| params.b(i, j) * s[j]).sum()).collect();
    let m_bar = m.iter().map(|mi| mi / total).collect();
    let d_ratio = d_bar_per_block.iter().map(|d| d / d_bar).collect();
    ModelAggregates { d_bar, d_bar_per_block, m, m_bar, d_ratio }
}

/// Probability that `u` and `v` are joined. Zero on the diagonal.
pub fn edge_probability(params: &DcsbmParams, u: usize, v: usize) -> Result<f64, ModelError> {
    if u == v {
        return Ok(0.0);
    }
    let p = params.kernel(u, v);
    if p > 1.0 {
        return Err(ModelError::ProbabilityAboveOne { p, u: u.min(v), v: u.max(v) });
    }
    Ok(p)
}

/// Draws a graph. Pair `(u, v)`, `u < v`, uses the 64-bit word at position
/// `2v` of ChaCha8 stream `u` under a key derived from `seed`, so the output
/// does not depend on evaluation order or thread count.
pub fn sample_graph(params: &DcsbmParams, seed: u64) -> Result<Graph, ModelError> {
    params.ensure_valid()?;
    let n = params.n;
    let total = params.total_weight();
    let base = ChaCha8Rng::seed_from_u64(seed);
    let rows: Vec<Vec<(usize, usize)>> = (0..n)
        .into_par_iter()
        .map(|u| {
            let mut rng = base.clone();
            rng.set_stream(u as u64);
            rng.set_word_pos(2 * (u as u128 + 1));
            let cu = params.weights[u] / total;
            let row = &params.block[params.sigma[u] * params.k..(params.sigma[u] + 1) * params.k];
            let mut out = Vec::new();
            for v in u + 1..n {
                let x = uniform(rng.next_u64());
                if x < cu * params.weights[v] * row[params.sigma[v]] {
                    out.push((u, v));
                }
            }
            out
        })
        .collect();
    Ok(Graph::from_canonical(n, rows.concat()))
}

/// Uniform on `[0, 1)` from the top 53 bits.
fn uniform(bits: u64) -> f64 {
    (bits >> 11) as f64 * (1.0 / (1u64 << 53) as f64)
}

/// Community pairs `(i, l)`, `i < l`, whose rows `B[i][·]/M̄_i` and
/// `B[l][·]/M̄_l` coincide within relative tolerance 1e-9.
pub fn identifiability_check(params: &DcsbmParams) -> Result<Vec<(usize, usize)>, ModelError> {
    let agg = aggregates(params);
    if let Some(i) = agg.m_bar.iter().position(|&m| m == 0.0) {
        return Err(ModelError::ZeroAggregate(i));
    }
    let k = params.k;
    let mut pairs = Vec::new();
    for i in 0..k {
        for l in i + 1..k {
            let same = (0..k).all(|j| {
                let a = params.b(i, j) / agg.m_bar[i];
                let b = params.b(l, j) / agg.m_bar[l];
                (a - b).abs() <= IDENTIFIABILITY_TOL * a.abs().max(b.abs())
            });
            if same {
                pairs.push((i, l));
            }
        }
    }
    Ok(pairs)
}

fn rows_match(params: &DcsbmParams, agg: &ModelAggregates, i: usize, l: usize) -> bool {
    (0..params.k).all(|j| {
        let a = params.b(i, j) / agg.m_bar[i];
        let b = params.b(l, j) / agg.m_bar[l];
        (a - b).abs() <= IDENTIFIABILITY_TOL * a.abs().max(b.abs())
    })
}

/// Builds the equivalent model in which communities `i` and `l` have equal
/// block rows:
///
/// ```text
/// B*[k][m] = B[k][m] / (M_k M_m),   D*_u = f · D_u · M_{σ_u},   f = Σ_v D_v M_{σ_v} / Σ_w D_w
/// ```
///
/// The result is checked before returning: rows `i` and `l` of `B*` agree and
/// every pairwise edge probability is unchanged to relative precision 1e-10.
pub fn reparameterize_equivalent(
    params: &DcsbmParams,
    i: usize,
    l: usize,
) -> Result<DcsbmParams, ModelError> {
    let k = params.k;
    if i >= k || l >= k {
        return Err(ModelError::Shape(format!("community index out of range 0..{k}")));
    }
    let agg = aggregates(params);
    if let Some(c) = agg.m.iter().position(|&m| m == 0.0) {
        return Err(ModelError::ZeroAggregate(c));
    }
    if !rows_match(params, &agg, i, l) {
        return Err(ModelError::Identifiable(i, l));
    }
    let m = &agg.m;
    let block: Vec<f64> = (0..k * k).map(|e| params.block[e] / (m[e / k] * m[e % k])).collect();
    let f = params
        .weights
        .iter()
        .zip(&params.sigma)
        .map(|(d, &s)| d * m[s])
        .sum::<f64>()
        / params.total_weight();
    let weights: Vec<f64> = params
        .weights
        .iter()
        .zip(&params.sigma)
        .map(|(d, &s)| f * d * m[s])
        .collect();
    let star = DcsbmParams { block, weights, ..params.clone() };

    for j in 0..k {
        let (a, b) = (star.b(i, j), star.b(l, j));
        if (a - b).abs() > 1e-10 * a.abs().max(b.abs()) {
            return Err(ModelError::Reparameterisation(format!("rows {i} and {l} differ at column {j}")));
        }
    }
    for u in 0..params.n {
        for v in u + 1..params.n {
            let (p, q) = (params.kernel(u, v), star.kernel(u, v));
            if (p - q).abs() > 1e-10 * p.abs().max(q.abs()) {
                return Err(ModelError::Reparameterisation(format!(
                    "probability at ({u},{v}) changed from {p} to {q}"
                )));
            }
        }
    }
    Ok(star)
}

/// Exact `E[D̂_u] = (D_u/(nD̄)) · (M_{σ_u} − D_u B[σ_u][σ_u])`.
pub fn expected_degree(params: &DcsbmParams, u: usize) -> f64 {
    let s = params.sigma[u];
    let m_s: f64 = (0..params.n).map(|l| params.weights[l] * params.b(s, params.sigma[l])).sum();
    expected_degree_with(params, u, m_s)
}

fn expected_degree_with(params: &DcsbmParams, u: usize, m_s: f64) -> f64 {
    let s = params.sigma[u];
    let d = params.weights[u];
    (d / params.total_weight()) * (m_s - d * params.b(s, s))
}

/// [`expected_degree`] for every vertex.
pub fn expected_degrees(params: &DcsbmParams) -> Vec<f64> {
    let agg = aggregates(params);
    (0..params.n).map(|u| expected_degree_with(params, u, agg.m[params.sigma[u]])).collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    fn uniform_model(n: usize, b: f64) -> DcsbmParams {
        DcsbmParams::new(vec![1.0], vec![b], vec![1.0; n], None).unwrap()
    }

    #[test]
    fn largest_remainder_sizes() {
        assert_eq!(block_sizes(&[1.0 / 3.0; 3], 1000), vec![334, 333, 333]);
        assert_eq!(block_sizes(&[0.5, 0.5], 7), vec![4, 3]);
        assert_eq!(block_sizes(&[0.25, 0.75], 8), vec![2, 6]);
    }

    #[test]
    fn small_valid_and_invalid() {
        let ok = uniform_model(4, 2.0);
        let report = validate(&ok);
        assert!(report.is_valid());
        assert_eq!(report.max_edge_probability, Some((0.5, 0, 1)));

        let bad = uniform_model(4, 5.0);
        let report = validate(&bad);
        assert_eq!(report.violations.len(), 1);
        assert_eq!(report.violations[0].to_string(), "edge probability 1.25 > 1 at (u,v)=(0,1)");
    }

    #[test]
    fn proportional_rows_are_flagged() {
        let p = DcsbmParams::new(vec![0.5, 0.5], vec![1.0, 2.0, 2.0, 4.0], vec![1.0; 10], None).unwrap();
        let report = validate(&p);
        assert!(report
            .advisories
            .iter()
            .any(|a| a.to_string() == "identifiability violated for pair (0,1)"));
    }

    #[test]
    fn shape_errors() {
        assert!(DcsbmParams::new(vec![], vec![], vec![1.0], None).is_err());
        assert!(DcsbmParams::new(vec![1.0], vec![1.0, 2.0], vec![1.0], None).is_err());
        assert!(DcsbmParams::new(vec![1.0], vec![1.0], vec![1.0; 2], Some(vec![0, 1])).is_err());
    }

    #[test]
    fn two_block_aggregates() {
        let (a, b) = (3.0, 0.5);
        let p = DcsbmParams::new(vec![0.5, 0.5], vec![a, b, b, a], vec![1.0; 4], Some(vec![0, 0, 1, 1])).unwrap();
        let agg = aggregates(&p);
        assert_eq!(agg.d_bar, 1.0);
        assert_eq!(agg.m[0], 2.0 * a + 2.0 * b);
        assert_eq!(agg.m_bar[0], (a + b) / 2.0);
        assert_eq!(agg.d_ratio, vec![1.0, 1.0]);
    }

    #[test]
    fn single_block_collapse() {
        let p = DcsbmParams::new(vec![1.0], vec![0.7], vec![0.3, 1.2, 2.0, 0.9, 1.1], None).unwrap();
        let agg = aggregates(&p);
        assert!((agg.m_bar[0] - 0.7).abs() < 1e-15);
    }

    #[test]
    fn edge_probability_cases() {
        let p = uniform_model(4, 2.0);
        assert_eq!(edge_probability(&p, 2, 2).unwrap(), 0.0);
        assert_eq!(edge_probability(&p, 0, 3).unwrap(), 0.5);
        let bad = uniform_model(4, 5.0);
        assert!(matches!(edge_probability(&bad, 0, 1), Err(ModelError::ProbabilityAboveOne { .. })));
    }

    #[test]
    fn eppm_probability_form() {
        let w = vec![1.0, 2.0, 0.5, 1.5];
        let (a, b) = (0.4, 0.1);
        let p = DcsbmParams::new(vec![0.5, 0.5], vec![a, b, b, a], w.clone(), None).unwrap();
        let nd = w.iter().sum::<f64>();
        assert!((edge_probability(&p, 0, 1).unwrap() - w[0] * w[1] / nd * a).abs() < 1e-15);
        assert!((edge_probability(&p, 1, 2).unwrap() - w[1] * w[2] / nd * b).abs() < 1e-15);
    }

    #[test]
    fn degenerate_samples() {
        let zero = DcsbmParams::new(vec![0.5, 0.5], vec![0.0; 4], vec![1.0; 6], None).unwrap();
        let g = sample_graph(&zero, 3).unwrap();
        assert_eq!(g.num_edges(), 0);

        let full = uniform_model(6, 6.0);
        let g = sample_graph(&full, 3).unwrap();
        assert_eq!(g.num_edges(), 15);
        assert!(g.degrees().iter().all(|&d| d == 5));
    }

    #[test]
    fn sampler_is_deterministic() {
        let p = DcsbmParams::new(vec![0.5, 0.5], vec![4.0, 1.0, 1.0, 4.0], vec![3.0; 200], None).unwrap();
        assert_eq!(sample_graph(&p, 11).unwrap(), sample_graph(&p, 11).unwrap());
        assert_ne!(sample_graph(&p, 11).unwrap(), sample_graph(&p, 12).unwrap());
    }

    #[test]
    fn expected_degree_small() {
        let p = uniform_model(4, 2.0);
        assert!((expected_degree(&p, 0) - 1.5).abs() < 1e-15);
        let z = DcsbmParams::new(vec![0.5, 0.5], vec![0.0, 0.0, 0.0, 1.0], vec![1.0; 4], None).unwrap();
        assert_eq!(expected_degree(&z, 0), 0.0);
        assert_eq!(expected_degrees(&p), vec![1.5; 4]);
    }

    #[test]
    fn reparameterisation_requires_unidentifiable_pair() {
        let p = DcsbmParams::new(vec![0.5, 0.5], vec![3.0, 1.0, 1.0, 3.0], vec![1.0; 10], None).unwrap();
        assert_eq!(reparameterize_equivalent(&p, 0, 1), Err(ModelError::Identifiable(0, 1)));
    }

    #[test]
    fn reparameterisation_single_block() {
        let p = DcsbmParams::new(vec![1.0], vec![0.5], vec![1.0, 2.0, 3.0, 1.5], None).unwrap();
        let star = reparameterize_equivalent(&p, 0, 0).unwrap();
        for u in 0..4 {
            for v in 0..4 {
                let (a, b) = (edge_probability(&p, u, v).unwrap(), edge_probability(&star, u, v).unwrap());
                assert!((a - b).abs() <= 1e-12 * a.max(b));
            }
        }
    }
}
