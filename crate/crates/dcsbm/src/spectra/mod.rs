//! Operators built from a graph or a model, and their spectra.
//!
//! Graph operators (`A`, `Ĥ`, `H`, `L_τ`) are sparse. Population operators
//! (`P`, `E[H]`, the expected normalised adjacency) are stored implicitly as
//! diagonally scaled block-constant matrices, so a product costs `O(nK)`
//! rather than `O(n²)`. Differences such as `Ĥ − P` are formed lazily with
//! [`SymMatrix::sub`].

mod alignment;
mod eigen;

use nalgebra::DMatrix;
use thiserror::Error;

use crate::model::{aggregates, expected_degrees, DcsbmParams, Graph};

pub use alignment::{alignment_report, AlignmentEntry, AlignmentReport, MERGE_TOL};
pub use eigen::{
    dense_full, dense_topk, eigen_gap, eigs_topk, lanczos_topk, merge_eigenvalues, sign_fix,
    spectral_radius, EigenSystem, DEFAULT_TOL, DENSE_FALLBACK,
};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum SpectraError {
    #[error("eigensolver did not converge after {iterations} iterations ({converged} of {requested} pairs converged)")]
    NoConvergence { iterations: usize, converged: usize, requested: usize },
    #[error("requested {k} eigenpairs of a {n}×{n} matrix")]
    BadCount { k: usize, n: usize },
    #[error("dimension mismatch: {0} vs {1}")]
    Dimension(usize, usize),
    #[error("all eigenvalues coincide; the gap is undefined")]
    DegenerateGap,
    #[error("vertex {0} has zero expected degree")]
    ZeroExpectedDegree(usize),
    #[error("community {0} has zero aggregate M̄")]
    ZeroAggregate(usize),
    #[error("vertex {0} is isolated; use tau > 0")]
    IsolatedVertex(usize),
    #[error("vector is not an eigenvector of Z (residual {0:e})")]
    NotEigenvector(f64),
    #[error("invalid argument: {0}")]
    Argument(String),
}

/// Compressed sparse rows holding both triangles of a symmetric matrix. Each
/// off-diagonal value is written to `(u,v)` and `(v,u)` from one number.
#[derive(Debug, Clone, PartialEq)]
pub struct CsrMatrix {
    n: usize,
    offsets: Vec<usize>,
    cols: Vec<usize>,
    vals: Vec<f64>,
}

impl CsrMatrix {
    /// Builds from upper-triangle triplets `(u, v, value)` with `u ≤ v`.
    /// Zero values are dropped.
    pub fn from_upper(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        let mut counts = vec![0usize; n];
        for &(u, v, x) in triplets {
            if x != 0.0 {
                counts[u] += 1;
                if u != v {
                    counts[v] += 1;
                }
            }
        }
        let mut offsets = Vec::with_capacity(n + 1);
        offsets.push(0);
        for c in &counts {
            offsets.push(offsets.last().unwrap() + c);
        }
        let nnz = *offsets.last().unwrap();
        let mut fill = offsets[..n].to_vec();
        let mut cols = vec![0; nnz];
        let mut vals = vec![0.0; nnz];
        for &(u, v, x) in triplets {
            if x == 0.0 {
                continue;
            }
            cols[fill[u]] = v;
            vals[fill[u]] = x;
            fill[u] += 1;
            if u != v {
                cols[fill[v]] = u;
                vals[fill[v]] = x;
                fill[v] += 1;
            }
        }
        for u in 0..n {
            let (a, b) = (offsets[u], offsets[u + 1]);
            let mut row: Vec<(usize, f64)> = cols[a..b].iter().copied().zip(vals[a..b].iter().copied()).collect();
            row.sort_by_key(|e| e.0);
            for (i, (c, x)) in row.into_iter().enumerate() {
                cols[a + i] = c;
                vals[a + i] = x;
            }
        }
        Self { n, offsets, cols, vals }
    }

    pub fn nnz(&self) -> usize {
        self.vals.len()
    }

    /// Column indices and values of row `u`.
    pub fn row(&self, u: usize) -> (&[usize], &[f64]) {
        let r = self.offsets[u]..self.offsets[u + 1];
        (&self.cols[r.clone()], &self.vals[r])
    }
}

/// Diagonally scaled block-constant matrix
/// `M[u][v] = s_u · s_v · Q[σ_u][σ_v]`, optionally with zero diagonal.
#[derive(Debug, Clone, PartialEq)]
pub struct BlockOperator {
    labels: Vec<usize>,
    k: usize,
    q: Vec<f64>,
    scale: Vec<f64>,
    zero_diagonal: bool,
}

impl BlockOperator {
    fn entry(&self, u: usize, v: usize) -> f64 {
        if u == v && self.zero_diagonal {
            return 0.0;
        }
        self.scale[u] * self.scale[v] * self.q[self.labels[u] * self.k + self.labels[v]]
    }

    fn matvec(&self, x: &[f64], y: &mut [f64]) {
        let mut t = vec![0.0; self.k];
        for (u, &xu) in x.iter().enumerate() {
            t[self.labels[u]] += self.scale[u] * xu;
        }
        for (u, yu) in y.iter_mut().enumerate() {
            let s = self.labels[u];
            let row = &self.q[s * self.k..(s + 1) * self.k];
            let mut acc: f64 = row.iter().zip(&t).map(|(a, b)| a * b).sum();
            if self.zero_diagonal {
                acc -= row[s] * self.scale[u] * x[u];
            }
            *yu = self.scale[u] * acc;
        }
    }
}

/// A real symmetric matrix.
#[derive(Debug, Clone, PartialEq)]
pub enum SymMatrix {
    Sparse(CsrMatrix),
    Dense(DMatrix<f64>),
    Block(BlockOperator),
    /// Lazy linear combination `Σ c_i M_i`.
    Combination(Vec<(f64, SymMatrix)>),
}

impl SymMatrix {
    /// Wraps a dense matrix after checking exact symmetry.
    pub fn dense(m: DMatrix<f64>) -> Result<Self, SpectraError> {
        if m.nrows() != m.ncols() {
            return Err(SpectraError::Dimension(m.nrows(), m.ncols()));
        }
        for i in 0..m.nrows() {
            for j in i + 1..m.ncols() {
                if m[(i, j)] != m[(j, i)] {
                    return Err(SpectraError::Argument(format!("matrix not symmetric at ({i},{j})")));
                }
            }
        }
        Ok(SymMatrix::Dense(m))
    }

    pub fn from_upper_triplets(n: usize, triplets: &[(usize, usize, f64)]) -> Self {
        SymMatrix::Sparse(CsrMatrix::from_upper(n, triplets))
    }

    pub fn n(&self) -> usize {
        match self {
            SymMatrix::Sparse(c) => c.n,
            SymMatrix::Dense(d) => d.nrows(),
            SymMatrix::Block(b) => b.labels.len(),
            SymMatrix::Combination(parts) => parts.first().map_or(0, |p| p.1.n()),
        }
    }

    /// `self − other`, evaluated lazily.
    pub fn sub(&self, other: &SymMatrix) -> Result<SymMatrix, SpectraError> {
        if self.n() != other.n() {
            return Err(SpectraError::Dimension(self.n(), other.n()));
        }
        Ok(SymMatrix::Combination(vec![(1.0, self.clone()), (-1.0, other.clone())]))
    }

    /// `y = M x`.
    pub fn matvec(&self, x: &[f64], y: &mut [f64]) {
        match self {
            SymMatrix::Sparse(c) => {
                for (u, yu) in y.iter_mut().enumerate() {
                    let (cols, vals) = c.row(u);
                    *yu = cols.iter().zip(vals).map(|(&v, a)| a * x[v]).sum();
                }
            }
            SymMatrix::Dense(d) => {
                for (u, yu) in y.iter_mut().enumerate() {
                    *yu = d.row(u).iter().zip(x).map(|(a, b)| a * b).sum();
                }
            }
            SymMatrix::Block(b) => b.matvec(x, y),
            SymMatrix::Combination(parts) => {
                y.iter_mut().for_each(|v| *v = 0.0);
                let mut tmp = vec![0.0; x.len()];
                for (c, m) in parts {
                    m.matvec(x, &mut tmp);
                    for (yi, ti) in y.iter_mut().zip(&tmp) {
                        *yi += c * ti;
                    }
                }
            }
        }
    }

    pub fn apply(&self, x: &[f64]) -> Vec<f64> {
        let mut y = vec![0.0; x.len()];
        self.matvec(x, &mut y);
        y
    }

    pub fn get(&self, u: usize, v: usize) -> f64 {
        match self {
            SymMatrix::Sparse(c) => {
                let (cols, vals) = c.row(u);
                cols.binary_search(&v).map_or(0.0, |i| vals[i])
            }
            SymMatrix::Dense(d) => d[(u, v)],
            SymMatrix::Block(b) => b.entry(u, v),
            SymMatrix::Combination(parts) => parts.iter().map(|(c, m)| c * m.get(u, v)).sum(),
        }
    }

    pub fn to_dense(&self) -> DMatrix<f64> {
        let n = self.n();
        match self {
            SymMatrix::Dense(d) => d.clone(),
            SymMatrix::Sparse(c) => {
                let mut d = DMatrix::zeros(n, n);
                for u in 0..n {
                    let (cols, vals) = c.row(u);
                    for (&v, &x) in cols.iter().zip(vals) {
                        d[(u, v)] = x;
                    }
                }
                d
            }
            SymMatrix::Block(b) => DMatrix::from_fn(n, n, |u, v| b.entry(u, v)),
            SymMatrix::Combination(parts) => {
                let mut d = DMatrix::zeros(n, n);
                for (c, m) in parts {
                    d += m.to_dense() * *c;
                }
                d
            }
        }
    }

    /// True when every stored entry is zero.
    pub fn is_zero(&self) -> bool {
        match self {
            SymMatrix::Sparse(c) => c.vals.iter().all(|&x| x == 0.0),
            SymMatrix::Dense(d) => d.iter().all(|&x| x == 0.0),
            SymMatrix::Block(b) => b.q.iter().all(|&x| x == 0.0) || b.scale.iter().all(|&x| x == 0.0),
            SymMatrix::Combination(parts) => parts.iter().all(|(c, m)| *c == 0.0 || m.is_zero()),
        }
    }

    /// Nonzero upper-triangle entries `(u, v, value)` with `u ≤ v`, in row order.
    pub fn upper_triplets(&self) -> Vec<(usize, usize, f64)> {
        let n = self.n();
        let mut out = Vec::new();
        match self {
            SymMatrix::Sparse(c) => {
                for u in 0..n {
                    let (cols, vals) = c.row(u);
                    for (&v, &x) in cols.iter().zip(vals) {
                        if v >= u {
                            out.push((u, v, x));
                        }
                    }
                }
            }
            _ => {
                let d = self.to_dense();
                for u in 0..n {
                    for v in u..n {
                        if d[(u, v)] != 0.0 {
                            out.push((u, v, d[(u, v)]));
                        }
                    }
                }
            }
        }
        out
    }

    /// Row sums `Σ_v M[u][v]`.
    pub fn row_sums(&self) -> Vec<f64> {
        self.apply(&vec![1.0; self.n()])
    }
}

fn edge_operator(graph: &Graph, value: impl Fn(usize, usize) -> f64) -> SymMatrix {
    let triplets: Vec<(usize, usize, f64)> = graph.edges().iter().map(|&(u, v)| (u, v, value(u, v))).collect();
    SymMatrix::from_upper_triplets(graph.n(), &triplets)
}

/// Adjacency matrix `A`.
pub fn adjacency(graph: &Graph) -> SymMatrix {
    edge_operator(graph, |_, _| 1.0)
}

/// Normalised adjacency `Ĥ[u][v] = A[u][v] / (D̂_u D̂_v)`.
pub fn normalized_adjacency(graph: &Graph) -> SymMatrix {
    let d = graph.degrees();
    edge_operator(graph, |u, v| 1.0 / (d[u] as f64 * d[v] as f64))
}

/// `A[u][v] / max(D̂_u D̂_v, floor)`.
pub fn inflated_normalized_adjacency(graph: &Graph, floor: f64) -> Result<SymMatrix, SpectraError> {
    if !(floor > 0.0) {
        return Err(SpectraError::Argument(format!("floor must be positive, got {floor}")));
    }
    let d = graph.degrees();
    Ok(edge_operator(graph, |u, v| 1.0 / (d[u] as f64 * d[v] as f64).max(floor)))
}

/// `H[u][v] = A[u][v] / (E[D̂_u] E[D̂_v])`.
pub fn model_normalized(graph: &Graph, params: &DcsbmParams) -> Result<SymMatrix, SpectraError> {
    if graph.n() != params.n() {
        return Err(SpectraError::Dimension(graph.n(), params.n()));
    }
    let e = expected_degrees(params);
    for &(u, v) in graph.edges() {
        for w in [u, v] {
            if e[w] <= 0.0 {
                return Err(SpectraError::ZeroExpectedDegree(w));
            }
        }
    }
    Ok(edge_operator(graph, |u, v| 1.0 / (e[u] * e[v])))
}

fn kernel_block(params: &DcsbmParams) -> Vec<f64> {
    let total = params.total_weight();
    params.block().iter().map(|b| b / total).collect()
}

/// `E[H][u][v] = P(u~v) / (E[D̂_u] E[D̂_v])` with zero diagonal.
pub fn expected_model_normalized(params: &DcsbmParams) -> Result<SymMatrix, SpectraError> {
    let e = expected_degrees(params);
    if let Some(u) = e.iter().position(|&x| x <= 0.0) {
        return Err(SpectraError::ZeroExpectedDegree(u));
    }
    let scale = params.weights().iter().zip(&e).map(|(d, e)| d / e).collect();
    Ok(SymMatrix::Block(BlockOperator {
        labels: params.sigma().to_vec(),
        k: params.k(),
        q: kernel_block(params),
        scale,
        zero_diagonal: true,
    }))
}

/// Expected normalised adjacency `E[D]^{-1/2} E[A] E[D]^{-1/2}` with
/// `E[D]` the exact expected degrees.
pub fn expected_laplacian(params: &DcsbmParams) -> Result<SymMatrix, SpectraError> {
    let e = expected_degrees(params);
    if let Some(u) = e.iter().position(|&x| x <= 0.0) {
        return Err(SpectraError::ZeroExpectedDegree(u));
    }
    let scale = params.weights().iter().zip(&e).map(|(d, e)| d / e.sqrt()).collect();
    Ok(SymMatrix::Block(BlockOperator {
        labels: params.sigma().to_vec(),
        k: params.k(),
        q: kernel_block(params),
        scale,
        zero_diagonal: true,
    }))
}

fn nonzero_m_bar(params: &DcsbmParams) -> Result<Vec<f64>, SpectraError> {
    let agg = aggregates(params);
    if let Some(i) = agg.m_bar.iter().position(|&m| m == 0.0) {
        return Err(SpectraError::ZeroAggregate(i));
    }
    Ok(agg.m_bar)
}

/// `P[u][v] = B[σ_u][σ_v] / (n D̄ M̄_{σ_u} M̄_{σ_v})`, diagonal included.
pub fn population_matrix(params: &DcsbmParams) -> Result<SymMatrix, SpectraError> {
    let m_bar = nonzero_m_bar(params)?;
    let k = params.k();
    let total = params.total_weight();
    let q = (0..k * k).map(|e| params.block()[e] / (total * m_bar[e / k] * m_bar[e % k])).collect();
    Ok(SymMatrix::Block(BlockOperator {
        labels: params.sigma().to_vec(),
        k,
        q,
        scale: vec![1.0; params.n()],
        zero_diagonal: false,
    }))
}

/// `Z[i][j] = α_j B[i][j] / (M̄_i M̄_j)`, where `α_j` is the realised
/// fraction `n_j / n`. It equals the nominal fraction whenever `α_j n` is
/// an integer, and it is the choice for which eigenpairs lift exactly to `P`.
pub fn block_matrix_z(params: &DcsbmParams) -> Result<DMatrix<f64>, SpectraError> {
    let m_bar = nonzero_m_bar(params)?;
    let alpha = params.realised_fractions();
    let k = params.k();
    Ok(DMatrix::from_fn(k, k, |i, j| alpha[j] * params.b(i, j) / (m_bar[i] * m_bar[j])))
}

/// Block form of the expected normalised adjacency for block-constant
/// weights: `Y[i][j] = B[i][j] √(d_i d_j / (M̄_i M̄_j)) / min_k d_k` with
/// `d_i = D̄_i / D̄`. Off-diagonal entries of `E[D]^{-1/2} E[A] E[D]^{-1/2}`
/// are proportional to `Y[σ_u][σ_v]` up to `O(1/n)`.
pub fn degree_block_matrix(params: &DcsbmParams) -> Result<DMatrix<f64>, SpectraError> {
    let agg = aggregates(params);
    if let Some(i) = agg.m_bar.iter().position(|&m| m == 0.0) {
        return Err(SpectraError::ZeroAggregate(i));
    }
    let d = &agg.d_ratio;
    let dmin = d.iter().copied().fold(f64::INFINITY, f64::min);
    let k = params.k();
    Ok(DMatrix::from_fn(k, k, |i, j| {
        params.b(i, j) * (d[i] * d[j] / (agg.m_bar[i] * agg.m_bar[j])).sqrt() / dmin
    }))
}

/// Real eigenpairs of `Z`, ordered by descending `|λ|`. `Z` is similar to
/// the symmetric `diag(√α) Q diag(√α)`, so its spectrum is real.
pub fn z_eigenpairs(params: &DcsbmParams) -> Result<Vec<(f64, Vec<f64>)>, SpectraError> {
    let m_bar = nonzero_m_bar(params)?;
    let alpha = params.realised_fractions();
    let k = params.k();
    let s = DMatrix::from_fn(k, k, |i, j| {
        alpha[i].sqrt() * alpha[j].sqrt() * params.b(i, j) / (m_bar[i] * m_bar[j])
    });
    let sys = dense_full(&SymMatrix::Dense(s));
    Ok(sys
        .values
        .iter()
        .zip(&sys.vectors)
        .map(|(&l, w)| {
            let mut y: Vec<f64> = w.iter().zip(&alpha).map(|(x, a)| x / a.sqrt()).collect();
            let norm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
            y.iter_mut().for_each(|v| *v /= norm);
            (l, y)
        })
        .collect())
}

/// Lifts an eigenpair `(y, λ)` of `Z` to `(w, λ/D̄)` with `w_u = y[σ_u]`,
/// and checks `‖Pw − (λ/D̄)w‖ ≤ 1e-8 ‖w‖`.
pub fn lift_z_eigenvector(
    params: &DcsbmParams,
    y: &[f64],
    lambda: f64,
) -> Result<(Vec<f64>, f64), SpectraError> {
    let z = block_matrix_z(params)?;
    if y.len() != z.nrows() {
        return Err(SpectraError::Dimension(y.len(), z.nrows()));
    }
    let ynorm = y.iter().map(|v| v * v).sum::<f64>().sqrt();
    let zy = &z * nalgebra::DVector::from_column_slice(y);
    let zres = zy.iter().zip(y).map(|(a, b)| (a - lambda * b).powi(2)).sum::<f64>().sqrt();
    if zres > 1e-8 * ynorm.max(f64::MIN_POSITIVE) {
        return Err(SpectraError::NotEigenvector(zres));
    }
    let w: Vec<f64> = params.sigma().iter().map(|&s| y[s]).collect();
    let mu = lambda / aggregates(params).d_bar;
    let pw = population_matrix(params)?.apply(&w);
    let res = pw.iter().zip(&w).map(|(a, b)| (a - mu * b).powi(2)).sum::<f64>().sqrt();
    let wnorm = w.iter().map(|v| v * v).sum::<f64>().sqrt();
    if res > 1e-8 * wnorm {
        return Err(SpectraError::NotEigenvector(res));
    }
    Ok((w, mu))
}

/// `D_τ^{-1/2} A D_τ^{-1/2}` with `D_τ = D + τI`. With `τ = 0` every vertex
/// must have an edge.
pub fn laplacian(graph: &Graph, tau: f64) -> Result<SymMatrix, SpectraError> {
    if !(tau >= 0.0) {
        return Err(SpectraError::Argument(format!("tau must be nonnegative, got {tau}")));
    }
    if tau == 0.0 {
        if let Some(u) = graph.degrees().iter().position(|&d| d == 0) {
            return Err(SpectraError::IsolatedVertex(u));
        }
    }
    let d: Vec<f64> = graph.degrees().iter().map(|&d| d as f64 + tau).collect();
    Ok(edge_operator(graph, |u, v| 1.0 / (d[u] * d[v]).sqrt()))
}

/// `I − D_τ^{-1/2} A D_τ^{-1/2}`.
pub fn normalized_laplacian(graph: &Graph, tau: f64) -> Result<SymMatrix, SpectraError> {
    let l = laplacian(graph, tau)?;
    let mut triplets: Vec<(usize, usize, f64)> = l.upper_triplets().into_iter().map(|(u, v, x)| (u, v, -x)).collect();
    triplets.extend((0..graph.n()).map(|u| (u, u, 1.0)));
    Ok(SymMatrix::from_upper_triplets(graph.n(), &triplets))
}

#[cfg(test)]
mod tests {
    use super::*;

    fn path3() -> Graph {
        Graph::from_edges(3, &[(0, 1), (1, 2)]).unwrap()
    }

    fn star(k: usize) -> Graph {
        let edges: Vec<(usize, usize)> = (1..=k).map(|v| (0, v)).collect();
        Graph::from_edges(k + 1, &edges).unwrap()
    }

    #[test]
    fn adjacency_cases() {
        let a = adjacency(&path3());
        assert_eq!(a.get(0, 1), 1.0);
        assert_eq!(a.get(2, 1), 1.0);
        assert_eq!(a.get(0, 2), 0.0);
        assert!(adjacency(&Graph::empty(4)).is_zero());
        assert_eq!(adjacency(&star(3)).row_sums(), vec![3.0, 1.0, 1.0, 1.0]);
    }

    #[test]
    fn normalized_path() {
        let h = normalized_adjacency(&path3()).to_dense();
        let expect = DMatrix::from_row_slice(3, 3, &[0.0, 0.5, 0.0, 0.5, 0.0, 0.5, 0.0, 0.5, 0.0]);
        assert_eq!(h, expect);
        let e = normalized_adjacency(&Graph::from_edges(2, &[(0, 1)]).unwrap());
        assert_eq!(e.to_dense(), DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
    }

    #[test]
    fn inflation_floor() {
        let g = Graph::from_edges(2, &[(0, 1)]).unwrap();
        assert_eq!(inflated_normalized_adjacency(&g, 200.0).unwrap().get(0, 1), 1.0 / 200.0);
        let p = path3();
        assert_eq!(inflated_normalized_adjacency(&p, 1.0).unwrap(), normalized_adjacency(&p));
        let a = inflated_normalized_adjacency(&p, 10.0).unwrap().get(0, 1);
        let b = inflated_normalized_adjacency(&p, 1000.0).unwrap().get(0, 1);
        assert!(b < a);
        assert!(inflated_normalized_adjacency(&p, 0.0).is_err());
    }

    #[test]
    fn laplacian_forms() {
        let e = laplacian(&Graph::from_edges(2, &[(0, 1)]).unwrap(), 0.0).unwrap();
        assert_eq!(e.get(0, 1), 1.0);
        let l = laplacian(&path3(), 0.0).unwrap();
        assert!((l.get(0, 1) - 0.5f64.sqrt()).abs() < 1e-15);
        let nl = normalized_laplacian(&path3(), 0.0).unwrap();
        assert_eq!(nl.get(1, 1), 1.0);
        assert_eq!(nl.get(0, 1), -l.get(0, 1));
        assert!(matches!(laplacian(&Graph::empty(2), 0.0), Err(SpectraError::IsolatedVertex(0))));
        let small = laplacian(&path3(), 1.0).unwrap().get(0, 1);
        let smaller = laplacian(&path3(), 100.0).unwrap().get(0, 1);
        assert!(smaller < small && small < l.get(0, 1));
    }

    #[test]
    fn block_operator_matches_dense() {
        let p = DcsbmParams::new(vec![0.5, 0.5], vec![2.0, 1.0, 1.0, 3.0], vec![1.0, 2.0, 1.5, 0.5, 1.0, 2.5], None)
            .unwrap();
        for op in [population_matrix(&p).unwrap(), expected_model_normalized(&p).unwrap()] {
            let d = op.to_dense();
            let x: Vec<f64> = (0..6).map(|i| (i as f64 * 0.7).sin()).collect();
            let y = op.apply(&x);
            let yd = &d * nalgebra::DVector::from_vec(x.clone());
            for i in 0..6 {
                assert!((y[i] - yd[i]).abs() < 1e-14);
            }
        }
    }

    #[test]
    fn expected_h_diagonal_zero_and_nonnegative() {
        let p = DcsbmParams::new(vec![1.0], vec![0.5], vec![1.0, 2.0, 3.0, 4.0], None).unwrap();
        let eh = expected_model_normalized(&p).unwrap().to_dense();
        for u in 0..4 {
            assert_eq!(eh[(u, u)], 0.0);
            for v in 0..4 {
                assert!(eh[(u, v)] >= 0.0);
            }
        }
        let uniform = DcsbmParams::new(vec![1.0], vec![0.5], vec![1.0; 5], None).unwrap();
        let eh = expected_model_normalized(&uniform).unwrap().to_dense();
        assert!((eh[(0, 1)] - eh[(3, 4)]).abs() < 1e-16);
    }

    #[test]
    fn population_rows_repeat_within_blocks() {
        let p = DcsbmParams::new(vec![0.5, 0.5], vec![2.0, 1.0, 1.0, 3.0], vec![1.0, 2.0, 1.5, 0.5], None).unwrap();
        let pm = population_matrix(&p).unwrap().to_dense();
        assert_eq!(pm.row(0), pm.row(1));
        assert_eq!(pm.row(2), pm.row(3));
    }

    #[test]
    fn z_scalar_case() {
        let p = DcsbmParams::new(vec![1.0], vec![0.8], vec![1.0, 2.0, 3.0], None).unwrap();
        let z = block_matrix_z(&p).unwrap();
        assert!((z[(0, 0)] - 1.0 / 0.8).abs() < 1e-14);
        let (w, mu) = lift_z_eigenvector(&p, &[1.0], z[(0, 0)]).unwrap();
        assert_eq!(w, vec![1.0; 3]);
        assert!((mu - z[(0, 0)] / 2.0).abs() < 1e-14);
        assert!(lift_z_eigenvector(&p, &[1.0], 2.0 * z[(0, 0)]).is_err());
    }

    #[test]
    fn model_normalized_requires_expected_degree() {
        let p = DcsbmParams::new(vec![0.5, 0.5], vec![0.0, 0.0, 0.0, 1.0], vec![1.0; 4], None).unwrap();
        let g = Graph::from_edges(4, &[(0, 1)]).unwrap();
        assert!(matches!(model_normalized(&g, &p), Err(SpectraError::ZeroExpectedDegree(0))));
        assert!(model_normalized(&Graph::empty(4), &p).unwrap().is_zero());
    }
}
