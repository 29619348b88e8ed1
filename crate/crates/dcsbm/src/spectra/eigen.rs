use nalgebra::{DMatrix, SymmetricEigen};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use super::{SpectraError, SymMatrix};

/// Default residual tolerance for eigenpairs.
pub const DEFAULT_TOL: f64 = 1e-10;

/// Matrices up to this dimension are solved densely by [`eigs_topk`].
pub const DENSE_FALLBACK: usize = 512;

/// Eigenpairs ordered by descending `|λ|`, ties broken by descending `λ`.
/// Each vector has unit norm and its largest-magnitude entry is positive.
#[derive(Debug, Clone, PartialEq)]
pub struct EigenSystem {
    pub values: Vec<f64>,
    pub vectors: Vec<Vec<f64>>,
    pub residuals: Vec<f64>,
}

impl EigenSystem {
    pub fn len(&self) -> usize {
        self.values.len()
    }

    pub fn is_empty(&self) -> bool {
        self.values.is_empty()
    }

    pub fn vector(&self, i: usize) -> &[f64] {
        &self.vectors[i]
    }

    fn from_pairs(mut pairs: Vec<(f64, Vec<f64>)>, m: &SymMatrix) -> Self {
        order_by_magnitude(&mut pairs, |p| p.0);
        let mut out = EigenSystem { values: Vec::new(), vectors: Vec::new(), residuals: Vec::new() };
        for (l, mut x) in pairs {
            sign_fix(&mut x);
            out.residuals.push(residual(m, l, &x));
            out.values.push(l);
            out.vectors.push(x);
        }
        out
    }
}

/// Sorts by descending `|λ|`. Runs of magnitudes that agree to a relative
/// 1e-12 count as ties and are ordered by descending signed `λ`.
pub(crate) fn order_by_magnitude<T>(items: &mut [T], value: impl Fn(&T) -> f64) {
    items.sort_by(|a, b| value(b).abs().total_cmp(&value(a).abs()));
    let mut start = 0;
    for i in 1..=items.len() {
        let tied = i < items.len() && {
            let (p, q) = (value(&items[i - 1]).abs(), value(&items[i]).abs());
            p - q <= 1e-12 * p
        };
        if !tied {
            items[start..i].sort_by(|a, b| value(b).total_cmp(&value(a)));
            start = i;
        }
    }
}

/// Flips `x` so that its entry of largest magnitude is positive. Entries
/// within a relative 1e-9 of the maximum count as tied, and the lowest index
/// among them decides.
pub fn sign_fix(x: &mut [f64]) {
    let max = x.iter().fold(0.0f64, |m, v| m.max(v.abs()));
    if max == 0.0 {
        return;
    }
    let lead = x.iter().position(|v| v.abs() >= max * (1.0 - 1e-9)).unwrap();
    if x[lead] < 0.0 {
        x.iter_mut().for_each(|v| *v = -*v);
    }
}

fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}

fn axpy(alpha: f64, x: &[f64], y: &mut [f64]) {
    for (yi, xi) in y.iter_mut().zip(x) {
        *yi += alpha * xi;
    }
}

fn residual(m: &SymMatrix, lambda: f64, x: &[f64]) -> f64 {
    let mut y = m.apply(x);
    axpy(-lambda, x, &mut y);
    norm(&y)
}

/// Complete spectrum by a dense symmetric solve.
pub fn dense_full(m: &SymMatrix) -> EigenSystem {
    let n = m.n();
    let eig = SymmetricEigen::new(m.to_dense());
    let pairs = (0..n).map(|i| (eig.eigenvalues[i], eig.eigenvectors.column(i).iter().copied().collect())).collect();
    EigenSystem::from_pairs(pairs, m)
}

/// Top `k` eigenpairs by `|λ|` from a dense solve.
pub fn dense_topk(m: &SymMatrix, k: usize) -> Result<EigenSystem, SpectraError> {
    check_count(m, k)?;
    let mut sys = dense_full(m);
    sys.values.truncate(k);
    sys.vectors.truncate(k);
    sys.residuals.truncate(k);
    Ok(sys)
}

fn check_count(m: &SymMatrix, k: usize) -> Result<(), SpectraError> {
    if k == 0 || k > m.n() {
        Err(SpectraError::BadCount { k, n: m.n() })
    } else {
        Ok(())
    }
}

/// Top `k` eigenpairs by `|λ|`; dense for `n ≤ 512`, Lanczos above.
pub fn eigs_topk(m: &SymMatrix, k: usize, tol: f64, max_iter: usize) -> Result<EigenSystem, SpectraError> {
    if m.n() <= DENSE_FALLBACK {
        dense_topk(m, k)
    } else {
        lanczos_topk(m, k, tol, max_iter)
    }
}

/// Largest `|λ|`, via `eigs_topk` with `k = 1`.
pub fn spectral_radius(m: &SymMatrix, tol: f64) -> Result<f64, SpectraError> {
    if m.n() == 0 {
        return Ok(0.0);
    }
    Ok(eigs_topk(m, 1, tol, 10 * m.n())?.values[0].abs())
}

/// Groups sorted-descending eigenvalues into runs whose consecutive members
/// differ by at most `tol`. Returns `(representative, multiplicity)` pairs,
/// the representative being the run's mean.
pub fn merge_eigenvalues(values: &[f64], tol: f64) -> Vec<(f64, usize)> {
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| b.total_cmp(a));
    let mut groups: Vec<(f64, usize, f64)> = Vec::new();
    for v in sorted {
        match groups.last_mut() {
            Some((sum, count, last)) if *last - v <= tol => {
                *sum += v;
                *count += 1;
                *last = v;
            }
            _ => groups.push((v, 1, v)),
        }
    }
    groups.into_iter().map(|(s, c, _)| (s / c as f64, c)).collect()
}

/// Smallest gap between distinct eigenvalues, after merging values within 1e-9.
pub fn eigen_gap(values: &[f64]) -> Result<f64, SpectraError> {
    let groups = merge_eigenvalues(values, super::MERGE_TOL);
    groups
        .windows(2)
        .map(|w| w[0].0 - w[1].0)
        .min_by(f64::total_cmp)
        .ok_or(SpectraError::DegenerateGap)
}

/// Shared iteration budget across Lanczos runs.
struct Budget {
    used: usize,
    max: usize,
}

/// Top `k` eigenpairs by `|λ|` using Lanczos with full reorthogonalisation.
///
/// Converged pairs are locked and the next run works in their orthogonal
/// complement. Once `k` pairs are locked, one more run checks that the
/// complement holds nothing larger in magnitude than the `k`-th pair, which
/// catches eigenvalues a single Krylov sequence misses because of
/// multiplicity. Residuals satisfy `‖Mx − λx‖ ≤ max(tol, 1e-12·|λ_1|)`.
pub fn lanczos_topk(m: &SymMatrix, k: usize, tol: f64, max_iter: usize) -> Result<EigenSystem, SpectraError> {
    check_count(m, k)?;
    let n = m.n();
    if m.is_zero() {
        let pairs = (0..k)
            .map(|i| {
                let mut e = vec![0.0; n];
                e[i] = 1.0;
                (0.0, e)
            })
            .collect();
        return Ok(EigenSystem::from_pairs(pairs, m));
    }
    let mut budget = Budget { used: 0, max: max_iter.max(k) };
    let mut locked: Vec<(f64, Vec<f64>)> = Vec::new();
    let mut run = 0u64;
    loop {
        let want = if locked.len() >= k { 1 } else { k - locked.len() };
        let found = lanczos_run(m, &locked, want, tol, run, &mut budget).map_err(|used| {
            SpectraError::NoConvergence { iterations: used, converged: locked.len().min(k), requested: k }
        })?;
        run += 1;
        if locked.len() >= k {
            let mut mags: Vec<f64> = locked.iter().map(|p| p.0.abs()).collect();
            mags.sort_by(|a, b| b.total_cmp(a));
            let kth = mags[k - 1];
            match found.into_iter().next() {
                Some(p) if p.0.abs() > kth * (1.0 + 1e-12) + tol => locked.push(p),
                _ => break,
            }
        } else if found.is_empty() {
            break;
        } else {
            locked.extend(found);
        }
        if locked.len() >= n {
            break;
        }
    }
    let mut sys = EigenSystem::from_pairs(locked, m);
    sys.values.truncate(k);
    sys.vectors.truncate(k);
    sys.residuals.truncate(k);
    Ok(sys)
}

fn random_unit(n: usize, rng: &mut ChaCha8Rng, against: &[&[f64]]) -> Option<Vec<f64>> {
    for _ in 0..4 {
        let mut v: Vec<f64> = (0..n).map(|_| rng.random::<f64>() - 0.5).collect();
        for _ in 0..2 {
            for q in against {
                let c = dot(q, &v);
                axpy(-c, q, &mut v);
            }
        }
        let nv = norm(&v);
        if nv > 1e-8 {
            v.iter_mut().for_each(|x| *x /= nv);
            return Some(v);
        }
    }
    None
}

/// Lanczos basis with its tridiagonal coefficients.
struct Krylov {
    basis: Vec<Vec<f64>>,
    alpha: Vec<f64>,
    beta: Vec<f64>,
}

impl Krylov {
    /// Ritz decomposition with indices ordered by descending `|θ|`.
    fn ritz(&self) -> (SymmetricEigen<f64, nalgebra::Dyn>, Vec<usize>) {
        let dim = self.alpha.len();
        let t = DMatrix::from_fn(dim, dim, |r, c| {
            if r == c {
                self.alpha[r]
            } else if r + 1 == c {
                self.beta[r]
            } else if c + 1 == r {
                self.beta[c]
            } else {
                0.0
            }
        });
        let eig = SymmetricEigen::new(t);
        let mut order: Vec<usize> = (0..dim).collect();
        order.sort_by(|&x, &y| {
            let (tx, ty) = (eig.eigenvalues[x], eig.eigenvalues[y]);
            ty.abs().total_cmp(&tx.abs()).then(ty.total_cmp(&tx))
        });
        (eig, order)
    }

    fn ritz_vector(&self, eig: &SymmetricEigen<f64, nalgebra::Dyn>, i: usize) -> Vec<f64> {
        let mut x = vec![0.0; self.basis[0].len()];
        for (r, q) in self.basis.iter().enumerate().take(self.alpha.len()) {
            axpy(eig.eigenvectors[(r, i)], q, &mut x);
        }
        let nx = norm(&x);
        x.iter_mut().for_each(|v| *v /= nx);
        x
    }
}

/// One Lanczos sequence in the complement of `locked`. Returns the top `want`
/// converged Ritz pairs by `|θ|` (fewer if the complement is exhausted), or
/// `Err(iterations)` when the budget runs out.
fn lanczos_run(
    m: &SymMatrix,
    locked: &[(f64, Vec<f64>)],
    want: usize,
    tol: f64,
    run: u64,
    budget: &mut Budget,
) -> Result<Vec<(f64, Vec<f64>)>, usize> {
    let n = m.n();
    let mut rng = ChaCha8Rng::seed_from_u64(0x6c61_6e63_7a6f_7300 ^ run);
    let locked_vecs: Vec<&[f64]> = locked.iter().map(|p| p.1.as_slice()).collect();
    let Some(q0) = random_unit(n, &mut rng, &locked_vecs) else {
        return Ok(Vec::new());
    };
    let mut kr = Krylov { basis: vec![q0], alpha: Vec::new(), beta: Vec::new() };
    let mut scale = 0.0f64;
    let mut w = vec![0.0; n];

    loop {
        let j = kr.basis.len() - 1;
        m.matvec(&kr.basis[j], &mut w);
        budget.used += 1;
        let a = dot(&kr.basis[j], &w);
        kr.alpha.push(a);
        for _ in 0..2 {
            for q in locked_vecs.iter().copied().chain(kr.basis.iter().map(|b| b.as_slice())) {
                let c = dot(q, &w);
                axpy(-c, q, &mut w);
            }
        }
        let b = norm(&w);
        scale = scale.max(a.abs()).max(b);
        let dim = kr.basis.len();
        let breakdown = b <= 1e-13 * scale.max(f64::MIN_POSITIVE);

        if breakdown && dim >= want {
            // The Krylov space is invariant, so its Ritz pairs are exact. Any
            // larger eigenvalue outside it is found by the verification run.
            let (eig, order) = kr.ritz();
            return Ok(order.iter().take(want).map(|&i| (eig.eigenvalues[i], kr.ritz_vector(&eig, i))).collect());
        }
        let restart = if breakdown || dim + locked.len() >= n {
            let mut against = locked_vecs.clone();
            against.extend(kr.basis.iter().map(|q| q.as_slice()));
            match (dim + locked.len() < n).then(|| random_unit(n, &mut rng, &against)).flatten() {
                Some(v) => Some(v),
                None => {
                    // The complement is exhausted, so every Ritz pair is exact.
                    let (eig, order) = kr.ritz();
                    return Ok(order
                        .iter()
                        .take(want)
                        .map(|&i| (eig.eigenvalues[i], kr.ritz_vector(&eig, i)))
                        .collect());
                }
            }
        } else {
            None
        };

        let check = restart.is_none() && dim >= want && (dim <= 40 || dim % 4 == 0 || budget.used >= budget.max);
        if check {
            let (eig, order) = kr.ritz();
            let top = &order[..want];
            let eff_tol = tol.max(1e-12 * eig.eigenvalues[order[0]].abs());
            if top.iter().all(|&i| (b * eig.eigenvectors[(dim - 1, i)]).abs() <= eff_tol) {
                let pairs: Vec<(f64, Vec<f64>)> =
                    top.iter().map(|&i| (eig.eigenvalues[i], kr.ritz_vector(&eig, i))).collect();
                if pairs.iter().all(|(t, x)| residual(m, *t, x) <= 10.0 * eff_tol) {
                    return Ok(pairs);
                }
            }
        }
        if budget.used >= budget.max {
            return Err(budget.used);
        }
        match restart {
            Some(v) => {
                kr.beta.push(0.0);
                kr.basis.push(v);
            }
            None => {
                kr.beta.push(b);
                kr.basis.push(w.iter().map(|v| v / b).collect());
            }
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::Graph;
    use crate::spectra::{adjacency, normalized_adjacency};

    #[test]
    fn diagonal_matrix() {
        let m = SymMatrix::Dense(DMatrix::from_diagonal(&nalgebra::DVector::from_vec(vec![1.0, 3.0, 2.0])));
        for sys in [dense_topk(&m, 3).unwrap(), lanczos_topk(&m, 3, DEFAULT_TOL, 100).unwrap()] {
            assert_eq!(sys.values.len(), 3);
            for (got, want) in sys.values.iter().zip([3.0, 2.0, 1.0]) {
                assert!((got - want).abs() < 1e-12);
            }
            assert!((sys.vectors[0][1] - 1.0).abs() < 1e-12);
            assert!((sys.vectors[1][2] - 1.0).abs() < 1e-12);
            assert!((sys.vectors[2][0] - 1.0).abs() < 1e-12);
        }
    }

    #[test]
    fn star_normalized_top_pair() {
        let g = Graph::from_edges(5, &[(0, 1), (0, 2), (0, 3), (0, 4)]).unwrap();
        let h = normalized_adjacency(&g);
        for sys in [dense_topk(&h, 2).unwrap(), lanczos_topk(&h, 2, DEFAULT_TOL, 100).unwrap()] {
            assert!((sys.values[0] - 0.5).abs() < 1e-12, "{:?}", sys.values);
            assert!((sys.values[1] + 0.5).abs() < 1e-12);
        }
    }

    #[test]
    fn repeated_eigenvalues_are_all_found() {
        // K_6 has eigenvalue -1 with multiplicity 5.
        let a = adjacency(&Graph::complete(6));
        let sys = lanczos_topk(&a, 4, DEFAULT_TOL, 200).unwrap();
        assert!((sys.values[0] - 5.0).abs() < 1e-10);
        for v in &sys.values[1..] {
            assert!((v + 1.0).abs() < 1e-10);
        }
        for i in 0..4 {
            for j in 0..4 {
                let d = dot(&sys.vectors[i], &sys.vectors[j]);
                assert!((d - if i == j { 1.0 } else { 0.0 }).abs() < 1e-8);
            }
        }
    }

    #[test]
    fn zero_and_tiny_matrices() {
        let z = SymMatrix::Dense(DMatrix::zeros(4, 4));
        assert_eq!(spectral_radius(&z, DEFAULT_TOL).unwrap(), 0.0);
        assert_eq!(lanczos_topk(&z, 2, DEFAULT_TOL, 10).unwrap().values, vec![0.0, 0.0]);
        let x = SymMatrix::Dense(DMatrix::from_row_slice(2, 2, &[0.0, 1.0, 1.0, 0.0]));
        assert!((spectral_radius(&x, DEFAULT_TOL).unwrap() - 1.0).abs() < 1e-14);
        assert!(matches!(dense_topk(&x, 3), Err(SpectraError::BadCount { .. })));
        assert!(matches!(lanczos_topk(&x, 0, DEFAULT_TOL, 10), Err(SpectraError::BadCount { .. })));
    }

    #[test]
    fn sign_convention() {
        let mut x = vec![0.1, -0.9, 0.3];
        sign_fix(&mut x);
        assert_eq!(x, vec![-0.1, 0.9, -0.3]);
        let mut tie = vec![-0.5, 0.5, 0.1];
        sign_fix(&mut tie);
        assert_eq!(tie, vec![0.5, -0.5, -0.1]);
    }

    #[test]
    fn low_rank_operator_converges_fast() {
        // J − I: the Krylov space of any start vector is invariant after two steps.
        let a = adjacency(&Graph::complete(600));
        let sys = lanczos_topk(&a, 2, DEFAULT_TOL, 50).unwrap();
        assert!((sys.values[0] - 599.0).abs() < 1e-9);
        assert!((sys.values[1] + 1.0).abs() < 1e-9);
    }

    #[test]
    fn gaps() {
        assert_eq!(eigen_gap(&[1.0, 1.0, 0.0]).unwrap(), 1.0);
        assert_eq!(eigen_gap(&[2.5, 0.0, 0.0, 0.0]).unwrap(), 2.5);
        assert!((eigen_gap(&[3.0, 1.0 + 1e-12, 1.0, 0.2]).unwrap() - 0.8).abs() < 1e-9);
        assert_eq!(eigen_gap(&[4.0, 4.0]), Err(SpectraError::DegenerateGap));
    }

    #[test]
    fn budget_exhaustion_is_reported() {
        let path: Vec<(usize, usize)> = (0..199).map(|u| (u, u + 1)).collect();
        let a = adjacency(&Graph::from_edges(200, &path).unwrap());
        assert!(matches!(lanczos_topk(&a, 5, 1e-14, 3), Err(SpectraError::NoConvergence { .. })));
    }
}
