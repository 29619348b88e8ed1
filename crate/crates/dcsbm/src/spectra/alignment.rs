use super::eigen::{dense_full, eigen_gap};
use super::{SpectraError, SymMatrix};

/// Eigenvalues closer than this are treated as one eigenvalue.
pub const MERGE_TOL: f64 = 1e-9;

const WEYL_SLACK: f64 = 1e-10;

/// Diagnostics for index `i` with eigenvalues sorted in descending order.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentEntry {
    /// `λ_i`, eigenvalue of `A + δA`.
    pub lambda: f64,
    /// `μ_i`, eigenvalue of `A`.
    pub mu: f64,
    /// `|λ_i − μ_i|`.
    pub eigenvalue_shift: f64,
    /// `|λ_i − μ_i| ≤ ρ(δA)` up to 1e-10.
    pub weyl_holds: bool,
    /// Dimension of the `λ_i`-eigenspace of `A + δA`.
    pub perturbed_dim: usize,
    /// Dimension of the `μ_i`-eigenspace of `A`.
    pub unperturbed_dim: usize,
    pub dimension_holds: bool,
    /// Largest `v_i · v̂` over unit `v̂` in the `μ_i`-eigenspace of `A`.
    pub best_dot: f64,
    /// `best_dot ≥ bound` (meaningful only when the hypothesis holds).
    pub dot_holds: bool,
}

/// Perturbation diagnostics comparing the spectra of `A` and `A + δA`.
#[derive(Debug, Clone, PartialEq)]
pub struct AlignmentReport {
    pub entries: Vec<AlignmentEntry>,
    /// `ρ(δA)`.
    pub rho_delta: f64,
    /// `Δ(A)`, the minimum gap between distinct eigenvalues of `A`.
    pub gap: f64,
    /// `√(1 − (ρ(δA)/(Δ/2))²)`, present when `ρ(δA) < Δ/2`.
    pub bound: Option<f64>,
}

impl AlignmentReport {
    /// `ρ(δA) < Δ/2`.
    pub fn hypothesis_holds(&self) -> bool {
        self.bound.is_some()
    }

    pub fn weyl_holds(&self) -> bool {
        self.entries.iter().all(|e| e.weyl_holds)
    }

    pub fn dimension_holds(&self) -> bool {
        self.entries.iter().all(|e| e.dimension_holds)
    }

    pub fn dot_holds(&self) -> bool {
        self.entries.iter().all(|e| e.dot_holds)
    }
}

/// Eigenvalues in descending signed order with matching vectors.
fn descending(m: &SymMatrix) -> Vec<(f64, Vec<f64>)> {
    let sys = dense_full(m);
    let mut pairs: Vec<(f64, Vec<f64>)> = sys.values.into_iter().zip(sys.vectors).collect();
    pairs.sort_by(|a, b| b.0.total_cmp(&a.0));
    pairs
}

/// Group id per position of a descending list, starting a new group whenever
/// consecutive values differ by more than [`MERGE_TOL`].
fn group_ids(values: &[f64]) -> Vec<usize> {
    let mut ids = Vec::with_capacity(values.len());
    for (i, v) in values.iter().enumerate() {
        let id = match i {
            0 => 0,
            _ if values[i - 1] - v <= MERGE_TOL => ids[i - 1],
            _ => ids[i - 1] + 1,
        };
        ids.push(id);
    }
    ids
}

/// Compares `A` with `A + δA` index by index using dense spectra.
///
/// When `A` has a single distinct eigenvalue the gap is infinite, so the
/// bound is 1 and the eigenspace is the whole space.
pub fn alignment_report(a: &SymMatrix, delta: &SymMatrix) -> Result<AlignmentReport, SpectraError> {
    if a.n() != delta.n() {
        return Err(SpectraError::Dimension(a.n(), delta.n()));
    }
    let n = a.n();
    let sum = SymMatrix::Combination(vec![(1.0, a.clone()), (1.0, delta.clone())]);
    let mu = descending(a);
    let lam = descending(&sum);
    let rho_delta = dense_full(delta).values.first().map_or(0.0, |v| v.abs());
    let mu_values: Vec<f64> = mu.iter().map(|p| p.0).collect();
    let lam_values: Vec<f64> = lam.iter().map(|p| p.0).collect();
    let gap = match eigen_gap(&mu_values) {
        Ok(g) => g,
        Err(SpectraError::DegenerateGap) => f64::INFINITY,
        Err(e) => return Err(e),
    };
    let bound = (rho_delta < gap / 2.0).then(|| (1.0 - (rho_delta / (gap / 2.0)).powi(2)).sqrt());

    let mu_groups = group_ids(&mu_values);
    let lam_groups = group_ids(&lam_values);
    let mut entries = Vec::with_capacity(n);
    for i in 0..n {
        let (l, v) = (&lam[i].0, &lam[i].1);
        let m = mu[i].0;
        let members: Vec<&Vec<f64>> = (0..n).filter(|&j| mu_groups[j] == mu_groups[i]).map(|j| &mu[j].1).collect();
        let proj2: f64 = members
            .iter()
            .map(|w| w.iter().zip(v).map(|(a, b)| a * b).sum::<f64>().powi(2))
            .sum();
        let best_dot = proj2.sqrt().min(1.0);
        let shift = (l - m).abs();
        let perturbed_dim = lam_groups.iter().filter(|&&g| g == lam_groups[i]).count();
        let unperturbed_dim = members.len();
        entries.push(AlignmentEntry {
            lambda: *l,
            mu: m,
            eigenvalue_shift: shift,
            weyl_holds: shift <= rho_delta + WEYL_SLACK,
            perturbed_dim,
            unperturbed_dim,
            dimension_holds: perturbed_dim <= unperturbed_dim,
            best_dot,
            dot_holds: bound.is_none_or(|b| best_dot >= b - WEYL_SLACK),
        });
    }
    Ok(AlignmentReport { entries, rho_delta, gap, bound })
}
