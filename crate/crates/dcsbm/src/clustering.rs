//! Community assignments.

use thiserror::Error;

#[derive(Debug, Clone, PartialEq, Error)]
pub enum ClusteringError {
    #[error("label {label} at vertex {vertex} is not below the cluster count {count}")]
    LabelOutOfRange { vertex: usize, label: usize, count: usize },
    #[error("cluster {0} is empty")]
    EmptyCluster(usize),
    #[error("{0} centres given for {1} clusters")]
    CentreCount(usize, usize),
}

/// Per-vertex community labels, with `None` marking unassigned vertices.
#[derive(Debug, Clone, PartialEq)]
pub struct Clustering {
    labels: Vec<Option<usize>>,
    count: usize,
    centres: Vec<Vec<f64>>,
    degenerate: bool,
}

impl Clustering {
    /// Checks that every label is below `count` and every cluster is
    /// nonempty. `centres` may be empty, or hold one point per cluster.
    pub fn new(labels: Vec<Option<usize>>, count: usize, centres: Vec<Vec<f64>>) -> Result<Self, ClusteringError> {
        let mut sizes = vec![0usize; count];
        for (vertex, l) in labels.iter().enumerate() {
            if let Some(label) = *l {
                if label >= count {
                    return Err(ClusteringError::LabelOutOfRange { vertex, label, count });
                }
                sizes[label] += 1;
            }
        }
        if let Some(c) = sizes.iter().position(|&s| s == 0) {
            return Err(ClusteringError::EmptyCluster(c));
        }
        if !centres.is_empty() && centres.len() != count {
            return Err(ClusteringError::CentreCount(centres.len(), count));
        }
        Ok(Self { labels, count, centres, degenerate: false })
    }

    /// Renumbers labels `0..C` in order of first appearance, dropping ids
    /// that never occur.
    pub fn from_labels(labels: &[Option<usize>]) -> Self {
        let mut map = std::collections::HashMap::new();
        let labels = labels
            .iter()
            .map(|l| {
                l.map(|x| {
                    let next = map.len();
                    *map.entry(x).or_insert(next)
                })
            })
            .collect();
        Self { labels, count: map.len(), centres: Vec::new(), degenerate: false }
    }

    /// Every vertex assigned, labels taken as given.
    pub fn from_assignment(labels: &[usize]) -> Self {
        Self::from_labels(&labels.iter().map(|&l| Some(l)).collect::<Vec<_>>())
    }

    /// Marks the clustering as a degenerate fallback.
    pub fn flagged_degenerate(mut self) -> Self {
        self.degenerate = true;
        self
    }

    pub fn n(&self) -> usize {
        self.labels.len()
    }

    pub fn labels(&self) -> &[Option<usize>] {
        &self.labels
    }

    pub fn label(&self, u: usize) -> Option<usize> {
        self.labels[u]
    }

    /// Number of discovered clusters `C`.
    pub fn count(&self) -> usize {
        self.count
    }

    pub fn centres(&self) -> &[Vec<f64>] {
        &self.centres
    }

    pub fn is_degenerate(&self) -> bool {
        self.degenerate
    }

    pub fn sizes(&self) -> Vec<usize> {
        let mut sizes = vec![0; self.count];
        for l in self.labels.iter().flatten() {
            sizes[*l] += 1;
        }
        sizes
    }

    pub fn unassigned(&self) -> usize {
        self.labels.iter().filter(|l| l.is_none()).count()
    }

    /// Labels with `-1` for unassigned vertices.
    pub fn signed_labels(&self) -> Vec<i64> {
        self.labels.iter().map(|l| l.map_or(-1, |x| x as i64)).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn invariants_are_checked() {
        assert!(Clustering::new(vec![Some(0), Some(2)], 2, vec![]).is_err());
        assert_eq!(Clustering::new(vec![Some(0), None], 2, vec![]), Err(ClusteringError::EmptyCluster(1)));
        let c = Clustering::new(vec![Some(1), None, Some(0)], 2, vec![]).unwrap();
        assert_eq!(c.sizes(), vec![1, 1]);
        assert_eq!(c.signed_labels(), vec![1, -1, 0]);
    }

    #[test]
    fn relabelling_compacts() {
        let c = Clustering::from_labels(&[Some(7), Some(3), None, Some(7)]);
        assert_eq!(c.labels(), &[Some(0), Some(1), None, Some(0)]);
        assert_eq!(c.count(), 2);
    }
}
