//! Named model families used by the experiments.

use std::fmt;
use std::str::FromStr;

use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;
use thiserror::Error;

use crate::model::{block_sizes, sample_graph, validate, DcsbmParams, Graph, ModelError};

#[derive(Debug, Clone, PartialEq, Error)]
pub enum PresetError {
    #[error("unknown preset {0:?}")]
    Unknown(String),
    #[error("invalid preset argument: {0}")]
    Argument(String),
    #[error(transparent)]
    Model(#[from] ModelError),
}

fn log2n(n: usize) -> f64 {
    let l = (n as f64).ln();
    l * l
}

/// Two equal communities with `B = [[a, b], [b, a]]` and constant weight.
pub fn eppm(n: usize, a: f64, b: f64, weight: f64) -> Result<DcsbmParams, PresetError> {
    Ok(DcsbmParams::new(vec![0.5, 0.5], vec![a, b, b, a], vec![weight; n], None)?)
}

/// [`eppm`] with weight `ln² n`.
pub fn eppm_log2(n: usize, a: f64, b: f64) -> Result<DcsbmParams, PresetError> {
    eppm(n, a, b, log2n(n))
}

/// Three equal communities with `B = [[1,2,3],[2,0,2],[3,2,5]]`, and weight
/// `i^{1/3}` for the `i`-th vertex (1-based) of each community.
pub fn three_block(n: usize) -> Result<DcsbmParams, PresetError> {
    let alpha = vec![1.0 / 3.0; 3];
    let mut weights = Vec::with_capacity(n);
    for size in block_sizes(&alpha, n) {
        weights.extend((1..=size).map(|i| (i as f64).cbrt()));
    }
    let block = vec![1.0, 2.0, 3.0, 2.0, 0.0, 2.0, 3.0, 2.0, 5.0];
    Ok(DcsbmParams::new(alpha, block, weights, None)?)
}

/// Largest uniform weight factor that keeps every edge probability at most 1.
fn probability_scale(params: &DcsbmParams) -> f64 {
    match validate(params).max_edge_probability {
        Some((p, _, _)) if p > 1.0 => 1.0 / (p * (1.0 + 1e-12)),
        _ => 1.0,
    }
}

/// Two equal communities with all-ones `B` and weights `ln² n` (first half)
/// and `100 ln² n` (second half), all scaled by the largest common factor
/// `≤ 1` that keeps edge probabilities at most 1.
pub fn bimodal_allones(n: usize) -> Result<DcsbmParams, PresetError> {
    let (params, _) = bimodal_allones_scaled(n)?;
    Ok(params)
}

/// [`bimodal_allones`] and the factor that was applied.
pub fn bimodal_allones_scaled(n: usize) -> Result<(DcsbmParams, f64), PresetError> {
    let l = log2n(n);
    let half = block_sizes(&[0.5, 0.5], n)[0];
    let weights: Vec<f64> = (0..n).map(|u| if u < half { l } else { 100.0 * l }).collect();
    let raw = DcsbmParams::new(vec![0.5, 0.5], vec![1.0; 4], weights.clone(), None)?;
    let c = probability_scale(&raw);
    let scaled = DcsbmParams::new(vec![0.5, 0.5], vec![1.0; 4], weights.iter().map(|w| w * c).collect(), None)?;
    Ok((scaled, c))
}

/// Power-law hub family: `k = ⌊n^β⌋` and, for 1-based `u`,
/// `D_u = d1` when `u < n − k` and `D_u = d1 · n^γ · (u + 1 − (n − k))`
/// otherwise. Community 1 holds `u ≤ n/2` and community 0 the rest. `B` is
/// `[[a, b], [b, a]]`.
pub fn power_hubs(n: usize, d1: f64, beta: f64, gamma: f64, a: f64, b: f64) -> Result<DcsbmParams, PresetError> {
    if n < 2 {
        return Err(PresetError::Argument(format!("n must be at least 2, got {n}")));
    }
    let k = (n as f64).powf(beta).floor() as usize;
    let scale = d1 * (n as f64).powf(gamma);
    let weights = (1..=n)
        .map(|u| if u < n - k { d1 } else { scale * (u + 1 - (n - k)) as f64 })
        .collect();
    let sigma: Vec<usize> = (1..=n).map(|u| usize::from(2 * u <= n)).collect();
    let size1 = sigma.iter().filter(|&&s| s == 1).count() as f64 / n as f64;
    Ok(DcsbmParams::new(vec![1.0 - size1, size1], vec![a, b, b, a], weights, Some(sigma))?)
}

/// A sampled graph with hubs wired in explicitly.
#[derive(Debug, Clone, PartialEq)]
pub struct PlantedHubs {
    pub graph: Graph,
    pub truth: Vec<usize>,
    /// Hub vertices, by increasing degree.
    pub hubs: Vec<usize>,
}

/// Parameters of [`planted_hubs`].
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct HubConfig {
    pub n: usize,
    pub hubs: usize,
    /// Constant weight of the two-community bulk.
    pub bulk_weight: f64,
    pub a: f64,
    pub b: f64,
    /// Hub `j` (0-based) gets `(j + 1) · hub_degree` neighbours.
    pub hub_degree: usize,
}

impl Default for HubConfig {
    fn default() -> Self {
        Self { n: 4000, hubs: 5, bulk_weight: 3.0, a: 5.0, b: 1.0, hub_degree: 150 }
    }
}

/// Samples a two-community bulk, clears the edges of the last `hubs`
/// vertices, and joins hub `j` to its own block of `(j + 1) · hub_degree`
/// bulk vertices drawn from one random permutation, so hub neighbourhoods
/// are disjoint.
pub fn planted_hubs(cfg: &HubConfig, seed: u64) -> Result<PlantedHubs, PresetError> {
    let HubConfig { n, hubs: k, hub_degree, .. } = *cfg;
    let needed: usize = (1..=k).map(|j| j * hub_degree).sum();
    if k >= n || needed > n - k {
        return Err(PresetError::Argument(format!("{k} hubs need {needed} distinct neighbours among {} vertices", n - k)));
    }
    let params = eppm(n, cfg.a, cfg.b, cfg.bulk_weight)?;
    let bulk = sample_graph(&params, seed)?;
    let first_hub = n - k;
    let mut edges: Vec<(usize, usize)> = bulk.edges().iter().copied().filter(|&(_, v)| v < first_hub).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    rng.set_stream(u64::MAX);
    let mut pool: Vec<usize> = (0..first_hub).collect();
    pool.shuffle(&mut rng);
    let mut offset = 0;
    for j in 0..k {
        let size = (j + 1) * hub_degree;
        edges.extend(pool[offset..offset + size].iter().map(|&v| (v, first_hub + j)));
        offset += size;
    }
    edges.sort_unstable();
    let graph = Graph::from_edges(n, &edges).expect("hub edges are new and loop-free");
    Ok(PlantedHubs { graph, truth: params.sigma().to_vec(), hubs: (first_hub..n).collect() })
}

/// Named instance families.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Preset {
    /// [`eppm_log2`] with `a = 5`, `b = 1`.
    Eppm,
    ThreeBlock,
    BimodalAllOnes,
    PlantedHubs,
}

impl Preset {
    pub const ALL: [Preset; 4] = [Preset::Eppm, Preset::ThreeBlock, Preset::BimodalAllOnes, Preset::PlantedHubs];

    pub fn name(self) -> &'static str {
        match self {
            Preset::Eppm => "eppm",
            Preset::ThreeBlock => "fig1-3block",
            Preset::BimodalAllOnes => "bimodal-allones",
            Preset::PlantedHubs => "planted-hubs",
        }
    }

    /// Model parameters, absent for [`Preset::PlantedHubs`] whose hubs are
    /// wired by hand.
    pub fn params(self, n: usize) -> Result<Option<DcsbmParams>, PresetError> {
        Ok(match self {
            Preset::Eppm => Some(eppm_log2(n, 5.0, 1.0)?),
            Preset::ThreeBlock => Some(three_block(n)?),
            Preset::BimodalAllOnes => Some(bimodal_allones(n)?),
            Preset::PlantedHubs => None,
        })
    }

    /// A sampled graph and its truth labels.
    pub fn instance(self, n: usize, seed: u64) -> Result<(Graph, Vec<usize>, Option<DcsbmParams>), PresetError> {
        match self.params(n)? {
            Some(p) => {
                let g = sample_graph(&p, seed)?;
                let truth = p.sigma().to_vec();
                Ok((g, truth, Some(p)))
            }
            None => {
                let h = planted_hubs(&HubConfig { n, ..HubConfig::default() }, seed)?;
                Ok((h.graph, h.truth, None))
            }
        }
    }
}

impl fmt::Display for Preset {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for Preset {
    type Err = PresetError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        Preset::ALL
            .into_iter()
            .find(|p| p.name() == s)
            .ok_or_else(|| PresetError::Unknown(s.to_string()))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn three_block_shape() {
        let p = three_block(3000).unwrap();
        assert_eq!(p.community_sizes(), vec![1000, 1000, 1000]);
        assert_eq!(p.weights()[0], 1.0);
        assert!((p.weights()[1999] - 10.0).abs() < 1e-12);
        assert!(validate(&p).is_valid());
    }

    #[test]
    fn bimodal_is_valid_and_keeps_ratio() {
        let (p, c) = bimodal_allones_scaled(2000).unwrap();
        assert!((c - 0.1748).abs() < 5e-4, "{c}");
        assert!(validate(&p).is_valid());
        assert!((p.weights()[1999] / p.weights()[0] - 100.0).abs() < 1e-9);
        let big = bimodal_allones_scaled(1_000_000).unwrap().1;
        assert_eq!(big, 1.0);
    }

    #[test]
    fn power_hubs_shape() {
        let n = 1000;
        let p = power_hubs(n, 2.0, 0.3, 0.2, 2.0, 1.0).unwrap();
        let k = (n as f64).powf(0.3).floor() as usize;
        assert_eq!(p.weights()[n - k - 2], 2.0);
        assert!((p.weights()[n - 1] - 2.0 * (n as f64).powf(0.2) * (k + 1) as f64).abs() < 1e-9);
        assert_eq!(p.sigma()[0], 1);
        assert_eq!(p.sigma()[n - 1], 0);
    }

    #[test]
    fn planted_hub_degrees() {
        let cfg = HubConfig { n: 600, hubs: 3, hub_degree: 40, ..HubConfig::default() };
        let h = planted_hubs(&cfg, 9).unwrap();
        for (j, &hub) in h.hubs.iter().enumerate() {
            assert_eq!(h.graph.degree(hub), (j + 1) * 40);
        }
        let mut seen = std::collections::HashSet::new();
        for &hub in &h.hubs {
            for &v in h.graph.neighbors(hub) {
                assert!(seen.insert(v), "neighbourhoods overlap at {v}");
            }
        }
        assert_eq!(planted_hubs(&cfg, 9).unwrap(), h);
        let too_many = HubConfig { n: 50, hubs: 3, hub_degree: 40, ..HubConfig::default() };
        assert!(planted_hubs(&too_many, 0).is_err());
    }

    #[test]
    fn preset_names_round_trip() {
        for p in Preset::ALL {
            assert_eq!(p.name().parse::<Preset>().unwrap(), p);
        }
        assert!("nope".parse::<Preset>().is_err());
    }
}
