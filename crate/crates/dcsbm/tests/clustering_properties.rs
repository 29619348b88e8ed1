use dcsbm::baselines::{frobenius_threshold, kmeans, star_dominance};
use dcsbm::clustering::Clustering;
use dcsbm::detect::{detect_communities, detect_with_known_L, DetectConfig};
use dcsbm::metrics::{concentration_report, misclassification};
use dcsbm::model::{sample_graph, Graph};
use dcsbm::presets::{eppm, three_block};
use dcsbm::spectra::{eigs_topk, normalized_adjacency, sign_fix, DEFAULT_TOL};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn permutations(n: usize) -> Vec<Vec<usize>> {
    if n == 0 {
        return vec![vec![]];
    }
    let mut out = Vec::new();
    for p in permutations(n - 1) {
        for i in 0..=p.len() {
            let mut q = p.clone();
            q.insert(i, n - 1);
            out.push(q);
        }
    }
    out
}

/// Largest number of vertices an injective cluster-to-label map can match.
fn brute_force_matched(pred: &[usize], truth: &[usize]) -> usize {
    let c = pred.iter().max().map_or(0, |m| m + 1);
    let t = truth.iter().max().map_or(0, |m| m + 1);
    let s = c.max(t);
    let mut conf = vec![vec![0usize; s]; s];
    for (&p, &q) in pred.iter().zip(truth) {
        conf[p][q] += 1;
    }
    permutations(s).iter().map(|perm| (0..s).map(|i| conf[i][perm[i]]).sum()).max().unwrap()
}

fn shuffled(n: usize, seed: u64) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn hungarian_matches_brute_force(
        (pred, truth) in (1usize..=6, 1usize..=6, 1usize..60).prop_flat_map(|(c, t, n)| {
            (prop::collection::vec(0..c, n), prop::collection::vec(0..t, n))
        })
    ) {
        let c = Clustering::from_assignment(&pred);
        // from_assignment renumbers by first appearance; matching is unaffected.
        let m = misclassification(&c, &truth).unwrap();
        prop_assert_eq!(truth.len() - m.errors, brute_force_matched(&pred, &truth));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn misclassification_ignores_cluster_names(
        pred in prop::collection::vec(0usize..5, 1..80),
        truth_seed in any::<u64>(),
        perm_seed in any::<u64>(),
    ) {
        let n = pred.len();
        let truth: Vec<usize> = shuffled(n, truth_seed).iter().map(|x| x % 3).collect();
        let pi = shuffled(5, perm_seed);
        let renamed: Vec<Option<usize>> = pred.iter().map(|&p| Some(pi[p])).collect();
        let a = misclassification(&Clustering::from_assignment(&pred), &truth).unwrap();
        let b = misclassification(&Clustering::from_labels(&renamed), &truth).unwrap();
        prop_assert_eq!(a.errors, b.errors);
    }

    #[test]
    fn lloyd_objective_never_increases(
        points in prop::collection::vec(prop::collection::vec(-5.0f64..5.0, 2), 4..60),
        k in 1usize..4,
        seed in any::<u64>(),
    ) {
        let km = kmeans(&points, k, seed, 3).unwrap();
        for w in km.history.windows(2) {
            prop_assert!(w[1] <= w[0] * (1.0 + 1e-12) + 1e-12, "{:?}", km.history);
        }
    }

    #[test]
    fn frobenius_split_is_sign_invariant(seed in any::<u64>()) {
        let g = sample_graph(&eppm(120, 4.0, 1.0, 5.0).unwrap(), seed).unwrap();
        prop_assume!(g.num_edges() > 0);
        let h = normalized_adjacency(&g);
        let eigs = eigs_topk(&h, 2, DEFAULT_TOL, 2000).unwrap();
        let mut flipped: Vec<f64> = eigs.vectors[1].iter().map(|x| -x).collect();
        sign_fix(&mut flipped);
        prop_assert_eq!(&flipped, &eigs.vectors[1]);
        let c = frobenius_threshold(&h, 2).unwrap();
        let expected: Vec<usize> = flipped.iter().map(|&v| usize::from(v <= 0.0)).collect();
        let reference = Clustering::from_assignment(&expected);
        prop_assert_eq!(c.labels(), reference.labels());
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(8))]

    #[test]
    fn detection_is_deterministic_and_sized(seed in 0u64..1000, det_seed in any::<u64>()) {
        let params = eppm(300, 10.0, 0.2, 20.0).unwrap();
        let g = sample_graph(&params, seed).unwrap();
        let cfg = DetectConfig { seed: det_seed, ..DetectConfig::default() };
        let a = detect_communities(&g, &cfg).unwrap();
        prop_assert_eq!(&a, &detect_communities(&g, &cfg).unwrap());
        if !a.clustering.is_degenerate() {
            let min = a.f.cbrt() * g.n() as f64;
            for s in a.clustering.sizes() {
                prop_assert!(s as f64 > min, "cluster of {s} <= {min}");
            }
        }
        prop_assert!(a.clustering.labels().iter().flatten().all(|&l| l < a.clustering.count()));
    }

    #[test]
    fn detection_commutes_with_relabelling(seed in 0u64..1000, perm_seed in any::<u64>()) {
        let params = eppm(300, 10.0, 0.2, 20.0).unwrap();
        let g = sample_graph(&params, seed).unwrap();
        let perm = shuffled(g.n(), perm_seed);
        // The default τ samples two pairs, and which pairs are drawn depends
        // on vertex ids; forty pairs make the ε estimate id-independent here.
        let cfg = DetectConfig { tau: 40, ..DetectConfig::default() };
        let a = detect_with_known_L(&g, 2, 0.5, &cfg).unwrap();
        let b = detect_with_known_L(&g.permuted(&perm), 2, 0.5, &cfg).unwrap();
        let pulled: Vec<Option<usize>> = (0..g.n()).map(|u| b.clustering.label(perm[u])).collect();
        let reference: Vec<usize> = a.clustering.labels().iter().map(|l| l.expect("assigned")).collect();
        let m = misclassification(&Clustering::from_labels(&pulled), &reference).unwrap();
        prop_assert_eq!(m.errors, 0);
    }

    #[test]
    fn concentration_triangle_bound(seed in any::<u64>()) {
        let params = three_block(300).unwrap();
        let g = sample_graph(&params, seed).unwrap();
        let r = concentration_report(&g, &params).unwrap();
        prop_assert!(r.triangle_holds(), "{r:?}");
    }
}

#[test]
fn disjoint_stars_are_exact_eigenvectors() {
    let sizes = [3usize, 5, 8, 13];
    let n: usize = sizes.iter().map(|s| s + 1).sum();
    let mut edges = Vec::new();
    let mut next = 0;
    for &s in &sizes {
        let centre = next;
        edges.extend((1..=s).map(|i| (centre, centre + i)));
        next += s + 1;
    }
    let g = Graph::from_edges(n, &edges).unwrap();
    let r = star_dominance(&g, sizes.len()).unwrap();
    for s in &r.stars {
        assert!((s.cosine - 1.0).abs() < 1e-9, "{s:?}");
        assert!((s.eigenvalue - s.star_eigenvalue).abs() < 1e-9);
    }
}
