use dcsbm::io::{format_edge_list, parse_edge_list, EdgeListOptions};
use dcsbm::model::{
    aggregates, edge_probability, identifiability_check, reparameterize_equivalent, sample_graph, DcsbmParams,
};
use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

/// Symmetric `K × K` block matrices and weights small enough that every
/// edge probability stays below 1.
fn params_strategy() -> impl Strategy<Value = DcsbmParams> {
    (1usize..=3, 30usize..70).prop_flat_map(|(k, n)| {
        (
            prop::collection::vec(0.1f64..3.0, k * (k + 1) / 2),
            prop::collection::vec(0.2f64..1.5, n),
        )
            .prop_map(move |(upper, weights)| {
                let mut block = vec![0.0; k * k];
                let mut it = upper.into_iter();
                for i in 0..k {
                    for j in i..k {
                        let x = it.next().unwrap();
                        block[i * k + j] = x;
                        block[j * k + i] = x;
                    }
                }
                DcsbmParams::new(vec![1.0 / k as f64; k], block, weights, None).unwrap()
            })
    })
}

fn permutation(n: usize, seed: u64) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(&mut ChaCha8Rng::seed_from_u64(seed));
    p
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(48))]

    #[test]
    fn sampling_ignores_thread_count(params in params_strategy(), seed in any::<u64>()) {
        let one = rayon::ThreadPoolBuilder::new().num_threads(1).build().unwrap();
        let four = rayon::ThreadPoolBuilder::new().num_threads(4).build().unwrap();
        let a = one.install(|| sample_graph(&params, seed)).unwrap();
        let b = four.install(|| sample_graph(&params, seed)).unwrap();
        prop_assert_eq!(&a, &b);
        prop_assert_eq!(a, sample_graph(&params, seed).unwrap());
    }

    #[test]
    fn relabelled_models_have_relabelled_probabilities(params in params_strategy(), seed in any::<u64>()) {
        let n = params.n();
        let perm = permutation(n, seed);
        let moved = params.permuted(&perm);
        for u in 0..n {
            for v in 0..n {
                let p = edge_probability(&params, u, v).unwrap();
                let q = edge_probability(&moved, perm[u], perm[v]).unwrap();
                prop_assert!((p - q).abs() <= 1e-15 * p.max(1.0), "({u},{v}): {p} vs {q}");
            }
        }
    }

    #[test]
    fn block_averages_recombine(params in params_strategy()) {
        let agg = aggregates(&params);
        let n = params.n() as f64;
        let recombined: f64 = params.alpha().iter().zip(&agg.d_bar_per_block).map(|(a, d)| a * n * d).sum();
        prop_assert!((recombined - n * agg.d_bar).abs() <= 1e-12 * n * agg.d_bar);
    }

    #[test]
    fn proportional_rows_are_flagged_and_reparameterised(
        n in 40usize..80,
        base in prop::collection::vec(0.1f64..2.0, 2),
        c in 0.2f64..2.0,
        weights_seed in any::<u64>(),
    ) {
        // Communities 0 and 1 share one row up to the factor c; community 2 is
        // arbitrary but symmetric.
        let (x, y) = (base[0], base[1]);
        let block = vec![
            x, c * x, y,
            c * x, c * c * x, c * y,
            y, c * y, 1.0,
        ];
        let mut rng = ChaCha8Rng::seed_from_u64(weights_seed);
        let weights: Vec<f64> = (0..n).map(|_| rand::Rng::random_range(&mut rng, 0.3..1.0)).collect();
        let params = DcsbmParams::new(vec![1.0 / 3.0; 3], block, weights, None).unwrap();
        prop_assert!(identifiability_check(&params).unwrap().contains(&(0, 1)));
        let star = reparameterize_equivalent(&params, 0, 1).unwrap();
        for u in 0..n {
            for v in u + 1..n {
                let p = edge_probability(&params, u, v).unwrap();
                let q = edge_probability(&star, u, v).unwrap();
                prop_assert!((p - q).abs() <= 1e-10 * p.max(q));
            }
        }
    }

    #[test]
    fn edge_list_round_trip(params in params_strategy(), seed in any::<u64>()) {
        let g = sample_graph(&params, seed).unwrap();
        let text = format_edge_list(&g);
        let back = parse_edge_list(&text, &EdgeListOptions { one_indexed: false, n: Some(g.n()) }).unwrap();
        prop_assert_eq!(format_edge_list(&back), text);
    }
}

#[test]
fn proportional_block_rows_always_detected() {
    // Random B with row 1 = c · row 0 (and the matching column), random c > 0.
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..100 {
        let c: f64 = rand::Rng::random_range(&mut rng, 0.1..5.0);
        let x: f64 = rand::Rng::random_range(&mut rng, 0.1..2.0);
        let block = vec![x, c * x, c * x, c * c * x];
        let n = 40;
        let weights: Vec<f64> = (0..n).map(|_| rand::Rng::random_range(&mut rng, 0.2..1.0)).collect();
        let params = DcsbmParams::new(vec![0.5, 0.5], block, weights, None).unwrap();
        assert_eq!(identifiability_check(&params).unwrap(), vec![(0, 1)], "c = {c}");
    }
}
