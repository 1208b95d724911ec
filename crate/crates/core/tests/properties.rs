mod common;

use common::*;
use mxmap_core::simgen::{generate, preset, NoiseConfig, PRESET_NAMES};
use mxmap_core::{EmbedParams, MXMapConfig, PCMConfig};
use proptest::prelude::*;

fn finite(len: std::ops::Range<usize>) -> impl Strategy<Value = Vec<f64>> {
    prop::collection::vec(-100.0f64..100.0, len)
}

fn edge_list(n: usize) -> impl Strategy<Value = Vec<(usize, usize)>> {
    prop::collection::vec((0..n, 0..n), 0..n * n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn embedding_indexing(
        a in finite(1..60),
        tau in 1usize..5,
        dim in 1usize..6,
        seed in any::<u64>(),
    ) {
        let b: Vec<f64> = a.iter().map(|v| v * 0.5 + (seed % 7) as f64).collect();
        prop_assert_eq!(embedding_laws(&a, &b, tau, dim), Ok(()));
    }

    #[test]
    fn weights_normalised(d in prop::collection::vec(0.0f64..50.0, 1..12)) {
        prop_assert_eq!(weight_laws(d), Ok(()));
    }

    #[test]
    fn weights_with_zero_distances(zeros in 1usize..4, rest in prop::collection::vec(0.1f64..5.0, 0..6)) {
        let mut d = vec![0.0; zeros];
        d.extend(rest);
        prop_assert_eq!(weight_laws(d), Ok(()));
    }

    #[test]
    fn projection_convex(source in finite(20..80), seed in any::<u32>(), dim in 1usize..4) {
        let target: Vec<f64> = source
            .iter()
            .enumerate()
            .map(|(t, v)| (v * 0.37 + t as f64 * f64::from(seed % 11)).sin())
            .collect();
        prop_assert_eq!(projection_is_convex(&source, &target, dim), Ok(()));
    }

    #[test]
    fn knn_brute_force(rows in 2usize..60, cols in 1usize..4, k_raw in 1usize..8, seed in any::<u64>()) {
        let k = k_raw.min(rows - 1);
        let mut state = seed | 1;
        // coarse grid values so that exact distance ties occur
        let points: Vec<f64> = (0..rows * cols)
            .map(|_| {
                state ^= state << 13;
                state ^= state >> 7;
                state ^= state << 17;
                (state % 5) as f64
            })
            .collect();
        prop_assert_eq!(knn_matches_brute_force(&points, cols, k), Ok(()));
    }

    #[test]
    fn knn_brute_force_continuous(points in finite(4..200), cols in 1usize..4, k_raw in 1usize..6) {
        let rows = points.len() / cols;
        prop_assume!(rows >= 2);
        let k = k_raw.min(rows - 1);
        prop_assert_eq!(knn_matches_brute_force(&points[..rows * cols], cols, k), Ok(()));
    }

    #[test]
    fn parcorr_residual_oracle(
        abc in prop::collection::vec((-10.0f64..10.0, -10.0f64..10.0, -10.0f64..10.0), 5..80),
    ) {
        let a: Vec<f64> = abc.iter().map(|t| t.0).collect();
        let b: Vec<f64> = abc.iter().map(|t| t.1 + 0.3 * t.0).collect();
        let c: Vec<f64> = abc.iter().map(|t| t.2 + 0.5 * t.1).collect();
        prop_assert_eq!(parcorr_matches_residuals(&a, &b, &c), Ok(()));
    }

    #[test]
    fn graph_paths_enumeration(n in 2usize..7, edges in edge_list(6)) {
        let edges: Vec<_> = edges.into_iter().filter(|&(i, j)| i < n && j < n).collect();
        prop_assert_eq!(path_queries_match(&graph(n, &edges)), Ok(()));
    }

    #[test]
    fn metrics_oracle(n in 1usize..7, a in edge_list(6), b in edge_list(6), c in edge_list(6)) {
        let keep = |e: Vec<(usize, usize)>| -> Vec<(usize, usize)> {
            e.into_iter().filter(|&(i, j)| i < n && j < n).collect()
        };
        let (a, b, c) = (graph(n, &keep(a)), graph(n, &keep(b)), graph(n, &keep(c)));
        prop_assert_eq!(metrics_laws(&a, &b, &c), Ok(()));
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(12))]

    #[test]
    fn multi_pcm_single_condition(seed in any::<u64>(), dim in 2usize..5, tau in 1usize..3) {
        let d = generate(&preset("3V_chain").unwrap(), 300, NoiseConfig::none(), seed).unwrap();
        let cfg = PCMConfig::new(EmbedParams::new(tau, dim).unwrap(), 0.45).unwrap();
        prop_assert_eq!(
            multi_equals_uni(d.variable(0), d.variable(1), d.variable(2), &cfg),
            Ok(())
        );
    }

    #[test]
    fn generator_reproducible(idx in 0usize..PRESET_NAMES.len(), seed in 0u64..1000) {
        prop_assert_eq!(generator_determinism(PRESET_NAMES[idx], 200, seed), Ok(()));
    }

    #[test]
    fn pruning_only_removes(idx in 0usize..PRESET_NAMES.len(), seed in 0u64..1000, noisy in any::<bool>()) {
        let noise = if noisy { NoiseConfig::gaussian(0.01) } else { NoiseConfig::none() };
        let d = generate(&preset(PRESET_NAMES[idx]).unwrap(), 400, noise, seed).unwrap();
        prop_assert_eq!(pruning_is_monotone(&d, &MXMapConfig::simulated()), Ok(()));
    }

    #[test]
    fn phase1_relabels_with_columns(
        idx in 0usize..PRESET_NAMES.len(),
        seed in 0u64..1000,
        order in Just((0..7).collect::<Vec<usize>>()).prop_shuffle(),
    ) {
        let p = preset(PRESET_NAMES[idx]).unwrap();
        let order: Vec<usize> = order.into_iter().filter(|&o| o < p.width()).collect();
        let d = generate(&p, 400, NoiseConfig::none(), seed).unwrap();
        prop_assert_eq!(phase1_permutation_invariant(&d, &order, &MXMapConfig::simulated()), Ok(()));
    }
}

#[test]
fn hand_worked_step() {
    assert_eq!(single_step_hand_oracle(), Ok(()));
}
