//! Structural invariants checked over randomized inputs: pseudoinverse
//! identities, covariance/precision duality, energy and centrality
//! identities, permutation equivariance, and generator well-formedness.

use ndarray::Array2;
use netgauss::linalg::{max_abs_diff, sym_eigen};
use netgauss::{
    generate, kl_divergence, laplacian, laplacian_centralities, laplacian_energy, random_partition,
    represent, Graph, ModelSpec, RepresentationMode, SpectralCache,
};
use proptest::prelude::*;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

/// Connected weighted graph on `n` nodes: a ring backbone (guarantees
/// connectivity) plus a sprinkling of random chords, weights in [0.25, 2.5].
fn random_connected_graph(n: usize, seed: u64) -> Graph<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut w = Array2::<f64>::zeros((n, n));
    let put = |w: &mut Array2<f64>, i: usize, j: usize, v: f64| {
        w[[i, j]] = v;
        w[[j, i]] = v;
    };
    for i in 0..n {
        let j = (i + 1) % n;
        if i != j {
            let v = rng.random_range(0.25..2.5);
            put(&mut w, i, j, v);
        }
    }
    for i in 0..n {
        for j in (i + 1)..n {
            if w[[i, j] ] == 0.0 && rng.random_range(0.0..1.0) < 0.2 {
                let v = rng.random_range(0.25..2.5);
                put(&mut w, i, j, v);
            }
        }
    }
    Graph::new(w).expect("constructed weights are symmetric and hollow")
}

fn identity(n: usize) -> Array2<f64> {
    Array2::eye(n)
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(40))]

    #[test]
    fn pseudoinverse_satisfies_penrose_identities(n in 2usize..=20, seed in any::<u64>()) {
        let g = random_connected_graph(n, seed);
        let cache = SpectralCache::new(&g);
        let l = cache.laplacian();
        let p = cache.pseudoinverse();

        let lpl = l.dot(p).dot(l);
        prop_assert!(max_abs_diff(&lpl, l) < 1e-8, "L·L†·L deviates by {}", max_abs_diff(&lpl, l));

        let plp = p.dot(l).dot(p);
        prop_assert!(max_abs_diff(&plp, p) < 1e-8, "L†·L·L† deviates by {}", max_abs_diff(&plp, p));

        let lp = l.dot(p);
        prop_assert!(max_abs_diff(&lp, &lp.t().to_owned()) < 1e-9, "L·L† is not symmetric");
    }

    #[test]
    fn precision_inverts_covariance_exactly(n in 2usize..=20, seed in any::<u64>()) {
        let g = random_connected_graph(n, seed);
        let repr = represent(&g, RepresentationMode::Sigma).unwrap();
        let prod = repr.covariance().dot(repr.precision());
        prop_assert!(
            max_abs_diff(&prod, &identity(n)) < 1e-8,
            "Σ·Σ⁻¹ deviates from I by {}",
            max_abs_diff(&prod, &identity(n))
        );

        let dual = represent(&g, RepresentationMode::SigmaDual).unwrap();
        let prod = dual.covariance().dot(dual.precision());
        prop_assert!(
            max_abs_diff(&prod, &identity(n)) < 1e-8,
            "dual Σ·Σ⁻¹ deviates from I by {}",
            max_abs_diff(&prod, &identity(n))
        );
    }

    #[test]
    fn dual_logdet_is_the_negated_primal(n in 2usize..=20, seed in any::<u64>()) {
        // Recompute the dual log-determinant from scratch (eigenvalues of the
        // explicitly assembled dual covariance) so the check does not lean on
        // the cache's own negation shortcut.
        let g = random_connected_graph(n, seed);
        let cache = SpectralCache::new(&g);
        let dual_cov = cache.covariance(RepresentationMode::SigmaDual);
        let eig = sym_eigen(&dual_cov);
        let direct: f64 = eig.values.iter().map(|&v| v.ln()).sum();
        prop_assert!(
            (direct + cache.logdet_sigma()).abs() < 1e-7,
            "eigen-recomputed dual logdet {} vs −primal {}",
            direct,
            -cache.logdet_sigma()
        );
    }

    #[test]
    fn energy_matches_trace_and_spectrum(n in 2usize..=20, seed in any::<u64>()) {
        let g = random_connected_graph(n, seed);
        let e = laplacian_energy(&g);

        let l = laplacian(&g);
        let tr_l2: f64 = l.dot(&l).diag().sum();
        prop_assert!((e - tr_l2).abs() <= 1e-8 * e.max(1.0), "energy {} vs tr(L²) {}", e, tr_l2);

        let cache = SpectralCache::new(&g);
        let spectral: f64 = cache.eigenvalues().iter().map(|&v| v * v).sum();
        prop_assert!((e - spectral).abs() <= 1e-8 * e.max(1.0), "energy {} vs Σλ² {}", e, spectral);
    }

    #[test]
    fn centralities_match_direct_energy_recomputation(n in 3usize..=20, seed in any::<u64>()) {
        let g = random_connected_graph(n, seed);
        let total = laplacian_energy(&g);
        let cents = laplacian_centralities(&g).unwrap();
        for v in 0..n {
            let keep: Vec<usize> = (0..n).filter(|&u| u != v).collect();
            let reduced = laplacian_energy(&g.induced_subgraph(&keep));
            let direct = (total - reduced) / total;
            prop_assert!(
                (cents[v] - direct).abs() < 1e-9,
                "node {}: centrality {} vs direct {}",
                v,
                cents[v],
                direct
            );
        }
    }

    #[test]
    fn relabeling_nodes_relabels_the_representation(n in 2usize..=16, seed in any::<u64>()) {
        let a = random_connected_graph(n, seed);
        let b = random_connected_graph(n, seed.wrapping_add(1));

        // A fixed permutation with no special structure.
        let mut perm: Vec<usize> = (0..n).collect();
        let mut rng = ChaCha8Rng::seed_from_u64(seed ^ 0x9e37_79b9);
        for i in (1..n).rev() {
            let j = rng.random_range(0..=i);
            perm.swap(i, j);
        }

        let permute = |g: &Graph<f64>| {
            let w = g.weights();
            let mut pw = Array2::<f64>::zeros((n, n));
            for i in 0..n {
                for j in 0..n {
                    pw[[perm[i], perm[j]]] = w[[i, j]];
                }
            }
            Graph::new(pw).unwrap()
        };

        let ra = represent(&a, RepresentationMode::Sigma).unwrap();
        let rpa = represent(&permute(&a), RepresentationMode::Sigma).unwrap();
        for i in 0..n {
            for j in 0..n {
                let got = rpa.covariance()[[perm[i], perm[j]]];
                let want = ra.covariance()[[i, j]];
                prop_assert!((got - want).abs() < 1e-10);
            }
        }

        // Relabeling both graphs the same way must leave their divergence alone.
        let rb = represent(&b, RepresentationMode::Sigma).unwrap();
        let rpb = represent(&permute(&b), RepresentationMode::Sigma).unwrap();
        let kl = kl_divergence(&ra, &rb).unwrap();
        let kl_perm = kl_divergence(&rpa, &rpb).unwrap();
        prop_assert!((kl - kl_perm).abs() < 1e-7 * kl.max(1.0), "{} vs {}", kl, kl_perm);

        let cents = laplacian_centralities(&a).unwrap();
        let cents_perm = laplacian_centralities(&permute(&a)).unwrap();
        for i in 0..n {
            prop_assert!((cents[i] - cents_perm[perm[i]]).abs() < 1e-12);
        }
    }

    #[test]
    fn generated_graphs_are_well_formed(n0 in 6usize..=40, seed in any::<u64>()) {
        let specs = [
            ModelSpec::ws(n0, 4, 0.3),
            ModelSpec::er(n0, 0.4),
            ModelSpec::ba(n0, (n0 / 2).max(3), 2),
        ];
        for spec in specs {
            let mut rng = ChaCha8Rng::seed_from_u64(seed);
            let g: Graph<f64> = generate(&spec, &mut rng).unwrap();
            prop_assert_eq!(g.n(), n0);
            for i in 0..n0 {
                prop_assert_eq!(g.weight(i, i), 0.0, "self-loop at {}", i);
                for j in 0..n0 {
                    let w = g.weight(i, j);
                    prop_assert!(w == 0.0 || w == 1.0, "non-unit weight {}", w);
                    prop_assert_eq!(w, g.weight(j, i));
                }
            }
            let degree_sum: f64 = g.degrees().sum();
            prop_assert_eq!(degree_sum, 2.0 * g.edge_count() as f64);
        }

        // Preferential attachment grows from a connected seed one node at a
        // time, each wired to an existing node, so the result is connected.
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let ba: Graph<f64> = generate(&ModelSpec::ba(n0, (n0 / 2).max(3), 2), &mut rng).unwrap();
        prop_assert!(ba.is_connected());
    }

    #[test]
    fn partitions_are_deterministic_and_cover(n in 2usize..=50, seed in any::<u64>()) {
        let k = (n / 2).max(1);
        let p1 = random_partition(n, k, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        let p2 = random_partition(n, k, &mut ChaCha8Rng::seed_from_u64(seed)).unwrap();
        prop_assert_eq!(p1.circ(), p2.circ());
        prop_assert_eq!(p1.star(), p2.star());

        prop_assert_eq!(p1.circ().len(), k);
        let mut all: Vec<usize> = p1.circ().iter().chain(p1.star()).copied().collect();
        all.sort_unstable();
        let expected: Vec<usize> = (0..n).collect();
        prop_assert_eq!(all, expected);
    }
}
