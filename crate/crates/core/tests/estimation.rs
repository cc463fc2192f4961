//! Statistical behavior of the sample-based machinery at integration
//! scale: estimator consistency as samples grow, invariance under row
//! order, least-squares variance reduction, and lossless text round-trips.

use ndarray::{Array2, Axis};
use netgauss::linalg::sym_eigen;
use netgauss::{
    kl_divergence, kl_entropy, ols_residual_covariance, parse_edge_list, represent, write_edge_list,
    Graph, RepresentationMode,
};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

fn standard_normal_samples(n: usize, d: usize, seed: u64) -> Array2<f64> {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    Array2::from_shape_fn((n, d), |_| StandardNormal.sample(&mut rng))
}

/// H of a d-dimensional standard normal in nats.
fn gaussian_entropy(d: usize) -> f64 {
    0.5 * d as f64 * (1.0 + (2.0 * std::f64::consts::PI).ln())
}

#[test]
fn entropy_estimate_ignores_row_order() {
    let x = standard_normal_samples(600, 3, 7);
    let h = kl_entropy(x.view(), 3).unwrap();

    let mut order: Vec<usize> = (0..600).collect();
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for i in (1..order.len()).rev() {
        let j = rng.random_range(0..=i);
        order.swap(i, j);
    }
    let shuffled = x.select(Axis(0), &order);
    let h_shuffled = kl_entropy(shuffled.view(), 3).unwrap();

    // Same point set, same neighbor radii — the estimate is a symmetric
    // function of the rows, so equality is exact up to summation order.
    assert!(
        (h.value - h_shuffled.value).abs() < 1e-12,
        "{} vs {}",
        h.value,
        h_shuffled.value
    );
}

#[test]
fn entropy_bias_shrinks_as_samples_grow() {
    let truth = gaussian_entropy(2);
    let median_abs_err = |n: usize| -> f64 {
        let mut errs: Vec<f64> = (0..6)
            .map(|seed| {
                let x = standard_normal_samples(n, 2, 1000 + seed);
                (kl_entropy(x.view(), 3).unwrap().value - truth).abs()
            })
            .collect();
        errs.sort_by(|a, b| a.partial_cmp(b).unwrap());
        0.5 * (errs[2] + errs[3])
    };

    let coarse = median_abs_err(400);
    let fine = median_abs_err(6400);
    assert!(
        fine < coarse,
        "median |error| should shrink with sample count: {} at 400 vs {} at 6400",
        coarse,
        fine
    );
    assert!(fine < 0.1, "median |error| at 6400 samples is {}", fine);
}

#[test]
fn informative_predictors_shrink_the_residual_determinant() {
    let n = 4000;
    let (q, p) = (6, 4);
    let x = standard_normal_samples(n, q, 21);
    let noise = standard_normal_samples(n, p, 22);
    let mut rng = ChaCha8Rng::seed_from_u64(23);
    let b = Array2::from_shape_fn((q, p), |_| rng.random_range(-1.0..1.0));
    let y = x.dot(&b) + &(noise * 0.5);

    let fit = ols_residual_covariance(y.view(), x.view(), None).unwrap();

    let y_mean = y.mean_axis(Axis(0)).unwrap();
    let yc = &y - &y_mean.broadcast((n, p)).unwrap();
    let scatter = yc.t().dot(&yc);
    let target_cov = &scatter / (n as f64 - 1.0);

    let det = |m: &Array2<f64>| -> f64 { sym_eigen(m).values.iter().product() };
    assert!(
        det(&fit.matrix) <= det(&target_cov) + 1e-6,
        "residual det {} exceeds target det {}",
        det(&fit.matrix),
        det(&target_cov)
    );

    // The projection inequality itself: the residual sum-of-squares matrix
    // never exceeds the centered scatter in the Loewner order (compare at
    // matching scale, undoing the differing covariance denominators).
    let rss = &fit.matrix * (n as f64 - (q as f64 + 1.0));
    let gap = &scatter - &rss;
    let min_eig = sym_eigen(&gap).values[0];
    let scale = sym_eigen(&scatter).values[p - 1];
    assert!(
        min_eig >= -1e-9 * scale,
        "RSS exceeds the target scatter: min eigenvalue of the gap = {}",
        min_eig
    );
}

#[test]
fn edge_list_round_trip_is_lossless() {
    // Weights chosen to be awkward in decimal: shortest-round-trip float
    // formatting must bring every bit back.
    let mut w = Array2::<f64>::zeros((4, 4));
    let values = [(0, 1, 1.0 / 3.0), (1, 2, 1e-7), (2, 3, 2.5000000000000004), (0, 3, 7.0)];
    for &(i, j, v) in &values {
        w[[i, j]] = v;
        w[[j, i]] = v;
    }
    let g = Graph::new(w).unwrap();

    let mut text = Vec::new();
    write_edge_list(&g, &mut text).unwrap();
    let back: Graph<f64> = parse_edge_list(std::str::from_utf8(&text).unwrap()).unwrap();

    // The reader interns ids in first-seen order, so indices may permute;
    // the labeled graph itself must come back bit-identical.
    assert_eq!(back.n(), g.n());
    let index_of = |id: &str| back.node_ids().iter().position(|s| s == id).unwrap();
    for i in 0..4 {
        for j in 0..4 {
            let (bi, bj) = (index_of(&g.node_ids()[i]), index_of(&g.node_ids()[j]));
            assert_eq!(back.weight(bi, bj), g.weight(i, j), "weight ({}, {})", i, j);
        }
    }

    // Writing the re-read graph again reproduces the same node ordering,
    // so the second round-trip preserves indices too.
    let mut text2 = Vec::new();
    write_edge_list(&back, &mut text2).unwrap();
    let back2: Graph<f64> = parse_edge_list(std::str::from_utf8(&text2).unwrap()).unwrap();
    assert_eq!(back2.node_ids(), back.node_ids());
    assert_eq!(back2.weights(), back.weights());
    let ra = represent(&back, RepresentationMode::Sigma).unwrap();
    let rb = represent(&back2, RepresentationMode::Sigma).unwrap();
    assert!(kl_divergence(&ra, &rb).unwrap() <= 1e-10);
}
