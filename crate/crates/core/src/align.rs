//! Size alignment: comparing two graphs of different node counts by
//! filtering the larger one down to the smaller one's size.
//!
//! Nodes are ranked by Laplacian centrality and the least central are
//! dropped simultaneously, so the survivor keeps as much Laplacian energy
//! as possible. The retained fraction of energy is the rationality score
//! γ ∈ (0, 1]: γ = 1 exactly when only isolated (energy-free) nodes were
//! removed, and it shrinks as the filter starts cutting into structure.

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;
use crate::spectral::{laplacian_centralities, laplacian_energy};

/// What to do when the top-ranked node set is not connected.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Default)]
pub enum DisconnectPolicy {
    /// Rebuild the kept set by rank-greedy growth along edges so it stays
    /// connected (see [`align_down`]); the alignment notes that this
    /// happened.
    #[default]
    Repad,
    /// Fail with [`Error::DisconnectedResult`].
    Strict,
}

/// The result of filtering a graph down to a target size.
#[derive(Debug, Clone)]
pub struct Alignment<F> {
    /// Indices (into the original graph, ascending) of the surviving nodes.
    pub kept_nodes: Vec<usize>,
    /// The induced subgraph on `kept_nodes`.
    pub filtered_graph: Graph<F>,
    /// Fraction of Laplacian energy retained, in (0, 1].
    pub gamma: F,
    /// True when the plain top-centrality set was disconnected and the
    /// kept set had to be rebuilt by connected growth.
    pub repadded: bool,
}

/// Node indices sorted by descending centrality, ties broken by smaller
/// index.
fn rank_by_centrality<F: Scalar>(graph: &Graph<F>) -> Result<Vec<usize>> {
    let cents = laplacian_centralities(graph)?;
    let mut order: Vec<usize> = (0..graph.n()).collect();
    order.sort_by(|&i, &j| {
        cents[j]
            .partial_cmp(&cents[i])
            .expect("centralities are finite")
            .then(i.cmp(&j))
    });
    Ok(order)
}

/// Grows a connected kept set of size `target_n` by rank: seed with the
/// highest-ranked node, then repeatedly adopt the highest-ranked node that
/// touches the current set. Returns `None` when the seed's component is
/// too small.
fn grow_connected<F: Scalar>(
    graph: &Graph<F>,
    order: &[usize],
    target_n: usize,
) -> Option<Vec<usize>> {
    let n = graph.n();
    let rank_of = {
        let mut r = vec![0usize; n];
        for (pos, &node) in order.iter().enumerate() {
            r[node] = pos;
        }
        r
    };
    let mut kept = vec![false; n];
    kept[order[0]] = true;
    let mut count = 1;
    let w = graph.weights();
    while count < target_n {
        // Highest-ranked node adjacent to the kept set.
        let mut frontier_best: Option<usize> = None;
        for cand in 0..n {
            if kept[cand] {
                continue;
            }
            let touches = (0..n).any(|i| kept[i] && w[[i, cand]] > F::zero());
            if touches {
                frontier_best = match frontier_best {
                    Some(best) if rank_of[best] <= rank_of[cand] => Some(best),
                    _ => Some(cand),
                };
            }
        }
        let next = frontier_best?; // None: component exhausted
        kept[next] = true;
        count += 1;
    }
    Some((0..n).filter(|&i| kept[i]).collect())
}

/// Filters `graph` down to its `target_n` most central nodes.
///
/// Centralities are computed once on the original graph and the lowest
/// ranks are dropped in one pass (no re-ranking between removals). If the
/// surviving set is disconnected, `policy` decides: [`DisconnectPolicy::Strict`]
/// fails, while the default [`DisconnectPolicy::Repad`] rebuilds the set
/// with the same ranking under a connectivity constraint — seed at the
/// top-ranked node and repeatedly adopt the best-ranked neighbor of the
/// set — which keeps exactly `target_n` connected nodes or fails with
/// [`Error::DisconnectedResult`] if no component is big enough.
///
/// `target_n == graph.n()` is an exact identity (γ = 1) and never fails.
pub fn align_down<F: Scalar>(
    graph: &Graph<F>,
    target_n: usize,
    policy: DisconnectPolicy,
) -> Result<Alignment<F>> {
    let n = graph.n();
    if target_n == 0 || target_n > n {
        return Err(Error::BadTarget {
            target: target_n,
            n,
        });
    }
    if target_n == n {
        return Ok(Alignment {
            kept_nodes: (0..n).collect(),
            filtered_graph: graph.clone(),
            gamma: F::one(),
            repadded: false,
        });
    }

    let total_energy = laplacian_energy(graph);
    if total_energy <= F::zero() {
        return Err(Error::ZeroEnergy);
    }

    let order = rank_by_centrality(graph)?;
    let mut kept: Vec<usize> = order[..target_n].to_vec();
    kept.sort_unstable();

    let mut filtered = graph.induced_subgraph(&kept);
    let mut repadded = false;
    if target_n > 1 && !filtered.is_connected() {
        match policy {
            DisconnectPolicy::Strict => return Err(Error::DisconnectedResult),
            DisconnectPolicy::Repad => {
                let grown =
                    grow_connected(graph, &order, target_n).ok_or(Error::DisconnectedResult)?;
                kept = grown;
                filtered = graph.induced_subgraph(&kept);
                repadded = true;
            }
        }
    }

    let gamma = laplacian_energy(&filtered) / total_energy;
    Ok(Alignment {
        kept_nodes: kept,
        filtered_graph: filtered,
        gamma,
        repadded,
    })
}

/// Brings two graphs to a common size: the larger is filtered down to the
/// smaller's node count, the smaller passes through untouched with γ = 1.
/// Equal sizes pass through on both sides.
pub fn align_pair<F: Scalar>(
    a: &Graph<F>,
    b: &Graph<F>,
    policy: DisconnectPolicy,
) -> Result<(Graph<F>, Graph<F>, F, F)> {
    use std::cmp::Ordering;
    match a.n().cmp(&b.n()) {
        Ordering::Equal => Ok((a.clone(), b.clone(), F::one(), F::one())),
        Ordering::Greater => {
            let al = align_down(a, b.n(), policy)?;
            Ok((al.filtered_graph, b.clone(), al.gamma, F::one()))
        }
        Ordering::Less => {
            let al = align_down(b, a.n(), policy)?;
            Ok((a.clone(), al.filtered_graph, F::one(), al.gamma))
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::spectral::laplacian_centrality;
    use ndarray::Array2;

    fn from_edges(n: usize, edges: &[(usize, usize, f64)]) -> Graph<f64> {
        let mut w = Array2::zeros((n, n));
        for &(i, j, v) in edges {
            w[[i, j]] = v;
            w[[j, i]] = v;
        }
        Graph::new(w).unwrap()
    }

    fn jittered_ring(n: usize) -> Graph<f64> {
        let edges: Vec<(usize, usize, f64)> = (0..n)
            .map(|i| (i, (i + 1) % n, 1.0 + 0.13 * (i as f64 + 1.0)))
            .collect();
        from_edges(n, &edges)
    }

    #[test]
    fn aligning_to_own_size_is_the_identity() {
        let g = jittered_ring(7);
        let al = align_down(&g, 7, DisconnectPolicy::Strict).unwrap();
        assert_eq!(al.kept_nodes, (0..7).collect::<Vec<_>>());
        assert_eq!(al.gamma, 1.0);
        assert!(!al.repadded);
        assert_eq!(al.filtered_graph.weights(), g.weights());
    }

    #[test]
    fn isolated_nodes_are_dropped_for_free() {
        // K3 plus an isolated node: the isolate has zero centrality and
        // removing it costs no energy.
        let g = from_edges(4, &[(0, 1, 1.0), (0, 2, 1.0), (1, 2, 1.0)]);
        let al = align_down(&g, 3, DisconnectPolicy::Repad).unwrap();
        assert_eq!(al.kept_nodes, vec![0, 1, 2]);
        assert_eq!(al.gamma, 1.0);
    }

    #[test]
    fn star_filtering_keeps_the_hub_and_breaks_leaf_ties_by_index() {
        // Center 0 with 4 leaves; leaves tie, so the two smallest indices
        // survive.
        let g = from_edges(
            5,
            &[(0, 1, 1.0), (0, 2, 1.0), (0, 3, 1.0), (0, 4, 1.0)],
        );
        let al = align_down(&g, 3, DisconnectPolicy::Strict).unwrap();
        assert_eq!(al.kept_nodes, vec![0, 1, 2]);
        // Energy: star-4 has degrees (4,1,1,1,1) and 4 unit edges
        // (E = 20 + 8 = 28); the kept star-2 has (2,1,1) and 2 edges
        // (E = 6 + 4 = 10).
        assert!((al.gamma - 10.0 / 28.0).abs() < 1e-12);
        assert!(al.gamma < 1.0);
    }

    #[test]
    fn kept_set_matches_a_full_sort_of_centralities() {
        let g = jittered_ring(11);
        let al = align_down(&g, 6, DisconnectPolicy::Repad).unwrap();
        if !al.repadded {
            let mut scored: Vec<(f64, usize)> = (0..11)
                .map(|i| (laplacian_centrality(&g, i).unwrap(), i))
                .collect();
            scored.sort_by(|a, b| b.0.partial_cmp(&a.0).unwrap().then(a.1.cmp(&b.1)));
            let mut want: Vec<usize> = scored[..6].iter().map(|&(_, i)| i).collect();
            want.sort_unstable();
            assert_eq!(al.kept_nodes, want);
        }
    }

    #[test]
    fn disconnected_survivors_are_rebuilt_by_connected_growth() {
        // Two heavy triangles joined by a featherweight bridge node: the
        // top six centralities are the triangle corners, which do not
        // touch each other.
        let g = from_edges(
            7,
            &[
                (0, 1, 3.0),
                (0, 2, 3.0),
                (1, 2, 3.0),
                (4, 5, 3.0),
                (4, 6, 3.0),
                (5, 6, 3.0),
                (2, 3, 0.1),
                (3, 4, 0.1),
            ],
        );
        assert!(matches!(
            align_down(&g, 6, DisconnectPolicy::Strict),
            Err(Error::DisconnectedResult)
        ));
        let al = align_down(&g, 6, DisconnectPolicy::Repad).unwrap();
        assert!(al.repadded);
        assert_eq!(al.kept_nodes.len(), 6);
        assert!(al.filtered_graph.is_connected());
        // The bridge had to come along.
        assert!(al.kept_nodes.contains(&3));
    }

    #[test]
    fn impossible_targets_error_out() {
        let g = from_edges(4, &[(0, 1, 1.0), (2, 3, 1.0)]);
        // No connected set of 3 exists.
        assert!(matches!(
            align_down(&g, 3, DisconnectPolicy::Repad),
            Err(Error::DisconnectedResult)
        ));
        assert!(matches!(
            align_down(&g, 5, DisconnectPolicy::Repad),
            Err(Error::BadTarget { target: 5, n: 4 })
        ));
        assert!(matches!(
            align_down(&g, 0, DisconnectPolicy::Repad),
            Err(Error::BadTarget { target: 0, n: 4 })
        ));
    }

    #[test]
    fn cutting_real_structure_costs_energy() {
        let g = jittered_ring(9);
        let al = align_down(&g, 5, DisconnectPolicy::Repad).unwrap();
        assert!(al.gamma > 0.0 && al.gamma < 1.0);
    }

    #[test]
    fn filtering_is_permutation_equivariant() {
        let g = jittered_ring(8);
        // Relabel via the permutation π(i) = (3i + 1) mod 8.
        let perm: Vec<usize> = (0..8).map(|i| (3 * i + 1) % 8).collect();
        let mut wp = Array2::zeros((8, 8));
        for i in 0..8 {
            for j in 0..8 {
                wp[[perm[i], perm[j]]] = g.weights()[[i, j]];
            }
        }
        let gp = Graph::new(wp).unwrap();

        let al = align_down(&g, 5, DisconnectPolicy::Repad).unwrap();
        let alp = align_down(&gp, 5, DisconnectPolicy::Repad).unwrap();
        let mut mapped: Vec<usize> = al.kept_nodes.iter().map(|&i| perm[i]).collect();
        mapped.sort_unstable();
        assert_eq!(mapped, alp.kept_nodes);
    }

    #[test]
    fn pair_alignment_filters_only_the_larger_graph() {
        let big = jittered_ring(9);
        let small = jittered_ring(5);
        let (fa, fb, ga, gb) = align_pair(&big, &small, DisconnectPolicy::Repad).unwrap();
        assert_eq!(fa.n(), 5);
        assert_eq!(fb.n(), 5);
        assert!(ga < 1.0);
        assert_eq!(gb, 1.0);

        let (sa, sb, g1, g2) = align_pair(&small, &big, DisconnectPolicy::Repad).unwrap();
        assert_eq!(sa.n(), 5);
        assert_eq!(sb.n(), 5);
        assert_eq!(g1, 1.0);
        assert!(g2 < 1.0);

        let (ea, _eb, eg1, eg2) = align_pair(&small, &small, DisconnectPolicy::Repad).unwrap();
        assert_eq!(ea.n(), 5);
        assert_eq!(eg1, 1.0);
        assert_eq!(eg2, 1.0);
    }
}
