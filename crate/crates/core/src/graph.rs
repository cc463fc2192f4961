//! Graph data model: symmetric non-negative weighted adjacency with stable
//! external identifiers, plus the handful of topology queries the rest of
//! the crate needs (connectivity, components, shortest paths, closeness).
//!
//! A [`Graph`] is immutable after construction — validation happens once in
//! [`Graph::new`] and every later computation can rely on the invariants:
//!
//! * `weights[i][j] == weights[j][i]` (undirected),
//! * `weights[i][i] == 0` (no self-loops),
//! * `weights[i][j] >= 0` and finite.
//!
//! Zero weights mean "no edge": the topology is the support of the weight
//! matrix. Node identity is a dense index `0..n`; external string ids and
//! optional integer class labels ride along for reporting.

use std::collections::BTreeMap;

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Per-edge traversal costs keyed by unordered node pair (stored with the
/// smaller index first). Used by [`Graph::graph_distance`] and
/// [`Graph::closeness`] when path length should reflect something other
/// than hop count.
pub type CostMap<F> = BTreeMap<(usize, usize), F>;

/// Normalizes an unordered pair key for a [`CostMap`].
pub fn cost_key(u: usize, v: usize) -> (usize, usize) {
    if u <= v {
        (u, v)
    } else {
        (v, u)
    }
}

/// Weighted undirected graph without self-loops.
#[derive(Debug, Clone, PartialEq)]
pub struct Graph<F = f64> {
    weights: Array2<F>,
    node_ids: Vec<String>,
    node_labels: Option<Vec<i64>>,
}

impl<F: Scalar> Graph<F> {
    /// Validates a weight matrix and wraps it as a graph.
    ///
    /// Node ids default to the decimal index. Fails with
    /// [`Error::AsymmetricMatrix`], [`Error::NegativeWeight`],
    /// [`Error::NonFiniteWeight`], or [`Error::SelfLoop`], naming the
    /// offending entry.
    pub fn new(weights: Array2<F>) -> Result<Self> {
        let n = weights.nrows();
        let ids = (0..n).map(|i| i.to_string()).collect();
        Self::with_ids(weights, ids)
    }

    /// Like [`Graph::new`] but keeps caller-supplied external ids.
    pub fn with_ids(weights: Array2<F>, node_ids: Vec<String>) -> Result<Self> {
        let (r, c) = weights.dim();
        if r != c {
            return Err(Error::DimensionMismatch { left: r, right: c });
        }
        if node_ids.len() != r {
            return Err(Error::DimensionMismatch {
                left: node_ids.len(),
                right: r,
            });
        }
        for i in 0..r {
            let d = weights[[i, i]];
            if d != F::zero() {
                return Err(Error::SelfLoop {
                    node: i,
                    w: d.as_f64(),
                });
            }
            for j in (i + 1)..r {
                let w = weights[[i, j]];
                if !w.is_finite() {
                    return Err(Error::NonFiniteWeight { i, j });
                }
                if !weights[[j, i]].is_finite() {
                    return Err(Error::NonFiniteWeight { i: j, j: i });
                }
                if w != weights[[j, i]] {
                    return Err(Error::AsymmetricMatrix {
                        i,
                        j,
                        a: w.as_f64(),
                        b: weights[[j, i]].as_f64(),
                    });
                }
                if w < F::zero() {
                    return Err(Error::NegativeWeight {
                        i,
                        j,
                        w: w.as_f64(),
                    });
                }
            }
        }
        Ok(Self {
            weights,
            node_ids,
            node_labels: None,
        })
    }

    /// Attaches per-node integer class labels (protein families,
    /// mutagenicity classes, …).
    pub fn with_labels(mut self, labels: Vec<i64>) -> Result<Self> {
        if labels.len() != self.n() {
            return Err(Error::DimensionMismatch {
                left: labels.len(),
                right: self.n(),
            });
        }
        self.node_labels = Some(labels);
        Ok(self)
    }

    /// Number of nodes.
    pub fn n(&self) -> usize {
        self.weights.nrows()
    }

    /// The validated weight matrix.
    pub fn weights(&self) -> &Array2<F> {
        &self.weights
    }

    /// Single edge weight (0 means "no edge").
    pub fn weight(&self, i: usize, j: usize) -> F {
        self.weights[[i, j]]
    }

    /// External node identifiers, index-aligned with the weight matrix.
    pub fn node_ids(&self) -> &[String] {
        &self.node_ids
    }

    /// Optional per-node class labels.
    pub fn node_labels(&self) -> Option<&[i64]> {
        self.node_labels.as_deref()
    }

    /// Weighted degree vector: `deg[i] = Σ_j weights[i][j]`.
    pub fn degrees(&self) -> Array1<F> {
        self.weights
            .rows()
            .into_iter()
            .map(|row| row.iter().copied().sum())
            .collect()
    }

    /// Neighbors of `i` (strictly positive weight), ascending.
    pub fn neighbors(&self, i: usize) -> Vec<usize> {
        (0..self.n())
            .filter(|&j| j != i && self.weights[[i, j]] > F::zero())
            .collect()
    }

    /// Iterates undirected edges as `(i, j, w)` with `i < j` and `w > 0`.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize, F)> + '_ {
        let n = self.n();
        (0..n).flat_map(move |i| {
            ((i + 1)..n).filter_map(move |j| {
                let w = self.weights[[i, j]];
                (w > F::zero()).then_some((i, j, w))
            })
        })
    }

    /// Number of edges (unordered pairs with positive weight).
    pub fn edge_count(&self) -> usize {
        self.edges().count()
    }

    /// True iff every node is reachable from node 0 (any positive weight
    /// counts as an edge). The empty graph is vacuously connected.
    pub fn is_connected(&self) -> bool {
        let n = self.n();
        if n == 0 {
            return true;
        }
        self.component_of(0).len() == n
    }

    fn component_of(&self, start: usize) -> Vec<usize> {
        let n = self.n();
        let mut seen = vec![false; n];
        let mut stack = vec![start];
        seen[start] = true;
        let mut out = Vec::new();
        while let Some(u) = stack.pop() {
            out.push(u);
            for (v, &w) in self.weights.row(u).iter().enumerate() {
                if !seen[v] && w > F::zero() {
                    seen[v] = true;
                    stack.push(v);
                }
            }
        }
        out.sort_unstable();
        out
    }

    /// Induced subgraph on the largest connected component; ties between
    /// equally sized components break toward the one containing the
    /// smallest node index.
    pub fn largest_component(&self) -> Result<Graph<F>> {
        let n = self.n();
        if n == 0 {
            return Err(Error::EmptyGraph);
        }
        let mut assigned = vec![false; n];
        let mut best: Vec<usize> = Vec::new();
        for s in 0..n {
            if assigned[s] {
                continue;
            }
            let comp = self.component_of(s);
            for &v in &comp {
                assigned[v] = true;
            }
            // Strictly larger wins; scanning from node 0 upward makes the
            // first component of a given size the tie-break winner.
            if comp.len() > best.len() {
                best = comp;
            }
        }
        Ok(self.induced_subgraph(&best))
    }

    /// Induced subgraph on `keep` (indices into this graph, assumed sorted
    /// and duplicate-free). External ids and labels follow the kept nodes.
    pub fn induced_subgraph(&self, keep: &[usize]) -> Graph<F> {
        let m = keep.len();
        let mut w = Array2::zeros((m, m));
        for (a, &i) in keep.iter().enumerate() {
            for (b, &j) in keep.iter().enumerate() {
                w[[a, b]] = self.weights[[i, j]];
            }
        }
        let ids = keep.iter().map(|&i| self.node_ids[i].clone()).collect();
        let labels = self
            .node_labels
            .as_ref()
            .map(|ls| keep.iter().map(|&i| ls[i]).collect());
        Graph {
            weights: w,
            node_ids: ids,
            node_labels: labels,
        }
    }

    /// Shortest-path distance from `source` to `target`.
    ///
    /// Without `costs` this is the hop count (breadth-first). With `costs`
    /// it is the minimal summed traversal cost (Dijkstra); edges missing
    /// from the map fall back to cost 1. Unreachable targets yield
    /// `+infinity`.
    pub fn graph_distance(
        &self,
        source: usize,
        target: usize,
        costs: Option<&CostMap<F>>,
    ) -> Result<F> {
        let d = self.distances_from(source, costs)?;
        if target >= self.n() {
            return Err(Error::NodeOutOfRange {
                node: target,
                n: self.n(),
            });
        }
        Ok(d[target])
    }

    /// All shortest-path distances from `source` (see
    /// [`Graph::graph_distance`] for the cost conventions).
    pub fn distances_from(&self, source: usize, costs: Option<&CostMap<F>>) -> Result<Vec<F>> {
        let n = self.n();
        if source >= n {
            return Err(Error::NodeOutOfRange { node: source, n });
        }
        let mut dist = vec![F::infinity(); n];
        dist[source] = F::zero();
        // Dijkstra with a linear scan for the next node: O(n^2), plenty for
        // the dense graphs this crate works with, and it avoids ordering
        // floats in a binary heap.
        let mut done = vec![false; n];
        for _ in 0..n {
            let mut u = usize::MAX;
            let mut best = F::infinity();
            for v in 0..n {
                if !done[v] && dist[v] < best {
                    best = dist[v];
                    u = v;
                }
            }
            if u == usize::MAX {
                break;
            }
            done[u] = true;
            for v in 0..n {
                if self.weights[[u, v]] > F::zero() {
                    let step = match costs {
                        Some(map) => map.get(&cost_key(u, v)).copied().unwrap_or_else(F::one),
                        None => F::one(),
                    };
                    let cand = dist[u] + step;
                    if cand < dist[v] {
                        dist[v] = cand;
                    }
                }
            }
        }
        Ok(dist)
    }

    /// Closeness centrality of `node`: reachable-node count divided by the
    /// sum of distances to those nodes (self excluded); 0 for a node that
    /// reaches nothing. Honors the same optional cost map as
    /// [`Graph::graph_distance`].
    pub fn closeness(&self, node: usize, costs: Option<&CostMap<F>>) -> Result<F> {
        let dist = self.distances_from(node, costs)?;
        let mut reach = 0usize;
        let mut total = F::zero();
        for (v, &d) in dist.iter().enumerate() {
            if v != node && d.is_finite() {
                reach += 1;
                total += d;
            }
        }
        if reach == 0 || total <= F::zero() {
            return Ok(F::zero());
        }
        Ok(F::cast_usize(reach) / total)
    }
}
