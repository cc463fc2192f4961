//! Random-graph generators (Watts–Strogatz, Erdős–Rényi, Barabási–Albert)
//! and the three single-step evolution processes (node deletion, edge
//! rewiring, node addition) used by the evolution experiments.
//!
//! All edges carry weight 1; structure, not weight, is what these models
//! vary. Every operation is a pure function of its RNG, so a fixed seed
//! reproduces a trajectory exactly.

use ndarray::Array2;
use rand::Rng;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::scalar::Scalar;

/// Which random-graph family to draw from.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum ModelKind {
    /// Watts–Strogatz ring lattice with rewiring.
    Ws,
    /// Erdős–Rényi independent-edge model.
    Er,
    /// Barabási–Albert preferential attachment.
    Ba,
}

impl std::fmt::Display for ModelKind {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            ModelKind::Ws => "ws",
            ModelKind::Er => "er",
            ModelKind::Ba => "ba",
        })
    }
}

/// Parameters for one generator draw. Only the fields for the chosen
/// `kind` are consulted; the constructors fill the rest with the defaults
/// used throughout the evolution experiments.
#[derive(Debug, Clone, Copy)]
pub struct ModelSpec {
    /// Model family.
    pub kind: ModelKind,
    /// Node count of the generated graph.
    pub n0: usize,
    /// WS: ring-lattice window — each node links ⌈α/2⌉ clockwise
    /// neighbors (and receives as many counter-clockwise), giving degree
    /// α for even α and α+1 for odd α, since an α-regular circulant
    /// exists only for even α.
    pub ws_alpha: usize,
    /// WS: probability of rewiring each ring edge's far endpoint.
    pub ws_beta: f64,
    /// ER: independent probability of each unordered pair being linked.
    pub er_rho: f64,
    /// BA: size of the connected ring seed.
    pub ba_kappa: usize,
    /// BA: edges attached per new node.
    pub ba_m: usize,
}

impl ModelSpec {
    /// Watts–Strogatz spec with the other families' fields at their
    /// defaults.
    pub fn ws(n0: usize, alpha: usize, beta: f64) -> Self {
        Self {
            kind: ModelKind::Ws,
            n0,
            ws_alpha: alpha,
            ws_beta: beta,
            ..Self::defaults(n0)
        }
    }

    /// Erdős–Rényi spec.
    pub fn er(n0: usize, rho: f64) -> Self {
        Self {
            kind: ModelKind::Er,
            n0,
            er_rho: rho,
            ..Self::defaults(n0)
        }
    }

    /// Barabási–Albert spec.
    pub fn ba(n0: usize, kappa: usize, m: usize) -> Self {
        Self {
            kind: ModelKind::Ba,
            n0,
            ba_kappa: kappa,
            ba_m: m,
            ..Self::defaults(n0)
        }
    }

    fn defaults(n0: usize) -> Self {
        Self {
            kind: ModelKind::Er,
            n0,
            ws_alpha: 15,
            ws_beta: 0.7,
            er_rho: 0.15,
            ba_kappa: 50.min(n0),
            ba_m: 5,
        }
    }

    fn validate(&self) -> Result<()> {
        if self.n0 < 2 {
            return Err(Error::BadSpec("n0 must be at least 2".into()));
        }
        match self.kind {
            ModelKind::Ws => {
                if self.ws_alpha == 0 || self.ws_alpha >= self.n0 {
                    return Err(Error::BadSpec(format!(
                        "ws_alpha must be in 1..n0, got {} with n0 = {}",
                        self.ws_alpha, self.n0
                    )));
                }
                if !(0.0..=1.0).contains(&self.ws_beta) {
                    return Err(Error::BadSpec(format!(
                        "ws_beta must be a probability, got {}",
                        self.ws_beta
                    )));
                }
            }
            ModelKind::Er => {
                if !(0.0..=1.0).contains(&self.er_rho) {
                    return Err(Error::BadSpec(format!(
                        "er_rho must be a probability, got {}",
                        self.er_rho
                    )));
                }
            }
            ModelKind::Ba => {
                if self.ba_kappa < 2 || self.ba_kappa > self.n0 {
                    return Err(Error::BadSpec(format!(
                        "ba_kappa must be in 2..=n0, got {} with n0 = {}",
                        self.ba_kappa, self.n0
                    )));
                }
                if self.ba_m == 0 || self.ba_m > self.ba_kappa {
                    return Err(Error::BadSpec(format!(
                        "ba_m must be in 1..=ba_kappa, got {}",
                        self.ba_m
                    )));
                }
            }
        }
        Ok(())
    }
}

/// Draws one graph of the described family. All weights are 1.
pub fn generate<F: Scalar, R: Rng + ?Sized>(spec: &ModelSpec, rng: &mut R) -> Result<Graph<F>> {
    spec.validate()?;
    let w = match spec.kind {
        ModelKind::Ws => generate_ws(spec.n0, spec.ws_alpha, spec.ws_beta, rng),
        ModelKind::Er => generate_er(spec.n0, spec.er_rho, rng),
        ModelKind::Ba => generate_ba(spec.n0, spec.ba_kappa, spec.ba_m, rng),
    };
    Graph::new(w)
}

fn generate_ws<F: Scalar, R: Rng + ?Sized>(
    n: usize,
    alpha: usize,
    beta: f64,
    rng: &mut R,
) -> Array2<F> {
    let mut w = Array2::zeros((n, n));
    let clockwise = alpha.div_ceil(2);
    // Ring lattice: every node's ⌈α/2⌉ clockwise links; the ⌊α/2⌋
    // counter-clockwise ones arrive from the other endpoints.
    for i in 0..n {
        for d in 1..=clockwise {
            let j = (i + d) % n;
            w[[i, j]] = F::one();
            w[[j, i]] = F::one();
        }
    }
    if beta > 0.0 {
        for i in 0..n {
            for d in 1..=clockwise {
                let j = (i + d) % n;
                if w[[i, j]] == F::zero() {
                    continue; // already rewired away by an earlier step
                }
                if rng.random::<f64>() >= beta {
                    continue;
                }
                // Degree-saturated nodes have nowhere to rewire to.
                let deg_i = (0..n).filter(|&u| u != i && w[[i, u]] > F::zero()).count();
                if deg_i >= n - 1 {
                    continue;
                }
                let new_j = loop {
                    let cand = rng.random_range(0..n);
                    if cand != i && w[[i, cand]] == F::zero() {
                        break cand;
                    }
                };
                w[[i, j]] = F::zero();
                w[[j, i]] = F::zero();
                w[[i, new_j]] = F::one();
                w[[new_j, i]] = F::one();
            }
        }
    }
    w
}

fn generate_er<F: Scalar, R: Rng + ?Sized>(n: usize, rho: f64, rng: &mut R) -> Array2<F> {
    let mut w = Array2::zeros((n, n));
    for i in 0..n {
        for j in (i + 1)..n {
            if rng.random::<f64>() < rho {
                w[[i, j]] = F::one();
                w[[j, i]] = F::one();
            }
        }
    }
    w
}

fn generate_ba<F: Scalar, R: Rng + ?Sized>(
    n: usize,
    kappa: usize,
    m: usize,
    rng: &mut R,
) -> Array2<F> {
    let mut w = Array2::zeros((n, n));
    // Connected ring seed.
    for i in 0..kappa {
        let j = (i + 1) % kappa;
        w[[i, j]] = F::one();
        w[[j, i]] = F::one();
    }
    // Every edge contributes both endpoints, so sampling this list
    // uniformly is degree-proportional sampling.
    let mut endpoints: Vec<usize> = Vec::with_capacity(2 * (kappa + n * m));
    for i in 0..kappa {
        endpoints.push(i);
        endpoints.push((i + 1) % kappa);
    }
    if kappa == 2 {
        // The two-node "ring" is a single edge; drop the duplicate pair.
        endpoints.truncate(2);
    }
    for v in kappa..n {
        let mut chosen: Vec<usize> = Vec::with_capacity(m);
        while chosen.len() < m {
            let t = endpoints[rng.random_range(0..endpoints.len())];
            if t != v && !chosen.contains(&t) {
                chosen.push(t);
            }
        }
        for &t in &chosen {
            w[[v, t]] = F::one();
            w[[t, v]] = F::one();
            endpoints.push(v);
            endpoints.push(t);
        }
    }
    w
}

/// The three evolution processes.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Process {
    /// Remove a uniformly chosen node and its edges.
    Delete,
    /// Strip a uniformly chosen node's edges and re-wire it by the
    /// foreign rule.
    Rewire,
    /// Append one node wired by the foreign rule.
    Add,
}

impl std::fmt::Display for Process {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.write_str(match self {
            Process::Delete => "delete",
            Process::Rewire => "rewire",
            Process::Add => "add",
        })
    }
}

/// How rewired/added nodes attach — deliberately a *different* wiring
/// style than the network being evolved, so the evolution drives the
/// graph away from its original family.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ForeignRule {
    /// Attach to each existing node independently with probability `rho`.
    Er {
        /// Attachment probability.
        rho: f64,
    },
    /// Attach to the `alpha` nearest nodes by circular index distance,
    /// then rewire each such edge with probability `beta`.
    WsLocal {
        /// Neighbor count.
        alpha: usize,
        /// Rewiring probability.
        beta: f64,
    },
}

/// The conventional foreign rule for each origin family: WS and BA
/// origins get ER(ρ = 0.5) attachment; ER origins get local WS-style
/// attachment (α = 40, β = 0.1).
pub fn default_foreign(origin: ModelKind) -> ForeignRule {
    match origin {
        ModelKind::Ws | ModelKind::Ba => ForeignRule::Er { rho: 0.5 },
        ModelKind::Er => ForeignRule::WsLocal {
            alpha: 40,
            beta: 0.1,
        },
    }
}

/// One evolution step: the process plus the foreign wiring rule it uses
/// (ignored by `Delete`).
#[derive(Debug, Clone, Copy)]
pub struct EvolutionSpec {
    /// Which process runs each iteration.
    pub process: Process,
    /// Total iterations the experiment will run (the step itself does not
    /// consume this, but specs travel as one unit).
    pub iterations: usize,
    /// Wiring rule for `Rewire`/`Add`.
    pub foreign: ForeignRule,
}

/// Applies one evolution step, returning the evolved graph. The result
/// may be disconnected; downstream representation handles that by
/// largest-component extraction, so steps are never rejected.
pub fn evolve_step<F: Scalar, R: Rng + ?Sized>(
    graph: &Graph<F>,
    spec: &EvolutionSpec,
    rng: &mut R,
) -> Result<Graph<F>> {
    let n = graph.n();
    match spec.process {
        Process::Delete => {
            if n <= 2 {
                return Err(Error::TooSmall);
            }
            let victim = rng.random_range(0..n);
            let kept: Vec<usize> = (0..n).filter(|&i| i != victim).collect();
            Ok(graph.induced_subgraph(&kept))
        }
        Process::Rewire => {
            if n < 2 {
                return Err(Error::TooSmall);
            }
            let v = rng.random_range(0..n);
            let mut w = graph.weights().clone();
            for u in 0..n {
                w[[v, u]] = F::zero();
                w[[u, v]] = F::zero();
            }
            attach(&mut w, v, spec.foreign, rng);
            Graph::new(w)
        }
        Process::Add => {
            let mut w = Array2::zeros((n + 1, n + 1));
            w.slice_mut(ndarray::s![..n, ..n]).assign(graph.weights());
            attach(&mut w, n, spec.foreign, rng);
            Graph::new(w)
        }
    }
}

/// Wires node `v` into the (otherwise finished) weight matrix by the
/// foreign rule. `v`'s row is assumed empty on entry.
fn attach<F: Scalar, R: Rng + ?Sized>(
    w: &mut Array2<F>,
    v: usize,
    rule: ForeignRule,
    rng: &mut R,
) {
    let n = w.nrows();
    match rule {
        ForeignRule::Er { rho } => {
            for u in 0..n {
                if u != v && rng.random::<f64>() < rho {
                    w[[v, u]] = F::one();
                    w[[u, v]] = F::one();
                }
            }
        }
        ForeignRule::WsLocal { alpha, beta } => {
            let alpha = alpha.min(n - 1);
            let clockwise = alpha.div_ceil(2);
            let counter = alpha / 2;
            let mut targets: Vec<usize> = Vec::with_capacity(alpha);
            for d in 1..=clockwise {
                targets.push((v + d) % n);
            }
            for d in 1..=counter {
                targets.push((v + n - d) % n);
            }
            targets.dedup();
            for &u in &targets {
                if u == v {
                    continue;
                }
                if rng.random::<f64>() < beta {
                    let deg_v = (0..n).filter(|&x| x != v && w[[v, x]] > F::zero()).count();
                    if deg_v >= n - 1 {
                        continue;
                    }
                    let cand = loop {
                        let c = rng.random_range(0..n);
                        if c != v && w[[v, c]] == F::zero() {
                            break c;
                        }
                    };
                    w[[v, cand]] = F::one();
                    w[[cand, v]] = F::one();
                } else {
                    w[[v, u]] = F::one();
                    w[[u, v]] = F::one();
                }
            }
        }
    }
}
