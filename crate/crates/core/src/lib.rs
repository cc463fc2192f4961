//! Weighted undirected graphs as zero-mean Gaussian distributions, and
//! the information-theoretic machinery that comparison unlocks.
//!
//! A connected graph's Laplacian `L`, offset by the constant matrix
//! `J/n`, is positive definite, so `Σ = L + J/n` (or its dual
//! `Σ♡ = L† + J/n`, the exact inverse) can serve as the covariance of a
//! Gaussian representation of the graph. Once two graphs live in the same
//! distribution family, their relations become computable:
//!
//! * **KL divergence** — closed-form directional difference;
//! * **mutual information** — sample-based dependence under a chosen
//!   coupling of the two Gaussians;
//! * **Fisher information** — decoding precision for perturbations
//!   injected at chosen nodes;
//! * **Granger causality / transfer entropy** — does one graph's sample
//!   stream help predict held-out pieces of the other's?
//!
//! Supporting cast: random-partition plumbing ([`metrics`]), Laplacian
//! centrality and energy ([`spectral`]), size alignment for unequal
//! graphs ([`align`]), the WS/ER/BA generators with evolution steps
//! ([`models`]), nearest-neighbor entropy estimation ([`estimators`]),
//! and text formats ([`io`]).
//!
//! Everything numeric is generic over the scalar type via [`Scalar`]
//! (`f64` is the default and the recommendation; `f32` works and shares
//! the same random streams). RNG flows in explicitly everywhere, so any
//! seed fixes every output bit.
//!
//! ```
//! use ndarray::array;
//! use netgauss::{kl_divergence, represent, Graph, RepresentationMode};
//!
//! let triangle = Graph::new(array![
//!     [0.0, 1.0, 1.0],
//!     [1.0, 0.0, 1.0],
//!     [1.0, 1.0, 0.0],
//! ])?;
//! let g = represent(&triangle, RepresentationMode::Sigma)?;
//! assert_eq!(kl_divergence(&g, &g)?, 0.0);
//! # Ok::<(), netgauss::Error>(())
//! ```

pub mod align;
pub mod error;
pub mod estimators;
pub mod gaussian;
pub mod graph;
pub mod io;
pub mod linalg;
pub mod metrics;
pub mod models;
pub mod scalar;
pub mod spectral;

pub use align::{align_down, align_pair, Alignment, DisconnectPolicy};
pub use error::{Error, Result};
pub use estimators::{
    digamma, kl_entropy, kl_entropy_from_gram, knn_search, ln_unit_ball_volume,
    ols_residual_covariance, EntropyEstimate, ResidualCovariance,
};
pub use gaussian::{coupled_sample, represent, represent_from_cache, Coupling, NetworkGaussian};
pub use graph::{cost_key, CostMap, Graph};
pub use io::{
    parse_edge_list, parse_pajek, read_edge_list, read_graph, read_pajek, write_edge_list,
    write_edge_list_file,
};
pub use metrics::{
    conditional_covariance, conditional_entropy, fisher_matrix, fisher_quantity, granger,
    kl_divergence, mutual_information, random_partition, relate, transfer_entropy,
    CausalityEstimate, FisherSetup, PairAnalysis, Partition, RelationReport, SamplingConfig,
};
pub use models::{
    default_foreign, evolve_step, generate, EvolutionSpec, ForeignRule, ModelKind, ModelSpec,
    Process,
};
pub use scalar::Scalar;
pub use spectral::{
    dirichlet_smoothness, expected_smoothness, laplacian, laplacian_centralities,
    laplacian_centrality, laplacian_energy, pseudoinverse, RepresentationMode, SpectralCache,
};

/// Single-precision graph.
pub type Graph32 = graph::Graph<f32>;
/// Double-precision graph (same as the default `Graph`).
pub type Graph64 = graph::Graph<f64>;
/// Single-precision representation.
pub type NetworkGaussian32 = gaussian::NetworkGaussian<f32>;
/// Double-precision representation (same as the default `NetworkGaussian`).
pub type NetworkGaussian64 = gaussian::NetworkGaussian<f64>;
