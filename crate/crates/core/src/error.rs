//! Error type shared by every module in the crate.

use thiserror::Error;

/// Everything that can go wrong while validating graphs, building
/// representations, or running estimators.
///
/// Variants that point at data name the offending indices so callers can
/// locate the problem in their input rather than re-deriving it.
#[derive(Debug, Error)]
pub enum Error {
    /// Weight matrix entry `(i, j)` disagrees with `(j, i)`.
    #[error("weight matrix is asymmetric at ({i},{j}): {a} vs {b}")]
    AsymmetricMatrix { i: usize, j: usize, a: f64, b: f64 },

    /// Negative edge weight; only non-negative weights are supported.
    #[error("negative weight {w} at ({i},{j})")]
    NegativeWeight { i: usize, j: usize, w: f64 },

    /// NaN or infinite weight.
    #[error("non-finite weight at ({i},{j})")]
    NonFiniteWeight { i: usize, j: usize },

    /// Nonzero diagonal entry; graphs here have no self-loops.
    #[error("self-loop at node {node} (diagonal weight {w})")]
    SelfLoop { node: usize, w: f64 },

    /// Operation requires at least one node.
    #[error("graph has no nodes")]
    EmptyGraph,

    /// A node index was outside `0..n`.
    #[error("node {node} out of range for a graph of {n} nodes")]
    NodeOutOfRange { node: usize, n: usize },

    /// The operation is defined only for connected graphs (the Gaussian
    /// covariance `L + J/n` is singular otherwise).
    #[error("graph is not connected")]
    NotConnected,

    /// Two objects that must agree in size do not.
    #[error("dimension mismatch: {left} vs {right}")]
    DimensionMismatch { left: usize, right: usize },

    /// Laplacian energy is zero (edgeless graph), so energy ratios are
    /// undefined.
    #[error("graph has zero Laplacian energy")]
    ZeroEnergy,

    /// An estimator needs strictly more samples than it was given.
    #[error("too few samples: got {got}, need more than {need}")]
    TooFewSamples { got: usize, need: usize },

    /// Normal-equation Gram matrix is singular and no ridge was applied.
    #[error("gram matrix is singular (ridge = 0)")]
    SingularGram,

    /// A covariance that must be positive definite is not.
    #[error("covariance is not positive definite")]
    NotPositiveDefinite,

    /// The conditioning block of a Schur complement is singular.
    #[error("conditioning block is singular")]
    SingularBlock,

    /// Invalid partition size: need `1 <= k <= n - 1`.
    #[error("invalid partition size {k} for {n} nodes")]
    BadSize { k: usize, n: usize },

    /// Regression residuals are identically zero up to rounding, so the
    /// causality ratio is unbounded. Happens when the two representations
    /// coincide under common-source coupling: the source then predicts the
    /// target deterministically.
    #[error("degenerate residuals: the source variable determines the target exactly")]
    DegenerateResiduals,

    /// Size-alignment target is out of range.
    #[error("alignment target {target} invalid for a graph of {n} nodes")]
    BadTarget { target: usize, n: usize },

    /// Centrality filtering disconnected the survivor and the caller asked
    /// for strict behavior instead of repair.
    #[error("size alignment disconnected the filtered graph")]
    DisconnectedResult,

    /// Random-model parameters are out of their documented ranges.
    #[error("invalid model parameters: {0}")]
    BadSpec(String),

    /// Evolution step cannot shrink the graph any further.
    #[error("graph too small for this evolution step")]
    TooSmall,

    /// A metric setup violated its preconditions (duplicate targets,
    /// negative variances, and similar).
    #[error("invalid setup: {0}")]
    InvalidSetup(String),

    /// Underlying I/O failure.
    #[error("i/o error: {0}")]
    Io(#[from] std::io::Error),

    /// Input file does not conform to the documented format.
    #[error("parse error at line {line}: {msg}")]
    Parse { line: usize, msg: String },
}

pub type Result<T> = std::result::Result<T, Error>;
