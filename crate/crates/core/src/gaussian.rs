//! The graph → Gaussian mapping.
//!
//! A connected weighted graph is represented as a zero-mean multivariate
//! normal whose covariance is built from the Laplacian:
//!
//! * [`RepresentationMode::Sigma`]: `Σ = L + J/n`,
//! * [`RepresentationMode::SigmaDual`]: `Σ♡ = L† + J/n`.
//!
//! For connected graphs these two matrices are exact inverses of each
//! other, so a [`NetworkGaussian`] always carries both its covariance and
//! its precision in closed form — no numeric inversion anywhere.
//!
//! Sampling goes through the symmetric eigen-square-root of the covariance
//! (`x = A·z` with `A·Aᵀ = Σ` and `z` standard normal). A symmetric factor,
//! rather than a triangular one, keeps the coupling construction below
//! independent of any factorization's node-ordering conventions.
//!
//! Two graphs are compared through *coupled* samples: with
//! [`Coupling::CommonSource`] both graphs' samples are driven by the same
//! standard-normal source per row, so their dependence reflects how similar
//! the two representations are; with [`Coupling::Independent`] the streams
//! are separate and every cross-graph statistic collapses to its
//! no-information baseline.

use ndarray::Array2;
use rand::Rng;
use rand_distr::StandardNormal;

use crate::error::{Error, Result};
use crate::graph::Graph;
use crate::linalg::sym_eigen;
use crate::scalar::Scalar;
use crate::spectral::{RepresentationMode, SpectralCache};

/// How joint samples of two representations are drawn.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Coupling {
    /// One shared standard-normal source per row: `x_a = A_a·z`,
    /// `x_b = A_b·z`. The default for cross-network estimators.
    CommonSource,
    /// Separate sources; the two sample matrices are independent.
    Independent,
}

impl std::fmt::Display for Coupling {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Coupling::CommonSource => write!(f, "common"),
            Coupling::Independent => write!(f, "independent"),
        }
    }
}

/// A zero-mean Gaussian representation of one graph.
#[derive(Debug, Clone)]
pub struct NetworkGaussian<F> {
    n: usize,
    covariance: Array2<F>,
    precision: Array2<F>,
    logdet_cov: F,
    entropy: F,
    sqrt_factor: Array2<F>,
    mode: RepresentationMode,
}

impl<F: Scalar> NetworkGaussian<F> {
    /// Dimension (node count of the underlying graph).
    pub fn n(&self) -> usize {
        self.n
    }

    /// Covariance matrix for this mode.
    pub fn covariance(&self) -> &Array2<F> {
        &self.covariance
    }

    /// Inverse covariance (closed form, not numerically inverted).
    pub fn precision(&self) -> &Array2<F> {
        &self.precision
    }

    /// `ln det` of the covariance.
    pub fn logdet_cov(&self) -> F {
        self.logdet_cov
    }

    /// Differential entropy in nats:
    /// `n/2 + (n/2)·ln 2π + ½·ln det Σ`.
    pub fn entropy(&self) -> F {
        self.entropy
    }

    /// Symmetric square root `A` with `A·Aᵀ = covariance`.
    pub fn sqrt_factor(&self) -> &Array2<F> {
        &self.sqrt_factor
    }

    pub fn mode(&self) -> RepresentationMode {
        self.mode
    }

    /// Wraps an arbitrary symmetric positive-definite covariance as a
    /// representation (used by perturbation analyses and tests; graph
    /// representations should go through [`represent`]).
    pub fn from_covariance(covariance: Array2<F>, mode: RepresentationMode) -> Result<Self> {
        let n = covariance.nrows();
        if n != covariance.ncols() {
            return Err(Error::DimensionMismatch {
                left: n,
                right: covariance.ncols(),
            });
        }
        let eig = sym_eigen(&covariance);
        if eig.values.iter().any(|&l| l <= F::zero()) {
            return Err(Error::NotPositiveDefinite);
        }
        let mut precision = Array2::zeros((n, n));
        let mut sqrt = Array2::zeros((n, n));
        let mut logdet = F::zero();
        for (k, &lam) in eig.values.iter().enumerate() {
            logdet += lam.ln();
            let inv = F::one() / lam;
            let s = lam.sqrt();
            for i in 0..n {
                let vi = eig.vectors[[i, k]];
                for j in 0..n {
                    let vj = eig.vectors[[j, k]];
                    precision[[i, j]] += vi * inv * vj;
                    sqrt[[i, j]] += vi * s * vj;
                }
            }
        }
        Ok(Self {
            n,
            entropy: gaussian_entropy(n, logdet),
            covariance,
            precision,
            logdet_cov: logdet,
            sqrt_factor: sqrt,
            mode,
        })
    }
}

fn gaussian_entropy<F: Scalar>(n: usize, logdet: F) -> F {
    let half = F::cast(0.5);
    let nf = F::cast_usize(n);
    half * nf + half * nf * F::cast(std::f64::consts::TAU).ln() + half * logdet
}

/// Builds the Gaussian representation of a connected graph.
///
/// Covariance and precision come from the cached spectral data in closed
/// form; fails with [`Error::NotConnected`] if the graph has more than one
/// component (the covariance would be singular).
pub fn represent<F: Scalar>(graph: &Graph<F>, mode: RepresentationMode) -> Result<NetworkGaussian<F>> {
    represent_from_cache(&SpectralCache::new(graph), mode)
}

/// Like [`represent`], reusing an existing [`SpectralCache`].
pub fn represent_from_cache<F: Scalar>(
    cache: &SpectralCache<F>,
    mode: RepresentationMode,
) -> Result<NetworkGaussian<F>> {
    if !cache.connected() {
        return Err(Error::NotConnected);
    }
    let inverse_mode = match mode {
        RepresentationMode::Sigma => RepresentationMode::SigmaDual,
        RepresentationMode::SigmaDual => RepresentationMode::Sigma,
    };
    let logdet = cache.logdet(mode);
    Ok(NetworkGaussian {
        n: cache.n(),
        covariance: cache.covariance(mode),
        precision: cache.covariance(inverse_mode),
        logdet_cov: logdet,
        entropy: gaussian_entropy(cache.n(), logdet),
        sqrt_factor: cache.sqrt_factor(mode),
        mode,
    })
}

/// Matrix of i.i.d. standard normals, drawn row by row.
///
/// Draws are made at `f64` and narrowed, so the variate sequence — and
/// therefore every downstream sample — is identical across scalar types
/// for a given RNG stream.
fn standard_normal_matrix<F: Scalar, R: Rng + ?Sized>(
    rows: usize,
    cols: usize,
    rng: &mut R,
) -> Array2<F> {
    let mut z = Array2::zeros((rows, cols));
    for i in 0..rows {
        for j in 0..cols {
            let x: f64 = rng.sample(StandardNormal);
            z[[i, j]] = F::cast(x);
        }
    }
    z
}

/// Draws `count` rows from the representation: `x = z·A` with `z` standard
/// normal and `A` the symmetric square-root factor.
pub fn sample<F: Scalar, R: Rng + ?Sized>(
    g: &NetworkGaussian<F>,
    count: usize,
    rng: &mut R,
) -> Array2<F> {
    let z = standard_normal_matrix::<F, R>(count, g.n, rng);
    z.dot(&g.sqrt_factor)
}

/// Draws `count` joint rows from two representations under the requested
/// coupling. Both marginals are exact either way; only the cross-dependence
/// differs.
pub fn coupled_sample<F: Scalar, R: Rng + ?Sized>(
    a: &NetworkGaussian<F>,
    b: &NetworkGaussian<F>,
    count: usize,
    coupling: Coupling,
    rng: &mut R,
) -> Result<(Array2<F>, Array2<F>)> {
    if a.n != b.n {
        return Err(Error::DimensionMismatch {
            left: a.n,
            right: b.n,
        });
    }
    match coupling {
        Coupling::CommonSource => {
            let z = standard_normal_matrix::<F, R>(count, a.n, rng);
            Ok((z.dot(&a.sqrt_factor), z.dot(&b.sqrt_factor)))
        }
        Coupling::Independent => {
            let za = standard_normal_matrix::<F, R>(count, a.n, rng);
            let zb = standard_normal_matrix::<F, R>(count, b.n, rng);
            Ok((za.dot(&a.sqrt_factor), zb.dot(&b.sqrt_factor)))
        }
    }
}
