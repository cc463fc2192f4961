//! Relation measures between two network representations: KL divergence,
//! mutual information, Fisher information, Granger causality, and transfer
//! entropy, plus the random node partitions the causal measures average
//! over.
//!
//! The analytic measures (KL, Fisher, conditional covariances) come
//! straight from the Gaussian closed forms. The sample-based ones (MI,
//! Granger, transfer entropy) draw one set of coupled samples and reuse it
//! everywhere so that a single RNG stream fixes the whole report; the
//! draw order is documented on each operation.
//!
//! Directional naming convention used throughout: a suffix `_ab` means the
//! influence of `a` **on** `b` — the measure partitions `b` and asks how
//! much `a`'s samples help explain the held-out block of `b`.

use ndarray::{concatenate, Array1, Array2, Axis};
use rand::Rng;

use crate::error::{Error, Result};
use crate::estimators::{kl_entropy_from_gram, ols_residual_covariance, EntropyEstimate};
use crate::gaussian::{coupled_sample, Coupling, NetworkGaussian};
use crate::linalg::{cholesky, cholesky_logdet, cholesky_solve, max_abs_diff, psd_logdet};
use crate::scalar::Scalar;

/// Covariance distance below which two common-source representations are
/// treated as the same distribution: their samples coincide exactly, so
/// joint entropies and regression residuals degenerate.
pub(crate) const IDENTICAL_COV_TOL: f64 = 1e-8;

/// A split of the node indices `0..n` into a conditioning block (`circ`)
/// and a predicted block (`star`). Both blocks are nonempty, sorted, and
/// together cover every node exactly once.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Partition {
    circ: Vec<usize>,
    star: Vec<usize>,
}

impl Partition {
    /// Builds the partition whose conditioning block is `circ` (need not
    /// be sorted); the predicted block is the complement in `0..n`.
    pub fn new(mut circ: Vec<usize>, n: usize) -> Result<Self> {
        circ.sort_unstable();
        circ.dedup();
        if circ.is_empty() || circ.len() >= n {
            return Err(Error::BadSize { k: circ.len(), n });
        }
        if let Some(&worst) = circ.last() {
            if worst >= n {
                return Err(Error::NodeOutOfRange { node: worst, n });
            }
        }
        let mut mask = vec![false; n];
        for &i in &circ {
            mask[i] = true;
        }
        let star = (0..n).filter(|&i| !mask[i]).collect();
        Ok(Self { circ, star })
    }

    /// Conditioning-block indices, ascending.
    pub fn circ(&self) -> &[usize] {
        &self.circ
    }

    /// Predicted-block indices, ascending.
    pub fn star(&self) -> &[usize] {
        &self.star
    }

    /// Total node count.
    pub fn n(&self) -> usize {
        self.circ.len() + self.star.len()
    }
}

/// Draws a uniformly random `k`-subset of `0..n` as the conditioning
/// block. Requires `1 ≤ k ≤ n−1` so both blocks are nonempty.
pub fn random_partition<R: Rng + ?Sized>(n: usize, k: usize, rng: &mut R) -> Result<Partition> {
    if k == 0 || k >= n {
        return Err(Error::BadSize { k, n });
    }
    let circ = rand::seq::index::sample(rng, n, k).into_vec();
    Partition::new(circ, n)
}

/// Sampling knobs for the estimator-backed measures.
#[derive(Debug, Clone, Copy)]
pub struct SamplingConfig {
    /// Number of coupled sample rows to draw.
    pub samples: usize,
    /// Neighbor order for the entropy estimator.
    pub knn_k: usize,
    /// How the two representations' sample streams are tied together.
    pub coupling: Coupling,
}

impl Default for SamplingConfig {
    fn default() -> Self {
        Self {
            samples: 2000,
            knn_k: 3,
            coupling: Coupling::CommonSource,
        }
    }
}

/// A causal measure averaged over random partitions, keeping the
/// per-partition values for correlation studies.
#[derive(Debug, Clone)]
pub struct CausalityEstimate<F> {
    /// Mean of `per_partition` (exactly).
    pub value: F,
    /// One value per partition, in draw order.
    pub per_partition: Vec<F>,
}

impl<F: Scalar> CausalityEstimate<F> {
    fn from_values(per_partition: Vec<F>) -> Self {
        let sum: F = per_partition.iter().copied().sum();
        let value = sum / F::cast_usize(per_partition.len());
        Self {
            value,
            per_partition,
        }
    }
}

/// Kullback–Leibler divergence between two representations of the same
/// size and mode:
///
/// ```text
/// KL(a‖b) = ½·[ tr(Σ_b⁻¹·Σ_a) − n + ln det Σ_b − ln det Σ_a ]
/// ```
///
/// Nonnegative up to rounding; negatives above −1e-9 are clamped to zero,
/// anything lower is left alone so tests can catch genuine violations.
/// Bit-identical covariances short-circuit to exactly zero. The two
/// directions genuinely differ for asymmetric pairs.
pub fn kl_divergence<F: Scalar>(a: &NetworkGaussian<F>, b: &NetworkGaussian<F>) -> Result<F> {
    check_pair(a, b)?;
    // Bit-identical covariances are the same distribution; skip the trace
    // arithmetic so the self-divergence is exactly zero, not ~1e-15.
    if a.covariance() == b.covariance() {
        return Ok(F::zero());
    }
    let n = a.n();
    let cross = b.precision().dot(a.covariance());
    let trace: F = (0..n).map(|i| cross[[i, i]]).sum();
    let val = F::cast(0.5) * (trace - F::cast_usize(n) + b.logdet_cov() - a.logdet_cov());
    if val < F::zero() && val >= F::cast(-1e-9) {
        Ok(F::zero())
    } else {
        Ok(val)
    }
}

/// Mutual information between two representations:
/// `MI = H(a) + H(b) − Ĥ(joint)`, with the joint entropy estimated from
/// coupled samples of the concatenated `2n`-dimensional vector.
///
/// Returns `+∞` as a sentinel when the joint distribution is degenerate —
/// either the two common-source representations coincide (their samples
/// are identical, so the joint collapses onto a subspace) or the joint
/// estimate itself reports tied points.
///
/// RNG order: one `coupled_sample` call, nothing else.
pub fn mutual_information<F: Scalar, R: Rng + ?Sized>(
    a: &NetworkGaussian<F>,
    b: &NetworkGaussian<F>,
    cfg: &SamplingConfig,
    rng: &mut R,
) -> Result<F> {
    check_pair(a, b)?;
    if indistinguishable(a, b, cfg.coupling) {
        return Ok(F::infinity());
    }
    let (xa, xb) = coupled_sample(a, b, cfg.samples, cfg.coupling, rng)?;
    let joint = concatenate(Axis(1), &[xa.view(), xb.view()]).expect("same rows");
    let est = crate::estimators::kl_entropy(joint.view(), cfg.knn_k)?;
    Ok(mutual_information_from_joint(a, b, &est))
}

fn mutual_information_from_joint<F: Scalar>(
    a: &NetworkGaussian<F>,
    b: &NetworkGaussian<F>,
    joint: &EntropyEstimate<F>,
) -> F {
    if joint.degenerate {
        F::infinity()
    } else {
        a.entropy() + b.entropy() - joint.value
    }
}

/// A diagonal-perturbation experiment for Fisher information: parameter
/// `theta[i]` adds variance `theta[i]` at node `target_nodes[i]`, so the
/// perturbed covariance is `C(Θ) = Σ + Σ_i θ_i·E(t_i)` with `E(t)` the
/// single-entry matrix at `(t, t)`.
#[derive(Debug, Clone)]
pub struct FisherSetup<F> {
    theta: Array1<F>,
    target_nodes: Vec<usize>,
}

impl<F: Scalar> FisherSetup<F> {
    /// Validates that every parameter is a nonnegative finite variance and
    /// the target nodes are distinct.
    pub fn new(theta: Array1<F>, target_nodes: Vec<usize>) -> Result<Self> {
        if theta.len() != target_nodes.len() {
            return Err(Error::DimensionMismatch {
                left: theta.len(),
                right: target_nodes.len(),
            });
        }
        if theta.is_empty() {
            return Err(Error::InvalidSetup("empty parameter vector".into()));
        }
        for &t in theta.iter() {
            let valid = t.is_finite() && t >= F::zero();
            if !valid {
                return Err(Error::InvalidSetup(format!(
                    "parameter variances must be finite and nonnegative, got {t}"
                )));
            }
        }
        let mut seen = target_nodes.clone();
        seen.sort_unstable();
        seen.dedup();
        if seen.len() != target_nodes.len() {
            return Err(Error::InvalidSetup(
                "target nodes must be distinct".into(),
            ));
        }
        Ok(Self {
            theta,
            target_nodes,
        })
    }

    /// The parameter vector Θ.
    pub fn theta(&self) -> &Array1<F> {
        &self.theta
    }

    /// Perturbed node indices, aligned with `theta`.
    pub fn target_nodes(&self) -> &[usize] {
        &self.target_nodes
    }

    /// Number of parameters.
    pub fn len(&self) -> usize {
        self.theta.len()
    }

    /// True when the setup has no parameters (never, per construction).
    pub fn is_empty(&self) -> bool {
        self.theta.is_empty()
    }

    /// The derivative `∂C/∂θ_i`: a single 1 at `(t_i, t_i)`.
    pub fn derivative_matrix(&self, i: usize, n: usize) -> Array2<F> {
        let mut m = Array2::zeros((n, n));
        m[[self.target_nodes[i], self.target_nodes[i]]] = F::one();
        m
    }

    /// The perturbed covariance `C(Θ)` on top of `base`.
    pub fn perturbed_covariance(&self, base: &NetworkGaussian<F>) -> Result<Array2<F>> {
        let n = base.n();
        for &t in &self.target_nodes {
            if t >= n {
                return Err(Error::BadTarget { target: t, n });
            }
        }
        let mut c = base.covariance().clone();
        for (i, &t) in self.target_nodes.iter().enumerate() {
            c[[t, t]] += self.theta[i];
        }
        Ok(c)
    }
}

/// Fisher information matrix of the diagonal-perturbation family at Θ:
///
/// ```text
/// F_ij = ½·tr[ C⁻¹·(∂C/∂θ_i)·C⁻¹·(∂C/∂θ_j) ]
/// ```
///
/// For single-entry derivatives the trace collapses to
/// `½·(C⁻¹)²_{t_i t_j}`, which is what is computed here — only the needed
/// columns of `C⁻¹` are solved for. Symmetric positive semidefinite.
pub fn fisher_matrix<F: Scalar>(
    setup: &FisherSetup<F>,
    base: &NetworkGaussian<F>,
) -> Result<Array2<F>> {
    let n = base.n();
    let k = setup.len();
    let c = setup.perturbed_covariance(base)?;
    let chol = cholesky(&c)?;
    // Columns t_1..t_k of C⁻¹ via unit right-hand sides.
    let mut rhs = Array2::zeros((n, k));
    for (j, &t) in setup.target_nodes().iter().enumerate() {
        rhs[[t, j]] = F::one();
    }
    let cols = cholesky_solve(&chol, &rhs);
    let half = F::cast(0.5);
    let mut f = Array2::zeros((k, k));
    for i in 0..k {
        for j in i..k {
            // (C⁻¹)_{t_i t_j} appears twice in the solved columns; average
            // the two readings so F is symmetric to the last bit.
            let entry = half * (cols[[setup.target_nodes()[i], j]] + cols[[setup.target_nodes()[j], i]]);
            let v = half * entry * entry;
            f[[i, j]] = v;
            f[[j, i]] = v;
        }
    }
    Ok(f)
}

/// Trace of [`fisher_matrix`] — the scalar decoding-precision summary.
pub fn fisher_quantity<F: Scalar>(
    setup: &FisherSetup<F>,
    base: &NetworkGaussian<F>,
) -> Result<F> {
    let f = fisher_matrix(setup, base)?;
    Ok((0..setup.len()).map(|i| f[[i, i]]).sum())
}

/// Conditional covariance of the predicted block given the conditioning
/// block — the Schur complement of the covariance onto the `star` rows:
///
/// ```text
/// Σ(ε) = Σ_⋆⋆ − Σ_⋆∘ · Σ_∘∘⁻¹ · Σ_∘⋆
/// ```
pub fn conditional_covariance<F: Scalar>(
    a: &NetworkGaussian<F>,
    p: &Partition,
) -> Result<Array2<F>> {
    if p.n() != a.n() {
        return Err(Error::DimensionMismatch {
            left: p.n(),
            right: a.n(),
        });
    }
    let sigma = a.covariance();
    let cc = select_block(sigma, p.circ(), p.circ());
    let cs = select_block(sigma, p.circ(), p.star());
    let ss = select_block(sigma, p.star(), p.star());
    let chol = cholesky(&cc).map_err(|_| Error::SingularBlock)?;
    let solved = cholesky_solve(&chol, &cs); // Σ_∘∘⁻¹ Σ_∘⋆
    let mut out = ss - cs.t().dot(&solved);
    // Symmetrize away the last-bit asymmetry the solve leaves behind.
    let half = F::cast(0.5);
    for i in 0..out.nrows() {
        for j in (i + 1)..out.ncols() {
            let m = half * (out[[i, j]] + out[[j, i]]);
            out[[i, j]] = m;
            out[[j, i]] = m;
        }
    }
    Ok(out)
}

/// Closed-form conditional entropy of the predicted block given the
/// conditioning block, in nats:
///
/// ```text
/// H(𝒳⋆ | 𝒳∘) = (n−k)/2·(1 + ln 2π) + ½·ln[ det Σ / det Σ_∘∘ ]
/// ```
pub fn conditional_entropy<F: Scalar>(a: &NetworkGaussian<F>, p: &Partition) -> Result<F> {
    if p.n() != a.n() {
        return Err(Error::DimensionMismatch {
            left: p.n(),
            right: a.n(),
        });
    }
    let half = F::cast(0.5);
    let cc = select_block(a.covariance(), p.circ(), p.circ());
    let chol = cholesky(&cc).map_err(|_| Error::SingularBlock)?;
    let ld_cc = cholesky_logdet(&chol);
    let m = F::cast_usize(p.star().len());
    Ok(m * half * (F::one() + F::cast(std::f64::consts::TAU).ln())
        + half * (a.logdet_cov() - ld_cc))
}

/// Granger causality of `other` on `target`: the mean over `h` random
/// partitions of
///
/// ```text
/// T_g = ln det Σ(ε) − ln det Σ̂(ε′)
/// ```
///
/// where `Σ(ε)` is the analytic conditional covariance of the predicted
/// block given the conditioning block alone, and `Σ̂(ε′)` is the residual
/// covariance of regressing the predicted block's samples on the
/// conditioning block's samples concatenated with *all* of `other`'s
/// samples. Positive values mean `other` helps the prediction.
///
/// Partition size is `⌊n/2⌋`. RNG order: one `coupled_sample` call, then
/// `h` partition draws.
///
/// Fails with [`Error::DegenerateResiduals`] when the pair is
/// common-source identical — the regression then reproduces the targets
/// exactly and the residual determinant is meaningless.
pub fn granger<F: Scalar, R: Rng + ?Sized>(
    target: &NetworkGaussian<F>,
    other: &NetworkGaussian<F>,
    h: usize,
    cfg: &SamplingConfig,
    rng: &mut R,
) -> Result<CausalityEstimate<F>> {
    check_pair(target, other)?;
    check_degenerate(target, other, cfg.coupling)?;
    if h == 0 {
        return Err(Error::InvalidSetup("at least one partition required".into()));
    }
    let (xt, xo) = coupled_sample(target, other, cfg.samples, cfg.coupling, rng)?;
    let parts = draw_partitions(target.n(), h, rng)?;
    let mut per = Vec::with_capacity(h);
    for p in &parts {
        per.push(granger_term(target, &xt, &xo, p)?);
    }
    Ok(CausalityEstimate::from_values(per))
}

/// Transfer entropy of `other` on `target`: the mean over `h` random
/// partitions of
///
/// ```text
/// T_t = H(𝒳⋆|𝒳∘) − Ĥ(𝒳⋆|𝒳∘ ⊕ 𝒳ᵒᵗʰᵉʳ)
/// ```
///
/// The first conditional entropy is analytic ([`conditional_entropy`]);
/// the second is estimated as `Ĥ(joint) − Ĥ(𝒳∘ ⊕ 𝒳ᵒᵗʰᵉʳ)` from the same
/// coupled samples. Positive values mean `other` resolves uncertainty
/// about the predicted block beyond what the conditioning block already
/// does.
///
/// Errors, partition size, and RNG order are as in [`granger`].
pub fn transfer_entropy<F: Scalar, R: Rng + ?Sized>(
    target: &NetworkGaussian<F>,
    other: &NetworkGaussian<F>,
    h: usize,
    cfg: &SamplingConfig,
    rng: &mut R,
) -> Result<CausalityEstimate<F>> {
    check_pair(target, other)?;
    check_degenerate(target, other, cfg.coupling)?;
    if h == 0 {
        return Err(Error::InvalidSetup("at least one partition required".into()));
    }
    let (xt, xo) = coupled_sample(target, other, cfg.samples, cfg.coupling, rng)?;
    let parts = draw_partitions(target.n(), h, rng)?;
    let gram_t = gram(&xt);
    let gram_o = gram(&xo);
    let joint = kl_entropy_from_gram(&(&gram_t + &gram_o), 2 * target.n(), cfg.knn_k)?;
    let mut per = Vec::with_capacity(h);
    for p in &parts {
        per.push(te_term(target, &xt, &gram_o, joint.value, cfg.knn_k, p)?);
    }
    Ok(CausalityEstimate::from_values(per))
}

/// Everything [`relate`] computes for one pair: the headline report plus
/// the per-partition causal values behind it.
#[derive(Debug, Clone)]
pub struct PairAnalysis<F> {
    /// Headline numbers.
    pub report: RelationReport<F>,
    /// Per-partition Granger values, direction a → b.
    pub tg_ab: Vec<F>,
    /// Per-partition Granger values, direction b → a.
    pub tg_ba: Vec<F>,
    /// Per-partition transfer-entropy values, direction a → b.
    pub tt_ab: Vec<F>,
    /// Per-partition transfer-entropy values, direction b → a.
    pub tt_ba: Vec<F>,
    /// `Some(reason)` when the sample-based measures were skipped because
    /// the pair is degenerate; the report then carries `+∞` mutual
    /// information and NaN causal values.
    pub degenerate: Option<String>,
}

/// The full set of relation measures for one ordered pair.
#[derive(Debug, Clone, Copy)]
pub struct RelationReport<F> {
    /// KL divergence a‖b, nats.
    pub kl_ab: F,
    /// KL divergence b‖a, nats.
    pub kl_ba: F,
    /// Mutual information in nats, `+∞` when the joint is degenerate.
    pub mi: F,
    /// Fisher information quantity (trace) for the supplied setup on `a`.
    pub fisher_quantity: F,
    /// Granger causality a → b (mean over partitions).
    pub granger_ab: F,
    /// Granger causality b → a.
    pub granger_ba: F,
    /// Transfer entropy a → b.
    pub te_ab: F,
    /// Transfer entropy b → a.
    pub te_ba: F,
    /// Alignment rationality of a (1 when nothing was trimmed).
    pub gamma_a: F,
    /// Alignment rationality of b.
    pub gamma_b: F,
    /// Partitions per direction.
    pub partitions_used: usize,
    /// Coupled sample rows drawn.
    pub samples_used: usize,
}

/// Computes the complete [`RelationReport`] for a size-aligned pair,
/// sharing one coupled-sample draw (and its Gram matrices) across mutual
/// information and both causal measures in both directions, so the
/// per-partition Granger and transfer-entropy values line up one-to-one.
///
/// `gamma_a`/`gamma_b` are passed through from whatever alignment
/// produced the pair. The Fisher setup is evaluated on `a`.
///
/// RNG order: one `coupled_sample` call, then `h` partitions of `b` (for
/// the a → b direction), then `h` partitions of `a`.
///
/// Degenerate pairs (common-source identical) do not fail: the analytic
/// measures are still reported, mutual information becomes `+∞`, causal
/// values become NaN, and `degenerate` carries the reason.
#[allow(clippy::too_many_arguments)]
pub fn relate<F: Scalar, R: Rng + ?Sized>(
    a: &NetworkGaussian<F>,
    b: &NetworkGaussian<F>,
    gamma_a: F,
    gamma_b: F,
    fisher: &FisherSetup<F>,
    h: usize,
    cfg: &SamplingConfig,
    rng: &mut R,
) -> Result<PairAnalysis<F>> {
    check_pair(a, b)?;
    if h == 0 {
        return Err(Error::InvalidSetup("at least one partition required".into()));
    }
    let kl_ab = kl_divergence(a, b)?;
    let kl_ba = kl_divergence(b, a)?;
    let fq = fisher_quantity(fisher, a)?;

    let mut report = RelationReport {
        kl_ab,
        kl_ba,
        mi: F::nan(),
        fisher_quantity: fq,
        granger_ab: F::nan(),
        granger_ba: F::nan(),
        te_ab: F::nan(),
        te_ba: F::nan(),
        gamma_a,
        gamma_b,
        partitions_used: h,
        samples_used: cfg.samples,
    };

    if indistinguishable(a, b, cfg.coupling) {
        report.mi = F::infinity();
        return Ok(PairAnalysis {
            report,
            tg_ab: Vec::new(),
            tg_ba: Vec::new(),
            tt_ab: Vec::new(),
            tt_ba: Vec::new(),
            degenerate: Some("common-source-identical-pair".into()),
        });
    }

    let (xa, xb) = coupled_sample(a, b, cfg.samples, cfg.coupling, rng)?;
    let parts_b = draw_partitions(b.n(), h, rng)?;
    let parts_a = draw_partitions(a.n(), h, rng)?;

    let gram_a = gram(&xa);
    let gram_b = gram(&xb);
    let joint = kl_entropy_from_gram(&(&gram_a + &gram_b), 2 * a.n(), cfg.knn_k)?;
    report.mi = mutual_information_from_joint(a, b, &joint);

    // a → b: partition b, let a's samples join the predictors.
    let (tg_ab, tt_ab) = causal_direction(b, &xb, &xa, &gram_a, joint.value, cfg.knn_k, &parts_b)?;
    // b → a: the mirror image.
    let (tg_ba, tt_ba) = causal_direction(a, &xa, &xb, &gram_b, joint.value, cfg.knn_k, &parts_a)?;

    report.granger_ab = tg_ab.value;
    report.granger_ba = tg_ba.value;
    report.te_ab = tt_ab.value;
    report.te_ba = tt_ba.value;

    Ok(PairAnalysis {
        report,
        tg_ab: tg_ab.per_partition,
        tg_ba: tg_ba.per_partition,
        tt_ab: tt_ab.per_partition,
        tt_ba: tt_ba.per_partition,
        degenerate: None,
    })
}

// ---------------------------------------------------------------------
// shared internals

fn check_pair<F: Scalar>(a: &NetworkGaussian<F>, b: &NetworkGaussian<F>) -> Result<()> {
    if a.n() != b.n() {
        return Err(Error::DimensionMismatch {
            left: a.n(),
            right: b.n(),
        });
    }
    if a.mode() != b.mode() {
        return Err(Error::InvalidSetup(
            "representations use different modes".into(),
        ));
    }
    Ok(())
}

fn indistinguishable<F: Scalar>(
    a: &NetworkGaussian<F>,
    b: &NetworkGaussian<F>,
    coupling: Coupling,
) -> bool {
    coupling == Coupling::CommonSource
        && max_abs_diff(a.covariance(), b.covariance()) <= F::cast(IDENTICAL_COV_TOL)
}

fn check_degenerate<F: Scalar>(
    a: &NetworkGaussian<F>,
    b: &NetworkGaussian<F>,
    coupling: Coupling,
) -> Result<()> {
    if indistinguishable(a, b, coupling) {
        Err(Error::DegenerateResiduals)
    } else {
        Ok(())
    }
}

fn draw_partitions<R: Rng + ?Sized>(n: usize, h: usize, rng: &mut R) -> Result<Vec<Partition>> {
    let k = (n / 2).max(1);
    (0..h).map(|_| random_partition(n, k, rng)).collect()
}

fn gram<F: Scalar>(x: &Array2<F>) -> Array2<F> {
    x.dot(&x.t())
}

fn select_block<F: Scalar>(m: &Array2<F>, rows: &[usize], cols: &[usize]) -> Array2<F> {
    Array2::from_shape_fn((rows.len(), cols.len()), |(i, j)| m[[rows[i], cols[j]]])
}

/// One partition's Granger term: analytic conditional log-determinant
/// minus the regression-residual log-determinant.
fn granger_term<F: Scalar>(
    target: &NetworkGaussian<F>,
    x_target: &Array2<F>,
    x_other: &Array2<F>,
    p: &Partition,
) -> Result<F> {
    let analytic = conditional_covariance(target, p)?;
    let ld_analytic = cholesky_logdet(&cholesky(&analytic).map_err(|_| Error::SingularBlock)?);

    let targets = x_target.select(Axis(1), p.star());
    let circ = x_target.select(Axis(1), p.circ());
    let predictors = concatenate(Axis(1), &[circ.view(), x_other.view()]).expect("same rows");
    let res = ols_residual_covariance(targets.view(), predictors.view(), None)?;
    // Residuals can be numerically singular (the predictors may explain
    // the targets exactly); the eigenvalue-clamped log-determinant keeps
    // the term finite instead of blowing up.
    let ld_hat = psd_logdet(&res.matrix);
    Ok(ld_analytic - ld_hat)
}

/// One partition's transfer-entropy term, reusing the foreign Gram and the
/// joint entropy that are shared across partitions.
fn te_term<F: Scalar>(
    target: &NetworkGaussian<F>,
    x_target: &Array2<F>,
    gram_other: &Array2<F>,
    h_joint: F,
    knn_k: usize,
    p: &Partition,
) -> Result<F> {
    let analytic = conditional_entropy(target, p)?;
    let circ = x_target.select(Axis(1), p.circ());
    let mut cond_gram = circ.dot(&circ.t());
    cond_gram += gram_other;
    let d = p.circ().len() + gram_other_dim_hint(target);
    let cond = kl_entropy_from_gram(&cond_gram, d, knn_k)?;
    Ok(analytic - (h_joint - cond.value))
}

/// The foreign sample block always spans the full aligned size.
fn gram_other_dim_hint<F: Scalar>(target: &NetworkGaussian<F>) -> usize {
    target.n()
}

/// Both causal terms for one direction over a fixed partition list,
/// sharing the conditioning-block sample selection per partition.
fn causal_direction<F: Scalar>(
    target: &NetworkGaussian<F>,
    x_target: &Array2<F>,
    x_other: &Array2<F>,
    gram_other: &Array2<F>,
    h_joint: F,
    knn_k: usize,
    parts: &[Partition],
) -> Result<(CausalityEstimate<F>, CausalityEstimate<F>)> {
    let mut tg = Vec::with_capacity(parts.len());
    let mut tt = Vec::with_capacity(parts.len());
    for p in parts {
        tg.push(granger_term(target, x_target, x_other, p)?);
        tt.push(te_term(target, x_target, gram_other, h_joint, knn_k, p)?);
    }
    Ok((
        CausalityEstimate::from_values(tg),
        CausalityEstimate::from_values(tt),
    ))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::gaussian::represent;
    use crate::graph::Graph;
    use crate::spectral::RepresentationMode;
    use ndarray::array;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    fn p2(weight: f64) -> NetworkGaussian<f64> {
        let g = Graph::new(array![[0.0, weight], [weight, 0.0]]).unwrap();
        represent(&g, RepresentationMode::Sigma).unwrap()
    }

    fn k3() -> NetworkGaussian<f64> {
        let w = array![[0.0, 1.0, 1.0], [1.0, 0.0, 1.0], [1.0, 1.0, 0.0]];
        represent(&Graph::new(w).unwrap(), RepresentationMode::Sigma).unwrap()
    }

    fn ring(n: usize, seed_weights: u64) -> NetworkGaussian<f64> {
        // A connected ring with deterministically jittered weights.
        let mut w = ndarray::Array2::<f64>::zeros((n, n));
        let mut state = seed_weights.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
        for i in 0..n {
            let j = (i + 1) % n;
            state = state.wrapping_mul(2862933555777941757).wrapping_add(3037000493);
            let jitter = (state >> 11) as f64 / (1u64 << 53) as f64;
            let weight = 0.5 + jitter;
            w[[i, j]] = weight;
            w[[j, i]] = weight;
        }
        represent(&Graph::new(w).unwrap(), RepresentationMode::Sigma).unwrap()
    }

    #[test]
    fn partitions_are_disjoint_and_deterministic() {
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let p = random_partition(10, 4, &mut rng).unwrap();
        assert_eq!(p.circ().len(), 4);
        assert_eq!(p.star().len(), 6);
        let mut all: Vec<usize> = p.circ().iter().chain(p.star()).copied().collect();
        all.sort_unstable();
        assert_eq!(all, (0..10).collect::<Vec<_>>());

        let mut rng2 = ChaCha8Rng::seed_from_u64(5);
        assert_eq!(p, random_partition(10, 4, &mut rng2).unwrap());
    }

    #[test]
    fn partition_sizes_are_validated() {
        let mut rng = ChaCha8Rng::seed_from_u64(0);
        assert!(matches!(
            random_partition(5, 0, &mut rng),
            Err(Error::BadSize { k: 0, n: 5 })
        ));
        assert!(matches!(
            random_partition(5, 5, &mut rng),
            Err(Error::BadSize { k: 5, n: 5 })
        ));
    }

    #[test]
    fn kl_of_a_representation_with_itself_is_zero() {
        let a = k3();
        assert_eq!(kl_divergence(&a, &a).unwrap(), 0.0);
    }

    #[test]
    fn kl_between_reweighted_paths_matches_the_closed_form() {
        // Shared eigenbasis: Σ eigenvalues are {1, 2w}, so the divergence
        // reduces to the 1-D Gaussian formula on the edge eigenvalue.
        let heavy = p2(2.0);
        let light = p2(1.0);
        let ab = kl_divergence(&heavy, &light).unwrap();
        let ba = kl_divergence(&light, &heavy).unwrap();
        assert!((ab - 0.5 * (1.0 - 2.0f64.ln())).abs() < 1e-9, "got {ab}");
        assert!((ba - 0.5 * (2.0f64.ln() - 0.5)).abs() < 1e-9, "got {ba}");
        assert!(ab != ba);
    }

    #[test]
    fn kl_requires_matching_sizes() {
        assert!(matches!(
            kl_divergence(&p2(1.0), &k3()),
            Err(Error::DimensionMismatch { left: 2, right: 3 })
        ));
    }

    #[test]
    fn mutual_information_of_identical_common_source_pairs_is_infinite() {
        let a = k3();
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        let mi = mutual_information(&a, &a, &SamplingConfig::default(), &mut rng).unwrap();
        assert!(mi.is_infinite() && mi > 0.0);
    }

    #[test]
    fn independent_representations_share_almost_no_information() {
        // Kept low-dimensional: the joint entropy estimate picks up a
        // dimension-driven bias that would swamp the signal for large
        // graphs at this sample count.
        let a = ring(5, 1);
        let b = ring(5, 2);
        let cfg = SamplingConfig {
            samples: 4000,
            knn_k: 3,
            coupling: Coupling::Independent,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(7);
        let mi = mutual_information(&a, &b, &cfg, &mut rng).unwrap();
        assert!(mi.abs() < 0.3, "independent MI should be near zero, got {mi}");
    }

    #[test]
    fn fisher_single_parameter_spot_value() {
        let setup = FisherSetup::new(array![0.0], vec![0]).unwrap();
        let f = fisher_matrix(&setup, &p2(1.0)).unwrap();
        assert!((f[[0, 0]] - 0.28125).abs() < 1e-12);
        assert!((fisher_quantity(&setup, &p2(1.0)).unwrap() - 0.28125).abs() < 1e-12);
    }

    #[test]
    fn fisher_two_parameter_spot_values() {
        let setup = FisherSetup::new(array![0.0, 0.0], vec![0, 1]).unwrap();
        let f = fisher_matrix(&setup, &p2(1.0)).unwrap();
        // Off-diagonal precision entry is 0.25; diagonals are 0.75.
        assert!((f[[0, 1]] - 0.03125).abs() < 1e-12);
        assert!((f[[1, 0]] - 0.03125).abs() < 1e-12);
        let q = fisher_quantity(&setup, &p2(1.0)).unwrap();
        assert!((q - 0.5625).abs() < 1e-12);
    }

    #[test]
    fn fisher_matrix_is_symmetric() {
        let setup = FisherSetup::new(array![0.3, 0.1, 0.7], vec![2, 0, 1]).unwrap();
        let f = fisher_matrix(&setup, &k3()).unwrap();
        for i in 0..3 {
            for j in 0..3 {
                assert!((f[[i, j]] - f[[j, i]]).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn huge_parameters_wash_out_the_information() {
        let setup = FisherSetup::new(array![1e6], vec![0]).unwrap();
        let q = fisher_quantity(&setup, &p2(1.0)).unwrap();
        assert!(q < 1e-9, "got {q}");
    }

    #[test]
    fn fisher_matches_the_divergence_hessian() {
        // ½δᵀFδ should reproduce KL(C(Θ) ‖ C(Θ+δ)) to second order.
        for (base, theta, targets) in [
            (p2(1.0), array![0.2, 0.4], vec![0usize, 1]),
            (k3(), array![0.1, 0.0, 0.3], vec![0usize, 1, 2]),
        ] {
            let setup = FisherSetup::new(theta.clone(), targets.clone()).unwrap();
            let f = fisher_matrix(&setup, &base).unwrap();
            let k = theta.len();
            let delta = 1e-4;
            let c0 = setup.perturbed_covariance(&base).unwrap();
            let g0 = NetworkGaussian::from_covariance(c0, RepresentationMode::Sigma).unwrap();
            // Probe along every axis pair to exercise off-diagonals too.
            for i in 0..k {
                for j in 0..k {
                    let mut shifted = theta.clone();
                    shifted[i] += delta;
                    shifted[j] += delta;
                    let s2 = FisherSetup::new(shifted, targets.clone()).unwrap();
                    let c1 = s2.perturbed_covariance(&base).unwrap();
                    let g1 = NetworkGaussian::from_covariance(c1, RepresentationMode::Sigma).unwrap();
                    let kl = kl_divergence(&g0, &g1).unwrap();
                    let mut quad = 0.5 * (f[[i, i]] + f[[j, j]]) * delta * delta;
                    quad += f[[i, j]] * delta * delta;
                    if i == j {
                        // The two bumps landed on the same axis.
                        quad = 0.5 * f[[i, i]] * (2.0 * delta) * (2.0 * delta);
                    }
                    let rel = (kl - quad).abs() / quad.max(1e-300);
                    assert!(rel < 1e-3, "axis ({i},{j}): kl={kl:e} quad={quad:e}");
                }
            }
        }
    }

    #[test]
    fn conditional_covariance_of_the_two_path_is_four_thirds() {
        let a = p2(1.0);
        let p = Partition::new(vec![0], 2).unwrap();
        let c = conditional_covariance(&a, &p).unwrap();
        assert_eq!(c.dim(), (1, 1));
        assert!((c[[0, 0]] - 4.0 / 3.0).abs() < 1e-12);
    }

    #[test]
    fn conditioning_never_inflates_the_generalized_variance() {
        let a = ring(12, 9);
        let mut rng = ChaCha8Rng::seed_from_u64(3);
        for _ in 0..5 {
            let p = random_partition(12, 5, &mut rng).unwrap();
            let cond = conditional_covariance(&a, &p).unwrap();
            let marg = select_block(a.covariance(), p.star(), p.star());
            let ld_cond = psd_logdet(&cond);
            let ld_marg = psd_logdet(&marg);
            assert!(ld_cond <= ld_marg + 1e-9);
        }
    }

    #[test]
    fn conditional_entropy_spot_value_on_the_two_path() {
        let a = p2(1.0);
        let p = Partition::new(vec![0], 2).unwrap();
        let h = conditional_entropy(&a, &p).unwrap();
        let want = 0.5 + 0.5 * std::f64::consts::TAU.ln() + 0.5 * (2.0f64 / 1.5).ln();
        assert!((h - want).abs() < 1e-12, "got {h} want {want}");
    }

    #[test]
    fn identical_common_source_pairs_are_degenerate_for_causality() {
        let a = k3();
        let mut rng = ChaCha8Rng::seed_from_u64(2);
        assert!(matches!(
            granger(&a, &a, 2, &SamplingConfig::default(), &mut rng),
            Err(Error::DegenerateResiduals)
        ));
        assert!(matches!(
            transfer_entropy(&a, &a, 2, &SamplingConfig::default(), &mut rng),
            Err(Error::DegenerateResiduals)
        ));
    }

    #[test]
    fn causal_means_equal_their_partition_means() {
        let a = ring(10, 4);
        let b = ring(10, 5);
        let cfg = SamplingConfig {
            samples: 600,
            knn_k: 3,
            coupling: Coupling::Independent,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(11);
        let tg = granger(&a, &b, 4, &cfg, &mut rng).unwrap();
        let mean: f64 = tg.per_partition.iter().sum::<f64>() / 4.0;
        assert_eq!(tg.value, mean);
        assert_eq!(tg.per_partition.len(), 4);

        let tt = transfer_entropy(&a, &b, 4, &cfg, &mut rng).unwrap();
        let mean: f64 = tt.per_partition.iter().sum::<f64>() / 4.0;
        assert_eq!(tt.value, mean);
    }

    #[test]
    fn independent_coupling_keeps_causality_near_zero() {
        let a = ring(10, 21);
        let b = ring(10, 22);
        let cfg = SamplingConfig {
            samples: 1200,
            knn_k: 3,
            coupling: Coupling::Independent,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(17);
        let tg = granger(&a, &b, 5, &cfg, &mut rng).unwrap();
        assert!(tg.value.abs() < 0.6, "independent T_g = {}", tg.value);
    }

    #[test]
    fn relate_assembles_a_consistent_report() {
        let a = ring(10, 31);
        let b = ring(10, 32);
        let setup = FisherSetup::new(array![0.5, 0.25], vec![1, 4]).unwrap();
        let cfg = SamplingConfig {
            samples: 600,
            knn_k: 3,
            coupling: Coupling::CommonSource,
        };
        let mut rng = ChaCha8Rng::seed_from_u64(41);
        let out = relate(&a, &b, 0.97, 0.93, &setup, 3, &cfg, &mut rng).unwrap();
        assert!(out.degenerate.is_none());
        let r = &out.report;
        assert_eq!(r.partitions_used, 3);
        assert_eq!(r.samples_used, 600);
        assert_eq!(r.gamma_a, 0.97);
        assert_eq!(r.gamma_b, 0.93);
        assert!(r.kl_ab >= 0.0 && r.kl_ba >= 0.0);
        assert!(r.mi.is_finite());
        assert_eq!(out.tg_ab.len(), 3);
        assert_eq!(out.tt_ba.len(), 3);
        let mean_ab: f64 = out.tg_ab.iter().sum::<f64>() / 3.0;
        assert_eq!(r.granger_ab, mean_ab);
        let mean_tt: f64 = out.tt_ab.iter().sum::<f64>() / 3.0;
        assert_eq!(r.te_ab, mean_tt);
    }

    #[test]
    fn relate_reports_degenerate_pairs_without_failing() {
        let a = k3();
        let setup = FisherSetup::new(array![0.1], vec![0]).unwrap();
        let mut rng = ChaCha8Rng::seed_from_u64(5);
        let out = relate(
            &a,
            &a,
            1.0,
            1.0,
            &setup,
            4,
            &SamplingConfig::default(),
            &mut rng,
        )
        .unwrap();
        assert!(out.degenerate.is_some());
        assert!(out.report.mi.is_infinite());
        assert!(out.report.granger_ab.is_nan());
        assert!(out.report.te_ba.is_nan());
        assert_eq!(out.report.kl_ab, 0.0);
        assert!(out.tg_ab.is_empty());
    }

    #[test]
    fn relate_is_deterministic_for_a_fixed_seed() {
        let a = ring(8, 51);
        let b = ring(8, 52);
        let setup = FisherSetup::new(array![0.3], vec![2]).unwrap();
        let cfg = SamplingConfig {
            samples: 400,
            knn_k: 3,
            coupling: Coupling::CommonSource,
        };
        let run = || {
            let mut rng = ChaCha8Rng::seed_from_u64(99);
            relate(&a, &b, 1.0, 1.0, &setup, 2, &cfg, &mut rng).unwrap()
        };
        let one = run();
        let two = run();
        assert_eq!(one.report.mi, two.report.mi);
        assert_eq!(one.report.granger_ab, two.report.granger_ab);
        assert_eq!(one.tg_ab, two.tg_ab);
        assert_eq!(one.tt_ba, two.tt_ba);
    }
}
