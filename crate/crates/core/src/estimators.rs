//! Nonparametric estimation machinery: Kozachenko–Leonenko entropy from
//! k-nearest-neighbor distances, and least-squares residual covariances.
//!
//! These fill in wherever closed forms are unavailable — joint entropies of
//! coupled samples, regression residuals for causality ratios. Everything
//! is estimated from explicit sample matrices (rows = draws, columns =
//! dimensions) and is a pure function of its inputs.
//!
//! Neighbor searches are exact, O(count² · d) except on a line. Three
//! layouts cover the practical regimes:
//!
//! * one dimension — sort once, then a two-pointer walk: the k nearest
//!   neighbors of a value are adjacent to it in sorted order;
//! * low dimension — a symmetric pairwise scan that updates both
//!   endpoints' neighbor lists at once, monomorphized per dimension so
//!   the distance loop unrolls;
//! * high dimension — blocked Gram products
//!   (`‖x−y‖² = ‖x‖² + ‖y‖² − 2⟨x,y⟩`), which route the O(count²·d) work
//!   through the optimized matrix-multiply kernels.
//!
//! All return the same distances (up to rounding in the Gram identity);
//! tests pin them against each other.

use ndarray::{Array2, ArrayView2, Axis};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Dimension at or below which the direct pairwise scan wins over the
/// Gram-product route.
const DIRECT_DIM_CUTOFF: usize = 16;

/// Row-block height for the blocked Gram route (keeps the per-block
/// product around `BLOCK · count` entries).
const GRAM_BLOCK: usize = 256;

/// Digamma function ψ(x) for x > 0.
///
/// Recurrence ψ(x) = ψ(x+1) − 1/x lifts the argument above 10, then the
/// asymptotic series in 1/x² finishes. Absolute error is far below the
/// estimator noise this crate feeds it into (≈1e-14 at f64).
pub fn digamma<F: Scalar>(x: F) -> F {
    assert!(x > F::zero(), "digamma defined here only for x > 0");
    let mut x = x;
    let mut acc = F::zero();
    let ten = F::cast(10.0);
    while x < ten {
        acc -= F::one() / x;
        x += F::one();
    }
    let inv = F::one() / x;
    let y = inv * inv;
    // ψ(x) ≈ ln x − 1/(2x) − Σ B₂ₙ / (2n x²ⁿ), Horner form.
    let series = y * (F::cast(1.0 / 12.0)
        - y * (F::cast(1.0 / 120.0)
            - y * (F::cast(1.0 / 252.0)
                - y * (F::cast(1.0 / 240.0)
                    - y * (F::cast(1.0 / 132.0) - y * F::cast(691.0 / 32760.0))))));
    acc + x.ln() - F::cast(0.5) * inv - series
}

/// Natural log of the volume of the unit ball in `d` dimensions:
/// `ln V_d = (d/2)·ln π − ln Γ(d/2 + 1)`.
///
/// The gamma argument is an integer or half-integer, so `ln Γ` is built
/// exactly by recurrence from `Γ(1) = 1` or `Γ(1/2) = √π`.
pub fn ln_unit_ball_volume<F: Scalar>(d: usize) -> F {
    let half = F::cast(0.5);
    let ln_pi = F::cast(std::f64::consts::PI).ln();
    // ln Γ(d/2 + 1) by climbing ln Γ(x+1) = ln x + ln Γ(x).
    let mut ln_gamma;
    let mut x;
    if d.is_multiple_of(2) {
        ln_gamma = F::zero(); // Γ(1)
        x = F::one();
    } else {
        ln_gamma = half * ln_pi; // Γ(1/2)
        x = half;
    }
    let target = F::cast_usize(d) * half + F::one();
    while x < target - F::cast(0.25) {
        ln_gamma += x.ln();
        x += F::one();
    }
    F::cast_usize(d) * half * ln_pi - ln_gamma
}

/// One Kozachenko–Leonenko entropy estimate.
#[derive(Debug, Clone, Copy)]
pub struct EntropyEstimate<F> {
    /// Estimated differential entropy in nats.
    pub value: F,
    /// Neighbor order used.
    pub k: usize,
    /// Number of sample rows.
    pub sample_count: usize,
    /// True when at least one point's k-th neighbor distance was exactly
    /// zero (tied rows); such points are excluded from the log-distance
    /// mean and the flag is surfaced so callers can distrust the value.
    pub degenerate: bool,
}

/// Maintains the `k` smallest values seen so far, ascending.
#[inline]
fn push_topk<F: Scalar>(buf: &mut [F], v: F) {
    let k = buf.len();
    if v >= buf[k - 1] {
        return;
    }
    let mut i = k - 1;
    while i > 0 && buf[i - 1] > v {
        buf[i] = buf[i - 1];
        i -= 1;
    }
    buf[i] = v;
}

fn kth_nn_direct<F: Scalar>(points: &ArrayView2<'_, F>, k: usize) -> Vec<F> {
    let (n, d) = points.dim();
    if d == 1 {
        return kth_nn_sorted_1d(points, k);
    }
    // Contiguous row-major copy so the pair loop streams linearly. Small
    // dimensions get monomorphized bodies so the distance loop unrolls.
    let data: Vec<F> = points.iter().copied().collect();
    match d {
        2 => kth_nn_pair_scan::<F, 2>(&data, n, k),
        3 => kth_nn_pair_scan::<F, 3>(&data, n, k),
        4 => kth_nn_pair_scan::<F, 4>(&data, n, k),
        5 => kth_nn_pair_scan::<F, 5>(&data, n, k),
        6 => kth_nn_pair_scan::<F, 6>(&data, n, k),
        7 => kth_nn_pair_scan::<F, 7>(&data, n, k),
        8 => kth_nn_pair_scan::<F, 8>(&data, n, k),
        _ => kth_nn_pair_scan_dyn(&data, n, d, k),
    }
}

fn kth_nn_pair_scan<F: Scalar, const D: usize>(data: &[F], n: usize, k: usize) -> Vec<F> {
    let mut top = vec![F::infinity(); n * k];
    for i in 0..n {
        let xi = &data[i * D..(i + 1) * D];
        for j in (i + 1)..n {
            let xj = &data[j * D..(j + 1) * D];
            let mut d2 = F::zero();
            for m in 0..D {
                let diff = xi[m] - xj[m];
                d2 += diff * diff;
            }
            push_topk(&mut top[i * k..(i + 1) * k], d2);
            push_topk(&mut top[j * k..(j + 1) * k], d2);
        }
    }
    (0..n).map(|i| top[i * k + k - 1].sqrt()).collect()
}

fn kth_nn_pair_scan_dyn<F: Scalar>(data: &[F], n: usize, d: usize, k: usize) -> Vec<F> {
    let mut top = vec![F::infinity(); n * k];
    for i in 0..n {
        let xi = &data[i * d..(i + 1) * d];
        for j in (i + 1)..n {
            let xj = &data[j * d..(j + 1) * d];
            let mut d2 = F::zero();
            for m in 0..d {
                let diff = xi[m] - xj[m];
                d2 += diff * diff;
            }
            push_topk(&mut top[i * k..(i + 1) * k], d2);
            push_topk(&mut top[j * k..(j + 1) * k], d2);
        }
    }
    (0..n).map(|i| top[i * k + k - 1].sqrt()).collect()
}

/// On a line the k nearest neighbors of a value sit next to it in sorted
/// order, so a sort plus a two-pointer walk replaces the quadratic scan.
/// Squared distances are compared (matching the pair scan's arithmetic)
/// and the final radius is recovered the same way, `√(diff²)`.
fn kth_nn_sorted_1d<F: Scalar>(points: &ArrayView2<'_, F>, k: usize) -> Vec<F> {
    let n = points.nrows();
    let vals: Vec<F> = points.column(0).to_vec();
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&a, &b| {
        vals[a]
            .partial_cmp(&vals[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let sorted: Vec<F> = order.iter().map(|&i| vals[i]).collect();
    let mut out = vec![F::zero(); n];
    for pos in 0..n {
        let mut lo = pos; // next left candidate is sorted[lo-1]
        let mut hi = pos + 1; // next right candidate is sorted[hi]
        let mut kth2 = F::zero();
        for _ in 0..k {
            let left2 = if lo > 0 {
                let diff = sorted[pos] - sorted[lo - 1];
                diff * diff
            } else {
                F::infinity()
            };
            let right2 = if hi < n {
                let diff = sorted[hi] - sorted[pos];
                diff * diff
            } else {
                F::infinity()
            };
            if left2 <= right2 {
                kth2 = left2;
                lo -= 1;
            } else {
                kth2 = right2;
                hi += 1;
            }
        }
        out[order[pos]] = kth2.sqrt();
    }
    out
}

fn kth_nn_gram_blocked<F: Scalar>(points: &ArrayView2<'_, F>, k: usize) -> Vec<F> {
    let (n, _) = points.dim();
    let sq_norms: Vec<F> = points
        .rows()
        .into_iter()
        .map(|r| r.iter().map(|&x| x * x).sum())
        .collect();
    let two = F::cast(2.0);
    let mut out = vec![F::zero(); n];
    let pt = points.t();
    let mut row = 0;
    while row < n {
        let hi = (row + GRAM_BLOCK).min(n);
        let block = points.slice(ndarray::s![row..hi, ..]);
        let g = block.dot(&pt); // (hi-row) × n inner products
        for (bi, i) in (row..hi).enumerate() {
            let mut top = vec![F::infinity(); k];
            let gi = g.row(bi);
            let ri = sq_norms[i];
            for j in 0..n {
                if j == i {
                    continue;
                }
                let d2 = ri + sq_norms[j] - two * gi[j];
                // The subtraction can round a true zero to ±ε·scale; clamp
                // so tied points register as exact ties.
                let scale = ri + sq_norms[j];
                let d2 = if d2 <= F::epsilon() * scale {
                    F::zero()
                } else {
                    d2
                };
                push_topk(&mut top, d2);
            }
            out[i] = top[k - 1].sqrt();
        }
        row = hi;
    }
    out
}

/// Distance from every point to its k-th nearest neighbor (Euclidean,
/// self excluded). Exact brute force; the layout is picked by dimension as
/// described in the module docs.
pub fn knn_search<F: Scalar>(points: ArrayView2<'_, F>, k: usize) -> Result<Vec<F>> {
    let (n, d) = points.dim();
    if k == 0 || n <= k {
        return Err(Error::TooFewSamples { got: n, need: k });
    }
    if d <= DIRECT_DIM_CUTOFF {
        Ok(kth_nn_direct(&points, k))
    } else {
        Ok(kth_nn_gram_blocked(&points, k))
    }
}

/// Kozachenko–Leonenko estimate of the differential entropy of the
/// distribution behind `samples` (rows = draws, columns = dimensions):
///
/// ```text
/// Ĥ = ψ(N) − ψ(k) + ln(V_d/2^d) + (d/N)·Σ_i ln(2·r_i)
/// ```
///
/// with `r_i` the k-th-nearest-neighbor distance of row i and `V_d` the
/// unit-ball volume. Euclidean metric; the doubled distance inside the
/// log (a convention that varies across the literature) is balanced by
/// the `2^d` in the constant. Rows with `r_i == 0` (exact ties) are
/// excluded from the mean and flag the estimate as degenerate.
pub fn kl_entropy<F: Scalar>(samples: ArrayView2<'_, F>, k: usize) -> Result<EntropyEstimate<F>> {
    let (n, d) = samples.dim();
    if d == 0 {
        return Err(Error::InvalidSetup(
            "entropy of zero-dimensional samples".into(),
        ));
    }
    let radii = knn_search(samples, k)?;
    Ok(entropy_from_radii(&radii, d, n, k))
}

/// Kozachenko–Leonenko estimate from a precomputed Gram matrix
/// `G = X·Xᵀ` of the sample rows.
///
/// Callers that evaluate several column subsets of one big sample matrix
/// (joint entropies over varying blocks) can build each subset's Gram by
/// adding cached per-block Grams instead of re-touching the samples; this
/// entry point turns such a Gram straight into the entropy estimate.
/// `d` must be the column count of the underlying sample matrix.
pub fn kl_entropy_from_gram<F: Scalar>(
    gram: &Array2<F>,
    d: usize,
    k: usize,
) -> Result<EntropyEstimate<F>> {
    let n = gram.nrows();
    if k == 0 || n <= k {
        return Err(Error::TooFewSamples { got: n, need: k });
    }
    if d == 0 {
        return Err(Error::InvalidSetup(
            "entropy of zero-dimensional samples".into(),
        ));
    }
    let two = F::cast(2.0);
    let mut radii = vec![F::zero(); n];
    for i in 0..n {
        let gi = gram.row(i);
        let rii = gram[[i, i]];
        let mut top = vec![F::infinity(); k];
        for j in 0..n {
            if j == i {
                continue;
            }
            let rjj = gram[[j, j]];
            let d2 = rii + rjj - two * gi[j];
            let scale = rii + rjj;
            let d2 = if d2 <= F::epsilon() * scale {
                F::zero()
            } else {
                d2
            };
            push_topk(&mut top, d2);
        }
        radii[i] = top[k - 1].sqrt();
    }
    Ok(entropy_from_radii(&radii, d, n, k))
}

fn entropy_from_radii<F: Scalar>(radii: &[F], d: usize, n: usize, k: usize) -> EntropyEstimate<F> {
    let two = F::cast(2.0);
    let mut log_sum = F::zero();
    let mut good = 0usize;
    for &r in radii {
        if r > F::zero() {
            log_sum += (two * r).ln();
            good += 1;
        }
    }
    let degenerate = good < n;
    let mean_log = if good > 0 {
        log_sum / F::cast_usize(good)
    } else {
        F::zero()
    };
    // Doubled distances in the log must pair with the unit-*diameter*
    // ball volume V_d/2^d, or the estimate gains a spurious d·ln 2.
    let ln_ball = ln_unit_ball_volume::<F>(d) - F::cast_usize(d) * two.ln();
    let value = digamma(F::cast_usize(n)) - digamma(F::cast_usize(k))
        + ln_ball
        + F::cast_usize(d) * mean_log;
    EntropyEstimate {
        value,
        k,
        sample_count: n,
        degenerate,
    }
}

/// Residual covariance of a multivariate least-squares fit.
#[derive(Debug, Clone)]
pub struct ResidualCovariance<F> {
    /// p×p symmetric positive-semidefinite residual covariance.
    pub matrix: Array2<F>,
    /// The ridge that was actually added to the Gram diagonal.
    pub ridge_used: F,
}

/// Fits `targets ≈ β + predictors·A` by least squares (intercept via
/// centering, ridge `λ` on the normal-equation Gram) and returns the
/// covariance of the residuals.
///
/// `ridge = None` applies the scale-aware default `1e-8·tr(Gram)/q`;
/// `Some(0)` runs unregularized and fails with [`Error::SingularGram`] on
/// rank-deficient designs.
///
/// The covariance denominator is `count − q − 1`, discounting the fitted
/// mean and the q regression directions — without that correction the
/// residual covariance is biased low by a factor `(count − q − 1)/count`,
/// which matters exactly where this function is used (log-determinant
/// ratios of nearly-equal covariances).
pub fn ols_residual_covariance<F: Scalar>(
    targets: ArrayView2<'_, F>,
    predictors: ArrayView2<'_, F>,
    ridge: Option<F>,
) -> Result<ResidualCovariance<F>> {
    let (n, p) = targets.dim();
    let (n2, q) = predictors.dim();
    if n != n2 {
        return Err(Error::DimensionMismatch { left: n, right: n2 });
    }
    if n <= q + 1 {
        return Err(Error::TooFewSamples { got: n, need: q + 1 });
    }
    let nf = F::cast_usize(n);

    // Center both sides: equivalent to fitting an explicit intercept.
    let y_mean = targets.mean_axis(Axis(0)).expect("n > 0");
    let x_mean = predictors.mean_axis(Axis(0)).expect("n > 0");
    let yc = &targets - &y_mean.broadcast((n, p)).expect("broadcast");
    let xc = &predictors - &x_mean.broadcast((n, q)).expect("broadcast");

    if q == 0 {
        let denom = nf - F::one();
        return Ok(ResidualCovariance {
            matrix: yc.t().dot(&yc) / denom,
            ridge_used: F::zero(),
        });
    }

    let mut gram = xc.t().dot(&xc);
    let ridge_used = match ridge {
        Some(r) => r,
        None => {
            let tr: F = (0..q).map(|i| gram[[i, i]]).sum();
            F::cast(1e-8) * tr / F::cast_usize(q)
        }
    };
    for i in 0..q {
        gram[[i, i]] += ridge_used;
    }
    let chol = crate::linalg::cholesky(&gram).map_err(|_| Error::SingularGram)?;
    let xty = xc.t().dot(&yc);
    let coef = crate::linalg::cholesky_solve(&chol, &xty);
    let resid = &yc - &xc.dot(&coef);

    let denom = F::cast_usize(n - q - 1);
    Ok(ResidualCovariance {
        matrix: resid.t().dot(&resid) / denom,
        ridge_used,
    })
}
