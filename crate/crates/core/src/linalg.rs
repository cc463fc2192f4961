//! Dense symmetric linear algebra: a cyclic Jacobi eigensolver, Cholesky
//! factorization, and the few solve/log-determinant helpers built on them.
//!
//! Everything here is self-contained (no LAPACK binding) so the crate stays
//! generic over the scalar type and bit-deterministic across platforms.
//! Jacobi is quadratic-convergent and famously accurate for symmetric
//! matrices; at the dense sizes this crate works with (n up to a few
//! hundred) it is entirely adequate.

use ndarray::{Array1, Array2};

use crate::error::{Error, Result};
use crate::scalar::Scalar;

/// Eigendecomposition of a symmetric matrix.
///
/// `values` are ascending; `vectors` holds the matching orthonormal
/// eigenvectors as columns, so `a == vectors · diag(values) · vectorsᵀ`.
#[derive(Debug, Clone)]
pub struct SymEigen<F> {
    pub values: Array1<F>,
    pub vectors: Array2<F>,
}

/// Cyclic Jacobi eigendecomposition of a symmetric matrix.
///
/// The input is read from its lower triangle (callers hold symmetric
/// matrices by construction). Deterministic: a fixed sweep order and a
/// stable final sort make repeated runs bit-identical.
///
/// # Panics
///
/// Panics if `a` is not square.
pub fn sym_eigen<F: Scalar>(a: &Array2<F>) -> SymEigen<F> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "sym_eigen needs a square matrix");
    if n == 0 {
        return SymEigen {
            values: Array1::zeros(0),
            vectors: Array2::zeros((0, 0)),
        };
    }

    // Flat row-major copies; the hot loop indexes these directly.
    let mut m: Vec<F> = a.iter().copied().collect();
    let mut v: Vec<F> = vec![F::zero(); n * n];
    for i in 0..n {
        v[i * n + i] = F::one();
    }
    let idx = |r: usize, c: usize| r * n + c;

    let off_sum = |m: &[F]| -> F {
        let mut s = F::zero();
        for p in 0..n {
            for q in (p + 1)..n {
                s += m[idx(p, q)].abs();
            }
        }
        s
    };

    let hundred = F::cast(100.0);
    let n2 = F::cast_usize(n * n);
    for sweep in 0..64 {
        let off = off_sum(&m);
        if off == F::zero() {
            break;
        }
        // Threshold trick: early sweeps only rotate elements that matter,
        // later sweeps rotate everything.
        let tresh = if sweep < 3 {
            F::cast(0.2) * off / n2
        } else {
            F::zero()
        };
        for p in 0..(n - 1) {
            for q in (p + 1)..n {
                let apq = m[idx(p, q)];
                let g = hundred * apq.abs();
                // Once an off-diagonal entry is negligible against both
                // diagonal entries, zero it outright.
                if sweep > 3
                    && m[idx(p, p)].abs() + g == m[idx(p, p)].abs()
                    && m[idx(q, q)].abs() + g == m[idx(q, q)].abs()
                {
                    m[idx(p, q)] = F::zero();
                    m[idx(q, p)] = F::zero();
                    continue;
                }
                if apq.abs() <= tresh {
                    continue;
                }
                let h = m[idx(q, q)] - m[idx(p, p)];
                let t = if h.abs() + g == h.abs() {
                    apq / h
                } else {
                    let theta = h / (F::cast(2.0) * apq);
                    let mut t = F::one() / (theta.abs() + (F::one() + theta * theta).sqrt());
                    if theta < F::zero() {
                        t = -t;
                    }
                    t
                };
                let c = F::one() / (F::one() + t * t).sqrt();
                let s = t * c;

                let app = m[idx(p, p)];
                let aqq = m[idx(q, q)];
                m[idx(p, p)] = app - t * apq;
                m[idx(q, q)] = aqq + t * apq;
                m[idx(p, q)] = F::zero();
                m[idx(q, p)] = F::zero();
                for r in 0..n {
                    if r == p || r == q {
                        continue;
                    }
                    let arp = m[idx(r, p)];
                    let arq = m[idx(r, q)];
                    let new_rp = c * arp - s * arq;
                    let new_rq = s * arp + c * arq;
                    m[idx(r, p)] = new_rp;
                    m[idx(p, r)] = new_rp;
                    m[idx(r, q)] = new_rq;
                    m[idx(q, r)] = new_rq;
                }
                for r in 0..n {
                    let vrp = v[idx(r, p)];
                    let vrq = v[idx(r, q)];
                    v[idx(r, p)] = c * vrp - s * vrq;
                    v[idx(r, q)] = s * vrp + c * vrq;
                }
            }
        }
    }

    // Stable ascending sort of the eigenpairs.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by(|&i, &j| {
        m[idx(i, i)]
            .partial_cmp(&m[idx(j, j)])
            .unwrap_or(std::cmp::Ordering::Equal)
            .then(i.cmp(&j))
    });
    let values: Array1<F> = order.iter().map(|&i| m[idx(i, i)]).collect();
    let mut vectors = Array2::zeros((n, n));
    for (col, &src) in order.iter().enumerate() {
        for r in 0..n {
            vectors[[r, col]] = v[idx(r, src)];
        }
    }
    SymEigen { values, vectors }
}

/// Lower-triangular Cholesky factor of a symmetric positive-definite
/// matrix: `a == l · lᵀ`. Fails with [`Error::NotPositiveDefinite`] when a
/// pivot is not strictly positive.
pub fn cholesky<F: Scalar>(a: &Array2<F>) -> Result<Array2<F>> {
    let n = a.nrows();
    assert_eq!(n, a.ncols(), "cholesky needs a square matrix");
    let mut l = Array2::<F>::zeros((n, n));
    for j in 0..n {
        let mut d = a[[j, j]];
        for k in 0..j {
            d -= l[[j, k]] * l[[j, k]];
        }
        let positive = d.is_finite() && d > F::zero();
        if !positive {
            return Err(Error::NotPositiveDefinite);
        }
        let dj = d.sqrt();
        l[[j, j]] = dj;
        for i in (j + 1)..n {
            let mut s = a[[i, j]];
            for k in 0..j {
                s -= l[[i, k]] * l[[j, k]];
            }
            l[[i, j]] = s / dj;
        }
    }
    Ok(l)
}

/// Solves `a · x = b` for many right-hand sides given `l = cholesky(a)`.
pub fn cholesky_solve<F: Scalar>(l: &Array2<F>, b: &Array2<F>) -> Array2<F> {
    let n = l.nrows();
    let m = b.ncols();
    assert_eq!(n, b.nrows(), "right-hand side height mismatch");
    let mut x = b.clone();
    // Forward: L y = b.
    for c in 0..m {
        for i in 0..n {
            let mut s = x[[i, c]];
            for k in 0..i {
                s -= l[[i, k]] * x[[k, c]];
            }
            x[[i, c]] = s / l[[i, i]];
        }
        // Backward: Lᵀ x = y.
        for i in (0..n).rev() {
            let mut s = x[[i, c]];
            for k in (i + 1)..n {
                s -= l[[k, i]] * x[[k, c]];
            }
            x[[i, c]] = s / l[[i, i]];
        }
    }
    x
}

/// Log-determinant of the matrix behind a Cholesky factor:
/// `ln det(l·lᵀ) = 2 Σ ln l[i][i]`.
pub fn cholesky_logdet<F: Scalar>(l: &Array2<F>) -> F {
    let two = F::cast(2.0);
    (0..l.nrows()).map(|i| l[[i, i]].ln()).sum::<F>() * two
}

/// Log-determinant of a symmetric positive-semidefinite matrix via its
/// eigenvalues, clamping each eigenvalue at the smallest positive scalar so
/// numerically-zero directions yield a large-but-finite contribution
/// instead of `-inf`.
pub fn psd_logdet<F: Scalar>(a: &Array2<F>) -> F {
    let eig = sym_eigen(a);
    let floor = F::min_positive_value();
    eig.values.iter().map(|&l| l.max(floor).ln()).sum()
}

/// Frobenius norm.
pub fn frobenius<F: Scalar>(a: &Array2<F>) -> F {
    a.iter().map(|&x| x * x).sum::<F>().sqrt()
}

/// Largest absolute entry difference between two same-shaped matrices.
pub fn max_abs_diff<F: Scalar>(a: &Array2<F>, b: &Array2<F>) -> F {
    debug_assert_eq!(a.dim(), b.dim());
    a.iter()
        .zip(b.iter())
        .map(|(&x, &y)| (x - y).abs())
        .fold(F::zero(), F::max)
}

#[cfg(test)]
mod tests {
    use super::*;
    use ndarray::array;

    fn reconstruct(e: &SymEigen<f64>) -> Array2<f64> {
        let n = e.values.len();
        let mut d = Array2::zeros((n, n));
        for i in 0..n {
            d[[i, i]] = e.values[i];
        }
        e.vectors.dot(&d).dot(&e.vectors.t())
    }

    #[test]
    fn eigen_of_p2_laplacian() {
        let l: Array2<f64> = array![[1.0, -1.0], [-1.0, 1.0]];
        let e = sym_eigen(&l);
        assert!(e.values[0].abs() < 1e-12);
        assert!((e.values[1] - 2.0).abs() < 1e-12);
        assert!(max_abs_diff(&reconstruct(&e), &l) < 1e-12);
    }

    #[test]
    fn eigen_of_k3_laplacian() {
        let l: Array2<f64> = array![[2.0, -1.0, -1.0], [-1.0, 2.0, -1.0], [-1.0, -1.0, 2.0]];
        let e = sym_eigen(&l);
        assert!(e.values[0].abs() < 1e-12);
        assert!((e.values[1] - 3.0).abs() < 1e-12);
        assert!((e.values[2] - 3.0).abs() < 1e-12);
    }

    #[test]
    fn eigenvectors_are_orthonormal_on_a_random_symmetric_matrix() {
        let n = 40;
        let mut state = 0x9e3779b97f4a7c15u64;
        let mut next = || {
            state = state.wrapping_mul(6364136223846793005).wrapping_add(1442695040888963407);
            ((state >> 11) as f64) / ((1u64 << 53) as f64) - 0.5
        };
        let mut a = Array2::zeros((n, n));
        for i in 0..n {
            for j in i..n {
                let x = next();
                a[[i, j]] = x;
                a[[j, i]] = x;
            }
        }
        let e = sym_eigen(&a);
        let gram = e.vectors.t().dot(&e.vectors);
        for i in 0..n {
            for j in 0..n {
                let want = if i == j { 1.0 } else { 0.0 };
                assert!((gram[[i, j]] - want).abs() < 1e-10, "gram[{i},{j}]");
            }
        }
        assert!(max_abs_diff(&reconstruct(&e), &a) < 1e-9);
        // Ascending order.
        for i in 1..n {
            assert!(e.values[i] >= e.values[i - 1]);
        }
    }

    #[test]
    fn eigen_is_deterministic() {
        let a = array![[2.0, 1.0, 0.5], [1.0, 3.0, 0.25], [0.5, 0.25, 1.0]];
        let e1 = sym_eigen(&a);
        let e2 = sym_eigen(&a);
        assert_eq!(e1.values.to_vec(), e2.values.to_vec());
        assert_eq!(
            e1.vectors.iter().copied().collect::<Vec<_>>(),
            e2.vectors.iter().copied().collect::<Vec<_>>()
        );
    }

    #[test]
    fn eigen_works_at_f32() {
        let l = array![[1.0f32, -1.0], [-1.0, 1.0]];
        let e = sym_eigen(&l);
        assert!(e.values[0].abs() < 1e-5);
        assert!((e.values[1] - 2.0).abs() < 1e-5);
    }

    #[test]
    fn cholesky_round_trip_and_solve() {
        let a = array![[4.0, 2.0, 0.6], [2.0, 5.0, 1.5], [0.6, 1.5, 3.0]];
        let l = cholesky(&a).unwrap();
        assert!(max_abs_diff(&l.dot(&l.t()), &a) < 1e-12);

        let b = array![[1.0], [2.0], [3.0]];
        let x = cholesky_solve(&l, &b);
        assert!(max_abs_diff(&a.dot(&x), &b) < 1e-10);

        let det: f64 = 4.0 * (5.0 * 3.0 - 1.5 * 1.5) - 2.0 * (2.0 * 3.0 - 1.5 * 0.6)
            + 0.6 * (2.0 * 1.5 - 5.0 * 0.6);
        assert!((cholesky_logdet(&l) - det.ln()).abs() < 1e-12);
    }

    #[test]
    fn cholesky_rejects_indefinite_matrices() {
        let a = array![[1.0, 2.0], [2.0, 1.0]];
        assert!(matches!(cholesky(&a), Err(Error::NotPositiveDefinite)));
    }

    #[test]
    fn psd_logdet_matches_cholesky_on_pd_input() {
        let a: Array2<f64> = array![[4.0, 2.0], [2.0, 5.0]];
        let l = cholesky(&a).unwrap();
        assert!((psd_logdet(&a) - cholesky_logdet(&l)).abs() < 1e-10);
    }
}
