//! Correlation and summary statistics for the experiment outputs: Pearson
//! and Spearman coefficients with two-sided Student-t p-values, plus the
//! usual mean/median helpers. Non-finite observations are dropped pairwise
//! before correlating, so degenerate iterations never poison a trace
//! summary.

use statrs::distribution::{ContinuousCDF, StudentsT};

/// A correlation coefficient with its two-sided p-value and the number of
/// (finite) pairs that produced it.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Correlation {
    pub r: f64,
    pub p: f64,
    pub n: usize,
}

/// Arithmetic mean; `None` for an empty slice.
pub fn mean(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    Some(values.iter().sum::<f64>() / values.len() as f64)
}

/// Median (midpoint of the two central order statistics for even length);
/// `None` for an empty slice.
pub fn median(values: &[f64]) -> Option<f64> {
    if values.is_empty() {
        return None;
    }
    let mut sorted = values.to_vec();
    sorted.sort_by(|a, b| a.partial_cmp(b).expect("median of non-finite values"));
    let mid = sorted.len() / 2;
    if sorted.len() % 2 == 1 {
        Some(sorted[mid])
    } else {
        Some(0.5 * (sorted[mid - 1] + sorted[mid]))
    }
}

fn finite_pairs(xs: &[f64], ys: &[f64]) -> (Vec<f64>, Vec<f64>) {
    xs.iter()
        .zip(ys)
        .filter(|(x, y)| x.is_finite() && y.is_finite())
        .map(|(&x, &y)| (x, y))
        .unzip()
}

/// Two-sided p-value for a correlation of `r` over `n` pairs, via the exact
/// t-distribution of `r·√((n−2)/(1−r²))` under the null.
fn p_two_sided(r: f64, n: usize) -> f64 {
    if n < 3 {
        return 1.0;
    }
    let df = (n - 2) as f64;
    let denom = 1.0 - r * r;
    if denom <= 0.0 {
        return 0.0;
    }
    let t = r.abs() * (df / denom).sqrt();
    let dist = StudentsT::new(0.0, 1.0, df).expect("df >= 1");
    2.0 * (1.0 - dist.cdf(t))
}

/// Pearson correlation over the finite pairs of `xs`/`ys`. `None` when
/// fewer than three finite pairs remain or either side has zero variance.
pub fn pearson(xs: &[f64], ys: &[f64]) -> Option<Correlation> {
    let (x, y) = finite_pairs(xs, ys);
    let n = x.len();
    if n < 3 {
        return None;
    }
    let nf = n as f64;
    let mx = x.iter().sum::<f64>() / nf;
    let my = y.iter().sum::<f64>() / nf;
    let mut sxx = 0.0;
    let mut syy = 0.0;
    let mut sxy = 0.0;
    for i in 0..n {
        let dx = x[i] - mx;
        let dy = y[i] - my;
        sxx += dx * dx;
        syy += dy * dy;
        sxy += dx * dy;
    }
    if sxx <= 0.0 || syy <= 0.0 {
        return None;
    }
    let r = (sxy / (sxx.sqrt() * syy.sqrt())).clamp(-1.0, 1.0);
    Some(Correlation {
        r,
        p: p_two_sided(r, n),
        n,
    })
}
