//! Compound-collection analysis: every molecule becomes a weighted graph
//! (bond weight = product of the two atom type numbers plus the bond type
//! number), all pairs are compared under a chosen set of relation metrics,
//! and the resulting per-metric similarity matrices are used as feature
//! vectors for activity classification with naive Bayes and logistic
//! regression across a sweep of train proportions.
//!
//! The input is a plain text block format (see `docs/compound-format.md`):
//!
//! ```text
//! compound <id> <class>
//! atom <index> <beta>
//! bond <i> <j> <xi>
//! ```

use std::collections::BTreeMap;
use std::fmt;
use std::io::Write;
use std::str::FromStr;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use netgauss::{
    align_pair, fisher_quantity, kl_divergence, relate, represent, DisconnectPolicy, Graph,
    RepresentationMode, SamplingConfig,
};

use crate::classify;
use crate::error::{CliError, Result};
use crate::stats;
use crate::trace::{csv_value, draw_theta, RowStatus};

/// One parsed molecule: its id line and the weighted bond graph.
#[derive(Debug, Clone)]
pub struct Compound {
    pub id: String,
    pub class: u8,
    pub graph: Graph<f64>,
}

/// Which pairwise metrics to compute. KL and FI are closed-form and fast;
/// MI, GC and TE sample the representations and cost orders of magnitude
/// more per pair, so they are opt-in.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub enum MetricKind {
    Kl,
    Mi,
    Fi,
    Gc,
    Te,
}

impl MetricKind {
    pub const ALL: [MetricKind; 5] = [
        MetricKind::Kl,
        MetricKind::Mi,
        MetricKind::Fi,
        MetricKind::Gc,
        MetricKind::Te,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MetricKind::Kl => "kl",
            MetricKind::Mi => "mi",
            MetricKind::Fi => "fi",
            MetricKind::Gc => "gc",
            MetricKind::Te => "te",
        }
    }

    /// True when the metric needs coupled sampling (the expensive path).
    pub fn needs_sampling(self) -> bool {
        matches!(self, MetricKind::Mi | MetricKind::Gc | MetricKind::Te)
    }
}

impl fmt::Display for MetricKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MetricKind {
    type Err = CliError;

    fn from_str(s: &str) -> Result<Self> {
        match s.trim() {
            "kl" => Ok(MetricKind::Kl),
            "mi" => Ok(MetricKind::Mi),
            "fi" => Ok(MetricKind::Fi),
            "gc" => Ok(MetricKind::Gc),
            "te" => Ok(MetricKind::Te),
            other => Err(CliError::Usage(format!(
                "unknown metric '{other}' (expected kl, mi, fi, gc or te)"
            ))),
        }
    }
}

/// Parses a comma-separated metric list, deduplicating while preserving
/// the canonical kl,mi,fi,gc,te order.
pub fn parse_metric_list(s: &str) -> Result<Vec<MetricKind>> {
    let mut requested = Vec::new();
    for part in s.split(',') {
        let m: MetricKind = part.parse()?;
        if !requested.contains(&m) {
            requested.push(m);
        }
    }
    if requested.is_empty() {
        return Err(CliError::Usage("metric list is empty".into()));
    }
    let ordered: Vec<MetricKind> = MetricKind::ALL
        .into_iter()
        .filter(|m| requested.contains(m))
        .collect();
    Ok(ordered)
}

struct BlockBuilder {
    id: String,
    class: u8,
    line: usize,
    betas: Vec<f64>,
    bonds: Vec<(usize, usize, f64)>,
}

impl BlockBuilder {
    fn finish(self) -> Result<Compound> {
        let n = self.betas.len();
        let at_line = |msg: String| CliError::Parse(format!("line {}: {msg}", self.line));
        if n == 0 {
            return Err(at_line(format!("compound {} has no atoms", self.id)));
        }
        let mut w = ndarray::Array2::<f64>::zeros((n, n));
        for (i, j, xi) in self.bonds {
            if i >= n || j >= n {
                return Err(at_line(format!(
                    "compound {}: bond ({i}, {j}) references a missing atom",
                    self.id
                )));
            }
            if i == j {
                return Err(at_line(format!(
                    "compound {}: bond ({i}, {j}) is a self-loop",
                    self.id
                )));
            }
            if w[[i, j]] != 0.0 {
                return Err(at_line(format!(
                    "compound {}: duplicate bond ({i}, {j})",
                    self.id
                )));
            }
            let weight = self.betas[i] * self.betas[j] + xi;
            w[[i, j]] = weight;
            w[[j, i]] = weight;
        }
        let graph = Graph::new(w).map_err(|e| at_line(format!("compound {}: {e}", self.id)))?;
        if !graph.is_connected() {
            return Err(at_line(format!(
                "compound {} is not connected",
                self.id
            )));
        }
        Ok(Compound {
            id: self.id,
            class: self.class,
            graph,
        })
    }
}

/// Parses a compound collection. Every compound must declare a 0/1 class,
/// contiguous atom indices starting at 0, positive integer type numbers,
/// and a connected bond graph.
pub fn parse_compounds(text: &str) -> Result<Vec<Compound>> {
    let mut compounds = Vec::new();
    let mut current: Option<BlockBuilder> = None;

    for (idx, raw) in text.lines().enumerate() {
        let lineno = idx + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let bad = |msg: String| CliError::Parse(format!("line {lineno}: {msg}"));
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields[0] {
            "compound" => {
                if let Some(b) = current.take() {
                    compounds.push(b.finish()?);
                }
                if fields.len() < 3 {
                    return Err(bad(
                        "compound line needs an id and a class label (missing class label?)"
                            .into(),
                    ));
                }
                if fields.len() > 3 {
                    return Err(bad("compound line has trailing fields".into()));
                }
                let class: u8 = match fields[2] {
                    "0" => 0,
                    "1" => 1,
                    other => return Err(bad(format!("class must be 0 or 1, got '{other}'"))),
                };
                current = Some(BlockBuilder {
                    id: fields[1].to_string(),
                    class,
                    line: lineno,
                    betas: Vec::new(),
                    bonds: Vec::new(),
                });
            }
            "atom" => {
                let b = current
                    .as_mut()
                    .ok_or_else(|| bad("atom line before any compound line".into()))?;
                if fields.len() != 3 {
                    return Err(bad("atom line needs an index and a type number".into()));
                }
                let index: usize = fields[1]
                    .parse()
                    .map_err(|_| bad(format!("bad atom index '{}'", fields[1])))?;
                let beta: u64 = fields[2]
                    .parse()
                    .map_err(|_| bad(format!("bad atom type number '{}'", fields[2])))?;
                if beta == 0 {
                    return Err(bad("atom type numbers must be positive".into()));
                }
                if index != b.betas.len() {
                    return Err(bad(format!(
                        "atom indices must be contiguous from 0; expected {}, got {index}",
                        b.betas.len()
                    )));
                }
                b.betas.push(beta as f64);
            }
            "bond" => {
                let b = current
                    .as_mut()
                    .ok_or_else(|| bad("bond line before any compound line".into()))?;
                if fields.len() != 4 {
                    return Err(bad(
                        "bond line needs two atom indices and a bond type number".into(),
                    ));
                }
                let i: usize = fields[1]
                    .parse()
                    .map_err(|_| bad(format!("bad atom index '{}'", fields[1])))?;
                let j: usize = fields[2]
                    .parse()
                    .map_err(|_| bad(format!("bad atom index '{}'", fields[2])))?;
                let xi: u64 = fields[3]
                    .parse()
                    .map_err(|_| bad(format!("bad bond type number '{}'", fields[3])))?;
                if xi == 0 {
                    return Err(bad("bond type numbers must be positive".into()));
                }
                b.bonds.push((i, j, xi as f64));
            }
            other => return Err(bad(format!("unknown record '{other}'"))),
        }
    }
    if let Some(b) = current.take() {
        compounds.push(b.finish()?);
    }
    if compounds.len() < 2 {
        return Err(CliError::Parse(
            "a compound collection needs at least two compounds".into(),
        ));
    }
    let mut ids: Vec<&str> = compounds.iter().map(|c| c.id.as_str()).collect();
    ids.sort_unstable();
    if ids.windows(2).any(|w| w[0] == w[1]) {
        return Err(CliError::Parse("duplicate compound ids".into()));
    }
    Ok(compounds)
}

pub fn read_compounds(path: &str) -> Result<Vec<Compound>> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| CliError::Io(format!("{path}: {e}")))?;
    parse_compounds(&text).map_err(|e| match e {
        CliError::Parse(msg) => CliError::Parse(format!("{path}: {msg}")),
        other => other,
    })
}

#[derive(Debug, Clone)]
pub struct CompoundsSettings {
    pub mode: RepresentationMode,
    pub sampling: SamplingConfig,
    pub partitions: usize,
    pub theta_len: usize,
    pub seed: u64,
    pub metrics: Vec<MetricKind>,
    /// Train proportions for the classifier sweep.
    pub proportions: Vec<f64>,
    /// Train/test splits per proportion; the reported F1 is their median.
    pub class_seeds: u64,
}

/// One metric's full pairwise matrix (symmetric, diagonal included).
pub type MetricMatrix = Vec<Vec<f64>>;

#[derive(Debug, Clone)]
pub struct ClassSummaryRow {
    pub metric: MetricKind,
    /// Mean over pairs where both compounds are in class 1.
    pub within_active_mean: f64,
    pub within_active_pairs: usize,
    pub within_active_excluded: usize,
    /// Mean over every other pair.
    pub rest_mean: f64,
    pub rest_pairs: usize,
    pub rest_excluded: usize,
}

#[derive(Debug, Clone)]
pub struct F1Row {
    pub classifier: &'static str,
    pub metric: MetricKind,
    pub proportion: f64,
    /// Median F1 over the split seeds; NaN when every split degenerated.
    pub f1: f64,
    /// F1 of always predicting the majority class on the same splits.
    pub baseline: f64,
}

#[derive(Debug, Clone)]
pub struct CompoundsReport {
    pub ids: Vec<String>,
    pub classes: Vec<u8>,
    pub matrices: BTreeMap<MetricKind, MetricMatrix>,
    pub class_summary: Vec<ClassSummaryRow>,
    pub f1_rows: Vec<F1Row>,
    /// Degenerate/failed pair statuses, keyed by (row, col), for the log.
    pub flagged: Vec<(usize, usize, RowStatus)>,
}

fn pair_seed(seed: u64, n: usize, a: usize, b: usize) -> u64 {
    seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul((a * n + b + 1) as u64))
}

struct PairValues {
    kl: f64,
    mi: f64,
    fi: f64,
    gc: f64,
    te: f64,
    status: RowStatus,
}

fn compare_compounds(
    a: &Graph<f64>,
    b: &Graph<f64>,
    settings: &CompoundsSettings,
    rng: &mut ChaCha8Rng,
) -> Result<PairValues> {
    let (ga, gb, gamma_a, gamma_b) = align_pair(a, b, DisconnectPolicy::default())?;
    let ra = represent(&ga, settings.mode)?;
    let rb = represent(&gb, settings.mode)?;
    let setup_on_a = draw_theta(&gb, &ra, settings.theta_len, rng)?;
    let setup_on_b = draw_theta(&ga, &rb, settings.theta_len, rng)?;

    let wants_sampling = settings.metrics.iter().any(|m| m.needs_sampling());
    if wants_sampling {
        let analysis = relate(
            &ra,
            &rb,
            gamma_a,
            gamma_b,
            &setup_on_a,
            settings.partitions,
            &settings.sampling,
            rng,
        )?;
        let fisher_b = fisher_quantity(&setup_on_b, &rb)?;
        let report = analysis.report;
        Ok(PairValues {
            kl: 0.5 * (report.kl_ab + report.kl_ba),
            mi: report.mi,
            fi: 0.5 * (report.fisher_quantity + fisher_b),
            gc: 0.5 * (report.granger_ab + report.granger_ba),
            te: 0.5 * (report.te_ab + report.te_ba),
            status: match analysis.degenerate {
                Some(reason) => RowStatus::Degenerate(reason),
                None => RowStatus::Ok,
            },
        })
    } else {
        // Closed-form metrics only: skip the sampling machinery entirely.
        let kl_ab = kl_divergence(&ra, &rb)?;
        let kl_ba = kl_divergence(&rb, &ra)?;
        let fisher_a = fisher_quantity(&setup_on_a, &ra)?;
        let fisher_b = fisher_quantity(&setup_on_b, &rb)?;
        Ok(PairValues {
            kl: 0.5 * (kl_ab + kl_ba),
            mi: f64::NAN,
            fi: 0.5 * (fisher_a + fisher_b),
            gc: f64::NAN,
            te: f64::NAN,
            status: RowStatus::Ok,
        })
    }
}

/// Computes the pairwise metric matrices and the downstream classification
/// sweep. Pairs are evaluated in ascending (i, j) order with per-pair
/// derived seeds, so the numbers do not depend on evaluation order.
pub fn run_compounds(
    compounds: &[Compound],
    settings: &CompoundsSettings,
) -> Result<CompoundsReport> {
    if settings.metrics.is_empty() {
        return Err(CliError::Usage("no metrics requested".into()));
    }
    let n = compounds.len();
    let mut matrices: BTreeMap<MetricKind, MetricMatrix> = settings
        .metrics
        .iter()
        .map(|&m| (m, vec![vec![f64::NAN; n]; n]))
        .collect();
    let mut flagged = Vec::new();

    for i in 0..n {
        for j in i..n {
            let mut rng = ChaCha8Rng::seed_from_u64(pair_seed(settings.seed, n, i, j));
            let values = match compare_compounds(
                &compounds[i].graph,
                &compounds[j].graph,
                settings,
                &mut rng,
            ) {
                Ok(v) => v,
                Err(e) => PairValues {
                    kl: f64::NAN,
                    mi: f64::NAN,
                    fi: f64::NAN,
                    gc: f64::NAN,
                    te: f64::NAN,
                    status: RowStatus::Error(e.to_string()),
                },
            };
            for (&metric, matrix) in matrices.iter_mut() {
                let v = match metric {
                    MetricKind::Kl => values.kl,
                    MetricKind::Mi => values.mi,
                    MetricKind::Fi => values.fi,
                    MetricKind::Gc => values.gc,
                    MetricKind::Te => values.te,
                };
                matrix[i][j] = v;
                matrix[j][i] = v;
            }
            if !matches!(values.status, RowStatus::Ok) {
                flagged.push((i, j, values.status));
            }
        }
    }

    let classes: Vec<u8> = compounds.iter().map(|c| c.class).collect();
    let class_summary = class_summary(&matrices, &classes);
    let f1_rows = f1_sweep(&matrices, &classes, settings)?;

    Ok(CompoundsReport {
        ids: compounds.iter().map(|c| c.id.clone()).collect(),
        classes,
        matrices,
        class_summary,
        f1_rows,
        flagged,
    })
}

fn class_summary(
    matrices: &BTreeMap<MetricKind, MetricMatrix>,
    classes: &[u8],
) -> Vec<ClassSummaryRow> {
    let n = classes.len();
    let mut out = Vec::new();
    for (&metric, matrix) in matrices {
        let mut within = (0.0, 0usize, 0usize);
        let mut rest = (0.0, 0usize, 0usize);
        for i in 0..n {
            for j in i + 1..n {
                let bucket = if classes[i] == 1 && classes[j] == 1 {
                    &mut within
                } else {
                    &mut rest
                };
                let v = matrix[i][j];
                if v.is_finite() {
                    bucket.0 += v;
                    bucket.1 += 1;
                } else {
                    bucket.2 += 1;
                }
            }
        }
        let mean = |b: &(f64, usize, usize)| {
            if b.1 > 0 {
                b.0 / b.1 as f64
            } else {
                f64::NAN
            }
        };
        out.push(ClassSummaryRow {
            metric,
            within_active_mean: mean(&within),
            within_active_pairs: within.1 + within.2,
            within_active_excluded: within.2,
            rest_mean: mean(&rest),
            rest_pairs: rest.1 + rest.2,
            rest_excluded: rest.2,
        });
    }
    out
}

fn f1_sweep(
    matrices: &BTreeMap<MetricKind, MetricMatrix>,
    classes: &[u8],
    settings: &CompoundsSettings,
) -> Result<Vec<F1Row>> {
    let labels: Vec<u8> = classes.to_vec();
    let mut rows = Vec::new();
    for (&metric, matrix) in matrices {
        let features: Vec<Vec<f64>> = matrix.iter().map(|row| classify::sanitized(row)).collect();
        for &proportion in &settings.proportions {
            let mut nb = Vec::new();
            let mut logistic = Vec::new();
            let mut baseline = Vec::new();
            for split_seed in 0..settings.class_seeds {
                let mut rng = ChaCha8Rng::seed_from_u64(
                    settings.seed ^ (0xC0FF_EE00u64 + split_seed),
                );
                let split = match classify::stratified_split(&labels, proportion, &mut rng) {
                    Ok(s) => s,
                    Err(e @ CliError::Usage(_)) => return Err(e),
                    Err(_) => continue,
                };
                nb.push(classify::naive_bayes_f1(&features, &labels, &split));
                logistic.push(classify::logistic_f1(&features, &labels, &split));
                let majority = majority_of(&labels, &split.train);
                baseline.push(classify::constant_f1(&labels, &split.test, majority));
            }
            let base = stats::median(&baseline).unwrap_or(f64::NAN);
            for (name, values) in [("nb", &nb), ("logistic", &logistic)] {
                rows.push(F1Row {
                    classifier: name,
                    metric,
                    proportion,
                    f1: stats::median(values).unwrap_or(f64::NAN),
                    baseline: base,
                });
            }
        }
    }
    Ok(rows)
}

fn majority_of(labels: &[u8], train: &[usize]) -> u8 {
    let positives = train.iter().filter(|&&i| labels[i] == 1).count();
    if positives * 2 >= train.len() {
        1
    } else {
        0
    }
}

/// Writes one metric's pairwise matrix as a feature table: a row per
/// compound, a column per compound, ids in both margins.
pub fn write_features_csv<W: Write>(
    report: &CompoundsReport,
    metric: MetricKind,
    out: W,
) -> Result<()> {
    let matrix = report
        .matrices
        .get(&metric)
        .ok_or_else(|| CliError::Usage(format!("metric {metric} was not computed")))?;
    let mut w = csv::Writer::from_writer(out);
    let mut header = vec!["id".to_string(), "class".to_string()];
    header.extend(report.ids.iter().cloned());
    w.write_record(&header)
        .map_err(|e| CliError::Io(e.to_string()))?;
    for (i, row) in matrix.iter().enumerate() {
        let mut record = vec![report.ids[i].clone(), report.classes[i].to_string()];
        record.extend(row.iter().map(|&v| csv_value(v)));
        w.write_record(&record)
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

pub fn write_class_summary_csv<W: Write>(report: &CompoundsReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "metric",
        "within_active_mean",
        "within_active_pairs",
        "within_active_excluded",
        "rest_mean",
        "rest_pairs",
        "rest_excluded",
    ])
    .map_err(|e| CliError::Io(e.to_string()))?;
    for r in &report.class_summary {
        w.write_record([
            r.metric.to_string(),
            csv_value(r.within_active_mean),
            r.within_active_pairs.to_string(),
            r.within_active_excluded.to_string(),
            csv_value(r.rest_mean),
            r.rest_pairs.to_string(),
            r.rest_excluded.to_string(),
        ])
        .map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

pub fn write_f1_csv<W: Write>(report: &CompoundsReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["classifier", "metric", "proportion", "f1", "baseline_f1"])
        .map_err(|e| CliError::Io(e.to_string()))?;
    for r in &report.f1_rows {
        w.write_record([
            r.classifier.to_string(),
            r.metric.to_string(),
            format!("{}", r.proportion),
            csv_value(r.f1),
            csv_value(r.baseline),
        ])
        .map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}
