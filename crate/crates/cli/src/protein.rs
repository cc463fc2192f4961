//! Node-similarity analysis over a labeled interaction network. Each
//! qualifying node (more than five neighbors) is represented by its
//! radius-1 ego-net — the node, its neighbors, and every edge among them —
//! and all qualifying pairs are compared with the full relation toolkit.
//! Directional quantities are averaged over both directions so similarity
//! is symmetric; mutual information is symmetric already.
//!
//! Outputs: the raw pair table, per-metric class-pair means, per-metric
//! means as a function of hop distance, and metric-constrained closeness —
//! shortest-path closeness over the qualifying nodes where traversing an
//! edge costs the divergence (KL) or the inverse of the metric (MI, FI,
//! GC, TE). Nodes that do not qualify are assigned the minimum closeness.

use std::collections::BTreeMap;
use std::io::Write;

use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use netgauss::{
    align_pair, cost_key, fisher_quantity, relate, represent, CostMap, DisconnectPolicy, Graph,
    RepresentationMode, SamplingConfig,
};

use crate::error::{CliError, Result};
use crate::trace::{csv_value, draw_theta, RowStatus};

/// Degree threshold: a node qualifies when it has strictly more neighbors.
pub const NEIGHBOR_THRESHOLD: usize = 5;

/// The five relation metrics a pair produces (hop distance is carried
/// separately since it is the comparison axis, not a relation estimate).
pub const RELATION_METRICS: [&str; 5] = ["kl", "mi", "fi", "gc", "te"];

#[derive(Debug, Clone)]
pub struct ProteinSettings {
    pub mode: RepresentationMode,
    pub sampling: SamplingConfig,
    pub partitions: usize,
    pub theta_len: usize,
    pub seed: u64,
}

/// One qualifying pair's non-directional relation estimates.
#[derive(Debug, Clone)]
pub struct PairRecord {
    pub a: usize,
    pub b: usize,
    pub class_a: i64,
    pub class_b: i64,
    /// Hop distance between the two nodes in the full network.
    pub distance: f64,
    pub kl: f64,
    pub mi: f64,
    pub fi: f64,
    pub gc: f64,
    pub te: f64,
    pub status: RowStatus,
}

impl PairRecord {
    fn metric(&self, name: &str) -> f64 {
        match name {
            "gd" => self.distance,
            "kl" => self.kl,
            "mi" => self.mi,
            "fi" => self.fi,
            "gc" => self.gc,
            "te" => self.te,
            other => unreachable!("unknown metric {other}"),
        }
    }
}

/// Mean of one metric over one unordered class pair.
#[derive(Debug, Clone)]
pub struct ClassCell {
    pub metric: &'static str,
    pub class_a: i64,
    pub class_b: i64,
    /// NaN when every pair in the cell was excluded.
    pub mean: f64,
    pub pairs: usize,
    /// Pairs whose value was non-finite (degenerate or failed) and
    /// therefore left out of the mean.
    pub excluded: usize,
}

/// Mean of one metric over all pairs at one hop distance.
#[derive(Debug, Clone)]
pub struct DistanceCell {
    pub metric: &'static str,
    pub distance: u64,
    pub mean: f64,
    pub pairs: usize,
    pub excluded: usize,
}

/// Constrained closeness of one node under each metric's edge costs.
#[derive(Debug, Clone)]
pub struct ClosenessRow {
    pub id: String,
    pub class: i64,
    pub neighbor_count: usize,
    pub eligible: bool,
    /// Ordered as [`RELATION_METRICS`].
    pub by_metric: [f64; 5],
}

#[derive(Debug, Clone)]
pub struct ProteinReport {
    pub node_count: usize,
    pub edge_count: usize,
    pub class_count: usize,
    pub eligible: Vec<usize>,
    pub pairs: Vec<PairRecord>,
    pub class_table: Vec<ClassCell>,
    pub distance_curve: Vec<DistanceCell>,
    pub closeness: Vec<ClosenessRow>,
}

/// Per-pair RNG seed, independent of evaluation order so pairs could be
/// computed in any schedule without changing a single byte of output.
fn pair_seed(seed: u64, n: usize, a: usize, b: usize) -> u64 {
    seed.wrapping_add(0x9E37_79B9_7F4A_7C15u64.wrapping_mul((a * n + b + 1) as u64))
}

/// The induced subgraph on a node and its neighbors, in ascending index
/// order.
fn ego_net(graph: &Graph<f64>, center: usize) -> Graph<f64> {
    let mut keep = graph.neighbors(center);
    keep.push(center);
    keep.sort_unstable();
    graph.induced_subgraph(&keep)
}

/// Compares two ego-nets; directional estimates come back averaged.
fn compare_egos(
    graph: &Graph<f64>,
    a: usize,
    b: usize,
    settings: &ProteinSettings,
    rng: &mut ChaCha8Rng,
) -> Result<(f64, f64, f64, f64, f64, RowStatus)> {
    let ego_a = ego_net(graph, a);
    let ego_b = ego_net(graph, b);
    let (ga, gb, gamma_a, gamma_b) = align_pair(&ego_a, &ego_b, DisconnectPolicy::default())?;
    let ra = represent(&ga, settings.mode)?;
    let rb = represent(&gb, settings.mode)?;

    let setup_on_a = draw_theta(&gb, &ra, settings.theta_len, rng)?;
    let setup_on_b = draw_theta(&ga, &rb, settings.theta_len, rng)?;

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
    let kl = 0.5 * (report.kl_ab + report.kl_ba);
    let fi = 0.5 * (report.fisher_quantity + fisher_b);
    let gc = 0.5 * (report.granger_ab + report.granger_ba);
    let te = 0.5 * (report.te_ab + report.te_ba);
    let status = match analysis.degenerate {
        Some(reason) => RowStatus::Degenerate(reason),
        None => RowStatus::Ok,
    };
    Ok((kl, report.mi, fi, gc, te, status))
}

/// Runs the full analysis. Pair evaluation order is ascending index pairs,
/// but every pair draws from its own derived RNG, so the order is
/// immaterial to the numbers.
pub fn run_protein(graph: &Graph<f64>, settings: &ProteinSettings) -> Result<ProteinReport> {
    let labels = graph.node_labels().ok_or_else(|| {
        CliError::Parse(
            "node class labels are required for this analysis; \
             supply a vertex file with a trailing class column"
                .into(),
        )
    })?;
    let n = graph.n();

    let eligible: Vec<usize> = (0..n)
        .filter(|&v| graph.neighbors(v).len() > NEIGHBOR_THRESHOLD)
        .collect();
    if eligible.len() < 2 {
        return Err(CliError::Degenerate(format!(
            "fewer than two nodes with more than {} neighbors",
            NEIGHBOR_THRESHOLD
        )));
    }

    // Hop distances between qualifying nodes, one sweep per source.
    let mut hop: BTreeMap<usize, Vec<f64>> = BTreeMap::new();
    for &u in &eligible {
        hop.insert(u, graph.distances_from(u, None)?);
    }

    let mut pairs = Vec::new();
    for (i, &u) in eligible.iter().enumerate() {
        for &v in &eligible[i + 1..] {
            let mut rng = ChaCha8Rng::seed_from_u64(pair_seed(settings.seed, n, u, v));
            let (kl, mi, fi, gc, te, status) =
                match compare_egos(graph, u, v, settings, &mut rng) {
                    Ok(vals) => vals,
                    Err(e) => (
                        f64::NAN,
                        f64::NAN,
                        f64::NAN,
                        f64::NAN,
                        f64::NAN,
                        RowStatus::Error(e.to_string()),
                    ),
                };
            pairs.push(PairRecord {
                a: u,
                b: v,
                class_a: labels[u],
                class_b: labels[v],
                distance: hop[&u][v],
                kl,
                mi,
                fi,
                gc,
                te,
                status,
            });
        }
    }

    let class_table = class_table(&pairs);
    let distance_curve = distance_curve(&pairs);
    let closeness = closeness_rows(graph, labels, &eligible, &pairs)?;

    let mut distinct: Vec<i64> = labels.to_vec();
    distinct.sort_unstable();
    distinct.dedup();

    Ok(ProteinReport {
        node_count: n,
        edge_count: graph.edge_count(),
        class_count: distinct.len(),
        eligible,
        pairs,
        class_table,
        distance_curve,
        closeness,
    })
}

fn accumulate(mean_of: &mut BTreeMap<(i64, i64), (f64, usize, usize)>, key: (i64, i64), v: f64) {
    let cell = mean_of.entry(key).or_insert((0.0, 0, 0));
    if v.is_finite() {
        cell.0 += v;
        cell.1 += 1;
    } else {
        cell.2 += 1;
    }
}

fn class_table(pairs: &[PairRecord]) -> Vec<ClassCell> {
    let mut out = Vec::new();
    for metric in ["gd", "kl", "mi", "fi", "gc", "te"] {
        let mut cells: BTreeMap<(i64, i64), (f64, usize, usize)> = BTreeMap::new();
        for p in pairs {
            let key = (p.class_a.min(p.class_b), p.class_a.max(p.class_b));
            accumulate(&mut cells, key, p.metric(metric));
        }
        for ((ca, cb), (sum, finite, excluded)) in cells {
            out.push(ClassCell {
                metric: leak(metric),
                class_a: ca,
                class_b: cb,
                mean: if finite > 0 {
                    sum / finite as f64
                } else {
                    f64::NAN
                },
                pairs: finite + excluded,
                excluded,
            });
        }
    }
    out
}

/// The six metric names are a fixed set; map them to 'static strs.
fn leak(metric: &str) -> &'static str {
    match metric {
        "gd" => "gd",
        "kl" => "kl",
        "mi" => "mi",
        "fi" => "fi",
        "gc" => "gc",
        "te" => "te",
        other => unreachable!("unknown metric {other}"),
    }
}

fn distance_curve(pairs: &[PairRecord]) -> Vec<DistanceCell> {
    let mut out = Vec::new();
    for metric in RELATION_METRICS {
        let mut cells: BTreeMap<u64, (f64, usize, usize)> = BTreeMap::new();
        for p in pairs {
            if !p.distance.is_finite() {
                continue;
            }
            let d = p.distance as u64;
            let v = p.metric(metric);
            let cell = cells.entry(d).or_insert((0.0, 0, 0));
            if v.is_finite() {
                cell.0 += v;
                cell.1 += 1;
            } else {
                cell.2 += 1;
            }
        }
        for (d, (sum, finite, excluded)) in cells {
            out.push(DistanceCell {
                metric: leak(metric),
                distance: d,
                mean: if finite > 0 {
                    sum / finite as f64
                } else {
                    f64::NAN
                },
                pairs: finite + excluded,
                excluded,
            });
        }
    }
    out
}

/// Edge-traversal cost under one metric: the divergence itself for KL,
/// the inverse for everything else. An infinite metric (identical
/// ego-nets) costs nothing to traverse; a non-positive or missing metric
/// makes the edge unusable.
fn edge_cost(metric: &str, value: f64) -> f64 {
    if metric == "kl" {
        return if value.is_nan() { f64::INFINITY } else { value };
    }
    if value == f64::INFINITY {
        0.0
    } else if value.is_finite() && value > 0.0 {
        1.0 / value
    } else {
        f64::INFINITY
    }
}

fn closeness_rows(
    graph: &Graph<f64>,
    labels: &[i64],
    eligible: &[usize],
    pairs: &[PairRecord],
) -> Result<Vec<ClosenessRow>> {
    let restricted = graph.induced_subgraph(eligible);
    let local_of: BTreeMap<usize, usize> =
        eligible.iter().copied().enumerate().map(|(l, g)| (g, l)).collect();

    let by_pair: BTreeMap<(usize, usize), &PairRecord> =
        pairs.iter().map(|p| ((p.a, p.b), p)).collect();

    // Closeness of each qualifying node, one cost map per metric.
    let mut eligible_closeness: Vec<[f64; 5]> = vec![[0.0; 5]; eligible.len()];
    for (m, metric) in RELATION_METRICS.iter().enumerate() {
        let mut costs: CostMap<f64> = BTreeMap::new();
        for (li, lj, _) in restricted.edges() {
            let (gi, gj) = (eligible[li], eligible[lj]);
            let record = by_pair[&(gi.min(gj), gi.max(gj))];
            costs.insert(cost_key(li, lj), edge_cost(metric, record.metric(metric)));
        }
        for (local, row) in eligible_closeness.iter_mut().enumerate() {
            row[m] = restricted.closeness(local, Some(&costs))?;
        }
    }

    let minima: [f64; 5] = std::array::from_fn(|m| {
        eligible_closeness
            .iter()
            .map(|row| row[m])
            .fold(f64::INFINITY, f64::min)
    });

    let rows = (0..graph.n())
        .map(|v| {
            let by_metric = match local_of.get(&v) {
                Some(&l) => eligible_closeness[l],
                None => minima,
            };
            ClosenessRow {
                id: graph.node_ids()[v].clone(),
                class: labels[v],
                neighbor_count: graph.neighbors(v).len(),
                eligible: local_of.contains_key(&v),
                by_metric,
            }
        })
        .collect();
    Ok(rows)
}

pub fn write_pairs_csv<W: Write>(report: &ProteinReport, ids: &[String], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "node_a", "node_b", "class_a", "class_b", "graph_distance", "kl", "mi", "fi", "gc", "te",
        "status",
    ])
    .map_err(|e| CliError::Io(e.to_string()))?;
    for p in &report.pairs {
        w.write_record([
            ids[p.a].clone(),
            ids[p.b].clone(),
            p.class_a.to_string(),
            p.class_b.to_string(),
            csv_value(p.distance),
            csv_value(p.kl),
            csv_value(p.mi),
            csv_value(p.fi),
            csv_value(p.gc),
            csv_value(p.te),
            p.status.to_string(),
        ])
        .map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

pub fn write_class_table_csv<W: Write>(report: &ProteinReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["metric", "class_a", "class_b", "mean", "pairs", "excluded"])
        .map_err(|e| CliError::Io(e.to_string()))?;
    for c in &report.class_table {
        w.write_record([
            c.metric.to_string(),
            c.class_a.to_string(),
            c.class_b.to_string(),
            csv_value(c.mean),
            c.pairs.to_string(),
            c.excluded.to_string(),
        ])
        .map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

pub fn write_distance_curve_csv<W: Write>(report: &ProteinReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["metric", "distance", "mean", "pairs", "excluded"])
        .map_err(|e| CliError::Io(e.to_string()))?;
    for c in &report.distance_curve {
        w.write_record([
            c.metric.to_string(),
            c.distance.to_string(),
            csv_value(c.mean),
            c.pairs.to_string(),
            c.excluded.to_string(),
        ])
        .map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

pub fn write_closeness_csv<W: Write>(report: &ProteinReport, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "node",
        "class",
        "neighbors",
        "eligible",
        "closeness_kl",
        "closeness_mi",
        "closeness_fi",
        "closeness_gc",
        "closeness_te",
    ])
    .map_err(|e| CliError::Io(e.to_string()))?;
    for r in &report.closeness {
        let mut record = vec![
            r.id.clone(),
            r.class.to_string(),
            r.neighbor_count.to_string(),
            if r.eligible { "1".into() } else { "0".into() },
        ];
        record.extend(r.by_metric.iter().map(|&v| csv_value(v)));
        w.write_record(record)
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use netgauss::{read_pajek, Coupling};

    fn toy() -> Graph<f64> {
        let path = concat!(env!("CARGO_MANIFEST_DIR"), "/fixtures/protein_toy.net");
        read_pajek(path).unwrap()
    }

    fn quick_settings() -> ProteinSettings {
        ProteinSettings {
            mode: RepresentationMode::Sigma,
            sampling: SamplingConfig {
                samples: 300,
                knn_k: 3,
                coupling: Coupling::CommonSource,
            },
            partitions: 3,
            theta_len: 3,
            seed: 5,
        }
    }

    #[test]
    fn eligibility_matches_the_neighbor_count_rule() {
        let g = toy();
        let report = run_protein(&g, &quick_settings()).unwrap();
        let direct: Vec<usize> = (0..g.n())
            .filter(|&v| g.neighbors(v).len() > NEIGHBOR_THRESHOLD)
            .collect();
        assert_eq!(report.eligible, direct);
        assert_eq!(report.eligible.len(), 6);
        assert_eq!(report.pairs.len(), 15);
    }

    #[test]
    fn identical_ego_nets_within_a_class_pin_the_class_table() {
        let report = run_protein(&toy(), &quick_settings()).unwrap();

        let cell = |metric: &str, ca: i64, cb: i64| {
            report
                .class_table
                .iter()
                .find(|c| c.metric == metric && c.class_a == ca && c.class_b == cb)
                .unwrap()
                .clone()
        };

        // Within-class ego-nets are identical by construction: divergence
        // exactly zero, and cross-class divergence strictly positive.
        assert_eq!(cell("kl", 1, 1).mean, 0.0);
        assert_eq!(cell("kl", 2, 2).mean, 0.0);
        assert!(cell("kl", 1, 2).mean > 0.0);

        // Identical pairs have unbounded mutual information: every
        // within-class pair is excluded from the mean, with the count
        // recording why the cell is empty.
        let mi_within = cell("mi", 1, 1);
        assert_eq!(mi_within.excluded, 3);
        assert!(mi_within.mean.is_nan());
        let mi_cross = cell("mi", 1, 2);
        assert_eq!(mi_cross.excluded, 0);
        assert!(mi_cross.mean.is_finite());
    }

    #[test]
    fn degenerate_pairs_are_reported_not_fatal() {
        let report = run_protein(&toy(), &quick_settings()).unwrap();
        let degenerate = report
            .pairs
            .iter()
            .filter(|p| matches!(p.status, RowStatus::Degenerate(_)))
            .count();
        // The six within-class hub pairs (three per class) are identical.
        assert_eq!(degenerate, 6);
        for p in &report.pairs {
            if matches!(p.status, RowStatus::Degenerate(_)) {
                assert_eq!(p.mi, f64::INFINITY);
                assert!(p.gc.is_nan() && p.te.is_nan());
                assert!(p.kl.is_finite() && p.fi.is_finite());
            }
        }
    }

    #[test]
    fn closeness_uses_metric_costs_and_floors_ineligible_nodes() {
        let report = run_protein(&toy(), &quick_settings()).unwrap();

        // The qualifying subgraph is three disjoint hub–hub edges with
        // identical analytic KL costs, so every hub's KL-closeness is the
        // same strictly positive value…
        let kl_idx = RELATION_METRICS.iter().position(|&m| m == "kl").unwrap();
        let hub_values: Vec<f64> = report
            .closeness
            .iter()
            .filter(|r| r.eligible)
            .map(|r| r.by_metric[kl_idx])
            .collect();
        assert_eq!(hub_values.len(), 6);
        assert!(hub_values[0] > 0.0);
        for &v in &hub_values {
            assert_eq!(v, hub_values[0]);
        }

        // …and the floor assigned to non-qualifying nodes is that minimum.
        for r in &report.closeness {
            if !r.eligible {
                assert_eq!(r.by_metric[kl_idx], hub_values[0]);
            }
        }
    }

    #[test]
    fn distance_curve_buckets_are_sane() {
        let report = run_protein(&toy(), &quick_settings()).unwrap();
        for cell in &report.distance_curve {
            assert!(cell.pairs > 0);
            assert!(cell.excluded <= cell.pairs);
        }
        // Adjacent hub pairs (the three cross edges) land in bucket 1.
        let kl_at_1 = report
            .distance_curve
            .iter()
            .find(|c| c.metric == "kl" && c.distance == 1)
            .unwrap();
        assert_eq!(kl_at_1.pairs, 3);
        assert!(kl_at_1.mean > 0.0);
    }

    #[test]
    fn missing_class_labels_are_rejected() {
        // An unlabeled graph: build one from scratch.
        let g = netgauss::parse_edge_list::<f64>("0 1\n1 2\n").unwrap();
        let err = run_protein(&g, &quick_settings()).unwrap_err();
        assert_eq!(err.exit_code(), 4);
        assert!(err.to_string().contains("class labels"));
    }

    #[test]
    fn too_few_qualifying_nodes_is_a_degenerate_input() {
        let g = netgauss::parse_edge_list::<f64>("0 1\n1 2\n2 0\n")
            .unwrap()
            .with_labels(vec![1, 1, 2])
            .unwrap();
        let err = run_protein(&g, &quick_settings()).unwrap_err();
        assert_eq!(err.exit_code(), 6);
    }
}
