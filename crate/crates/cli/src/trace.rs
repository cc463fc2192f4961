//! Evolution experiments: generate an initial graph, apply an iterated
//! process, and at every step record the full relation report between the
//! evolved graph and the fixed starting graph, plus the correlation
//! summaries between the two causality estimates.
//!
//! Sentinel policy for the CSV output: finite values print as numbers,
//! positive infinity prints as the literal `inf`, and values that do not
//! exist for a row print as empty cells with the row's `status` column
//! carrying the reason (`ok`, `degenerate:<reason>`, or `error:<reason>`).

use std::io::Write;

use rand::Rng;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

use netgauss::{
    align_pair, evolve_step, fisher_quantity, generate, relate, represent, DisconnectPolicy,
    EvolutionSpec, FisherSetup, Graph, ModelSpec, NetworkGaussian, RepresentationMode,
    SamplingConfig,
};

use crate::error::{CliError, Result};
use crate::stats::{self, Correlation};

/// Everything one evolution run needs. `theta_len`/`theta_draws` control
/// the decoding protocol: each iteration redraws `theta_draws` parameter
/// vectors, each built from the degrees of `theta_len` uniformly sampled
/// nodes of the aligned evolved graph and applied to `theta_len` uniformly
/// sampled target nodes of the aligned initial graph.
#[derive(Debug, Clone)]
pub struct EvolveSettings {
    pub model: ModelSpec,
    pub evolution: EvolutionSpec,
    pub mode: RepresentationMode,
    pub sampling: SamplingConfig,
    pub partitions: usize,
    pub theta_len: usize,
    pub theta_draws: usize,
    pub seed: u64,
}

/// Outcome class of one iteration row.
#[derive(Debug, Clone, PartialEq, Eq)]
pub enum RowStatus {
    Ok,
    Degenerate(String),
    Error(String),
}

impl std::fmt::Display for RowStatus {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            RowStatus::Ok => write!(f, "ok"),
            RowStatus::Degenerate(reason) => write!(f, "degenerate:{}", reason),
            RowStatus::Error(reason) => write!(f, "error:{}", reason),
        }
    }
}

/// One iteration of a trace. Fields that could not be computed hold NaN
/// (scalars) or are empty (lists); `status` says why.
#[derive(Debug, Clone)]
pub struct IterationRecord {
    pub iteration: usize,
    /// Node count of the evolved graph before alignment.
    pub n_b: usize,
    /// Product of the two alignment rationalities.
    pub gamma: f64,
    pub entropy_a: f64,
    pub entropy_b: f64,
    pub kl_ab: f64,
    pub kl_ba: f64,
    pub kl_mean: f64,
    pub mi: f64,
    pub fisher_mean: f64,
    pub fisher_draws: Vec<f64>,
    pub granger_ab: f64,
    pub granger_ba: f64,
    pub te_ab: f64,
    pub te_ba: f64,
    pub tg_ab: Vec<f64>,
    pub tg_ba: Vec<f64>,
    pub tt_ab: Vec<f64>,
    pub tt_ba: Vec<f64>,
    pub status: RowStatus,
}

impl IterationRecord {
    fn unavailable(iteration: usize, n_b: usize, status: RowStatus) -> Self {
        IterationRecord {
            iteration,
            n_b,
            gamma: f64::NAN,
            entropy_a: f64::NAN,
            entropy_b: f64::NAN,
            kl_ab: f64::NAN,
            kl_ba: f64::NAN,
            kl_mean: f64::NAN,
            mi: f64::NAN,
            fisher_mean: f64::NAN,
            fisher_draws: Vec::new(),
            granger_ab: f64::NAN,
            granger_ba: f64::NAN,
            te_ab: f64::NAN,
            te_ba: f64::NAN,
            tg_ab: Vec::new(),
            tg_ba: Vec::new(),
            tt_ab: Vec::new(),
            tt_ba: Vec::new(),
            status,
        }
    }
}

/// A completed (possibly truncated) evolution run.
#[derive(Debug, Clone)]
pub struct ExperimentTrace {
    pub records: Vec<IterationRecord>,
    /// Set when the evolution chain itself failed and the run stopped
    /// before reaching the requested iteration count.
    pub stopped_early: Option<String>,
}

/// Runs the experiment. One seeded RNG stream drives everything; the draw
/// order per iteration is: evolution step, then the Θ draws (nodes of the
/// aligned evolved graph, then target nodes of the aligned initial graph,
/// per draw), then the relation sampling. Iteration 0 — the graph against
/// itself — is never evaluated; the first record is iteration 1.
pub fn run_evolution(settings: &EvolveSettings) -> Result<ExperimentTrace> {
    if settings.theta_len == 0 || settings.theta_draws == 0 {
        return Err(CliError::Usage(
            "theta-len and theta-draws must be at least 1".into(),
        ));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(settings.seed);
    let origin: Graph<f64> = generate(&settings.model, &mut rng)?;
    // The evolution chain runs on the raw graph; representation always
    // works on the largest component, so steps that disconnect the graph
    // are observed rather than rejected.
    let origin_core = origin.largest_component().map_err(CliError::from)?;
    let mut current = origin.clone();

    let mut records = Vec::with_capacity(settings.evolution.iterations);
    let mut stopped_early = None;
    for iteration in 1..=settings.evolution.iterations {
        match evolve_step(&current, &settings.evolution, &mut rng) {
            Ok(next) => current = next,
            Err(err) => {
                let reason = err.to_string();
                records.push(IterationRecord::unavailable(
                    iteration,
                    current.n(),
                    RowStatus::Error(reason.clone()),
                ));
                stopped_early = Some(reason);
                break;
            }
        }
        records.push(evaluate_iteration(
            &origin_core,
            &current,
            iteration,
            settings,
            &mut rng,
        ));
    }
    Ok(ExperimentTrace {
        records,
        stopped_early,
    })
}

/// Builds one Θ setup: parameter values are the degrees of `len` sampled
/// nodes of `from`, applied to `len` sampled target nodes of `onto`.
pub fn draw_theta<R: Rng + ?Sized>(
    from: &Graph<f64>,
    onto: &NetworkGaussian<f64>,
    len: usize,
    rng: &mut R,
) -> Result<FisherSetup<f64>> {
    let len = len.min(from.n()).min(onto.n());
    let degrees = from.degrees();
    let picked = rand::seq::index::sample(rng, from.n(), len);
    let theta = ndarray::Array1::from_iter(picked.iter().map(|i| degrees[i]));
    let targets = rand::seq::index::sample(rng, onto.n(), len).into_vec();
    FisherSetup::new(theta, targets).map_err(CliError::from)
}

fn evaluate_iteration(
    origin_core: &Graph<f64>,
    current: &Graph<f64>,
    iteration: usize,
    settings: &EvolveSettings,
    rng: &mut ChaCha8Rng,
) -> IterationRecord {
    let n_b = current.n();
    let fail = |err: CliError| {
        IterationRecord::unavailable(iteration, n_b, RowStatus::Error(err.to_string()))
    };

    let current_core = match current.largest_component() {
        Ok(g) => g,
        Err(e) => return fail(e.into()),
    };
    let (ga, gb, gamma_a, gamma_b) =
        match align_pair(origin_core, &current_core, DisconnectPolicy::default()) {
            Ok(v) => v,
            Err(e) => return fail(e.into()),
        };
    let ra = match represent(&ga, settings.mode) {
        Ok(v) => v,
        Err(e) => return fail(e.into()),
    };
    let rb = match represent(&gb, settings.mode) {
        Ok(v) => v,
        Err(e) => return fail(e.into()),
    };

    let mut setups = Vec::with_capacity(settings.theta_draws);
    for _ in 0..settings.theta_draws {
        match draw_theta(&gb, &ra, settings.theta_len, rng) {
            Ok(s) => setups.push(s),
            Err(e) => return fail(e),
        }
    }

    let analysis = match relate(
        &ra,
        &rb,
        gamma_a,
        gamma_b,
        &setups[0],
        settings.partitions,
        &settings.sampling,
        rng,
    ) {
        Ok(v) => v,
        Err(e) => return fail(e.into()),
    };

    let mut fisher_draws = vec![analysis.report.fisher_quantity];
    for setup in &setups[1..] {
        match fisher_quantity(setup, &ra) {
            Ok(q) => fisher_draws.push(q),
            Err(e) => return fail(e.into()),
        }
    }
    let fisher_mean = stats::mean(&fisher_draws).expect("at least one draw");

    let report = analysis.report;
    let status = match analysis.degenerate {
        Some(reason) => RowStatus::Degenerate(reason),
        None => RowStatus::Ok,
    };
    IterationRecord {
        iteration,
        n_b,
        gamma: report.gamma_a * report.gamma_b,
        entropy_a: ra.entropy(),
        entropy_b: rb.entropy(),
        kl_ab: report.kl_ab,
        kl_ba: report.kl_ba,
        kl_mean: 0.5 * (report.kl_ab + report.kl_ba),
        mi: report.mi,
        fisher_mean,
        fisher_draws,
        granger_ab: report.granger_ab,
        granger_ba: report.granger_ba,
        te_ab: report.te_ab,
        te_ba: report.te_ba,
        tg_ab: analysis.tg_ab,
        tg_ba: analysis.tg_ba,
        tt_ab: analysis.tt_ab,
        tt_ba: analysis.tt_ba,
        status,
    }
}

/// Formats one value under the sentinel policy.
pub fn csv_value(v: f64) -> String {
    if v.is_nan() {
        String::new()
    } else if v == f64::INFINITY {
        "inf".into()
    } else if v == f64::NEG_INFINITY {
        "-inf".into()
    } else {
        format!("{}", v)
    }
}

fn csv_list(values: &[f64]) -> String {
    values
        .iter()
        .map(|&v| csv_value(v))
        .collect::<Vec<_>>()
        .join(";")
}

pub const TRACE_HEADER: [&str; 22] = [
    "iteration",
    "n_b",
    "gamma",
    "entropy_a",
    "entropy_b",
    "kl_ab",
    "kl_ba",
    "kl_mean",
    "mi",
    "fisher_mean",
    "fisher_draws",
    "granger_ab",
    "granger_ba",
    "granger_mean",
    "te_ab",
    "te_ba",
    "te_mean",
    "tg_ab_parts",
    "tg_ba_parts",
    "tt_ab_parts",
    "tt_ba_parts",
    "status",
];

/// Writes the trace as CSV: one header row, one row per iteration.
pub fn write_trace_csv<W: Write>(trace: &ExperimentTrace, out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(TRACE_HEADER)
        .map_err(|e| CliError::Io(e.to_string()))?;
    for r in &trace.records {
        let granger_mean = 0.5 * (r.granger_ab + r.granger_ba);
        let te_mean = 0.5 * (r.te_ab + r.te_ba);
        w.write_record([
            r.iteration.to_string(),
            r.n_b.to_string(),
            csv_value(r.gamma),
            csv_value(r.entropy_a),
            csv_value(r.entropy_b),
            csv_value(r.kl_ab),
            csv_value(r.kl_ba),
            csv_value(r.kl_mean),
            csv_value(r.mi),
            csv_value(r.fisher_mean),
            csv_list(&r.fisher_draws),
            csv_value(r.granger_ab),
            csv_value(r.granger_ba),
            csv_value(granger_mean),
            csv_value(r.te_ab),
            csv_value(r.te_ba),
            csv_value(te_mean),
            csv_list(&r.tg_ab),
            csv_list(&r.tg_ba),
            csv_list(&r.tt_ab),
            csv_list(&r.tt_ba),
            r.status.to_string(),
        ])
        .map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

/// One correlation summary row: the two causality estimates compared
/// either per partition (pooled across iterations) or as per-iteration
/// mean series, in one direction.
#[derive(Debug, Clone)]
pub struct CorrelationRow {
    pub level: &'static str,
    pub direction: &'static str,
    pub correlation: Option<Correlation>,
}

/// The four summary correlations of a trace: {per-partition, series} ×
/// {a→b, b→a}. Rows that failed are skipped; non-finite values are dropped
/// pairwise by the correlation itself.
pub fn trace_correlations(trace: &ExperimentTrace) -> Vec<CorrelationRow> {
    let ok: Vec<&IterationRecord> = trace
        .records
        .iter()
        .filter(|r| r.status == RowStatus::Ok)
        .collect();

    let pooled = |tg: fn(&IterationRecord) -> &Vec<f64>, tt: fn(&IterationRecord) -> &Vec<f64>| {
        let xs: Vec<f64> = ok.iter().flat_map(|r| tg(r).iter().copied()).collect();
        let ys: Vec<f64> = ok.iter().flat_map(|r| tt(r).iter().copied()).collect();
        stats::pearson(&xs, &ys)
    };
    let series = |tg: fn(&IterationRecord) -> f64, tt: fn(&IterationRecord) -> f64| {
        let xs: Vec<f64> = ok.iter().map(|r| tg(r)).collect();
        let ys: Vec<f64> = ok.iter().map(|r| tt(r)).collect();
        stats::pearson(&xs, &ys)
    };

    vec![
        CorrelationRow {
            level: "per-partition",
            direction: "ab",
            correlation: pooled(|r| &r.tg_ab, |r| &r.tt_ab),
        },
        CorrelationRow {
            level: "per-partition",
            direction: "ba",
            correlation: pooled(|r| &r.tg_ba, |r| &r.tt_ba),
        },
        CorrelationRow {
            level: "series",
            direction: "ab",
            correlation: series(|r| r.granger_ab, |r| r.te_ab),
        },
        CorrelationRow {
            level: "series",
            direction: "ba",
            correlation: series(|r| r.granger_ba, |r| r.te_ba),
        },
    ]
}

/// Writes the correlation summary CSV (`level,direction,r,p,pairs`).
pub fn write_correlations_csv<W: Write>(rows: &[CorrelationRow], out: W) -> Result<()> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record(["level", "direction", "r", "p", "pairs"])
        .map_err(|e| CliError::Io(e.to_string()))?;
    for row in rows {
        let (r, p, n) = match row.correlation {
            Some(c) => (csv_value(c.r), csv_value(c.p), c.n.to_string()),
            None => (String::new(), String::new(), "0".to_string()),
        };
        w.write_record([row.level.to_string(), row.direction.to_string(), r, p, n])
            .map_err(|e| CliError::Io(e.to_string()))?;
    }
    w.flush().map_err(|e| CliError::Io(e.to_string()))
}

#[cfg(test)]
mod tests {
    use super::*;
    use netgauss::{Coupling, ForeignRule, Process};

    fn quick_settings(process: Process, iterations: usize) -> EvolveSettings {
        EvolveSettings {
            model: ModelSpec::ws(24, 4, 0.3),
            evolution: EvolutionSpec {
                process,
                iterations,
                foreign: ForeignRule::Er { rho: 0.5 },
            },
            mode: RepresentationMode::Sigma,
            sampling: SamplingConfig {
                samples: 220,
                knn_k: 3,
                coupling: Coupling::CommonSource,
            },
            partitions: 3,
            theta_len: 5,
            theta_draws: 2,
            seed: 7,
        }
    }

    #[test]
    fn delete_trace_has_one_record_per_iteration_starting_at_one() {
        let trace = run_evolution(&quick_settings(Process::Delete, 4)).unwrap();
        assert_eq!(trace.records.len(), 4);
        assert!(trace.stopped_early.is_none());
        for (idx, r) in trace.records.iter().enumerate() {
            assert_eq!(r.iteration, idx + 1);
        }
        // Deletion shrinks the evolved graph one node per iteration.
        let sizes: Vec<usize> = trace.records.iter().map(|r| r.n_b).collect();
        assert_eq!(sizes, vec![23, 22, 21, 20]);
    }

    #[test]
    fn records_carry_consistent_means_and_partition_lists() {
        let trace = run_evolution(&quick_settings(Process::Rewire, 3)).unwrap();
        for r in &trace.records {
            if r.status != RowStatus::Ok {
                continue;
            }
            assert_eq!(r.kl_mean, 0.5 * (r.kl_ab + r.kl_ba));
            assert_eq!(r.tg_ab.len(), 3);
            assert_eq!(r.tt_ab.len(), 3);
            assert_eq!(r.tg_ba.len(), 3);
            assert_eq!(r.tt_ba.len(), 3);
            assert_eq!(r.fisher_draws.len(), 2);
            assert!(r.gamma > 0.0 && r.gamma <= 1.0);
            assert!(r.kl_ab >= 0.0 && r.kl_ba >= 0.0);
        }
    }

    #[test]
    fn identical_settings_reproduce_the_trace_bit_for_bit() {
        let a = run_evolution(&quick_settings(Process::Add, 3)).unwrap();
        let b = run_evolution(&quick_settings(Process::Add, 3)).unwrap();
        let mut buf_a = Vec::new();
        let mut buf_b = Vec::new();
        write_trace_csv(&a, &mut buf_a).unwrap();
        write_trace_csv(&b, &mut buf_b).unwrap();
        assert_eq!(buf_a, buf_b);
    }

    #[test]
    fn evolution_exhaustion_truncates_with_an_error_row() {
        // Deleting from a 3-node start hits the 2-node floor immediately.
        let mut settings = quick_settings(Process::Delete, 10);
        settings.model = ModelSpec::er(3, 1.0);
        let trace = run_evolution(&settings).unwrap();
        assert!(trace.stopped_early.is_some());
        let last = trace.records.last().unwrap();
        assert!(matches!(last.status, RowStatus::Error(_)));
        assert!(trace.records.len() < 10);
    }

    #[test]
    fn sentinel_formatting_follows_the_documented_policy() {
        assert_eq!(csv_value(f64::INFINITY), "inf");
        assert_eq!(csv_value(f64::NEG_INFINITY), "-inf");
        assert_eq!(csv_value(f64::NAN), "");
        assert_eq!(csv_value(1.5), "1.5");
        assert_eq!(csv_list(&[1.0, f64::INFINITY]), "1;inf");
    }

    #[test]
    fn correlation_summary_has_all_four_rows() {
        let trace = run_evolution(&quick_settings(Process::Delete, 5)).unwrap();
        let rows = trace_correlations(&trace);
        assert_eq!(rows.len(), 4);
        let mut buf = Vec::new();
        write_correlations_csv(&rows, &mut buf).unwrap();
        let text = String::from_utf8(buf).unwrap();
        assert!(text.starts_with("level,direction,r,p,pairs\n"));
        assert_eq!(text.lines().count(), 5);
        // Pooled rows see iterations × partitions values when all succeed.
        let pooled_ba = rows
            .iter()
            .find(|r| r.level == "per-partition" && r.direction == "ba")
            .unwrap();
        if let Some(c) = pooled_ba.correlation {
            assert!(c.n <= 15);
            assert!(c.r.abs() <= 1.0);
        }
    }

    #[test]
    fn mode_and_model_flow_through_settings() {
        let mut settings = quick_settings(Process::Delete, 2);
        settings.mode = RepresentationMode::SigmaDual;
        settings.model = ModelSpec::ba(20, 6, 2);
        let trace = run_evolution(&settings).unwrap();
        assert_eq!(trace.records.len(), 2);
        assert_eq!(trace.records[0].n_b, 19);
    }
}
