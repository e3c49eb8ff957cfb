use std::collections::BTreeMap;
use std::io::Write;

use serde::Serialize;

use super::record::{format_sig9, BenchRecord, Status};
use super::BenchError;
use crate::stats::{linear_fit, pearson, spearman, summarize, Correlation, PairedSample, Summary};

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Thresholds {
    pub sis_blind: f64,
    pub detection: f64,
}

impl Default for Thresholds {
    fn default() -> Self {
        Thresholds {
            sis_blind: 0.95,
            detection: 0.95,
        }
    }
}

/// Row label: `"fixed"` first, then severities in increasing order.
fn group_key(r: &BenchRecord) -> (u8, u64, String) {
    match r.severity {
        None => (0, 0, r.mode_label()),
        Some(s) => (1, s.to_bits(), r.mode_label()),
    }
}

fn groups<'a>(records: impl Iterator<Item = &'a BenchRecord>) -> Vec<(String, Vec<&'a BenchRecord>)> {
    let mut map: BTreeMap<(u8, u64, String), Vec<&BenchRecord>> = BTreeMap::new();
    for r in records {
        map.entry(group_key(r)).or_default().push(r);
    }
    map.into_iter().map(|((_, _, label), v)| (label, v)).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlindSpotRow {
    pub severity: String,
    pub blind_cases: usize,
    pub igs_detected: usize,
    pub ois_detected: usize,
    pub igs_pct: Option<f64>,
    pub ois_pct: Option<f64>,
}

impl BlindSpotRow {
    fn new(severity: String, blind: &[&BenchRecord], t: Thresholds) -> Self {
        let igs_detected = blind
            .iter()
            .filter(|r| r.igs().is_some_and(|v| v < t.detection))
            .count();
        let ois_detected = blind
            .iter()
            .filter(|r| r.ois().is_some_and(|v| v < t.detection))
            .count();
        let pct = |d: usize| (!blind.is_empty()).then(|| 100.0 * d as f64 / blind.len() as f64);
        BlindSpotRow {
            severity,
            blind_cases: blind.len(),
            igs_detected,
            ois_detected,
            igs_pct: pct(igs_detected),
            ois_pct: pct(ois_detected),
        }
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BlindSpotSummary {
    pub rows: Vec<BlindSpotRow>,
    pub total: BlindSpotRow,
}

/// Detection rates among structurally blind cells (SIS at or above the
/// blind threshold). Only cells with all three scores take part.
pub fn blind_spot_analysis(records: &[BenchRecord], t: Thresholds) -> BlindSpotSummary {
    let blind: Vec<&BenchRecord> = records
        .iter()
        .filter(|r| r.status == Status::Ok && r.ois().is_some() && r.igs().is_some())
        .filter(|r| r.sis().is_some_and(|s| s >= t.sis_blind))
        .collect();
    let rows = groups(blind.iter().copied())
        .into_iter()
        .map(|(label, rs)| BlindSpotRow::new(label, &rs, t))
        .collect();
    BlindSpotSummary {
        rows,
        total: BlindSpotRow::new("total".into(), &blind, t),
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct CorrelationRow {
    pub group: String,
    pub n: usize,
    pub pearson: Option<Correlation>,
    pub spearman: Option<Correlation>,
    pub slope: Option<f64>,
    pub intercept: Option<f64>,
    /// Why the statistics are missing, when they are.
    pub note: Option<String>,
}

fn correlation_row(group: String, rs: &[&BenchRecord]) -> CorrelationRow {
    let (xs, ys): (Vec<f64>, Vec<f64>) = rs.iter().filter_map(|r| Some((r.igs()?, r.ois()?))).unzip();
    let n = xs.len();
    let mut row = CorrelationRow {
        group,
        n,
        pearson: None,
        spearman: None,
        slope: None,
        intercept: None,
        note: None,
    };
    let sample = match PairedSample::new(xs, ys) {
        Ok(s) => s,
        Err(e) => {
            row.note = Some(e.to_string());
            return row;
        }
    };
    match (pearson(&sample), spearman(&sample), linear_fit(&sample)) {
        (Ok(p), Ok(s), Ok((slope, intercept))) => {
            row.pearson = Some(p);
            row.spearman = Some(s);
            row.slope = Some(slope);
            row.intercept = Some(intercept);
        }
        (Err(e), _, _) | (_, Err(e), _) | (_, _, Err(e)) => row.note = Some(e.to_string()),
    }
    row
}

/// IGS against OIS over cells where OIS was computed: one `"all"` row, then
/// one row per mode/severity group.
pub fn correlations(records: &[BenchRecord]) -> Vec<CorrelationRow> {
    let available: Vec<&BenchRecord> = records.iter().filter(|r| r.status == Status::Ok).collect();
    let mut rows = vec![correlation_row("all".into(), &available)];
    for (label, rs) in groups(available.iter().copied()) {
        rows.push(correlation_row(label, &rs));
    }
    rows
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct ScoreSummary {
    pub n: usize,
    pub sis: Option<Summary>,
    pub igs: Option<Summary>,
    pub ois: Option<Summary>,
}

fn score_summary(rs: &[&BenchRecord]) -> ScoreSummary {
    let collect = |f: fn(&BenchRecord) -> Option<f64>| -> Option<Summary> {
        let v: Vec<f64> = rs.iter().filter_map(|r| f(r)).collect();
        summarize(&v).ok()
    };
    ScoreSummary {
        n: rs.len(),
        sis: collect(BenchRecord::sis),
        igs: collect(BenchRecord::igs),
        ois: collect(BenchRecord::ois),
    }
}

fn scored(records: &[BenchRecord]) -> impl Iterator<Item = &BenchRecord> {
    records.iter().filter(|r| r.status != Status::SkippedIneligible)
}

/// kind → mode/severity label → score summaries.
pub fn per_kind(records: &[BenchRecord]) -> BTreeMap<String, BTreeMap<String, ScoreSummary>> {
    let mut by_kind: BTreeMap<_, Vec<&BenchRecord>> = BTreeMap::new();
    for r in scored(records) {
        by_kind.entry(r.kind).or_default().push(r);
    }
    by_kind
        .into_iter()
        .map(|(kind, rs)| {
            let inner = groups(rs.into_iter())
                .into_iter()
                .map(|(l, g)| (l, score_summary(&g)))
                .collect();
            (kind.name().to_string(), inner)
        })
        .collect()
}

pub fn per_severity(records: &[BenchRecord]) -> BTreeMap<String, ScoreSummary> {
    groups(scored(records))
        .into_iter()
        .map(|(l, g)| (l, score_summary(&g)))
        .collect()
}

#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct MeanStd {
    pub n: usize,
    pub mean: f64,
    pub stddev: f64,
}

fn mean_std(values: &[f64]) -> Option<MeanStd> {
    summarize(values).ok().map(|s| MeanStd {
        n: s.count,
        mean: s.mean,
        stddev: s.stddev,
    })
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct RuntimeRow {
    pub num_qubits: usize,
    pub t_sis_ms: Option<MeanStd>,
    pub t_igs_ms: Option<MeanStd>,
    pub t_ois_ms: Option<MeanStd>,
}

/// Mean and sample standard deviation of the metric timings per qubit count.
pub fn runtime_study(records: &[BenchRecord]) -> Vec<RuntimeRow> {
    let mut by_n: BTreeMap<usize, Vec<&BenchRecord>> = BTreeMap::new();
    for r in records {
        by_n.entry(r.num_qubits).or_default().push(r);
    }
    by_n.into_iter()
        .filter_map(|(num_qubits, rs)| {
            let col =
                |f: fn(&BenchRecord) -> Option<f64>| mean_std(&rs.iter().filter_map(|r| f(r)).collect::<Vec<_>>());
            let row = RuntimeRow {
                num_qubits,
                t_sis_ms: col(|r| r.t_sis_ms),
                t_igs_ms: col(|r| r.t_igs_ms),
                t_ois_ms: col(|r| r.t_ois_ms),
            };
            (row.t_sis_ms.is_some() || row.t_igs_ms.is_some()).then_some(row)
        })
        .collect()
}

pub fn write_runtime_csv<W: Write>(out: W, rows: &[RuntimeRow]) -> Result<(), BenchError> {
    let mut w = csv::Writer::from_writer(out);
    w.write_record([
        "num_qubits",
        "n_sis",
        "t_sis_mean_ms",
        "t_sis_std_ms",
        "n_igs",
        "t_igs_mean_ms",
        "t_igs_std_ms",
        "n_ois",
        "t_ois_mean_ms",
        "t_ois_std_ms",
    ])?;
    for row in rows {
        let mut fields = vec![row.num_qubits.to_string()];
        for m in [row.t_sis_ms, row.t_igs_ms, row.t_ois_ms] {
            match m {
                Some(m) => fields.extend([m.n.to_string(), format_sig9(m.mean), format_sig9(m.stddev)]),
                None => fields.extend(["0".to_string(), String::new(), String::new()]),
            }
        }
        w.write_record(&fields)?;
    }
    w.flush()?;
    Ok(())
}

/// Cell counts by status.
pub fn record_counts(records: &[BenchRecord]) -> BTreeMap<String, usize> {
    let mut counts = BTreeMap::new();
    counts.insert("cells".to_string(), records.len());
    for st in [
        Status::Ok,
        Status::SkippedQubitCap,
        Status::SkippedSimulation,
        Status::SkippedIneligible,
    ] {
        counts.insert(st.name().to_string(), records.iter().filter(|r| r.status == st).count());
    }
    let mut ids: Vec<&str> = records.iter().map(|r| r.circuit_id.as_str()).collect();
    ids.sort_unstable();
    ids.dedup();
    counts.insert("circuits".to_string(), ids.len());
    counts
}

#[derive(Debug, Clone, Serialize)]
pub struct BenchSummary {
    pub config: serde_json::Value,
    pub counts: BTreeMap<String, usize>,
    pub per_kind: BTreeMap<String, BTreeMap<String, ScoreSummary>>,
    pub per_severity: BTreeMap<String, ScoreSummary>,
    pub blind_spot_table: BlindSpotSummary,
    pub correlations: Vec<CorrelationRow>,
    pub runtime_table: Vec<RuntimeRow>,
}

impl BenchSummary {
    /// Every analysis over `records`. `counts` is merged over the status
    /// counts.
    pub fn build(
        config: serde_json::Value,
        extra_counts: BTreeMap<String, usize>,
        records: &[BenchRecord],
        thresholds: Thresholds,
    ) -> Self {
        let mut counts = record_counts(records);
        counts.extend(extra_counts);
        BenchSummary {
            config,
            counts,
            per_kind: per_kind(records),
            per_severity: per_severity(records),
            blind_spot_table: blind_spot_analysis(records, thresholds),
            correlations: correlations(records),
            runtime_table: runtime_study(records),
        }
    }

    /// Pretty JSON; without the runtime table when `with_runtime` is false.
    pub fn to_json(&self, with_runtime: bool) -> String {
        let mut v = serde_json::to_value(self).expect("summary serializes");
        if !with_runtime {
            v.as_object_mut().expect("object").remove("runtime_table");
        }
        serde_json::to_string_pretty(&v).expect("summary serializes")
    }
}
