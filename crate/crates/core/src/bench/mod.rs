//! Anomaly benchmark: corpus loading, the (circuit × kind × mode) grid,
//! the records CSV and the aggregate analyses.

mod analysis;
mod config;
mod corpus;
mod record;
mod run;

use std::collections::BTreeMap;
use std::path::Path;

use thiserror::Error;

pub use analysis::{
    blind_spot_analysis, correlations, per_kind, per_severity, record_counts, runtime_study, write_runtime_csv,
    BenchSummary, BlindSpotRow, BlindSpotSummary, CorrelationRow, MeanStd, RuntimeRow, ScoreSummary, Thresholds,
};
pub use config::{BenchConfig, ModeSet, SEED_ENV};
pub use corpus::{load_corpus, Corpus, CorpusEntry, Rejection};
pub use record::{
    format_sig9, read_records, records_without_timings, round_sig9, write_records, BehavioralScores, BenchRecord,
    InteractionScores, SizeClass, Status, StructuralScores, COLUMNS, TIMING_COLUMNS,
};
pub use run::{inject_stream_label, reference_stream_label, run_grid, sample_stream_label};

use crate::anomaly::AnomalyError;
use crate::metrics::MetricError;
use crate::simulator::SimError;

#[derive(Debug, Error)]
pub enum BenchError {
    #[error("configuration: {0}")]
    Config(String),
    #[error("i/o: {0}")]
    Io(String),
    #[error("csv: {0}")]
    Csv(String),
    #[error("no circuits left after filtering")]
    EmptyCorpus,
    #[error(transparent)]
    Anomaly(#[from] AnomalyError),
    #[error(transparent)]
    Metric(#[from] MetricError),
    #[error(transparent)]
    Simulation(#[from] SimError),
}

impl From<std::io::Error> for BenchError {
    fn from(e: std::io::Error) -> Self {
        BenchError::Io(e.to_string())
    }
}

impl From<csv::Error> for BenchError {
    fn from(e: csv::Error) -> Self {
        BenchError::Csv(e.to_string())
    }
}

/// Output of a full benchmark run.
#[derive(Debug, Clone)]
pub struct BenchRun {
    pub config: BenchConfig,
    pub corpus: Corpus,
    pub records: Vec<BenchRecord>,
}

impl BenchRun {
    pub fn thresholds(&self) -> Thresholds {
        Thresholds {
            sis_blind: self.config.sis_blind_threshold,
            detection: self.config.detection_threshold,
        }
    }

    pub fn summary(&self) -> BenchSummary {
        let extra = BTreeMap::from([
            ("circuits_loaded".to_string(), self.corpus.entries.len()),
            ("parse_failures".to_string(), self.corpus.parse_failures.len()),
            ("filtered_out".to_string(), self.corpus.filtered_out.len()),
        ]);
        let config = serde_json::to_value(&self.config).expect("config serializes");
        BenchSummary::build(config, extra, &self.records, self.thresholds())
    }

    /// Writes `records.csv`, `summary.json` and `runtime.csv` into `dir`.
    pub fn write_outputs(&self, dir: &Path) -> Result<(), BenchError> {
        std::fs::create_dir_all(dir)?;
        write_records(std::fs::File::create(dir.join("records.csv"))?, &self.records)?;
        let summary = self.summary();
        std::fs::write(dir.join("summary.json"), summary.to_json(true) + "\n")?;
        write_runtime_csv(std::fs::File::create(dir.join("runtime.csv"))?, &summary.runtime_table)?;
        Ok(())
    }
}

/// Loads and filters the corpus, then runs the grid.
pub fn run_benchmark(config: &BenchConfig) -> Result<BenchRun, BenchError> {
    config.validate()?;
    let corpus = load_corpus(&config.corpus_dir, config)?;
    if corpus.entries.is_empty() {
        return Err(BenchError::EmptyCorpus);
    }
    let records = run_grid(&corpus.entries, config)?;
    Ok(BenchRun {
        config: config.clone(),
        corpus,
        records,
    })
}
