use std::path::{Path, PathBuf};

use serde::Serialize;

use super::BenchError;
use crate::anomaly::AnomalyKind;

pub const SEED_ENV: &str = "QCI_SEED";

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum ModeSet {
    Fixed,
    Severity,
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct BenchConfig {
    pub corpus_dir: PathBuf,
    pub max_qubits: usize,
    /// Counts every op, measures and barriers included.
    pub max_gates: usize,
    pub ois_qubit_cap: usize,
    pub shots: u64,
    pub master_seed: u64,
    pub severities: Vec<f64>,
    pub modes: Vec<ModeSet>,
    pub kinds: Vec<AnomalyKind>,
    pub sis_blind_threshold: f64,
    pub detection_threshold: f64,
    pub parallelism: usize,
    /// Compare sampled test outputs against the exact reference distribution
    /// instead of a sampled one.
    pub exact_reference: bool,
    pub small_max_qubits: usize,
    pub medium_max_qubits: usize,
}

impl Default for BenchConfig {
    fn default() -> Self {
        BenchConfig {
            corpus_dir: PathBuf::from("corpus/sample"),
            max_qubits: 40,
            max_gates: 2000,
            ois_qubit_cap: 14,
            shots: 1024,
            master_seed: 42,
            severities: vec![0.1, 0.3, 0.6],
            modes: vec![ModeSet::Fixed, ModeSet::Severity],
            kinds: AnomalyKind::ALL.to_vec(),
            sis_blind_threshold: 0.95,
            detection_threshold: 0.95,
            parallelism: std::thread::available_parallelism().map_or(1, |n| n.get()),
            exact_reference: false,
            small_max_qubits: 10,
            medium_max_qubits: 27,
        }
    }
}

fn parse<T: std::str::FromStr>(key: &str, value: &str) -> Result<T, BenchError> {
    value
        .trim()
        .parse()
        .map_err(|_| BenchError::Config(format!("invalid value `{value}` for `{key}`")))
}

fn list(value: &str) -> impl Iterator<Item = &str> {
    value.split(',').map(str::trim).filter(|s| !s.is_empty())
}

impl BenchConfig {
    /// Sets one `key = value` setting.
    pub fn set(&mut self, key: &str, value: &str) -> Result<(), BenchError> {
        let value = value.trim();
        match key.trim() {
            "corpus_dir" => self.corpus_dir = PathBuf::from(value),
            "max_qubits" => self.max_qubits = parse(key, value)?,
            "max_gates" => self.max_gates = parse(key, value)?,
            "ois_qubit_cap" => self.ois_qubit_cap = parse(key, value)?,
            "shots" => self.shots = parse(key, value)?,
            "master_seed" | "seed" => self.master_seed = parse(key, value)?,
            "severities" => self.severities = list(value).map(|v| parse(key, v)).collect::<Result<_, _>>()?,
            "modes" => {
                self.modes = list(value)
                    .map(|m| match m {
                        "fixed" => Ok(ModeSet::Fixed),
                        "severity" => Ok(ModeSet::Severity),
                        other => Err(BenchError::Config(format!("unknown mode `{other}`"))),
                    })
                    .collect::<Result<_, _>>()?
            }
            "kinds" => {
                self.kinds = if value == "all" {
                    AnomalyKind::ALL.to_vec()
                } else {
                    list(value)
                        .map(|k| AnomalyKind::from_name(k).map_err(|e| BenchError::Config(e.to_string())))
                        .collect::<Result<_, _>>()?
                }
            }
            "sis_blind_threshold" => self.sis_blind_threshold = parse(key, value)?,
            "detection_threshold" => self.detection_threshold = parse(key, value)?,
            "parallelism" => self.parallelism = parse(key, value)?,
            "exact_reference" => self.exact_reference = parse(key, value)?,
            "small_max_qubits" => self.small_max_qubits = parse(key, value)?,
            "medium_max_qubits" => self.medium_max_qubits = parse(key, value)?,
            other => return Err(BenchError::Config(format!("unknown setting `{other}`"))),
        }
        Ok(())
    }

    /// Applies a `key = value` text file. `#` starts a comment.
    pub fn apply_file(&mut self, path: &Path) -> Result<(), BenchError> {
        let text = std::fs::read_to_string(path)?;
        self.apply_text(&text)
    }

    pub fn apply_text(&mut self, text: &str) -> Result<(), BenchError> {
        for (n, line) in text.lines().enumerate() {
            let line = line.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let (key, value) = line
                .split_once('=')
                .ok_or_else(|| BenchError::Config(format!("line {}: expected `key = value`", n + 1)))?;
            self.set(key, value)?;
        }
        Ok(())
    }

    /// Applies `QCI_SEED` when set.
    pub fn apply_env(&mut self) -> Result<(), BenchError> {
        if let Ok(v) = std::env::var(SEED_ENV) {
            self.master_seed = parse(SEED_ENV, &v)?;
        }
        Ok(())
    }

    pub fn validate(&self) -> Result<(), BenchError> {
        let bad = |m: String| Err(BenchError::Config(m));
        for (name, t) in [
            ("sis_blind_threshold", self.sis_blind_threshold),
            ("detection_threshold", self.detection_threshold),
        ] {
            if !(t > 0.0 && t <= 1.0) {
                return bad(format!("{name} must be in (0, 1], got {t}"));
            }
        }
        if self.shots == 0 {
            return bad("shots must be at least 1".into());
        }
        if let Some(s) = self.severities.iter().find(|s| !(**s > 0.0 && **s <= 1.0)) {
            return bad(format!("severity {s} outside (0, 1]"));
        }
        if self.parallelism == 0 {
            return bad("parallelism must be at least 1".into());
        }
        if self.kinds.is_empty() || self.modes.is_empty() {
            return bad("at least one anomaly kind and one mode are required".into());
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn defaults() {
        let c = BenchConfig::default();
        assert_eq!(
            (c.max_qubits, c.max_gates, c.ois_qubit_cap, c.shots, c.master_seed),
            (40, 2000, 14, 1024, 42)
        );
        assert_eq!(c.severities, vec![0.1, 0.3, 0.6]);
        assert_eq!(c.kinds.len(), 8);
        assert_eq!((c.sis_blind_threshold, c.detection_threshold), (0.95, 0.95));
        assert!(c.validate().is_ok());
    }

    #[test]
    fn key_value_text() {
        let mut c = BenchConfig::default();
        c.apply_text(
            "# comment\nshots = 256\nkinds = substitute, reorder\nseverities=0.5\nmodes = severity # trailing\n",
        )
        .unwrap();
        assert_eq!(c.shots, 256);
        assert_eq!(c.kinds, vec![AnomalyKind::Substitute, AnomalyKind::Reorder]);
        assert_eq!(c.severities, vec![0.5]);
        assert_eq!(c.modes, vec![ModeSet::Severity]);
        assert!(c.apply_text("bogus = 1").is_err());
        assert!(c.apply_text("shots").is_err());
        assert!(c.apply_text("kinds = teleport").is_err());
    }

    #[test]
    fn validation() {
        for (k, v) in [("severities", "0.0"), ("detection_threshold", "1.5"), ("shots", "0")] {
            let mut c = BenchConfig::default();
            c.set(k, v).unwrap();
            assert!(c.validate().is_err(), "{k} = {v}");
        }
    }
}
