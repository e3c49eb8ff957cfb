use std::path::Path;

use serde::Serialize;
use walkdir::WalkDir;

use super::{BenchConfig, BenchError};
use crate::circuit::Circuit;
use crate::qasm::parse_qasm_named;

#[derive(Debug, Clone)]
pub struct CorpusEntry {
    /// Path relative to the corpus root, without extension, `/`-separated.
    pub id: String,
    pub circuit: Circuit,
}

#[derive(Debug, Clone, Serialize)]
pub struct Rejection {
    pub id: String,
    pub reason: String,
}

#[derive(Debug, Clone, Default)]
pub struct Corpus {
    pub entries: Vec<CorpusEntry>,
    pub parse_failures: Vec<Rejection>,
    pub filtered_out: Vec<Rejection>,
}

/// Loads every `*.qasm` file under `dir` (recursively, sorted by id) and
/// applies the qubit and op-count filter.
pub fn load_corpus(dir: &Path, config: &BenchConfig) -> Result<Corpus, BenchError> {
    if !dir.is_dir() {
        return Err(BenchError::Config(format!(
            "corpus directory {} not found",
            dir.display()
        )));
    }
    let mut files: Vec<(String, std::path::PathBuf)> = Vec::new();
    for entry in WalkDir::new(dir).follow_links(true) {
        let entry = entry.map_err(|e| BenchError::Io(e.to_string()))?;
        let path = entry.path();
        if !entry.file_type().is_file() || path.extension().and_then(|e| e.to_str()) != Some("qasm") {
            continue;
        }
        let rel = path.strip_prefix(dir).unwrap_or(path).with_extension("");
        let id = rel
            .components()
            .map(|c| c.as_os_str().to_string_lossy())
            .collect::<Vec<_>>()
            .join("/");
        files.push((id, path.to_path_buf()));
    }
    files.sort();

    let mut corpus = Corpus::default();
    for (id, path) in files {
        let text = std::fs::read_to_string(&path)?;
        let circuit = match parse_qasm_named(&id, &text) {
            Ok(out) => out.circuit,
            Err(diags) => {
                let reason = diags.iter().map(|d| d.to_string()).collect::<Vec<_>>().join("; ");
                corpus.parse_failures.push(Rejection { id, reason });
                continue;
            }
        };
        if circuit.num_qubits > config.max_qubits {
            corpus.filtered_out.push(Rejection {
                id,
                reason: format!("{} qubits > {}", circuit.num_qubits, config.max_qubits),
            });
        } else if circuit.ops.len() > config.max_gates {
            corpus.filtered_out.push(Rejection {
                id,
                reason: format!("{} ops > {}", circuit.ops.len(), config.max_gates),
            });
        } else {
            corpus.entries.push(CorpusEntry { id, circuit });
        }
    }
    Ok(corpus)
}
