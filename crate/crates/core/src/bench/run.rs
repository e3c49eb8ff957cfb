use std::sync::Arc;
use std::time::Instant;

use rayon::prelude::*;

use super::corpus::CorpusEntry;
use super::record::{
    round_sig9, BehavioralScores, BenchRecord, InteractionScores, SizeClass, Status, StructuralScores,
};
use super::{BenchConfig, BenchError, ModeSet};
use crate::anomaly::{self, AnomalyError, AnomalyKind, AnomalySpec, Mode};
use crate::circuit::{structural_profile, StructuralProfile};
use crate::graph::{build_interaction_graph, GraphCache, InteractionGraph};
use crate::metrics::{compute_igs, compute_ois, compute_sis, IgsWeights, SisWeights};
use crate::seeds::derive_seed;
use crate::simulator::{sample_distribution, OutputDistribution, SimError, Simulator};

/// Label of the stream that drives injection for one (circuit, kind) pair.
/// Every mode and severity of the pair shares it, which keeps the sites hit
/// at a lower severity a subset of those hit at a higher one.
pub fn inject_stream_label(circuit_id: &str, kind: AnomalyKind, trial: u32) -> String {
    format!("inject/{circuit_id}/{kind}/{trial}")
}

pub fn reference_stream_label(circuit_id: &str) -> String {
    format!("ois-ref/{circuit_id}")
}

pub fn sample_stream_label(circuit_id: &str, kind: AnomalyKind, mode: &Mode, trial: u32) -> String {
    match mode {
        Mode::Fixed => format!("ois-test/{circuit_id}/{kind}/fixed/{trial}"),
        Mode::Severity(s) => format!("ois-test/{circuit_id}/{kind}/{s}/{trial}"),
    }
}

enum ReferenceOutput {
    Available(OutputDistribution),
    OverCap,
    Failed,
}

struct Reference {
    profile: StructuralProfile,
    graph: Arc<InteractionGraph>,
    output: ReferenceOutput,
}

fn simulate(
    config: &BenchConfig,
    circuit: &crate::circuit::Circuit,
    seed: u64,
) -> Result<OutputDistribution, SimError> {
    let exact = Simulator::with_cap(config.ois_qubit_cap).simulate_exact(circuit)?;
    sample_distribution(&exact, config.shots, seed)
}

impl Reference {
    fn build(entry: &CorpusEntry, config: &BenchConfig, graphs: &GraphCache) -> Self {
        let sim = Simulator::with_cap(config.ois_qubit_cap);
        let output = if sim.check_cap(&entry.circuit).is_err() {
            ReferenceOutput::OverCap
        } else {
            let result = if config.exact_reference {
                sim.simulate_exact(&entry.circuit)
            } else {
                let seed = derive_seed(config.master_seed, &reference_stream_label(&entry.id));
                simulate(config, &entry.circuit, seed)
            };
            result.map_or(ReferenceOutput::Failed, ReferenceOutput::Available)
        };
        Reference {
            profile: structural_profile(&entry.circuit),
            graph: graphs.get_or_build(&entry.circuit),
            output,
        }
    }
}

struct Cell {
    entry: usize,
    kind: AnomalyKind,
    mode: Mode,
}

fn cells(entries: &[CorpusEntry], config: &BenchConfig) -> Result<Vec<Cell>, BenchError> {
    let mut modes = Vec::new();
    if config.modes.contains(&ModeSet::Fixed) {
        modes.push(Mode::Fixed);
    }
    if config.modes.contains(&ModeSet::Severity) {
        let mut sev = config.severities.clone();
        sev.sort_by(f64::total_cmp);
        sev.dedup();
        for s in sev {
            modes.push(Mode::severity(s)?);
        }
    }
    let mut kinds = config.kinds.clone();
    kinds.sort();
    kinds.dedup();
    let mut order: Vec<usize> = (0..entries.len()).collect();
    order.sort_by(|a, b| entries[*a].id.cmp(&entries[*b].id));
    let mut out = Vec::new();
    for entry in order {
        for &kind in &kinds {
            for &mode in &modes {
                out.push(Cell { entry, kind, mode });
            }
        }
    }
    Ok(out)
}

fn timed<T>(f: impl FnOnce() -> T) -> (T, f64) {
    let start = Instant::now();
    let out = f();
    (out, start.elapsed().as_secs_f64() * 1e3)
}

fn evaluate(
    cell: &Cell,
    entry: &CorpusEntry,
    reference: &Reference,
    config: &BenchConfig,
) -> Result<BenchRecord, BenchError> {
    let circuit = &entry.circuit;
    let seed_stream_id = inject_stream_label(&entry.id, cell.kind, 0);
    let mut record = BenchRecord {
        circuit_id: entry.id.clone(),
        size_class: SizeClass::classify(circuit.num_qubits, config.small_max_qubits, config.medium_max_qubits),
        num_qubits: circuit.num_qubits,
        gate_count: circuit.ops.len(),
        kind: cell.kind,
        mode: cell.mode.label().to_string(),
        severity: cell.mode.severity_value(),
        structural: None,
        interaction: None,
        behavioral: None,
        detected_by_ois: None,
        detected_by_igs: None,
        blind_spot: None,
        t_sis_ms: None,
        t_igs_ms: None,
        t_ois_ms: None,
        applied_count: None,
        seed_stream_id,
        status: Status::Ok,
    };
    let spec = AnomalySpec {
        kind: cell.kind,
        mode: cell.mode,
        seed: derive_seed(config.master_seed, &record.seed_stream_id),
    };
    let (mutated, log) = match anomaly::inject(circuit, &spec) {
        Ok(out) => out,
        Err(AnomalyError::Ineligible(_)) => {
            record.status = Status::SkippedIneligible;
            return Ok(record);
        }
        Err(e) => return Err(e.into()),
    };
    record.applied_count = Some(log.applied_count);

    let (sis, t_sis) = timed(|| compute_sis(&reference.profile, &structural_profile(&mutated), SisWeights::default()));
    let sis = sis?;
    let (igs, t_igs) = timed(|| {
        compute_igs(
            &reference.graph,
            &build_interaction_graph(&mutated),
            IgsWeights::default(),
        )
    });
    let igs = igs?;
    let r = round_sig9;
    let structural = StructuralScores {
        sis: r(sis.sis),
        delta_gate: r(sis.delta_gate),
        delta_depth: r(sis.delta_depth),
        delta_2q: r(sis.delta_2q),
        delta_topo: r(sis.delta_topo),
    };
    let c = igs.components;
    let interaction = InteractionScores {
        igs: r(igs.igs),
        d_edge: r(c.d_edge),
        d_node: r(c.d_node),
        d_order: r(c.d_order),
        d_inter: r(c.d_inter),
        d_usage: r(c.d_usage),
    };
    record.blind_spot = Some(structural.sis >= config.sis_blind_threshold);
    record.detected_by_igs = Some(interaction.igs < config.detection_threshold);
    record.structural = Some(structural);
    record.interaction = Some(interaction);
    record.t_sis_ms = Some(r(t_sis));
    record.t_igs_ms = Some(r(t_igs));

    match &reference.output {
        ReferenceOutput::OverCap => record.status = Status::SkippedQubitCap,
        ReferenceOutput::Failed => record.status = Status::SkippedSimulation,
        ReferenceOutput::Available(ref_dist) => {
            let seed = derive_seed(
                config.master_seed,
                &sample_stream_label(&entry.id, cell.kind, &cell.mode, 0),
            );
            let (ois, t_ois) = timed(|| -> Result<_, BenchError> {
                let test = simulate(config, &mutated, seed)?;
                Ok(compute_ois(ref_dist, &test)?)
            });
            match ois {
                Ok(ois) => {
                    let scores = BehavioralScores {
                        ois: r(ois.ois),
                        jsd: r(ois.jsd),
                    };
                    record.detected_by_ois = Some(scores.ois < config.detection_threshold);
                    record.behavioral = Some(scores);
                    record.t_ois_ms = Some(r(t_ois));
                }
                Err(BenchError::Simulation(_)) => record.status = Status::SkippedSimulation,
                Err(e) => return Err(e),
            }
        }
    }
    Ok(record)
}

/// Runs every (circuit, kind, mode) cell on a pool of `config.parallelism`
/// threads. Output order depends only on the inputs.
pub fn run_grid(entries: &[CorpusEntry], config: &BenchConfig) -> Result<Vec<BenchRecord>, BenchError> {
    config.validate()?;
    let pool = rayon::ThreadPoolBuilder::new()
        .num_threads(config.parallelism)
        .build()
        .map_err(|e| BenchError::Config(e.to_string()))?;
    let cells = cells(entries, config)?;
    pool.install(|| {
        let graphs = GraphCache::new();
        let references: Vec<Reference> = entries
            .par_iter()
            .map(|e| Reference::build(e, config, &graphs))
            .collect();
        cells
            .par_iter()
            .map(|cell| evaluate(cell, &entries[cell.entry], &references[cell.entry], config))
            .collect()
    })
}
