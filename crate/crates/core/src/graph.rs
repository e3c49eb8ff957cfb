//! Labeled dependency graph over the unitary ops of a circuit.
//!
//! Each op is linked to the previous op on every qubit it touches
//! (last-writer chaining), so construction is linear in the number of ops.
//! Measures and barriers are not nodes.

use std::collections::{BTreeMap, HashMap};
use std::f64::consts::TAU;
use std::fmt::Write;
use std::sync::{Arc, RwLock};

use crate::circuit::{gate_unitary, operand_pairs, Circuit, CircuitError, GateKind, Operation};

pub type Fingerprint = [f64; 6];

#[derive(Debug, Clone, PartialEq)]
pub struct InteractionNode {
    pub op_index: usize,
    pub gate_family: GateKind,
    pub qubits: Vec<usize>,
    pub fingerprint: Fingerprint,
}

/// Dependency `producer -> consumer` (op indices) through `qubit`.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord)]
pub struct Edge {
    pub producer: usize,
    pub consumer: usize,
    pub qubit: usize,
}

#[derive(Debug, Clone, PartialEq)]
pub struct InteractionGraph {
    pub num_qubits: usize,
    pub nodes: Vec<InteractionNode>,
    pub edges: Vec<Edge>,
    pub qubit_usage: Vec<usize>,
    pub pair_histogram: BTreeMap<(usize, usize), f64>,
    pub per_qubit_sequences: Vec<Vec<GateKind>>,
}

/// Six-number summary of a unitary op:
/// `[family ordinal / 19, arity / 3, (Σ params mod 2π) / 2π,
///   mean |Re U|, mean |Im U|, |Tr U| / dim]`.
pub fn unitary_fingerprint(op: &Operation) -> Result<Fingerprint, CircuitError> {
    let u = gate_unitary(op.kind, &op.params)?;
    let n = u.entries().len() as f64;
    let mean_re = u.entries().iter().map(|z| z.re.abs()).sum::<f64>() / n;
    let mean_im = u.entries().iter().map(|z| z.im.abs()).sum::<f64>() / n;
    let mut angle = op.params.iter().sum::<f64>().rem_euclid(TAU) / TAU;
    if angle >= 1.0 {
        angle = 0.0;
    }
    Ok([
        op.kind.ordinal() as f64 / GateKind::UNITARY_COUNT as f64,
        op.qubits.len() as f64 / 3.0,
        angle,
        mean_re,
        mean_im,
        u.trace().norm() / u.dim() as f64,
    ])
}

pub fn build_interaction_graph(circuit: &Circuit) -> InteractionGraph {
    let n = circuit.num_qubits;
    let mut nodes = Vec::new();
    let mut edges = Vec::new();
    let mut last: Vec<Option<usize>> = vec![None; n];
    let mut qubit_usage = vec![0; n];
    let mut sequences = vec![Vec::new(); n];
    let mut pairs: BTreeMap<(usize, usize), usize> = BTreeMap::new();

    for (op_index, op) in circuit.ops.iter().enumerate() {
        if !op.is_unitary() {
            continue;
        }
        let fingerprint = unitary_fingerprint(op).expect("validated circuits only hold well-formed gates");
        for &q in &op.qubits {
            if let Some(producer) = last[q] {
                edges.push(Edge {
                    producer,
                    consumer: op_index,
                    qubit: q,
                });
            }
            last[q] = Some(op_index);
            qubit_usage[q] += 1;
            sequences[q].push(op.kind);
        }
        if op.qubits.len() >= 2 {
            for pair in operand_pairs(&op.qubits) {
                *pairs.entry(pair).or_default() += 1;
            }
        }
        nodes.push(InteractionNode {
            op_index,
            gate_family: op.kind,
            qubits: op.qubits.clone(),
            fingerprint,
        });
    }

    let total: usize = pairs.values().sum();
    InteractionGraph {
        num_qubits: n,
        nodes,
        edges,
        qubit_usage,
        pair_histogram: pairs.into_iter().map(|(k, v)| (k, v as f64 / total as f64)).collect(),
        per_qubit_sequences: sequences,
    }
}

impl InteractionGraph {
    pub fn node(&self, op_index: usize) -> Option<&InteractionNode> {
        self.nodes
            .binary_search_by_key(&op_index, |n| n.op_index)
            .ok()
            .map(|i| &self.nodes[i])
    }

    /// Graphviz rendering: nodes `idx:family`, edges labeled by qubit.
    pub fn to_dot(&self) -> String {
        let mut out = String::from("digraph interaction {\n");
        for node in &self.nodes {
            writeln!(out, "  n{0} [label=\"{0}:{1}\"];", node.op_index, node.gate_family).unwrap();
        }
        for e in &self.edges {
            writeln!(out, "  n{} -> n{} [label=\"q{}\"];", e.producer, e.consumer, e.qubit).unwrap();
        }
        out.push_str("}\n");
        out
    }
}

/// Reference graphs keyed by circuit name. Values are idempotent, so a race
/// between two builders only costs a duplicate build.
#[derive(Default)]
pub struct GraphCache {
    graphs: RwLock<HashMap<String, Arc<InteractionGraph>>>,
}

impl GraphCache {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn get_or_build(&self, circuit: &Circuit) -> Arc<InteractionGraph> {
        if let Some(g) = self.graphs.read().unwrap().get(&circuit.name) {
            return Arc::clone(g);
        }
        let g = Arc::new(build_interaction_graph(circuit));
        self.graphs
            .write()
            .unwrap()
            .insert(circuit.name.clone(), Arc::clone(&g));
        g
    }

    pub fn len(&self) -> usize {
        self.graphs.read().unwrap().len()
    }

    pub fn is_empty(&self) -> bool {
        self.len() == 0
    }
}
