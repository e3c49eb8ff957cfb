use std::collections::BTreeMap;

use serde::Serialize;

use super::{check_weights, lcs_len, tv_counts, tv_normalized, weighted_score, MetricError};
use crate::circuit::GateKind;
use crate::graph::{Fingerprint, InteractionGraph};

/// Weights for (edge, node, order, interaction, usage).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IgsWeights(pub [f64; 5]);

impl Default for IgsWeights {
    fn default() -> Self {
        IgsWeights([0.15, 0.35, 0.20, 0.20, 0.10])
    }
}

/// The five discrepancy components, each in `[0, 1]`.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct IgsComponents {
    pub d_edge: f64,
    pub d_node: f64,
    pub d_order: f64,
    pub d_inter: f64,
    pub d_usage: f64,
}

impl IgsComponents {
    pub fn to_array(self) -> [f64; 5] {
        [self.d_edge, self.d_node, self.d_order, self.d_inter, self.d_usage]
    }

    pub fn score(self, weights: IgsWeights) -> f64 {
        weighted_score(&weights.0, &self.to_array())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct IgsResult {
    pub igs: f64,
    #[serde(flatten)]
    pub components: IgsComponents,
    pub weights: IgsWeights,
}

/// Fingerprint differences at or below this count as equal.
const FINGERPRINT_EPS: f64 = 1e-9;

type EdgeLabel = (GateKind, GateKind, usize);
type NodeSignature = (GateKind, [i64; 6]);

fn edge_histogram(g: &InteractionGraph) -> BTreeMap<EdgeLabel, usize> {
    let mut hist = BTreeMap::new();
    for e in &g.edges {
        let from = g.node(e.producer).expect("edge endpoints are nodes").gate_family;
        let to = g.node(e.consumer).expect("edge endpoints are nodes").gate_family;
        *hist.entry((from, to, e.qubit)).or_default() += 1;
    }
    hist
}

fn quantize(fp: &Fingerprint) -> [i64; 6] {
    fp.map(|x| (x * 100.0).round() as i64)
}

fn node_histogram(g: &InteractionGraph) -> BTreeMap<NodeSignature, usize> {
    let mut hist = BTreeMap::new();
    for n in &g.nodes {
        *hist.entry((n.gate_family, quantize(&n.fingerprint))).or_default() += 1;
    }
    hist
}

fn fingerprints_differ(a: &Fingerprint, b: &Fingerprint) -> bool {
    a.iter().zip(b).any(|(x, y)| (x - y).abs() > FINGERPRINT_EPS)
}

fn positional_mismatch(reference: &InteractionGraph, test: &InteractionGraph) -> f64 {
    let aligned = reference.nodes.len().min(test.nodes.len());
    if aligned == 0 {
        return if reference.nodes.len() == test.nodes.len() {
            0.0
        } else {
            1.0
        };
    }
    let differing = reference
        .nodes
        .iter()
        .zip(&test.nodes)
        .filter(|(a, b)| fingerprints_differ(&a.fingerprint, &b.fingerprint))
        .count();
    differing as f64 / aligned as f64
}

fn d_node(reference: &InteractionGraph, test: &InteractionGraph) -> f64 {
    let hist = tv_counts(&node_histogram(reference), &node_histogram(test));
    (0.5 * hist + 0.5 * positional_mismatch(reference, test)).clamp(0.0, 1.0)
}

fn d_order(reference: &InteractionGraph, test: &InteractionGraph) -> f64 {
    let n = reference.num_qubits;
    if n == 0 {
        return 0.0;
    }
    let total: f64 = reference
        .per_qubit_sequences
        .iter()
        .zip(&test.per_qubit_sequences)
        .map(|(a, b)| {
            let longest = a.len().max(b.len());
            if longest == 0 {
                0.0
            } else {
                1.0 - lcs_len(a, b) as f64 / longest as f64
            }
        })
        .sum();
    (total / n as f64).clamp(0.0, 1.0)
}

fn d_usage(reference: &InteractionGraph, test: &InteractionGraph) -> f64 {
    let n = reference.num_qubits;
    if n == 0 {
        return 0.0;
    }
    let (ra, rb) = (
        reference.qubit_usage.iter().sum::<usize>(),
        test.qubit_usage.iter().sum::<usize>(),
    );
    let spread = match (ra, rb) {
        (0, 0) => 0.0,
        (0, _) | (_, 0) => 1.0,
        _ => {
            let l1: f64 = reference
                .qubit_usage
                .iter()
                .zip(&test.qubit_usage)
                .map(|(&a, &b)| (a as f64 / ra as f64 - b as f64 / rb as f64).abs())
                .sum();
            l1 / 2.0
        }
    };
    let woken = reference
        .qubit_usage
        .iter()
        .zip(&test.qubit_usage)
        .filter(|(&a, &b)| a == 0 && b > 0)
        .count();
    (0.5 * spread + 0.5 * woken as f64 / n as f64).clamp(0.0, 1.0)
}

pub fn compute_igs(
    reference: &InteractionGraph,
    test: &InteractionGraph,
    weights: IgsWeights,
) -> Result<IgsResult, MetricError> {
    check_weights(&weights.0)?;
    if reference.num_qubits != test.num_qubits {
        return Err(MetricError::QubitMismatch {
            left: reference.num_qubits,
            right: test.num_qubits,
        });
    }
    let components = IgsComponents {
        d_edge: tv_counts(&edge_histogram(reference), &edge_histogram(test)),
        d_node: d_node(reference, test),
        d_order: d_order(reference, test),
        d_inter: tv_normalized(&reference.pair_histogram, &test.pair_histogram),
        d_usage: d_usage(reference, test),
    };
    Ok(IgsResult {
        igs: components.score(weights),
        components,
        weights,
    })
}
