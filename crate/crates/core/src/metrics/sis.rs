use serde::Serialize;

use super::{check_weights, tv_normalized, weighted_score, MetricError};
use crate::circuit::StructuralProfile;

/// Weights for (gate count, depth, two-qubit count, topology).
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct SisWeights(pub [f64; 4]);

impl Default for SisWeights {
    fn default() -> Self {
        SisWeights([0.25; 4])
    }
}

#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct SisResult {
    pub sis: f64,
    pub delta_gate: f64,
    pub delta_depth: f64,
    pub delta_2q: f64,
    pub delta_topo: f64,
    pub weights: SisWeights,
}

impl SisResult {
    pub fn deltas(&self) -> [f64; 4] {
        [self.delta_gate, self.delta_depth, self.delta_2q, self.delta_topo]
    }
}

fn relative(reference: usize, test: usize) -> f64 {
    let diff = reference.abs_diff(test) as f64;
    (diff / reference.max(1) as f64).min(1.0)
}

pub fn compute_sis(
    reference: &StructuralProfile,
    test: &StructuralProfile,
    weights: SisWeights,
) -> Result<SisResult, MetricError> {
    check_weights(&weights.0)?;
    let delta_gate = relative(reference.gate_count, test.gate_count);
    let delta_depth = relative(reference.depth, test.depth);
    let delta_2q = relative(reference.two_qubit_count, test.two_qubit_count);
    let delta_topo = tv_normalized(&reference.topo_signature, &test.topo_signature);
    let sis = weighted_score(&weights.0, &[delta_gate, delta_depth, delta_2q, delta_topo]);
    Ok(SisResult {
        sis,
        delta_gate,
        delta_depth,
        delta_2q,
        delta_topo,
        weights,
    })
}
