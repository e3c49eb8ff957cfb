//! Integrity scores: structural (SIS), operational (OIS) and
//! interaction-graph (IGS). Every score and component lies in `[0, 1]`, and
//! a circuit compared with itself scores exactly 1.

mod divergence;
mod histogram;
mod igs;
mod sis;

use thiserror::Error;

pub use divergence::{compute_ois, js_distance, kl_divergence, OisResult};
pub use histogram::{lcs_len, tv_counts, tv_normalized};
pub use igs::{compute_igs, IgsComponents, IgsResult, IgsWeights};
pub use sis::{compute_sis, SisResult, SisWeights};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum MetricError {
    #[error("invalid weights: {0}")]
    InvalidWeights(String),
    #[error("distributions have different bit widths ({left} vs {right})")]
    WidthMismatch { left: usize, right: usize },
    #[error("graphs have different qubit counts ({left} vs {right})")]
    QubitMismatch { left: usize, right: usize },
}

pub(crate) fn check_weights(weights: &[f64]) -> Result<(), MetricError> {
    if weights.iter().any(|w| !w.is_finite() || *w < 0.0) {
        return Err(MetricError::InvalidWeights(format!(
            "weights must be finite and non-negative, got {weights:?}"
        )));
    }
    let sum: f64 = weights.iter().sum();
    if (sum - 1.0).abs() > 1e-9 {
        return Err(MetricError::InvalidWeights(format!("weights sum to {sum}, expected 1")));
    }
    Ok(())
}

/// `1 - Σ wᵢ·dᵢ`, clamped to `[0, 1]`.
pub(crate) fn weighted_score(weights: &[f64], discrepancies: &[f64]) -> f64 {
    let penalty: f64 = weights.iter().zip(discrepancies).map(|(w, d)| w * d).sum();
    (1.0 - penalty).clamp(0.0, 1.0)
}
