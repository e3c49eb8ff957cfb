//! Quantum circuit integrity toolkit.
//!
//! Three complementary comparisons of a test circuit against a reference:
//! structural ([`metrics::compute_sis`]), behavioral over simulated output
//! distributions ([`metrics::compute_ois`]) and interaction-level over a
//! labeled dependency graph ([`metrics::compute_igs`]). The [`anomaly`]
//! engine injects controlled perturbations and [`bench`] runs the full
//! anomaly grid over a corpus of OpenQASM files.

pub mod anomaly;
pub mod bench;
pub mod circuit;
pub mod graph;
pub mod metrics;
pub mod qasm;
pub mod seeds;
pub mod simulator;
pub mod stats;
