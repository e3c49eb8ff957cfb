//! Dense statevector simulation of ideal (noise-free) circuits.
//!
//! Measurements are terminal: every `measure` is read out as one final
//! projective measurement, and a unitary acting on an already measured qubit
//! is rejected. A circuit without any `measure` is read out on all qubits.
//!
//! Bitstring keys put classical bit 0 in the rightmost character. When the
//! readout is implicit, bit `i` is qubit `i`.

use std::collections::BTreeMap;

use num_complex::Complex64;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use thiserror::Error;

use crate::circuit::{gate_unitary, Circuit, CircuitError, GateKind, Matrix, Operation};

pub const DEFAULT_QUBIT_CAP: usize = 14;
pub const BIT_ORDER: &str = "clbit0-rightmost";

/// Exact probabilities below this are dropped from distributions.
const PROB_FLOOR: f64 = 1e-12;
const MAX_DRIFT: f64 = 1e-6;

#[derive(Debug, Error, Clone, PartialEq)]
pub enum SimError {
    #[error("circuit has {qubits} qubits, above the simulation cap of {cap}")]
    CapacityExceeded { qubits: usize, cap: usize },
    #[error("op {op_index} acts on qubit {qubit} after it was measured; only terminal measurement is supported")]
    MidCircuitMeasurement { op_index: usize, qubit: usize },
    #[error("state norm drifted by {drift:e}")]
    Normalization { drift: f64 },
    #[error("shots must be at least 1")]
    NoShots,
    #[error(transparent)]
    Circuit(#[from] CircuitError),
}

/// Probability map over measurement bitstrings of one fixed width.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct OutputDistribution {
    pub probs: BTreeMap<String, f64>,
    pub width: usize,
    /// `None` for exact Born-rule probabilities.
    pub shots: Option<u64>,
}

impl OutputDistribution {
    /// Builds a distribution from `(bitstring, probability)` pairs. All keys
    /// must share the width of the first.
    pub fn from_pairs<K: Into<String>>(pairs: impl IntoIterator<Item = (K, f64)>) -> Self {
        let probs: BTreeMap<String, f64> = pairs.into_iter().map(|(k, v)| (k.into(), v)).collect();
        let width = probs.keys().next().map_or(0, |k| k.len());
        assert!(probs.keys().all(|k| k.len() == width), "mixed key widths");
        OutputDistribution {
            probs,
            width,
            shots: None,
        }
    }

    pub fn get(&self, key: &str) -> f64 {
        self.probs.get(key).copied().unwrap_or(0.0)
    }

    pub fn total(&self) -> f64 {
        self.probs.values().sum()
    }
}

pub struct StateVector {
    num_qubits: usize,
    amps: Vec<Complex64>,
}

impl StateVector {
    /// |0…0⟩ on `num_qubits` qubits.
    pub fn new(num_qubits: usize) -> Self {
        let mut amps = vec![Complex64::new(0.0, 0.0); 1 << num_qubits];
        amps[0] = Complex64::new(1.0, 0.0);
        StateVector { num_qubits, amps }
    }

    /// Computational basis state `index`.
    pub fn basis(num_qubits: usize, index: usize) -> Self {
        let mut s = StateVector {
            num_qubits,
            amps: vec![Complex64::new(0.0, 0.0); 1 << num_qubits],
        };
        s.amps[index] = Complex64::new(1.0, 0.0);
        s
    }

    pub fn num_qubits(&self) -> usize {
        self.num_qubits
    }

    pub fn amplitudes(&self) -> &[Complex64] {
        &self.amps
    }

    pub fn norm_sqr(&self) -> f64 {
        self.amps.iter().map(|a| a.norm_sqr()).sum()
    }

    /// Applies a unitary op; measures and barriers are no-ops here.
    pub fn apply(&mut self, op: &Operation) -> Result<(), CircuitError> {
        if op.kind == GateKind::Measure || op.kind == GateKind::Barrier {
            return Ok(());
        }
        let u = gate_unitary(op.kind, &op.params)?;
        self.apply_matrix(&u, &op.qubits);
        Ok(())
    }

    /// Applies `u` with `qubits[0]` as the most significant local bit.
    pub fn apply_matrix(&mut self, u: &Matrix, qubits: &[usize]) {
        let k = qubits.len();
        debug_assert_eq!(u.dim(), 1 << k);
        if k == 1 {
            self.apply_single(u, qubits[0]);
            return;
        }
        let dim = 1usize << k;
        let offsets: Vec<usize> = (0..dim)
            .map(|l| {
                (0..k)
                    .filter(|j| (l >> (k - 1 - j)) & 1 == 1)
                    .map(|j| 1usize << qubits[j])
                    .sum()
            })
            .collect();
        let mask: usize = qubits.iter().map(|&q| 1usize << q).sum();
        let mut local = vec![Complex64::new(0.0, 0.0); dim];
        for base in 0..self.amps.len() {
            if base & mask != 0 {
                continue;
            }
            for (l, off) in offsets.iter().enumerate() {
                local[l] = self.amps[base + off];
            }
            for (r, off) in offsets.iter().enumerate() {
                let row = &u.entries()[r * dim..(r + 1) * dim];
                self.amps[base + off] = row.iter().zip(&local).map(|(a, b)| a * b).sum();
            }
        }
    }

    fn apply_single(&mut self, u: &Matrix, qubit: usize) {
        let (a, b, c, d) = (u.get(0, 0), u.get(0, 1), u.get(1, 0), u.get(1, 1));
        let stride = 1usize << qubit;
        for block in (0..self.amps.len()).step_by(stride << 1) {
            for i in block..block + stride {
                let (x, y) = (self.amps[i], self.amps[i + stride]);
                self.amps[i] = a * x + b * y;
                self.amps[i + stride] = c * x + d * y;
            }
        }
    }
}

/// Which qubit is read into each output bit, bit 0 first.
fn readout_map(circuit: &Circuit) -> Result<Vec<usize>, SimError> {
    let mut measured = vec![false; circuit.num_qubits];
    let mut clbit_to_qubit: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, op) in circuit.ops.iter().enumerate() {
        match op.kind {
            GateKind::Measure => {
                measured[op.qubits[0]] = true;
                clbit_to_qubit.insert(op.clbits[0], op.qubits[0]);
            }
            GateKind::Barrier => {}
            _ => {
                if let Some(&q) = op.qubits.iter().find(|&&q| measured[q]) {
                    return Err(SimError::MidCircuitMeasurement { op_index: i, qubit: q });
                }
            }
        }
    }
    if clbit_to_qubit.is_empty() {
        Ok((0..circuit.num_qubits).collect())
    } else {
        Ok(clbit_to_qubit.into_values().collect())
    }
}

fn bitstring(value: usize, width: usize) -> String {
    (0..width)
        .rev()
        .map(|b| if (value >> b) & 1 == 1 { '1' } else { '0' })
        .collect()
}

#[derive(Debug, Clone, Copy)]
pub struct Simulator {
    pub qubit_cap: usize,
}

impl Default for Simulator {
    fn default() -> Self {
        Simulator {
            qubit_cap: DEFAULT_QUBIT_CAP,
        }
    }
}

impl Simulator {
    pub fn with_cap(qubit_cap: usize) -> Self {
        Simulator { qubit_cap }
    }

    pub fn check_cap(&self, circuit: &Circuit) -> Result<(), SimError> {
        if circuit.num_qubits > self.qubit_cap {
            return Err(SimError::CapacityExceeded {
                qubits: circuit.num_qubits,
                cap: self.qubit_cap,
            });
        }
        Ok(())
    }

    /// Final statevector before readout.
    pub fn run(&self, circuit: &Circuit) -> Result<StateVector, SimError> {
        self.check_cap(circuit)?;
        readout_map(circuit)?;
        let mut state = StateVector::new(circuit.num_qubits);
        for op in circuit.unitary_ops() {
            state.apply(op)?;
        }
        Ok(state)
    }

    pub fn simulate_exact(&self, circuit: &Circuit) -> Result<OutputDistribution, SimError> {
        let readout = readout_map(circuit)?;
        let state = self.run(circuit)?;
        let drift = (state.norm_sqr() - 1.0).abs();
        if drift > MAX_DRIFT {
            return Err(SimError::Normalization { drift });
        }

        let width = readout.len();
        let mut marginal = vec![0.0f64; 1 << width];
        for (index, amp) in state.amplitudes().iter().enumerate() {
            let p = amp.norm_sqr();
            if p == 0.0 {
                continue;
            }
            let key = readout
                .iter()
                .enumerate()
                .fold(0usize, |acc, (bit, &q)| acc | (((index >> q) & 1) << bit));
            marginal[key] += p;
        }
        let kept: Vec<(usize, f64)> = marginal
            .into_iter()
            .enumerate()
            .filter(|&(_, p)| p >= PROB_FLOOR)
            .collect();
        let total: f64 = kept.iter().map(|(_, p)| p).sum();
        if (total - 1.0).abs() > MAX_DRIFT {
            return Err(SimError::Normalization {
                drift: (total - 1.0).abs(),
            });
        }
        Ok(OutputDistribution {
            probs: kept
                .into_iter()
                .map(|(k, p)| (bitstring(k, width), p / total))
                .collect(),
            width,
            shots: None,
        })
    }

    pub fn simulate_sampled(&self, circuit: &Circuit, shots: u64, seed: u64) -> Result<OutputDistribution, SimError> {
        let exact = self.simulate_exact(circuit)?;
        sample_distribution(&exact, shots, seed)
    }
}

/// Draws `shots` outcomes from `exact` with a ChaCha8 stream seeded by
/// `seed` and returns the empirical frequencies.
pub fn sample_distribution(exact: &OutputDistribution, shots: u64, seed: u64) -> Result<OutputDistribution, SimError> {
    if shots == 0 {
        return Err(SimError::NoShots);
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let keys: Vec<&String> = exact.probs.keys().collect();
    let mut cumulative = Vec::with_capacity(keys.len());
    let mut acc = 0.0;
    for p in exact.probs.values() {
        acc += p;
        cumulative.push(acc);
    }
    let mut counts = vec![0u64; keys.len()];
    for _ in 0..shots {
        let u: f64 = rng.gen::<f64>() * acc;
        let i = cumulative.partition_point(|&c| c <= u).min(keys.len() - 1);
        counts[i] += 1;
    }
    Ok(OutputDistribution {
        probs: keys
            .into_iter()
            .zip(counts)
            .filter(|&(_, n)| n > 0)
            .map(|(k, n)| (k.clone(), n as f64 / shots as f64))
            .collect(),
        width: exact.width,
        shots: Some(shots),
    })
}
