use rand::seq::SliceRandom;
use rand::Rng;
use rand_chacha::ChaCha8Rng;

use super::{ops_commute, AnomalyError, AnomalyKind, AnomalyLog, AppliedChange, Injector};
use crate::circuit::{Circuit, GateKind, Operation};

/// In-place substitution pairs. Partners share arity and parameter count.
pub const SUBSTITUTIONS: [(GateKind, GateKind); 6] = [
    (GateKind::X, GateKind::Y),
    (GateKind::Z, GateKind::H),
    (GateKind::S, GateKind::T),
    (GateKind::Sdg, GateKind::Tdg),
    (GateKind::Rx, GateKind::Ry),
    (GateKind::Cx, GateKind::Cz),
];

fn substitute_for(kind: GateKind) -> Option<GateKind> {
    SUBSTITUTIONS.iter().find_map(|&(a, b)| {
        if a == kind {
            Some(b)
        } else if b == kind {
            Some(a)
        } else {
            None
        }
    })
}

/// Shuffles the whole population and keeps a prefix, so smaller budgets
/// select subsets of larger ones.
fn choose<T: Clone>(sites: &[T], count: usize, rng: &mut ChaCha8Rng) -> Vec<T> {
    let mut pool = sites.to_vec();
    pool.shuffle(rng);
    pool.truncate(count);
    pool
}

/// Index of the first measure on each qubit.
fn first_measure(circuit: &Circuit) -> Vec<Option<usize>> {
    let mut first = vec![None; circuit.num_qubits];
    for (i, op) in circuit.ops.iter().enumerate() {
        if op.kind == GateKind::Measure && first[op.qubits[0]].is_none() {
            first[op.qubits[0]] = Some(i);
        }
    }
    first
}

/// A pending insertion before original op `position`.
struct PendingInsert {
    position: usize,
    op: Operation,
}

/// Inserts new ops, moving any that would land after a measure of their
/// qubit to just before that measure. Returns the circuit and the log
/// entries in selection order.
fn insert_ops(circuit: &Circuit, inserts: Vec<PendingInsert>) -> (Circuit, Vec<AppliedChange>) {
    let first = first_measure(circuit);
    let mut placed: Vec<(usize, usize, Operation)> = inserts
        .into_iter()
        .enumerate()
        .map(|(order, ins)| {
            let q = ins.op.qubits[0];
            let pos = first[q].map_or(ins.position, |m| ins.position.min(m));
            (pos, order, ins.op)
        })
        .collect();
    placed.sort_by_key(|(pos, order, _)| (*pos, *order));

    let log = placed
        .iter()
        .map(|(pos, _, op)| AppliedChange {
            op_index: *pos,
            description: format!("inserted {op} before op {pos}"),
        })
        .collect();

    let mut ops = Vec::with_capacity(circuit.ops.len() + placed.len());
    let mut pending = placed.into_iter().peekable();
    for (i, op) in circuit.ops.iter().enumerate() {
        while let Some((_, _, new_op)) = pending.next_if(|(pos, _, _)| *pos == i) {
            ops.push(new_op);
        }
        ops.push(op.clone());
    }
    ops.extend(pending.map(|(_, _, op)| op));
    (Circuit { ops, ..circuit.clone() }, log)
}

pub struct Deletion {
    multi_qubit: bool,
}

impl Deletion {
    pub fn single_qubit() -> Self {
        Deletion { multi_qubit: false }
    }

    pub fn multi_qubit() -> Self {
        Deletion { multi_qubit: true }
    }

    fn sites(&self, circuit: &Circuit) -> Vec<usize> {
        circuit
            .ops
            .iter()
            .enumerate()
            .filter(|(_, op)| op.is_unitary() && (op.qubits.len() >= 2) == self.multi_qubit)
            .map(|(i, _)| i)
            .collect()
    }
}

impl Injector for Deletion {
    fn kind(&self) -> AnomalyKind {
        if self.multi_qubit {
            AnomalyKind::Del2q
        } else {
            AnomalyKind::Del1q
        }
    }

    fn eligible_sites(&self, circuit: &Circuit) -> usize {
        self.sites(circuit).len()
    }

    fn apply(
        &self,
        circuit: &Circuit,
        count: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<(Circuit, AnomalyLog), AnomalyError> {
        let sites = self.sites(circuit);
        if sites.is_empty() {
            return Err(AnomalyError::Ineligible(self.kind()));
        }
        let chosen = choose(&sites, count, rng);
        let mut out = circuit.clone();
        let mut doomed = chosen.clone();
        doomed.sort_unstable_by(|a, b| b.cmp(a));
        for i in doomed {
            out.ops.remove(i);
        }
        let log = chosen
            .iter()
            .map(|&i| AppliedChange {
                op_index: i,
                description: format!("deleted {}", circuit.ops[i]),
            })
            .collect();
        Ok((out, AnomalyLog::new(self.kind(), count, log)))
    }
}

const INSERT_POOL: [GateKind; 6] = [
    GateKind::X,
    GateKind::Y,
    GateKind::Z,
    GateKind::H,
    GateKind::S,
    GateKind::T,
];

/// Random single-qubit gates at random positions on random qubits.
pub struct Insertion;

impl Injector for Insertion {
    fn kind(&self) -> AnomalyKind {
        AnomalyKind::Insert
    }

    fn eligible_sites(&self, circuit: &Circuit) -> usize {
        circuit.ops.len() + 1
    }

    fn apply(
        &self,
        circuit: &Circuit,
        count: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<(Circuit, AnomalyLog), AnomalyError> {
        if circuit.num_qubits == 0 {
            return Err(AnomalyError::Ineligible(self.kind()));
        }
        let positions: Vec<usize> = (0..=circuit.ops.len()).collect();
        let chosen = choose(&positions, count, rng);
        let inserts = chosen
            .into_iter()
            .map(|position| {
                let kind = INSERT_POOL[rng.gen_range(0..INSERT_POOL.len())];
                let qubit = rng.gen_range(0..circuit.num_qubits);
                PendingInsert {
                    position,
                    op: Operation::gate(kind, &[qubit], &[]),
                }
            })
            .collect();
        let (out, log) = insert_ops(circuit, inserts);
        Ok((out, AnomalyLog::new(self.kind(), count, log)))
    }
}

/// Same-shape gate replacement through [`SUBSTITUTIONS`].
pub struct Substitution;

impl Substitution {
    fn sites(circuit: &Circuit) -> Vec<usize> {
        circuit
            .ops
            .iter()
            .enumerate()
            .filter(|(_, op)| substitute_for(op.kind).is_some())
            .map(|(i, _)| i)
            .collect()
    }
}

impl Injector for Substitution {
    fn kind(&self) -> AnomalyKind {
        AnomalyKind::Substitute
    }

    fn eligible_sites(&self, circuit: &Circuit) -> usize {
        Self::sites(circuit).len()
    }

    fn apply(
        &self,
        circuit: &Circuit,
        count: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<(Circuit, AnomalyLog), AnomalyError> {
        let sites = Self::sites(circuit);
        if sites.is_empty() {
            return Err(AnomalyError::Ineligible(self.kind()));
        }
        let mut out = circuit.clone();
        let mut log = Vec::new();
        for i in choose(&sites, count, rng) {
            let op = &mut out.ops[i];
            let from = op.kind;
            op.kind = substitute_for(from).expect("site is in the table");
            log.push(AppliedChange {
                op_index: i,
                description: format!("substituted {from} -> {}", op.kind),
            });
        }
        Ok((out, AnomalyLog::new(self.kind(), count, log)))
    }
}

/// Swaps adjacent, qubit-sharing, non-commuting unitary pairs.
pub struct Reorder;

impl Reorder {
    /// Index `i` such that ops `i` and `i + 1` can be exchanged.
    fn sites(circuit: &Circuit) -> Vec<usize> {
        circuit
            .ops
            .windows(2)
            .enumerate()
            .filter(|(_, w)| {
                w[0].is_unitary() && w[1].is_unitary() && w[0].shares_qubit(&w[1]) && !ops_commute(&w[0], &w[1])
            })
            .map(|(i, _)| i)
            .collect()
    }
}

impl Injector for Reorder {
    fn kind(&self) -> AnomalyKind {
        AnomalyKind::Reorder
    }

    fn eligible_sites(&self, circuit: &Circuit) -> usize {
        Self::sites(circuit).len()
    }

    fn apply(
        &self,
        circuit: &Circuit,
        count: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<(Circuit, AnomalyLog), AnomalyError> {
        let sites = Self::sites(circuit);
        if sites.is_empty() {
            return Err(AnomalyError::Ineligible(self.kind()));
        }
        // overlapping pairs are skipped so every swap is checked on the
        // original neighbours
        let mut taken: Vec<usize> = Vec::new();
        for i in choose(&sites, count, rng) {
            if taken.iter().all(|&j| i.abs_diff(j) > 1) {
                taken.push(i);
            }
        }
        let mut out = circuit.clone();
        let log = taken
            .iter()
            .map(|&i| {
                out.ops.swap(i, i + 1);
                AppliedChange {
                    op_index: i,
                    description: format!("swapped {} and {}", circuit.ops[i], circuit.ops[i + 1]),
                }
            })
            .collect();
        Ok((out, AnomalyLog::new(self.kind(), count, log)))
    }
}

/// X or H gates aimed at the least-used qubit, lowest index on ties.
pub struct TrojanInsertion {
    kind: AnomalyKind,
    gate: GateKind,
}

impl TrojanInsertion {
    pub fn not() -> Self {
        TrojanInsertion {
            kind: AnomalyKind::TrojanNot,
            gate: GateKind::X,
        }
    }

    pub fn hadamard() -> Self {
        TrojanInsertion {
            kind: AnomalyKind::TrojanH,
            gate: GateKind::H,
        }
    }

    pub fn target(circuit: &Circuit) -> Option<usize> {
        let usage = circuit.qubit_usage();
        (0..circuit.num_qubits).min_by_key(|&q| (usage[q], q))
    }
}

impl Injector for TrojanInsertion {
    fn kind(&self) -> AnomalyKind {
        self.kind
    }

    fn eligible_sites(&self, circuit: &Circuit) -> usize {
        circuit.ops.len() + 1
    }

    fn apply(
        &self,
        circuit: &Circuit,
        count: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<(Circuit, AnomalyLog), AnomalyError> {
        let target = Self::target(circuit).ok_or(AnomalyError::Ineligible(self.kind))?;
        let positions: Vec<usize> = (0..=circuit.ops.len()).collect();
        let inserts = choose(&positions, count, rng)
            .into_iter()
            .map(|position| PendingInsert {
                position,
                op: Operation::gate(self.gate, &[target], &[]),
            })
            .collect();
        let (out, log) = insert_ops(circuit, inserts);
        Ok((out, AnomalyLog::new(self.kind, count, log)))
    }
}

/// Exchanges two qubit labels inside a contiguous window of unitary ops.
///
/// The window is anchored on a random unitary op, and the first label is one
/// of that op's operands, so the anchor is always rewritten. Windows for a
/// larger budget contain those for a smaller one. Measures keep their
/// operands, and an op is left alone if relabeling would move it after a
/// measure of its new qubit.
pub struct QubitSwap;

impl Injector for QubitSwap {
    fn kind(&self) -> AnomalyKind {
        AnomalyKind::QubitSwap
    }

    fn eligible_sites(&self, circuit: &Circuit) -> usize {
        if circuit.num_qubits >= 2 {
            circuit.ops.len()
        } else {
            0
        }
    }

    fn apply(
        &self,
        circuit: &Circuit,
        count: usize,
        rng: &mut ChaCha8Rng,
    ) -> Result<(Circuit, AnomalyLog), AnomalyError> {
        let gates: Vec<usize> = circuit
            .ops
            .iter()
            .enumerate()
            .filter(|(_, op)| op.is_unitary())
            .map(|(i, _)| i)
            .collect();
        if circuit.num_qubits < 2 || gates.is_empty() {
            return Err(AnomalyError::Ineligible(self.kind()));
        }
        let anchor = rng.gen_range(0..gates.len());
        let anchor_op = &circuit.ops[gates[anchor]];
        let a = anchor_op.qubits[rng.gen_range(0..anchor_op.qubits.len())];
        let b = {
            let other = rng.gen_range(0..circuit.num_qubits - 1);
            if other >= a {
                other + 1
            } else {
                other
            }
        };

        let width = count.min(gates.len());
        let start = anchor.min(gates.len() - width);
        let window = &gates[start..start + width];
        let first = first_measure(circuit);
        let swap = |q: usize| {
            if q == a {
                b
            } else if q == b {
                a
            } else {
                q
            }
        };

        let mut out = circuit.clone();
        let mut log = Vec::new();
        for &i in window {
            let op = &circuit.ops[i];
            if !op.touches(a) && !op.touches(b) {
                continue;
            }
            let relabeled: Vec<usize> = op.qubits.iter().map(|&q| swap(q)).collect();
            if relabeled.iter().any(|&q| first[q].is_some_and(|m| m < i)) {
                continue;
            }
            out.ops[i].qubits = relabeled;
            log.push(AppliedChange {
                op_index: i,
                description: format!("relabeled q{a}<->q{b} in {op}"),
            });
        }
        if log.is_empty() {
            return Err(AnomalyError::Ineligible(self.kind()));
        }
        Ok((out, AnomalyLog::new(self.kind(), width, log)))
    }
}
