use std::collections::BTreeMap;

use super::Circuit;

/// Global structural descriptors of a circuit. Measures and barriers are not
/// counted.
#[derive(Debug, Clone, PartialEq)]
pub struct StructuralProfile {
    pub gate_count: usize,
    pub depth: usize,
    pub two_qubit_count: usize,
    /// Normalized counts of unordered qubit pairs over multi-qubit gates.
    /// Empty when the circuit has no multi-qubit gate.
    pub topo_signature: BTreeMap<(usize, usize), f64>,
}

/// All unordered pairs among an operand list, each as `(low, high)`.
pub fn operand_pairs(qubits: &[usize]) -> impl Iterator<Item = (usize, usize)> + '_ {
    qubits.iter().enumerate().flat_map(move |(i, &a)| {
        qubits[i + 1..]
            .iter()
            .map(move |&b| if a < b { (a, b) } else { (b, a) })
    })
}

pub fn structural_profile(circuit: &Circuit) -> StructuralProfile {
    let mut layer = vec![0usize; circuit.num_qubits];
    let mut gate_count = 0;
    let mut depth = 0;
    let mut two_qubit_count = 0;
    let mut pairs: BTreeMap<(usize, usize), usize> = BTreeMap::new();

    for op in circuit.unitary_ops() {
        gate_count += 1;
        let level = 1 + op.qubits.iter().map(|&q| layer[q]).max().unwrap_or(0);
        for &q in &op.qubits {
            layer[q] = level;
        }
        depth = depth.max(level);
        if op.qubits.len() >= 2 {
            two_qubit_count += 1;
            for pair in operand_pairs(&op.qubits) {
                *pairs.entry(pair).or_default() += 1;
            }
        }
    }

    let total: usize = pairs.values().sum();
    let topo_signature = pairs.into_iter().map(|(k, v)| (k, v as f64 / total as f64)).collect();

    StructuralProfile {
        gate_count,
        depth,
        two_qubit_count,
        topo_signature,
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::circuit::{GateKind, Operation};
    use proptest::prelude::*;

    fn circuit(n: usize, ops: Vec<Operation>) -> Circuit {
        Circuit::from_ops("t", n, n, ops).unwrap()
    }

    fn g(kind: GateKind, qs: &[usize]) -> Operation {
        Operation::gate(kind, qs, &[])
    }

    #[test]
    fn empty_circuit() {
        let p = structural_profile(&circuit(3, vec![]));
        assert_eq!(p.gate_count, 0);
        assert_eq!(p.depth, 0);
        assert_eq!(p.two_qubit_count, 0);
        assert!(p.topo_signature.is_empty());
    }

    #[test]
    fn cx_then_two_h_has_depth_two() {
        let c = circuit(
            2,
            vec![g(GateKind::Cx, &[0, 1]), g(GateKind::H, &[0]), g(GateKind::H, &[1])],
        );
        let p = structural_profile(&c);
        assert_eq!((p.gate_count, p.depth, p.two_qubit_count), (3, 2, 1));
        assert_eq!(p.topo_signature.get(&(0, 1)), Some(&1.0));
    }

    #[test]
    fn parallel_layer() {
        let c = circuit(
            3,
            vec![g(GateKind::H, &[0]), g(GateKind::H, &[1]), g(GateKind::H, &[2])],
        );
        let p = structural_profile(&c);
        assert_eq!((p.gate_count, p.depth, p.two_qubit_count), (3, 1, 0));
    }

    #[test]
    fn measures_are_excluded() {
        let c = circuit(
            2,
            vec![g(GateKind::H, &[0]), Operation::measure(0, 0), Operation::measure(1, 1)],
        );
        let p = structural_profile(&c);
        assert_eq!((p.gate_count, p.depth), (1, 1));
    }

    #[test]
    fn toffoli_contributes_three_pairs() {
        let c = circuit(3, vec![g(GateKind::Ccx, &[0, 1, 2])]);
        let p = structural_profile(&c);
        assert_eq!(p.topo_signature.len(), 3);
        assert!((p.topo_signature.values().sum::<f64>() - 1.0).abs() < 1e-12);
    }

    fn arb_ops(n: usize) -> impl Strategy<Value = Vec<Operation>> {
        let one = (0..n).prop_map(|q| Operation::gate(GateKind::H, &[q], &[]));
        let two = (0..n, 1..n).prop_map(move |(a, d)| Operation::gate(GateKind::Cx, &[a, (a + d) % n], &[]));
        prop::collection::vec(prop_oneof![one, two], 0..40)
    }

    proptest! {
        #[test]
        fn barriers_do_not_change_profile(ops in arb_ops(4), at in 0usize..40) {
            let base = circuit(4, ops.clone());
            let mut with_barrier = ops;
            let at = at.min(with_barrier.len());
            with_barrier.insert(at, Operation::barrier(&[0, 1, 2, 3]));
            with_barrier.push(Operation::barrier(&[1]));
            prop_assert_eq!(
                structural_profile(&base),
                structural_profile(&circuit(4, with_barrier))
            );
        }

        #[test]
        fn depth_bounded_by_gate_count(ops in arb_ops(4)) {
            let p = structural_profile(&circuit(4, ops));
            prop_assert!(p.depth <= p.gate_count);
            if p.two_qubit_count > 0 {
                prop_assert!((p.topo_signature.values().sum::<f64>() - 1.0).abs() < 1e-12);
            } else {
                prop_assert!(p.topo_signature.is_empty());
            }
        }
    }
}
