mod common;

use common::random_circuit;
use proptest::prelude::*;
use qci_core::anomaly::{eligible_sites, inject, ops_commute, AnomalyError, AnomalyKind, AnomalySpec};
use qci_core::circuit::{structural_profile, Circuit, GateKind, Operation};
use qci_core::qasm::emit_qasm;
use qci_core::simulator::StateVector;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn g(kind: GateKind, qs: &[usize]) -> Operation {
    Operation::gate(kind, qs, &[])
}

fn kind_multiset(c: &Circuit) -> Vec<String> {
    let mut v: Vec<String> = c.ops.iter().map(|o| o.to_string()).collect();
    v.sort();
    v
}

#[test]
fn worked_examples() {
    let c = Circuit::from_ops("c", 2, 0, vec![g(GateKind::H, &[0]), g(GateKind::Cx, &[0, 1])]).unwrap();
    let (out, log) = inject(&c, &AnomalySpec::fixed(AnomalyKind::Del1q, 1)).unwrap();
    assert_eq!(out.ops, vec![g(GateKind::Cx, &[0, 1])]);
    assert_eq!(log.applied_count, 1);
    assert_eq!(eligible_sites(&c, AnomalyKind::Del2q), 1);
    assert_eq!(eligible_sites(&c, AnomalyKind::Substitute), 2);

    let x = Circuit::from_ops("x", 1, 0, vec![g(GateKind::X, &[0])]).unwrap();
    let (out, _) = inject(&x, &AnomalySpec::fixed(AnomalyKind::Substitute, 9)).unwrap();
    assert_eq!(out.ops, vec![g(GateKind::Y, &[0])]);

    let hh = Circuit::from_ops("hh", 2, 0, vec![g(GateKind::H, &[0]), g(GateKind::H, &[1])]).unwrap();
    assert_eq!(
        inject(&hh, &AnomalySpec::fixed(AnomalyKind::Reorder, 1)),
        Err(AnomalyError::Ineligible(AnomalyKind::Reorder))
    );
    assert_eq!(eligible_sites(&Circuit::new("e", 1, 0), AnomalyKind::Insert), 1);
}

fn unitary(c: &Circuit) -> Vec<num_complex::Complex64> {
    let mut cols = Vec::new();
    for input in 0..1usize << c.num_qubits {
        let mut s = StateVector::basis(c.num_qubits, input);
        for op in c.unitary_ops() {
            s.apply(op).unwrap();
        }
        cols.extend_from_slice(s.amplitudes());
    }
    cols
}

/// The two circuits are not equal up to a global phase, so some input
/// state tells them apart.
fn distinguishable(a: &Circuit, b: &Circuit) -> bool {
    let (ua, ub) = (unitary(a), unitary(b));
    let dim = (ua.len() as f64).sqrt();
    let inner: num_complex::Complex64 = ua.iter().zip(&ub).map(|(x, y)| x.conj() * y).sum();
    (inner.norm() / dim - 1.0).abs() > 1e-9
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(200))]

    #[test]
    fn deterministic(seed in any::<u64>(), k in 0usize..8, s in prop::sample::select(vec![0.1, 0.3, 0.6, 1.0])) {
        let c = random_circuit(&mut ChaCha8Rng::seed_from_u64(seed), 4, 15, true);
        let spec = AnomalySpec::with_severity(AnomalyKind::ALL[k], s, seed ^ 7).unwrap();
        let a = inject(&c, &spec);
        let b = inject(&c, &spec);
        prop_assert_eq!(&a, &b);
        if let Ok((out, _)) = a {
            prop_assert_eq!(emit_qasm(&out), emit_qasm(&b.unwrap().0));
        }
    }

    #[test]
    fn substitute_and_reorder_preserve_structure(seed in any::<u64>(), s in prop::sample::select(vec![0.1, 0.3, 0.6, 1.0])) {
        let c = random_circuit(&mut ChaCha8Rng::seed_from_u64(seed), 4, 20, true);
        let p = structural_profile(&c);
        if let Ok((out, _)) = inject(&c, &AnomalySpec::with_severity(AnomalyKind::Substitute, s, seed).unwrap()) {
            prop_assert_eq!(structural_profile(&out), p.clone());
        }
        if let Ok((out, _)) = inject(&c, &AnomalySpec::with_severity(AnomalyKind::Reorder, s, seed).unwrap()) {
            let q = structural_profile(&out);
            prop_assert_eq!(q.gate_count, p.gate_count);
            prop_assert_eq!(q.two_qubit_count, p.two_qubit_count);
            prop_assert_eq!(&q.topo_signature, &p.topo_signature);
            prop_assert_eq!(kind_multiset(&out), kind_multiset(&c));
        }
    }

    #[test]
    fn reorder_changes_behavior(seed in any::<u64>(), n in 1usize..=4) {
        let c = random_circuit(&mut ChaCha8Rng::seed_from_u64(seed), n, 10, false);
        if let Ok((out, log)) = inject(&c, &AnomalySpec::fixed(AnomalyKind::Reorder, seed)) {
            let i = log.applied[0].op_index;
            prop_assert!(!ops_commute(&c.ops[i], &c.ops[i + 1]));
            prop_assert!(distinguishable(&c, &out));
        }
    }

    #[test]
    fn load_is_monotone_in_severity(seed in any::<u64>(), k in 0usize..8) {
        let c = random_circuit(&mut ChaCha8Rng::seed_from_u64(seed), 5, 30, true);
        let mut last = 0;
        for s in [0.1, 0.3, 0.6, 1.0] {
            match inject(&c, &AnomalySpec::with_severity(AnomalyKind::ALL[k], s, seed).unwrap()) {
                Ok((_, log)) => {
                    prop_assert!(log.applied_count >= last);
                    prop_assert!(log.applied_count >= 1 && log.applied_count <= log.requested_count);
                    last = log.applied_count;
                }
                Err(AnomalyError::Ineligible(_)) => {}
                Err(e) => return Err(TestCaseError::fail(e.to_string())),
            }
        }
    }

    #[test]
    fn trojans_target_least_used_qubit(seed in any::<u64>()) {
        let mut c = random_circuit(&mut ChaCha8Rng::seed_from_u64(seed), 4, 12, false);
        c.num_qubits = 5;
        let usage = c.qubit_usage();
        // qubit 4 is idle, so the target is the lowest-index idle qubit
        let target = usage.iter().position(|&u| u == 0).unwrap();
        for kind in [AnomalyKind::TrojanNot, AnomalyKind::TrojanH] {
            let (out, _) = inject(&c, &AnomalySpec::with_severity(kind, 0.3, seed).unwrap()).unwrap();
            let added = out.ops.len() - c.ops.len();
            let on_target = out.ops.iter().filter(|o| o.qubits == vec![target]).count();
            prop_assert!(added >= 1);
            prop_assert_eq!(on_target, added);
        }
    }
}
