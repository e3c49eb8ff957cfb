mod common;

use common::{depth_oracle, igs_components_oracle, random_circuit};
use proptest::prelude::*;
use qci_core::anomaly::{inject, AnomalyKind, AnomalySpec};
use qci_core::circuit::{structural_profile, Circuit, GateKind, Operation};
use qci_core::graph::{build_interaction_graph, unitary_fingerprint};
use qci_core::metrics::{compute_igs, js_distance, kl_divergence, IgsWeights};
use qci_core::simulator::OutputDistribution;
use rand::SeedableRng;
use rand_chacha::ChaCha8Rng;

fn dist(ps: &[f64]) -> OutputDistribution {
    let width = (ps.len().max(2) as f64).log2().ceil() as usize;
    OutputDistribution::from_pairs(
        ps.iter()
            .enumerate()
            .filter(|(_, p)| **p > 0.0)
            .map(|(i, p)| (format!("{i:0width$b}"), *p)),
    )
}

#[test]
fn js_and_kl_hand_values() {
    // M = (3/4, 1/4); KL(P‖M) = log2(4/3); KL(Q‖M) = ½log2(2/3) + ½log2(2)
    let kl_pm = (4.0f64 / 3.0).log2();
    let kl_qm = 0.5 * (2.0f64 / 3.0).log2() + 0.5;
    let expected = (0.5 * (kl_pm + kl_qm)).sqrt();
    let got = js_distance(&dist(&[1.0, 0.0]), &dist(&[0.5, 0.5])).unwrap();
    assert!((got - expected).abs() < 1e-12);
    assert!((got - 0.5579230).abs() < 1e-6);

    let kl_expected = 0.5 * (0.5f64 / 0.25).log2() + 0.5 * (0.5f64 / 0.75).log2();
    let kl = kl_divergence(&dist(&[0.5, 0.5]), &dist(&[0.25, 0.75])).unwrap();
    assert!((kl - kl_expected).abs() < 1e-12);
    assert!((kl - 0.2075187).abs() < 1e-6);
}

#[test]
fn js_distance_is_a_metric_on_random_triples() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for _ in 0..2000 {
        let mut draw = || {
            let raw: Vec<f64> = (0..8)
                .map(|_| {
                    if rand::Rng::gen_bool(&mut rng, 0.3) {
                        0.0
                    } else {
                        rand::Rng::gen::<f64>(&mut rng)
                    }
                })
                .collect();
            let s: f64 = raw.iter().sum();
            if s == 0.0 {
                dist(&[1.0])
            } else {
                dist(&raw.iter().map(|x| x / s).collect::<Vec<_>>())
            }
        };
        let (p, q, r) = (draw(), draw(), draw());
        let (pq, qr, pr) = (
            js_distance(&p, &q).unwrap(),
            js_distance(&q, &r).unwrap(),
            js_distance(&p, &r).unwrap(),
        );
        assert!(pr <= pq + qr + 1e-12, "{pr} > {pq} + {qr}");
        assert!((pq - js_distance(&q, &p).unwrap()).abs() < 1e-12);
        assert!((0.0..=1.0).contains(&pq));
    }
}

#[test]
fn depth_hand_example() {
    let c = Circuit::from_ops(
        "d",
        2,
        0,
        vec![
            Operation::gate(GateKind::Cx, &[0, 1], &[]),
            Operation::gate(GateKind::H, &[0], &[]),
            Operation::gate(GateKind::H, &[1], &[]),
        ],
    )
    .unwrap();
    let p = structural_profile(&c);
    assert_eq!((p.depth, p.gate_count, p.two_qubit_count), (2, 3, 1));
    assert_eq!(depth_oracle(&c), 2);
}

#[test]
fn fingerprint_hand_values() {
    let x = unitary_fingerprint(&Operation::gate(GateKind::X, &[0], &[])).unwrap();
    assert_eq!(&x[2..], &[0.0, 0.5, 0.0, 0.0]);
    let id = unitary_fingerprint(&Operation::gate(GateKind::Id, &[0], &[])).unwrap();
    assert_eq!(&id[3..], &[0.5, 0.0, 1.0]);
    let rz0 = unitary_fingerprint(&Operation::gate(GateKind::Rz, &[0], &[0.0])).unwrap();
    assert_eq!(&rz0[2..], &id[2..]);
    assert_ne!(rz0[0], id[0]);
}

#[test]
fn graph_hand_example() {
    let c = Circuit::from_ops(
        "g",
        2,
        0,
        vec![
            Operation::gate(GateKind::H, &[0], &[]),
            Operation::gate(GateKind::Cx, &[0, 1], &[]),
            Operation::gate(GateKind::H, &[1], &[]),
        ],
    )
    .unwrap();
    let g = build_interaction_graph(&c);
    let edges: Vec<(usize, usize)> = g.edges.iter().map(|e| (e.producer, e.consumer)).collect();
    assert_eq!(edges, vec![(0, 1), (1, 2)]);
    assert_eq!(g.per_qubit_sequences[0], vec![GateKind::H, GateKind::Cx]);
    assert_eq!(g.per_qubit_sequences[1], vec![GateKind::Cx, GateKind::H]);
}

#[test]
fn idle_qubit_insertion_usage_floor() {
    let base = vec![
        Operation::gate(GateKind::H, &[0], &[]),
        Operation::gate(GateKind::Cx, &[0, 1], &[]),
        Operation::gate(GateKind::Cx, &[1, 2], &[]),
    ];
    let r = Circuit::from_ops("r", 4, 0, base.clone()).unwrap();
    let mut t_ops = base;
    t_ops.push(Operation::gate(GateKind::X, &[3], &[]));
    let t = Circuit::from_ops("t", 4, 0, t_ops).unwrap();
    let res = compute_igs(
        &build_interaction_graph(&r),
        &build_interaction_graph(&t),
        IgsWeights::default(),
    )
    .unwrap();
    assert!(res.components.d_usage >= 0.125);
    assert!(res.igs <= 1.0 - 0.10 * 0.125);
    let oracle = igs_components_oracle(&r, &t);
    assert!((oracle[4] - res.components.d_usage).abs() < 1e-12);
}

#[test]
fn adjacent_swap_order_contribution() {
    let r = Circuit::from_ops(
        "r",
        2,
        0,
        vec![
            Operation::gate(GateKind::H, &[0], &[]),
            Operation::gate(GateKind::T, &[0], &[]),
        ],
    )
    .unwrap();
    let t = Circuit::from_ops(
        "t",
        2,
        0,
        vec![
            Operation::gate(GateKind::T, &[0], &[]),
            Operation::gate(GateKind::H, &[0], &[]),
        ],
    )
    .unwrap();
    let res = compute_igs(
        &build_interaction_graph(&r),
        &build_interaction_graph(&t),
        IgsWeights::default(),
    )
    .unwrap();
    // qubit 0 contributes 1 - 1/2, qubit 1 is empty in both: mean over 2 qubits
    assert!((res.components.d_order - 0.25).abs() < 1e-12);
}

fn assert_matches_oracle(r: &Circuit, t: &Circuit) -> Result<(), TestCaseError> {
    let got = compute_igs(
        &build_interaction_graph(r),
        &build_interaction_graph(t),
        IgsWeights::default(),
    )
    .unwrap()
    .components
    .to_array();
    let want = igs_components_oracle(r, t);
    for k in 0..5 {
        prop_assert!(
            (got[k] - want[k]).abs() <= 1e-12,
            "component {k}: {} vs {}",
            got[k],
            want[k]
        );
    }
    Ok(())
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(300))]

    #[test]
    fn depth_matches_longest_path(seed in any::<u64>(), n in 1usize..6, m in 0usize..25) {
        let c = random_circuit(&mut ChaCha8Rng::seed_from_u64(seed), n, m, true);
        prop_assert_eq!(structural_profile(&c).depth, depth_oracle(&c));
    }

    #[test]
    fn igs_components_match_oracle_on_random_pairs(seed in any::<u64>(), n in 1usize..5, a in 0usize..7, b in 0usize..7) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = random_circuit(&mut rng, n, a, false);
        let t = random_circuit(&mut rng, n, b, false);
        assert_matches_oracle(&r, &t)?;
    }

    #[test]
    fn igs_components_match_oracle_on_mutants(seed in any::<u64>(), n in 1usize..5, m in 1usize..7, k in 0usize..8) {
        let mut rng = ChaCha8Rng::seed_from_u64(seed);
        let r = random_circuit(&mut rng, n, m, false);
        if let Ok((t, _)) = inject(&r, &AnomalySpec::fixed(AnomalyKind::ALL[k], seed)) {
            if t.ops.len() <= 6 {
                assert_matches_oracle(&r, &t)?;
            }
        }
    }
}
