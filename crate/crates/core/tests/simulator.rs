mod common;

use common::{random_circuit, random_gate};
use qci_core::circuit::{Circuit, GateKind, Operation};
use qci_core::simulator::{sample_distribution, SimError, Simulator, StateVector};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

fn circuit(n: usize, ops: Vec<Operation>) -> Circuit {
    Circuit::from_ops("c", n, n, ops).unwrap()
}

fn inverse(op: &Operation) -> Vec<Operation> {
    use GateKind::*;
    let g = |k, p: &[f64]| Operation::gate(k, &op.qubits, p);
    let p = &op.params;
    match op.kind {
        S => vec![g(Sdg, &[])],
        Sdg => vec![g(S, &[])],
        T => vec![g(Tdg, &[])],
        Tdg => vec![g(T, &[])],
        Rx | Ry | Rz | U1 => vec![g(op.kind, &[-p[0]])],
        // u3(θ,φ,λ)† = u3(-θ,-λ,-φ)
        U3 => vec![g(U3, &[-p[0], -p[2], -p[1]])],
        U2 => vec![g(U3, &[-std::f64::consts::FRAC_PI_2, -p[1], -p[0]])],
        _ => vec![op.clone()],
    }
}

#[test]
fn reference_distributions() {
    let sim = Simulator::default();
    let bell = sim
        .simulate_exact(&circuit(
            2,
            vec![
                Operation::gate(GateKind::H, &[0], &[]),
                Operation::gate(GateKind::Cx, &[0, 1], &[]),
                Operation::measure(0, 0),
                Operation::measure(1, 1),
            ],
        ))
        .unwrap();
    assert_eq!(bell.probs.len(), 2);
    assert!((bell.get("00") - 0.5).abs() < 1e-12 && (bell.get("11") - 0.5).abs() < 1e-12);

    let ghz = sim
        .simulate_exact(&circuit(
            3,
            vec![
                Operation::gate(GateKind::H, &[0], &[]),
                Operation::gate(GateKind::Cx, &[0, 1], &[]),
                Operation::gate(GateKind::Cx, &[1, 2], &[]),
            ],
        ))
        .unwrap();
    assert_eq!(ghz.probs.len(), 2);
    assert!((ghz.get("000") - 0.5).abs() < 1e-12 && (ghz.get("111") - 0.5).abs() < 1e-12);

    let x = sim
        .simulate_exact(&Circuit::from_ops("x", 1, 1, vec![Operation::gate(GateKind::X, &[0], &[])]).unwrap())
        .unwrap();
    assert_eq!(x.probs.len(), 1);
    assert!((x.get("1") - 1.0).abs() < 1e-12);
}

#[test]
fn norm_preserved_per_gate_on_random_circuits() {
    let mut rng = ChaCha8Rng::seed_from_u64(5);
    for _ in 0..10_000 {
        let len = rng.gen_range(1..30);
        let mut state = StateVector::new(6);
        for _ in 0..len {
            state.apply(&random_gate(&mut rng, 6)).unwrap();
            assert!((state.norm_sqr() - 1.0).abs() < 1e-9);
        }
    }
}

#[test]
fn gate_followed_by_inverse_is_identity() {
    let mut rng = ChaCha8Rng::seed_from_u64(8);
    for _ in 0..500 {
        let prefix = random_circuit(&mut rng, 4, 6, false);
        let op = random_gate(&mut rng, 4);
        let mut state = StateVector::new(4);
        for o in &prefix.ops {
            state.apply(o).unwrap();
        }
        let before = state.amplitudes().to_vec();
        state.apply(&op).unwrap();
        for inv in inverse(&op) {
            state.apply(&inv).unwrap();
        }
        let dev = before
            .iter()
            .zip(state.amplitudes())
            .map(|(a, b)| (a - b).norm())
            .fold(0.0, f64::max);
        assert!(dev < 1e-10, "{op} not undone: {dev}");
    }
}

#[test]
fn sampling_converges_to_exact() {
    let mut rng = ChaCha8Rng::seed_from_u64(21);
    let c = random_circuit(&mut rng, 4, 25, false);
    let exact = Simulator::default().simulate_exact(&c).unwrap();
    let sampled = sample_distribution(&exact, 100_000, 99).unwrap();
    assert_eq!(sampled.shots, Some(100_000));
    let keys: std::collections::BTreeSet<&String> = exact.probs.keys().chain(sampled.probs.keys()).collect();
    let tv: f64 = 0.5 * keys.iter().map(|k| (exact.get(k) - sampled.get(k)).abs()).sum::<f64>();
    assert!(tv < 0.05, "tv = {tv}");
    assert_eq!(sample_distribution(&exact, 100_000, 99).unwrap(), sampled);
}

#[test]
fn cap_and_measurement_errors() {
    let big = Circuit::from_ops("big", 20, 0, vec![Operation::gate(GateKind::H, &[0], &[])]).unwrap();
    match Simulator::default().simulate_exact(&big) {
        Err(e @ SimError::CapacityExceeded { .. }) => assert!(e.to_string().contains("14")),
        other => panic!("expected cap error, got {other:?}"),
    }
    let mid = circuit(
        2,
        vec![Operation::measure(0, 0), Operation::gate(GateKind::X, &[0], &[])],
    );
    assert!(matches!(
        Simulator::default().simulate_exact(&mid),
        Err(SimError::MidCircuitMeasurement { .. })
    ));
}

#[test]
fn bit_order_has_clbit_zero_rightmost() {
    let c = circuit(
        3,
        vec![
            Operation::gate(GateKind::X, &[0], &[]),
            Operation::measure(0, 0),
            Operation::measure(1, 1),
            Operation::measure(2, 2),
        ],
    );
    let d = Simulator::default().simulate_exact(&c).unwrap();
    assert_eq!(d.get("001"), 1.0);
}
