#![allow(dead_code)]

use std::f64::consts::PI;
use std::path::PathBuf;

use qci_core::circuit::{gate_unitary, Circuit, GateKind, Operation};
use rand::seq::SliceRandom;
use rand::Rng;

pub fn sample_corpus() -> PathBuf {
    PathBuf::from(env!("CARGO_MANIFEST_DIR")).join("../../corpus/sample")
}

pub const UNITARY: [GateKind; 19] = [
    GateKind::X,
    GateKind::Y,
    GateKind::Z,
    GateKind::H,
    GateKind::S,
    GateKind::Sdg,
    GateKind::T,
    GateKind::Tdg,
    GateKind::Rx,
    GateKind::Ry,
    GateKind::Rz,
    GateKind::U1,
    GateKind::U2,
    GateKind::U3,
    GateKind::Cx,
    GateKind::Cz,
    GateKind::Swap,
    GateKind::Ccx,
    GateKind::Id,
];

pub fn random_gate<R: Rng>(rng: &mut R, num_qubits: usize) -> Operation {
    loop {
        let kind = *UNITARY.choose(rng).unwrap();
        let arity = kind.arity().unwrap();
        if arity > num_qubits {
            continue;
        }
        let qubits: Vec<usize> = rand::seq::index::sample(rng, num_qubits, arity).into_vec();
        let params: Vec<f64> = (0..kind.param_count())
            .map(|_| rng.gen_range(-2.0 * PI..2.0 * PI))
            .collect();
        return Operation::gate(kind, &qubits, &params);
    }
}

/// Random unitary circuit, optionally with barriers and terminal measures.
pub fn random_circuit<R: Rng>(rng: &mut R, num_qubits: usize, num_gates: usize, extras: bool) -> Circuit {
    let mut ops = Vec::new();
    for _ in 0..num_gates {
        if extras && rng.gen_bool(0.1) {
            let k = rng.gen_range(1..=num_qubits);
            ops.push(Operation::barrier(
                &rand::seq::index::sample(rng, num_qubits, k).into_vec(),
            ));
        }
        ops.push(random_gate(rng, num_qubits));
    }
    let clbits = if extras && rng.gen_bool(0.5) {
        for q in 0..num_qubits {
            ops.push(Operation::measure(q, q));
        }
        num_qubits
    } else {
        0
    };
    Circuit::from_ops("random", num_qubits, clbits, ops).unwrap()
}

/// Longest path (counted in nodes) through the DAG in which op `j` depends on
/// every earlier op `i` sharing a qubit with it.
pub fn depth_oracle(circuit: &Circuit) -> usize {
    let ops: Vec<&Operation> = circuit.ops.iter().filter(|o| o.is_unitary()).collect();
    let mut longest = vec![1usize; ops.len()];
    for j in 0..ops.len() {
        for i in 0..j {
            if ops[i].qubits.iter().any(|q| ops[j].qubits.contains(q)) {
                longest[j] = longest[j].max(longest[i] + 1);
            }
        }
    }
    longest.into_iter().max().unwrap_or(0)
}

/// Total variation between two label multisets, by linear search.
fn tv_lists<T: PartialEq + Clone>(a: &[T], b: &[T]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    if a.is_empty() || b.is_empty() {
        return 1.0;
    }
    let mut labels: Vec<T> = Vec::new();
    for x in a.iter().chain(b) {
        if !labels.contains(x) {
            labels.push(x.clone());
        }
    }
    let freq = |l: &[T], x: &T| l.iter().filter(|y| *y == x).count() as f64 / l.len() as f64;
    0.5 * labels.iter().map(|x| (freq(a, x) - freq(b, x)).abs()).sum::<f64>()
}

fn tv_weighted(a: &[((usize, usize), f64)], b: &[((usize, usize), f64)]) -> f64 {
    if a.is_empty() && b.is_empty() {
        return 0.0;
    }
    if a.is_empty() || b.is_empty() {
        return 1.0;
    }
    let mut keys: Vec<(usize, usize)> = a.iter().chain(b).map(|(k, _)| *k).collect();
    keys.sort();
    keys.dedup();
    let get = |l: &[((usize, usize), f64)], k| l.iter().find(|(x, _)| *x == k).map_or(0.0, |(_, p)| *p);
    0.5 * keys.iter().map(|&k| (get(a, k) - get(b, k)).abs()).sum::<f64>()
}

/// LCS by trying every subsequence of `a`, longest first.
fn lcs_brute<T: PartialEq>(a: &[T], b: &[T]) -> usize {
    let is_subsequence = |mask: u32| {
        let mut it = b.iter();
        (0..a.len())
            .filter(|i| mask >> i & 1 == 1)
            .all(|i| it.any(|y| *y == a[i]))
    };
    (0u32..1 << a.len())
        .filter(|&m| is_subsequence(m))
        .map(|m| m.count_ones() as usize)
        .max()
        .unwrap_or(0)
}

pub fn fingerprint_oracle(op: &Operation) -> [f64; 6] {
    let u = gate_unitary(op.kind, &op.params).unwrap();
    let d = u.dim();
    let mut re = 0.0;
    let mut im = 0.0;
    for r in 0..d {
        for c in 0..d {
            re += u.get(r, c).re.abs();
            im += u.get(r, c).im.abs();
        }
    }
    let mut tr = num_complex::Complex64::new(0.0, 0.0);
    for i in 0..d {
        tr += u.get(i, i);
    }
    let total: f64 = op.params.iter().sum();
    let mut angle = total.rem_euclid(2.0 * PI) / (2.0 * PI);
    if angle >= 1.0 {
        angle = 0.0;
    }
    [
        op.kind.ordinal() as f64 / 19.0,
        op.qubits.len() as f64 / 3.0,
        angle,
        re / (d * d) as f64,
        im / (d * d) as f64,
        tr.norm() / d as f64,
    ]
}

/// The five IGS discrepancy components, computed straight from the op lists.
pub fn igs_components_oracle(reference: &Circuit, test: &Circuit) -> [f64; 5] {
    let n = reference.num_qubits;
    let ra: Vec<&Operation> = reference.ops.iter().filter(|o| o.is_unitary()).collect();
    let ta: Vec<&Operation> = test.ops.iter().filter(|o| o.is_unitary()).collect();

    let edges = |ops: &[&Operation]| {
        let mut out = Vec::new();
        for (j, b) in ops.iter().enumerate() {
            for &q in &b.qubits {
                if let Some(i) = (0..j).rev().find(|&i| ops[i].qubits.contains(&q)) {
                    out.push((ops[i].kind, b.kind, q));
                }
            }
        }
        out
    };
    let d_edge = tv_lists(&edges(&ra), &edges(&ta));

    let signature = |o: &&Operation| (o.kind, fingerprint_oracle(o).map(|x| (x * 100.0).round() as i64));
    let hist = tv_lists(
        &ra.iter().map(signature).collect::<Vec<_>>(),
        &ta.iter().map(signature).collect::<Vec<_>>(),
    );
    let m = ra.len().min(ta.len());
    let positional = if m == 0 {
        if ra.len() == ta.len() {
            0.0
        } else {
            1.0
        }
    } else {
        let diff = (0..m)
            .filter(|&i| {
                let (a, b) = (fingerprint_oracle(ra[i]), fingerprint_oracle(ta[i]));
                (0..6).any(|k| (a[k] - b[k]).abs() > 1e-9)
            })
            .count();
        diff as f64 / m as f64
    };
    let d_node = 0.5 * hist + 0.5 * positional;

    let seq = |ops: &[&Operation], q: usize| {
        ops.iter()
            .filter(|o| o.qubits.contains(&q))
            .map(|o| o.kind)
            .collect::<Vec<_>>()
    };
    let d_order = if n == 0 {
        0.0
    } else {
        (0..n)
            .map(|q| {
                let (a, b) = (seq(&ra, q), seq(&ta, q));
                let longest = a.len().max(b.len());
                if longest == 0 {
                    0.0
                } else {
                    1.0 - lcs_brute(&a, &b) as f64 / longest as f64
                }
            })
            .sum::<f64>()
            / n as f64
    };

    let pairs = |ops: &[&Operation]| {
        let mut all = Vec::new();
        for o in ops.iter().filter(|o| o.qubits.len() >= 2) {
            for i in 0..o.qubits.len() {
                for j in i + 1..o.qubits.len() {
                    let (a, b) = (o.qubits[i], o.qubits[j]);
                    all.push((a.min(b), a.max(b)));
                }
            }
        }
        let mut keys = all.clone();
        keys.sort();
        keys.dedup();
        keys.iter()
            .map(|k| (*k, all.iter().filter(|p| *p == k).count() as f64 / all.len() as f64))
            .collect::<Vec<_>>()
    };
    let d_inter = tv_weighted(&pairs(&ra), &pairs(&ta));

    let usage = |ops: &[&Operation]| {
        (0..n)
            .map(|q| ops.iter().filter(|o| o.qubits.contains(&q)).count())
            .collect::<Vec<_>>()
    };
    let (ua, ub) = (usage(&ra), usage(&ta));
    let d_usage = if n == 0 {
        0.0
    } else {
        let (sa, sb) = (ua.iter().sum::<usize>() as f64, ub.iter().sum::<usize>() as f64);
        let spread = if sa == 0.0 && sb == 0.0 {
            0.0
        } else if sa == 0.0 || sb == 0.0 {
            1.0
        } else {
            0.5 * (0..n)
                .map(|q| (ua[q] as f64 / sa - ub[q] as f64 / sb).abs())
                .sum::<f64>()
        };
        let woken = (0..n).filter(|&q| ua[q] == 0 && ub[q] > 0).count() as f64 / n as f64;
        0.5 * spread + 0.5 * woken
    };

    [d_edge, d_node, d_order, d_inter, d_usage]
}
