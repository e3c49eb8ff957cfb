use crate::circuit::{Matrix, Operation};
use crate::simulator::StateVector;

const TOLERANCE: f64 = 1e-9;

/// Matrix of `op` on the joint space of `space`, built column by column
/// from basis states.
fn embed(op: &Operation, space: &[usize]) -> Matrix {
    let k = space.len();
    let local = Operation {
        qubits: op
            .qubits
            .iter()
            .map(|q| space.iter().position(|s| s == q).expect("operand in joint space"))
            .collect(),
        ..op.clone()
    };
    let dim = 1 << k;
    let mut m = Matrix::zeros(dim);
    for col in 0..dim {
        let mut state = StateVector::basis(k, col);
        state.apply(&local).expect("unitary op");
        for (row, amp) in state.amplitudes().iter().enumerate() {
            m.set(row, col, *amp);
        }
    }
    m
}

/// True when `AB = e^{iφ}·BA` within `1e-9` (max-abs) on the union of both
/// operand sets. Anticommuting pairs such as X and Z count as commuting:
/// swapping them only changes the global phase. Only meaningful for unitary
/// ops.
pub fn ops_commute(a: &Operation, b: &Operation) -> bool {
    let mut space = a.qubits.clone();
    for q in &b.qubits {
        if !space.contains(q) {
            space.push(*q);
        }
    }
    let (ma, mb) = (embed(a, &space), embed(b, &space));
    let (ab, ba) = (&ma * &mb, &mb * &ma);
    let pivot = (0..ba.entries().len())
        .max_by(|&i, &j| ba.entries()[i].norm().total_cmp(&ba.entries()[j].norm()))
        .expect("non-empty matrix");
    let phase = ab.entries()[pivot] / ba.entries()[pivot];
    if (phase.norm() - 1.0).abs() > TOLERANCE {
        return false;
    }
    ab.max_abs_diff(&ba.scale_complex(phase)) <= TOLERANCE
}
