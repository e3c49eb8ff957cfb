//! In-memory circuit model shared by the parser, simulator, graph builder and
//! anomaly engine.

mod gates;
mod matrix;
mod profile;

use std::fmt;

use serde::{Deserialize, Serialize};
use thiserror::Error;

pub use gates::gate_unitary;
pub use matrix::Matrix;
pub use profile::{operand_pairs, structural_profile, StructuralProfile};

#[derive(Debug, Error, Clone, PartialEq)]
pub enum CircuitError {
    #[error("gate `{0}` has no unitary")]
    NotUnitary(GateKind),
    #[error("gate `{kind}` expects {expected} parameter(s), got {got}")]
    ParamArity {
        kind: GateKind,
        expected: usize,
        got: usize,
    },
    #[error("gate `{kind}` expects {expected} qubit(s), got {got}")]
    QubitArity {
        kind: GateKind,
        expected: usize,
        got: usize,
    },
    #[error("qubit index {index} out of range for {size} qubit(s)")]
    QubitOutOfRange { index: usize, size: usize },
    #[error("classical bit index {index} out of range for {size} bit(s)")]
    ClbitOutOfRange { index: usize, size: usize },
    #[error("repeated qubit operand {0}")]
    DuplicateQubit(usize),
    #[error("non-finite parameter in gate `{0}`")]
    NonFiniteParam(GateKind),
}

/// Supported operation kinds, in canonical ordinal order.
#[derive(Debug, Clone, Copy, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum GateKind {
    X,
    Y,
    Z,
    H,
    S,
    Sdg,
    T,
    Tdg,
    Rx,
    Ry,
    Rz,
    U1,
    U2,
    U3,
    Cx,
    Cz,
    Swap,
    Ccx,
    Id,
    Measure,
    Barrier,
}

impl GateKind {
    pub const ALL: [GateKind; 21] = [
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
        GateKind::Measure,
        GateKind::Barrier,
    ];

    /// Number of kinds that carry a unitary (everything but measure/barrier).
    pub const UNITARY_COUNT: usize = 19;

    pub fn name(self) -> &'static str {
        match self {
            GateKind::X => "x",
            GateKind::Y => "y",
            GateKind::Z => "z",
            GateKind::H => "h",
            GateKind::S => "s",
            GateKind::Sdg => "sdg",
            GateKind::T => "t",
            GateKind::Tdg => "tdg",
            GateKind::Rx => "rx",
            GateKind::Ry => "ry",
            GateKind::Rz => "rz",
            GateKind::U1 => "u1",
            GateKind::U2 => "u2",
            GateKind::U3 => "u3",
            GateKind::Cx => "cx",
            GateKind::Cz => "cz",
            GateKind::Swap => "swap",
            GateKind::Ccx => "ccx",
            GateKind::Id => "id",
            GateKind::Measure => "measure",
            GateKind::Barrier => "barrier",
        }
    }

    pub fn from_name(name: &str) -> Option<GateKind> {
        GateKind::ALL.iter().copied().find(|k| k.name() == name)
    }

    /// Position in [`GateKind::ALL`].
    pub fn ordinal(self) -> usize {
        self as usize
    }

    pub fn is_unitary(self) -> bool {
        !matches!(self, GateKind::Measure | GateKind::Barrier)
    }

    /// Fixed qubit arity. Barriers take any number of operands.
    pub fn arity(self) -> Option<usize> {
        match self {
            GateKind::Cx | GateKind::Cz | GateKind::Swap => Some(2),
            GateKind::Ccx => Some(3),
            GateKind::Barrier => None,
            _ => Some(1),
        }
    }

    pub fn param_count(self) -> usize {
        match self {
            GateKind::Rx | GateKind::Ry | GateKind::Rz | GateKind::U1 => 1,
            GateKind::U2 => 2,
            GateKind::U3 => 3,
            _ => 0,
        }
    }
}

impl fmt::Display for GateKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Operation {
    pub kind: GateKind,
    pub qubits: Vec<usize>,
    pub params: Vec<f64>,
    pub clbits: Vec<usize>,
}

impl Operation {
    pub fn gate(kind: GateKind, qubits: &[usize], params: &[f64]) -> Self {
        Operation {
            kind,
            qubits: qubits.to_vec(),
            params: params.to_vec(),
            clbits: Vec::new(),
        }
    }

    pub fn measure(qubit: usize, clbit: usize) -> Self {
        Operation {
            kind: GateKind::Measure,
            qubits: vec![qubit],
            params: Vec::new(),
            clbits: vec![clbit],
        }
    }

    pub fn barrier(qubits: &[usize]) -> Self {
        Operation::gate(GateKind::Barrier, qubits, &[])
    }

    pub fn is_unitary(&self) -> bool {
        self.kind.is_unitary()
    }

    pub fn touches(&self, qubit: usize) -> bool {
        self.qubits.contains(&qubit)
    }

    pub fn shares_qubit(&self, other: &Operation) -> bool {
        self.qubits.iter().any(|q| other.qubits.contains(q))
    }

    fn check_shape(&self) -> Result<(), CircuitError> {
        if let Some(expected) = self.kind.arity() {
            if self.qubits.len() != expected {
                return Err(CircuitError::QubitArity {
                    kind: self.kind,
                    expected,
                    got: self.qubits.len(),
                });
            }
        }
        if self.params.len() != self.kind.param_count() {
            return Err(CircuitError::ParamArity {
                kind: self.kind,
                expected: self.kind.param_count(),
                got: self.params.len(),
            });
        }
        if self.params.iter().any(|p| !p.is_finite()) {
            return Err(CircuitError::NonFiniteParam(self.kind));
        }
        for (i, q) in self.qubits.iter().enumerate() {
            if self.qubits[..i].contains(q) {
                return Err(CircuitError::DuplicateQubit(*q));
            }
        }
        Ok(())
    }
}

impl fmt::Display for Operation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}", self.kind)?;
        if !self.params.is_empty() {
            let ps: Vec<String> = self.params.iter().map(|p| format!("{p}")).collect();
            write!(f, "[{}]", ps.join(","))?;
        }
        let qs: Vec<String> = self.qubits.iter().map(|q| q.to_string()).collect();
        write!(f, "({})", qs.join(","))?;
        if !self.clbits.is_empty() {
            write!(f, "->c{}", self.clbits[0])?;
        }
        Ok(())
    }
}

/// A flat circuit over a single 0-based qubit space and a single 0-based
/// classical-bit space. `ops` is program order.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Circuit {
    pub name: String,
    pub num_qubits: usize,
    pub num_clbits: usize,
    pub ops: Vec<Operation>,
}

impl Circuit {
    pub fn new(name: impl Into<String>, num_qubits: usize, num_clbits: usize) -> Self {
        Circuit {
            name: name.into(),
            num_qubits,
            num_clbits,
            ops: Vec::new(),
        }
    }

    /// Builds a circuit from ops, validating each one.
    pub fn from_ops(
        name: impl Into<String>,
        num_qubits: usize,
        num_clbits: usize,
        ops: Vec<Operation>,
    ) -> Result<Self, CircuitError> {
        let c = Circuit {
            name: name.into(),
            num_qubits,
            num_clbits,
            ops,
        };
        c.validate()?;
        Ok(c)
    }

    pub fn push(&mut self, op: Operation) -> Result<(), CircuitError> {
        self.check_op(&op)?;
        self.ops.push(op);
        Ok(())
    }

    pub fn validate(&self) -> Result<(), CircuitError> {
        self.ops.iter().try_for_each(|op| self.check_op(op))
    }

    fn check_op(&self, op: &Operation) -> Result<(), CircuitError> {
        op.check_shape()?;
        if let Some(&index) = op.qubits.iter().find(|&&q| q >= self.num_qubits) {
            return Err(CircuitError::QubitOutOfRange {
                index,
                size: self.num_qubits,
            });
        }
        if let Some(&index) = op.clbits.iter().find(|&&c| c >= self.num_clbits) {
            return Err(CircuitError::ClbitOutOfRange {
                index,
                size: self.num_clbits,
            });
        }
        Ok(())
    }

    pub fn unitary_ops(&self) -> impl Iterator<Item = &Operation> {
        self.ops.iter().filter(|op| op.is_unitary())
    }

    pub fn has_measurements(&self) -> bool {
        self.ops.iter().any(|op| op.kind == GateKind::Measure)
    }

    /// Number of unitary ops acting on each qubit.
    pub fn qubit_usage(&self) -> Vec<usize> {
        let mut usage = vec![0; self.num_qubits];
        for op in self.unitary_ops() {
            for &q in &op.qubits {
                usage[q] += 1;
            }
        }
        usage
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kind_names_round_trip() {
        for k in GateKind::ALL {
            assert_eq!(GateKind::from_name(k.name()), Some(k));
        }
        assert_eq!(GateKind::from_name("cu3"), None);
        assert_eq!(
            GateKind::ALL.iter().filter(|k| k.is_unitary()).count(),
            GateKind::UNITARY_COUNT
        );
    }

    #[test]
    fn push_rejects_bad_operands() {
        let mut c = Circuit::new("c", 2, 1);
        assert!(c.push(Operation::gate(GateKind::Cx, &[0, 1], &[])).is_ok());
        assert_eq!(
            c.push(Operation::gate(GateKind::H, &[2], &[])),
            Err(CircuitError::QubitOutOfRange { index: 2, size: 2 })
        );
        assert_eq!(
            c.push(Operation::gate(GateKind::Cx, &[1, 1], &[])),
            Err(CircuitError::DuplicateQubit(1))
        );
        assert!(matches!(
            c.push(Operation::gate(GateKind::Rz, &[0], &[])),
            Err(CircuitError::ParamArity { .. })
        ));
        assert!(matches!(
            c.push(Operation::measure(0, 3)),
            Err(CircuitError::ClbitOutOfRange { .. })
        ));
    }
}
