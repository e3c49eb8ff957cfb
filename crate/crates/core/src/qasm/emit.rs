use std::fmt::Write;

use crate::circuit::{Circuit, GateKind};

/// Serializes a circuit as OpenQASM 2.0 over one `q` and one `c` register.
/// Angles are written with 17 significant digits.
pub fn emit_qasm(circuit: &Circuit) -> String {
    let mut out = String::new();
    out.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    if circuit.num_qubits > 0 {
        writeln!(out, "qreg q[{}];", circuit.num_qubits).unwrap();
    }
    if circuit.num_clbits > 0 {
        writeln!(out, "creg c[{}];", circuit.num_clbits).unwrap();
    }
    for op in &circuit.ops {
        let operands: Vec<String> = op.qubits.iter().map(|q| format!("q[{q}]")).collect();
        match op.kind {
            GateKind::Measure => {
                writeln!(out, "measure q[{}] -> c[{}];", op.qubits[0], op.clbits[0]).unwrap();
            }
            GateKind::Barrier if op.qubits.is_empty() => {}
            _ => {
                out.push_str(op.kind.name());
                if !op.params.is_empty() {
                    let ps: Vec<String> = op.params.iter().map(|p| format!("{p:.16e}")).collect();
                    write!(out, "({})", ps.join(",")).unwrap();
                }
                writeln!(out, " {};", operands.join(",")).unwrap();
            }
        }
    }
    out
}
