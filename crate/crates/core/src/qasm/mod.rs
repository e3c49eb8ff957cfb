//! OpenQASM 2.0 frontend.
//!
//! Accepts the `qelib1` subset covered by [`GateKind`](crate::circuit::GateKind)
//! plus custom `gate` definitions, which are inlined at the call site.
//! Quantum registers are flattened into one index space in declaration
//! order; classical registers likewise.

mod emit;
mod expr;
mod lexer;
mod parser;

use std::fmt;

use serde::Serialize;

pub use emit::emit_qasm;
pub use parser::{parse_qasm, parse_qasm_named, ParseOutput};

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ParseDiagnostic {
    pub line: usize,
    pub column: usize,
    pub message: String,
    pub severity: Severity,
}

impl ParseDiagnostic {
    pub(crate) fn error(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseDiagnostic {
            line,
            column,
            message: message.into(),
            severity: Severity::Error,
        }
    }

    pub(crate) fn warning(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseDiagnostic {
            line,
            column,
            message: message.into(),
            severity: Severity::Warning,
        }
    }
}

impl fmt::Display for ParseDiagnostic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let sev = match self.severity {
            Severity::Error => "error",
            Severity::Warning => "warning",
        };
        write!(f, "{}:{}: {}: {}", self.line, self.column, sev, self.message)
    }
}
