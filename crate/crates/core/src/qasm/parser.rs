use std::collections::HashMap;

use super::expr::{Expr, FUNCTIONS};
use super::lexer::{tokenize, Tok, Token};
use super::ParseDiagnostic;
use crate::circuit::{Circuit, GateKind, Operation};

/// Successful parse result; `warnings` holds non-fatal diagnostics.
#[derive(Debug, Clone)]
pub struct ParseOutput {
    pub circuit: Circuit,
    pub warnings: Vec<ParseDiagnostic>,
}

pub fn parse_qasm(source: &str) -> Result<Circuit, Vec<ParseDiagnostic>> {
    parse_qasm_named("circuit", source).map(|out| out.circuit)
}

pub fn parse_qasm_named(name: &str, source: &str) -> Result<ParseOutput, Vec<ParseDiagnostic>> {
    let toks = tokenize(source).map_err(|d| vec![d])?;
    let mut p = Parser::new(toks);
    p.program();
    if !p.errors.is_empty() {
        return Err(p.errors);
    }
    let circuit = Circuit {
        name: name.to_string(),
        num_qubits: p.qregs.iter().map(|r| r.size).sum(),
        num_clbits: p.cregs.iter().map(|r| r.size).sum(),
        ops: p.ops,
    };
    if let Err(e) = circuit.validate() {
        return Err(vec![ParseDiagnostic::error(1, 1, e.to_string())]);
    }
    Ok(ParseOutput {
        circuit,
        warnings: p.warnings,
    })
}

struct Register {
    name: String,
    offset: usize,
    size: usize,
}

/// Gate reference inside a custom gate body.
struct BodyCall {
    name: String,
    line: usize,
    column: usize,
    exprs: Vec<Expr>,
    args: Vec<String>,
}

struct GateDef {
    params: Vec<String>,
    args: Vec<String>,
    body: Vec<BodyCall>,
}

type PResult<T> = Result<T, ParseDiagnostic>;

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    qregs: Vec<Register>,
    cregs: Vec<Register>,
    gates: HashMap<String, GateDef>,
    ops: Vec<Operation>,
    errors: Vec<ParseDiagnostic>,
    warnings: Vec<ParseDiagnostic>,
}

/// Builtin gate names, including the OpenQASM primitives `U`/`CX` and the
/// newer `qelib1` aliases `u`/`p`.
fn builtin(name: &str) -> Option<GateKind> {
    match name {
        "U" | "u" => Some(GateKind::U3),
        "CX" => Some(GateKind::Cx),
        "p" => Some(GateKind::U1),
        "measure" | "barrier" => None,
        other => GateKind::from_name(other),
    }
}

impl Parser {
    fn new(toks: Vec<Token>) -> Self {
        Parser {
            toks,
            pos: 0,
            qregs: Vec::new(),
            cregs: Vec::new(),
            gates: HashMap::new(),
            ops: Vec::new(),
            errors: Vec::new(),
            warnings: Vec::new(),
        }
    }

    fn peek(&self) -> &Token {
        &self.toks[self.pos]
    }

    fn next(&mut self) -> Token {
        let t = self.toks[self.pos].clone();
        if !matches!(t.tok, Tok::Eof) {
            self.pos += 1;
        }
        t
    }

    fn err_at<T>(&self, t: &Token, msg: impl Into<String>) -> PResult<T> {
        Err(ParseDiagnostic::error(t.line, t.column, msg))
    }

    fn describe(t: &Tok) -> String {
        match t {
            Tok::Ident(s) => format!("`{s}`"),
            Tok::Int(v) => format!("`{v}`"),
            Tok::Real(v) => format!("`{v}`"),
            Tok::Str(s) => format!("\"{s}\""),
            Tok::Sym(s) => format!("`{s}`"),
            Tok::Eof => "end of input".into(),
        }
    }

    fn is_sym(&self, s: &str) -> bool {
        matches!(self.peek().tok, Tok::Sym(x) if x == s)
    }

    fn expect_sym(&mut self, s: &str) -> PResult<()> {
        let t = self.next();
        match t.tok {
            Tok::Sym(x) if x == s => Ok(()),
            ref other => self.err_at(&t, format!("expected `{s}`, found {}", Self::describe(other))),
        }
    }

    fn expect_ident(&mut self) -> PResult<(String, Token)> {
        let t = self.next();
        match &t.tok {
            Tok::Ident(s) => Ok((s.clone(), t.clone())),
            other => self.err_at(&t, format!("expected identifier, found {}", Self::describe(other))),
        }
    }

    fn expect_int(&mut self) -> PResult<usize> {
        let t = self.next();
        match t.tok {
            Tok::Int(v) => Ok(v as usize),
            ref other => self.err_at(&t, format!("expected integer, found {}", Self::describe(other))),
        }
    }

    /// Skips to just past the next `;` (or a closing `}`) after an error.
    fn recover(&mut self) {
        loop {
            let t = self.next();
            match t.tok {
                Tok::Eof | Tok::Sym(";") | Tok::Sym("}") => break,
                _ => {}
            }
        }
    }

    fn program(&mut self) {
        match &self.peek().tok {
            Tok::Ident(s) if s == "OPENQASM" => {
                if let Err(d) = self.header() {
                    self.errors.push(d);
                    self.recover();
                }
            }
            _ => {
                let t = self.peek().clone();
                self.warnings.push(ParseDiagnostic::warning(
                    t.line,
                    t.column,
                    "missing `OPENQASM 2.0;` header",
                ));
            }
        }
        while !matches!(self.peek().tok, Tok::Eof) {
            if let Err(d) = self.statement() {
                self.errors.push(d);
                self.recover();
            }
        }
    }

    fn header(&mut self) -> PResult<()> {
        self.next();
        let t = self.next();
        let version = match t.tok {
            Tok::Real(v) => v,
            Tok::Int(v) => v as f64,
            ref other => return self.err_at(&t, format!("expected version, found {}", Self::describe(other))),
        };
        if !(2.0..3.0).contains(&version) {
            return self.err_at(
                &t,
                format!("unsupported OpenQASM version {version}; only 2.x is accepted"),
            );
        }
        self.expect_sym(";")
    }

    fn statement(&mut self) -> PResult<()> {
        let t = self.peek().clone();
        let Tok::Ident(word) = &t.tok else {
            self.next();
            return self.err_at(&t, format!("expected statement, found {}", Self::describe(&t.tok)));
        };
        match word.as_str() {
            "OPENQASM" => self.err_at(&t, "`OPENQASM` header must be the first statement"),
            "include" => self.include(),
            "qreg" | "creg" => self.register(word == "qreg"),
            "gate" => self.gate_def(),
            "opaque" => self.err_at(&t, "unsupported construct: opaque gate declarations"),
            "if" => self.err_at(&t, "unsupported construct: classical conditional `if`"),
            "reset" => self.err_at(&t, "unsupported construct: `reset`"),
            "measure" => self.measure(),
            "barrier" => self.barrier(),
            _ => self.gate_call(),
        }
    }

    fn include(&mut self) -> PResult<()> {
        self.next();
        let t = self.next();
        let Tok::Str(file) = &t.tok else {
            return self.err_at(&t, "expected file name string after `include`");
        };
        if file != "qelib1.inc" {
            return self.err_at(
                &t,
                format!("unsupported include \"{file}\"; only qelib1.inc is built in"),
            );
        }
        self.expect_sym(";")
    }

    fn register(&mut self, quantum: bool) -> PResult<()> {
        self.next();
        let (name, tok) = self.expect_ident()?;
        self.expect_sym("[")?;
        let size = self.expect_int()?;
        self.expect_sym("]")?;
        self.expect_sym(";")?;
        if self.qregs.iter().chain(&self.cregs).any(|r| r.name == name) {
            return self.err_at(&tok, format!("register `{name}` already declared"));
        }
        let regs = if quantum { &mut self.qregs } else { &mut self.cregs };
        let offset = regs.iter().map(|r| r.size).sum();
        regs.push(Register { name, offset, size });
        Ok(())
    }

    fn ident_list(&mut self) -> PResult<Vec<String>> {
        let mut out = vec![self.expect_ident()?.0];
        while self.is_sym(",") {
            self.next();
            out.push(self.expect_ident()?.0);
        }
        Ok(out)
    }

    fn gate_def(&mut self) -> PResult<()> {
        self.next();
        let (name, name_tok) = self.expect_ident()?;
        let mut params = Vec::new();
        if self.is_sym("(") {
            self.next();
            if !self.is_sym(")") {
                params = self.ident_list()?;
            }
            self.expect_sym(")")?;
        }
        let args = self.ident_list()?;
        self.expect_sym("{")?;
        let mut body = Vec::new();
        while !self.is_sym("}") {
            let (callee, t) = self.expect_ident()?;
            if callee == "barrier" {
                self.ident_list()?;
                self.expect_sym(";")?;
                continue;
            }
            if builtin(&callee).is_none() && !self.gates.contains_key(&callee) {
                return self.err_at(&t, format!("unsupported gate `{callee}` in definition of `{name}`"));
            }
            let exprs = self.opt_expr_list()?;
            let call_args = self.ident_list()?;
            for a in &call_args {
                if !args.contains(a) {
                    return self.err_at(&t, format!("unknown qubit argument `{a}` in gate `{name}`"));
                }
            }
            self.expect_sym(";")?;
            body.push(BodyCall {
                name: callee,
                line: t.line,
                column: t.column,
                exprs,
                args: call_args,
            });
        }
        self.expect_sym("}")?;
        if builtin(&name).is_some() {
            self.warnings.push(ParseDiagnostic::warning(
                name_tok.line,
                name_tok.column,
                format!("definition of builtin gate `{name}` ignored"),
            ));
            return Ok(());
        }
        self.gates.insert(name, GateDef { params, args, body });
        Ok(())
    }

    fn opt_expr_list(&mut self) -> PResult<Vec<Expr>> {
        let mut exprs = Vec::new();
        if self.is_sym("(") {
            self.next();
            if !self.is_sym(")") {
                exprs.push(self.expr()?);
                while self.is_sym(",") {
                    self.next();
                    exprs.push(self.expr()?);
                }
            }
            self.expect_sym(")")?;
        }
        Ok(exprs)
    }

    // expr := term (('+'|'-') term)*
    fn expr(&mut self) -> PResult<Expr> {
        let mut lhs = self.term()?;
        while self.is_sym("+") || self.is_sym("-") {
            let op = if self.is_sym("+") { '+' } else { '-' };
            self.next();
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.term()?));
        }
        Ok(lhs)
    }

    fn term(&mut self) -> PResult<Expr> {
        let mut lhs = self.unary()?;
        while self.is_sym("*") || self.is_sym("/") {
            let op = if self.is_sym("*") { '*' } else { '/' };
            self.next();
            lhs = Expr::Bin(op, Box::new(lhs), Box::new(self.unary()?));
        }
        Ok(lhs)
    }

    fn unary(&mut self) -> PResult<Expr> {
        if self.is_sym("-") {
            self.next();
            return Ok(Expr::Neg(Box::new(self.unary()?)));
        }
        if self.is_sym("+") {
            self.next();
            return self.unary();
        }
        let base = self.atom()?;
        if self.is_sym("^") {
            self.next();
            return Ok(Expr::Bin('^', Box::new(base), Box::new(self.unary()?)));
        }
        Ok(base)
    }

    fn atom(&mut self) -> PResult<Expr> {
        let t = self.next();
        match &t.tok {
            Tok::Int(v) => Ok(Expr::Num(*v as f64)),
            Tok::Real(v) => Ok(Expr::Num(*v)),
            Tok::Ident(s) if s == "pi" => Ok(Expr::Pi),
            Tok::Ident(s) if FUNCTIONS.contains(&s.as_str()) => {
                self.expect_sym("(")?;
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(Expr::Call(s.clone(), Box::new(e)))
            }
            Tok::Ident(s) => Ok(Expr::Var(s.clone())),
            Tok::Sym("(") => {
                let e = self.expr()?;
                self.expect_sym(")")?;
                Ok(e)
            }
            other => self.err_at(&t, format!("expected expression, found {}", Self::describe(other))),
        }
    }

    /// Parses `name` or `name[i]` against the given register kind and
    /// returns the flattened indices it denotes.
    fn operand(&mut self, quantum: bool) -> PResult<Vec<usize>> {
        let (name, tok) = self.expect_ident()?;
        let regs = if quantum { &self.qregs } else { &self.cregs };
        let Some(reg) = regs.iter().find(|r| r.name == name) else {
            let what = if quantum { "quantum" } else { "classical" };
            return self.err_at(&tok, format!("unknown {what} register `{name}`"));
        };
        let (offset, size) = (reg.offset, reg.size);
        if self.is_sym("[") {
            self.next();
            let idx = self.expect_int()?;
            self.expect_sym("]")?;
            if idx >= size {
                return self.err_at(
                    &tok,
                    format!("index out of range: {name}[{idx}] (register size {size})"),
                );
            }
            Ok(vec![offset + idx])
        } else {
            Ok((offset..offset + size).collect())
        }
    }

    fn operand_list(&mut self) -> PResult<(Vec<Vec<usize>>, Token)> {
        let first = self.peek().clone();
        let mut out = vec![self.operand(true)?];
        while self.is_sym(",") {
            self.next();
            out.push(self.operand(true)?);
        }
        Ok((out, first))
    }

    /// Expands register arguments into one operand tuple per index.
    fn broadcast(&self, args: &[Vec<usize>], at: &Token) -> PResult<Vec<Vec<usize>>> {
        let widths: Vec<usize> = args.iter().map(|a| a.len()).filter(|&n| n != 1).collect();
        let n = widths.first().copied().unwrap_or(1);
        if widths.iter().any(|&w| w != n) {
            return self.err_at(at, "register arguments have different sizes");
        }
        Ok((0..n)
            .map(|i| args.iter().map(|a| if a.len() == 1 { a[0] } else { a[i] }).collect())
            .collect())
    }

    fn measure(&mut self) -> PResult<()> {
        let t = self.next();
        let q = self.operand(true)?;
        self.expect_sym("->")?;
        let c = self.operand(false)?;
        self.expect_sym(";")?;
        if q.len() != c.len() {
            return self.err_at(&t, "measure operands have different sizes");
        }
        for (q, c) in q.into_iter().zip(c) {
            self.ops.push(Operation::measure(q, c));
        }
        Ok(())
    }

    fn barrier(&mut self) -> PResult<()> {
        self.next();
        let (args, _) = self.operand_list()?;
        self.expect_sym(";")?;
        let mut qubits: Vec<usize> = Vec::new();
        for q in args.into_iter().flatten() {
            if !qubits.contains(&q) {
                qubits.push(q);
            }
        }
        self.ops.push(Operation::barrier(&qubits));
        Ok(())
    }

    fn gate_call(&mut self) -> PResult<()> {
        let (name, tok) = self.expect_ident()?;
        if builtin(&name).is_none() && !self.gates.contains_key(&name) {
            return self.err_at(&tok, format!("unsupported gate `{name}`"));
        }
        let exprs = self.opt_expr_list()?;
        let empty = HashMap::new();
        let params = exprs
            .iter()
            .map(|e| e.eval(&empty))
            .collect::<Result<Vec<f64>, String>>()
            .or_else(|m| self.err_at(&tok, m))?;
        let (args, at) = self.operand_list()?;
        self.expect_sym(";")?;
        for qubits in self.broadcast(&args, &at)? {
            self.apply(&name, &params, &qubits, &tok)?;
        }
        Ok(())
    }

    fn apply(&mut self, name: &str, params: &[f64], qubits: &[usize], at: &Token) -> PResult<()> {
        for (i, q) in qubits.iter().enumerate() {
            if qubits[..i].contains(q) {
                return self.err_at(at, format!("repeated qubit operand in `{name}`"));
            }
        }
        if let Some(kind) = builtin(name) {
            if params.len() != kind.param_count() {
                return self.err_at(
                    at,
                    format!(
                        "gate `{name}` takes {} parameter(s), got {}",
                        kind.param_count(),
                        params.len()
                    ),
                );
            }
            let arity = kind.arity().unwrap_or(qubits.len());
            if qubits.len() != arity {
                return self.err_at(
                    at,
                    format!("gate `{name}` takes {arity} qubit(s), got {}", qubits.len()),
                );
            }
            self.ops.push(Operation::gate(kind, qubits, params));
            return Ok(());
        }

        let def = &self.gates[name];
        if params.len() != def.params.len() || qubits.len() != def.args.len() {
            return self.err_at(
                at,
                format!(
                    "gate `{name}` takes {} parameter(s) and {} qubit(s)",
                    def.params.len(),
                    def.args.len()
                ),
            );
        }
        let env: HashMap<String, f64> = def.params.iter().cloned().zip(params.iter().copied()).collect();
        let binding: HashMap<&str, usize> = def
            .args
            .iter()
            .map(String::as_str)
            .zip(qubits.iter().copied())
            .collect();
        let mut calls = Vec::with_capacity(def.body.len());
        for call in &def.body {
            let values = call
                .exprs
                .iter()
                .map(|e| e.eval(&env))
                .collect::<Result<Vec<f64>, String>>()
                .map_err(|m| ParseDiagnostic::error(call.line, call.column, m))?;
            let qs: Vec<usize> = call.args.iter().map(|a| binding[a.as_str()]).collect();
            calls.push((call.name.clone(), values, qs));
        }
        for (callee, values, qs) in calls {
            self.apply(&callee, &values, &qs, at)?;
        }
        Ok(())
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn bell_program() {
        let c = parse_qasm("OPENQASM 2.0; include \"qelib1.inc\"; qreg q[2]; h q[0]; cx q[0],q[1];").unwrap();
        assert_eq!(c.num_qubits, 2);
        assert_eq!(
            c.ops,
            vec![
                Operation::gate(GateKind::H, &[0], &[]),
                Operation::gate(GateKind::Cx, &[0, 1], &[])
            ]
        );
    }

    #[test]
    fn registers_flatten_in_declaration_order() {
        let out = parse_qasm_named("r", "qreg a[1]; qreg b[1]; cx a[0],b[0];").unwrap();
        assert_eq!(out.circuit.ops, vec![Operation::gate(GateKind::Cx, &[0, 1], &[])]);
        assert_eq!(out.warnings.len(), 1, "missing header warns");
    }

    #[test]
    fn index_out_of_range_reports_position() {
        let errs = parse_qasm("OPENQASM 2.0;\nqreg q[2];\nh q[5];").unwrap_err();
        assert_eq!(errs.len(), 1);
        assert!(errs[0].message.contains("index out of range"), "{}", errs[0]);
        assert_eq!((errs[0].line, errs[0].column), (3, 3));
    }

    #[test]
    fn unsupported_constructs_are_named() {
        for (src, needle) in [
            ("qreg q[1]; opaque foo q;", "opaque"),
            ("qreg q[1]; creg c[1]; if(c==1) x q[0];", "if"),
            ("qreg q[2]; cu1(0.1) q[0],q[1];", "cu1"),
            ("include \"other.inc\";", "other.inc"),
        ] {
            let errs = parse_qasm(src).unwrap_err();
            assert!(errs[0].message.contains(needle), "{src}: {}", errs[0]);
        }
    }

    #[test]
    fn angle_expressions() {
        let c = parse_qasm("qreg q[1]; rz(-pi/2 + 2*(pi - 1)) q[0]; u3(pi,0,-pi) q[0];").unwrap();
        assert!((c.ops[0].params[0] - (-PI / 2.0 + 2.0 * (PI - 1.0))).abs() < 1e-15);
        assert_eq!(c.ops[1].params, vec![PI, 0.0, -PI]);
    }

    #[test]
    fn custom_gates_are_inlined() {
        let src = "OPENQASM 2.0;
            include \"qelib1.inc\";
            gate majority a,b,c { cx c,b; cx c,a; ccx a,b,c; }
            gate rot(theta) a { rz(theta/2) a; rx(-theta) a; }
            qreg q[3];
            majority q[0],q[1],q[2];
            rot(pi) q[1];";
        let c = parse_qasm(src).unwrap();
        let kinds: Vec<GateKind> = c.ops.iter().map(|o| o.kind).collect();
        assert_eq!(
            kinds,
            vec![GateKind::Cx, GateKind::Cx, GateKind::Ccx, GateKind::Rz, GateKind::Rx]
        );
        assert_eq!(c.ops[0].qubits, vec![2, 1]);
        assert_eq!(c.ops[2].qubits, vec![0, 1, 2]);
        assert!((c.ops[3].params[0] - PI / 2.0).abs() < 1e-15);
        assert_eq!(c.ops[4].params[0], -PI);
    }

    #[test]
    fn register_broadcast_and_measure() {
        let c = parse_qasm("qreg q[3]; creg c[3]; h q; cx q[0],q; measure q -> c;");
        assert!(c.is_err(), "cx q[0],q repeats q[0]");
        let c = parse_qasm("qreg q[2]; qreg r[2]; creg c[2]; h q; cx q,r; measure r -> c;").unwrap();
        assert_eq!(c.ops.len(), 6);
        assert_eq!(c.ops[2].qubits, vec![0, 2]);
        assert_eq!(c.ops[3].qubits, vec![1, 3]);
        assert_eq!(c.ops[5], Operation::measure(3, 1));
    }

    #[test]
    fn builtin_primitives_and_aliases() {
        let c = parse_qasm("qreg q[2]; U(0.1,0.2,0.3) q[0]; CX q[0],q[1]; p(0.5) q[1];").unwrap();
        let kinds: Vec<GateKind> = c.ops.iter().map(|o| o.kind).collect();
        assert_eq!(kinds, vec![GateKind::U3, GateKind::Cx, GateKind::U1]);
    }

    #[test]
    fn errors_recover_to_next_statement() {
        let errs = parse_qasm("qreg q[1]; foo q[0]; h q[3]; bar q[0];").unwrap_err();
        assert_eq!(errs.len(), 3);
    }

    #[test]
    fn whitespace_style_does_not_matter() {
        let a = parse_qasm("qreg q[2];h q[0];cx q[0],q[1];").unwrap();
        let b = parse_qasm("qreg q [ 2 ] ;\n\n  h   q[0] ;\r\n cx q[0] , q[1];// done").unwrap();
        assert_eq!(a, b);
    }
}
