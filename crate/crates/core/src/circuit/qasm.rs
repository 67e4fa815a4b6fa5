//! OpenQASM 2.0 subset reader and writer.
//!
//! Accepted statements: the `OPENQASM 2.0;` header and `include` lines
//! (ignored), one `qreg`, at most one `creg`, the gates `x sx h rz rx cx ccx
//! swap measure barrier`, plus `u1q(θ,φ)` and `rzz(θ)` so that trapped-ion
//! rebased circuits round-trip. Single-qubit gates and `measure` broadcast
//! over whole registers. Angle arguments are arithmetic expressions over
//! numbers and `pi`.

use std::fmt::Write as _;

use thiserror::Error;

use super::{Gate, GateKind, QuantumCircuit};

#[derive(Debug, Error, PartialEq)]
pub enum QasmError {
    #[error("syntax error at {line}:{col}: {msg}")]
    Syntax { line: usize, col: usize, msg: String },
    #[error("unsupported gate `{name}` at {line}:{col}")]
    UnsupportedGate { name: String, line: usize, col: usize },
    #[error("register error at {line}:{col}: {msg}")]
    Register { line: usize, col: usize, msg: String },
}

#[derive(Debug, Clone, PartialEq)]
enum Tok {
    Ident(String),
    Num(f64),
    Str,
    Sym(&'static str),
}

#[derive(Debug, Clone)]
struct Token {
    tok: Tok,
    line: usize,
    col: usize,
}

fn lex(text: &str) -> Result<Vec<Token>, QasmError> {
    let mut out = Vec::new();
    for (li, raw_line) in text.lines().enumerate() {
        let line = li + 1;
        let chars: Vec<char> = raw_line.chars().collect();
        let mut i = 0;
        while i < chars.len() {
            let c = chars[i];
            let col = i + 1;
            if c.is_whitespace() {
                i += 1;
            } else if c == '/' && chars.get(i + 1) == Some(&'/') {
                break;
            } else if c.is_ascii_alphabetic() || c == '_' {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_alphanumeric() || chars[i] == '_') {
                    i += 1;
                }
                let s: String = chars[start..i].iter().collect();
                out.push(Token {
                    tok: Tok::Ident(s),
                    line,
                    col,
                });
            } else if c.is_ascii_digit() || (c == '.' && chars.get(i + 1).is_some_and(|d| d.is_ascii_digit())) {
                let start = i;
                while i < chars.len() && (chars[i].is_ascii_digit() || chars[i] == '.') {
                    i += 1;
                }
                if i < chars.len() && (chars[i] == 'e' || chars[i] == 'E') {
                    let mut j = i + 1;
                    if j < chars.len() && (chars[j] == '+' || chars[j] == '-') {
                        j += 1;
                    }
                    if j < chars.len() && chars[j].is_ascii_digit() {
                        i = j;
                        while i < chars.len() && chars[i].is_ascii_digit() {
                            i += 1;
                        }
                    }
                }
                let s: String = chars[start..i].iter().collect();
                let v = s.parse::<f64>().map_err(|_| QasmError::Syntax {
                    line,
                    col,
                    msg: format!("malformed number `{s}`"),
                })?;
                out.push(Token {
                    tok: Tok::Num(v),
                    line,
                    col,
                });
            } else if c == '"' {
                i += 1;
                while i < chars.len() && chars[i] != '"' {
                    i += 1;
                }
                if i >= chars.len() {
                    return Err(QasmError::Syntax {
                        line,
                        col,
                        msg: "unterminated string".into(),
                    });
                }
                i += 1;
                out.push(Token {
                    tok: Tok::Str,
                    line,
                    col,
                });
            } else if c == '-' && chars.get(i + 1) == Some(&'>') {
                out.push(Token {
                    tok: Tok::Sym("->"),
                    line,
                    col,
                });
                i += 2;
            } else {
                let sym = match c {
                    ';' => ";",
                    ',' => ",",
                    '(' => "(",
                    ')' => ")",
                    '[' => "[",
                    ']' => "]",
                    '+' => "+",
                    '-' => "-",
                    '*' => "*",
                    '/' => "/",
                    '^' => "^",
                    _ => {
                        return Err(QasmError::Syntax {
                            line,
                            col,
                            msg: format!("unexpected character `{c}`"),
                        })
                    }
                };
                out.push(Token {
                    tok: Tok::Sym(sym),
                    line,
                    col,
                });
                i += 1;
            }
        }
    }
    Ok(out)
}

struct Register {
    name: String,
    size: usize,
}

/// One argument: a single element or a whole register.
enum Operand {
    Bit(usize),
    Whole,
}

struct Parser {
    toks: Vec<Token>,
    pos: usize,
    end: (usize, usize),
    qreg: Option<Register>,
    creg: Option<Register>,
}

impl Parser {
    fn peek(&self) -> Option<&Token> {
        self.toks.get(self.pos)
    }

    fn here(&self) -> (usize, usize) {
        self.peek().map(|t| (t.line, t.col)).unwrap_or(self.end)
    }

    fn syntax<T>(&self, msg: impl Into<String>) -> Result<T, QasmError> {
        let (line, col) = self.here();
        Err(QasmError::Syntax {
            line,
            col,
            msg: msg.into(),
        })
    }

    fn next(&mut self) -> Option<Token> {
        let t = self.toks.get(self.pos).cloned();
        self.pos += 1;
        t
    }

    fn expect_sym(&mut self, sym: &'static str) -> Result<(), QasmError> {
        match self.peek() {
            Some(Token { tok: Tok::Sym(s), .. }) if *s == sym => {
                self.pos += 1;
                Ok(())
            }
            _ => self.syntax(format!("expected `{sym}`")),
        }
    }

    fn eat_sym(&mut self, sym: &'static str) -> bool {
        if matches!(self.peek(), Some(Token { tok: Tok::Sym(s), .. }) if *s == sym) {
            self.pos += 1;
            true
        } else {
            false
        }
    }

    fn expect_ident(&mut self) -> Result<Token, QasmError> {
        match self.peek() {
            Some(Token { tok: Tok::Ident(_), .. }) => Ok(self.next().unwrap()),
            _ => self.syntax("expected identifier"),
        }
    }

    fn expect_index(&mut self) -> Result<usize, QasmError> {
        match self.peek() {
            Some(Token { tok: Tok::Num(v), .. }) if v.fract() == 0.0 && *v >= 0.0 => {
                let v = *v as usize;
                self.pos += 1;
                Ok(v)
            }
            _ => self.syntax("expected non-negative integer"),
        }
    }

    // expr := term (('+'|'-') term)*
    fn expr(&mut self) -> Result<f64, QasmError> {
        let mut v = self.term()?;
        loop {
            if self.eat_sym("+") {
                v += self.term()?;
            } else if self.eat_sym("-") {
                v -= self.term()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn term(&mut self) -> Result<f64, QasmError> {
        let mut v = self.factor()?;
        loop {
            if self.eat_sym("*") {
                v *= self.factor()?;
            } else if self.eat_sym("/") {
                v /= self.factor()?;
            } else {
                return Ok(v);
            }
        }
    }

    fn factor(&mut self) -> Result<f64, QasmError> {
        let base = self.unary()?;
        if self.eat_sym("^") {
            let exp = self.factor()?;
            return Ok(base.powf(exp));
        }
        Ok(base)
    }

    fn unary(&mut self) -> Result<f64, QasmError> {
        if self.eat_sym("-") {
            return Ok(-self.unary()?);
        }
        if self.eat_sym("+") {
            return self.unary();
        }
        if self.eat_sym("(") {
            let v = self.expr()?;
            self.expect_sym(")")?;
            return Ok(v);
        }
        match self.peek().map(|t| t.tok.clone()) {
            Some(Tok::Num(v)) => {
                self.pos += 1;
                Ok(v)
            }
            Some(Tok::Ident(name)) if name == "pi" => {
                self.pos += 1;
                Ok(std::f64::consts::PI)
            }
            _ => self.syntax("expected angle expression"),
        }
    }

    fn operand(&mut self, quantum: bool) -> Result<Operand, QasmError> {
        let name_tok = self.expect_ident()?;
        let Tok::Ident(name) = &name_tok.tok else {
            unreachable!()
        };
        let reg = if quantum { &self.qreg } else { &self.creg };
        let kind = if quantum { "quantum" } else { "classical" };
        let Some(reg) = reg else {
            return Err(QasmError::Register {
                line: name_tok.line,
                col: name_tok.col,
                msg: format!("no {kind} register declared"),
            });
        };
        if &reg.name != name {
            return Err(QasmError::Register {
                line: name_tok.line,
                col: name_tok.col,
                msg: format!("unknown {kind} register `{name}`"),
            });
        }
        let size = reg.size;
        if self.eat_sym("[") {
            let (line, col) = self.here();
            let idx = self.expect_index()?;
            self.expect_sym("]")?;
            if idx >= size {
                return Err(QasmError::Register {
                    line,
                    col,
                    msg: format!("index {idx} out of bounds for `{name}[{size}]`"),
                });
            }
            Ok(Operand::Bit(idx))
        } else {
            Ok(Operand::Whole)
        }
    }

    fn declare(&mut self, quantum: bool, at: &Token) -> Result<(), QasmError> {
        let name_tok = self.expect_ident()?;
        let Tok::Ident(name) = name_tok.tok else { unreachable!() };
        self.expect_sym("[")?;
        let size = self.expect_index()?;
        self.expect_sym("]")?;
        self.expect_sym(";")?;
        let slot = if quantum { &mut self.qreg } else { &mut self.creg };
        if slot.is_some() {
            return Err(QasmError::Register {
                line: at.line,
                col: at.col,
                msg: format!(
                    "only one {} register is supported",
                    if quantum { "quantum" } else { "classical" }
                ),
            });
        }
        *slot = Some(Register { name, size });
        Ok(())
    }

    fn statement(&mut self, circuit: &mut Vec<Gate>) -> Result<(), QasmError> {
        let head = self.expect_ident()?;
        let Tok::Ident(word) = head.tok.clone() else {
            unreachable!()
        };
        match word.as_str() {
            "OPENQASM" => {
                match self.next() {
                    Some(Token { tok: Tok::Num(_), .. }) => {}
                    _ => return self.syntax("expected version number"),
                }
                self.expect_sym(";")
            }
            "include" => {
                match self.next() {
                    Some(Token { tok: Tok::Str, .. }) => {}
                    _ => return self.syntax("expected file name"),
                }
                self.expect_sym(";")
            }
            "qreg" => self.declare(true, &head),
            "creg" => self.declare(false, &head),
            "measure" => {
                let q = self.operand(true)?;
                self.expect_sym("->")?;
                let c = self.operand(false)?;
                self.expect_sym(";")?;
                let qsize = self.qreg.as_ref().map_or(0, |r| r.size);
                let csize = self.creg.as_ref().map_or(0, |r| r.size);
                match (q, c) {
                    (Operand::Bit(q), Operand::Bit(c)) => circuit.push(Gate::measure(q, c)),
                    (Operand::Whole, Operand::Whole) if qsize == csize => {
                        circuit.extend((0..qsize).map(|i| Gate::measure(i, i)))
                    }
                    _ => {
                        return Err(QasmError::Register {
                            line: head.line,
                            col: head.col,
                            msg: "measure operands must both be bits or equal-size registers".into(),
                        })
                    }
                }
                Ok(())
            }
            "barrier" => {
                let mut qubits = Vec::new();
                loop {
                    match self.operand(true)? {
                        Operand::Bit(q) => qubits.push(q),
                        Operand::Whole => qubits.extend(0..self.qreg.as_ref().map_or(0, |r| r.size)),
                    }
                    if !self.eat_sym(",") {
                        break;
                    }
                }
                self.expect_sym(";")?;
                qubits.dedup();
                if !qubits.is_empty() {
                    circuit.push(Gate::barrier(qubits));
                }
                Ok(())
            }
            name => {
                let n_params = match name {
                    "x" | "sx" | "h" | "cx" | "ccx" | "swap" => 0,
                    "rz" | "rx" | "rzz" => 1,
                    "u1q" => 2,
                    _ => {
                        return Err(QasmError::UnsupportedGate {
                            name: name.to_string(),
                            line: head.line,
                            col: head.col,
                        })
                    }
                };
                let mut params = Vec::new();
                if self.eat_sym("(") {
                    loop {
                        params.push(self.expr()?);
                        if !self.eat_sym(",") {
                            break;
                        }
                    }
                    self.expect_sym(")")?;
                }
                if params.len() != n_params {
                    return Err(QasmError::Syntax {
                        line: head.line,
                        col: head.col,
                        msg: format!("`{name}` takes {n_params} parameter(s), got {}", params.len()),
                    });
                }
                let kind = match name {
                    "x" => GateKind::X,
                    "sx" => GateKind::SX,
                    "h" => GateKind::H,
                    "rz" => GateKind::Rz(params[0]),
                    "rx" => GateKind::Rx(params[0]),
                    "u1q" => GateKind::U1q {
                        theta: params[0],
                        phi: params[1],
                    },
                    "cx" => GateKind::CX,
                    "rzz" => GateKind::ZZ(params[0]),
                    "ccx" => GateKind::CCX,
                    "swap" => GateKind::Swap,
                    _ => unreachable!(),
                };
                let arity = kind.arity().unwrap();
                let mut ops = Vec::new();
                loop {
                    ops.push(self.operand(true)?);
                    if !self.eat_sym(",") {
                        break;
                    }
                }
                self.expect_sym(";")?;
                if ops.len() != arity {
                    return Err(QasmError::Syntax {
                        line: head.line,
                        col: head.col,
                        msg: format!("`{name}` takes {arity} qubit argument(s), got {}", ops.len()),
                    });
                }
                if arity == 1 {
                    match ops[0] {
                        Operand::Bit(q) => circuit.push(Gate::new(kind, [q])),
                        Operand::Whole => {
                            let n = self.qreg.as_ref().map_or(0, |r| r.size);
                            circuit.extend((0..n).map(|q| Gate::new(kind, [q])));
                        }
                    }
                } else {
                    let mut qubits = Vec::with_capacity(arity);
                    for op in ops {
                        match op {
                            Operand::Bit(q) => qubits.push(q),
                            Operand::Whole => {
                                return Err(QasmError::Syntax {
                                    line: head.line,
                                    col: head.col,
                                    msg: format!("`{name}` needs explicit qubit indices"),
                                })
                            }
                        }
                    }
                    for i in 1..qubits.len() {
                        if qubits[..i].contains(&qubits[i]) {
                            return Err(QasmError::Syntax {
                                line: head.line,
                                col: head.col,
                                msg: format!("`{name}` repeats qubit {}", qubits[i]),
                            });
                        }
                    }
                    circuit.push(Gate::new(kind, qubits));
                }
                Ok(())
            }
        }
    }
}

/// Parses QASM source. The returned circuit is named `"main"`; callers
/// rename it as needed.
pub fn parse_qasm(text: &str) -> Result<QuantumCircuit, QasmError> {
    let toks = lex(text)?;
    let last_line = text.lines().count().max(1);
    let mut p = Parser {
        toks,
        pos: 0,
        end: (last_line, text.lines().last().map_or(1, |l| l.len() + 1)),
        qreg: None,
        creg: None,
    };
    let mut gates = Vec::new();
    while p.peek().is_some() {
        if p.qreg.is_none() {
            if let Some(Token {
                tok: Tok::Ident(w),
                line,
                col,
            }) = p.peek()
            {
                let allowed = matches!(w.as_str(), "OPENQASM" | "include" | "qreg" | "creg");
                if !allowed {
                    return Err(QasmError::Register {
                        line: *line,
                        col: *col,
                        msg: "gate used before the quantum register is declared".into(),
                    });
                }
            }
        }
        p.statement(&mut gates)?;
    }
    let Some(qreg) = p.qreg else {
        let (line, col) = p.end;
        return Err(QasmError::Register {
            line,
            col,
            msg: "no quantum register declared".into(),
        });
    };
    let circuit = QuantumCircuit {
        name: "main".into(),
        n_qubits: qreg.size,
        n_cbits: p.creg.map_or(0, |r| r.size),
        gates,
    };
    circuit.validate().map_err(|e| QasmError::Register {
        line: 0,
        col: 0,
        msg: e.to_string(),
    })?;
    Ok(circuit)
}

/// Writes the circuit as QASM. Angles use Rust's shortest round-trip float
/// formatting so `parse_qasm(emit_qasm(c))` reproduces every angle exactly.
pub fn emit_qasm(circuit: &QuantumCircuit) -> String {
    let mut s = String::new();
    s.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    let _ = writeln!(s, "qreg q[{}];", circuit.n_qubits);
    if circuit.n_cbits > 0 {
        let _ = writeln!(s, "creg c[{}];", circuit.n_cbits);
    }
    for g in &circuit.gates {
        let qs = g.qubits.iter().map(|q| format!("q[{q}]")).collect::<Vec<_>>().join(",");
        let _ = match g.kind {
            GateKind::Measure { cbit } => writeln!(s, "measure {qs} -> c[{cbit}];"),
            GateKind::Rz(t) | GateKind::Rx(t) | GateKind::ZZ(t) => {
                writeln!(s, "{}({:?}) {qs};", g.kind.name(), t)
            }
            GateKind::U1q { theta, phi } => writeln!(s, "u1q({theta:?},{phi:?}) {qs};"),
            _ => writeln!(s, "{} {qs};", g.kind.name()),
        };
    }
    s
}

#[cfg(test)]
mod tests {
    use super::*;
    use std::f64::consts::PI;

    #[test]
    fn empty_body() {
        let c = parse_qasm("OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\n").unwrap();
        assert_eq!(c.n_qubits, 2);
        assert!(c.gates.is_empty());
    }

    #[test]
    fn unsupported_gate_is_named() {
        let err = parse_qasm("qreg q[2];\ncz q[0],q[1];").unwrap_err();
        assert_eq!(
            err,
            QasmError::UnsupportedGate {
                name: "cz".into(),
                line: 2,
                col: 1
            }
        );
    }

    #[test]
    fn syntax_error_has_position() {
        let err = parse_qasm("qreg q[2];\nx q[0]\nh q[1];").unwrap_err();
        match err {
            QasmError::Syntax { line, col, .. } => assert_eq!((line, col), (3, 1)),
            other => panic!("unexpected {other:?}"),
        }
    }

    #[test]
    fn register_bounds() {
        let err = parse_qasm("qreg q[2];\nx q[2];").unwrap_err();
        assert!(matches!(err, QasmError::Register { line: 2, .. }));
        let err = parse_qasm("qreg q[2];\nqreg r[2];").unwrap_err();
        assert!(matches!(err, QasmError::Register { .. }));
        let err = parse_qasm("qreg q[1];creg c[1];\nmeasure q[0] -> c[1];").unwrap_err();
        assert!(matches!(err, QasmError::Register { .. }));
    }

    #[test]
    fn angle_expressions() {
        let c = parse_qasm("qreg q[1];\nrz(pi/4) q[0];\nrx(-2*pi) q[0];\nrz(1.5e-3) q[0];").unwrap();
        assert_eq!(c.gates[0].kind, GateKind::Rz(PI / 4.0));
        assert_eq!(c.gates[1].kind, GateKind::Rx(-2.0 * PI));
        assert_eq!(c.gates[2].kind, GateKind::Rz(1.5e-3));
    }

    #[test]
    fn broadcast_and_comments() {
        let src = "// header\nqreg q[3]; creg c[3];\nh q; // all\nmeasure q -> c;\n";
        let c = parse_qasm(src).unwrap();
        assert_eq!(c.gates.len(), 6);
        assert_eq!(c.measurements(), vec![(0, 0), (1, 1), (2, 2)]);
    }

    #[test]
    fn emit_minimal() {
        let c = QuantumCircuit::new("m", 1, 0);
        assert_eq!(emit_qasm(&c), "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[1];\n");
    }

    #[test]
    fn angle_round_trip_is_exact() {
        let mut c = QuantumCircuit::new("a", 2, 0);
        c.push(Gate::rz(PI / 4.0, 0))
            .push(Gate::u1q(0.1, -2.0 / 3.0, 1))
            .push(Gate::zz(1e-12, 0, 1));
        let text = emit_qasm(&c);
        assert!(text.contains("rz(0.7853981633974483)"));
        let back = parse_qasm(&text).unwrap();
        assert_eq!(back.gates, c.gates);
    }
}
