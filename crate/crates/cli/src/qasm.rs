//! OpenQASM 2.0 text for compiled circuits, and a parser for exactly the
//! subset the exporter writes.
//!
//! Register layout and stage labels travel as structured comments
//! (`// register <name> <qubits...>`, `// stage <label>`) so that a parsed
//! circuit compares equal to the one that was exported.

use std::fmt::Write as _;

use qmlp::{Circuit, Gate, Stage};
use thiserror::Error;

pub const QREG: &str = "q";
pub const CREG: &str = "c";

#[derive(Debug, Clone, PartialEq, Eq, Error)]
pub enum QasmError {
    #[error("circuit starts from a direct amplitude init; compile with synthesized prep to export")]
    DirectInit,
    #[error("missing version header")]
    MissingHeader,
    #[error("line {line}, column {col}: {message}")]
    Syntax { line: usize, col: usize, message: String },
    #[error("line {line}, column {col}: unknown gate `{name}`")]
    UnknownGate { line: usize, col: usize, name: String },
    #[error("line {line}, column {col}: qubit index {index} out of range for {size} qubits")]
    IndexOutOfRange { line: usize, col: usize, index: usize, size: usize },
}

/// Renders `circuit` as QASM. Output bytes depend only on the circuit.
pub fn export_qasm(circuit: &Circuit) -> Result<String, QasmError> {
    if circuit.init().is_some() {
        return Err(QasmError::DirectInit);
    }
    let mut out = String::new();
    out.push_str("OPENQASM 2.0;\ninclude \"qelib1.inc\";\n");
    writeln!(out, "qreg {QREG}[{}];", circuit.qubit_count()).unwrap();
    for reg in circuit.registers() {
        let qubits: Vec<String> = reg.qubits.iter().map(usize::to_string).collect();
        writeln!(out, "// register {} {}", reg.name, qubits.join(" ")).unwrap();
    }
    let mut stage = None;
    for ins in circuit.instructions() {
        if stage != Some(ins.stage) {
            writeln!(out, "// stage {}", ins.stage).unwrap();
            stage = Some(ins.stage);
        }
        writeln!(out, "{}", gate_statement(&ins.gate)).unwrap();
    }
    if !circuit.measured().is_empty() {
        writeln!(out, "creg {CREG}[{}];", circuit.measured().len()).unwrap();
        for (bit, q) in circuit.measured().iter().enumerate() {
            writeln!(out, "measure {QREG}[{q}] -> {CREG}[{bit}];").unwrap();
        }
    }
    Ok(out)
}

fn gate_statement(gate: &Gate) -> String {
    let args: Vec<String> = gate.qubits().iter().map(|q| format!("{QREG}[{q}]")).collect();
    match gate {
        // Display prints the shortest decimal that parses back to the same f64
        Gate::Ry { theta, .. } => format!("ry({theta}) {};", args.join(",")),
        _ => format!("{} {};", gate.name(), args.join(",")),
    }
}

/// Character cursor over one line, tracking 1-based columns.
struct Cursor<'a> {
    text: &'a str,
    pos: usize,
    line: usize,
}

impl<'a> Cursor<'a> {
    fn new(text: &'a str, line: usize) -> Self {
        Cursor { text, pos: 0, line }
    }

    fn col(&self) -> usize {
        self.text[..self.pos].chars().count() + 1
    }

    fn err(&self, message: impl Into<String>) -> QasmError {
        QasmError::Syntax { line: self.line, col: self.col(), message: message.into() }
    }

    fn rest(&self) -> &'a str {
        &self.text[self.pos..]
    }

    fn skip_ws(&mut self) {
        let rest = self.rest();
        self.pos += rest.len() - rest.trim_start().len();
    }

    fn eat(&mut self, token: &str) -> bool {
        self.skip_ws();
        if self.rest().starts_with(token) {
            self.pos += token.len();
            true
        } else {
            false
        }
    }

    fn expect(&mut self, token: &str) -> Result<(), QasmError> {
        if self.eat(token) {
            Ok(())
        } else {
            Err(self.err(format!("expected `{token}`")))
        }
    }

    fn take_while(&mut self, pred: impl Fn(char) -> bool) -> &'a str {
        self.skip_ws();
        let rest = self.rest();
        let len = rest.find(|c: char| !pred(c)).unwrap_or(rest.len());
        self.pos += len;
        &rest[..len]
    }

    fn ident(&mut self) -> Result<&'a str, QasmError> {
        self.skip_ws();
        let start = self.col();
        let id = self.take_while(|c| c.is_ascii_alphanumeric() || c == '_');
        if id.is_empty() || !id.starts_with(|c: char| c.is_ascii_alphabetic()) {
            return Err(QasmError::Syntax { line: self.line, col: start, message: "expected identifier".into() });
        }
        Ok(id)
    }

    fn integer(&mut self) -> Result<usize, QasmError> {
        self.skip_ws();
        let col = self.col();
        let digits = self.take_while(|c| c.is_ascii_digit());
        digits
            .parse()
            .map_err(|_| QasmError::Syntax { line: self.line, col, message: "expected integer".into() })
    }

    fn real(&mut self) -> Result<f64, QasmError> {
        self.skip_ws();
        let col = self.col();
        let text = self.take_while(|c| c.is_ascii_digit() || matches!(c, '.' | '-' | '+' | 'e' | 'E'));
        text.parse::<f64>()
            .ok()
            .filter(|v| v.is_finite())
            .ok_or(QasmError::Syntax { line: self.line, col, message: format!("bad number `{text}`") })
    }

    /// `name[index]` with the register name checked.
    fn indexed(&mut self, name: &str, size: usize) -> Result<usize, QasmError> {
        self.skip_ws();
        let col = self.col();
        let got = self.ident()?;
        if got != name {
            return Err(QasmError::Syntax { line: self.line, col, message: format!("unknown register `{got}`") });
        }
        self.expect("[")?;
        self.skip_ws();
        let index_col = self.col();
        let index = self.integer()?;
        self.expect("]")?;
        if index >= size {
            return Err(QasmError::IndexOutOfRange { line: self.line, col: index_col, index, size });
        }
        Ok(index)
    }

    fn end(&mut self) -> Result<(), QasmError> {
        self.expect(";")?;
        self.skip_ws();
        if self.rest().is_empty() || self.rest().starts_with("//") {
            Ok(())
        } else {
            Err(self.err("unexpected text after `;`"))
        }
    }
}

/// Parses exporter output back into a [`Circuit`].
pub fn parse_qasm(text: &str) -> Result<Circuit, QasmError> {
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l))
        .filter(|(_, l)| !l.trim().is_empty());

    let (line, header) = lines.next().ok_or(QasmError::MissingHeader)?;
    let mut cur = Cursor::new(header, line);
    if !cur.eat("OPENQASM") {
        return Err(QasmError::MissingHeader);
    }
    cur.skip_ws();
    let version = cur.take_while(|c| c.is_ascii_digit() || c == '.');
    if version != "2.0" {
        return Err(cur.err(format!("unsupported version `{version}`")));
    }
    cur.end()?;

    let mut circuit: Option<Circuit> = None;
    let mut creg_size: Option<usize> = None;
    let mut measured = Vec::new();
    let mut stage = Stage::Unlabeled;

    for (line, text) in lines {
        let mut cur = Cursor::new(text, line);
        if cur.eat("//") {
            let comment = cur.rest().trim();
            if let Some(label) = comment.strip_prefix("stage ") {
                stage = label.parse().map_err(|m: String| cur.err(m))?;
            } else if let Some(rest) = comment.strip_prefix("register ") {
                let c = circuit.as_mut().ok_or_else(|| cur.err("register comment before qreg"))?;
                let mut parts = rest.split_whitespace();
                let name = parts.next().ok_or_else(|| cur.err("register comment needs a name"))?;
                let qubits = parts
                    .map(|p| p.parse::<usize>().map_err(|_| cur.err(format!("bad qubit `{p}`"))))
                    .collect::<Result<Vec<_>, _>>()?;
                c.add_register(name, qubits).map_err(|e| cur.err(e.to_string()))?;
            }
            continue;
        }
        let start = cur.col();
        let keyword = cur.ident()?;
        match keyword {
            "include" => {
                cur.expect("\"qelib1.inc\"")?;
                cur.end()?;
            }
            "qreg" => {
                if circuit.is_some() {
                    return Err(QasmError::Syntax { line, col: start, message: "second qreg".into() });
                }
                let name = cur.ident()?;
                if name != QREG {
                    return Err(cur.err(format!("quantum register must be named `{QREG}`")));
                }
                cur.expect("[")?;
                let size = cur.integer()?;
                cur.expect("]")?;
                cur.end()?;
                circuit = Some(Circuit::new(size).map_err(|e| cur.err(e.to_string()))?);
            }
            "creg" => {
                let name = cur.ident()?;
                if name != CREG {
                    return Err(cur.err(format!("classical register must be named `{CREG}`")));
                }
                cur.expect("[")?;
                creg_size = Some(cur.integer()?);
                cur.expect("]")?;
                cur.end()?;
            }
            "measure" => {
                let c = circuit.as_ref().ok_or_else(|| cur.err("measure before qreg"))?;
                let size = creg_size.ok_or_else(|| cur.err("measure before creg"))?;
                let q = cur.indexed(QREG, c.qubit_count())?;
                cur.expect("->")?;
                let bit = cur.indexed(CREG, size)?;
                if bit != measured.len() {
                    return Err(cur.err(format!("expected classical bit {}", measured.len())));
                }
                cur.end()?;
                measured.push(q);
            }
            name => {
                let c = circuit
                    .as_mut()
                    .ok_or(QasmError::Syntax { line, col: start, message: "gate before qreg".into() })?;
                let gate = parse_gate(&mut cur, name, start, c.qubit_count())?;
                cur.end()?;
                c.push(gate, stage).map_err(|e| QasmError::Syntax { line, col: start, message: e.to_string() })?;
            }
        }
    }
    let mut circuit = circuit.ok_or(QasmError::Syntax { line: 0, col: 0, message: "missing qreg".into() })?;
    if creg_size.is_some_and(|n| n != measured.len()) {
        return Err(QasmError::Syntax { line: 0, col: 0, message: "not every classical bit is measured".into() });
    }
    circuit.set_measured(measured).expect("indices checked while parsing");
    Ok(circuit)
}

fn parse_gate(cur: &mut Cursor<'_>, name: &str, col: usize, size: usize) -> Result<Gate, QasmError> {
    let arity = match name {
        "x" | "h" | "z" | "ry" => 1,
        "cx" | "cz" => 2,
        "ccx" => 3,
        _ => return Err(QasmError::UnknownGate { line: cur.line, col, name: name.to_string() }),
    };
    let theta = if name == "ry" {
        cur.expect("(")?;
        let t = cur.real()?;
        cur.expect(")")?;
        Some(t)
    } else {
        None
    };
    let mut q = Vec::with_capacity(arity);
    for i in 0..arity {
        if i > 0 {
            cur.expect(",")?;
        }
        q.push(cur.indexed(QREG, size)?);
    }
    Ok(match name {
        "x" => Gate::X(q[0]),
        "h" => Gate::H(q[0]),
        "z" => Gate::Z(q[0]),
        "ry" => Gate::Ry { target: q[0], theta: theta.unwrap() },
        "cx" => Gate::Cx { control: q[0], target: q[1] },
        "cz" => Gate::Cz(q[0], q[1]),
        _ => Gate::Ccx { c0: q[0], c1: q[1], target: q[2] },
    })
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn empty_circuit_is_header_only() {
        let c = Circuit::new(2).unwrap();
        assert_eq!(export_qasm(&c).unwrap(), "OPENQASM 2.0;\ninclude \"qelib1.inc\";\nqreg q[2];\n");
    }

    #[test]
    fn single_hadamard() {
        let mut c = Circuit::new(2).unwrap();
        c.push(Gate::H(0), Stage::Unlabeled).unwrap();
        let text = export_qasm(&c).unwrap();
        assert!(text.ends_with("// stage unlabeled\nh q[0];\n"), "{text}");
        assert_eq!(parse_qasm(&text).unwrap(), c);
    }

    #[test]
    fn angles_round_trip_exactly() {
        let mut c = Circuit::new(3).unwrap();
        for theta in [1e-9, -2.5, std::f64::consts::PI / 3.0, 1234.5678e10, 0.0] {
            c.push(Gate::Ry { target: 1, theta }, Stage::Prep(0)).unwrap();
        }
        c.push(Gate::Ccx { c0: 2, c1: 0, target: 1 }, Stage::Sign(1)).unwrap();
        c.push(Gate::Cz(2, 0), Stage::Sign(1)).unwrap();
        c.add_register("stuff", vec![0, 2]).unwrap();
        c.set_measured(vec![2, 0]).unwrap();
        assert_eq!(parse_qasm(&export_qasm(&c).unwrap()).unwrap(), c);
    }

    #[test]
    fn direct_init_cannot_be_exported() {
        let x = qmlp::EncodedInput::uniform();
        let c = qmlp::compile_network(&x, &qmlp::QnnModel::all_plus(), qmlp::PrepMode::Direct).unwrap();
        assert_eq!(export_qasm(&c), Err(QasmError::DirectInit));
    }

    #[test]
    fn parse_errors() {
        assert_eq!(parse_qasm(""), Err(QasmError::MissingHeader));
        assert_eq!(parse_qasm("qreg q[2];"), Err(QasmError::MissingHeader));

        let err = parse_qasm("OPENQASM 2.0;\nqreg q[2];\nswap q[0],q[1];\n").unwrap_err();
        assert_eq!(err, QasmError::UnknownGate { line: 3, col: 1, name: "swap".into() });
        assert!(err.to_string().contains("swap") && err.to_string().contains("line 3"));

        let err = parse_qasm("OPENQASM 2.0;\nqreg q[2];\nx q[2];\n").unwrap_err();
        assert_eq!(err, QasmError::IndexOutOfRange { line: 3, col: 5, index: 2, size: 2 });

        let err = parse_qasm("OPENQASM 2.0;\nqreg q[2];\nx q[0]\n").unwrap_err();
        assert!(matches!(err, QasmError::Syntax { line: 3, .. }));

        let err = parse_qasm("OPENQASM 2.0;\nqreg q[2];\ncx q[0],q[0];\n").unwrap_err();
        assert!(matches!(err, QasmError::Syntax { line: 3, col: 1, .. }));

        let err = parse_qasm("OPENQASM 3.0;\n").unwrap_err();
        assert!(matches!(err, QasmError::Syntax { line: 1, .. }));
    }
}
