//! Line-oriented circuit text format.

use num_complex::Complex64;

use super::{Circuit, Gate, GateKind, Step};
use crate::error::{Error, Result};
use crate::qstate::CMatrix;

/// Grammar accepted by [`parse_circuit`].
pub const PARSER_GRAMMAR: &str = r#"
file      := line*
line      := ws* (directive | step)? ws* ('#' comment)? newline
directive := "qubits" INT | "bits" INT
step      := gate cond? | measure
gate      := NAME qubit+ (":" FLOAT FLOAT ...)?
NAME      := H | X | Y | Z | S | SDG | CNOT | CX | SWAP | U      (case-insensitive)
measure   := "M" qubit+ "->" cbit+                              (same count on both sides)
cond      := "if" "!"? cbit                                     (apply when bit is 1, or 0 with "!")
cbit      := "c" INT
"#;

fn err(line: usize, message: impl Into<String>) -> Error {
    Error::Parse { line, message: message.into() }
}

fn parse_usize(tok: &str, line: usize, what: &str) -> Result<usize> {
    tok.parse().map_err(|_| err(line, format!("expected {what}, found {tok:?}")))
}

fn parse_cbit(tok: &str, line: usize) -> Result<usize> {
    let rest =
        tok.strip_prefix('c').ok_or_else(|| err(line, format!("expected classical bit like c0, found {tok:?}")))?;
    parse_usize(rest, line, "classical bit index")
}

fn parse_gate(name: &str, tokens: &[&str], line: usize) -> Result<Gate> {
    let (qubit_toks, matrix_toks) = match tokens.iter().position(|t| *t == ":") {
        Some(p) => (&tokens[..p], Some(&tokens[p + 1..])),
        None => (tokens, None),
    };
    let targets = qubit_toks.iter().map(|t| parse_usize(t, line, "qubit index")).collect::<Result<Vec<_>>>()?;
    let kind = match name.to_ascii_uppercase().as_str() {
        "H" => GateKind::H,
        "X" => GateKind::X,
        "Y" => GateKind::Y,
        "Z" => GateKind::Z,
        "S" => GateKind::S,
        "SDG" => GateKind::Sdg,
        "CNOT" | "CX" => GateKind::Cnot,
        "SWAP" => GateKind::Swap,
        "U" => {
            let toks = matrix_toks.ok_or_else(|| err(line, "custom gate U needs ': re im ...' entries"))?;
            let nums = toks
                .iter()
                .map(|t| t.parse::<f64>().map_err(|_| err(line, format!("bad number {t:?}"))))
                .collect::<Result<Vec<_>>>()?;
            let dim = 1usize << targets.len();
            if nums.len() != 2 * dim * dim {
                return Err(err(
                    line,
                    format!(
                        "custom gate on {} qubit(s) needs {} numbers, got {}",
                        targets.len(),
                        2 * dim * dim,
                        nums.len()
                    ),
                ));
            }
            let entries = nums.chunks(2).map(|p| Complex64::new(p[0], p[1])).collect();
            GateKind::Custom(CMatrix::from_rows(entries).map_err(|e| err(line, e.to_string()))?)
        }
        other => return Err(err(line, format!("unknown gate {other:?}"))),
    };
    if matrix_toks.is_some() && !matches!(kind, GateKind::Custom(_)) {
        return Err(err(line, "only U takes matrix entries"));
    }
    Gate::new(kind, targets).map_err(|e| err(line, e.to_string()))
}

/// Parses the text format described by [`PARSER_GRAMMAR`]. Without a
/// `qubits` directive the register size is the largest index plus one.
pub fn parse_circuit(src: &str) -> Result<Circuit> {
    let mut declared_qubits: Option<usize> = None;
    let mut declared_bits = 0;
    let mut steps: Vec<(usize, Step)> = Vec::new();
    for (i, raw) in src.lines().enumerate() {
        let line = i + 1;
        let content = raw.split('#').next().unwrap_or("").trim();
        if content.is_empty() {
            continue;
        }
        let tokens: Vec<&str> = content.split_whitespace().collect();
        let head = tokens[0];
        match head.to_ascii_lowercase().as_str() {
            "qubits" | "bits" => {
                if tokens.len() != 2 {
                    return Err(err(line, format!("{head} takes one integer")));
                }
                let n = parse_usize(tokens[1], line, "integer")?;
                if head.eq_ignore_ascii_case("qubits") {
                    declared_qubits = Some(n);
                } else {
                    declared_bits = n;
                }
            }
            "m" => {
                let arrow =
                    tokens.iter().position(|t| *t == "->").ok_or_else(|| err(line, "measurement needs '->'"))?;
                let qubits =
                    tokens[1..arrow].iter().map(|t| parse_usize(t, line, "qubit index")).collect::<Result<Vec<_>>>()?;
                let bits = tokens[arrow + 1..].iter().map(|t| parse_cbit(t, line)).collect::<Result<Vec<_>>>()?;
                if qubits.is_empty() || qubits.len() != bits.len() {
                    return Err(err(line, "measurement needs matching nonempty qubit and bit lists"));
                }
                steps.push((line, Step::Measure { qubits, bits }));
            }
            _ => {
                let (gate_toks, cond) = match tokens.iter().position(|t| t.eq_ignore_ascii_case("if")) {
                    Some(p) => {
                        if tokens.len() != p + 2 {
                            return Err(err(line, "condition must be 'if cN' or 'if !cN'"));
                        }
                        let c = tokens[p + 1];
                        let (value, bit_tok) = match c.strip_prefix('!') {
                            Some(rest) => (false, rest),
                            None => (true, c),
                        };
                        (&tokens[1..p], Some((parse_cbit(bit_tok, line)?, value)))
                    }
                    None => (&tokens[1..], None),
                };
                let gate = parse_gate(head, gate_toks, line)?;
                let step = match cond {
                    Some((bit, value)) => Step::Conditional { gate, bit, value },
                    None => Step::Gate(gate),
                };
                steps.push((line, step));
            }
        }
    }

    let max_q = steps.iter().flat_map(|(_, s)| s.qubits().iter().copied()).max();
    let num_qubits = match (declared_qubits, max_q) {
        (Some(n), _) => n,
        (None, Some(m)) => m + 1,
        (None, None) => return Err(err(1, "empty circuit and no qubits directive")),
    };
    let mut c = Circuit::new(num_qubits).with_bits(declared_bits);
    for (line, step) in steps {
        if let Some(&q) = step.qubits().iter().find(|&&q| q >= num_qubits) {
            return Err(err(line, format!("qubit {q} out of range for {num_qubits} qubits")));
        }
        c.push(step);
        c.validate().map_err(|e| err(line, e.to_string()))?;
    }
    Ok(c)
}
