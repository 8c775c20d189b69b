//! Parser for the line-oriented `.qmm` machine description format.

use super::{GateExpr, MachineSpec, StateExpr};
use crate::linalg::{Complex, ComplexMatrix};
use std::fmt;

/// Parse failure at a 1-based line and column.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct ParseError {
    pub line: usize,
    pub column: usize,
    pub message: String,
}

impl ParseError {
    fn new(line: usize, column: usize, message: impl Into<String>) -> Self {
        ParseError {
            line,
            column,
            message: message.into(),
        }
    }
}

impl fmt::Display for ParseError {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "line {}, column {}: {}", self.line, self.column, self.message)
    }
}

impl std::error::Error for ParseError {}

/// One whitespace-separated token with its 1-based start column.
#[derive(Clone, Copy)]
struct Token<'a> {
    column: usize,
    text: &'a str,
}

fn tokenize(line: &str) -> Vec<Token<'_>> {
    let content = match line.find('#') {
        Some(pos) => &line[..pos],
        None => line,
    };
    let mut tokens = Vec::new();
    let mut start = None;
    for (i, ch) in content.char_indices() {
        if ch.is_whitespace() {
            if let Some(s) = start.take() {
                tokens.push(Token {
                    column: s + 1,
                    text: &content[s..i],
                });
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        tokens.push(Token {
            column: s + 1,
            text: &content[s..],
        });
    }
    tokens
}

/// Parses `.qmm` text into a [`MachineSpec`].
///
/// The format is line oriented: a `qubits N` line first, then `gates` /
/// `measure` / `states` sections in any order, `#` comments anywhere.
/// Errors carry the offending line and column.
pub fn parse_machine_spec(text: &str) -> Result<MachineSpec, ParseError> {
    let lines: Vec<&str> = text.lines().collect();
    let eof_line = lines.len().max(1);

    let mut spec: Option<MachineSpec> = None;
    let mut saw_gates = false;
    let mut saw_measure = false;
    let mut saw_states = false;

    let mut i = 0usize;
    while i < lines.len() {
        let line_no = i + 1;
        let tokens = tokenize(lines[i]);
        i += 1;
        let Some(head) = tokens.first().copied() else {
            continue;
        };
        match head.text {
            "qubits" => {
                if spec.is_some() {
                    return Err(ParseError::new(line_no, head.column, "duplicate qubits line"));
                }
                let count_tok = tokens.get(1).ok_or_else(|| {
                    ParseError::new(line_no, head.column, "qubits needs a count")
                })?;
                let count: usize = count_tok.text.parse().map_err(|_| {
                    ParseError::new(
                        line_no,
                        count_tok.column,
                        format!("invalid qubit count {:?}", count_tok.text),
                    )
                })?;
                if count == 0 {
                    return Err(ParseError::new(line_no, count_tok.column, "qubit count must be positive"));
                }
                expect_no_extra(&tokens, 2, line_no)?;
                spec = Some(MachineSpec::new(count));
            }
            "gates" => {
                let spec = expect_spec(&mut spec, line_no, head.column)?;
                if saw_gates {
                    return Err(ParseError::new(line_no, head.column, "duplicate gates section"));
                }
                saw_gates = true;
                expect_no_extra(&tokens, 1, line_no)?;
                let mut any = false;
                loop {
                    let Some(raw) = lines.get(i) else {
                        return Err(ParseError::new(eof_line, 1, "gates section not closed with end"));
                    };
                    let line_no = i + 1;
                    let tokens = tokenize(raw);
                    i += 1;
                    let Some(first) = tokens.first().copied() else {
                        continue;
                    };
                    if first.text == "end" && tokens.len() == 1 {
                        if !any {
                            return Err(ParseError::new(
                                line_no,
                                first.column,
                                "no input symbols: the gate section is empty",
                            ));
                        }
                        break;
                    }
                    let (name, expr) = parse_gate_binding(raw, &tokens, line_no, spec.qubit_count())?;
                    if spec.gate_names().contains(&name) {
                        return Err(ParseError::new(
                            line_no,
                            first.column,
                            format!("duplicate gate name {name:?}"),
                        ));
                    }
                    spec.add_gate(name, expr);
                    any = true;
                }
            }
            "measure" => {
                let spec = expect_spec(&mut spec, line_no, head.column)?;
                if saw_measure {
                    return Err(ParseError::new(line_no, head.column, "duplicate measure line"));
                }
                saw_measure = true;
                if tokens.len() == 1 {
                    return Err(ParseError::new(line_no, head.column, "no measured qubits"));
                }
                let mut qubits = Vec::new();
                for tok in &tokens[1..] {
                    let q: usize = tok.text.parse().map_err(|_| {
                        ParseError::new(line_no, tok.column, format!("invalid qubit index {:?}", tok.text))
                    })?;
                    if q >= spec.qubit_count() {
                        return Err(ParseError::new(
                            line_no,
                            tok.column,
                            format!("qubit index {} out of range for {} qubits", q, spec.qubit_count()),
                        ));
                    }
                    if qubits.contains(&q) {
                        return Err(ParseError::new(
                            line_no,
                            tok.column,
                            format!("duplicate measured qubit {q}"),
                        ));
                    }
                    qubits.push(q);
                }
                spec.measure(&qubits);
            }
            "states" => {
                let spec = expect_spec(&mut spec, line_no, head.column)?;
                if saw_states {
                    return Err(ParseError::new(line_no, head.column, "duplicate states section"));
                }
                saw_states = true;
                expect_no_extra(&tokens, 1, line_no)?;
                loop {
                    let Some(raw) = lines.get(i) else {
                        return Err(ParseError::new(eof_line, 1, "states section not closed with end"));
                    };
                    let line_no = i + 1;
                    let tokens = tokenize(raw);
                    i += 1;
                    let Some(first) = tokens.first().copied() else {
                        continue;
                    };
                    if first.text == "end" && tokens.len() == 1 {
                        break;
                    }
                    let (name, expr) = parse_state_binding(raw, &tokens, line_no, spec.qubit_count())?;
                    if spec.state_names().contains(&name) {
                        return Err(ParseError::new(
                            line_no,
                            first.column,
                            format!("duplicate state name {name:?}"),
                        ));
                    }
                    spec.add_state(name, expr);
                }
            }
            other => {
                return Err(ParseError::new(
                    line_no,
                    head.column,
                    format!("expected a section keyword, found {other:?}"),
                ));
            }
        }
    }

    let spec = spec.ok_or_else(|| ParseError::new(eof_line, 1, "missing qubits line"))?;
    if !saw_gates {
        return Err(ParseError::new(eof_line, 1, "missing gates section"));
    }
    if !saw_measure {
        return Err(ParseError::new(eof_line, 1, "missing measure line"));
    }
    Ok(spec)
}

fn expect_spec<'a>(
    spec: &'a mut Option<MachineSpec>,
    line: usize,
    column: usize,
) -> Result<&'a mut MachineSpec, ParseError> {
    spec.as_mut()
        .ok_or_else(|| ParseError::new(line, column, "qubits line must come first"))
}

fn expect_no_extra(tokens: &[Token<'_>], expected: usize, line: usize) -> Result<(), ParseError> {
    if let Some(extra) = tokens.get(expected) {
        return Err(ParseError::new(
            line,
            extra.column,
            format!("unexpected token {:?}", extra.text),
        ));
    }
    Ok(())
}

/// `NAME = GATE args...` within a gates section.
fn parse_gate_binding<'a>(
    raw_line: &str,
    tokens: &[Token<'a>],
    line: usize,
    qubit_count: usize,
) -> Result<(&'a str, GateExpr), ParseError> {
    let name = tokens[0];
    let eq = tokens
        .get(1)
        .filter(|t| t.text == "=")
        .ok_or_else(|| ParseError::new(line, name.column, "expected NAME = GATE ..."))?;
    let gate = tokens
        .get(2)
        .ok_or_else(|| ParseError::new(line, eq.column + 1, "missing gate expression"))?;

    let parse_qubit = |tok: Option<&Token<'a>>, after: &Token<'a>| -> Result<usize, ParseError> {
        let tok = tok.ok_or_else(|| {
            ParseError::new(line, after.column + after.text.len(), "missing qubit index")
        })?;
        let q: usize = tok.text.parse().map_err(|_| {
            ParseError::new(line, tok.column, format!("invalid qubit index {:?}", tok.text))
        })?;
        if q >= qubit_count {
            return Err(ParseError::new(
                line,
                tok.column,
                format!("qubit index {q} out of range for {qubit_count} qubits"),
            ));
        }
        Ok(q)
    };

    let expr = match gate.text {
        "H" | "X" | "Z" | "S" => {
            let q = parse_qubit(tokens.get(3), gate)?;
            expect_no_extra(tokens, 4, line)?;
            match gate.text {
                "H" => GateExpr::Hadamard(q),
                "X" => GateExpr::PauliX(q),
                "Z" => GateExpr::PauliZ(q),
                _ => GateExpr::PhaseS(q),
            }
        }
        "CNOT" => {
            let control = parse_qubit(tokens.get(3), gate)?;
            let target = parse_qubit(tokens.get(4), gate)?;
            expect_no_extra(tokens, 5, line)?;
            if control == target {
                return Err(ParseError::new(
                    line,
                    tokens[3].column,
                    format!("CNOT control equals target (qubit {control})"),
                ));
            }
            GateExpr::ControlledNot { control, target }
        }
        "SWAP" => {
            let a = parse_qubit(tokens.get(3), gate)?;
            let b = parse_qubit(tokens.get(4), gate)?;
            expect_no_extra(tokens, 5, line)?;
            if a == b {
                return Err(ParseError::new(
                    line,
                    tokens[3].column,
                    format!("SWAP qubits are equal (qubit {a})"),
                ));
            }
            GateExpr::Swap(a, b)
        }
        "matrix" => {
            let dim = 1usize << qubit_count;
            let m = parse_matrix_literal(raw_line, gate, line, dim)?;
            GateExpr::Matrix(m)
        }
        other => {
            return Err(ParseError::new(
                line,
                gate.column,
                format!("unknown gate {other:?}"),
            ));
        }
    };
    Ok((name.text, expr))
}

/// `NAME = ket bits | bell xy | matrix [...]` within a states section.
fn parse_state_binding<'a>(
    raw_line: &str,
    tokens: &[Token<'a>],
    line: usize,
    qubit_count: usize,
) -> Result<(&'a str, StateExpr), ParseError> {
    let name = tokens[0];
    let eq = tokens
        .get(1)
        .filter(|t| t.text == "=")
        .ok_or_else(|| ParseError::new(line, name.column, "expected NAME = ket|bell|matrix ..."))?;
    let kind = tokens
        .get(2)
        .ok_or_else(|| ParseError::new(line, eq.column + 1, "missing state expression"))?;
    let expr = match kind.text {
        "ket" => {
            let bits_tok = tokens
                .get(3)
                .ok_or_else(|| ParseError::new(line, kind.column + 3, "missing ket bits"))?;
            expect_no_extra(tokens, 4, line)?;
            if bits_tok.text.len() != qubit_count {
                return Err(ParseError::new(
                    line,
                    bits_tok.column,
                    format!("ket has {} bits, expected {}", bits_tok.text.len(), qubit_count),
                ));
            }
            let mut bits = Vec::with_capacity(bits_tok.text.len());
            for (off, ch) in bits_tok.text.char_indices() {
                match ch {
                    '0' => bits.push(0),
                    '1' => bits.push(1),
                    _ => {
                        return Err(ParseError::new(
                            line,
                            bits_tok.column + off,
                            format!("invalid ket bit {ch:?}"),
                        ));
                    }
                }
            }
            StateExpr::Ket(bits)
        }
        "bell" => {
            let xy = tokens
                .get(3)
                .ok_or_else(|| ParseError::new(line, kind.column + 4, "missing bell indices"))?;
            expect_no_extra(tokens, 4, line)?;
            if qubit_count != 2 {
                return Err(ParseError::new(
                    line,
                    kind.column,
                    format!("bell states need exactly 2 qubits, machine has {qubit_count}"),
                ));
            }
            let chars: Vec<char> = xy.text.chars().collect();
            let valid = chars.len() == 2 && chars.iter().all(|c| *c == '0' || *c == '1');
            if !valid {
                return Err(ParseError::new(
                    line,
                    xy.column,
                    format!("bell indices must be two bits, found {:?}", xy.text),
                ));
            }
            StateExpr::Bell {
                x: (chars[0] == '1') as u8,
                y: (chars[1] == '1') as u8,
            }
        }
        "matrix" => {
            let dim = 1usize << qubit_count;
            StateExpr::Matrix(parse_matrix_literal(raw_line, kind, line, dim)?)
        }
        other => {
            return Err(ParseError::new(
                line,
                kind.column,
                format!("unknown state expression {other:?}"),
            ));
        }
    };
    Ok((name.text, expr))
}

/// Parses `[a, b; c, d]` starting after the `matrix` keyword token.
/// Rows are semicolon separated, entries comma separated, each a complex
/// literal like `1`, `-0.5`, `2i`, or `0.7-0.3i`.
fn parse_matrix_literal(
    raw_line: &str,
    keyword: &Token<'_>,
    line: usize,
    dim: usize,
) -> Result<ComplexMatrix, ParseError> {
    let content = match raw_line.find('#') {
        Some(pos) => &raw_line[..pos],
        None => raw_line,
    };
    let after_keyword = keyword.column - 1 + keyword.text.len();
    let rest = &content[after_keyword..];
    let open_rel = rest.find('[').ok_or_else(|| {
        ParseError::new(line, after_keyword + 1, "matrix literal must start with [")
    })?;
    let open = after_keyword + open_rel;
    let close_rel = rest.rfind(']').ok_or_else(|| {
        ParseError::new(line, after_keyword + 1, "matrix literal must end with ]")
    })?;
    let close = after_keyword + close_rel;
    if close <= open {
        return Err(ParseError::new(line, open + 1, "malformed matrix literal"));
    }
    if !content[close + 1..].trim().is_empty() {
        return Err(ParseError::new(line, close + 2, "unexpected text after matrix literal"));
    }

    let body = &content[open + 1..close];
    let mut rows: Vec<Vec<Complex>> = Vec::new();
    for (row_text, row_offset) in split_with_offsets(body, ';') {
        let mut row = Vec::new();
        for (entry_text, entry_offset) in split_with_offsets(row_text, ',') {
            let trimmed = entry_text.trim();
            let lead = entry_text.len() - entry_text.trim_start().len();
            let entry_col = open + 1 + row_offset + entry_offset + lead + 1;
            if trimmed.is_empty() {
                return Err(ParseError::new(line, entry_col, "empty matrix entry"));
            }
            let value = parse_complex(trimmed).ok_or_else(|| {
                ParseError::new(line, entry_col, format!("malformed complex number {trimmed:?}"))
            })?;
            row.push(value);
        }
        rows.push(row);
    }
    if rows.len() != dim || rows.iter().any(|r| r.len() != dim) {
        return Err(ParseError::new(
            line,
            open + 1,
            format!(
                "matrix is {}x{}, expected {dim}x{dim}",
                rows.len(),
                rows.first().map_or(0, Vec::len)
            ),
        ));
    }
    Ok(ComplexMatrix::from_rows(&rows))
}

/// Splits on a separator, yielding each piece with its byte offset.
fn split_with_offsets(text: &str, sep: char) -> Vec<(&str, usize)> {
    let mut out = Vec::new();
    let mut start = 0usize;
    for (i, ch) in text.char_indices() {
        if ch == sep {
            out.push((&text[start..i], start));
            start = i + 1;
        }
    }
    out.push((&text[start..], start));
    out
}

/// Parses a complex literal: `1`, `-2.5`, `3i`, `-i`, `1+2i`, `0.7-0.3i`,
/// with exponent forms like `1e-3+2e-4i`.
fn parse_complex(s: &str) -> Option<Complex> {
    let s = s.trim();
    if s.is_empty() {
        return None;
    }
    // Last +/- that is neither leading nor an exponent sign splits the
    // real part from the imaginary part.
    let bytes = s.as_bytes();
    let mut split = None;
    for i in (1..bytes.len()).rev() {
        let b = bytes[i];
        if (b == b'+' || b == b'-') && !matches!(bytes[i - 1], b'e' | b'E') {
            split = Some(i);
            break;
        }
    }
    if let Some(stripped) = s.strip_suffix(['i', 'I']) {
        match split {
            // a+bi, a-bi; a bare trailing sign means an implicit 1.
            Some(p) => {
                let re: f64 = stripped[..p].parse().ok()?;
                let im: f64 = match &stripped[p..] {
                    "+" => 1.0,
                    "-" => -1.0,
                    other => other.parse().ok()?,
                };
                Some(Complex::new(re, im))
            }
            // Pure imaginary: i, -i, 2.5i.
            None => {
                let im: f64 = match stripped {
                    "" => 1.0,
                    "-" => -1.0,
                    "+" => 1.0,
                    other => other.parse().ok()?,
                };
                Some(Complex::new(0.0, im))
            }
        }
    } else {
        let re: f64 = s.parse().ok()?;
        Some(Complex::new(re, 0.0))
    }
}
