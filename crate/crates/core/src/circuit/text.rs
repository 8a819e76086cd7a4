//! Line-oriented text format.
//!
//! One instruction per line: a gate name, an optional parenthesized argument
//! list, then whitespace-separated targets (`5`, `rec[-3]`, `X5*Z6`).
//! Everything after `#` is a comment.

use std::fmt::{self, Write as _};
use std::str::FromStr;

use thiserror::Error;

use super::{Circuit, Gate, Instruction, Pauli, Target};

#[derive(Debug, Error, PartialEq)]
#[error("line {line}: {message}")]
pub struct ParseError {
    pub line: usize,
    pub message: String,
}

fn write_args(out: &mut String, args: &[f64]) {
    if args.is_empty() {
        return;
    }
    out.push('(');
    for (i, a) in args.iter().enumerate() {
        if i > 0 {
            out.push(',');
        }
        write!(out, "{a}").unwrap();
    }
    out.push(')');
}

fn write_instruction(out: &mut String, inst: &Instruction) {
    out.push_str(inst.gate.name());
    write_args(out, &inst.args);
    let mut prev_was_combiner = false;
    for t in &inst.targets {
        match *t {
            Target::Qubit(q) => write!(out, " {q}").unwrap(),
            Target::Rec(k) => write!(out, " rec[-{k}]").unwrap(),
            Target::Pauli(q, p) => {
                if !prev_was_combiner {
                    out.push(' ');
                }
                write!(out, "{p}{q}").unwrap();
            }
            Target::Combiner => out.push('*'),
        }
        prev_was_combiner = matches!(t, Target::Combiner);
    }
}

impl fmt::Display for Instruction {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        write_instruction(&mut s, self);
        f.write_str(&s)
    }
}

impl fmt::Display for Circuit {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut s = String::new();
        for inst in &self.instructions {
            write_instruction(&mut s, inst);
            s.push('\n');
        }
        f.write_str(&s)
    }
}

fn parse_target(tok: &str, gate: Gate) -> Result<Vec<Target>, String> {
    if let Some(rest) = tok.strip_prefix("rec[-") {
        let k = rest
            .strip_suffix(']')
            .and_then(|n| n.parse::<u32>().ok())
            .filter(|&k| k > 0)
            .ok_or_else(|| format!("bad record target `{tok}`"))?;
        return Ok(vec![Target::Rec(k)]);
    }
    if gate == Gate::Mpp {
        let mut out = Vec::new();
        for (i, factor) in tok.split('*').enumerate() {
            if i > 0 {
                out.push(Target::Combiner);
            }
            let mut chars = factor.chars();
            let pauli = chars
                .next()
                .and_then(Pauli::from_letter)
                .ok_or_else(|| format!("bad Pauli factor `{factor}`"))?;
            let q = chars
                .as_str()
                .parse::<u32>()
                .map_err(|_| format!("bad Pauli factor `{factor}`"))?;
            out.push(Target::Pauli(q, pauli));
        }
        return Ok(out);
    }
    tok.parse::<u32>()
        .map(|q| vec![Target::Qubit(q)])
        .map_err(|_| format!("bad target `{tok}`"))
}

fn parse_line(line: &str) -> Result<Option<Instruction>, String> {
    let line = line.split('#').next().unwrap_or("").trim();
    if line.is_empty() {
        return Ok(None);
    }
    let name_end = line
        .find(|c: char| c == '(' || c.is_whitespace())
        .unwrap_or(line.len());
    let name = &line[..name_end];
    let gate = Gate::from_name(name).ok_or_else(|| format!("unknown instruction `{name}`"))?;
    let mut rest = &line[name_end..];

    let mut args = Vec::new();
    if let Some(inner) = rest.strip_prefix('(') {
        let close = inner.find(')').ok_or("unclosed argument list")?;
        for a in inner[..close].split(',') {
            let a = a.trim();
            if a.is_empty() {
                continue;
            }
            args.push(a.parse::<f64>().map_err(|_| format!("bad argument `{a}`"))?);
        }
        rest = &inner[close + 1..];
        if !rest.is_empty() && !rest.starts_with(char::is_whitespace) {
            return Err("expected whitespace after arguments".into());
        }
    }

    let mut targets = Vec::new();
    for tok in rest.split_whitespace() {
        targets.extend(parse_target(tok, gate)?);
    }
    Ok(Some(Instruction { gate, args, targets }))
}

/// Parses the text format. Errors carry the 1-based line number.
pub fn parse(text: &str) -> Result<Circuit, ParseError> {
    let mut circuit = Circuit::new();
    for (i, line) in text.lines().enumerate() {
        match parse_line(line) {
            Ok(Some(inst)) => circuit.push(inst),
            Ok(None) => {}
            Err(message) => return Err(ParseError { line: i + 1, message }),
        }
    }
    Ok(circuit)
}

impl FromStr for Circuit {
    type Err = ParseError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        parse(s)
    }
}
