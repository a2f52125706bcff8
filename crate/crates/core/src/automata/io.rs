//! Text format: `dfa <d> <k>`, `init <s>`, `accept <s1> <s2> ...`, then one
//! `t <s> <x> <s'>` line per defined transition. Blank lines and `#`
//! comments are skipped.

use std::fmt::Write as _;

use super::PartialDfa;
use crate::error::{parse_err, Result};

pub fn write_dfa(dfa: &PartialDfa) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "dfa {} {}", dfa.states(), dfa.alphabet());
    let _ = writeln!(out, "init {}", dfa.initial());
    out.push_str("accept");
    for a in dfa.accepting() {
        let _ = write!(out, " {a}");
    }
    out.push('\n');
    for (s, x, t) in dfa.transitions() {
        let _ = writeln!(out, "t {s} {x} {t}");
    }
    out
}

pub fn parse_dfa(text: &str) -> Result<PartialDfa> {
    let mut header: Option<(usize, usize)> = None;
    let mut init: Option<usize> = None;
    let mut accept: Option<Vec<usize>> = None;
    let mut trans = Vec::new();
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let mut fields = line.split_whitespace();
        let tag = fields.next().unwrap_or("");
        let nums: Vec<usize> = fields
            .map(|f| {
                f.parse()
                    .map_err(|_| parse_err(line_no, format!("invalid integer `{f}`")))
            })
            .collect::<Result<_>>()?;
        match (tag, nums.as_slice()) {
            ("dfa", &[d, k]) if header.is_none() => header = Some((d, k)),
            ("init", &[s]) if init.is_none() => init = Some(s),
            ("accept", list) if accept.is_none() => accept = Some(list.to_vec()),
            ("t", &[s, x, t]) => trans.push((line_no, s, x, t)),
            _ => return Err(parse_err(line_no, format!("unexpected line `{line}`"))),
        }
    }
    let (d, k) = header.ok_or_else(|| parse_err(0, "missing `dfa` header"))?;
    let init = init.ok_or_else(|| parse_err(0, "missing `init` line"))?;
    let accept = accept.unwrap_or_default();
    let mut dfa = PartialDfa::new(d, k, init, &accept).map_err(|e| parse_err(0, e.to_string()))?;
    for (line_no, s, x, t) in trans {
        if dfa.next_checked(s, x).is_some() {
            return Err(parse_err(
                line_no,
                format!("duplicate transition from {s} on {x}"),
            ));
        }
        dfa.set(s, x, Some(t))
            .map_err(|e| parse_err(line_no, e.to_string()))?;
    }
    Ok(dfa)
}
