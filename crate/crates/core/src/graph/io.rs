//! Plain-text graph format: a `p <n> <m>` header followed by `m` lines
//! `e <u> <v>` with 0-based endpoints. Blank lines and lines starting with
//! `c` are ignored.

use std::fmt::Write as _;

use super::Graph;
use crate::error::{parse_err, Error, Result};

pub fn write_graph(g: &Graph) -> String {
    let mut out = String::new();
    let _ = writeln!(out, "p {} {}", g.n(), g.edge_count());
    for (u, v) in g.edges() {
        let _ = writeln!(out, "e {u} {v}");
    }
    out
}

pub fn parse_graph(text: &str) -> Result<Graph> {
    let mut graph: Option<Graph> = None;
    let mut declared = 0;
    let mut seen = 0;
    for (i, raw) in text.lines().enumerate() {
        let line_no = i + 1;
        let line = raw.trim();
        if line.is_empty() || line.starts_with('c') {
            continue;
        }
        let fields: Vec<&str> = line.split_whitespace().collect();
        match fields[0] {
            "p" => {
                if graph.is_some() {
                    return Err(parse_err(line_no, "duplicate header"));
                }
                if fields.len() != 3 {
                    return Err(parse_err(line_no, "expected `p <n> <m>`"));
                }
                let n = parse_num(fields[1], line_no)?;
                declared = parse_num(fields[2], line_no)?;
                graph = Some(Graph::empty(n));
            }
            "e" => {
                let g = graph
                    .as_mut()
                    .ok_or_else(|| parse_err(line_no, "edge before header"))?;
                if fields.len() != 3 {
                    return Err(parse_err(line_no, "expected `e <u> <v>`"));
                }
                let u = parse_num(fields[1], line_no)?;
                let v = parse_num(fields[2], line_no)?;
                g.add_edge(u, v)
                    .map_err(|e| parse_err(line_no, e.to_string()))?;
                seen += 1;
            }
            other => return Err(parse_err(line_no, format!("unknown record `{other}`"))),
        }
    }
    let g = graph.ok_or_else(|| parse_err(0, "missing `p` header"))?;
    if seen != declared {
        return Err(parse_err(
            0,
            format!("header declares {declared} edges but {seen} were listed"),
        ));
    }
    Ok(g)
}

fn parse_num(s: &str, line: usize) -> Result<usize> {
    s.parse()
        .map_err(|_| parse_err(line, format!("invalid integer `{s}`")))
}

/// Resolves built-in graph names: `cN` (cycle), `kN` (complete), `eN`
/// (edgeless) and `prodpow:<name>:<k>` for the `k`-fold strong power.
pub fn named_graph(name: &str) -> Result<Graph> {
    if let Some(rest) = name.strip_prefix("prodpow:") {
        let (base, k) = rest
            .rsplit_once(':')
            .ok_or_else(|| Error::Domain(format!("expected prodpow:<name>:<k>, got `{name}`")))?;
        let k: usize = k
            .parse()
            .map_err(|_| Error::Domain(format!("invalid power `{k}`")))?;
        return Ok(named_graph(base)?.strong_power(k));
    }
    let lower = name.to_ascii_lowercase();
    let (kind, digits) = lower.split_at(1.min(lower.len()));
    let n: usize = digits
        .parse()
        .map_err(|_| Error::Domain(format!("unknown graph name `{name}`")))?;
    match kind {
        "c" => Graph::cycle(n),
        "k" => Ok(Graph::complete(n)),
        "e" => Ok(Graph::empty(n)),
        _ => Err(Error::Domain(format!("unknown graph name `{name}`"))),
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn round_trip() {
        let g = named_graph("prodpow:c5:2").unwrap();
        let text = write_graph(&g);
        assert!(text.starts_with("p 25 100\n"));
        assert_eq!(parse_graph(&text).unwrap(), g);
    }

    #[test]
    fn names() {
        assert_eq!(named_graph("c7").unwrap().edge_count(), 7);
        assert_eq!(named_graph("k4").unwrap().edge_count(), 6);
        assert_eq!(named_graph("e3").unwrap().edge_count(), 0);
        assert!(named_graph("q3").is_err());
        assert!(named_graph("c2").is_err());
    }

    #[test]
    fn diagnostics_carry_line_numbers() {
        let err = parse_graph("p 3 1\ne 0 9\n").unwrap_err();
        assert!(err.to_string().starts_with("line 2:"), "{err}");
        assert!(parse_graph("e 0 1\n").is_err());
        assert!(parse_graph("p 3 2\ne 0 1\n").is_err());
    }
}
