//! SDPA sparse format.
//!
//! The data describe `min c·x` subject to `Σ F_i x_i - F_0 ⪰ 0`, whose dual
//! is `max <F_0, Y>` subject to `<F_i, Y> = c_i`, `Y ⪰ 0`. A moment
//! relaxation is written in the dual form.

use std::fmt::Write as _;

use super::moment::MomentRelaxation;
use crate::error::{parse_err, Error, Result};

#[derive(Clone, Debug, PartialEq)]
pub struct SdpaEntry {
    pub matrix: usize,
    pub block: usize,
    pub row: usize,
    pub col: usize,
    pub value: f64,
}

#[derive(Clone, Debug, PartialEq)]
pub struct SdpaProblem {
    pub comments: Vec<String>,
    /// Negative sizes mark diagonal blocks.
    pub block_sizes: Vec<i64>,
    pub cost: Vec<f64>,
    /// 1-based indices with `row <= col`, sorted.
    pub entries: Vec<SdpaEntry>,
}

impl SdpaProblem {
    pub fn m(&self) -> usize {
        self.cost.len()
    }

    fn sort(&mut self) {
        self.entries.sort_by(|a, b| {
            (a.matrix, a.block, a.row, a.col).cmp(&(b.matrix, b.block, b.row, b.col))
        });
    }
}

fn to_f64(r: &num_rational::Rational64) -> f64 {
    *r.numer() as f64 / *r.denom() as f64
}

/// Converts a relaxation; off-diagonal coefficients are halved because
/// each appears twice in the trace inner product.
pub fn to_sdpa(r: &MomentRelaxation) -> SdpaProblem {
    let mut entries = Vec::new();
    let mut push = |matrix: usize, form: &super::moment::LinearForm| {
        for (&(b, i, j), v) in form {
            let v = to_f64(v);
            entries.push(SdpaEntry {
                matrix,
                block: b + 1,
                row: i + 1,
                col: j + 1,
                value: if i == j { v } else { v / 2.0 },
            });
        }
    };
    push(0, &r.objective);
    for (k, c) in r.constraints.iter().enumerate() {
        push(k + 1, &c.form);
    }
    let mut comments = vec![format!(
        "c graphcap level={} basis={} form={}",
        r.level,
        r.basis.len(),
        if r.complex { "complex" } else { "real" }
    )];
    if r.objective_shift != 0.0 {
        comments.push(format!("c graphcap shift={}", r.objective_shift));
    }
    let mut out = SdpaProblem {
        comments,
        block_sizes: r
            .blocks
            .iter()
            .map(|b| {
                if b.diagonal {
                    -(b.size as i64)
                } else {
                    b.size as i64
                }
            })
            .collect(),
        cost: r.constraints.iter().map(|c| to_f64(&c.rhs)).collect(),
        entries,
    };
    out.sort();
    out
}

fn num(v: f64) -> String {
    format!("{v:.16e}")
}

pub fn write_sdpa(p: &SdpaProblem) -> String {
    let mut s = String::new();
    for c in &p.comments {
        let _ = writeln!(s, "\"{c}");
    }
    let _ = writeln!(s, "{}", p.m());
    let _ = writeln!(s, "{}", p.block_sizes.len());
    let sizes: Vec<String> = p.block_sizes.iter().map(|b| b.to_string()).collect();
    let _ = writeln!(s, "{}", sizes.join(" "));
    let cost: Vec<String> = p.cost.iter().map(|&c| num(c)).collect();
    let _ = writeln!(s, "{}", cost.join(" "));
    for e in &p.entries {
        let _ = writeln!(
            s,
            "{} {} {} {} {}",
            e.matrix,
            e.block,
            e.row,
            e.col,
            num(e.value)
        );
    }
    s
}

fn tokens(line: &str) -> impl Iterator<Item = &str> {
    line.split(|c: char| c.is_whitespace() || ",{}()".contains(c))
        .filter(|t| !t.is_empty())
}

/// Parses the sparse format; comment lines start with `"` or `*`.
pub fn parse_sdpa(text: &str) -> Result<SdpaProblem> {
    let mut comments = Vec::new();
    let mut lines = text
        .lines()
        .enumerate()
        .map(|(i, l)| (i + 1, l.trim()))
        .filter(|(_, l)| !l.is_empty())
        .filter(|(_, l)| {
            if let Some(c) = l.strip_prefix('"').or_else(|| l.strip_prefix('*')) {
                comments.push(c.to_string());
                false
            } else {
                true
            }
        })
        .collect::<Vec<_>>()
        .into_iter();
    let last_line = text.lines().count().max(1);
    let mut next_line = |what: &str| {
        lines
            .next()
            .ok_or_else(|| parse_err(last_line, format!("missing {what}")))
    };

    let first_int = |(ln, l): (usize, &str), what: &str| -> Result<i64> {
        tokens(l)
            .next()
            .ok_or_else(|| parse_err(ln, format!("missing {what}")))?
            .parse::<i64>()
            .map_err(|e| parse_err(ln, format!("bad {what}: {e}")))
    };
    let m_line = next_line("constraint count")?;
    let m = first_int(m_line, "constraint count")?;
    if m < 0 {
        return Err(parse_err(m_line.0, "negative constraint count"));
    }
    let nb_line = next_line("block count")?;
    let nb = first_int(nb_line, "block count")?;
    if nb <= 0 {
        return Err(parse_err(nb_line.0, "block count must be positive"));
    }
    let sizes_line = next_line("block sizes")?;
    let block_sizes: Vec<i64> = tokens(sizes_line.1)
        .take(nb as usize)
        .map(|t| {
            t.parse::<i64>()
                .map_err(|e| parse_err(sizes_line.0, format!("bad block size {t}: {e}")))
        })
        .collect::<Result<_>>()?;
    if block_sizes.len() != nb as usize || block_sizes.contains(&0) {
        return Err(parse_err(
            sizes_line.0,
            format!("expected {nb} nonzero block sizes"),
        ));
    }
    let mut cost = Vec::with_capacity(m as usize);
    while cost.len() < m as usize {
        let (ln, l) = next_line("cost vector")?;
        for t in tokens(l) {
            let v = t
                .parse::<f64>()
                .map_err(|e| parse_err(ln, format!("bad cost {t}: {e}")))?;
            cost.push(v);
        }
        if cost.len() > m as usize {
            return Err(parse_err(ln, format!("cost vector longer than {m}")));
        }
    }
    let mut entries = Vec::new();
    for (ln, l) in lines {
        let t: Vec<&str> = tokens(l).collect();
        if t.len() != 5 {
            return Err(parse_err(
                ln,
                format!("expected 5 fields, found {}", t.len()),
            ));
        }
        let idx = |k: usize, what: &str| -> Result<usize> {
            t[k].parse::<usize>()
                .map_err(|e| parse_err(ln, format!("bad {what} {}: {e}", t[k])))
        };
        let e = SdpaEntry {
            matrix: idx(0, "matrix")?,
            block: idx(1, "block")?,
            row: idx(2, "row")?,
            col: idx(3, "column")?,
            value: t[4]
                .parse::<f64>()
                .map_err(|e| parse_err(ln, format!("bad value {}: {e}", t[4])))?,
        };
        if e.matrix > m as usize {
            return Err(parse_err(ln, format!("matrix {} beyond {m}", e.matrix)));
        }
        if e.block == 0 || e.block > block_sizes.len() {
            return Err(parse_err(ln, format!("block {} out of range", e.block)));
        }
        let size = block_sizes[e.block - 1];
        let order = size.unsigned_abs() as usize;
        if e.row == 0 || e.col == 0 || e.row > order || e.col > order {
            return Err(parse_err(
                ln,
                format!(
                    "index ({}, {}) outside block of order {order}",
                    e.row, e.col
                ),
            ));
        }
        if size < 0 && e.row != e.col {
            return Err(parse_err(ln, "off-diagonal entry in a diagonal block"));
        }
        let (row, col) = (e.row.min(e.col), e.row.max(e.col));
        entries.push(SdpaEntry { row, col, ..e });
    }
    let mut out = SdpaProblem {
        comments,
        block_sizes,
        cost,
        entries,
    };
    out.sort();
    Ok(out)
}

/// Reads a file written by [`write_sdpa`].
pub fn read_sdpa(path: &std::path::Path) -> Result<SdpaProblem> {
    let text = std::fs::read_to_string(path).map_err(Error::Io)?;
    parse_sdpa(&text)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn golden_single_variable() {
        // min x subject to x >= 1.
        let p = SdpaProblem {
            comments: Vec::new(),
            block_sizes: vec![1],
            cost: vec![1.0],
            entries: vec![
                SdpaEntry {
                    matrix: 0,
                    block: 1,
                    row: 1,
                    col: 1,
                    value: 1.0,
                },
                SdpaEntry {
                    matrix: 1,
                    block: 1,
                    row: 1,
                    col: 1,
                    value: 1.0,
                },
            ],
        };
        let text = write_sdpa(&p);
        assert_eq!(
            text,
            "1\n1\n1\n1.0000000000000000e0\n0 1 1 1 1.0000000000000000e0\n1 1 1 1 1.0000000000000000e0\n"
        );
        assert_eq!(parse_sdpa(&text).unwrap(), p);
    }

    #[test]
    fn errors_carry_line_numbers() {
        let err = parse_sdpa("\"c\n1\n1\n2\n1.0\n0 1 3 1 1.0\n").unwrap_err();
        assert!(err.to_string().contains("line 6"), "{err}");
        let err = parse_sdpa("1\n1\nx\n").unwrap_err();
        assert!(err.to_string().contains("line 3"), "{err}");
        assert!(parse_sdpa("1\n1\n-2\n1.0\n0 1 1 2 1.0\n").is_err());
    }

    #[test]
    fn separators_are_accepted() {
        let p = parse_sdpa("* c\n1 = mDIM\n2\n{2, -1}\n0.5\n1 2 1 1 2.0\n1 1 2 1 3.0\n").unwrap();
        assert_eq!(p.block_sizes, vec![2, -1]);
        assert_eq!(p.entries[0].block, 1);
        assert_eq!((p.entries[0].row, p.entries[0].col), (1, 2));
    }
}
