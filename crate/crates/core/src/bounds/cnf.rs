//! DIMACS CNF encoding of "a valid reversible machine on `d` states exists".
//!
//! Variables `T(s, x, t)` say that state `s` moves to `t` on symbol `x`;
//! variables `F(i, j)` for `i < j` over-approximate the pairs from which a
//! pair of confusable words returns to the diagonal (diagonal pairs are
//! implicitly true). Clauses require each symbol to act as a partial
//! injection, `F` to be closed under confusable steps, no diagonal pair to
//! step into `F` on two adjacent symbols, and state 0 to have at least one
//! outgoing transition.

use std::fmt::Write as _;

use crate::automata::PartialDfa;
use crate::error::{parse_err, Error, Result};
use crate::graph::Graph;

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub struct CnfLayout {
    pub states: usize,
    pub alphabet: usize,
}

impl CnfLayout {
    pub fn transition_vars(&self) -> usize {
        self.states * self.alphabet * self.states
    }

    pub fn final_vars(&self) -> usize {
        self.states * (self.states - 1) / 2
    }

    pub fn num_vars(&self) -> usize {
        self.transition_vars() + self.final_vars()
    }

    /// 1-based DIMACS variable for `T(s, x, t)`.
    pub fn t(&self, s: usize, x: usize, t: usize) -> i64 {
        ((s * self.alphabet + x) * self.states + t + 1) as i64
    }

    /// 1-based DIMACS variable for `F(i, j)` with `i != j`.
    pub fn f(&self, i: usize, j: usize) -> i64 {
        let (i, j) = (i.min(j), i.max(j));
        debug_assert!(i < j);
        // Row-major over the strict upper triangle.
        let before = i * self.states - i * (i + 1) / 2;
        (self.transition_vars() + before + (j - i - 1) + 1) as i64
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SearchCnf {
    pub layout: CnfLayout,
    pub clauses: Vec<Vec<i64>>,
}

impl SearchCnf {
    pub fn to_dimacs(&self) -> String {
        let l = self.layout;
        let mut out = String::new();
        let _ = writeln!(out, "c graphcap reversible machine search");
        let _ = writeln!(
            out,
            "c graphcap states {} alphabet {}",
            l.states, l.alphabet
        );
        let _ = writeln!(
            out,
            "c graphcap T(s,x,t) = (s*{k}+x)*{d}+t+1 for {} variables",
            l.transition_vars(),
            k = l.alphabet,
            d = l.states
        );
        let _ = writeln!(
            out,
            "c graphcap F(i,j) for i<j follow row-major from {} for {} variables",
            l.transition_vars() + 1,
            l.final_vars()
        );
        let _ = writeln!(
            out,
            "c graphcap F is only required to be closed, not least; any closed F avoiding the rejection clauses certifies validity"
        );
        let _ = writeln!(out, "p cnf {} {}", l.num_vars(), self.clauses.len());
        for c in &self.clauses {
            for lit in c {
                let _ = write!(out, "{lit} ");
            }
            out.push_str("0\n");
        }
        out
    }
}

pub fn export_search_cnf(g: &Graph, d: usize) -> Result<SearchCnf> {
    if d == 0 {
        return Err(Error::Domain("at least one state is required".into()));
    }
    let k = g.n();
    let l = CnfLayout {
        states: d,
        alphabet: k,
    };
    let mut clauses = Vec::new();
    for s in 0..d {
        for x in 0..k {
            for t in 0..d {
                for t2 in t + 1..d {
                    clauses.push(vec![-l.t(s, x, t), -l.t(s, x, t2)]);
                }
            }
        }
    }
    for x in 0..k {
        for t in 0..d {
            for s in 0..d {
                for s2 in s + 1..d {
                    clauses.push(vec![-l.t(s, x, t), -l.t(s2, x, t)]);
                }
            }
        }
    }
    clauses.push(
        (0..k)
            .flat_map(|x| (0..d).map(move |t| l.t(0, x, t)))
            .collect(),
    );

    let confusable: Vec<(usize, usize)> = (0..k)
        .flat_map(|u| (0..k).map(move |v| (u, v)))
        .filter(|&(u, v)| u == v || g.has_edge(u, v))
        .collect();
    // Closure: T(i,u,a) & T(j,v,b) & F(a,b) -> F(i,j).
    for i in 0..d {
        for j in i + 1..d {
            for &(u, v) in &confusable {
                for a in 0..d {
                    for b in 0..d {
                        let mut c = vec![-l.t(i, u, a), -l.t(j, v, b)];
                        if a != b {
                            c.push(-l.f(a, b));
                        }
                        c.push(l.f(i, j));
                        clauses.push(c);
                    }
                }
            }
        }
    }
    // Rejection: T(i,u,a) & T(i,v,b) & F(a,b) is impossible for adjacent u, v.
    for i in 0..d {
        for (u, v) in g.edges() {
            for a in 0..d {
                for b in 0..d {
                    let mut c = vec![-l.t(i, u, a), -l.t(i, v, b)];
                    if a != b {
                        c.push(-l.f(a, b));
                    }
                    clauses.push(c);
                }
            }
        }
    }
    Ok(SearchCnf { layout: l, clauses })
}

/// Machine encoded by a model, given as DIMACS literals (a `v` line of a
/// solver's output, with or without the `v` prefix and trailing 0).
pub fn decode_sat_model(layout: CnfLayout, model: &str) -> Result<PartialDfa> {
    let mut value = vec![false; layout.num_vars() + 1];
    for (lineno, line) in model.lines().enumerate() {
        let line = line.trim();
        let body = match line.strip_prefix('v') {
            Some(rest) => rest,
            None if line.starts_with('s') || line.starts_with('c') || line.is_empty() => continue,
            None => line,
        };
        for tok in body.split_whitespace() {
            let lit: i64 = tok
                .parse()
                .map_err(|_| parse_err(lineno + 1, format!("bad literal {tok:?}")))?;
            let var = lit.unsigned_abs() as usize;
            if var > layout.num_vars() {
                return Err(parse_err(
                    lineno + 1,
                    format!("variable {var} out of range"),
                ));
            }
            if lit > 0 {
                value[var] = true;
            }
        }
    }
    let mut dfa = PartialDfa::new(layout.states, layout.alphabet, 0, &[0])?;
    for s in 0..layout.states {
        for x in 0..layout.alphabet {
            let targets: Vec<usize> = (0..layout.states)
                .filter(|&t| value[layout.t(s, x, t) as usize])
                .collect();
            match targets[..] {
                [] => {}
                [t] => dfa.set(s, x, Some(t))?,
                _ => {
                    return Err(Error::Domain(format!(
                        "model gives state {s} several targets on symbol {x}"
                    )))
                }
            }
        }
    }
    Ok(dfa)
}
