//! Deciding whether an automaton accepts a distinguishable language: no two
//! distinct accepted words of equal length are confusable letter by letter.
//!
//! Two independent checkers are provided. [`check_code_floodfill`] works on
//! simplified machines and marks the state pairs from which a confusable pair
//! of words leads back to the diagonal. [`check_code_product`] searches the
//! pair automaton of an arbitrary partial DFA directly.

use std::collections::VecDeque;

use serde::Serialize;

use crate::automata::{PartialDfa, SimplifiedDfa};
use crate::error::{Error, Result};
use crate::graph::Graph;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct CodeVerdict {
    pub valid: bool,
    pub witness_a: Option<Vec<usize>>,
    pub witness_b: Option<Vec<usize>>,
}

impl CodeVerdict {
    fn valid() -> Self {
        CodeVerdict {
            valid: true,
            witness_a: None,
            witness_b: None,
        }
    }

    fn invalid(a: Vec<usize>, b: Vec<usize>) -> Self {
        CodeVerdict {
            valid: false,
            witness_a: Some(a),
            witness_b: Some(b),
        }
    }

    pub fn witness(&self) -> Option<(&[usize], &[usize])> {
        match (&self.witness_a, &self.witness_b) {
            (Some(a), Some(b)) => Some((a, b)),
            _ => None,
        }
    }
}

/// Whether `(a, b)` is a genuine collision for `dfa`: equal lengths, both
/// accepted, letterwise confusable, and not identical.
pub fn is_collision(g: &Graph, dfa: &PartialDfa, a: &[usize], b: &[usize]) -> bool {
    a.len() == b.len()
        && a != b
        && dfa.accepts(a)
        && dfa.accepts(b)
        && a.iter()
            .zip(b)
            .all(|(&x, &y)| g.confusable(x, y).unwrap_or(false))
}

fn check_alphabet(g: &Graph, dfa: &PartialDfa) -> Result<()> {
    if dfa.alphabet() != g.n() {
        return Err(Error::AlphabetMismatch {
            alphabet: dfa.alphabet(),
            graph: g.n(),
        });
    }
    Ok(())
}

/// Ordered confusable symbol pairs `(u, v)`, equal pairs included.
fn confusable_pairs(g: &Graph) -> Vec<(usize, usize)> {
    (0..g.n())
        .flat_map(|u| (0..g.n()).map(move |v| (u, v)))
        .filter(|&(u, v)| g.confusable_unchecked(u, v))
        .collect()
}

/// The symmetric table of state pairs `(i, j)` from which some pair of
/// letterwise confusable words leads to a diagonal pair `(x, x)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PairReach {
    d: usize,
    table: Vec<bool>,
    /// For marked off-diagonal pairs with `i < j`: the symbols read from
    /// `i` and `j` and the already-marked successor pair.
    via: Vec<Option<(usize, usize, usize, usize)>>,
}

impl PairReach {
    /// Least fixed point of the propagation rule, starting from the diagonal.
    pub fn compute(g: &Graph, dfa: &PartialDfa) -> Result<Self> {
        check_alphabet(g, dfa)?;
        let d = dfa.states();
        let mut reach = PairReach {
            d,
            table: vec![false; d * d],
            via: vec![None; d * d],
        };
        for i in 0..d {
            reach.table[i * d + i] = true;
        }
        let pairs = confusable_pairs(g);
        let mut changed = true;
        while changed {
            changed = false;
            for i in 0..d {
                for j in i + 1..d {
                    if reach.table[i * d + j] {
                        continue;
                    }
                    let hit = pairs.iter().find_map(|&(u, v)| {
                        let a = dfa.next(i, u)?;
                        let b = dfa.next(j, v)?;
                        reach.get(a, b).then_some((u, v, a, b))
                    });
                    if let Some(step) = hit {
                        reach.table[i * d + j] = true;
                        reach.table[j * d + i] = true;
                        reach.via[i * d + j] = Some(step);
                        changed = true;
                    }
                }
            }
        }
        Ok(reach)
    }

    pub fn states(&self) -> usize {
        self.d
    }

    pub fn get(&self, i: usize, j: usize) -> bool {
        self.table[i * self.d + j]
    }

    /// Whether one more round of propagation would mark nothing new.
    pub fn is_closed(&self, g: &Graph, dfa: &PartialDfa) -> bool {
        let pairs = confusable_pairs(g);
        (0..self.d).all(|i| {
            (0..self.d).all(|j| {
                self.get(i, j)
                    || !pairs.iter().any(|&(u, v)| {
                        matches!((dfa.next(i, u), dfa.next(j, v)), (Some(a), Some(b)) if self.get(a, b))
                    })
            })
        })
    }

    /// Words `(a, b)` leading from the marked pair `(i, j)` to a diagonal
    /// pair, together with that diagonal state.
    fn path_to_diagonal(&self, mut i: usize, mut j: usize) -> (Vec<usize>, Vec<usize>, usize) {
        let (mut a, mut b) = (Vec::new(), Vec::new());
        while i != j {
            let (lo, hi) = (i.min(j), i.max(j));
            let (u, v, ni, nj) =
                self.via[lo * self.d + hi].expect("marked pair has a justification");
            if i < j {
                a.push(u);
                b.push(v);
                (i, j) = (ni, nj);
            } else {
                a.push(v);
                b.push(u);
                (i, j) = (nj, ni);
            }
        }
        (a, b, i)
    }
}

/// Flood-fill checker for simplified machines.
///
/// Marks every state pair that can reach the diagonal under confusable
/// symbol pairs, then looks for a diagonal pair that steps into a marked
/// pair on two adjacent (hence unequal) symbols. Such a step, preceded by a
/// common prefix from the initial state and followed by a path back to the
/// initial state, is a collision.
pub fn check_code_floodfill(g: &Graph, dfa: &SimplifiedDfa) -> Result<CodeVerdict> {
    let m = dfa.dfa();
    let reach = PairReach::compute(g, m)?;
    let Some((i, u, v, a, b)) = find_split(g, m, &reach) else {
        return Ok(CodeVerdict::valid());
    };
    let prefix = m.shortest_word(m.initial(), i).expect("strongly connected");
    let (sa, sb, x) = reach.path_to_diagonal(a, b);
    let back = m.shortest_word(x, m.initial()).expect("strongly connected");
    let mut wa = prefix.clone();
    wa.push(u);
    wa.extend(sa);
    wa.extend(&back);
    let mut wb = prefix;
    wb.push(v);
    wb.extend(sb);
    wb.extend(&back);
    Ok(CodeVerdict::invalid(wa, wb))
}

/// A state `i` and adjacent symbols `u`, `v` leading from `(i, i)` to a
/// marked pair `(a, b)`.
fn find_split(
    g: &Graph,
    m: &PartialDfa,
    reach: &PairReach,
) -> Option<(usize, usize, usize, usize, usize)> {
    for i in 0..m.states() {
        for (u, v) in g.edges().flat_map(|(u, v)| [(u, v), (v, u)]) {
            if let (Some(a), Some(b)) = (m.next(i, u), m.next(i, v)) {
                if reach.get(a, b) {
                    return Some((i, u, v, a, b));
                }
            }
        }
    }
    None
}

/// Whether some state splits on adjacent symbols into a pair that can
/// rejoin. For strongly connected machines this is exactly invalidity, and
/// adding transitions never removes a split.
pub fn has_split(g: &Graph, dfa: &PartialDfa) -> Result<bool> {
    let reach = PairReach::compute(g, dfa)?;
    Ok(find_split(g, dfa, &reach).is_some())
}

/// Product-automaton checker for arbitrary partial DFAs.
///
/// Runs two copies in lockstep on pairs of confusable symbols. Phase 0 means
/// every pair so far was equal; the first unequal (adjacent) pair moves to
/// phase 1. The language is invalid iff a phase-1 pair of accepting states
/// is reachable from `(init, init, 0)`; the BFS tree gives the witness.
pub fn check_code_product(g: &Graph, dfa: &PartialDfa) -> Result<CodeVerdict> {
    check_alphabet(g, dfa)?;
    let d = dfa.states();
    let k = dfa.alphabet();
    let encode = |s: usize, t: usize, phase: usize| (phase * d + s) * d + t;
    let mut parent: Vec<Option<(usize, usize, usize)>> = vec![None; 2 * d * d];
    let mut seen = vec![false; 2 * d * d];
    let start = encode(dfa.initial(), dfa.initial(), 0);
    seen[start] = true;
    let mut queue = VecDeque::from([start]);
    while let Some(node) = queue.pop_front() {
        let phase = node / (d * d);
        let (s, t) = ((node / d) % d, node % d);
        if phase == 1 && dfa.is_accepting(s) && dfa.is_accepting(t) {
            let (mut a, mut b) = (Vec::new(), Vec::new());
            let mut cur = node;
            while let Some((prev, x, y)) = parent[cur] {
                a.push(x);
                b.push(y);
                cur = prev;
            }
            a.reverse();
            b.reverse();
            return Ok(CodeVerdict::invalid(a, b));
        }
        for x in 0..k {
            let Some(s2) = dfa.next(s, x) else { continue };
            for y in 0..k {
                if !(x == y || g.has_edge(x, y)) {
                    continue;
                }
                // In phase 0 both copies sit in the same state, so the
                // mirrored pair (y, x) adds nothing new.
                if phase == 0 && x > y {
                    continue;
                }
                let Some(t2) = dfa.next(t, y) else { continue };
                let next_phase = if x == y { phase } else { 1 };
                let next = encode(s2, t2, next_phase);
                if !seen[next] {
                    seen[next] = true;
                    parent[next] = Some((node, x, y));
                    queue.push_back(next);
                }
            }
        }
    }
    Ok(CodeVerdict::valid())
}
