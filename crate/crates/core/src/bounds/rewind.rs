use std::collections::HashMap;

use crate::automata::PartialDfa;
use crate::error::{Error, Result};
use crate::graph::Graph;

/// Digits used to index `m` codewords over an alphabet of size `base`:
/// `⌈log_base m⌉`, but at least one.
pub fn index_digits(m: usize, base: usize) -> usize {
    let mut t = 1;
    let mut reach = base;
    while reach < m {
        reach = reach.saturating_mul(base);
        t += 1;
    }
    t
}

fn digits_of(mut value: usize, base: usize, len: usize) -> Vec<usize> {
    let mut out = vec![0; len];
    for d in out.iter_mut().rev() {
        *d = value % base;
        value /= base;
    }
    out
}

/// Reversible machine for `(w_m · idx(m))*`, where `idx(m)` writes `m`
/// (0-based) in base `|G|`, most significant digit first, on
/// [`index_digits`] symbols.
///
/// Codewords are read along a trie from the root. The index is read along
/// a second tree keyed by the digits still to come, so every state has at
/// most one predecessor per symbol and each index returns to the root.
pub fn rewind_dfa(g: &Graph, codewords: &[Vec<usize>]) -> Result<PartialDfa> {
    let first = codewords.first().ok_or(Error::NoCodewords)?;
    let n = first.len();
    if n == 0 {
        return Err(Error::Domain("codewords must be non-empty".into()));
    }
    for w in codewords {
        if w.len() != n {
            return Err(Error::UnequalLengths {
                expected: n,
                found: w.len(),
            });
        }
        if let Some(&x) = w.iter().find(|&&x| x >= g.n()) {
            return Err(Error::SymbolOutOfRange {
                symbol: x,
                alphabet: g.n(),
            });
        }
    }
    super::check_distinguishable(g, codewords)?;
    let k = g.n();
    let t = index_digits(codewords.len(), k);

    let mut transitions = Vec::new();
    let mut states = 1;
    let mut trie: HashMap<(usize, usize), usize> = HashMap::new();
    let mut leaves = Vec::with_capacity(codewords.len());
    for w in codewords {
        let mut s = 0;
        for &x in w {
            s = *trie.entry((s, x)).or_insert_with(|| {
                transitions.push((s, x, states));
                states += 1;
                states - 1
            });
        }
        leaves.push(s);
    }
    // Suffix states: key is the digit string still to be read; the empty
    // string is the root.
    let mut suffix: HashMap<Vec<usize>, usize> = HashMap::from([(Vec::new(), 0)]);
    let mut state_of = |key: &[usize], states: &mut usize| {
        *suffix.entry(key.to_vec()).or_insert_with(|| {
            *states += 1;
            *states - 1
        })
    };
    for (m, &leaf) in leaves.iter().enumerate() {
        let digits = digits_of(m, k, t);
        let mut from = leaf;
        for j in 0..t {
            let to = state_of(&digits[j + 1..], &mut states);
            transitions.push((from, digits[j], to));
            from = to;
        }
    }
    transitions.sort_unstable();
    transitions.dedup();
    PartialDfa::from_transitions(states, k, 0, &[0], transitions)
}
