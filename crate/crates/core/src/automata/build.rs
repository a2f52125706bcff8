use std::collections::HashSet;

use super::PartialDfa;
use crate::error::{Error, Result};

/// Trie automaton for `(w_1 | … | w_M)*`: one state per proper prefix, with
/// the last symbol of each codeword looping back to the root. The root is
/// both initial and the only accepting state; states are numbered in order
/// of creation.
pub fn block_code_dfa(codewords: &[Vec<usize>], alphabet: usize) -> Result<PartialDfa> {
    let first = codewords.first().ok_or(Error::NoCodewords)?;
    let len = first.len();
    if len == 0 {
        return Err(Error::Domain("codewords must be non-empty".into()));
    }
    let mut seen = HashSet::new();
    for w in codewords {
        if w.len() != len {
            return Err(Error::UnequalLengths {
                expected: len,
                found: w.len(),
            });
        }
        if let Some(&x) = w.iter().find(|&&x| x >= alphabet) {
            return Err(Error::SymbolOutOfRange {
                symbol: x,
                alphabet,
            });
        }
        if !seen.insert(w.as_slice()) {
            return Err(Error::DuplicateCodeword(w.clone()));
        }
    }

    let mut transitions: Vec<(usize, usize, usize)> = Vec::new();
    let mut children: Vec<Vec<Option<usize>>> = vec![vec![None; alphabet]];
    for w in codewords {
        let mut state = 0;
        for &x in &w[..len - 1] {
            state = match children[state][x] {
                Some(t) => t,
                None => {
                    let t = children.len();
                    children.push(vec![None; alphabet]);
                    children[state][x] = Some(t);
                    transitions.push((state, x, t));
                    t
                }
            };
        }
        let last = w[len - 1];
        children[state][last] = Some(0);
        transitions.push((state, last, 0));
    }
    PartialDfa::from_transitions(children.len(), alphabet, 0, &[0], transitions)
}
