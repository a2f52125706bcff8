//! Partial DFAs over a graph alphabet.
//!
//! A missing transition rejects immediately. Symbols are vertices of the
//! confusion graph, so the alphabet is `0..k`.

mod build;
mod growth;
mod io;

pub use build::block_code_dfa;
pub use growth::{
    growth_rate, growth_rate_simple, simplify, strongly_connected_components, SimplifiedDfa,
};
pub use io::{parse_dfa, write_dfa};

use std::collections::VecDeque;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct PartialDfa {
    states: usize,
    alphabet: usize,
    /// Row-major `states × alphabet` transition table.
    delta: Vec<Option<usize>>,
    initial: usize,
    accepting: Vec<usize>,
}

/// `entries[s][t]` counts the symbols taking `s` to `t`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ReducedMatrix(pub Vec<Vec<u32>>);

impl ReducedMatrix {
    pub fn to_dmatrix(&self) -> nalgebra::DMatrix<f64> {
        let d = self.0.len();
        nalgebra::DMatrix::from_fn(d, d, |i, j| f64::from(self.0[i][j]))
    }

    pub fn row_sum(&self, s: usize) -> u32 {
        self.0[s].iter().sum()
    }
}

impl PartialDfa {
    /// Automaton with no transitions defined yet.
    pub fn new(
        states: usize,
        alphabet: usize,
        initial: usize,
        accepting: &[usize],
    ) -> Result<Self> {
        if initial >= states {
            return Err(Error::StateOutOfRange {
                state: initial,
                states,
            });
        }
        let mut acc = accepting.to_vec();
        acc.sort_unstable();
        acc.dedup();
        if let Some(&bad) = acc.iter().find(|&&s| s >= states) {
            return Err(Error::StateOutOfRange { state: bad, states });
        }
        Ok(PartialDfa {
            states,
            alphabet,
            delta: vec![None; states * alphabet],
            initial,
            accepting: acc,
        })
    }

    /// Builds from `(from, symbol, to)` triples.
    pub fn from_transitions(
        states: usize,
        alphabet: usize,
        initial: usize,
        accepting: &[usize],
        transitions: impl IntoIterator<Item = (usize, usize, usize)>,
    ) -> Result<Self> {
        let mut dfa = Self::new(states, alphabet, initial, accepting)?;
        for (s, x, t) in transitions {
            dfa.set(s, x, Some(t))?;
        }
        Ok(dfa)
    }

    pub fn set(&mut self, s: usize, x: usize, target: Option<usize>) -> Result<()> {
        self.check_state(s)?;
        if x >= self.alphabet {
            return Err(Error::SymbolOutOfRange {
                symbol: x,
                alphabet: self.alphabet,
            });
        }
        if let Some(t) = target {
            self.check_state(t)?;
        }
        self.delta[s * self.alphabet + x] = target;
        Ok(())
    }

    fn check_state(&self, s: usize) -> Result<()> {
        if s >= self.states {
            Err(Error::StateOutOfRange {
                state: s,
                states: self.states,
            })
        } else {
            Ok(())
        }
    }

    #[inline]
    pub fn states(&self) -> usize {
        self.states
    }

    #[inline]
    pub fn alphabet(&self) -> usize {
        self.alphabet
    }

    #[inline]
    pub fn initial(&self) -> usize {
        self.initial
    }

    pub fn accepting(&self) -> &[usize] {
        &self.accepting
    }

    pub fn is_accepting(&self, s: usize) -> bool {
        self.accepting.binary_search(&s).is_ok()
    }

    /// Bounds-checked lookup; out-of-range arguments give `None`.
    pub fn next_checked(&self, s: usize, x: usize) -> Option<usize> {
        if s < self.states && x < self.alphabet {
            self.next(s, x)
        } else {
            None
        }
    }

    #[inline]
    pub fn next(&self, s: usize, x: usize) -> Option<usize> {
        self.delta[s * self.alphabet + x]
    }

    /// Defined transitions as `(from, symbol, to)`, ordered by state then symbol.
    pub fn transitions(&self) -> impl Iterator<Item = (usize, usize, usize)> + '_ {
        self.delta
            .iter()
            .enumerate()
            .filter_map(move |(i, t)| t.map(|t| (i / self.alphabet, i % self.alphabet, t)))
    }

    pub fn transition_count(&self) -> usize {
        self.delta.iter().filter(|t| t.is_some()).count()
    }

    /// State reached on `word`, or `None` if the run falls off the table or
    /// a symbol is out of range.
    pub fn run_from(&self, start: usize, word: &[usize]) -> Option<usize> {
        word.iter().try_fold(start, |s, &x| {
            if x < self.alphabet {
                self.next(s, x)
            } else {
                None
            }
        })
    }

    pub fn accepts(&self, word: &[usize]) -> bool {
        self.run_from(self.initial, word)
            .is_some_and(|s| self.is_accepting(s))
    }

    pub fn reduced_matrix(&self) -> ReducedMatrix {
        let mut r = vec![vec![0u32; self.states]; self.states];
        for (s, _, t) in self.transitions() {
            r[s][t] += 1;
        }
        ReducedMatrix(r)
    }

    /// Reversible: no symbol maps two states to the same target, i.e. every
    /// transition matrix is a subpermutation matrix.
    pub fn is_reversible(&self) -> bool {
        let mut seen = vec![usize::MAX; self.states];
        for x in 0..self.alphabet {
            for s in 0..self.states {
                if let Some(t) = self.next(s, x) {
                    if seen[t] == x {
                        return false;
                    }
                    seen[t] = x;
                }
            }
        }
        true
    }

    /// States reachable from `start` by defined transitions.
    pub fn reachable_from(&self, start: usize) -> Vec<bool> {
        let mut seen = vec![false; self.states];
        let mut queue = VecDeque::from([start]);
        seen[start] = true;
        while let Some(s) = queue.pop_front() {
            for x in 0..self.alphabet {
                if let Some(t) = self.next(s, x) {
                    if !seen[t] {
                        seen[t] = true;
                        queue.push_back(t);
                    }
                }
            }
        }
        seen
    }

    /// States from which some state in `targets` is reachable.
    pub fn coreachable_to(&self, targets: &[usize]) -> Vec<bool> {
        let mut rev: Vec<Vec<usize>> = vec![Vec::new(); self.states];
        for (s, _, t) in self.transitions() {
            rev[t].push(s);
        }
        let mut seen = vec![false; self.states];
        let mut queue: VecDeque<usize> = targets.iter().copied().collect();
        for &t in targets {
            seen[t] = true;
        }
        while let Some(t) = queue.pop_front() {
            for &s in &rev[t] {
                if !seen[s] {
                    seen[s] = true;
                    queue.push_back(s);
                }
            }
        }
        seen
    }

    /// Shortest word (then lexicographically least) from `from` to `to`.
    pub fn shortest_word(&self, from: usize, to: usize) -> Option<Vec<usize>> {
        let mut parent: Vec<Option<(usize, usize)>> = vec![None; self.states];
        let mut seen = vec![false; self.states];
        seen[from] = true;
        let mut queue = VecDeque::from([from]);
        while let Some(s) = queue.pop_front() {
            if s == to {
                let mut word = Vec::new();
                let mut cur = s;
                while cur != from {
                    let (p, x) = parent[cur].expect("parent on BFS tree");
                    word.push(x);
                    cur = p;
                }
                word.reverse();
                return Some(word);
            }
            for x in 0..self.alphabet {
                if let Some(t) = self.next(s, x) {
                    if !seen[t] {
                        seen[t] = true;
                        parent[t] = Some((s, x));
                        queue.push_back(t);
                    }
                }
            }
        }
        None
    }

    /// Number of accepted words of each length `0..=n`, by dynamic
    /// programming over the reduced matrix.
    pub fn word_counts(&self, n: usize) -> Vec<u128> {
        let r = self.reduced_matrix();
        let mut v = vec![0u128; self.states];
        v[self.initial] = 1;
        let mut out = Vec::with_capacity(n + 1);
        for step in 0..=n {
            out.push(self.accepting.iter().map(|&a| v[a]).sum());
            if step == n {
                break;
            }
            let mut next = vec![0u128; self.states];
            for (s, &vs) in v.iter().enumerate() {
                if vs == 0 {
                    continue;
                }
                for (t, &c) in r.0[s].iter().enumerate() {
                    next[t] += vs * u128::from(c);
                }
            }
            v = next;
        }
        out
    }

    /// Copy restricted to `keep` (in ascending order), renumbered densely.
    /// Transitions leaving the kept set become undefined.
    pub(crate) fn restrict(
        &self,
        keep: &[usize],
        initial: usize,
        accepting: &[usize],
    ) -> PartialDfa {
        let mut index = vec![usize::MAX; self.states];
        for (i, &s) in keep.iter().enumerate() {
            index[s] = i;
        }
        let mut out = PartialDfa {
            states: keep.len(),
            alphabet: self.alphabet,
            delta: vec![None; keep.len() * self.alphabet],
            initial: index[initial],
            accepting: accepting.iter().map(|&a| index[a]).collect(),
        };
        out.accepting.sort_unstable();
        for (i, &s) in keep.iter().enumerate() {
            for x in 0..self.alphabet {
                if let Some(t) = self.next(s, x) {
                    if index[t] != usize::MAX {
                        out.delta[i * self.alphabet + x] = Some(index[t]);
                    }
                }
            }
        }
        out
    }

    /// Same machine with states renamed by `perm` (`perm[old] = new`).
    pub fn relabel(&self, perm: &[usize]) -> Result<PartialDfa> {
        let mut check = perm.to_vec();
        check.sort_unstable();
        if check != (0..self.states).collect::<Vec<_>>() {
            return Err(Error::Domain("relabeling is not a permutation".into()));
        }
        let mut out = PartialDfa::new(
            self.states,
            self.alphabet,
            perm[self.initial],
            &self.accepting.iter().map(|&a| perm[a]).collect::<Vec<_>>(),
        )?;
        for (s, x, t) in self.transitions() {
            out.delta[perm[s] * self.alphabet + x] = Some(perm[t]);
        }
        Ok(out)
    }
}
