//! Iterated local search for large independent sets, used to seed the exact
//! search with a strong incumbent.

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use crate::bitset::BitSet;

struct State<'a> {
    adj: &'a [BitSet],
    nbrs: Vec<Vec<usize>>,
    in_set: Vec<bool>,
    /// Number of neighbours in the current set.
    tight: Vec<u32>,
    size: usize,
}

impl<'a> State<'a> {
    fn insert(&mut self, v: usize) {
        self.in_set[v] = true;
        self.size += 1;
        for &u in &self.nbrs[v] {
            self.tight[u] += 1;
        }
    }

    fn remove(&mut self, v: usize) {
        self.in_set[v] = false;
        self.size -= 1;
        for &u in &self.nbrs[v] {
            self.tight[u] -= 1;
        }
    }

    fn add_free(&mut self, order: &[usize]) {
        for &v in order {
            if !self.in_set[v] && self.tight[v] == 0 {
                self.insert(v);
            }
        }
    }

    /// Replaces one set vertex by two of its 1-tight neighbours, if possible.
    fn two_improvement(&mut self) -> bool {
        let n = self.in_set.len();
        for x in 0..n {
            if !self.in_set[x] {
                continue;
            }
            let ones: Vec<usize> = self.nbrs[x]
                .iter()
                .copied()
                .filter(|&u| self.tight[u] == 1)
                .collect();
            for (i, &u) in ones.iter().enumerate() {
                if let Some(&w) = ones[i + 1..].iter().find(|&&w| !self.adj[u].contains(w)) {
                    self.remove(x);
                    self.insert(u);
                    self.insert(w);
                    return true;
                }
            }
        }
        false
    }

    fn local_optimum(&mut self, order: &[usize]) {
        self.add_free(order);
        while self.two_improvement() {
            self.add_free(order);
        }
    }

    fn members(&self) -> Vec<usize> {
        (0..self.in_set.len()).filter(|&v| self.in_set[v]).collect()
    }

    fn load(&mut self, set: &[usize]) {
        for v in self.members() {
            self.remove(v);
        }
        for &v in set {
            self.insert(v);
        }
    }
}

/// Improves the independent set `start` by 2-improvements and random forced
/// insertions for `iterations` rounds; deterministic for a given `seed`.
pub(crate) fn improve(adj: &[BitSet], start: &[usize], iterations: usize, seed: u64) -> Vec<usize> {
    let n = adj.len();
    if n == 0 {
        return Vec::new();
    }
    let mut st = State {
        adj,
        nbrs: adj.iter().map(|a| a.iter().collect()).collect(),
        in_set: vec![false; n],
        tight: vec![0; n],
        size: 0,
    };
    st.load(start);
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut order: Vec<usize> = (0..n).collect();
    st.local_optimum(&order);
    let mut best = st.members();
    for _ in 0..iterations {
        if st.size + 1 < best.len() {
            st.load(&best);
        }
        let v = rng.gen_range(0..n);
        if st.in_set[v] {
            continue;
        }
        for u in st.nbrs[v].clone() {
            if st.in_set[u] {
                st.remove(u);
            }
        }
        st.insert(v);
        order.shuffle(&mut rng);
        st.local_optimum(&order);
        if st.size > best.len() {
            best = st.members();
        }
    }
    best
}
