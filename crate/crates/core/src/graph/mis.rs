//! Exact maximum independent set by bitset branch-and-bound.
//!
//! Each node colors the candidate set greedily into cliques of `G` (a clique
//! holds at most one vertex of any independent set, so the number of cliques
//! bounds what the subtree can still add) and branches on candidates in
//! reverse color order, pruning once `|current| + color <= |best|`.
//!
//! Strong products `G ⊠ H` get a second bound. Cut the candidates into
//! slices `P_g ⊆ V(H)`, one per vertex `g` of `G`. For any clique `Q` of `G`
//! the slices over `Q` hold at most `α(H[∪ P_g])` chosen vertices, so a
//! family of cliques covering every vertex of `G` exactly `t` times bounds
//! the remainder by `⌊Σ_Q α(H[∪_{g∈Q} P_g]) / t⌋`. The inner `α` values are
//! computed by the plain search and memoized by candidate mask. Powers
//! `G^⊠k` are sliced along every coordinate and the smallest bound is used.
//!
//! Powers also use orbital branching near the root over the automorphisms
//! that act on each coordinate and permute coordinates, and every top-level
//! search starts from an incumbent improved by local search.

use std::collections::HashMap;

use serde::Serialize;

use super::Graph;
use crate::bitset::BitSet;

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct IndependenceResult {
    pub size: usize,
    /// Sorted vertex list.
    pub witness: Vec<usize>,
    /// `true` when the search finished within budget, so `size` is α(G).
    pub exact: bool,
    pub nodes: u64,
}

pub fn is_independent(g: &Graph, set: &[usize]) -> bool {
    set.iter().all(|&v| v < g.n())
        && set
            .iter()
            .enumerate()
            .all(|(i, &u)| set[i + 1..].iter().all(|&v| u != v && !g.has_edge(u, v)))
}

/// Slice bound for a product `G ⊠ H`.
struct SliceBound {
    slice_len: usize,
    outer_len: usize,
    /// Ways of reading a product vertex as `(g, h)`; the bound is the
    /// minimum over all of them.
    views: Vec<Vec<(u32, u32)>>,
    /// Cliques of `G` covering each vertex exactly `multiplicity` times.
    cover: Vec<Vec<usize>>,
    multiplicity: usize,
    inner_adj: Vec<BitSet>,
    memo: HashMap<BitSet, usize>,
    inner_nodes: u64,
}

impl SliceBound {
    fn new(outer: &Graph, inner: &Graph) -> Self {
        let n = outer.n();
        let max_deg = (0..n).map(|v| outer.degree(v)).max().unwrap_or(0);
        let mut edge_cover = Vec::new();
        if max_deg > 0 {
            for (u, v) in outer.edges() {
                edge_cover.push(vec![u, v]);
            }
            for v in 0..n {
                for _ in outer.degree(v)..max_deg {
                    edge_cover.push(vec![v]);
                }
            }
        }
        // A greedy clique partition is better on dense factors such as K_n.
        let mut partition = Vec::new();
        let mut left = BitSet::full(n);
        while let Some(v) = left.first() {
            let mut clique = vec![v];
            left.remove(v);
            let mut open = left.clone();
            open.intersect_with(outer.neighbors(v));
            while let Some(u) = open.first() {
                clique.push(u);
                left.remove(u);
                open.remove(u);
                open.intersect_with(outer.neighbors(u));
            }
            partition.push(clique);
        }
        let (cover, multiplicity) = if max_deg > 0
            && (edge_cover.len() as f64) / (max_deg as f64) < partition.len() as f64
        {
            (edge_cover, max_deg)
        } else {
            (partition, 1)
        };
        let m = inner.n();
        let row_major = (0..n * m)
            .map(|v| ((v / m) as u32, (v % m) as u32))
            .collect();
        SliceBound {
            slice_len: m,
            outer_len: n,
            views: vec![row_major],
            cover,
            multiplicity,
            inner_adj: (0..inner.n()).map(|v| inner.neighbors(v).clone()).collect(),
            memo: HashMap::new(),
            inner_nodes: 0,
        }
    }

    fn bound(&mut self, cand: &BitSet) -> usize {
        (0..self.views.len())
            .map(|i| self.view_bound(i, cand))
            .min()
            .unwrap_or(0)
    }

    fn view_bound(&mut self, view: usize, cand: &BitSet) -> usize {
        let m = self.slice_len;
        let mut proj = vec![BitSet::new(m); self.outer_len];
        for v in cand.iter() {
            let (g, h) = self.views[view][v];
            proj[g as usize].insert(h as usize);
        }
        let mut total = 0;
        for qi in 0..self.cover.len() {
            let mut union = BitSet::new(m);
            for &g in &self.cover[qi] {
                union.union_with(&proj[g]);
            }
            total += self.inner_alpha(union);
        }
        total / self.multiplicity
    }

    fn inner_alpha(&mut self, cand: BitSet) -> usize {
        if cand.is_empty() {
            return 0;
        }
        if let Some(&a) = self.memo.get(&cand) {
            return a;
        }
        let mut search = Search::new(&self.inner_adj, greedy(&self.inner_adj, &cand), u64::MAX);
        search.expand(cand.clone());
        self.inner_nodes += search.nodes;
        let a = search.best.len();
        self.memo.insert(cand, a);
        a
    }
}

struct Search<'a> {
    adj: &'a [BitSet],
    best: Vec<usize>,
    current: Vec<usize>,
    nodes: u64,
    budget: u64,
    aborted: bool,
    slices: Option<SliceBound>,
    /// Automorphisms used for orbital branching near the root.
    perms: Vec<Vec<u32>>,
}

impl<'a> Search<'a> {
    fn new(adj: &'a [BitSet], best: Vec<usize>, budget: u64) -> Self {
        Search {
            adj,
            best,
            current: Vec::new(),
            nodes: 0,
            budget: budget.max(1),
            aborted: false,
            slices: None,
            perms: Vec::new(),
        }
    }

    fn spent(&self) -> u64 {
        self.nodes + self.slices.as_ref().map_or(0, |s| s.inner_nodes)
    }

    fn expand(&mut self, mut cand: BitSet) {
        self.nodes += 1;
        if self.spent() > self.budget {
            self.aborted = true;
            return;
        }
        let order = self.color(&cand);
        let Some(&(_, top)) = order.last() else {
            return;
        };
        if self.current.len() + top <= self.best.len() {
            return;
        }
        if let Some(slices) = self.slices.as_mut() {
            if self.current.len() + slices.bound(&cand) <= self.best.len() {
                return;
            }
        }
        for &(v, color) in order.iter().rev() {
            if self.current.len() + color <= self.best.len() {
                return;
            }
            self.current.push(v);
            let mut next = cand.clone();
            next.difference_with(&self.adj[v]);
            next.remove(v);
            if next.is_empty() {
                if self.current.len() > self.best.len() {
                    self.best = self.current.clone();
                }
            } else {
                self.expand(next);
            }
            self.current.pop();
            if self.aborted {
                return;
            }
            cand.remove(v);
        }
    }

    fn pruned(&mut self, cand: &BitSet) -> bool {
        let order = self.color(cand);
        let top = order.last().map_or(0, |&(_, c)| c);
        if self.current.len() + top <= self.best.len() {
            return true;
        }
        match self.slices.as_mut() {
            Some(slices) => self.current.len() + slices.bound(cand) <= self.best.len(),
            None => false,
        }
    }

    /// Orbital branching: `group` indexes the automorphisms fixing the
    /// decisions taken so far. Pick an orbit `O` of the candidates; either
    /// some vertex of `O` is chosen, and by symmetry it may be taken to be
    /// the representative, or all of `O` is discarded. Once the group is
    /// trivial the plain search takes over.
    fn expand_orbital(&mut self, mut cand: BitSet, group: Vec<usize>) {
        self.nodes += 1;
        if self.spent() > self.budget {
            self.aborted = true;
            return;
        }
        loop {
            if group.len() <= 1 {
                if !cand.is_empty() {
                    self.expand(cand);
                }
                return;
            }
            if cand.is_empty() || self.pruned(&cand) {
                return;
            }
            let orbit = self.largest_orbit(&cand, &group);
            let v = orbit.first().expect("orbits are non-empty");
            let fixing: Vec<usize> = group
                .iter()
                .copied()
                .filter(|&p| self.perms[p][v] as usize == v)
                .collect();
            self.current.push(v);
            let mut next = cand.clone();
            next.difference_with(&self.adj[v]);
            next.remove(v);
            if next.is_empty() {
                if self.current.len() > self.best.len() {
                    self.best = self.current.clone();
                }
            } else {
                self.expand_orbital(next, fixing);
            }
            self.current.pop();
            if self.aborted {
                return;
            }
            cand.difference_with(&orbit);
        }
    }

    fn largest_orbit(&self, cand: &BitSet, group: &[usize]) -> BitSet {
        let n = cand.capacity();
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(parent: &mut [usize], mut x: usize) -> usize {
            while parent[x] != x {
                parent[x] = parent[parent[x]];
                x = parent[x];
            }
            x
        }
        for &p in group {
            let perm = &self.perms[p];
            for v in cand.iter() {
                let a = find(&mut parent, v);
                let b = find(&mut parent, perm[v] as usize);
                if a != b {
                    parent[a.max(b)] = a.min(b);
                }
            }
        }
        let mut size = vec![0usize; n];
        for v in cand.iter() {
            size[find(&mut parent, v)] += 1;
        }
        let root = cand
            .iter()
            .map(|v| find(&mut parent, v))
            .max_by_key(|&r| (size[r], std::cmp::Reverse(r)))
            .expect("non-empty candidates");
        let mut orbit = BitSet::new(n);
        for v in cand.iter() {
            if find(&mut parent, v) == root {
                orbit.insert(v);
            }
        }
        orbit
    }

    /// Greedy clique cover of `cand`; returns `(vertex, color)` in color
    /// order, omitting vertices whose color is too small to ever matter.
    fn color(&self, cand: &BitSet) -> Vec<(usize, usize)> {
        let kmin = (self.best.len() + 1)
            .saturating_sub(self.current.len())
            .max(1);
        let mut out = Vec::with_capacity(cand.count());
        let mut uncolored = cand.clone();
        let mut color = 0;
        while !uncolored.is_empty() {
            color += 1;
            let mut open = uncolored.clone();
            while let Some(v) = open.first() {
                uncolored.remove(v);
                open.remove(v);
                open.intersect_with(&self.adj[v]);
                if color >= kmin {
                    out.push((v, color));
                }
            }
        }
        out
    }
}

/// Maximum independent set with a cap of `budget` search-tree nodes.
///
/// On budget exhaustion the best set found so far is returned with
/// `exact = false`; it is still a valid independent set.
pub fn independence_number(g: &Graph, budget: u64) -> IndependenceResult {
    independence_number_seeded(g, budget, 0)
}

/// [`independence_number`] with the local search seeded by `seed`.
pub fn independence_number_seeded(g: &Graph, budget: u64, seed: u64) -> IndependenceResult {
    let n = g.n();
    // Low-degree vertices first; they get small labels and are colored early.
    let mut order: Vec<usize> = (0..n).collect();
    order.sort_by_key(|&v| (g.degree(v), v));
    let mut pos = vec![0; n];
    for (i, &v) in order.iter().enumerate() {
        pos[v] = i;
    }
    let adj: Vec<BitSet> = order
        .iter()
        .map(|&v| {
            let mut row = BitSet::new(n);
            for u in g.neighbors(v).iter() {
                row.insert(pos[u]);
            }
            row
        })
        .collect();

    let all = BitSet::full(n);
    let mut search = Search::new(&adj, incumbent(&adj, &all, seed), budget);
    if n > 0 {
        search.expand(all);
    }
    finish(search, |i| order[i])
}

/// Maximum independent set of `outer ⊠ inner` (row-major indices), using
/// the slice bound on top of the coloring bound.
pub fn product_independence(outer: &Graph, inner: &Graph, budget: u64) -> IndependenceResult {
    product_search(outer, inner, Vec::new(), None, budget, 0)
}

fn product_search(
    outer: &Graph,
    inner: &Graph,
    perms: Vec<Vec<u32>>,
    power: Option<usize>,
    budget: u64,
    seed: u64,
) -> IndependenceResult {
    let product = outer.strong_product(inner);
    let n = product.n();
    let adj: Vec<BitSet> = (0..n).map(|v| product.neighbors(v).clone()).collect();
    let all = BitSet::full(n);
    let mut search = Search::new(&adj, incumbent(&adj, &all, seed), budget);
    let mut slices = SliceBound::new(outer, inner);
    if let Some(k) = power {
        slices.views = coordinate_views(outer.n(), k);
    }
    search.slices = Some(slices);
    let group: Vec<usize> = (0..perms.len()).collect();
    search.perms = perms;
    if n > 0 {
        search.expand_orbital(all, group);
    }
    finish(search, |i| i)
}

/// Groups larger than this are replaced by the coordinate permutations alone.
const MAX_GROUP: usize = 200_000;

/// `α(G^⊠k)`: the plain search for `k ≤ 2`; beyond that the product search
/// on `G ⊠ G^⊠(k-1)` with orbital branching over the automorphisms that
/// act on coordinates independently and permute them. Witness indices are
/// row-major in `G^⊠k`.
pub fn power_independence(g: &Graph, k: usize, budget: u64) -> IndependenceResult {
    power_independence_seeded(g, k, budget, 0)
}

/// [`power_independence`] with the local search seeded by `seed`.
pub fn power_independence_seeded(
    g: &Graph,
    k: usize,
    budget: u64,
    seed: u64,
) -> IndependenceResult {
    if k <= 2 {
        return independence_number_seeded(&g.strong_power(k), budget, seed);
    }
    let auts = automorphisms(g, MAX_GROUP);
    let perms = power_symmetries(g.n(), k, auts.as_deref());
    product_search(g, &g.strong_power(k - 1), perms, Some(k), budget, seed)
}

/// For each coordinate `c` of `G^⊠k`, reads a vertex as (coordinate `c`,
/// the remaining coordinates in order).
fn coordinate_views(n: usize, k: usize) -> Vec<Vec<(u32, u32)>> {
    let total = n.pow(k as u32);
    (0..k)
        .map(|c| {
            (0..total)
                .map(|v| {
                    let mut coords = vec![0; k];
                    let mut rest = v;
                    for x in coords.iter_mut().rev() {
                        *x = rest % n;
                        rest /= n;
                    }
                    let inner = coords
                        .iter()
                        .enumerate()
                        .filter(|&(i, _)| i != c)
                        .fold(0, |acc, (_, &x)| acc * n + x);
                    (coords[c] as u32, inner as u32)
                })
                .collect()
        })
        .collect()
}

/// All automorphisms of `g`, or `None` if there are more than `limit`.
pub fn automorphisms(g: &Graph, limit: usize) -> Option<Vec<Vec<usize>>> {
    fn extend(
        g: &Graph,
        map: &mut Vec<usize>,
        used: &mut Vec<bool>,
        out: &mut Vec<Vec<usize>>,
        limit: usize,
    ) -> bool {
        let v = map.len();
        if v == g.n() {
            out.push(map.clone());
            return out.len() <= limit;
        }
        for w in 0..g.n() {
            if used[w] || g.degree(w) != g.degree(v) {
                continue;
            }
            if (0..v).all(|u| g.has_edge(u, v) == g.has_edge(map[u], w)) {
                map.push(w);
                used[w] = true;
                let ok = extend(g, map, used, out, limit);
                map.pop();
                used[w] = false;
                if !ok {
                    return false;
                }
            }
        }
        true
    }
    let mut out = Vec::new();
    let ok = extend(g, &mut Vec::new(), &mut vec![false; g.n()], &mut out, limit);
    ok.then_some(out)
}

fn power_symmetries(n: usize, k: usize, auts: Option<&[Vec<usize>]>) -> Vec<Vec<u32>> {
    let identity = [(0..n).collect::<Vec<usize>>()];
    let auts = match auts {
        Some(a)
            if a.len()
                .checked_pow(k as u32)
                .is_some_and(|s| s * factorial(k) <= MAX_GROUP) =>
        {
            a
        }
        _ => &identity[..],
    };
    let total = n.pow(k as u32);
    let coord_perms = sequences(k, k, true);
    let choices = sequences(k, auts.len(), false);
    let mut perms = Vec::with_capacity(coord_perms.len() * choices.len());
    let mut coords = vec![0usize; k];
    for sigma in &coord_perms {
        for choice in &choices {
            let perm: Vec<u32> = (0..total)
                .map(|mut idx| {
                    for c in coords.iter_mut().rev() {
                        *c = idx % n;
                        idx /= n;
                    }
                    let mut image = 0;
                    for i in 0..k {
                        image = image * n + auts[choice[i]][coords[sigma[i]]];
                    }
                    image as u32
                })
                .collect();
            perms.push(perm);
        }
    }
    perms
}

/// Length-`len` sequences over `0..base` in lexicographic order, optionally
/// without repeats.
fn sequences(len: usize, base: usize, distinct: bool) -> Vec<Vec<usize>> {
    let mut out = vec![Vec::new()];
    for _ in 0..len {
        let mut next = Vec::new();
        for seq in &out {
            for x in 0..base {
                if !(distinct && seq.contains(&x)) {
                    let mut s = seq.clone();
                    s.push(x);
                    next.push(s);
                }
            }
        }
        out = next;
    }
    out
}

fn factorial(k: usize) -> usize {
    (1..=k).product()
}

fn finish(search: Search<'_>, label: impl Fn(usize) -> usize) -> IndependenceResult {
    let mut witness: Vec<usize> = search.best.iter().map(|&i| label(i)).collect();
    witness.sort_unstable();
    IndependenceResult {
        size: witness.len(),
        witness,
        exact: !search.aborted,
        nodes: search.spent(),
    }
}

/// Local search rounds per vertex when seeding a top-level search.
const LOCAL_ROUNDS_PER_VERTEX: usize = 40;

fn incumbent(adj: &[BitSet], cand: &BitSet, seed: u64) -> Vec<usize> {
    let start = greedy(adj, cand);
    if cand.count() == adj.len() {
        super::local::improve(adj, &start, LOCAL_ROUNDS_PER_VERTEX * adj.len(), seed)
    } else {
        start
    }
}

fn greedy(adj: &[BitSet], cand: &BitSet) -> Vec<usize> {
    let mut free = cand.clone();
    let mut out = Vec::new();
    while let Some(v) = free.first() {
        out.push(v);
        free.difference_with(&adj[v]);
        free.remove(v);
    }
    out
}
