//! Exhaustive search over small reversible automata.
//!
//! Transition slots are filled row by row. Each slot tries its options in
//! a fixed preference order, and early passes allow only a few deviations
//! from that order (limited discrepancy search), so good machines turn up
//! long before the final unrestricted pass. A pass that never hits its
//! deviation limit has seen everything.

use crate::automata::{strongly_connected_components, PartialDfa};
use crate::error::Result;
use crate::graph::Graph;
use crate::spectral;
use crate::verify::has_split;

use super::{rev_report, BoundReport};

const TIE_TOL: f64 = 1e-9;
/// Passes with a bounded number of deviations from the preferred option
/// order before the unrestricted pass.
const LIMITED_PASSES: usize = 6;

#[derive(Clone, Debug, PartialEq)]
pub struct SearchOutcome {
    /// Best machine found: state 0 is initial and the only accepting state.
    pub best: Option<PartialDfa>,
    pub growth: f64,
    pub nodes: u64,
    pub exhaustive: bool,
}

struct Enumerator<'a> {
    g: &'a Graph,
    d: usize,
    k: usize,
    canonical: bool,
    table: Vec<Option<usize>>,
    /// `incoming[t * k + x]`: some state already maps to `t` on `x`.
    incoming: Vec<bool>,
    used: usize,
    budget: u64,
    nodes: u64,
    aborted: bool,
    best_growth: f64,
    best: Option<(usize, Vec<Option<usize>>)>,
    /// Stop once a machine reaches this growth; nothing can exceed it.
    ceiling: f64,
    /// Some branch was skipped for lack of slack in the current pass.
    cut: bool,
}

impl<'a> Enumerator<'a> {
    fn new(g: &'a Graph, d: usize, canonical: bool, budget: u64) -> Self {
        let k = g.n();
        Enumerator {
            g,
            d,
            k,
            canonical,
            table: vec![None; d * k],
            incoming: vec![false; d * k],
            used: if canonical { 1 } else { d },
            budget,
            nodes: 0,
            aborted: false,
            best_growth: 0.0,
            best: None,
            ceiling: capacity_ceiling(g),
            cut: false,
        }
    }

    fn machine(&self, states: usize) -> PartialDfa {
        let mut m = PartialDfa::new(states, self.k, 0, &[0]).expect("state 0 exists");
        for s in 0..states {
            for x in 0..self.k {
                if let Some(t) = self.table[s * self.k + x] {
                    m.set(s, x, Some(t))
                        .expect("targets are below the state count");
                }
            }
        }
        m
    }

    /// Decided states that can no longer reach state 0 rule out strong
    /// connectivity. Rows at or after `row` are still open and count as
    /// able to reach anything.
    fn can_still_close(&self, row: usize) -> bool {
        let mut reaches = vec![false; self.used];
        reaches[0] = true;
        for s in row..self.used {
            reaches[s] = true;
        }
        let mut changed = true;
        while changed {
            changed = false;
            for s in 0..row.min(self.used) {
                if reaches[s] {
                    continue;
                }
                let hit = (0..self.k).any(|x| {
                    self.table[s * self.k + x].is_some_and(|t| t < self.used && reaches[t])
                });
                if hit {
                    reaches[s] = true;
                    changed = true;
                }
            }
        }
        reaches.iter().all(|&r| r)
    }

    /// Options for slot `pos` in preference order: back to the initial
    /// state, a fresh state, undefined, then the other existing states.
    fn options(&self, row: usize) -> Vec<Option<usize>> {
        let mut out = Vec::with_capacity(self.used + 2);
        let fresh = (self.canonical && self.used < self.d).then_some(self.used);
        if row == 0 {
            out.extend(fresh.map(Some));
            out.extend((0..self.used).map(Some));
            out.push(None);
        } else {
            out.push(Some(0));
            out.extend(fresh.map(Some));
            out.push(None);
            out.extend((1..self.used).map(Some));
        }
        out
    }

    /// Depth-first over slots in row-major order; taking any option but the
    /// first viable one spends one unit of `slack`.
    fn run(&mut self, pos: usize, slack: usize) {
        self.nodes += 1;
        if self.nodes > self.budget {
            self.aborted = true;
            return;
        }
        let row = pos / self.k;
        if pos.is_multiple_of(self.k) && !self.can_still_close(row) {
            return;
        }
        if pos == self.d * self.k || (self.canonical && row >= self.used) {
            self.evaluate();
            return;
        }
        let x = pos % self.k;
        let mut viable = 0;
        for opt in self.options(row) {
            if let Some(t) = opt {
                if self.incoming[t * self.k + x] {
                    continue;
                }
            }
            self.assign(pos, opt);
            if opt.is_none() || self.still_valid() {
                if viable > 0 && slack == 0 {
                    self.cut = true;
                    self.unassign(pos, opt);
                    return;
                }
                let rest = if viable > 0 { slack - 1 } else { slack };
                viable += 1;
                self.run(pos + 1, rest);
            }
            self.unassign(pos, opt);
            if self.aborted || self.done() {
                return;
            }
        }
    }

    fn assign(&mut self, pos: usize, opt: Option<usize>) {
        if let Some(t) = opt {
            self.table[pos] = Some(t);
            self.incoming[t * self.k + pos % self.k] = true;
            if self.canonical && t == self.used {
                self.used += 1;
            }
        }
    }

    fn unassign(&mut self, pos: usize, opt: Option<usize>) {
        if let Some(t) = opt {
            if self.canonical && t + 1 == self.used && !self.used_elsewhere(pos, t) {
                self.used -= 1;
            }
            self.incoming[t * self.k + pos % self.k] = false;
            self.table[pos] = None;
        }
    }

    /// Whether `t` is the target of some slot before `pos`.
    fn used_elsewhere(&self, pos: usize, t: usize) -> bool {
        t == 0 || self.table[..pos].contains(&Some(t))
    }

    fn done(&self) -> bool {
        self.best_growth >= self.ceiling - TIE_TOL
    }

    fn still_valid(&self) -> bool {
        !has_split(self.g, &self.machine(self.used)).unwrap_or(true)
    }

    fn evaluate(&mut self) {
        let states = self.used;
        let m = self.machine(states);
        if m.transition_count() == 0 {
            return;
        }
        let all = vec![true; states];
        if strongly_connected_components(&m, &all).len() != 1 {
            return;
        }
        let growth = spectral::spectral_radius(&m.reduced_matrix().to_dmatrix());
        let table = self.table[..states * self.k].to_vec();
        let better = match &self.best {
            None => true,
            Some((_, best_table)) => {
                growth > self.best_growth + TIE_TOL
                    || (growth >= self.best_growth - TIE_TOL && table < *best_table)
            }
        };
        if better {
            self.best_growth = self.best_growth.max(growth);
            self.best = Some((states, table));
        }
    }

    fn outcome(self) -> SearchOutcome {
        let best = self.best.as_ref().map(|(states, table)| {
            let mut m = PartialDfa::new(*states, self.k, 0, &[0]).expect("state 0 exists");
            for s in 0..*states {
                for x in 0..self.k {
                    m.set(s, x, table[s * self.k + x]).expect("valid table");
                }
            }
            m
        });
        SearchOutcome {
            best,
            growth: self.best_growth,
            nodes: self.nodes,
            exhaustive: !self.aborted,
        }
    }
}

/// Upper bound on the capacity of `g`, hence on the growth of any valid
/// machine: for regular graphs the ratio bound `n·(−λ_min)/(λ_max − λ_min)`
/// on the adjacency spectrum, which dominates the Lovász number; otherwise
/// the alphabet size.
pub fn capacity_ceiling(g: &Graph) -> f64 {
    let n = g.n();
    let deg = g.degree(0);
    if n == 0 || deg == 0 || (0..n).any(|v| g.degree(v) != deg) {
        return n as f64;
    }
    let a = nalgebra::DMatrix::from_fn(n, n, |i, j| if g.has_edge(i, j) { 1.0 } else { 0.0 });
    let eig = crate::spectral::symmetric_eigen(&a).0;
    let min = eig.iter().copied().fold(f64::INFINITY, f64::min);
    let ratio = n as f64 * -min / (deg as f64 - min);
    ratio.min(n as f64)
}

/// Best valid, strongly connected, reversible machine on at most `d` states
/// by growth rate, ties broken towards the lexicographically smallest
/// transition table. States are numbered in order of first appearance when
/// scanning rows and symbols, which removes relabelings.
pub fn search_reversible(g: &Graph, d: usize, budget: u64) -> Result<BoundReport> {
    let out = run(g, d, true, budget)?;
    let best = out.best.expect("a one-state loop is always valid");
    Ok(rev_report(g, best, out.nodes, out.exhaustive))
}

/// Same search without canonical numbering: every table on exactly `d`
/// states, keeping only machines in which every state is reachable.
pub fn search_reversible_naive(g: &Graph, d: usize, budget: u64) -> Result<SearchOutcome> {
    run(g, d, false, budget)
}

fn run(g: &Graph, d: usize, canonical: bool, budget: u64) -> Result<SearchOutcome> {
    if d == 0 {
        return Err(crate::Error::Domain(
            "at least one state is required".into(),
        ));
    }
    if g.n() == 0 {
        return Err(crate::Error::Domain("the graph has no vertices".into()));
    }
    let mut e = Enumerator::new(g, d, canonical, budget);
    for slack in (0..LIMITED_PASSES).chain([usize::MAX]) {
        e.cut = false;
        e.run(0, slack);
        if !e.cut || e.aborted || e.done() {
            break;
        }
    }
    Ok(e.outcome())
}
