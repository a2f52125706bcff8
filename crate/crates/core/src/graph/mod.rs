//! Confusion graphs and the graph operations used to build capacity fixtures.
//!
//! Vertices are `0..n`. Products index the pair `(g, h)` as `g * |H| + h`
//! (row-major), so iterated powers index tuples as base-`|G|` numerals with
//! the first coordinate most significant.

mod io;
mod local;
mod mis;

pub use io::{named_graph, parse_graph, write_graph};
pub use mis::{
    automorphisms, independence_number, independence_number_seeded, is_independent,
    power_independence, power_independence_seeded, product_independence, IndependenceResult,
};

use crate::bitset::BitSet;
use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq)]
pub struct Graph {
    n: usize,
    adj: Vec<BitSet>,
}

impl std::fmt::Debug for Graph {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("Graph")
            .field("n", &self.n)
            .field("edges", &self.edges().collect::<Vec<_>>())
            .finish()
    }
}

/// A vertex of an iterated strong product, one coordinate per factor.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct VertexTuple(pub Vec<usize>);

impl VertexTuple {
    /// Decodes a row-major product index into coordinates.
    pub fn decode(mut index: usize, factor_sizes: &[usize]) -> Result<Self> {
        let total: usize = factor_sizes.iter().product();
        if index >= total {
            return Err(Error::VertexOutOfRange {
                vertex: index,
                n: total,
            });
        }
        let mut coords = vec![0; factor_sizes.len()];
        for (c, &size) in coords.iter_mut().zip(factor_sizes).rev() {
            *c = index % size;
            index /= size;
        }
        Ok(VertexTuple(coords))
    }

    pub fn encode(&self, factor_sizes: &[usize]) -> Result<usize> {
        if self.0.len() != factor_sizes.len() {
            return Err(Error::Dimension(format!(
                "tuple of length {} for {} factors",
                self.0.len(),
                factor_sizes.len()
            )));
        }
        let mut idx = 0;
        for (&c, &size) in self.0.iter().zip(factor_sizes) {
            if c >= size {
                return Err(Error::VertexOutOfRange { vertex: c, n: size });
            }
            idx = idx * size + c;
        }
        Ok(idx)
    }
}

impl Graph {
    /// Edgeless graph on `n` vertices.
    pub fn empty(n: usize) -> Self {
        Graph {
            n,
            adj: vec![BitSet::new(n); n],
        }
    }

    pub fn complete(n: usize) -> Self {
        let mut g = Self::empty(n);
        for u in 0..n {
            for v in u + 1..n {
                g.link(u, v);
            }
        }
        g
    }

    pub fn cycle(n: usize) -> Result<Self> {
        if n < 3 {
            return Err(Error::CycleTooSmall(n));
        }
        let mut g = Self::empty(n);
        for i in 0..n {
            g.link(i, (i + 1) % n);
        }
        Ok(g)
    }

    pub fn from_edges(n: usize, edges: impl IntoIterator<Item = (usize, usize)>) -> Result<Self> {
        let mut g = Self::empty(n);
        for (u, v) in edges {
            g.add_edge(u, v)?;
        }
        Ok(g)
    }

    /// Adds `{u, v}`; adding an existing edge is a no-op.
    pub fn add_edge(&mut self, u: usize, v: usize) -> Result<()> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        if u == v {
            return Err(Error::SelfLoop(u));
        }
        self.link(u, v);
        Ok(())
    }

    fn link(&mut self, u: usize, v: usize) {
        self.adj[u].insert(v);
        self.adj[v].insert(u);
    }

    fn check_vertex(&self, v: usize) -> Result<()> {
        if v >= self.n {
            Err(Error::VertexOutOfRange {
                vertex: v,
                n: self.n,
            })
        } else {
            Ok(())
        }
    }

    #[inline]
    pub fn n(&self) -> usize {
        self.n
    }

    #[inline]
    pub fn neighbors(&self, v: usize) -> &BitSet {
        &self.adj[v]
    }

    pub fn degree(&self, v: usize) -> usize {
        self.adj[v].count()
    }

    #[inline]
    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        u < self.n && self.adj[u].contains(v)
    }

    /// Edges as `(u, v)` with `u < v`, sorted.
    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        (0..self.n).flat_map(move |u| {
            self.adj[u]
                .iter()
                .filter(move |&v| v > u)
                .map(move |v| (u, v))
        })
    }

    pub fn edge_count(&self) -> usize {
        self.adj.iter().map(BitSet::count).sum::<usize>() / 2
    }

    /// Two symbols are confusable when they are equal or adjacent.
    pub fn confusable(&self, u: usize, v: usize) -> Result<bool> {
        self.check_vertex(u)?;
        self.check_vertex(v)?;
        Ok(u == v || self.adj[u].contains(v))
    }

    /// Unchecked variant for hot loops; callers guarantee both vertices are in range.
    #[inline]
    pub(crate) fn confusable_unchecked(&self, u: usize, v: usize) -> bool {
        u == v || self.adj[u].contains(v)
    }

    /// Strong product: distinct `(g, h)`, `(g', h')` are adjacent iff both
    /// coordinate pairs are confusable.
    pub fn strong_product(&self, other: &Graph) -> Graph {
        let m = other.n;
        let mut out = Graph::empty(self.n * m);
        for g in 0..self.n {
            let mut gs: Vec<usize> = self.adj[g].iter().collect();
            gs.push(g);
            for h in 0..m {
                let mut hs: Vec<usize> = other.adj[h].iter().collect();
                hs.push(h);
                let a = g * m + h;
                for &g2 in &gs {
                    for &h2 in &hs {
                        let b = g2 * m + h2;
                        if b != a {
                            out.adj[a].insert(b);
                        }
                    }
                }
            }
        }
        out
    }

    /// `k`-fold strong power; `k = 0` gives the one-vertex graph.
    pub fn strong_power(&self, k: usize) -> Graph {
        let mut out = Graph::empty(1);
        for _ in 0..k {
            out = out.strong_product(self);
        }
        out
    }

    /// Vertices of `other` are shifted by `self.n()`.
    pub fn disjoint_union(&self, other: &Graph) -> Graph {
        let mut out = Graph::empty(self.n + other.n);
        for (u, v) in self.edges() {
            out.link(u, v);
        }
        for (u, v) in other.edges() {
            out.link(u + self.n, v + self.n);
        }
        out
    }

    /// Disjoint union plus every edge between the two sides.
    pub fn join(&self, other: &Graph) -> Graph {
        let mut out = self.disjoint_union(other);
        for u in 0..self.n {
            for v in 0..other.n {
                out.link(u, self.n + v);
            }
        }
        out
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn brute_strong_edges(g: &Graph, h: &Graph) -> usize {
        let m = h.n();
        let total = g.n() * m;
        let mut count = 0;
        for a in 0..total {
            for b in a + 1..total {
                let (g1, h1) = (a / m, a % m);
                let (g2, h2) = (b / m, b % m);
                if g.confusable(g1, g2).unwrap() && h.confusable(h1, h2).unwrap() {
                    count += 1;
                }
            }
        }
        count
    }

    #[test]
    fn cycles() {
        let c3 = Graph::cycle(3).unwrap();
        assert_eq!(c3.edge_count(), 3);
        assert_eq!(c3, Graph::complete(3));
        assert_eq!(Graph::cycle(5).unwrap().edge_count(), 5);
        assert_eq!(Graph::cycle(7).unwrap().edge_count(), 7);
        assert!(matches!(Graph::cycle(2), Err(Error::CycleTooSmall(2))));
    }

    #[test]
    fn confusable_basics() {
        let c5 = Graph::cycle(5).unwrap();
        assert!(c5.confusable(0, 0).unwrap());
        assert!(c5.confusable(0, 1).unwrap());
        assert!(c5.confusable(4, 0).unwrap());
        assert!(!c5.confusable(0, 2).unwrap());
        assert!(c5.confusable(0, 5).is_err());
    }

    #[test]
    fn rejects_bad_edges() {
        assert!(matches!(
            Graph::from_edges(3, [(1, 1)]),
            Err(Error::SelfLoop(1))
        ));
        assert!(Graph::from_edges(3, [(0, 3)]).is_err());
        let g = Graph::from_edges(3, [(0, 1), (1, 0)]).unwrap();
        assert_eq!(g.edge_count(), 1);
    }

    #[test]
    fn strong_product_counts() {
        let c5 = Graph::cycle(5).unwrap();
        let k1 = Graph::complete(1);
        assert_eq!(c5.strong_product(&k1), c5);
        let p = c5.strong_product(&c5);
        assert_eq!(p.n(), 25);
        // brute-force enumeration over all 300 vertex pairs
        assert_eq!(brute_strong_edges(&c5, &c5), 100);
        assert_eq!(p.edge_count(), 100);
    }

    #[test]
    fn join_counts() {
        let c5 = Graph::cycle(5).unwrap();
        assert_eq!(c5.join(&Graph::empty(0)), c5);
        let j = c5.join(&Graph::complete(2));
        assert_eq!(j.n(), 7);
        assert_eq!(j.edge_count(), 16);
    }

    #[test]
    fn tuple_indexing() {
        let t = VertexTuple::decode(17, &[7, 7]).unwrap();
        assert_eq!(t, VertexTuple(vec![2, 3]));
        assert_eq!(t.encode(&[7, 7]).unwrap(), 17);
        assert!(VertexTuple::decode(49, &[7, 7]).is_err());
    }

    #[test]
    fn power_matches_product() {
        let c5 = Graph::cycle(5).unwrap();
        assert_eq!(c5.strong_power(2), c5.strong_product(&c5));
        assert_eq!(c5.strong_power(1), c5);
        assert_eq!(c5.strong_power(0).n(), 1);
    }
}
