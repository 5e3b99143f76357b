use std::cmp::Ordering;
use std::collections::{BinaryHeap, HashMap};

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// An undirected spanner edge. `r = len / (2s + 2)` is the radius of the two
/// balls the edge covers.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
pub struct Edge {
    pub u: usize,
    pub v: usize,
    pub len: f64,
    pub seq: u64,
    pub r: f64,
}

impl Edge {
    /// The endpoint opposite `x`, if `x` is an endpoint.
    pub fn other(&self, x: usize) -> Option<usize> {
        if x == self.u {
            Some(self.v)
        } else if x == self.v {
            Some(self.u)
        } else {
            None
        }
    }
}

/// Ball radius for an edge of length `len` under separation `s`.
#[inline]
pub fn cover_radius(len: f64, s: f64) -> f64 {
    len / (2.0 * s + 2.0)
}

fn key(u: usize, v: usize) -> (usize, usize) {
    (u.min(v), u.max(v))
}

#[derive(Clone, Debug)]
pub struct SpannerGraph {
    n: usize,
    s: f64,
    edges: Vec<Option<Edge>>,
    adj: Vec<Vec<usize>>,
    lookup: HashMap<(usize, usize), usize>,
    next_seq: u64,
}

impl SpannerGraph {
    pub fn new(n: usize, s: f64) -> Self {
        SpannerGraph {
            n,
            s,
            edges: Vec::new(),
            adj: vec![Vec::new(); n],
            lookup: HashMap::new(),
            next_seq: 0,
        }
    }

    pub fn n(&self) -> usize {
        self.n
    }

    pub fn s(&self) -> f64 {
        self.s
    }

    /// Grows the vertex set to `n` (never shrinks).
    pub fn grow(&mut self, n: usize) {
        if n > self.n {
            self.adj.resize(n, Vec::new());
            self.n = n;
        }
    }

    /// Adds edge `(u, v)` with the next build index.
    pub fn add_edge(&mut self, u: usize, v: usize, len: f64) -> Result<Edge> {
        let seq = self.next_seq;
        self.insert(u, v, len, seq)
    }

    /// Adds an edge with an explicit build index (used when importing).
    pub fn insert(&mut self, u: usize, v: usize, len: f64, seq: u64) -> Result<Edge> {
        if u >= self.n {
            return Err(Error::IdOutOfRange(u, self.n));
        }
        if v >= self.n {
            return Err(Error::IdOutOfRange(v, self.n));
        }
        if u == v {
            return Err(Error::SelfLoop(u, v));
        }
        if self.lookup.contains_key(&key(u, v)) {
            return Err(Error::DuplicateEdge(u, v));
        }
        if seq < self.next_seq && self.edges().any(|e| e.seq == seq) {
            return Err(Error::Parse(format!("duplicate build index {seq}")));
        }
        let e = Edge {
            u,
            v,
            len,
            seq,
            r: cover_radius(len, self.s),
        };
        let slot = self.edges.len();
        self.edges.push(Some(e));
        self.adj[u].push(slot);
        self.adj[v].push(slot);
        self.lookup.insert(key(u, v), slot);
        self.next_seq = self.next_seq.max(seq + 1);
        Ok(e)
    }

    /// Removes every edge incident to `x`, returning them in build order.
    pub fn remove_incident(&mut self, x: usize) -> Vec<Edge> {
        let slots = std::mem::take(&mut self.adj[x]);
        let mut removed = Vec::new();
        for slot in slots {
            if let Some(e) = self.edges[slot].take() {
                let y = e.other(x).expect("incident");
                self.adj[y].retain(|&t| t != slot);
                self.lookup.remove(&key(e.u, e.v));
                removed.push(e);
            }
        }
        removed.sort_by_key(|e| e.seq);
        removed
    }

    /// Live edges in build order.
    pub fn edges(&self) -> impl Iterator<Item = &Edge> + '_ {
        self.edges.iter().flatten()
    }

    pub fn edge_count(&self) -> usize {
        self.lookup.len()
    }

    pub fn edge(&self, u: usize, v: usize) -> Option<&Edge> {
        self.lookup
            .get(&key(u, v))
            .and_then(|&slot| self.edges[slot].as_ref())
    }

    pub fn has_edge(&self, u: usize, v: usize) -> bool {
        self.lookup.contains_key(&key(u, v))
    }

    /// Edges incident to `x`.
    pub fn incident(&self, x: usize) -> impl Iterator<Item = &Edge> + '_ {
        self.adj[x].iter().filter_map(|&slot| self.edges[slot].as_ref())
    }

    pub fn degree(&self, x: usize) -> usize {
        self.adj[x].len()
    }

    /// Copy of the graph restricted to `ids`, renumbered by position.
    pub fn restrict(&self, ids: &[usize]) -> SpannerGraph {
        let mut pos = vec![usize::MAX; self.n];
        for (k, &i) in ids.iter().enumerate() {
            pos[i] = k;
        }
        let mut g = SpannerGraph::new(ids.len(), self.s);
        for e in self.edges() {
            let (a, b) = (pos[e.u], pos[e.v]);
            if a != usize::MAX && b != usize::MAX {
                g.insert(a, b, e.len, e.seq).expect("restricted edge");
            }
        }
        g
    }
}

#[derive(Copy, Clone, PartialEq)]
struct State {
    dist: f64,
    node: usize,
}

impl Eq for State {}

impl Ord for State {
    fn cmp(&self, other: &Self) -> Ordering {
        other
            .dist
            .total_cmp(&self.dist)
            .then_with(|| self.node.cmp(&other.node))
    }
}

impl PartialOrd for State {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

/// Single-source shortest path lengths by edge length (Dijkstra).
/// Unreachable targets are `f64::INFINITY`.
pub fn shortest_paths(graph: &SpannerGraph, source: usize) -> Vec<f64> {
    let mut dist = vec![f64::INFINITY; graph.n()];
    let mut heap = BinaryHeap::new();
    dist[source] = 0.0;
    heap.push(State {
        dist: 0.0,
        node: source,
    });
    while let Some(State { dist: d, node }) = heap.pop() {
        if d > dist[node] {
            continue;
        }
        for e in graph.incident(node) {
            let next = e.other(node).expect("incident");
            let nd = d + e.len;
            if nd < dist[next] {
                dist[next] = nd;
                heap.push(State {
                    dist: nd,
                    node: next,
                });
            }
        }
    }
    dist
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn path_graph() {
        let mut g = SpannerGraph::new(3, 2.0);
        g.add_edge(0, 1, 1.0).unwrap();
        g.add_edge(1, 2, 1.0).unwrap();
        assert_eq!(shortest_paths(&g, 0), vec![0.0, 1.0, 2.0]);
    }

    #[test]
    fn edgeless() {
        let g = SpannerGraph::new(3, 2.0);
        assert_eq!(shortest_paths(&g, 0), vec![0.0, f64::INFINITY, f64::INFINITY]);
    }

    #[test]
    fn triangle_345() {
        let mut g = SpannerGraph::new(3, 2.0);
        g.add_edge(0, 1, 3.0).unwrap();
        g.add_edge(0, 2, 4.0).unwrap();
        g.add_edge(1, 2, 5.0).unwrap();
        assert_eq!(shortest_paths(&g, 0), vec![0.0, 3.0, 4.0]);
    }

    #[test]
    fn rejects_bad_edges() {
        let mut g = SpannerGraph::new(3, 2.0);
        g.add_edge(0, 1, 1.0).unwrap();
        assert!(matches!(g.add_edge(1, 0, 1.0), Err(Error::DuplicateEdge(1, 0))));
        assert!(matches!(g.add_edge(2, 2, 1.0), Err(Error::SelfLoop(2, 2))));
        assert!(matches!(g.add_edge(0, 5, 1.0), Err(Error::IdOutOfRange(5, 3))));
    }

    #[test]
    fn remove_incident_keeps_seq_monotone() {
        let mut g = SpannerGraph::new(4, 2.0);
        g.add_edge(0, 1, 1.0).unwrap();
        g.add_edge(1, 2, 1.0).unwrap();
        g.add_edge(2, 3, 1.0).unwrap();
        let removed = g.remove_incident(1);
        assert_eq!(removed.iter().map(|e| e.seq).collect::<Vec<_>>(), vec![0, 1]);
        assert_eq!(g.edge_count(), 1);
        assert_eq!(g.degree(2), 1);
        let e = g.add_edge(0, 2, 2.0).unwrap();
        assert_eq!(e.seq, 3);
        assert_eq!(e.r, 2.0 / 6.0);
    }
}
