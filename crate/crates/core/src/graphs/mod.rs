//! Weighted multigraphs in half-edge form.
//!
//! A graph has vertices `0..n` with nonnegative weights and edges `0..m`.
//! Edge `i` owns the half-edges `2i` and `2i + 1`, so the partner involution
//! is `h ^ 1` and is fixed-point free by construction. Half-edge `2i` sits at
//! the first endpoint of the edge as it was given, `2i + 1` at the second.

mod enumerate;
mod jsonl;

pub use enumerate::{
    enumerate_gc_generators, enumerate_trivalent, gc_graphs, saturate_contractions,
    trivalent_by_augmentation, trivalent_by_matchings, GraphSet,
};
pub use jsonl::{read_jsonl, write_jsonl, GraphRecord};

use crate::error::{Error, Result};

/// An edge, named by the smaller of its two half-edge ids.
#[derive(Debug, Clone, Copy, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct EdgeId(usize);

impl EdgeId {
    /// Any half-edge of the edge may be passed; the id is normalized to the
    /// smaller one.
    pub fn from_half_edge(h: usize) -> Self {
        EdgeId(h & !1)
    }

    pub fn from_index(i: usize) -> Self {
        EdgeId(2 * i)
    }

    pub fn half_edge(self) -> usize {
        self.0
    }

    pub fn index(self) -> usize {
        self.0 / 2
    }
}

#[derive(Debug, Clone, PartialEq, Eq, Hash)]
pub struct StableGraph {
    weights: Vec<u32>,
    /// incidence map: the vertex each half-edge is attached to
    ends: Vec<usize>,
}

impl StableGraph {
    /// Builds a graph from vertex weights and an edge list. Loops are `(v, v)`
    /// and parallel edges are repeated. Only index validity is checked; use
    /// [`is_connected`](Self::is_connected) and [`is_stable`](Self::is_stable)
    /// for the remaining invariants.
    pub fn new(weights: Vec<u32>, edges: &[(usize, usize)]) -> Result<Self> {
        let count = weights.len();
        let mut ends = Vec::with_capacity(2 * edges.len());
        for &(u, v) in edges {
            for x in [u, v] {
                if x >= count {
                    return Err(Error::VertexOutOfRange { vertex: x, count });
                }
            }
            ends.push(u);
            ends.push(v);
        }
        Ok(StableGraph { weights, ends })
    }

    /// The graph with one vertex of weight `genus` and no edges.
    pub fn point(genus: u32) -> Self {
        StableGraph {
            weights: vec![genus],
            ends: Vec::new(),
        }
    }

    pub fn vertex_count(&self) -> usize {
        self.weights.len()
    }

    pub fn edge_count(&self) -> usize {
        self.ends.len() / 2
    }

    pub fn half_edge_count(&self) -> usize {
        self.ends.len()
    }

    pub fn weights(&self) -> &[u32] {
        &self.weights
    }

    pub fn weight(&self, v: usize) -> u32 {
        self.weights[v]
    }

    pub fn total_weight(&self) -> u64 {
        self.weights.iter().map(|&w| w as u64).sum()
    }

    pub fn partner(&self, h: usize) -> usize {
        h ^ 1
    }

    pub fn vertex_of(&self, h: usize) -> usize {
        self.ends[h]
    }

    pub fn edge(&self, i: usize) -> (usize, usize) {
        (self.ends[2 * i], self.ends[2 * i + 1])
    }

    pub fn edges(&self) -> impl Iterator<Item = (usize, usize)> + '_ {
        self.ends.chunks_exact(2).map(|c| (c[0], c[1]))
    }

    pub fn is_loop(&self, i: usize) -> bool {
        self.ends[2 * i] == self.ends[2 * i + 1]
    }

    pub fn has_loop(&self) -> bool {
        (0..self.edge_count()).any(|i| self.is_loop(i))
    }

    pub fn half_edges_at(&self, v: usize) -> Vec<usize> {
        (0..self.ends.len()).filter(|&h| self.ends[h] == v).collect()
    }

    /// Number of half-edges at `v`; a loop counts twice.
    pub fn valence(&self, v: usize) -> usize {
        self.ends.iter().filter(|&&x| x == v).count()
    }

    pub fn valences(&self) -> Vec<usize> {
        let mut val = vec![0; self.vertex_count()];
        for &v in &self.ends {
            val[v] += 1;
        }
        val
    }

    pub fn loops_at(&self, v: usize) -> usize {
        self.edges().filter(|&(a, b)| a == v && b == v).count()
    }

    /// `|E| - |V| + 1`; the first Betti number of a connected graph.
    pub fn first_betti(&self) -> i64 {
        self.edge_count() as i64 - self.vertex_count() as i64 + 1
    }

    pub fn genus(&self) -> i64 {
        self.first_betti() + self.total_weight() as i64
    }

    pub fn is_connected(&self) -> bool {
        let n = self.vertex_count();
        if n == 0 {
            return false;
        }
        let mut parent: Vec<usize> = (0..n).collect();
        fn find(p: &mut [usize], mut x: usize) -> usize {
            while p[x] != x {
                p[x] = p[p[x]];
                x = p[x];
            }
            x
        }
        let mut components = n;
        for (u, v) in self.edges() {
            let (a, b) = (find(&mut parent, u), find(&mut parent, v));
            if a != b {
                parent[a] = b;
                components -= 1;
            }
        }
        components == 1
    }

    /// `2 w(v) - 2 + val(v) > 0` at every vertex.
    pub fn is_stable(&self) -> bool {
        let val = self.valences();
        self.weights
            .iter()
            .zip(&val)
            .all(|(&w, &d)| 2 * w as i64 - 2 + d as i64 > 0)
    }

    pub fn min_valence(&self) -> usize {
        self.valences().into_iter().min().unwrap_or(0)
    }

    /// Collapses an edge. A non-loop merges its endpoints into the smaller
    /// vertex id with the sum of their weights; a loop adds one to the weight
    /// of its vertex. The remaining edges keep their relative order, so edge
    /// `j` of the result is edge `j + [j >= e]` of `self`.
    pub fn contract(&self, e: EdgeId) -> Result<StableGraph> {
        let i = e.index();
        if i >= self.edge_count() {
            return Err(Error::InvalidEdge(e.half_edge()));
        }
        let (u, v) = self.edge(i);
        let mut ends = Vec::with_capacity(self.ends.len() - 2);
        ends.extend_from_slice(&self.ends[..2 * i]);
        ends.extend_from_slice(&self.ends[2 * i + 2..]);
        let mut weights = self.weights.clone();
        if u == v {
            weights[u] += 1;
            return Ok(StableGraph { weights, ends });
        }
        let (keep, gone) = (u.min(v), u.max(v));
        weights[keep] += weights[gone];
        weights.remove(gone);
        for x in ends.iter_mut() {
            if *x == gone {
                *x = keep;
            } else if *x > gone {
                *x -= 1;
            }
        }
        Ok(StableGraph { weights, ends })
    }

    /// Splits vertex `v`: the half-edges in `moved` are reattached to a new
    /// weight-0 vertex (id `n`), and a new edge `(v, n)` is appended last.
    pub fn split_vertex(&self, v: usize, moved: &[usize]) -> Result<StableGraph> {
        if v >= self.vertex_count() {
            return Err(Error::VertexOutOfRange {
                vertex: v,
                count: self.vertex_count(),
            });
        }
        let new = self.vertex_count();
        let mut ends = self.ends.clone();
        for &h in moved {
            if h >= ends.len() || ends[h] != v {
                return Err(Error::InvalidEdge(h));
            }
            ends[h] = new;
        }
        ends.push(v);
        ends.push(new);
        let mut weights = self.weights.clone();
        weights.push(0);
        Ok(StableGraph { weights, ends })
    }

    /// Appends an edge between `u` and `v`.
    pub fn with_edge(&self, u: usize, v: usize) -> StableGraph {
        let mut ends = self.ends.clone();
        ends.push(u);
        ends.push(v);
        StableGraph {
            weights: self.weights.clone(),
            ends,
        }
    }

    /// Relabels the graph: vertex `x` becomes `vertex_perm[x]`, edge `i`
    /// becomes `edge_perm[i]`, and when `flip[i]` is set the two half-edges of
    /// edge `i` trade places.
    pub fn relabeled(&self, vertex_perm: &[usize], edge_perm: &[usize], flip: &[bool]) -> Self {
        let n = self.vertex_count();
        let mut weights = vec![0; n];
        for x in 0..n {
            weights[vertex_perm[x]] = self.weights[x];
        }
        let mut ends = vec![0; self.ends.len()];
        for i in 0..self.edge_count() {
            let (mut a, mut b) = self.edge(i);
            if flip[i] {
                std::mem::swap(&mut a, &mut b);
            }
            let j = edge_perm[i];
            ends[2 * j] = vertex_perm[a];
            ends[2 * j + 1] = vertex_perm[b];
        }
        StableGraph { weights, ends }
    }

    /// Multiplicity matrix (row-major, `n * n`); loops are counted once on
    /// the diagonal.
    pub fn multiplicities(&self) -> Vec<u32> {
        let n = self.vertex_count();
        let mut m = vec![0; n * n];
        for (u, v) in self.edges() {
            if u == v {
                m[u * n + u] += 1;
            } else {
                m[u * n + v] += 1;
                m[v * n + u] += 1;
            }
        }
        m
    }

    /// True if two edges share both endpoints (including two loops at one
    /// vertex).
    pub fn has_parallel_edges(&self) -> bool {
        let mut seen = std::collections::HashSet::new();
        !self.edges().all(|(u, v)| seen.insert((u.min(v), u.max(v))))
    }
}
