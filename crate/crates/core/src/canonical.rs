//! Canonical labeling and automorphism groups of weighted multigraphs.
//!
//! Vertices are colored by (weight, loop count, valence) and the coloring is
//! refined to an equitable one using neighbor colors with multiplicities.
//! A depth-first individualization search then visits the leaves of the
//! refinement tree and keeps the lexicographically smallest encoding of the
//! relabeled multiplicity matrix. Leaves whose encoding ties with the first
//! or the best leaf yield automorphisms, which are used to prune sibling
//! subtrees that are images of already explored ones. The automorphisms
//! found this way generate the full vertex automorphism group, and its order
//! is read off the first path as a product of orbit lengths.
//!
//! Half-edge automorphisms are the lifts of vertex automorphisms together
//! with the permutations inside parallel bundles and the loop flips.

use std::cmp::Ordering;
use std::fmt;
use std::str::FromStr;

use crate::error::{Error, Result};
use crate::graphs::StableGraph;

/// Identity of an isomorphism class of weighted multigraphs. Byte layout:
/// genus, vertex count, edge count, vertex weights in canonical order, then
/// the upper triangle (diagonal included, loops on the diagonal) of the
/// canonical multiplicity matrix, row by row.
#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct CanonicalKey(Vec<u8>);

impl CanonicalKey {
    pub fn as_bytes(&self) -> &[u8] {
        &self.0
    }

    pub fn genus(&self) -> u8 {
        self.0[0]
    }

    pub fn vertex_count(&self) -> usize {
        self.0[1] as usize
    }

    pub fn edge_count(&self) -> usize {
        self.0[2] as usize
    }

    /// Rebuilds the canonical representative from the key alone.
    pub fn to_graph(&self) -> StableGraph {
        let n = self.vertex_count();
        let weights: Vec<u32> = self.0[3..3 + n].iter().map(|&w| w as u32).collect();
        let mut edges = Vec::with_capacity(self.edge_count());
        let mut idx = 3 + n;
        for a in 0..n {
            for b in a..n {
                for _ in 0..self.0[idx] {
                    edges.push((a, b));
                }
                idx += 1;
            }
        }
        StableGraph::new(weights, &edges).expect("keys encode valid graphs")
    }
}

impl fmt::Display for CanonicalKey {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        for b in &self.0 {
            write!(f, "{b:02x}")?;
        }
        Ok(())
    }
}

impl FromStr for CanonicalKey {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        if s.len() % 2 != 0 || s.len() < 6 {
            return Err(Error::Parse(format!("bad canonical key {s:?}")));
        }
        let bytes = (0..s.len())
            .step_by(2)
            .map(|i| u8::from_str_radix(&s[i..i + 2], 16))
            .collect::<std::result::Result<Vec<u8>, _>>()
            .map_err(|e| Error::Parse(e.to_string()))?;
        let n = bytes[1] as usize;
        if bytes.len() != 3 + n + n * (n + 1) / 2 {
            return Err(Error::Parse(format!("bad canonical key length {s:?}")));
        }
        Ok(CanonicalKey(bytes))
    }
}

/// A graph in canonical labeling together with the relabeling that produced
/// it from the input.
#[derive(Debug, Clone)]
pub struct CanonicalForm {
    pub key: CanonicalKey,
    pub graph: StableGraph,
    /// input vertex -> canonical vertex
    pub vertex_map: Vec<usize>,
    /// input edge -> canonical edge
    pub edge_map: Vec<usize>,
    /// input half-edge -> canonical half-edge
    pub half_edge_map: Vec<usize>,
}

impl CanonicalForm {
    pub fn is_identity(&self) -> bool {
        self.half_edge_map.iter().enumerate().all(|(i, &h)| i == h)
            && self.vertex_map.iter().enumerate().all(|(i, &v)| i == v)
    }
}

#[derive(Debug, Clone)]
pub struct AutInfo {
    /// half-edge permutations generating the automorphism group
    pub generators: Vec<Vec<usize>>,
    pub has_odd_edge_automorphism: bool,
    pub group_order: u128,
}

pub fn canonical_form(g: &StableGraph) -> CanonicalForm {
    canonicalize(g).0
}

pub fn automorphisms(g: &StableGraph) -> AutInfo {
    canonicalize(g).1
}

/// Canonical form and automorphism data from a single search.
pub fn canonicalize(g: &StableGraph) -> (CanonicalForm, AutInfo) {
    let mg = Multigraph::new(g);
    let search = mg.search();
    let form = build_form(g, &mg, &search.labeling);
    let aut = lift_automorphisms(g, &search.vertex_generators, search.vertex_order);
    (form, aut)
}

/// Canonical key plus vertex automorphism generators, skipping the half-edge
/// bookkeeping. Used by the generation loops.
pub(crate) fn key_and_vertex_automorphisms(
    g: &StableGraph,
) -> (CanonicalKey, Vec<usize>, Vec<Vec<usize>>) {
    let mg = Multigraph::new(g);
    let search = mg.search();
    let key = mg.key(g, &search.labeling);
    (key, search.labeling, search.vertex_generators)
}

/// Sign of the permutation that `perm` induces on edges. `perm` must be a
/// half-edge bijection commuting with the partner involution and inducing a
/// weight-preserving vertex bijection.
pub fn edge_permutation_sign(g: &StableGraph, perm: &[usize]) -> Result<i8> {
    let hn = g.half_edge_count();
    if perm.len() != hn {
        return Err(Error::InvalidPermutation(format!(
            "expected {hn} entries, got {}",
            perm.len()
        )));
    }
    if !is_permutation(perm) {
        return Err(Error::InvalidPermutation("not a bijection".into()));
    }
    for h in 0..hn {
        if perm[h ^ 1] != perm[h] ^ 1 {
            return Err(Error::InvalidPermutation(format!(
                "does not commute with the partner map at half-edge {h}"
            )));
        }
    }
    let n = g.vertex_count();
    let mut vmap = vec![usize::MAX; n];
    for h in 0..hn {
        let (from, to) = (g.vertex_of(h), g.vertex_of(perm[h]));
        if vmap[from] == usize::MAX {
            vmap[from] = to;
        } else if vmap[from] != to {
            return Err(Error::InvalidPermutation(format!(
                "does not commute with the incidence map at vertex {from}"
            )));
        }
    }
    let mut hit = vec![false; n];
    for v in 0..n {
        let w = vmap[v];
        if w == usize::MAX {
            continue;
        }
        if hit[w] || g.weight(v) != g.weight(w) {
            return Err(Error::InvalidPermutation(format!(
                "vertex map is not a weight-preserving bijection at {v}"
            )));
        }
        hit[w] = true;
    }
    let edges: Vec<usize> = (0..g.edge_count()).map(|i| perm[2 * i] / 2).collect();
    Ok(permutation_sign(&edges))
}

pub(crate) fn is_permutation(p: &[usize]) -> bool {
    let mut seen = vec![false; p.len()];
    p.iter().all(|&x| x < p.len() && !std::mem::replace(&mut seen[x], true))
}

/// Sign of a permutation of `0..n` given in one-line notation.
pub fn permutation_sign<T: Copy + Into<usize>>(p: &[T]) -> i8 {
    let mut seen = vec![false; p.len()];
    let mut sign = 1;
    for start in 0..p.len() {
        if seen[start] {
            continue;
        }
        let mut len = 0;
        let mut x = start;
        while !seen[x] {
            seen[x] = true;
            x = p[x].into();
            len += 1;
        }
        if len % 2 == 0 {
            sign = -sign;
        }
    }
    sign
}

struct Multigraph {
    n: usize,
    weights: Vec<u32>,
    mult: Vec<u32>,
    neighbors: Vec<Vec<(usize, u32)>>,
    initial: Vec<usize>,
}

struct SearchResult {
    /// vertex -> canonical position
    labeling: Vec<usize>,
    vertex_generators: Vec<Vec<usize>>,
    vertex_order: u128,
}

#[derive(Clone)]
struct Leaf {
    code: Vec<u8>,
    pos: Vec<usize>,
}

impl Multigraph {
    fn new(g: &StableGraph) -> Self {
        let n = g.vertex_count();
        let mult = g.multiplicities();
        let neighbors = (0..n)
            .map(|v| {
                (0..n)
                    .filter(|&u| u != v && mult[v * n + u] > 0)
                    .map(|u| (u, mult[v * n + u]))
                    .collect()
            })
            .collect();
        let valences = g.valences();
        let invariants: Vec<(u32, u32, usize)> = (0..n)
            .map(|v| (g.weight(v), mult[v * n + v], valences[v]))
            .collect();
        let initial = rank_by(&invariants);
        Multigraph {
            n,
            weights: g.weights().to_vec(),
            mult,
            neighbors,
            initial,
        }
    }

    fn refine(&self, colors: &mut Vec<usize>) {
        let mut count = distinct(colors);
        while count < self.n {
            let sigs: Vec<(usize, Vec<(usize, u32)>)> = (0..self.n)
                .map(|v| {
                    let mut nb: Vec<(usize, u32)> = self.neighbors[v]
                        .iter()
                        .map(|&(u, m)| (colors[u], m))
                        .collect();
                    nb.sort_unstable();
                    (colors[v], nb)
                })
                .collect();
            let refined = rank_by(&sigs);
            let new_count = distinct(&refined);
            if new_count == count {
                break;
            }
            *colors = refined;
            count = new_count;
        }
    }

    fn code(&self, pos: &[usize]) -> Vec<u8> {
        let n = self.n;
        let mut inv = vec![0; n];
        for (v, &p) in pos.iter().enumerate() {
            inv[p] = v;
        }
        let mut code = Vec::with_capacity(n + n * (n + 1) / 2);
        code.extend(inv.iter().map(|&v| small(self.weights[v])));
        for i in 0..n {
            for j in i..n {
                code.push(small(self.mult[inv[i] * n + inv[j]]));
            }
        }
        code
    }

    fn key(&self, g: &StableGraph, pos: &[usize]) -> CanonicalKey {
        let mut bytes = Vec::with_capacity(3 + self.n + self.n * (self.n + 1) / 2);
        bytes.push(small(g.genus().max(0) as u32));
        bytes.push(small(self.n as u32));
        bytes.push(small(g.edge_count() as u32));
        bytes.extend(self.code(pos));
        CanonicalKey(bytes)
    }

    fn search(&self) -> SearchResult {
        if self.n == 0 {
            return SearchResult {
                labeling: vec![],
                vertex_generators: vec![],
                vertex_order: 1,
            };
        }
        let mut s = Search {
            g: self,
            first: None,
            best: None,
            autos: Vec::new(),
            first_path: Vec::new(),
            prefix: Vec::new(),
        };
        s.visit(self.initial.clone());
        let best = s.best.clone().expect("search reaches a leaf");
        // An input that is already canonical keeps the identity labeling.
        let identity: Vec<usize> = (0..self.n).collect();
        let labeling = if self.code(&identity) == best.code {
            identity
        } else {
            best.pos
        };
        let vertex_order = s.group_order();
        SearchResult {
            labeling,
            vertex_generators: s.autos,
            vertex_order,
        }
    }
}

struct Search<'a> {
    g: &'a Multigraph,
    first: Option<Leaf>,
    best: Option<Leaf>,
    autos: Vec<Vec<usize>>,
    /// (target cell, chosen vertex) along the path to the first leaf
    first_path: Vec<(Vec<usize>, usize)>,
    prefix: Vec<usize>,
}

impl Search<'_> {
    fn visit(&mut self, mut colors: Vec<usize>) {
        self.g.refine(&mut colors);
        let cell = match target_cell(&colors) {
            None => {
                self.leaf(colors);
                return;
            }
            Some(cell) => cell,
        };
        let on_first_path = self.first.is_none();
        let mut explored: Vec<usize> = Vec::new();
        for &v in &cell {
            if !explored.is_empty() && self.image_of_explored(v, &explored) {
                continue;
            }
            if on_first_path && explored.is_empty() {
                self.first_path.push((cell.clone(), v));
            }
            explored.push(v);
            let child = individualize(&colors, v);
            self.prefix.push(v);
            self.visit(child);
            self.prefix.pop();
        }
    }

    fn image_of_explored(&self, v: usize, explored: &[usize]) -> bool {
        let fixing: Vec<&Vec<usize>> = self
            .autos
            .iter()
            .filter(|a| self.prefix.iter().all(|&p| a[p] == p))
            .collect();
        if fixing.is_empty() {
            return false;
        }
        let orbit = orbit_of(v, &fixing, self.g.n);
        explored.iter().any(|&u| orbit[u])
    }

    fn leaf(&mut self, pos: Vec<usize>) {
        let code = self.g.code(&pos);
        let leaf = Leaf { code, pos };
        let (Some(first), Some(best)) = (&self.first, &self.best) else {
            self.first = Some(leaf.clone());
            self.best = Some(leaf);
            return;
        };
        let mut found = Vec::new();
        if leaf.code == first.code {
            found.push(automorphism_between(first, &leaf));
        }
        let order = leaf.code.cmp(&best.code);
        if order == Ordering::Equal && best.pos != first.pos {
            found.push(automorphism_between(best, &leaf));
        }
        if order == Ordering::Less {
            self.best = Some(leaf);
        }
        for a in found {
            if a.iter().enumerate().any(|(i, &x)| i != x) && !self.autos.contains(&a) {
                self.autos.push(a);
            }
        }
    }

    fn group_order(&self) -> u128 {
        let mut order: u128 = 1;
        for (k, (_, v)) in self.first_path.iter().enumerate() {
            let prefix: Vec<usize> = self.first_path[..k].iter().map(|&(_, x)| x).collect();
            let fixing: Vec<&Vec<usize>> = self
                .autos
                .iter()
                .filter(|a| prefix.iter().all(|&p| a[p] == p))
                .collect();
            let size = orbit_of(*v, &fixing, self.g.n).iter().filter(|&&b| b).count();
            order *= size as u128;
        }
        order
    }
}

/// The vertex map sending `to`'s labeling onto `from`'s; an automorphism when
/// both leaves have the same code.
fn automorphism_between(from: &Leaf, to: &Leaf) -> Vec<usize> {
    let n = from.pos.len();
    let mut inv = vec![0; n];
    for (v, &p) in from.pos.iter().enumerate() {
        inv[p] = v;
    }
    to.pos.iter().map(|&p| inv[p]).collect()
}

fn orbit_of(v: usize, gens: &[&Vec<usize>], n: usize) -> Vec<bool> {
    let mut seen = vec![false; n];
    seen[v] = true;
    let mut stack = vec![v];
    while let Some(x) = stack.pop() {
        for g in gens {
            let y = g[x];
            if !seen[y] {
                seen[y] = true;
                stack.push(y);
            }
        }
    }
    seen
}

fn target_cell(colors: &[usize]) -> Option<Vec<usize>> {
    let n = colors.len();
    let mut size = vec![0usize; n];
    for &c in colors {
        size[c] += 1;
    }
    let c = (0..n).find(|&c| size[c] > 1)?;
    Some((0..n).filter(|&v| colors[v] == c).collect())
}

fn individualize(colors: &[usize], v: usize) -> Vec<usize> {
    let keys: Vec<(usize, bool)> = colors
        .iter()
        .enumerate()
        .map(|(w, &c)| (c, w != v))
        .collect();
    rank_by(&keys)
}

/// Dense ranks of `keys` in sorted order (equal keys share a rank).
fn rank_by<K: Ord>(keys: &[K]) -> Vec<usize> {
    let mut idx: Vec<usize> = (0..keys.len()).collect();
    idx.sort_by(|&a, &b| keys[a].cmp(&keys[b]));
    let mut ranks = vec![0; keys.len()];
    let mut r = 0;
    for w in 0..idx.len() {
        if w > 0 && keys[idx[w]] != keys[idx[w - 1]] {
            r += 1;
        }
        ranks[idx[w]] = r;
    }
    ranks
}

fn distinct(colors: &[usize]) -> usize {
    colors.iter().max().map_or(0, |&m| m + 1)
}

fn small(x: u32) -> u8 {
    u8::try_from(x).expect("graph too large for the canonical encoding")
}

fn build_form(g: &StableGraph, mg: &Multigraph, pos: &[usize]) -> CanonicalForm {
    let n = g.vertex_count();
    let key = mg.key(g, pos);
    let graph = key.to_graph();
    // first canonical edge of each bundle (a, b), a <= b
    let mut start = vec![0usize; n * n];
    let mut next = 0;
    for (i, (a, b)) in graph.edges().enumerate() {
        if i == 0 || graph.edge(i - 1) != (a, b) {
            start[a * n + b] = next;
        }
        next += 1;
    }
    let mut edge_map = Vec::with_capacity(g.edge_count());
    let mut half_edge_map = vec![0; g.half_edge_count()];
    for (i, (u, v)) in g.edges().enumerate() {
        let (pu, pv) = (pos[u], pos[v]);
        let slot = &mut start[pu.min(pv) * n + pu.max(pv)];
        let c = *slot;
        *slot += 1;
        edge_map.push(c);
        if pu <= pv {
            half_edge_map[2 * i] = 2 * c;
            half_edge_map[2 * i + 1] = 2 * c + 1;
        } else {
            half_edge_map[2 * i] = 2 * c + 1;
            half_edge_map[2 * i + 1] = 2 * c;
        }
    }
    CanonicalForm {
        key,
        graph,
        vertex_map: pos.to_vec(),
        edge_map,
        half_edge_map,
    }
}

fn lift_automorphisms(g: &StableGraph, vertex_gens: &[Vec<usize>], vertex_order: u128) -> AutInfo {
    let mut bundles: std::collections::BTreeMap<(usize, usize), Vec<usize>> = Default::default();
    for (i, (u, v)) in g.edges().enumerate() {
        bundles.entry((u.min(v), u.max(v))).or_default().push(i);
    }
    let hn = g.half_edge_count();
    let mut generators = Vec::new();
    for gamma in vertex_gens {
        let mut perm = vec![0; hn];
        for (&(a, b), edges) in &bundles {
            let (x, y) = (gamma[a], gamma[b]);
            let image = &bundles[&(x.min(y), x.max(y))];
            for (&e, &f) in edges.iter().zip(image) {
                if a == b {
                    perm[2 * e] = 2 * f;
                    perm[2 * e + 1] = 2 * f + 1;
                } else {
                    let target_of_first = gamma[g.vertex_of(2 * e)];
                    if g.vertex_of(2 * f) == target_of_first {
                        perm[2 * e] = 2 * f;
                        perm[2 * e + 1] = 2 * f + 1;
                    } else {
                        perm[2 * e] = 2 * f + 1;
                        perm[2 * e + 1] = 2 * f;
                    }
                }
            }
        }
        generators.push(perm);
    }
    let mut kernel_order: u128 = 1;
    for (&(a, b), edges) in &bundles {
        let m = edges.len() as u128;
        kernel_order *= (1..=m).product::<u128>();
        if a == b {
            kernel_order *= 1u128 << m;
            for &e in edges {
                let mut perm: Vec<usize> = (0..hn).collect();
                perm.swap(2 * e, 2 * e + 1);
                generators.push(perm);
            }
        }
        for pair in edges.windows(2) {
            let (e, f) = (pair[0], pair[1]);
            let mut perm: Vec<usize> = (0..hn).collect();
            let (e0, e1) = (2 * e, 2 * e + 1);
            let (f0, f1) = if a == b || g.vertex_of(2 * e) == g.vertex_of(2 * f) {
                (2 * f, 2 * f + 1)
            } else {
                (2 * f + 1, 2 * f)
            };
            perm[e0] = f0;
            perm[f0] = e0;
            perm[e1] = f1;
            perm[f1] = e1;
            generators.push(perm);
        }
    }
    let has_odd_edge_automorphism = generators
        .iter()
        .any(|p| edge_permutation_sign(g, p).expect("lifted automorphisms are valid") < 0);
    AutInfo {
        generators,
        has_odd_edge_automorphism,
        group_order: vertex_order * kernel_order,
    }
}
