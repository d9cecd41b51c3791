//! Isomorph-free enumeration of the objects of the stable graph category.
//!
//! Trivalent weight-0 graphs (the maximal cells) come from one of two
//! generators, and everything else is reached by contracting edges.

use std::collections::{BTreeMap, HashSet};

use rayon::prelude::*;

use super::{EdgeId, StableGraph};
use crate::canonical::{canonical_form, key_and_vertex_automorphisms, CanonicalKey};
use crate::error::{Error, Result};

/// Isomorphism classes keyed and ordered by canonical key; each value is the
/// canonical representative.
pub type GraphSet = BTreeMap<CanonicalKey, StableGraph>;

/// Largest genus for which the half-edge matching generator is used.
const MATCHING_MAX_GENUS: u32 = 4;

fn check_genus(g: u32) -> Result<()> {
    if g < 2 {
        return Err(Error::GenusTooSmall(g, 2));
    }
    Ok(())
}

/// Connected trivalent multigraphs (loops and parallel edges allowed) with
/// `2g - 2` vertices, all weights 0.
pub fn enumerate_trivalent(g: u32) -> Result<GraphSet> {
    check_genus(g)?;
    Ok(if g <= MATCHING_MAX_GENUS {
        trivalent_by_matchings(g)
    } else {
        trivalent_by_augmentation(g)
    })
}

fn insert_canonical(set: &mut GraphSet, graphs: impl IntoParallelIterator<Item = StableGraph>) {
    let found: Vec<(CanonicalKey, StableGraph)> = graphs
        .into_par_iter()
        .map(|g| {
            let f = canonical_form(&g);
            (f.key, f.graph)
        })
        .collect();
    set.extend(found);
}

/// Perfect matchings on the `6g - 6` labeled half-edges (three per vertex),
/// deduplicated by canonical form. Half-edges at one vertex are
/// interchangeable, so the smallest unmatched half-edge is only ever paired
/// with the first free half-edge of each vertex.
pub fn trivalent_by_matchings(g: u32) -> GraphSet {
    assert!(g >= 2);
    let n = 2 * g as usize - 2;
    let mut free = vec![true; 3 * n];
    let mut pairs = Vec::with_capacity(3 * n / 2);
    let mut labeled: HashSet<Vec<(usize, usize)>> = HashSet::new();
    fn rec(
        free: &mut [bool],
        pairs: &mut Vec<(usize, usize)>,
        out: &mut HashSet<Vec<(usize, usize)>>,
    ) {
        let Some(h) = free.iter().position(|&f| f) else {
            let mut edges: Vec<(usize, usize)> =
                pairs.iter().map(|&(a, b)| (a / 3, b / 3)).collect();
            edges.sort_unstable();
            out.insert(edges);
            return;
        };
        free[h] = false;
        let n = free.len() / 3;
        for w in h / 3..n {
            let Some(k) = (3 * w..3 * w + 3).find(|&k| free[k]) else {
                continue;
            };
            free[k] = false;
            pairs.push((h, k));
            rec(free, pairs, out);
            pairs.pop();
            free[k] = true;
        }
        free[h] = true;
    }
    rec(&mut free, &mut pairs, &mut labeled);
    let graphs: Vec<StableGraph> = labeled
        .into_iter()
        .map(|edges| StableGraph::new(vec![0; n], &edges).expect("valid indices"))
        .filter(|gr| gr.is_connected())
        .collect();
    let mut set = GraphSet::new();
    insert_canonical(&mut set, graphs);
    set
}

/// Canonical augmentation: start from `2g - 2` isolated vertices and add one
/// edge at a time, keeping a child only when the new edge lies in the
/// automorphism orbit of the child's canonical deletion edge (the last edge
/// of its canonical form). Children are then deduplicated by canonical key.
pub fn trivalent_by_augmentation(g: u32) -> GraphSet {
    assert!(g >= 2);
    let n = 2 * g as usize - 2;
    let total = 3 * n / 2;
    let mut level = vec![StableGraph::new(vec![0; n], &[]).expect("no edges")];
    for m in 0..total {
        let children: Vec<(CanonicalKey, StableGraph)> = level
            .par_iter()
            .flat_map_iter(|parent| augment(parent, total - m - 1))
            .collect();
        let next: GraphSet = children.into_iter().collect();
        level = next.into_values().collect();
    }
    level
        .into_iter()
        .filter(|gr| gr.is_connected())
        .map(|gr| (canonical_form(&gr).key, gr))
        .collect()
}

fn augment(parent: &StableGraph, remaining: usize) -> Vec<(CanonicalKey, StableGraph)> {
    let n = parent.vertex_count();
    let deg = parent.valences();
    let mut out = Vec::new();
    for u in 0..n {
        for v in u..n {
            let fits = if u == v {
                deg[u] + 2 <= 3
            } else {
                deg[u] < 3 && deg[v] < 3
            };
            if !fits {
                continue;
            }
            let child = parent.with_edge(u, v);
            if !extendable(&child, remaining) {
                continue;
            }
            let (key, pos, gens) = key_and_vertex_automorphisms(&child);
            let mut inv = vec![0; n];
            for (x, &p) in pos.iter().enumerate() {
                inv[p] = x;
            }
            let canon = key.to_graph();
            let (a, b) = canon.edge(canon.edge_count() - 1);
            if pair_orbit_contains(&gens, (inv[a], inv[b]), (u, v)) {
                out.push((key, canon));
            }
        }
    }
    out
}

/// Necessary condition for completing `g` to a connected trivalent graph
/// with `remaining` more edges.
fn extendable(g: &StableGraph, remaining: usize) -> bool {
    let n = g.vertex_count();
    let deg = g.valences();
    let mut parent: Vec<usize> = (0..n).collect();
    fn find(p: &mut [usize], mut x: usize) -> usize {
        while p[x] != x {
            p[x] = p[p[x]];
            x = p[x];
        }
        x
    }
    for (a, b) in g.edges() {
        let (ra, rb) = (find(&mut parent, a), find(&mut parent, b));
        if ra != rb {
            parent[ra] = rb;
        }
    }
    let mut deficiency = vec![0usize; n];
    let mut roots = HashSet::new();
    for v in 0..n {
        let r = find(&mut parent, v);
        roots.insert(r);
        deficiency[r] += 3 - deg[v];
    }
    let components = roots.len();
    components == 1 || (remaining + 1 >= components && roots.iter().all(|&r| deficiency[r] > 0))
}

fn pair_orbit_contains(gens: &[Vec<usize>], start: (usize, usize), target: (usize, usize)) -> bool {
    let norm = |(a, b): (usize, usize)| (a.min(b), a.max(b));
    let (start, target) = (norm(start), norm(target));
    let mut seen = HashSet::from([start]);
    let mut stack = vec![start];
    while let Some((a, b)) = stack.pop() {
        if (a, b) == target {
            return true;
        }
        for gamma in gens {
            let img = norm((gamma[a], gamma[b]));
            if seen.insert(img) {
                stack.push(img);
            }
        }
    }
    false
}

/// Closure of `seed` under single-edge contraction, up to isomorphism.
/// Seeded with the trivalent graphs of genus `g` this is every object of the
/// stable graph category of genus `g`.
pub fn saturate_contractions(seed: &GraphSet) -> GraphSet {
    closure(seed, |_, _| true)
}

fn closure(seed: &GraphSet, allow: impl Fn(&StableGraph, usize) -> bool + Sync) -> GraphSet {
    let mut all = seed.clone();
    let mut frontier: Vec<StableGraph> = seed.values().cloned().collect();
    while !frontier.is_empty() {
        let found: Vec<(CanonicalKey, StableGraph)> = frontier
            .par_iter()
            .flat_map_iter(|gr| {
                (0..gr.edge_count())
                    .filter(|&i| allow(gr, i))
                    .map(|i| {
                        let f = canonical_form(
                            &gr.contract(EdgeId::from_index(i)).expect("edge in range"),
                        );
                        (f.key, f.graph)
                    })
                    .collect::<Vec<_>>()
            })
            .collect();
        let mut next = GraphSet::new();
        for (k, gr) in found {
            if !all.contains_key(&k) {
                next.insert(k, gr);
            }
        }
        all.extend(next.iter().map(|(k, v)| (k.clone(), v.clone())));
        frontier = next.into_values().collect();
    }
    all
}

/// All loopless, weight-0, minimum-valence-3 connected graphs of genus `g`,
/// including those with odd automorphisms.
pub fn gc_graphs(g: u32) -> Result<GraphSet> {
    let seed: GraphSet = enumerate_trivalent(g)?
        .into_iter()
        .filter(|(_, gr)| !gr.has_loop())
        .collect();
    // Contracting an edge with a parallel partner would create a loop.
    Ok(closure(&seed, |gr, i| {
        let (u, v) = gr.edge(i);
        u != v
            && gr
                .edges()
                .filter(|&(a, b)| (a.min(b), a.max(b)) == (u.min(v), u.max(v)))
                .count()
                == 1
    }))
}

/// Graph-complex candidates of genus `g` in degree `k`: `2g + k` edges and
/// `g + 1 + k` vertices.
pub fn enumerate_gc_generators(g: u32, k: i32) -> Result<GraphSet> {
    check_genus(g)?;
    let edges = 2 * g as i64 + k as i64;
    let vertices = g as i64 + 1 + k as i64;
    if edges > 3 * g as i64 - 3 || vertices < 1 {
        return Ok(GraphSet::new());
    }
    Ok(gc_graphs(g)?
        .into_iter()
        .filter(|(key, _)| key.edge_count() as i64 == edges)
        .collect())
}
