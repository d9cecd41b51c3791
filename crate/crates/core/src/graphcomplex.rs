//! The commutative graph complex of genus `g`.
//!
//! A basis element is a canonical graph oriented by its canonical edge
//! order. Any other ordering is reduced to it by the sign of the induced
//! edge permutation; graphs with an odd edge automorphism are zero.

use std::collections::BTreeMap;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Zero};
use rayon::prelude::*;

use crate::canonical::{automorphisms, canonicalize, is_permutation, permutation_sign, CanonicalKey};
use crate::error::{Error, Result};
use crate::exactla::{GradedChainComplex, SparseIntMatrix};
use crate::graphs::{enumerate_gc_generators, gc_graphs, EdgeId, GraphSet, StableGraph};

#[derive(Debug, Clone, PartialEq, Eq, PartialOrd, Ord)]
pub struct Generator {
    pub key: CanonicalKey,
    pub degree: i32,
}

impl Generator {
    pub fn graph(&self) -> StableGraph {
        self.key.to_graph()
    }

    pub fn genus(&self) -> u32 {
        self.key.genus() as u32
    }
}

pub fn degree_of(g: &StableGraph) -> i32 {
    (g.vertex_count() as i64 - (g.genus() + 1)) as i32
}

/// Sparse rational combination of generators of a single degree.
#[derive(Debug, Clone, PartialEq, Eq, Default)]
pub struct ChainVector {
    terms: BTreeMap<Generator, BigRational>,
}

impl ChainVector {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn from_generator(x: Generator) -> Self {
        let mut v = Self::zero();
        v.add_term(x, BigRational::one());
        v
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn len(&self) -> usize {
        self.terms.len()
    }

    pub fn is_empty(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn degree(&self) -> Option<i32> {
        self.terms.keys().next().map(|x| x.degree)
    }

    pub fn coefficient(&self, x: &Generator) -> BigRational {
        self.terms.get(x).cloned().unwrap_or_else(BigRational::zero)
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Generator, &BigRational)> {
        self.terms.iter()
    }

    /// Adds `c * x`, dropping the term if it cancels.
    pub fn add_term(&mut self, x: Generator, c: BigRational) {
        if let Some(d) = self.degree() {
            assert_eq!(d, x.degree, "chain vectors are homogeneous");
        }
        let entry = self.terms.entry(x).or_insert_with(BigRational::zero);
        *entry += c;
        if entry.is_zero() {
            self.terms.retain(|_, v| !v.is_zero());
        }
    }

    pub fn add_scaled(&mut self, other: &ChainVector, c: &BigRational) {
        for (x, v) in &other.terms {
            self.add_term(x.clone(), v * c);
        }
    }

    /// Coordinates against `basis`; fails if a term is not in it.
    pub fn coordinates(&self, basis: &[Generator]) -> Result<Vec<BigRational>> {
        let mut out = vec![BigRational::zero(); basis.len()];
        for (x, v) in &self.terms {
            let i = basis
                .binary_search(x)
                .map_err(|_| Error::DimensionMismatch(format!("generator {} not in basis", x.key)))?;
            out[i] = v.clone();
        }
        Ok(out)
    }
}

fn check_gc_graph(g: &StableGraph) -> Result<()> {
    if g.has_loop() {
        return Err(Error::NotGraphComplexGraph("has a loop".into()));
    }
    if g.weights().iter().any(|&w| w > 0) {
        return Err(Error::NotGraphComplexGraph("has a positive weight".into()));
    }
    if g.min_valence() < 3 {
        return Err(Error::NotGraphComplexGraph("has a vertex of valence at most 2".into()));
    }
    if !g.is_connected() {
        return Err(Error::NotGraphComplexGraph("is disconnected".into()));
    }
    Ok(())
}

/// `(g, ω)` as `±` a basis element, or `None` if it is zero. `ordering[i]`
/// is the edge of `g` in position `i` of `ω`.
pub fn normalize(g: &StableGraph, ordering: &[usize]) -> Result<Option<(i8, Generator)>> {
    check_gc_graph(g)?;
    if ordering.len() != g.edge_count() || !is_permutation(ordering) {
        return Err(Error::InvalidPermutation(format!(
            "{ordering:?} is not an ordering of {} edges",
            g.edge_count()
        )));
    }
    let (form, aut) = canonicalize(g);
    if aut.has_odd_edge_automorphism {
        return Ok(None);
    }
    let positions: Vec<usize> = ordering.iter().map(|&e| form.edge_map[e]).collect();
    let degree = degree_of(g);
    Ok(Some((
        permutation_sign(&positions),
        Generator {
            key: form.key,
            degree,
        },
    )))
}

/// `normalize` with the ordering given by edge indices.
pub fn normalize_graph(g: &StableGraph) -> Result<Option<(i8, Generator)>> {
    let identity: Vec<usize> = (0..g.edge_count()).collect();
    normalize(g, &identity)
}

pub fn generator_of(g: &StableGraph) -> Result<Option<Generator>> {
    Ok(normalize_graph(g)?.map(|(_, x)| x))
}

fn signed(v: &mut ChainVector, term: Option<(i8, Generator)>, sign: i64) {
    if let Some((s, x)) = term {
        v.add_term(x, BigRational::from_integer(BigInt::from(sign * s as i64)));
    }
}

/// `Σ (-1)^i [Γ/e_i]` with the inherited order on the remaining edges.
pub fn boundary(x: &Generator) -> ChainVector {
    let g = x.graph();
    let mut out = ChainVector::zero();
    for i in 0..g.edge_count() {
        let c = g.contract(EdgeId::from_index(i)).expect("edge in range");
        if c.has_loop() {
            // only possible for parallel edges, which make the generator zero
            continue;
        }
        let sign = if i % 2 == 0 { 1 } else { -1 };
        signed(&mut out, normalize_graph(&c).expect("contraction of a graph-complex graph"), sign);
    }
    out
}

pub fn boundary_of(v: &ChainVector) -> ChainVector {
    let mut out = ChainVector::zero();
    for (x, c) in v.terms() {
        out.add_scaled(&boundary(x), c);
    }
    out
}

/// Half-edge subsets `H` at `v` with `|H|, |H'| >= 2`, one per unordered
/// pair: the first half-edge is always kept in `H`, and the complement
/// `H'` is what moves to the new vertex.
fn splittings(g: &StableGraph, v: usize) -> Vec<Vec<usize>> {
    let hs = g.half_edges_at(v);
    let d = hs.len();
    if d < 4 {
        return Vec::new();
    }
    let mut out = Vec::new();
    for mask in 0u64..(1 << (d - 1)) {
        // bit i of mask: whether hs[i + 1] moves
        let moved: Vec<usize> = (0..d - 1).filter(|i| mask >> i & 1 == 1).map(|i| hs[i + 1]).collect();
        if moved.len() >= 2 && d - moved.len() >= 2 {
            out.push(moved);
        }
    }
    out
}

/// `(-1)^{|E|} Σ_v Σ_{H,H'} [Γ_{H,H'}]` with the new edge ordered last.
pub fn dual_coboundary(x: &Generator) -> ChainVector {
    let g = x.graph();
    let global = if g.edge_count() % 2 == 0 { 1 } else { -1 };
    let mut out = ChainVector::zero();
    for v in 0..g.vertex_count() {
        for moved in splittings(&g, v) {
            let s = g.split_vertex(v, &moved).expect("valid splitting");
            signed(&mut out, normalize_graph(&s).expect("split of a graph-complex graph"), global);
        }
    }
    out
}

pub fn dual_coboundary_of(v: &ChainVector) -> ChainVector {
    let mut out = ChainVector::zero();
    for (x, c) in v.terms() {
        out.add_scaled(&dual_coboundary(x), c);
    }
    out
}

/// Hub `0`, rim `1..=g`; spokes `(0, i)` first, then rim edges
/// `(i, i % g + 1)`.
pub fn wheel(g: u32) -> Result<StableGraph> {
    if g < 3 {
        return Err(Error::GenusTooSmall(g, 3));
    }
    let g = g as usize;
    let spokes = (1..=g).map(|i| (0, i));
    let rim = (1..=g).map(|i| (i, i % g + 1));
    let edges: Vec<(usize, usize)> = spokes.chain(rim).collect();
    StableGraph::new(vec![0; g + 1], &edges)
}

/// The wheel as a chain vector (zero for even `g`).
pub fn wheel_chain(g: u32) -> Result<ChainVector> {
    let mut v = ChainVector::zero();
    signed(&mut v, normalize_graph(&wheel(g)?)?, 1);
    Ok(v)
}

/// The graph complex with explicit bases.
#[derive(Debug, Clone)]
pub struct GraphComplex {
    pub genus: u32,
    pub complex: GradedChainComplex<CanonicalKey>,
    pub generators: BTreeMap<i32, Vec<Generator>>,
}

impl GraphComplex {
    pub fn basis(&self, k: i32) -> &[Generator] {
        self.generators.get(&k).map_or(&[], Vec::as_slice)
    }

    /// Matrix of `dual_coboundary` from degree `k` to degree `k + 1`.
    pub fn coboundary_matrix(&self, k: i32) -> SparseIntMatrix {
        operator_matrix(self.basis(k), self.basis(k + 1), dual_coboundary)
    }

    /// Vector of `v` in the basis of its degree.
    pub fn coordinates(&self, v: &ChainVector) -> Result<Vec<BigRational>> {
        match v.degree() {
            None => Ok(Vec::new()),
            Some(k) => v.coordinates(self.basis(k)),
        }
    }
}

fn operator_matrix(
    domain: &[Generator],
    codomain: &[Generator],
    op: impl Fn(&Generator) -> ChainVector + Sync,
) -> SparseIntMatrix {
    let columns: Vec<Vec<(usize, usize, BigInt)>> = domain
        .par_iter()
        .enumerate()
        .map(|(c, x)| {
            op(x)
                .terms()
                .map(|(y, v)| {
                    let r = codomain.binary_search(y).expect("image lies in the codomain basis");
                    assert!(v.is_integer(), "integral operator");
                    (r, c, v.to_integer())
                })
                .collect()
        })
        .collect();
    SparseIntMatrix::from_triplets(codomain.len(), domain.len(), columns.into_iter().flatten())
        .expect("indices in range")
}

/// Bases in every degree from `1 - g` (two vertices) to `g - 3` (trivalent)
/// and the contraction boundary between them.
pub fn build_graph_complex(g: u32) -> Result<GraphComplex> {
    build_graph_complex_from(g, &gc_graphs(g)?)
}

/// As [`build_graph_complex`], from the output of [`gc_graphs`].
pub fn build_graph_complex_from(g: u32, all: &GraphSet) -> Result<GraphComplex> {
    if g < 2 {
        return Err(Error::GenusTooSmall(g, 2));
    }
    let (lo, hi) = (1 - g as i32, g as i32 - 3);
    let mut generators: BTreeMap<i32, Vec<Generator>> = (lo..=hi).map(|k| (k, Vec::new())).collect();
    let found: Vec<Generator> = all
        .par_iter()
        .filter_map(|(_, gr)| generator_of(gr).expect("enumerated graphs are graph-complex graphs"))
        .collect();
    for x in found {
        generators.get_mut(&x.degree).expect("degree in range").push(x);
    }
    for b in generators.values_mut() {
        b.sort();
    }
    let bases: Vec<Vec<CanonicalKey>> = (lo..=hi)
        .map(|k| generators[&k].iter().map(|x| x.key.clone()).collect())
        .collect();
    let boundaries = (lo..=hi)
        .map(|k| {
            let empty = Vec::new();
            let below = generators.get(&(k - 1)).unwrap_or(&empty);
            operator_matrix(&generators[&k], below, boundary)
        })
        .collect();
    let complex = GradedChainComplex::new(lo, bases, boundaries)?;
    Ok(GraphComplex {
        genus: g,
        complex,
        generators,
    })
}

/// Degree-`k` generators only; avoids building the whole complex.
pub fn generators_in_degree(g: u32, k: i32) -> Result<Vec<Generator>> {
    let mut out: Vec<Generator> = enumerate_gc_generators(g, k)?
        .values()
        .filter_map(|gr| generator_of(gr).expect("graph-complex graph"))
        .collect();
    out.sort();
    Ok(out)
}

/// How the vertex-splitting coboundary compares with the transposed
/// contraction boundary in one pair of adjacent degrees.
#[derive(Debug, Clone, PartialEq, Eq, serde::Serialize)]
pub struct DualityReport {
    /// the lower degree `k`; the pair is `C_k -> C_{k+1}` against `C_{k+1} -> C_k`
    pub degree: i32,
    pub rows: usize,
    pub cols: usize,
    /// coboundary equals the transposed boundary entry for entry
    pub exact_transpose: bool,
    /// coboundary equals the transposed boundary after weighting each basis
    /// element by its automorphism-group order: `|Aut y| δ(y,x) = |Aut x| ∂(x,y)`
    pub weighted_transpose: bool,
    /// common sign `s` with `δ = s ∂^T`, if there is one
    pub global_sign: Option<i8>,
}

pub fn duality_report(gc: &GraphComplex, k: i32) -> DualityReport {
    let delta = gc.coboundary_matrix(k);
    let partial_t = gc.complex.boundary_matrix(k + 1).transpose();
    let minus_one = BigInt::from(-1);
    let negated = scale(&partial_t, |_, _| &minus_one);
    let global_sign = if delta == partial_t {
        Some(1)
    } else if delta == negated {
        Some(-1)
    } else {
        None
    };
    let order = |x: &Generator| BigInt::from(automorphisms(&x.graph()).group_order);
    let lower: Vec<BigInt> = gc.basis(k).iter().map(order).collect();
    let upper: Vec<BigInt> = gc.basis(k + 1).iter().map(order).collect();
    // rows of both matrices index degree k + 1, columns degree k
    let lhs = scale(&delta, |r, _| &upper[r]);
    let rhs = scale(&partial_t, |_, c| &lower[c]);
    DualityReport {
        degree: k,
        rows: delta.rows(),
        cols: delta.cols(),
        exact_transpose: global_sign == Some(1),
        weighted_transpose: lhs == rhs,
        global_sign,
    }
}

fn scale<'a>(m: &SparseIntMatrix, w: impl Fn(usize, usize) -> &'a BigInt) -> SparseIntMatrix {
    SparseIntMatrix::from_triplets(
        m.rows(),
        m.cols(),
        m.triplets().iter().map(|(r, c, v)| (*r, *c, v * w(*r, *c))),
    )
    .expect("same shape")
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::canonical::canonical_form;

    fn k4() -> StableGraph {
        StableGraph::new(vec![0; 4], &[(0, 1), (0, 2), (0, 3), (1, 2), (1, 3), (2, 3)]).unwrap()
    }

    fn theta() -> StableGraph {
        StableGraph::new(vec![0, 0], &[(0, 1), (0, 1), (0, 1)]).unwrap()
    }

    #[test]
    fn normalize_examples() {
        assert_eq!(normalize(&theta(), &[2, 0, 1]).unwrap(), None);
        let g = canonical_form(&k4()).graph;
        let (s, x) = normalize_graph(&g).unwrap().unwrap();
        assert_eq!((s, x.degree), (1, 0));
        let (t, y) = normalize(&g, &[1, 0, 2, 3, 4, 5]).unwrap().unwrap();
        assert_eq!((t, &y), (-1, &x));
    }

    #[test]
    fn normalize_rejects_non_complex_graphs() {
        let looped = StableGraph::new(vec![0, 0], &[(0, 1), (0, 0), (1, 1)]).unwrap();
        assert!(normalize_graph(&looped).is_err());
        let weighted = StableGraph::new(vec![1, 0], &[(0, 1), (0, 1), (0, 1)]).unwrap();
        assert!(normalize_graph(&weighted).is_err());
        let bivalent = StableGraph::new(vec![0; 3], &[(0, 1), (0, 1), (0, 2), (1, 2)]).unwrap();
        assert!(normalize_graph(&bivalent).is_err());
        assert!(normalize(&k4(), &[0, 1, 2]).is_err());
        assert!(normalize(&k4(), &[0, 0, 1, 2, 3, 4]).is_err());
    }

    #[test]
    fn wheels() {
        assert_eq!(canonical_form(&wheel(3).unwrap()).key, canonical_form(&k4()).key);
        assert!(wheel_chain(4).unwrap().is_zero());
        assert!(wheel_chain(6).unwrap().is_zero());
        let w5 = wheel(5).unwrap();
        assert_eq!((w5.vertex_count(), w5.edge_count(), w5.genus()), (6, 10, 5));
        assert_eq!(w5.valences(), vec![5, 3, 3, 3, 3, 3]);
        assert!(wheel(2).is_err());
        for g in [3, 5] {
            let w = wheel_chain(g).unwrap();
            assert_eq!(w.len(), 1);
            assert!(boundary_of(&w).is_zero());
        }
    }

    #[test]
    fn k4_boundary_vanishes() {
        let x = generator_of(&k4()).unwrap().unwrap();
        assert!(boundary(&x).is_zero());
        assert!(dual_coboundary(&x).is_zero());
    }

    #[test]
    fn small_complexes() {
        let gc2 = build_graph_complex(2).unwrap();
        assert_eq!(gc2.complex.total_dim(), 0);
        assert_eq!(gc2.complex.degrees(), -1..=-1);
        let gc3 = build_graph_complex(3).unwrap();
        let k4_key = canonical_form(&k4()).key;
        assert_eq!(gc3.complex.basis(0), &[k4_key]);
        assert_eq!(gc3.complex.dim(1), 0);
        assert_eq!(gc3.complex.homology_dims().unwrap(), BTreeMap::from([(-2, 0), (-1, 0), (0, 1)]));
        assert!(build_graph_complex(1).is_err());
    }

    #[test]
    fn genus_four_axioms() {
        let gc = build_graph_complex(4).unwrap();
        gc.complex.check_boundary_squared().unwrap();
        for k in gc.complex.degrees() {
            for x in gc.basis(k) {
                assert!(boundary_of(&boundary(x)).is_zero());
                assert!(dual_coboundary_of(&dual_coboundary(x)).is_zero());
            }
            let r = duality_report(&gc, k);
            assert!(r.exact_transpose && r.weighted_transpose, "{r:?}");
        }
        assert_eq!(generators_in_degree(4, 0).unwrap(), gc.basis(0));
    }

    #[test]
    fn splittings_are_unordered_partitions() {
        // a 5-valent vertex has (2^5 - 2 - 2*5) / 2 = 10 splittings into parts of size >= 2
        let w5 = wheel(5).unwrap();
        assert_eq!(splittings(&w5, 0).len(), 10);
        assert!(splittings(&w5, 1).is_empty());
    }

    #[test]
    fn chain_vector_arithmetic() {
        let x = generator_of(&k4()).unwrap().unwrap();
        let mut v = ChainVector::from_generator(x.clone());
        v.add_term(x.clone(), BigRational::from_integer((-1).into()));
        assert!(v.is_zero());
        v.add_term(x.clone(), BigRational::from_integer(3.into()));
        assert_eq!(v.coordinates(std::slice::from_ref(&x)).unwrap(), vec![BigRational::from_integer(3.into())]);
        assert!(v.coordinates(&[]).is_err());
    }
}
