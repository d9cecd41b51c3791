use std::collections::{HashMap, HashSet};

use rayon::prelude::*;
use serde::Serialize;

use super::{Orbit, Perm, SymmetricDeltaComplex};
use crate::canonical::canonicalize;
use crate::error::{Error, Result};
use crate::exactla::GradedChainComplex;
use crate::graphcomplex::GraphComplex;
use crate::graphs::{enumerate_trivalent, saturate_contractions, EdgeId, GraphSet, StableGraph};

/// The symmetric Δ-complex whose `p`-simplices are stable genus-`g` graphs
/// with `p + 1` labeled edges. Orbit `o` of dimension `p` is the canonical
/// graph `graphs[p + 1][o]` labeled by its canonical edge order.
#[derive(Debug, Clone)]
pub struct DeltaG {
    pub genus: u32,
    pub complex: SymmetricDeltaComplex,
    pub graphs: Vec<Vec<StableGraph>>,
}

impl DeltaG {
    /// Graphs in the loopless weight-0 part.
    pub fn is_a(g: &StableGraph) -> bool {
        !g.has_loop() && g.weights().iter().all(|&w| w == 0)
    }
}

pub fn delta_g(g: u32) -> Result<DeltaG> {
    delta_g_from(g, saturate_contractions(&enumerate_trivalent(g)?))
}

/// As [`delta_g`], from every stable graph of genus `g`.
pub fn delta_g_from(g: u32, all: GraphSet) -> Result<DeltaG> {
    if g < 2 {
        return Err(Error::GenusTooSmall(g, 2));
    }
    let top = 3 * g as usize - 3;
    let mut by_edges: Vec<Vec<(String, StableGraph)>> = vec![Vec::new(); top + 1];
    for (key, gr) in all {
        if gr.genus() != g as i64 || gr.edge_count() > top {
            return Err(Error::GenusMismatch { declared: g as i64, computed: gr.genus() });
        }
        by_edges[gr.edge_count()].push((key.to_string(), gr));
    }
    // keys order by edge count first, so each level is already sorted
    let index: Vec<HashMap<String, usize>> = by_edges
        .iter()
        .map(|level| level.iter().enumerate().map(|(i, (k, _))| (k.clone(), i)).collect())
        .collect();
    let levels: Vec<Vec<Orbit>> = by_edges
        .iter()
        .enumerate()
        .map(|(m, level)| {
            level
                .par_iter()
                .map(|(name, gr)| {
                    let (_, aut) = canonicalize(gr);
                    let gens: Vec<Perm> = aut
                        .generators
                        .iter()
                        .map(|h| (0..m).map(|e| h[2 * e] / 2).collect())
                        .collect();
                    let faces = (0..m)
                        .map(|j| {
                            let c = gr.contract(EdgeId::from_index(j)).expect("edge in range");
                            let (form, _) = canonicalize(&c);
                            let target = index[m - 1][&form.key.to_string()];
                            (target, form.edge_map)
                        })
                        .collect();
                    Orbit::new(name.clone(), m as i32 - 1, &gens, faces)
                })
                .collect()
        })
        .collect();
    Ok(DeltaG {
        genus: g,
        complex: SymmetricDeltaComplex::new(levels)?,
        graphs: by_edges.into_iter().map(|l| l.into_iter().map(|(_, gr)| gr).collect()).collect(),
    })
}

#[derive(Debug, Clone)]
pub struct SplitAB {
    pub c: GradedChainComplex<String>,
    pub a: GradedChainComplex<String>,
    pub b: GradedChainComplex<String>,
}

/// Splits the cellular chains of `Δ_g` into the loopless weight-0 part and
/// the rest, failing if the boundary connects the two.
pub fn split_ab(dg: &DeltaG) -> Result<SplitAB> {
    let c = dg.complex.cellular_chain_complex();
    let a_names: HashSet<String> = dg
        .graphs
        .iter()
        .enumerate()
        .flat_map(|(l, level)| {
            level
                .iter()
                .enumerate()
                .filter(|(_, gr)| DeltaG::is_a(gr))
                .map(move |(o, _)| dg.complex.orbit(l as i32 - 1, o).name.clone())
        })
        .collect();
    for p in c.degrees() {
        let Some(m) = c.boundary(p) else { continue };
        for (r, col, _) in m.triplets() {
            let (src, dst) = (&c.basis(p)[*col], &c.basis(p - 1)[*r]);
            if a_names.contains(src) != a_names.contains(dst) {
                return Err(Error::SplittingViolation(format!(
                    "boundary of {src} in dimension {p} meets {dst}"
                )));
            }
        }
    }
    let a = c.restrict(|n| a_names.contains(n));
    let b = c.restrict(|n| !a_names.contains(n));
    Ok(SplitAB { c, a, b })
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShiftRow {
    pub gc_degree: i32,
    pub simplicial_dim: i32,
    pub gc_dim: usize,
    pub a_dim: usize,
    pub bases_equal: bool,
    pub matrices_equal: bool,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct ShiftReport {
    pub genus: u32,
    pub rows: Vec<ShiftRow>,
}

impl ShiftReport {
    pub fn passed(&self) -> bool {
        self.rows.iter().all(|r| r.bases_equal && r.matrices_equal)
    }
}

/// Compares `G_k` with `A_{k + 2g - 1}`: same canonical keys in the same
/// order and equal boundary matrices. Also checks that `A` vanishes outside
/// the shifted range.
pub fn shift_check(gc: &GraphComplex, split: &SplitAB) -> Result<ShiftReport> {
    let g = gc.genus as i32;
    let shift = 2 * g - 1;
    let mut rows = Vec::new();
    for p in split.a.degrees() {
        let k = p - shift;
        if gc.complex.degrees().contains(&k) {
            continue;
        }
        if split.a.dim(p) != 0 {
            return Err(Error::DimensionMismatch(format!(
                "A has {} cells in dimension {p}, outside the shifted graph complex",
                split.a.dim(p)
            )));
        }
    }
    for k in gc.complex.degrees() {
        let p = k + shift;
        let gc_keys: Vec<String> = gc.complex.basis(k).iter().map(ToString::to_string).collect();
        let a_keys = split.a.basis(p);
        let bases_equal = gc_keys == a_keys;
        let matrices_equal = bases_equal && gc.complex.boundary_matrix(k) == split.a.boundary_matrix(p);
        rows.push(ShiftRow {
            gc_degree: k,
            simplicial_dim: p,
            gc_dim: gc_keys.len(),
            a_dim: a_keys.len(),
            bases_equal,
            matrices_equal,
        });
    }
    Ok(ShiftReport { genus: gc.genus, rows })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::graphcomplex::build_graph_complex;

    #[test]
    fn genus_two() {
        let dg = delta_g(2).unwrap();
        assert_eq!(dg.complex.top_dim(), 2);
        assert_eq!(dg.complex.orbits(-1).len(), 1);
        assert_eq!(dg.graphs[0][0], StableGraph::point(2));
        let total: usize = dg.complex.orbit_counts().values().sum();
        assert_eq!(total, 7);
        dg.complex.verify_relations().unwrap();
        let split = split_ab(&dg).unwrap();
        assert_eq!(split.a.total_dim(), 0);
        assert!(split.c.homology_dims().unwrap().values().all(|&d| d == 0));
        let report = shift_check(&build_graph_complex(2).unwrap(), &split).unwrap();
        assert!(report.passed());
    }

    #[test]
    fn genus_three() {
        let dg = delta_g(3).unwrap();
        dg.complex.verify_relations().unwrap();
        let split = split_ab(&dg).unwrap();
        split.c.check_boundary_squared().unwrap();
        assert_eq!(split.a.dim(5), 1);
        assert_eq!(split.a.total_dim(), 1);
        for p in split.c.degrees() {
            assert_eq!(split.a.dim(p) + split.b.dim(p), split.c.dim(p));
        }
        let h = split.c.homology_dims().unwrap();
        assert_eq!(h[&5], 1);
        assert_eq!(h.values().sum::<usize>(), 1);
        assert!(split.b.homology_dims().unwrap().values().all(|&d| d == 0));
        let gc = build_graph_complex(3).unwrap();
        let report = shift_check(&gc, &split).unwrap();
        assert!(report.passed(), "{report:?}");
        assert_eq!(report.rows.iter().find(|r| r.gc_degree == 0).unwrap().a_dim, 1);
    }

    #[test]
    fn parity_agrees_with_automorphism_data() {
        let dg = delta_g(3).unwrap();
        for (l, level) in dg.graphs.iter().enumerate() {
            for (o, gr) in level.iter().enumerate() {
                let orbit = dg.complex.orbit(l as i32 - 1, o);
                let (_, aut) = canonicalize(gr);
                assert_eq!(orbit.all_even(), !aut.has_odd_edge_automorphism);
                // loop flips act trivially on edges, so the edge group is a quotient
                assert_eq!(aut.group_order % orbit.stabilizer_order() as u128, 0);
            }
        }
    }
}
