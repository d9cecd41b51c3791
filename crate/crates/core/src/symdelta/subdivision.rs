use std::collections::{BTreeMap, HashMap};

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;

use super::{Element, SymmetricDeltaComplex};
use crate::error::{Error, Result};
use crate::exactla::{GradedChainComplex, SparseIntMatrix};

/// An ordinary Δ-complex: `faces[q][s][i]` is the index of `d_i` of the
/// `s`-th `q`-simplex among the `(q-1)`-simplices.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct OrdinaryDeltaComplex {
    faces: Vec<Vec<Vec<usize>>>,
}

impl OrdinaryDeltaComplex {
    pub fn new(faces: Vec<Vec<Vec<usize>>>) -> Result<Self> {
        for (q, level) in faces.iter().enumerate() {
            for (s, f) in level.iter().enumerate() {
                let ok = if q == 0 {
                    f.is_empty()
                } else {
                    f.len() == q + 1 && f.iter().all(|&t| t < faces[q - 1].len())
                };
                if !ok {
                    return Err(Error::RelationViolation(format!("simplex {s} of dimension {q} has faces {f:?}")));
                }
            }
        }
        let y = OrdinaryDeltaComplex { faces };
        y.check_identities()?;
        Ok(y)
    }

    pub fn dim(&self) -> i32 {
        self.faces.len() as i32 - 1
    }

    pub fn simplex_count(&self, q: usize) -> usize {
        self.faces.get(q).map_or(0, Vec::len)
    }

    pub fn face(&self, q: usize, s: usize, i: usize) -> usize {
        self.faces[q][s][i]
    }

    /// `d_i d_j = d_{j-1} d_i` for `i < j`.
    pub fn check_identities(&self) -> Result<()> {
        for q in 2..self.faces.len() {
            for (s, f) in self.faces[q].iter().enumerate() {
                for j in 0..=q {
                    for i in 0..j {
                        if self.faces[q - 1][f[j]][i] != self.faces[q - 1][f[i]][j - 1] {
                            return Err(Error::RelationViolation(format!(
                                "simplex {s} of dimension {q}: d_{i} d_{j} != d_{} d_{i}",
                                j - 1
                            )));
                        }
                    }
                }
            }
        }
        Ok(())
    }

    /// Augmented simplicial chains: degree -1 is a single generator hit by
    /// every vertex.
    pub fn chain_complex(&self) -> GradedChainComplex<String> {
        let mut bases = vec![vec!["*".to_string()]];
        let mut boundaries = vec![SparseIntMatrix::zero(0, 1)];
        for (q, level) in self.faces.iter().enumerate() {
            bases.push((0..level.len()).map(|s| format!("{q}:{s}")).collect());
            let rows = if q == 0 { 1 } else { self.faces[q - 1].len() };
            let triplets = level.iter().enumerate().flat_map(|(s, f)| {
                let entries: Vec<(usize, usize, BigInt)> = if q == 0 {
                    vec![(0, s, BigInt::from(1))]
                } else {
                    f.iter()
                        .enumerate()
                        .map(|(i, &t)| (t, s, BigInt::from(if i % 2 == 0 { 1 } else { -1 })))
                        .collect()
                };
                entries
            });
            boundaries.push(SparseIntMatrix::from_triplets(rows, level.len(), triplets).expect("indices in range"));
        }
        GradedChainComplex::new(-1, bases, boundaries).expect("shapes agree")
    }
}

/// Reduced rational homology, degrees `-1..=dim`.
pub fn ordinary_simplicial_homology(y: &OrdinaryDeltaComplex) -> Result<BTreeMap<i32, usize>> {
    y.chain_complex().homology_dims()
}

/// A simplex of the subdivision: a flag `A_0 ⊊ … ⊊ A_q = [p]` on the
/// representative of an orbit of `X_p`, up to the stabilizer.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord, Serialize)]
pub struct FlagSimplex {
    pub dim: i32,
    pub orbit: usize,
    /// `levels[e]` is the least `i` with `e ∈ A_i`
    pub levels: Vec<usize>,
}

impl FlagSimplex {
    pub fn flag(&self) -> Vec<Vec<usize>> {
        let q = self.levels.iter().copied().max().unwrap_or(0);
        (0..=q)
            .map(|i| (0..self.levels.len()).filter(|&e| self.levels[e] <= i).collect())
            .collect()
    }
}

#[derive(Debug, Clone)]
pub struct Subdivision {
    pub complex: OrdinaryDeltaComplex,
    pub simplices: Vec<Vec<FlagSimplex>>,
}

fn canonical_flag(x: &SymmetricDeltaComplex, dim: i32, orbit: usize, levels: Vec<usize>) -> FlagSimplex {
    let best = x
        .orbit(dim, orbit)
        .stabilizer()
        .iter()
        .map(|s| {
            let mut moved = vec![0; levels.len()];
            for (e, &l) in levels.iter().enumerate() {
                moved[s[e]] = l;
            }
            moved
        })
        .min()
        .expect("stabilizer contains the identity");
    FlagSimplex { dim, orbit, levels: best }
}

/// Surjections `[n] -> [q]` as level vectors.
fn surjections(n: usize, q: usize) -> Vec<Vec<usize>> {
    let mut out = Vec::new();
    let mut cur = vec![0; n];
    fn rec(i: usize, q: usize, cur: &mut Vec<usize>, out: &mut Vec<Vec<usize>>) {
        if i == cur.len() {
            let mut hit = vec![false; q + 1];
            for &l in cur.iter() {
                hit[l] = true;
            }
            if hit.iter().all(|&h| h) {
                out.push(cur.clone());
            }
            return;
        }
        for l in 0..=q {
            cur[i] = l;
            rec(i + 1, q, cur, out);
        }
    }
    rec(0, q, &mut cur, &mut out);
    out
}

fn face_of(x: &SymmetricDeltaComplex, s: &FlagSimplex, i: usize) -> FlagSimplex {
    let q = s.levels.iter().copied().max().expect("nonempty flag");
    if i < q {
        let levels = s.levels.iter().map(|&l| if l > i { l - 1 } else { l }).collect();
        return canonical_flag(x, s.dim, s.orbit, levels);
    }
    // drop the top set: restrict to A_{q-1} by the faces missing level-q labels
    let mut y: Element = x.representative(s.dim, s.orbit);
    for e in (0..s.levels.len()).rev() {
        if s.levels[e] == q {
            y = x.face(&y, e);
        }
    }
    let kept: Vec<usize> = s.levels.iter().copied().filter(|&l| l < q).collect();
    // (rep·π', G) ~ (rep, π'_* G)
    let mut levels = vec![0; kept.len()];
    for (a, &l) in kept.iter().enumerate() {
        levels[y.perm[a]] = l;
    }
    canonical_flag(x, y.dim, y.orbit, levels)
}

/// Barycentric subdivision as an ordinary Δ-complex whose `q`-simplices are
/// flags of length `q + 1` on simplices of `X`, modulo the symmetric groups.
pub fn barycentric_subdivision(x: &SymmetricDeltaComplex) -> Subdivision {
    let top = x.top_dim().max(-1);
    let mut simplices: Vec<Vec<FlagSimplex>> = Vec::new();
    for q in 0..=top.max(0) as usize {
        if top < q as i32 {
            break;
        }
        let found: Vec<FlagSimplex> = (q as i32..=top)
            .flat_map(|p| (0..x.orbits(p).len()).map(move |o| (p, o)))
            .collect::<Vec<_>>()
            .par_iter()
            .flat_map_iter(|&(p, o)| {
                surjections((p + 1) as usize, q)
                    .into_iter()
                    .map(move |l| canonical_flag(x, p, o, l))
            })
            .collect();
        let mut level: Vec<FlagSimplex> = found;
        level.sort();
        level.dedup();
        simplices.push(level);
    }
    let index: Vec<HashMap<&FlagSimplex, usize>> = simplices
        .iter()
        .map(|level| level.iter().enumerate().map(|(i, s)| (s, i)).collect())
        .collect();
    let faces: Vec<Vec<Vec<usize>>> = simplices
        .iter()
        .enumerate()
        .map(|(q, level)| {
            if q == 0 {
                return vec![Vec::new(); level.len()];
            }
            level
                .par_iter()
                .map(|s| (0..=q).map(|i| index[q - 1][&face_of(x, s, i)]).collect())
                .collect()
        })
        .collect();
    Subdivision {
        complex: OrdinaryDeltaComplex::new(faces).expect("subdivision is a Δ-complex"),
        simplices,
    }
}
