//! Finite symmetric Δ-complexes stored one orbit per simplex class.
//!
//! An element of `X_p` is written `(o, π)`: the representative of orbit `o`
//! acted on by `π ∈ S_{p+1}`, i.e. `X(π)(rep_o)`. The action is on the
//! right: `(x·π)·σ = x·(π∘σ)`, and `(o, π) = (o, s∘π)` for `s` in the
//! stabilizer of `rep_o`.

mod deltag;
mod subdivision;

use std::collections::{BTreeMap, HashSet};

use num_bigint::BigInt;
use rayon::prelude::*;

use crate::canonical::permutation_sign;
use crate::error::{Error, Result};
use crate::exactla::{GradedChainComplex, SparseIntMatrix};

pub use deltag::{delta_g, delta_g_from, shift_check, split_ab, DeltaG, ShiftReport, ShiftRow, SplitAB};
pub use subdivision::{
    barycentric_subdivision, ordinary_simplicial_homology, FlagSimplex, OrdinaryDeltaComplex, Subdivision,
};

pub type Perm = Vec<usize>;

#[derive(Debug, Clone, PartialEq, Eq)]
pub struct Orbit {
    pub name: String,
    /// the whole stabilizer subgroup of `S_{p+1}`, sorted
    stabilizer: Vec<Perm>,
    all_even: bool,
    /// `faces[j] = (o', ρ)` with `d_j(rep) = rep_{o'}·ρ`
    faces: Vec<(usize, Perm)>,
}

impl Orbit {
    /// `generators` need not form a group; the closure is taken here.
    pub fn new(name: impl Into<String>, p: i32, generators: &[Perm], faces: Vec<(usize, Perm)>) -> Self {
        let stabilizer = close_group((p + 1) as usize, generators);
        let all_even = stabilizer.iter().all(|s| permutation_sign(s) == 1);
        Orbit {
            name: name.into(),
            stabilizer,
            all_even,
            faces,
        }
    }

    pub fn stabilizer(&self) -> &[Perm] {
        &self.stabilizer
    }

    pub fn stabilizer_order(&self) -> usize {
        self.stabilizer.len()
    }

    pub fn all_even(&self) -> bool {
        self.all_even
    }

    pub fn face(&self, j: usize) -> &(usize, Perm) {
        &self.faces[j]
    }
}

fn compose(a: &[usize], b: &[usize]) -> Perm {
    b.iter().map(|&x| a[x]).collect()
}

fn close_group(n: usize, generators: &[Perm]) -> Vec<Perm> {
    let identity: Perm = (0..n).collect();
    let mut seen: HashSet<Perm> = HashSet::from([identity.clone()]);
    let mut stack = vec![identity];
    while let Some(x) = stack.pop() {
        for g in generators {
            let y = compose(g, &x);
            if seen.insert(y.clone()) {
                stack.push(y);
            }
        }
    }
    let mut out: Vec<Perm> = seen.into_iter().collect();
    out.sort();
    out
}

/// `(o, π)` in dimension `dim`, with `π` the lexicographically least
/// representative of its stabilizer coset.
#[derive(Debug, Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Element {
    pub dim: i32,
    pub orbit: usize,
    pub perm: Perm,
}

/// `levels[p + 1]` holds the orbits of `X_p`, for `p >= -1`.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SymmetricDeltaComplex {
    levels: Vec<Vec<Orbit>>,
}

impl SymmetricDeltaComplex {
    /// Checks the shape of the face tables; relations are checked separately
    /// by [`verify_relations`](Self::verify_relations).
    pub fn new(levels: Vec<Vec<Orbit>>) -> Result<Self> {
        for (l, orbits) in levels.iter().enumerate() {
            let p = l as i32 - 1;
            for (o, orbit) in orbits.iter().enumerate() {
                let expected = if p < 0 { 0 } else { (p + 1) as usize };
                let bad = |what: String| Error::RelationViolation(format!("orbit {o} in dimension {p}: {what}"));
                if orbit.faces.len() != expected {
                    return Err(bad(format!("{} faces, expected {expected}", orbit.faces.len())));
                }
                for (target, rho) in &orbit.faces {
                    if *target >= levels[l - 1].len() || rho.len() != p as usize || !crate::canonical::is_permutation(rho) {
                        return Err(bad(format!("malformed face ({target}, {rho:?})")));
                    }
                }
            }
        }
        Ok(SymmetricDeltaComplex { levels })
    }

    /// Highest `p` with a stored level (possibly empty).
    pub fn top_dim(&self) -> i32 {
        self.levels.len() as i32 - 2
    }

    pub fn orbits(&self, p: i32) -> &[Orbit] {
        usize::try_from(p + 1)
            .ok()
            .and_then(|l| self.levels.get(l))
            .map_or(&[], Vec::as_slice)
    }

    pub fn orbit_counts(&self) -> BTreeMap<i32, usize> {
        (-1..=self.top_dim()).map(|p| (p, self.orbits(p).len())).collect()
    }

    pub fn orbit(&self, p: i32, o: usize) -> &Orbit {
        &self.orbits(p)[o]
    }

    /// Number of elements of `X_p`.
    pub fn element_count(&self, p: i32) -> usize {
        let n = (p + 1) as usize;
        let fact: usize = (1..=n).product();
        self.orbits(p).iter().map(|o| fact / o.stabilizer_order()).sum()
    }

    pub fn element(&self, p: i32, orbit: usize, perm: Perm) -> Element {
        let stab = &self.orbit(p, orbit).stabilizer;
        let perm = stab
            .iter()
            .map(|s| compose(s, &perm))
            .min()
            .expect("stabilizer contains the identity");
        Element { dim: p, orbit, perm }
    }

    pub fn representative(&self, p: i32, orbit: usize) -> Element {
        Element {
            dim: p,
            orbit,
            perm: (0..(p + 1) as usize).collect(),
        }
    }

    /// `x·σ` for `σ ∈ S_{p+1}`.
    pub fn act(&self, x: &Element, sigma: &[usize]) -> Element {
        self.element(x.dim, x.orbit, compose(&x.perm, sigma))
    }

    /// The action of the transposition of `j - 1` and `j`.
    pub fn transpose(&self, x: &Element, j: usize) -> Element {
        let mut t: Perm = (0..(x.dim + 1) as usize).collect();
        t.swap(j - 1, j);
        self.act(x, &t)
    }

    /// `d_i x = X(δ^i) x`, where `δ^i` is the increasing map missing `i`.
    pub fn face(&self, x: &Element, i: usize) -> Element {
        let (pi, o) = (&x.perm, x.orbit);
        // π∘δ^i = δ^j∘π' with j = π(i)
        let j = pi[i];
        let pi_prime: Perm = (0..pi.len() - 1)
            .map(|a| {
                let b = pi[if a < i { a } else { a + 1 }];
                if b < j {
                    b
                } else {
                    b - 1
                }
            })
            .collect();
        let (target, rho) = &self.orbit(x.dim, o).faces[j];
        self.element(x.dim - 1, *target, compose(rho, &pi_prime))
    }

    /// Checks, on every orbit representative: the face table is constant on
    /// stabilizer cosets, the simplicial identities `d_i d_j = d_{j-1} d_i`
    /// for `i < j`, and the four relations between faces and adjacent
    /// transpositions.
    pub fn verify_relations(&self) -> Result<()> {
        (-1..=self.top_dim())
            .into_par_iter()
            .try_for_each(|p| (0..self.orbits(p).len()).try_for_each(|o| self.verify_orbit(p, o)))
    }

    fn verify_orbit(&self, p: i32, o: usize) -> Result<()> {
        let fail = |what: String| Err(Error::RelationViolation(format!("orbit {o} of dimension {p}: {what}")));
        if p < 0 {
            return Ok(());
        }
        let n = (p + 1) as usize;
        let x = self.representative(p, o);
        for s in &self.orbit(p, o).stabilizer {
            let y = Element { dim: p, orbit: o, perm: s.clone() };
            for i in 0..n {
                if self.face(&y, i) != self.face(&x, i) {
                    return fail(format!("d_{i} differs on the stabilizer element {s:?}"));
                }
            }
        }
        for j in 0..n {
            for i in 0..j {
                if p >= 1 && self.face(&self.face(&x, j), i) != self.face(&self.face(&x, i), j - 1) {
                    return fail(format!("d_{i} d_{j} != d_{} d_{i}", j - 1));
                }
            }
        }
        for j in 1..n {
            let t = self.transpose(&x, j);
            for i in 0..n {
                let lhs = self.face(&t, i);
                let rhs = if i > j {
                    self.transpose(&self.face(&x, i), j)
                } else if i == j {
                    self.face(&x, i - 1)
                } else if i + 1 == j {
                    self.face(&x, i + 1)
                } else {
                    self.transpose(&self.face(&x, i), j - 1)
                };
                if lhs != rhs {
                    return fail(format!("d_{i} τ_{j} relation"));
                }
            }
        }
        Ok(())
    }

    /// Augmented cellular chains: degree `p` has one basis element per orbit
    /// of `X_p` whose stabilizer is all even, and
    /// `∂[o] = Σ_i (-1)^i sgn(ρ_i) [o_i]` where `d_i rep_o = rep_{o_i}·ρ_i`.
    /// Its homology is the reduced homology when `X_{-1}` is a point.
    pub fn cellular_chain_complex(&self) -> GradedChainComplex<String> {
        let mut bases = Vec::new();
        let mut index: Vec<Vec<Option<usize>>> = Vec::new();
        for orbits in &self.levels {
            let mut basis = Vec::new();
            let mut idx = Vec::new();
            for orbit in orbits {
                idx.push(orbit.all_even.then(|| {
                    basis.push(orbit.name.clone());
                    basis.len() - 1
                }));
            }
            bases.push(basis);
            index.push(idx);
        }
        let boundaries = (0..self.levels.len())
            .map(|l| {
                let rows = if l == 0 { 0 } else { bases[l - 1].len() };
                let mut triplets = Vec::new();
                for (o, orbit) in self.levels[l].iter().enumerate() {
                    let Some(c) = index[l][o] else { continue };
                    for (i, (target, rho)) in orbit.faces.iter().enumerate() {
                        if let Some(r) = index[l - 1][*target] {
                            let sign = if i % 2 == 0 { 1 } else { -1 } * permutation_sign(rho) as i64;
                            triplets.push((r, c, BigInt::from(sign)));
                        }
                    }
                }
                SparseIntMatrix::from_triplets(rows, bases[l].len(), triplets).expect("indices in range")
            })
            .collect();
        GradedChainComplex::new(-1, bases, boundaries).expect("shapes agree by construction")
    }
}

fn identity(n: usize) -> Perm {
    (0..n).collect()
}

/// One vertex, and one edge whose two ends are both that vertex and which
/// is fixed by the swap of its ends.
pub fn half_interval() -> SymmetricDeltaComplex {
    let point = Orbit::new("*", -1, &[], Vec::new());
    let vertex = Orbit::new("v", 0, &[], vec![(0, Vec::new())]);
    let edge = Orbit::new("e", 1, &[vec![1, 0]], vec![(0, identity(1)), (0, identity(1))]);
    SymmetricDeltaComplex::new(vec![vec![point], vec![vertex], vec![edge]]).expect("well formed")
}

/// The functor of injections into `[p]`: one free orbit per nonempty subset,
/// plus the empty injection in dimension -1.
pub fn representable(p: usize) -> SymmetricDeltaComplex {
    let n = p + 1;
    let mut levels: Vec<Vec<Orbit>> = vec![Vec::new(); n + 1];
    let mut subsets: Vec<Vec<Vec<usize>>> = vec![Vec::new(); n + 1];
    for mask in 0u32..(1 << n) {
        let s: Vec<usize> = (0..n).filter(|i| mask >> i & 1 == 1).collect();
        subsets[s.len()].push(s);
    }
    for level in &mut subsets {
        level.sort();
    }
    for (size, level) in subsets.iter().enumerate() {
        for s in level {
            let faces = (0..size)
                .map(|i| {
                    let mut t = s.clone();
                    t.remove(i);
                    let target = subsets[size - 1].binary_search(&t).expect("subset present");
                    (target, identity(size - 1))
                })
                .collect();
            let name = format!("{s:?}");
            levels[size].push(Orbit::new(name, size as i32 - 1, &[], faces));
        }
    }
    SymmetricDeltaComplex::new(levels).expect("well formed")
}
