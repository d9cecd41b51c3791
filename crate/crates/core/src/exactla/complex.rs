use std::collections::BTreeMap;
use std::fmt::Display;

use num_bigint::BigInt;
use rayon::prelude::*;
use serde::Serialize;
use serde_json::{json, Value};

use super::{rank_exact, rank_mod_p, SparseIntMatrix};
use crate::error::{Error, Result};

/// A bounded chain complex of free modules with integer boundary matrices.
/// `boundary(k)` maps degree `k` to degree `k - 1`; rows index the basis of
/// degree `k - 1`, columns the basis of degree `k`.
#[derive(Debug, Clone)]
pub struct GradedChainComplex<B> {
    min_degree: i32,
    bases: Vec<Vec<B>>,
    boundaries: Vec<SparseIntMatrix>,
}

#[derive(Debug, Clone, PartialEq, Eq, Serialize)]
pub struct HomologyRow {
    pub degree: i32,
    pub dim_chains: usize,
    /// rank of the boundary arriving from degree `degree + 1`
    pub rank_in: usize,
    /// rank of the boundary leaving degree `degree`
    pub rank_out: usize,
    pub dim_homology: usize,
}

impl<B> GradedChainComplex<B> {
    /// `bases[i]` and `boundaries[i]` belong to degree `min_degree + i`.
    pub fn new(min_degree: i32, bases: Vec<Vec<B>>, boundaries: Vec<SparseIntMatrix>) -> Result<Self> {
        if bases.len() != boundaries.len() {
            return Err(Error::DimensionMismatch(format!(
                "{} bases but {} boundary matrices",
                bases.len(),
                boundaries.len()
            )));
        }
        for (i, m) in boundaries.iter().enumerate() {
            let below = if i == 0 { 0 } else { bases[i - 1].len() };
            if m.cols() != bases[i].len() || m.rows() != below {
                return Err(Error::DimensionMismatch(format!(
                    "boundary in degree {} is {}x{}, expected {}x{}",
                    min_degree + i as i32,
                    m.rows(),
                    m.cols(),
                    below,
                    bases[i].len()
                )));
            }
        }
        Ok(GradedChainComplex {
            min_degree,
            bases,
            boundaries,
        })
    }

    pub fn min_degree(&self) -> i32 {
        self.min_degree
    }

    /// Largest stored degree; `min_degree - 1` when nothing is stored.
    pub fn max_degree(&self) -> i32 {
        self.min_degree + self.bases.len() as i32 - 1
    }

    pub fn degrees(&self) -> std::ops::RangeInclusive<i32> {
        self.min_degree..=self.max_degree()
    }

    fn slot(&self, k: i32) -> Option<usize> {
        let i = k.checked_sub(self.min_degree)?;
        (i >= 0 && (i as usize) < self.bases.len()).then_some(i as usize)
    }

    pub fn basis(&self, k: i32) -> &[B] {
        self.slot(k).map_or(&[], |i| &self.bases[i])
    }

    pub fn dim(&self, k: i32) -> usize {
        self.basis(k).len()
    }

    /// `None` when both sides of the map are outside the stored range, which
    /// means the zero map between zero modules.
    pub fn boundary(&self, k: i32) -> Option<&SparseIntMatrix> {
        self.slot(k).map(|i| &self.boundaries[i])
    }

    /// Boundary `k` as a matrix, materializing the zero map where needed.
    pub fn boundary_matrix(&self, k: i32) -> SparseIntMatrix {
        match self.boundary(k) {
            Some(m) => m.clone(),
            None => SparseIntMatrix::zero(self.dim(k - 1), self.dim(k)),
        }
    }

    pub fn total_dim(&self) -> usize {
        self.bases.iter().map(Vec::len).sum()
    }

    /// First nonzero entry `(k, row, col, value)` of some `∂_{k-1} ∂_k`;
    /// `col` indexes the offending generator of degree `k`.
    pub fn boundary_square_violation(&self) -> Option<(i32, usize, usize, BigInt)> {
        self.degrees().find_map(|k| {
            let (outer, inner) = (self.boundary(k - 1)?, self.boundary(k)?);
            let product = outer.mul(inner).expect("consecutive shapes agree");
            product.triplets().first().map(|(r, c, v)| (k, *r, *c, v.clone()))
        })
    }

    pub fn check_boundary_squared(&self) -> Result<()> {
        match self.boundary_square_violation() {
            None => Ok(()),
            Some((k, r, c, v)) => Err(Error::BoundarySquare {
                degree: k,
                detail: format!(
                    "entry ({r}, {c}) of the composite is {v}; offending generator is column {c} of degree {k}"
                ),
            }),
        }
    }

    /// Exact rank of every boundary map, computed in parallel.
    pub fn boundary_ranks(&self) -> BTreeMap<i32, usize> {
        let min = self.min_degree;
        self.boundaries
            .par_iter()
            .enumerate()
            .map(|(i, m)| (min + i as i32, rank_exact(m)))
            .collect()
    }

    pub fn boundary_ranks_mod_p(&self, p: u64) -> BTreeMap<i32, usize> {
        let min = self.min_degree;
        self.boundaries
            .par_iter()
            .enumerate()
            .map(|(i, m)| (min + i as i32, rank_mod_p(m, p)))
            .collect()
    }

    fn table_from_ranks(&self, ranks: &BTreeMap<i32, usize>) -> Vec<HomologyRow> {
        self.degrees()
            .map(|k| {
                let dim_chains = self.dim(k);
                let rank_out = ranks.get(&k).copied().unwrap_or(0);
                let rank_in = ranks.get(&(k + 1)).copied().unwrap_or(0);
                HomologyRow {
                    degree: k,
                    dim_chains,
                    rank_in,
                    rank_out,
                    dim_homology: dim_chains - rank_in - rank_out,
                }
            })
            .collect()
    }

    /// Rational homology, one row per stored degree. Fails if the boundary
    /// does not square to zero.
    pub fn homology_table(&self) -> Result<Vec<HomologyRow>> {
        self.check_boundary_squared()?;
        Ok(self.table_from_ranks(&self.boundary_ranks()))
    }

    /// Homology over the field with `p` elements. Its dimensions bound the
    /// rational ones from above.
    pub fn homology_table_mod_p(&self, p: u64) -> Result<Vec<HomologyRow>> {
        self.check_boundary_squared()?;
        Ok(self.table_from_ranks(&self.boundary_ranks_mod_p(p)))
    }

    pub fn homology_dims(&self) -> Result<BTreeMap<i32, usize>> {
        Ok(self
            .homology_table()?
            .into_iter()
            .map(|r| (r.degree, r.dim_homology))
            .collect())
    }

    /// Alternating sum of chain dimensions.
    pub fn euler_characteristic(&self) -> i64 {
        self.degrees()
            .map(|k| if k.rem_euclid(2) == 0 { 1 } else { -1 } * self.dim(k) as i64)
            .sum()
    }

    /// The complex on the basis elements selected by `keep`. The caller is
    /// responsible for the selection being a subcomplex.
    pub fn restrict(&self, keep: impl Fn(&B) -> bool) -> Self
    where
        B: Clone,
    {
        let mut bases = Vec::with_capacity(self.bases.len());
        let mut index: Vec<Vec<Option<usize>>> = Vec::with_capacity(self.bases.len());
        for basis in &self.bases {
            let mut kept = Vec::new();
            let mut idx = Vec::with_capacity(basis.len());
            for b in basis {
                if keep(b) {
                    idx.push(Some(kept.len()));
                    kept.push(b.clone());
                } else {
                    idx.push(None);
                }
            }
            bases.push(kept);
            index.push(idx);
        }
        let boundaries = self
            .boundaries
            .iter()
            .enumerate()
            .map(|(i, m)| {
                let rows = if i == 0 { 0 } else { bases[i - 1].len() };
                let triplets = m.triplets().iter().filter_map(|(r, c, v)| {
                    Some((index[i - 1][*r]?, index[i][*c]?, v.clone()))
                });
                SparseIntMatrix::from_triplets(rows, bases[i].len(), triplets).expect("restricted indices")
            })
            .collect();
        GradedChainComplex {
            min_degree: self.min_degree,
            bases,
            boundaries,
        }
    }

    /// JSON export: per degree the basis (as strings) and the boundary
    /// triplets sorted by `(col, row)`.
    pub fn to_json(&self) -> Value
    where
        B: Display,
    {
        let degrees: Vec<Value> = self
            .degrees()
            .map(|k| {
                let m = self.boundary_matrix(k);
                json!({
                    "degree": k,
                    "basis": self.basis(k).iter().map(ToString::to_string).collect::<Vec<_>>(),
                    "boundary": {
                        "rows": m.rows(),
                        "cols": m.cols(),
                        "entries": m.triplets().iter()
                            .map(|(r, c, v)| json!([r, c, v.to_string()]))
                            .collect::<Vec<_>>(),
                    },
                })
            })
            .collect();
        json!({ "min_degree": self.min_degree, "degrees": degrees })
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    /// Reduced simplicial chains of a hollow triangle: a circle.
    fn circle() -> GradedChainComplex<&'static str> {
        let d0 = SparseIntMatrix::from_dense(&[vec![1, 1, 1]]);
        // edges 01, 02, 12
        let d1 = SparseIntMatrix::from_dense(&[vec![-1, -1, 0], vec![1, 0, -1], vec![0, 1, 1]]);
        GradedChainComplex::new(
            -1,
            vec![vec!["*"], vec!["0", "1", "2"], vec!["01", "02", "12"]],
            vec![SparseIntMatrix::zero(0, 1), d0, d1],
        )
        .unwrap()
    }

    #[test]
    fn circle_homology() {
        let c = circle();
        assert_eq!(c.homology_dims().unwrap(), BTreeMap::from([(-1, 0), (0, 0), (1, 1)]));
        assert_eq!(c.euler_characteristic(), -1 + 3 - 3);
        let table = c.homology_table().unwrap();
        assert_eq!(
            table[1],
            HomologyRow { degree: 0, dim_chains: 3, rank_in: 2, rank_out: 1, dim_homology: 0 }
        );
        let euler: i64 = table
            .iter()
            .map(|r| if r.degree.rem_euclid(2) == 0 { 1 } else { -1 } * r.dim_homology as i64)
            .sum();
        assert_eq!(euler, c.euler_characteristic());
        assert_eq!(c.homology_table_mod_p(2).unwrap(), table);
    }

    #[test]
    fn nonzero_square_detected() {
        let d0 = SparseIntMatrix::from_dense(&[vec![1, 1]]);
        let d1 = SparseIntMatrix::from_dense(&[vec![1], vec![1]]);
        let c = GradedChainComplex::new(-1, vec![vec![0], vec![0, 1], vec![0]], vec![SparseIntMatrix::zero(0, 1), d0, d1])
            .unwrap();
        assert!(matches!(c.homology_dims(), Err(Error::BoundarySquare { degree: 1, .. })));
    }

    #[test]
    fn shape_checked() {
        let bad = GradedChainComplex::new(0, vec![vec![0], vec![0]], vec![SparseIntMatrix::zero(0, 1), SparseIntMatrix::zero(2, 1)]);
        assert!(bad.is_err());
    }

    #[test]
    fn restriction_and_export() {
        let c = circle();
        let vertices_only = c.restrict(|b| b.len() == 1);
        assert_eq!(vertices_only.dim(1), 0);
        assert_eq!(vertices_only.dim(0), 3);
        assert_eq!(vertices_only.homology_dims().unwrap()[&0], 2);
        let j = c.to_json();
        assert_eq!(j["degrees"][2]["basis"][0], "01");
        assert_eq!(j["degrees"][2]["boundary"]["entries"][0], json!([0, 0, "-1"]));
        assert!(c.boundary(5).is_none());
        assert_eq!(c.boundary_matrix(5).rows(), 0);
    }
}
