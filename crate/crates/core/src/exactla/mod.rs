//! Exact sparse linear algebra over the integers and rationals.

mod complex;
mod rank;

use std::collections::BTreeMap;
use std::fmt::Write as _;

use num_bigint::BigInt;
use num_traits::{Signed, Zero};

use crate::error::{Error, Result};

pub use complex::{GradedChainComplex, HomologyRow};
pub use rank::{in_column_space, random_prime, rank_exact, rank_mod_p, rank_with_prime_checks, RankCheck};

/// Coordinate-format integer matrix. Entries are kept sorted by
/// `(col, row)`, without duplicates or stored zeros.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct SparseIntMatrix {
    rows: usize,
    cols: usize,
    entries: Vec<(usize, usize, BigInt)>,
}

impl SparseIntMatrix {
    pub fn zero(rows: usize, cols: usize) -> Self {
        SparseIntMatrix {
            rows,
            cols,
            entries: Vec::new(),
        }
    }

    /// Sums duplicate coordinates and drops zeros.
    pub fn from_triplets<V: Into<BigInt>>(
        rows: usize,
        cols: usize,
        triplets: impl IntoIterator<Item = (usize, usize, V)>,
    ) -> Result<Self> {
        let mut acc: BTreeMap<(usize, usize), BigInt> = BTreeMap::new();
        for (r, c, v) in triplets {
            if r >= rows || c >= cols {
                return Err(Error::DimensionMismatch(format!(
                    "entry ({r}, {c}) outside a {rows}x{cols} matrix"
                )));
            }
            *acc.entry((c, r)).or_default() += v.into();
        }
        let entries = acc
            .into_iter()
            .filter(|(_, v)| !v.is_zero())
            .map(|((c, r), v)| (r, c, v))
            .collect();
        Ok(SparseIntMatrix { rows, cols, entries })
    }

    pub fn from_dense(rows: &[Vec<i64>]) -> Self {
        let cols = rows.first().map_or(0, Vec::len);
        let triplets = rows
            .iter()
            .enumerate()
            .flat_map(|(r, row)| row.iter().enumerate().map(move |(c, &v)| (r, c, v)));
        Self::from_triplets(rows.len(), cols, triplets).expect("indices in range")
    }

    pub fn identity(n: usize) -> Self {
        Self::from_triplets(n, n, (0..n).map(|i| (i, i, 1))).expect("square")
    }

    pub fn rows(&self) -> usize {
        self.rows
    }

    pub fn cols(&self) -> usize {
        self.cols
    }

    pub fn nnz(&self) -> usize {
        self.entries.len()
    }

    pub fn is_zero(&self) -> bool {
        self.entries.is_empty()
    }

    /// `(row, col, value)` sorted by `(col, row)`.
    pub fn triplets(&self) -> &[(usize, usize, BigInt)] {
        &self.entries
    }

    pub fn get(&self, row: usize, col: usize) -> BigInt {
        self.entries
            .binary_search_by(|(r, c, _)| (*c, *r).cmp(&(col, row)))
            .map(|i| self.entries[i].2.clone())
            .unwrap_or_default()
    }

    pub fn max_abs_entry(&self) -> BigInt {
        self.entries
            .iter()
            .map(|(_, _, v)| v.abs())
            .max()
            .unwrap_or_default()
    }

    pub fn transpose(&self) -> Self {
        Self::from_triplets(
            self.cols,
            self.rows,
            self.entries.iter().map(|(r, c, v)| (*c, *r, v.clone())),
        )
        .expect("transposed indices in range")
    }

    /// `self * rhs`.
    pub fn mul(&self, rhs: &SparseIntMatrix) -> Result<Self> {
        if self.cols != rhs.rows {
            return Err(Error::DimensionMismatch(format!(
                "cannot multiply {}x{} by {}x{}",
                self.rows, self.cols, rhs.rows, rhs.cols
            )));
        }
        let mut by_col: Vec<Vec<(usize, &BigInt)>> = vec![Vec::new(); self.cols];
        for (r, c, v) in &self.entries {
            by_col[*c].push((*r, v));
        }
        let products = rhs.entries.iter().flat_map(|(k, c, w)| {
            by_col[*k].iter().map(move |(r, v)| (*r, *c, *v * w))
        });
        Self::from_triplets(self.rows, rhs.cols, products)
    }

    /// Column `c` as `(row, value)` pairs.
    pub fn column(&self, c: usize) -> impl Iterator<Item = (usize, &BigInt)> {
        let start = self.entries.partition_point(|e| e.1 < c);
        self.entries[start..]
            .iter()
            .take_while(move |e| e.1 == c)
            .map(|(r, _, v)| (*r, v))
    }

    /// Text format: header `rows cols nnz`, then one `r c v` line per entry
    /// in `(col, row)` order.
    pub fn to_text(&self) -> String {
        let mut s = format!("{} {} {}\n", self.rows, self.cols, self.entries.len());
        for (r, c, v) in &self.entries {
            writeln!(s, "{r} {c} {v}").expect("writing to a String");
        }
        s
    }

    pub fn from_text(text: &str) -> Result<Self> {
        let mut lines = text.lines().filter(|l| !l.trim().is_empty());
        let header = lines
            .next()
            .ok_or_else(|| Error::Parse("missing matrix header".into()))?;
        let nums: Vec<usize> = header
            .split_whitespace()
            .map(str::parse)
            .collect::<std::result::Result<_, _>>()
            .map_err(|e| Error::Parse(format!("bad header {header:?}: {e}")))?;
        let [rows, cols, nnz] = nums[..] else {
            return Err(Error::Parse(format!("bad header {header:?}")));
        };
        let mut triplets = Vec::with_capacity(nnz);
        for line in lines {
            let parts: Vec<&str> = line.split_whitespace().collect();
            let [r, c, v] = parts[..] else {
                return Err(Error::Parse(format!("bad entry line {line:?}")));
            };
            let parse_idx = |s: &str| {
                s.parse::<usize>()
                    .map_err(|e| Error::Parse(format!("bad index {s:?}: {e}")))
            };
            let v: BigInt = v
                .parse()
                .map_err(|e| Error::Parse(format!("bad value {v:?}: {e}")))?;
            triplets.push((parse_idx(r)?, parse_idx(c)?, v));
        }
        if triplets.len() != nnz {
            return Err(Error::Parse(format!(
                "header declares {nnz} entries, found {}",
                triplets.len()
            )));
        }
        Self::from_triplets(rows, cols, triplets)
    }
}
