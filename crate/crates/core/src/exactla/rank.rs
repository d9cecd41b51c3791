use std::collections::HashMap;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::Rng;

use super::SparseIntMatrix;
use crate::error::{Error, Result};

type SparseRow<T> = Vec<(usize, T)>;

/// Ring operations needed by fraction-free elimination. Every operation may
/// report overflow, in which case the caller restarts with a wider type.
trait Exact: Clone + PartialEq + Sized {
    fn from_big(v: &BigInt) -> Option<Self>;
    fn mul(&self, rhs: &Self) -> Option<Self>;
    fn sub(&self, rhs: &Self) -> Option<Self>;
    fn neg(&self) -> Option<Self>;
    fn gcd(&self, rhs: &Self) -> Self;
    fn div_exact(&self, rhs: &Self) -> Self;
    fn is_zero(&self) -> bool;
    fn is_one(&self) -> bool;
    fn is_negative(&self) -> bool;
}

impl Exact for i128 {
    fn from_big(v: &BigInt) -> Option<Self> {
        v.to_i128()
    }
    fn mul(&self, rhs: &Self) -> Option<Self> {
        self.checked_mul(*rhs)
    }
    fn sub(&self, rhs: &Self) -> Option<Self> {
        self.checked_sub(*rhs)
    }
    fn neg(&self) -> Option<Self> {
        self.checked_neg()
    }
    fn gcd(&self, rhs: &Self) -> Self {
        Integer::gcd(self, rhs)
    }
    fn div_exact(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn is_zero(&self) -> bool {
        *self == 0
    }
    fn is_one(&self) -> bool {
        *self == 1
    }
    fn is_negative(&self) -> bool {
        *self < 0
    }
}

impl Exact for BigInt {
    fn from_big(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }
    fn mul(&self, rhs: &Self) -> Option<Self> {
        Some(self * rhs)
    }
    fn sub(&self, rhs: &Self) -> Option<Self> {
        Some(self - rhs)
    }
    fn neg(&self) -> Option<Self> {
        Some(-self)
    }
    fn gcd(&self, rhs: &Self) -> Self {
        Integer::gcd(self, rhs)
    }
    fn div_exact(&self, rhs: &Self) -> Self {
        self / rhs
    }
    fn is_zero(&self) -> bool {
        Zero::is_zero(self)
    }
    fn is_one(&self) -> bool {
        One::is_one(self)
    }
    fn is_negative(&self) -> bool {
        Signed::is_negative(self)
    }
}

/// Rows of `m` with columns renumbered so that sparse columns come first
/// (ties by index), rows ordered by length (ties by index). Elimination
/// order is therefore deterministic.
fn ordered_rows(m: &SparseIntMatrix, extra: Option<&[BigInt]>) -> Vec<SparseRow<BigInt>> {
    let cols = m.cols() + usize::from(extra.is_some());
    let mut count = vec![0usize; cols];
    for (_, c, _) in m.triplets() {
        count[*c] += 1;
    }
    if let Some(b) = extra {
        count[cols - 1] = b.iter().filter(|v| !Zero::is_zero(*v)).count();
    }
    let mut order: Vec<usize> = (0..cols).collect();
    order.sort_by_key(|&c| (count[c], c));
    let mut pos = vec![0; cols];
    for (i, &c) in order.iter().enumerate() {
        pos[c] = i;
    }
    let mut rows: Vec<SparseRow<BigInt>> = vec![Vec::new(); m.rows()];
    for (r, c, v) in m.triplets() {
        rows[*r].push((pos[*c], v.clone()));
    }
    if let Some(b) = extra {
        for (r, v) in b.iter().enumerate() {
            if !Zero::is_zero(v) {
                rows[r].push((pos[cols - 1], v.clone()));
            }
        }
    }
    for row in &mut rows {
        row.sort_unstable_by_key(|e| e.0);
    }
    let mut idx: Vec<usize> = (0..rows.len()).filter(|&r| !rows[r].is_empty()).collect();
    idx.sort_by_key(|&r| (rows[r].len(), r));
    idx.into_iter().map(|r| std::mem::take(&mut rows[r])).collect()
}

fn remove_content<T: Exact>(row: &mut SparseRow<T>) -> Option<()> {
    let mut g = row[0].1.clone();
    for (_, v) in &row[1..] {
        if g.is_one() {
            break;
        }
        g = g.gcd(v);
    }
    if row[0].1.is_negative() {
        g = g.neg()?;
    }
    if !g.is_one() {
        for (_, v) in row.iter_mut() {
            *v = v.div_exact(&g);
        }
    }
    Some(())
}

/// `a * row - b * pivot` with the leading entries cancelling.
fn combine<T: Exact>(pivot: &SparseRow<T>, row: &SparseRow<T>) -> Option<SparseRow<T>> {
    let g = pivot[0].1.gcd(&row[0].1);
    let a = pivot[0].1.div_exact(&g);
    let b = row[0].1.div_exact(&g);
    let mut out = Vec::with_capacity(pivot.len() + row.len());
    let (mut i, mut j) = (1, 1);
    while i < row.len() || j < pivot.len() {
        let ci = row.get(i).map_or(usize::MAX, |e| e.0);
        let cj = pivot.get(j).map_or(usize::MAX, |e| e.0);
        let (c, v) = if ci < cj {
            i += 1;
            (ci, a.mul(&row[i - 1].1)?)
        } else if cj < ci {
            j += 1;
            (cj, b.mul(&pivot[j - 1].1)?.neg()?)
        } else {
            i += 1;
            j += 1;
            (ci, a.mul(&row[i - 1].1)?.sub(&b.mul(&pivot[j - 1].1)?)?)
        };
        if !v.is_zero() {
            out.push((c, v));
        }
    }
    Some(out)
}

/// Incremental fraction-free echelon form; returns the rank, or `None` on
/// overflow of `T`.
fn eliminate<T: Exact>(rows: &[SparseRow<BigInt>]) -> Option<usize> {
    let mut pivots: HashMap<usize, SparseRow<T>> = HashMap::new();
    for big in rows {
        let mut row: SparseRow<T> = big
            .iter()
            .map(|(c, v)| Some((*c, T::from_big(v)?)))
            .collect::<Option<_>>()?;
        while let Some(&(lead, _)) = row.first() {
            match pivots.get(&lead) {
                Some(p) => {
                    row = combine(p, &row)?;
                    if !row.is_empty() {
                        remove_content(&mut row)?;
                    }
                }
                None => {
                    remove_content(&mut row)?;
                    pivots.insert(lead, row);
                    break;
                }
            }
        }
    }
    Some(pivots.len())
}

fn rank_of_rows(rows: &[SparseRow<BigInt>]) -> usize {
    eliminate::<i128>(rows).unwrap_or_else(|| eliminate::<BigInt>(rows).expect("no overflow"))
}

/// Rank over the rationals.
pub fn rank_exact(m: &SparseIntMatrix) -> usize {
    rank_of_rows(&ordered_rows(m, None))
}

fn pow_mod(mut b: u64, mut e: u64, p: u64) -> u64 {
    let mut acc = 1u64;
    b %= p;
    while e > 0 {
        if e & 1 == 1 {
            acc = acc * b % p;
        }
        b = b * b % p;
        e >>= 1;
    }
    acc
}

/// Rank over the field with `p` elements. `p` must be a prime below 2^32.
pub fn rank_mod_p(m: &SparseIntMatrix, p: u64) -> usize {
    assert!(p >= 2 && p < 1 << 32, "prime must fit in 32 bits");
    let big_p = BigInt::from(p);
    let reduce = |v: &BigInt| -> u64 { v.mod_floor(&big_p).to_u64().expect("reduced") };
    let mut pivots: HashMap<usize, Vec<(usize, u64)>> = HashMap::new();
    for big in ordered_rows(m, None) {
        let mut row: Vec<(usize, u64)> = big
            .iter()
            .map(|(c, v)| (*c, reduce(v)))
            .filter(|e| e.1 != 0)
            .collect();
        while let Some(&(lead, lv)) = row.first() {
            match pivots.get(&lead) {
                Some(piv) => {
                    // row -= lv * piv (pivot rows are monic)
                    let mut out = Vec::with_capacity(row.len() + piv.len());
                    let (mut i, mut j) = (1, 1);
                    while i < row.len() || j < piv.len() {
                        let ci = row.get(i).map_or(usize::MAX, |e| e.0);
                        let cj = piv.get(j).map_or(usize::MAX, |e| e.0);
                        let (c, v) = if ci < cj {
                            i += 1;
                            (ci, row[i - 1].1)
                        } else if cj < ci {
                            j += 1;
                            (cj, (p - lv * piv[j - 1].1 % p) % p)
                        } else {
                            i += 1;
                            j += 1;
                            (ci, (row[i - 1].1 + p - lv * piv[j - 1].1 % p) % p)
                        };
                        if v != 0 {
                            out.push((c, v));
                        }
                    }
                    row = out;
                }
                None => {
                    let inv = pow_mod(lv, p - 2, p);
                    for e in row.iter_mut() {
                        e.1 = e.1 * inv % p;
                    }
                    pivots.insert(lead, row);
                    break;
                }
            }
        }
    }
    pivots.len()
}

fn is_prime(n: u64) -> bool {
    if n < 2 {
        return false;
    }
    let mut d = 2;
    while d * d <= n {
        if n % d == 0 {
            return false;
        }
        d += 1;
    }
    true
}

/// A uniformly chosen starting point in `[2^30, 2^31)`, advanced to the next
/// prime.
pub fn random_prime<R: Rng + ?Sized>(rng: &mut R) -> u64 {
    let mut n = rng.gen_range((1u64 << 30)..(1u64 << 31)) | 1;
    while !is_prime(n) {
        n += 2;
    }
    n
}

/// Exact rank together with the mod-p ranks tried against it.
#[derive(Debug, Clone, PartialEq, Eq)]
pub struct RankCheck {
    pub exact: usize,
    /// `(prime, rank)` in the order tried; the last one agrees with `exact`
    /// unless every retry fell short.
    pub mod_p: Vec<(u64, usize)>,
}

impl RankCheck {
    pub fn agrees(&self) -> bool {
        self.mod_p.last().is_some_and(|&(_, r)| r == self.exact)
    }
}

/// Exact rank cross-checked against random primes, retrying up to `tries`
/// primes while the mod-p rank falls short.
pub fn rank_with_prime_checks<R: Rng + ?Sized>(
    m: &SparseIntMatrix,
    rng: &mut R,
    tries: usize,
) -> RankCheck {
    let exact = rank_exact(m);
    let mut mod_p = Vec::new();
    for _ in 0..tries.max(1) {
        let p = random_prime(rng);
        let r = rank_mod_p(m, p);
        assert!(r <= exact, "mod-p rank {r} exceeds rational rank {exact}");
        mod_p.push((p, r));
        if r == exact {
            break;
        }
    }
    RankCheck { exact, mod_p }
}

/// Whether `b` lies in the rational column space of `m`.
pub fn in_column_space(m: &SparseIntMatrix, b: &[BigRational]) -> Result<bool> {
    if b.len() != m.rows() {
        return Err(Error::DimensionMismatch(format!(
            "vector of length {} against a matrix with {} rows",
            b.len(),
            m.rows()
        )));
    }
    if b.iter().all(Zero::is_zero) {
        return Ok(true);
    }
    let lcm = b
        .iter()
        .fold(BigInt::one(), |acc, x| acc.lcm(x.denom()));
    let scaled: Vec<BigInt> = b
        .iter()
        .map(|x| x.numer() * (&lcm / x.denom()))
        .collect();
    let with_b = rank_of_rows(&ordered_rows(m, Some(&scaled)));
    Ok(with_b == rank_exact(m))
}

#[cfg(test)]
mod tests {
    use super::*;
    use proptest::prelude::*;
    use rand::SeedableRng;
    use rand_chacha::ChaCha8Rng;

    /// Dense Gaussian elimination over the rationals.
    fn dense_rank(m: &SparseIntMatrix) -> usize {
        let mut a: Vec<Vec<BigRational>> = (0..m.rows())
            .map(|r| {
                (0..m.cols())
                    .map(|c| BigRational::from_integer(m.get(r, c)))
                    .collect()
            })
            .collect();
        let mut rank = 0;
        for c in 0..m.cols() {
            let Some(p) = (rank..a.len()).find(|&r| !a[r][c].is_zero()) else {
                continue;
            };
            a.swap(rank, p);
            for r in 0..a.len() {
                if r != rank && !a[r][c].is_zero() {
                    let f = &a[r][c] / &a[rank][c];
                    for k in c..m.cols() {
                        let t = &f * &a[rank][k];
                        a[r][k] -= t;
                    }
                }
            }
            rank += 1;
        }
        rank
    }

    #[test]
    fn small_examples() {
        assert_eq!(rank_exact(&SparseIntMatrix::identity(2)), 2);
        assert_eq!(rank_exact(&SparseIntMatrix::zero(3, 4)), 0);
        assert_eq!(rank_exact(&SparseIntMatrix::zero(0, 0)), 0);
        let m = SparseIntMatrix::from_dense(&[vec![1, 2, 3], vec![2, 4, 6], vec![1, 0, 1]]);
        assert_eq!(rank_exact(&m), 2);
        assert_eq!(rank_mod_p(&m, 7), 2);
        // full rank over Q, singular mod 5
        let m = SparseIntMatrix::from_dense(&[vec![5, 0], vec![0, 1]]);
        assert_eq!(rank_exact(&m), 2);
        assert_eq!(rank_mod_p(&m, 5), 1);
    }

    #[test]
    fn big_entries_fall_back_to_bigint() {
        let huge: BigInt = BigInt::from(1u8) << 120usize;
        let m = SparseIntMatrix::from_triplets(
            2,
            2,
            [(0, 0, huge.clone()), (0, 1, huge.clone() + 1), (1, 0, huge.clone() - 1), (1, 1, huge)],
        )
        .unwrap();
        assert_eq!(rank_exact(&m), 2);
    }

    #[test]
    fn column_space_membership() {
        let m = SparseIntMatrix::from_dense(&[vec![1, 0], vec![1, 0], vec![0, 2]]);
        let q = |n: i64, d: i64| BigRational::new(n.into(), d.into());
        assert!(in_column_space(&m, &[q(0, 1), q(0, 1), q(0, 1)]).unwrap());
        assert!(in_column_space(&m, &[q(1, 3), q(1, 3), q(5, 7)]).unwrap());
        assert!(!in_column_space(&m, &[q(1, 1), q(0, 1), q(0, 1)]).unwrap());
        assert!(in_column_space(&m, &[q(1, 1)]).is_err());
    }

    #[test]
    fn primes() {
        let mut rng = ChaCha8Rng::seed_from_u64(1);
        for _ in 0..5 {
            let p = random_prime(&mut rng);
            assert!(is_prime(p) && p >= 1 << 30 && p < 1 << 32);
        }
        assert!(!is_prime(1) && is_prime(2) && !is_prime(91) && is_prime(2147483647));
    }

    fn arb_matrix() -> impl Strategy<Value = SparseIntMatrix> {
        (1usize..7, 1usize..7).prop_flat_map(|(r, c)| {
            proptest::collection::vec(proptest::collection::vec(-2i64..3, c), r)
                .prop_map(|d| SparseIntMatrix::from_dense(&d))
        })
    }

    proptest! {
        #[test]
        fn matches_dense_rank(m in arb_matrix()) {
            let r = rank_exact(&m);
            prop_assert_eq!(r, dense_rank(&m));
            prop_assert_eq!(r, rank_exact(&m.transpose()));
            prop_assert!(rank_mod_p(&m, 2147483647) <= r);
        }

        #[test]
        fn columns_lie_in_column_space(m in arb_matrix(), pick in 0usize..7) {
            let c = pick % m.cols();
            let b: Vec<BigRational> = (0..m.rows())
                .map(|r| BigRational::from_integer(m.get(r, c)))
                .collect();
            prop_assert!(in_column_space(&m, &b).unwrap());
        }
    }
}
