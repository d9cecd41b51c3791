use std::collections::BTreeMap;
use std::fmt::{self, Display};
use std::str::FromStr;

use clap::ValueEnum;
use rayon::prelude::*;
use tropgc::exactla::{rank_exact, rank_mod_p, GradedChainComplex, HomologyRow};
use tropgc::graphcomplex::{build_graph_complex_from, GraphComplex};
use tropgc::symdelta::{barycentric_subdivision, delta_g_from, split_ab, DeltaG, SplitAB};

use crate::cache::{SetKind, Store};
use crate::failure::Failure;

/// Largest genus whose subdivided `Δ_g` is built; the next one is far too big.
pub const SUBDIVISION_MAX_GENUS: u32 = 3;

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ComplexKind {
    /// the graph complex, graded by vertex count
    Gc,
    /// reduced cellular chains of Δ_g
    C,
    /// loopless weight-0 part of the cellular chains
    A,
    /// the complement of `a`
    B,
    /// reduced simplicial chains of the barycentric subdivision of Δ_g
    Delta,
}

impl ComplexKind {
    pub fn name(self) -> &'static str {
        match self {
            ComplexKind::Gc => "gc",
            ComplexKind::C => "c",
            ComplexKind::A => "a",
            ComplexKind::B => "b",
            ComplexKind::Delta => "delta",
        }
    }
}

/// Inclusive degree range, written `A..B` or a single `K`.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub struct DegreeRange {
    pub lo: i32,
    pub hi: i32,
}

impl DegreeRange {
    pub fn contains(&self, k: i32) -> bool {
        (self.lo..=self.hi).contains(&k)
    }
}

impl FromStr for DegreeRange {
    type Err = String;

    fn from_str(s: &str) -> Result<Self, String> {
        let parse = |t: &str| t.trim().parse::<i32>().map_err(|e| format!("bad degree {t:?}: {e}"));
        let (lo, hi) = match s.split_once("..") {
            Some((a, b)) => (parse(a)?, parse(b.strip_prefix('=').unwrap_or(b))?),
            None => {
                let k = parse(s)?;
                (k, k)
            }
        };
        if lo > hi {
            return Err(format!("empty degree range {s}"));
        }
        Ok(DegreeRange { lo, hi })
    }
}

impl Display for DegreeRange {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}..{}", self.lo, self.hi)
    }
}

pub fn graph_complex(g: u32, store: &Store) -> Result<GraphComplex, Failure> {
    Ok(build_graph_complex_from(g, &store.graphs(g, SetKind::Gc)?)?)
}

pub fn delta(g: u32, store: &Store) -> Result<DeltaG, Failure> {
    Ok(delta_g_from(g, store.graphs(g, SetKind::Jg)?)?)
}

pub fn split(g: u32, store: &Store) -> Result<SplitAB, Failure> {
    Ok(split_ab(&delta(g, store)?)?)
}

pub fn subdivision_chains(g: u32, store: &Store) -> Result<GradedChainComplex<String>, Failure> {
    if g > SUBDIVISION_MAX_GENUS {
        return Err(Failure::Usage(format!(
            "the subdivided complex is only built for genus <= {SUBDIVISION_MAX_GENUS}"
        )));
    }
    Ok(barycentric_subdivision(&delta(g, store)?.complex).complex.chain_complex())
}

pub fn check_prime(p: u64) -> Result<(), Failure> {
    let is_prime = p >= 2 && (2..).take_while(|d| d * d <= p).all(|d| p % d != 0);
    if !is_prime || p >= 1 << 32 {
        return Err(Failure::Usage(format!("--mod-p needs a prime below 2^32, got {p}")));
    }
    Ok(())
}

/// Homology rows for the degrees in `range` (all degrees if `None`). With a
/// prime, degrees whose mod-`p` homology vanishes take their ranks from the
/// mod-`p` computation, which is then exact; the rest are computed over ℚ.
pub fn homology_rows<B: Display + Sync>(
    cx: &GradedChainComplex<B>,
    range: Option<DegreeRange>,
    prime: Option<u64>,
) -> Result<Vec<HomologyRow>, Failure> {
    if let Some((k, r, c, v)) = cx.boundary_square_violation() {
        return Err(Failure::Invariant(format!(
            "boundary squared is nonzero: ∂∂({}) has coefficient {v} on {} (degree {k})",
            cx.basis(k)[c],
            cx.basis(k - 2)[r]
        )));
    }
    let all = cx.degrees();
    let range = range.unwrap_or(DegreeRange { lo: *all.start(), hi: *all.end() });
    if !all.contains(&range.lo) || !all.contains(&range.hi) {
        return Err(Failure::Usage(format!(
            "degrees {range} outside the support {}..{} of this complex",
            all.start(),
            all.end()
        )));
    }
    let needed: Vec<i32> = (range.lo..=range.hi + 1).collect();
    let rank_of = |d: i32, exact: bool| {
        cx.boundary(d).map_or(0, |m| match prime {
            Some(p) if !exact => rank_mod_p(m, p),
            _ => rank_exact(m),
        })
    };
    let mut ranks: BTreeMap<i32, usize> = needed.par_iter().map(|&d| (d, rank_of(d, false))).collect();
    if prime.is_some() {
        let suspect: Vec<i32> = (range.lo..=range.hi)
            .filter(|&k| cx.dim(k) != ranks[&k] + ranks[&(k + 1)])
            .flat_map(|k| [k, k + 1])
            .collect();
        let exact: BTreeMap<i32, usize> = suspect.par_iter().map(|&d| (d, rank_of(d, true))).collect();
        ranks.extend(exact);
    }
    Ok((range.lo..=range.hi)
        .map(|k| {
            let (rank_in, rank_out) = (ranks[&(k + 1)], ranks[&k]);
            HomologyRow {
                degree: k,
                dim_chains: cx.dim(k),
                rank_in,
                rank_out,
                dim_homology: cx.dim(k) - rank_in - rank_out,
            }
        })
        .collect())
}

pub fn csv(kind: ComplexKind, g: u32, rows: &[HomologyRow]) -> String {
    let mut s = String::from("complex,genus,degree,dim_chains,rank_in,rank_out,dim_homology\n");
    for r in rows {
        s.push_str(&format!(
            "{},{g},{},{},{},{},{}\n",
            kind.name(),
            r.degree,
            r.dim_chains,
            r.rank_in,
            r.rank_out,
            r.dim_homology
        ));
    }
    s
}

pub fn run(kind: ComplexKind, g: u32, range: Option<DegreeRange>, prime: Option<u64>, store: &Store) -> Result<String, Failure> {
    if let Some(p) = prime {
        check_prime(p)?;
    }
    let rows = match kind {
        ComplexKind::Gc => homology_rows(&graph_complex(g, store)?.complex, range, prime)?,
        ComplexKind::Delta => homology_rows(&subdivision_chains(g, store)?, range, prime)?,
        ComplexKind::C | ComplexKind::A | ComplexKind::B => {
            let s = split(g, store)?;
            let cx = match kind {
                ComplexKind::C => &s.c,
                ComplexKind::A => &s.a,
                _ => &s.b,
            };
            homology_rows(cx, range, prime)?
        }
    };
    Ok(csv(kind, g, &rows))
}

#[cfg(test)]
mod tests {
    use super::*;
    use tropgc::exactla::SparseIntMatrix;

    fn circle() -> GradedChainComplex<String> {
        let names = |v: &[&str]| v.iter().map(|s| s.to_string()).collect::<Vec<_>>();
        GradedChainComplex::new(
            0,
            vec![names(&["v"]), names(&["e"])],
            vec![SparseIntMatrix::zero(0, 1), SparseIntMatrix::zero(1, 1)],
        )
        .unwrap()
    }

    #[test]
    fn degree_ranges_parse() {
        assert_eq!("-2..1".parse(), Ok(DegreeRange { lo: -2, hi: 1 }));
        assert_eq!("3".parse(), Ok(DegreeRange { lo: 3, hi: 3 }));
        assert_eq!("0..=2".parse(), Ok(DegreeRange { lo: 0, hi: 2 }));
        assert!("2..1".parse::<DegreeRange>().is_err());
        assert!("x".parse::<DegreeRange>().is_err());
    }

    #[test]
    fn primes_checked() {
        assert!(check_prime(1_000_000_007).is_ok());
        assert!(check_prime(91).is_err());
        assert!(check_prime(1).is_err());
        assert!(check_prime((1 << 32) + 15).is_err());
    }

    #[test]
    fn rows_and_ranges() {
        let rows = homology_rows(&circle(), None, None).unwrap();
        assert_eq!(rows.iter().map(|r| r.dim_homology).collect::<Vec<_>>(), vec![1, 1]);
        let only = homology_rows(&circle(), Some(DegreeRange { lo: 1, hi: 1 }), Some(3)).unwrap();
        assert_eq!(only.len(), 1);
        assert!(matches!(
            homology_rows(&circle(), Some(DegreeRange { lo: 0, hi: 2 }), None),
            Err(Failure::Usage(_))
        ));
    }

    #[test]
    fn mod_p_prefilter_stays_exact() {
        // ∂ = [2]: rank 1 over ℚ but 0 mod 2
        let cx = GradedChainComplex::new(
            0,
            vec![vec!["v".to_string()], vec!["e".to_string()]],
            vec![SparseIntMatrix::zero(0, 1), SparseIntMatrix::from_dense(&[vec![2]])],
        )
        .unwrap();
        let exact = homology_rows(&cx, None, None).unwrap();
        assert_eq!(homology_rows(&cx, None, Some(2)).unwrap(), exact);
        assert!(exact.iter().all(|r| r.dim_homology == 0));
    }

    #[test]
    fn nonzero_square_names_the_generator() {
        let cx = GradedChainComplex::new(
            0,
            vec![vec!["p".to_string()], vec!["q".to_string()], vec!["r".to_string()]],
            vec![
                SparseIntMatrix::zero(0, 1),
                SparseIntMatrix::from_dense(&[vec![1]]),
                SparseIntMatrix::from_dense(&[vec![1]]),
            ],
        )
        .unwrap();
        match homology_rows(&cx, None, None) {
            Err(Failure::Invariant(m)) => assert!(m.contains("∂∂(r)"), "{m}"),
            other => panic!("{other:?}"),
        }
    }
}
