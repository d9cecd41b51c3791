use std::collections::BTreeMap;

use clap::ValueEnum;
use num_rational::BigRational;
use num_traits::Signed;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use serde::Serialize;
use serde_json::{json, Value};
use tropgc::canonical::permutation_sign;
use tropgc::exactla::{in_column_space, GradedChainComplex};
use tropgc::graphcomplex::{boundary_of, duality_report, normalize, wheel_chain};
use tropgc::growth::{
    growth_report, lie_dimensions, lie_dimensions_by_log, p_coefficients, p_coefficients_by_division,
};
use tropgc::symdelta::{
    barycentric_subdivision, half_interval, ordinary_simplicial_homology, representable, shift_check,
    SymmetricDeltaComplex,
};

use crate::cache::{SetKind, Store};
use crate::failure::Failure;
use crate::homology::{delta, graph_complex, split, SUBDIVISION_MAX_GENUS};

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Suite {
    Signs,
    Relations,
    Duality,
    Acyclic,
    Shift,
    Subdivision,
    Wheel,
    Growth,
}

impl Suite {
    pub fn name(self) -> &'static str {
        match self {
            Suite::Signs => "signs",
            Suite::Relations => "relations",
            Suite::Duality => "duality",
            Suite::Acyclic => "acyclic",
            Suite::Shift => "shift",
            Suite::Subdivision => "subdivision",
            Suite::Wheel => "wheel",
            Suite::Growth => "growth",
        }
    }

    /// Genus used when none is given.
    pub fn default_genus(self) -> u32 {
        match self {
            Suite::Wheel => 5,
            Suite::Signs | Suite::Duality | Suite::Acyclic => 4,
            _ => 3,
        }
    }
}

/// Largest genus whose graph complex is built to test that `W_g` is not a boundary.
pub const WHEEL_RANK_MAX_GENUS: u32 = 6;
pub const SIGN_TRIALS: usize = 20;
const SEED: u64 = 0x7472_6f70;

#[derive(Debug, Clone, Serialize)]
pub struct Check {
    pub name: String,
    pub passed: bool,
    pub detail: Value,
}

#[derive(Debug, Clone, Serialize)]
pub struct Report {
    pub suite: &'static str,
    #[serde(skip_serializing_if = "Option::is_none")]
    pub genus: Option<u32>,
    pub passed: bool,
    pub checks: Vec<Check>,
    /// checks that were not run, with the reason
    pub skipped: Vec<String>,
}

struct Builder {
    checks: Vec<Check>,
    skipped: Vec<String>,
}

impl Builder {
    fn new() -> Self {
        Builder { checks: Vec::new(), skipped: Vec::new() }
    }

    fn check(&mut self, name: impl Into<String>, passed: bool, detail: Value) {
        self.checks.push(Check { name: name.into(), passed, detail });
    }

    /// An `Err` from the library becomes a failed check instead of aborting.
    fn outcome(&mut self, name: impl Into<String>, r: tropgc::Result<()>) {
        match r {
            Ok(()) => self.check(name, true, Value::Null),
            Err(e) => self.check(name, false, json!(e.to_string())),
        }
    }

    fn finish(self, suite: Suite, genus: Option<u32>) -> Report {
        Report {
            suite: suite.name(),
            genus,
            passed: self.checks.iter().all(|c| c.passed),
            checks: self.checks,
            skipped: self.skipped,
        }
    }
}

pub fn run(suite: Suite, genus: Option<u32>, max: Option<usize>, store: &Store) -> Result<Report, Failure> {
    if suite == Suite::Growth {
        return growth(max.unwrap_or(400));
    }
    let g = genus.unwrap_or(suite.default_genus());
    let mut b = Builder::new();
    match suite {
        Suite::Signs => signs(&mut b, g, store)?,
        Suite::Relations => relations(&mut b, g, store)?,
        Suite::Duality => duality(&mut b, g, store)?,
        Suite::Acyclic => acyclic(&mut b, g, store)?,
        Suite::Shift => shift(&mut b, g, store)?,
        Suite::Subdivision => subdivision(&mut b, g, store)?,
        Suite::Wheel => wheel(&mut b, g, store)?,
        Suite::Growth => unreachable!(),
    }
    Ok(b.finish(suite, Some(g)))
}

fn random_perm(n: usize, rng: &mut impl Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

/// `normalize(Γ', ep∘σ) = sgn(σ) normalize(Γ, id)` for random relabelings
/// `Γ'` of `Γ` and random orderings `σ`.
fn signs(b: &mut Builder, g: u32, store: &Store) -> Result<(), Failure> {
    let mut rng = ChaCha8Rng::seed_from_u64(SEED);
    let (mut trials, mut zero, mut failures) = (0usize, 0usize, Vec::new());
    let graphs = store.graphs(g, SetKind::Gc)?;
    for gr in graphs.values() {
        let identity: Vec<usize> = (0..gr.edge_count()).collect();
        let base = normalize(gr, &identity)?;
        if base.is_none() {
            zero += 1;
        }
        for _ in 0..SIGN_TRIALS {
            let vp = random_perm(gr.vertex_count(), &mut rng);
            let ep = random_perm(gr.edge_count(), &mut rng);
            let flip: Vec<bool> = (0..gr.edge_count()).map(|_| rng.gen()).collect();
            let sigma = random_perm(gr.edge_count(), &mut rng);
            let moved = gr.relabeled(&vp, &ep, &flip);
            let ordering: Vec<usize> = sigma.iter().map(|&e| ep[e]).collect();
            let got = normalize(&moved, &ordering)?;
            let want = base.clone().map(|(s, x)| (s * permutation_sign(&sigma), x));
            trials += 1;
            if got != want && failures.len() < 5 {
                failures.push(json!({"edges": moved.edges().collect::<Vec<_>>(), "ordering": ordering}));
            }
        }
    }
    b.check(
        "normalize is sign-equivariant",
        failures.is_empty(),
        json!({"graphs": graphs.len(), "zero_graphs": zero, "trials": trials, "failures": failures}),
    );
    Ok(())
}

fn fixtures() -> Vec<(String, SymmetricDeltaComplex)> {
    let mut out = vec![("half-interval".to_string(), half_interval())];
    out.extend((0..=3).map(|p| (format!("representable({p})"), representable(p))));
    out
}

fn relations(b: &mut Builder, g: u32, store: &Store) -> Result<(), Failure> {
    let dg = delta(g, store)?;
    b.outcome(format!("Δ_{g} face and transposition relations"), dg.complex.verify_relations());
    b.outcome(
        format!("Δ_{g} cellular boundary squares to zero"),
        dg.complex.cellular_chain_complex().check_boundary_squared(),
    );
    for (name, x) in fixtures() {
        b.outcome(format!("{name} relations"), x.verify_relations());
    }
    Ok(())
}

fn duality(b: &mut Builder, g: u32, store: &Store) -> Result<(), Failure> {
    let gc = graph_complex(g, store)?;
    let degrees = gc.complex.degrees();
    for k in *degrees.start()..*degrees.end() {
        let r = duality_report(&gc, k);
        b.check(format!("degrees {k},{}", k + 1), r.weighted_transpose, json!(r));
    }
    for k in *degrees.start()..degrees.end() - 1 {
        let composite = gc.coboundary_matrix(k + 1).mul(&gc.coboundary_matrix(k))?;
        b.check(format!("δδ = 0 from degree {k}"), composite.is_zero(), json!({"nnz": composite.nnz()}));
    }
    Ok(())
}

fn homology_json(h: &BTreeMap<i32, usize>) -> Value {
    json!(h.iter().map(|(k, d)| (k.to_string(), *d)).collect::<BTreeMap<_, _>>())
}

fn acyclic(b: &mut Builder, g: u32, store: &Store) -> Result<(), Failure> {
    let s = split(g, store)?;
    let h = s.b.homology_dims()?;
    b.check(
        format!("B^({g}) is acyclic over ℚ"),
        h.values().all(|&d| d == 0),
        json!({"homology": homology_json(&h), "dim": s.b.total_dim()}),
    );
    Ok(())
}

fn shift(b: &mut Builder, g: u32, store: &Store) -> Result<(), Failure> {
    let gc = graph_complex(g, store)?;
    let s = split(g, store)?;
    let report = shift_check(&gc, &s)?;
    b.check("A equals the shifted graph complex", report.passed(), json!(report));
    let offset = 2 * g as i32 - 1;
    let hg = gc.complex.homology_dims()?;
    let hc = s.c.homology_dims()?;
    let mismatched: Vec<i32> = s
        .c
        .degrees()
        .filter(|&p| hc[&p] != hg.get(&(p - offset)).copied().unwrap_or(0))
        .collect();
    let outside = hg.keys().any(|&k| !s.c.degrees().contains(&(k + offset)));
    b.check(
        format!("H̃_(k+{offset})(Δ_{g}) = H_k(G^({g}))"),
        mismatched.is_empty() && !outside,
        json!({"graph_complex": homology_json(&hg), "delta": homology_json(&hc), "mismatched": mismatched}),
    );
    Ok(())
}

fn compare_homology(b: &mut Builder, name: String, cellular: &GradedChainComplex<String>, sd: BTreeMap<i32, usize>) -> Result<(), Failure> {
    let hc = cellular.homology_dims()?;
    let degrees: Vec<i32> = hc.keys().chain(sd.keys()).copied().collect();
    let agree = degrees
        .iter()
        .all(|k| hc.get(k).copied().unwrap_or(0) == sd.get(k).copied().unwrap_or(0));
    b.check(name, agree, json!({"cellular": homology_json(&hc), "subdivision": homology_json(&sd)}));
    Ok(())
}

fn subdivision(b: &mut Builder, g: u32, store: &Store) -> Result<(), Failure> {
    if g > SUBDIVISION_MAX_GENUS {
        return Err(Failure::Usage(format!(
            "the subdivision suite runs for genus <= {SUBDIVISION_MAX_GENUS}"
        )));
    }
    let mut cases = vec![(format!("Δ_{g}"), delta(g, store)?.complex)];
    cases.extend(fixtures());
    for (name, x) in cases {
        let sd = barycentric_subdivision(&x);
        let counts: Vec<usize> = (0..=sd.complex.dim().max(-1) as usize)
            .map(|q| sd.complex.simplex_count(q))
            .collect();
        let h = ordinary_simplicial_homology(&sd.complex)?;
        compare_homology(b, format!("{name}: cellular = subdivision ({counts:?} simplices)"), &x.cellular_chain_complex(), h)?;
    }
    Ok(())
}

fn wheel(b: &mut Builder, g: u32, store: &Store) -> Result<(), Failure> {
    let w = wheel_chain(g)?;
    if w.is_zero() {
        b.check(
            format!("W_{g} normalizes to zero"),
            g % 2 == 0,
            json!("an automorphism of the wheel reverses the edge orientation"),
        );
        return Ok(());
    }
    b.check(format!("W_{g} is nonzero"), g % 2 == 1, Value::Null);
    let d = boundary_of(&w);
    b.check(format!("∂W_{g} = 0"), d.is_zero(), json!({"terms": d.len()}));
    if g > WHEEL_RANK_MAX_GENUS {
        b.skipped.push(format!(
            "W_{g} not a boundary: the graph complex is only built for genus <= {WHEEL_RANK_MAX_GENUS}"
        ));
        return Ok(());
    }
    let gc = graph_complex(g, store)?;
    let coords = gc.coordinates(&w)?;
    let image = gc.complex.boundary_matrix(1);
    let hit = in_column_space(&image, &coords)?;
    b.check(
        format!("W_{g} is not a boundary"),
        !hit,
        json!({"dim_degree_0": gc.complex.dim(0), "dim_degree_1": gc.complex.dim(1)}),
    );
    Ok(())
}

pub const ORACLE_RANGE: usize = 30;

fn growth(n: usize) -> Result<Report, Failure> {
    let mut b = Builder::new();
    let lie = lie_dimensions(n);
    b.check(
        format!("A_n integral and nonnegative for n <= {n}"),
        lie.as_ref().is_ok_and(|l| l.iter().all(|x| !x.is_negative())),
        json!(lie.as_ref().err().map(ToString::to_string)),
    );
    let m = n.min(ORACLE_RANGE);
    let by_division = p_coefficients_by_division(m);
    let a = p_coefficients(m);
    b.check(
        format!("a_n recurrence = series division for n <= {m}"),
        (0..=m).all(|k| by_division[k] == BigRational::from_integer(a[k].clone())),
        Value::Null,
    );
    if let Ok(lie) = &lie {
        let by_log = lie_dimensions_by_log(m);
        b.check(
            format!("A_n Möbius = log expansion for n <= {m}"),
            (1..=m).all(|k| by_log[k] == BigRational::from_integer(lie[k].clone())),
            Value::Null,
        );
    }
    let report = growth_report(n, 1e-6)?;
    b.check(
        "α ≈ 0.75488",
        (report.alpha - 0.75488).abs() < 1e-4,
        json!(report.alpha),
    );
    b.check("β_0 ≈ 1.3247", (report.beta0 - 1.3247).abs() < 1e-4, json!(report.beta0));
    b.check(
        "residue at α equals -α",
        (report.residue + report.alpha).abs() < 1e-8,
        json!({"residue": report.residue, "error": (report.residue + report.alpha).abs()}),
    );
    if n >= 200 {
        let worst = report.rows[199..]
            .iter()
            .map(|r| (r.product - 1.0).abs())
            .fold(0.0, f64::max);
        b.check(
            format!("|a_n α^n - 1| < 1e-6 for 200 <= n <= {n}"),
            worst < 1e-6,
            json!({"max_error": worst, "settled_from": report.settled_from}),
        );
    } else {
        b.skipped.push("asymptotic check needs --max >= 200".to_string());
    }
    Ok(b.finish(Suite::Growth, None))
}
