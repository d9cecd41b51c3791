//! Randomized invariants: canonical labels under relabeling and the sign
//! rule of `normalize` under reordering.

use std::sync::OnceLock;

use proptest::prelude::*;
use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use tropgc::canonical::{canonical_form, permutation_sign};
use tropgc::graphcomplex::normalize;
use tropgc::graphs::{enumerate_trivalent, gc_graphs, saturate_contractions, StableGraph};

fn shuffled(n: usize, rng: &mut ChaCha8Rng) -> Vec<usize> {
    let mut p: Vec<usize> = (0..n).collect();
    p.shuffle(rng);
    p
}

struct Relabeling {
    vertices: Vec<usize>,
    edges: Vec<usize>,
    flips: Vec<bool>,
}

impl Relabeling {
    fn random(g: &StableGraph, rng: &mut ChaCha8Rng) -> Self {
        Relabeling {
            vertices: shuffled(g.vertex_count(), rng),
            edges: shuffled(g.edge_count(), rng),
            flips: (0..g.edge_count()).map(|_| rng.gen()).collect(),
        }
    }

    fn apply(&self, g: &StableGraph) -> StableGraph {
        g.relabeled(&self.vertices, &self.edges, &self.flips)
    }
}

fn stable_graphs(g: u32) -> &'static [StableGraph] {
    static CACHE: [OnceLock<Vec<StableGraph>>; 5] = [const { OnceLock::new() }; 5];
    CACHE[g as usize].get_or_init(|| {
        saturate_contractions(&enumerate_trivalent(g).unwrap())
            .into_values()
            .collect()
    })
}

fn gc_list(g: u32) -> &'static [StableGraph] {
    static CACHE: [OnceLock<Vec<StableGraph>>; 6] = [const { OnceLock::new() }; 6];
    CACHE[g as usize].get_or_init(|| gc_graphs(g).unwrap().into_values().collect())
}

#[test]
fn canonical_key_survives_100_relabelings_per_graph() {
    let mut rng = ChaCha8Rng::seed_from_u64(11);
    for g in 2..=4 {
        for gr in stable_graphs(g) {
            let form = canonical_form(gr);
            for _ in 0..100 {
                let moved = Relabeling::random(gr, &mut rng).apply(gr);
                let other = canonical_form(&moved);
                assert_eq!(other.key, form.key, "genus {g}: {gr:?} vs {moved:?}");
                assert_eq!(other.graph, form.graph);
            }
        }
    }
}

/// `normalize(Γ', ep∘σ) = sgn(σ) normalize(Γ, id)`.
fn check_sign_rule(gr: &StableGraph, rng: &mut ChaCha8Rng, trials: usize) {
    let identity: Vec<usize> = (0..gr.edge_count()).collect();
    let base = normalize(gr, &identity).unwrap();
    for _ in 0..trials {
        let r = Relabeling::random(gr, rng);
        let sigma = shuffled(gr.edge_count(), rng);
        let ordering: Vec<usize> = sigma.iter().map(|&e| r.edges[e]).collect();
        let got = normalize(&r.apply(gr), &ordering).unwrap();
        let want = base.clone().map(|(s, x)| (s * permutation_sign(&sigma), x));
        assert_eq!(got, want, "{gr:?} under {sigma:?}");
    }
}

#[test]
fn normalize_sign_rule_through_genus_four() {
    let mut rng = ChaCha8Rng::seed_from_u64(12);
    for g in 2..=4 {
        for gr in gc_list(g) {
            check_sign_rule(gr, &mut rng, 50);
        }
    }
}

#[test]
fn generators_keep_genus_and_degree() {
    for g in 2..=4 {
        for gr in gc_list(g) {
            if let Some((_, x)) = normalize(gr, &(0..gr.edge_count()).collect::<Vec<_>>()).unwrap() {
                assert_eq!(x.degree, gr.vertex_count() as i32 - (g as i32 + 1));
                assert_eq!(x.genus(), g);
                assert_eq!(x.graph(), canonical_form(gr).graph);
            }
        }
    }
}

#[test]
fn parallel_edges_always_normalize_to_zero() {
    for g in 2..=4 {
        for gr in gc_list(g).iter().filter(|gr| gr.has_parallel_edges()) {
            assert_eq!(normalize(gr, &(0..gr.edge_count()).collect::<Vec<_>>()).unwrap(), None);
        }
    }
}

proptest! {
    #![proptest_config(ProptestConfig::with_cases(64))]

    #[test]
    fn normalize_sign_rule_genus_five(index in 0usize..10_000, seed in any::<u64>()) {
        let graphs = gc_list(5);
        let gr = &graphs[index % graphs.len()];
        check_sign_rule(gr, &mut ChaCha8Rng::seed_from_u64(seed), 4);
    }

    #[test]
    fn contraction_preserves_genus_and_stability(index in 0usize..10_000, edge in 0usize..100) {
        let graphs = stable_graphs(4);
        let gr = &graphs[index % graphs.len()];
        prop_assume!(gr.edge_count() > 0);
        let c = gr.contract(tropgc::graphs::EdgeId::from_index(edge % gr.edge_count())).unwrap();
        prop_assert_eq!(c.genus(), 4);
        prop_assert!(c.is_stable());
        prop_assert!(c.is_connected());
    }
}
