#![allow(dead_code)]

pub mod portions;

use std::collections::BTreeSet;

use rand::seq::SliceRandom;
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;
use shadowcalc::encoding_graph::{validate, DecoratedGraph, VertexKind};
use shadowcalc::moves::{apply, sites, MoveKind};
use shadowcalc::fp_group::Word;
use shadowcalc::grid::{family_shadow, parameter_tuples, GridBounds, FAMILIES};
use shadowcalc::homology::{abelianization, abelianize, AbelianGroup};
use shadowcalc::knot_shadow::{classify, shadow_kn, Classification, KnotShadow};
use shadowcalc::van_kampen::pi1_tree;
use shadowcalc::HalfInt;

/// Family trees at small parameters plus the `K_n` shadows.
pub fn family_corpus() -> Vec<KnotShadow> {
    let mut out = Vec::new();
    for f in &FAMILIES {
        for p in parameter_tuples(f, GridBounds { max: 1, max_g: 2 }) {
            if p.k2 + p.k3 <= 1 {
                out.push(family_shadow(f, &p));
            }
        }
    }
    for n in [-4, -3, -2, -1, 1, 2, 3, 4] {
        out.push(shadow_kn(n).expect("n != 0"));
    }
    out
}

const GADGETS: &[&str] = &[
    "y111-two-leaves",
    "y12-leaf0",
    "y12-leaf1",
    "y111-y12-pair",
    "y111-split",
    "p-leaf",
    "p-p",
];

fn half(rng: &mut impl Rng) -> HalfInt {
    HalfInt::from_units(rng.gen_range(-4..=4))
}

/// Replaces some D leaves (not next to B) by small subtrees that create
/// sites for every move rule.
pub fn with_branches(ks: &KnotShadow, rng: &mut impl Rng) -> KnotShadow {
    let mut g = ks.xprime.clone();
    let leaves: Vec<String> = g
        .vertices_of_kind(VertexKind::D)
        .into_iter()
        .filter(|d| {
            g.incident(d)
                .first()
                .is_some_and(|(_, _, w, _)| g.kind(w) != Some(VertexKind::B))
        })
        .collect();
    for d in leaves {
        if rng.gen_bool(0.3) {
            continue;
        }
        let gadget = *GADGETS.choose(rng).expect("non-empty");
        graft(&mut g, &d, gadget, rng);
    }
    debug_assert!(validate(&g, false).is_ok());
    KnotShadow { xprime: g, g: ks.g, vertex_on_k: false }
}

fn graft(g: &mut DecoratedGraph, d: &str, gadget: &str, rng: &mut impl Rng) {
    use VertexKind::*;
    let (_, eid, _, _) = g.incident(d).remove(0);
    g.vertices.remove(d);
    let root = g.fresh_id("g");
    let leaf = |g: &mut DecoratedGraph, at: (&str, usize), dec: HalfInt| {
        let v = g.fresh_id("gd");
        g.add_vertex(&v, D);
        let e = g.fresh_id("ge");
        g.add_edge(e, at, (&v, 0), dec, false);
    };
    let hang = |g: &mut DecoratedGraph, kind: VertexKind, at: (&str, usize), slot: usize| {
        let v = g.fresh_id("gv");
        g.add_vertex(&v, kind);
        let e = g.fresh_id("ge");
        g.add_edge(e, at, (&v, slot), HalfInt::ZERO, false);
        v
    };
    let entry = match gadget {
        "y111-two-leaves" => {
            g.add_vertex(&root, Y111);
            leaf(g, (&root, 1), half(rng));
            leaf(g, (&root, 2), half(rng));
            0
        }
        "y12-leaf0" => {
            g.add_vertex(&root, Y12);
            leaf(g, (&root, 0), half(rng));
            1
        }
        "y12-leaf1" => {
            g.add_vertex(&root, Y12);
            let r = *[HalfInt::HALF, -HalfInt::HALF, HalfInt::from_units(3), HalfInt::ZERO]
                .choose(rng)
                .expect("non-empty");
            leaf(g, (&root, 1), r);
            0
        }
        "y111-y12-pair" => {
            g.add_vertex(&root, Y111);
            let signs = if rng.gen_bool(0.5) { [1, -1] } else { [-1, 1] };
            for (s, u) in [1, 2].into_iter().zip(signs) {
                let w = hang(g, Y12, (&root, s), 0);
                leaf(g, (&w, 1), HalfInt::from_units(u));
            }
            0
        }
        "y111-split" => {
            g.add_vertex(&root, Y111);
            let r = if rng.gen_bool(0.5) { HalfInt::ZERO } else { HalfInt::from_int(rng.gen_range(-2..=2)) };
            leaf(g, (&root, 1), r);
            let p = hang(g, P, (&root, 2), 0);
            leaf(g, (&p, 1), HalfInt::ZERO);
            leaf(g, (&p, 2), HalfInt::ZERO);
            0
        }
        "p-leaf" => {
            g.add_vertex(&root, P);
            leaf(g, (&root, 1), half(rng));
            let y = hang(g, Y12, (&root, 2), 1);
            leaf(g, (&y, 0), HalfInt::ZERO);
            0
        }
        _ => {
            g.add_vertex(&root, P);
            let q = hang(g, P, (&root, 1), 2);
            leaf(g, (&root, 2), half(rng));
            leaf(g, (&q, 0), HalfInt::ZERO);
            let y = hang(g, Y12, (&q, 1), 1);
            leaf(g, (&y, 0), HalfInt::ZERO);
            0
        }
    };
    let e = g.edges.get_mut(&eid).expect("edge");
    if e.a.vertex == d {
        e.a.vertex = root;
        e.a.slot = entry;
    } else {
        e.b.vertex = root;
        e.b.slot = entry;
    }
}

/// The invariants a move must keep: `H_1`, the order of the boundary class
/// together with `H_1` modulo it, and the classifier's verdict.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Fingerprint {
    pub h1: AbelianGroup,
    pub boundary_order: Option<String>,
    pub h1_mod_boundary: AbelianGroup,
    pub classification: Classification,
}

pub fn fingerprint(ks: &KnotShadow) -> Fingerprint {
    let r = pi1_tree(&ks.xprime).expect("valid tree");
    let b = ks.xprime.b_vertices()[0].clone();
    let gamma = Word::gen(r.boundary_classes[&b]);
    let ab = abelianize(&r.presentation);
    Fingerprint {
        h1: ab.group.clone(),
        boundary_order: ab.order_of(&gamma).map(|o| o.to_string()),
        h1_mod_boundary: abelianization(&r.presentation.with_rel(gamma)),
        classification: classify(ks).expect("classifiable"),
    }
}

/// Total gleam over the edges of the tree.
pub fn gleam_total(g: &DecoratedGraph) -> HalfInt {
    g.edges.values().map(|e| e.decoration).sum()
}

/// All trees on at most `max` vertices from `{D, P, Y12, Y111}` hanging off
/// one B vertex, up to isomorphism.
pub fn complexity_zero_trees(max: usize) -> Vec<DecoratedGraph> {
    let mut out = Vec::new();
    let mut seen = BTreeSet::new();
    let mut g = DecoratedGraph::new();
    g.add_vertex("b", VertexKind::B);
    grow(&mut g, vec![("b".to_string(), 0)], max, &mut seen, &mut out);
    out
}

fn grow(
    g: &mut DecoratedGraph,
    open: Vec<(String, usize)>,
    budget: usize,
    seen: &mut BTreeSet<String>,
    out: &mut Vec<DecoratedGraph>,
) {
    use VertexKind::*;
    let Some((v, s)) = open.first().cloned() else {
        if seen.insert(g.iso_signature()) {
            out.push(g.clone());
        }
        return;
    };
    if budget < open.len() {
        return;
    }
    let rest = open[1..].to_vec();
    for (kind, slot) in [(D, 0), (P, 0), (Y12, 0), (Y12, 1), (Y111, 0)] {
        let id = format!("v{}", g.vertices.len());
        let eid = format!("e{}", g.edges.len());
        g.add_vertex(&id, kind);
        g.add_edge(&eid, (&v, s), (&id, slot), HalfInt::ZERO, false);
        let mut next = rest.clone();
        next.extend((0..kind.valency()).filter(|&t| t != slot).map(|t| (id.clone(), t)));
        grow(g, next, budget - 1, seen, out);
        g.edges.remove(&eid);
        g.vertices.remove(&id);
    }
}

pub const RUNS: usize = 200;
const WALK: usize = 4;

fn b_edge(ks: &KnotShadow) -> String {
    let b = &ks.xprime.b_vertices()[0];
    let (_, e, _, _) = &ks.xprime.incident(b)[0];
    format!("{e}:{:?}", ks.xprime.edges[e])
}

/// Short random walks applying one rule over the family corpus; returns
/// (applications, violations).
pub fn exercise(rule: &str, kind: MoveKind, seed: u64) -> (usize, Vec<String>) {
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let corpus = family_corpus();
    let mut done = 0;
    let mut bad = Vec::new();
    let mut cur: Option<KnotShadow> = None;
    let mut steps = 0;
    let mut attempts = 0;
    while done < RUNS && attempts < 50 * RUNS {
        attempts += 1;
        let ks = match cur.take() {
            Some(ks) if steps < WALK => ks,
            _ => {
                steps = 0;
                with_branches(corpus.choose(&mut rng).expect("corpus"), &mut rng)
            }
        };
        let here: Vec<_> = sites(&ks.xprime, kind).into_iter().filter(|s| s.rule == rule).collect();
        let Some(site) = here.choose(&mut rng) else { continue };
        let before = fingerprint(&ks);
        let moved = match apply(&ks.xprime, kind, site, Some("b")) {
            Ok(g) => g,
            Err(e) => {
                bad.push(format!("{site}: {e}"));
                continue;
            }
        };
        done += 1;
        if !validate(&moved, false).is_ok() {
            bad.push(format!("{site}: invalid output"));
            continue;
        }
        let next = KnotShadow { xprime: moved, ..ks.clone() };
        if fingerprint(&next) != before {
            bad.push(format!("{site}: {before:?} -> {:?}", fingerprint(&next)));
        }
        if b_edge(&ks) != b_edge(&next) {
            bad.push(format!("{site}: the edge at B changed"));
        }
        steps += 1;
        cur = Some(next);
    }
    (done, bad)
}
