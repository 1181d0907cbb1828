//! Knot groups of shadows, gleam sums, and the complexity-one classifier.

use std::collections::BTreeMap;

use serde::Serialize;

use crate::encoding_graph::{geodesic, one_sided_y12_count, validate, DecoratedGraph, VId, VertexKind};
use crate::error::{Error, Result};
use crate::fp_group::{tietze_simplify, GenOrigin, Presentation, Word, DEFAULT_BUDGET};
use crate::half::HalfInt;
use crate::homology::{abelianization, is_z_generated_by};
use crate::van_kampen::pi1_tree;

/// A 2-chain: region id to integer coefficient.
pub type Chain2 = BTreeMap<String, i64>;

fn gleam_at(gleams: &BTreeMap<String, HalfInt>, r: &str) -> Result<HalfInt> {
    gleams.get(r).copied().ok_or_else(|| Error::input(format!("region `{r}` has no gleam")))
}

/// `sum a_j gl(R_j)`.
pub fn gleam_of_loop(c: &Chain2, gleams: &BTreeMap<String, HalfInt>) -> Result<HalfInt> {
    let mut s = HalfInt::ZERO;
    for (r, &a) in c {
        if a != 0 {
            s += gleam_at(gleams, r)? * a;
        }
    }
    Ok(s)
}

/// `Q(sum a_i R_i, sum b_i R_i) = sum a_i b_i gl(R_i)`.
pub fn intersection_pairing(
    a: &Chain2,
    b: &Chain2,
    gleams: &BTreeMap<String, HalfInt>,
) -> Result<HalfInt> {
    let mut s = HalfInt::ZERO;
    for (r, &x) in a {
        let y = b.get(r).copied().unwrap_or(0);
        if x != 0 && y != 0 {
            s += gleam_at(gleams, r)? * (x * y);
        }
    }
    Ok(s)
}

/// A normalized shadow of a 2-knot with at most one true vertex: the tree of
/// `X'`, the gleam `g` of the disk region of `K`, and whether the true vertex
/// lies on `K`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct KnotShadow {
    pub xprime: DecoratedGraph,
    pub g: u64,
    pub vertex_on_k: bool,
}

impl KnotShadow {
    pub fn new(xprime: DecoratedGraph, g: u64) -> Self {
        KnotShadow { xprime, g, vertex_on_k: false }
    }

    fn boundary(&self) -> Result<VId> {
        let bs = self.xprime.b_vertices();
        match bs.as_slice() {
            [b] => Ok(b.clone()),
            _ => Err(Error::input(format!(
                "expected exactly one B vertex in X', found {}",
                bs.len()
            ))),
        }
    }
}

/// Knot group of a shadow given as several trees with marked boundary
/// vertices, each boundary carrying the gleam of its loop.
pub fn knot_group_from_parts(parts: &[(DecoratedGraph, BTreeMap<VId, i64>)]) -> Result<Presentation> {
    let mut p = Presentation::new();
    let mut tail = Vec::new();
    for (i, (g, gl)) in parts.iter().enumerate() {
        let r = pi1_tree(g)?;
        let base = p.num_gens();
        for s in &r.presentation.gens {
            p.add_gen(format!("{}#{i}", s.name), s.origin);
        }
        for w in &r.presentation.rels {
            p.add_rel(w.map_gens(|x| x + base));
        }
        for (b, &idx) in &r.boundary_classes {
            let gl = gl
                .get(b)
                .copied()
                .ok_or_else(|| Error::input(format!("no gleam given for boundary `{b}`")))?;
            tail.push((base + idx, gl));
        }
    }
    let mu = p.add_gen("mu", GenOrigin::Meridian);
    p.meridian = Some(mu);
    for (gamma, gl) in tail {
        p.add_rel(Word::gen(gamma).concat(&Word::power(mu, -gl)));
    }
    let (q, _) = tietze_simplify(&p, DEFAULT_BUDGET);
    Ok(strip_part_suffix(q))
}

fn strip_part_suffix(mut p: Presentation) -> Presentation {
    let names: Vec<String> = p.gens.iter().map(|g| g.name.clone()).collect();
    for g in p.gens.iter_mut() {
        if let Some((base, _)) = g.name.split_once('#') {
            let clash = names.iter().filter(|n| n.split('#').next() == Some(base)).count() > 1;
            if !clash {
                g.name = base.to_string();
            }
        }
    }
    p
}

/// The unsimplified knot-group presentation `pi1(X') * <mu> / <<gamma mu^-g>>`.
pub fn knot_group_raw(ks: &KnotShadow) -> Result<Presentation> {
    let b = ks.boundary()?;
    let r = pi1_tree(&ks.xprime)?;
    let mut p = r.presentation.clone();
    let mu = p.add_gen("mu", GenOrigin::Meridian);
    p.meridian = Some(mu);
    let gamma = r.boundary_classes[&b];
    p.add_rel(Word::gen(gamma).concat(&Word::power(mu, -(ks.g as i64))));
    Ok(p)
}

/// Knot group with meridian `mu`, Tietze-simplified with the default budget.
pub fn knot_group(ks: &KnotShadow) -> Result<Presentation> {
    let p = knot_group_raw(ks)?;
    Ok(tietze_simplify(&p, DEFAULT_BUDGET).0)
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
#[serde(tag = "classification")]
pub enum Classification {
    Unknot,
    Kn { n: i64 },
    InfiniteCyclicGroup,
    NotRealizable { reason: String },
}

impl std::fmt::Display for Classification {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        match self {
            Classification::Unknot => write!(f, "unknot"),
            Classification::Kn { n } => write!(f, "K_{n}"),
            Classification::InfiniteCyclicGroup => write!(f, "knot group infinite cyclic"),
            Classification::NotRealizable { reason } => write!(f, "not realizable: {reason}"),
        }
    }
}

/// Decision procedure for normalized shadows with at most one true vertex.
pub fn classify(ks: &KnotShadow) -> Result<Classification> {
    let rep = validate(&ks.xprime, false);
    if let Some(f) = rep.findings.first() {
        return Err(Error::input(format!("invalid X': {}", f.message)));
    }
    let b = ks.boundary()?;
    let xs = ks.xprime.x_vertices();
    if xs.len() > 1 {
        return Err(Error::input(format!("{} true-vertex portions; at most one allowed", xs.len())));
    }
    if ks.vertex_on_k {
        return Ok(Classification::InfiniteCyclicGroup);
    }
    let r = pi1_tree(&ks.xprime)?;
    let gamma = Word::gen(r.boundary_classes[&b]);
    if !abelianization(&r.presentation.with_rel(gamma.clone())).is_trivial() {
        return Ok(Classification::NotRealizable { reason: "capping the boundary leaves non-trivial H1".into() });
    }
    let Some(xv) = xs.first() else { return Ok(Classification::Unknot) };
    if ks.g == 0 {
        return Ok(Classification::Unknot);
    }
    let kind = ks.xprime.vertices[xv];
    if !matches!(kind, VertexKind::X3 | VertexKind::X4 | VertexKind::X8 | VertexKind::X9) {
        return Ok(Classification::NotRealizable {
            reason: format!("no shadow of a 2-knot has a {kind} portion here"),
        });
    }
    if !is_z_generated_by(&r.presentation, &gamma) {
        return Ok(Classification::NotRealizable { reason: "H1 obstruction".into() });
    }
    if matches!(kind, VertexKind::X3 | VertexKind::X4) {
        let path = geodesic(&ks.xprime, &b, xv)?;
        let last = &ks.xprime.edges[path.edges.last().expect("b != xv")];
        let slot = last.oriented(xv).map(|(e, _)| e.slot);
        if slot == Some(0) {
            let m = one_sided_y12_count(&ks.xprime, &b, xv) as u32;
            let mag = (1i64 << m) * ks.g as i64;
            let n = if kind == VertexKind::X3 { mag } else { -mag };
            return Ok(Classification::Kn { n });
        }
    }
    Ok(Classification::InfiniteCyclicGroup)
}

/// The shadow of `K_n` used throughout: a boundary vertex, `m = v2(|n|)`
/// one-sided Y12 vertices, then an X3 (X4 for negative `n`) entered through
/// its length-1 slot and capped by a disk. The boundary gleam is `|n| / 2^m`.
pub fn shadow_kn(n: i64) -> Result<KnotShadow> {
    if n == 0 {
        return Err(Error::input("K_0 is trivial; n must be non-zero"));
    }
    let a = n.unsigned_abs();
    let m = a.trailing_zeros() as usize;
    let g = a >> m;
    let mut gr = DecoratedGraph::new();
    gr.add_vertex("b", VertexKind::B);
    let mut prev = ("b".to_string(), 0usize);
    for i in 0..m {
        let y = format!("y{i}");
        gr.add_vertex(&y, VertexKind::Y12);
        gr.add_edge(format!("e{i}"), (&prev.0, prev.1), (&y, 0), HalfInt::ZERO, i == 0);
        prev = (y, 1);
    }
    let kind = if n > 0 { VertexKind::X3 } else { VertexKind::X4 };
    gr.add_vertex("x", kind);
    gr.add_edge(format!("e{m}"), (&prev.0, prev.1), ("x", 0), HalfInt::ZERO, m == 0);
    gr.add_vertex("d", VertexKind::D);
    gr.add_edge("ed", ("x", 1), ("d", 0), HalfInt::ZERO, false);
    Ok(KnotShadow::new(gr, g))
}

/// `<x, mu | x^2 mu^|n| x^-1 mu^-n>`, the expected knot group of `K_n`.
pub fn expected_kn_group(n: i64) -> Presentation {
    let mut p = Presentation::new();
    let x = p.add_gen("x", GenOrigin::Fresh);
    let mu = p.add_gen("mu", GenOrigin::Meridian);
    p.meridian = Some(mu);
    p.add_rel(Word::from_syllables(&[(x, 2), (mu, n.abs()), (x, -1), (mu, -n)]));
    p
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::encoding_graph::parse_egf;
    use crate::fp_group::canonical_form;

    fn chain(pairs: &[(&str, i64)]) -> Chain2 {
        pairs.iter().map(|&(r, a)| (r.to_string(), a)).collect()
    }

    fn gl(pairs: &[(&str, i64)]) -> BTreeMap<String, HalfInt> {
        pairs.iter().map(|&(r, u)| (r.to_string(), HalfInt::from_units(u))).collect()
    }

    #[test]
    fn gleam_sums() {
        let g = gl(&[("R", 6), ("S", 6)]);
        assert_eq!(gleam_of_loop(&chain(&[("R", 1)]), &g).unwrap(), HalfInt::from_int(3));
        assert_eq!(gleam_of_loop(&Chain2::new(), &g).unwrap(), HalfInt::ZERO);
        assert_eq!(gleam_of_loop(&chain(&[("R", 1), ("S", -1)]), &g).unwrap(), HalfInt::ZERO);
        assert!(gleam_of_loop(&chain(&[("T", 1)]), &g).is_err());
    }

    #[test]
    fn pairing() {
        let g = gl(&[("R", 5), ("S", 2), ("T", 0)]);
        assert_eq!(
            intersection_pairing(&chain(&[("R", 1)]), &chain(&[("R", 1)]), &g).unwrap(),
            HalfInt::from_units(5)
        );
        assert_eq!(
            intersection_pairing(&chain(&[("R", 1)]), &chain(&[("S", 1)]), &g).unwrap(),
            HalfInt::ZERO
        );
        let (p2, k3) = (3, 2);
        let c1 = chain(&[("R", -p2), ("S", 1)]);
        let c3 = chain(&[("R", -(1 << k3)), ("T", 4)]);
        assert_eq!(
            intersection_pairing(&c1, &c3, &g).unwrap(),
            HalfInt::from_units(5) * (p2 * (1 << k3))
        );
    }

    #[test]
    fn disk_gives_meridian_only() {
        let g = parse_egf("vertex a B\nvertex b D\nedge e a:0 b:0 gleam=0").unwrap();
        let p = knot_group(&KnotShadow::new(g.clone(), 0)).unwrap();
        assert!(p.is_meridian_only(), "{p}");
        // a disk boundary is null-homotopic, so a non-zero gleam kills the meridian's powers
        let p = knot_group(&KnotShadow::new(g, 3)).unwrap();
        assert_eq!(p.to_string(), "gens: mu ; rels: mu^-3");
    }

    #[test]
    fn classify_examples() {
        let g = parse_egf("vertex a B\nvertex b D\nedge e a:0 b:0 gleam=0").unwrap();
        assert_eq!(classify(&KnotShadow::new(g, 0)).unwrap(), Classification::Unknot);
        assert_eq!(classify(&shadow_kn(3).unwrap()).unwrap(), Classification::Kn { n: 3 });
        assert_eq!(classify(&shadow_kn(-2).unwrap()).unwrap(), Classification::Kn { n: -2 });
        let mut on = shadow_kn(1).unwrap();
        on.vertex_on_k = true;
        assert_eq!(classify(&on).unwrap(), Classification::InfiniteCyclicGroup);
    }

    #[test]
    fn non_simply_connected_tree_is_not_realizable() {
        let g = parse_egf(
            "vertex b B\nvertex v1 Y12\nvertex v2 Y111\nvertex v3 Y12\nvertex v4 Y12\nvertex v5 D\nvertex v6 D\n\
             edge e0 b:0 v1:1 gleam=0\nedge e1 v1:0 v2:0 gleam=0\nedge e2 v2:1 v3:0 gleam=0\n\
             edge e3 v2:2 v4:0 gleam=0\nedge e4 v3:1 v5:0 gleam=0\nedge e5 v4:1 v6:0 gleam=0",
        )
        .unwrap();
        assert!(validate(&g, true).is_ok());
        let c = classify(&KnotShadow::new(g, 0)).unwrap();
        assert!(matches!(c, Classification::NotRealizable { .. }), "{c:?}");
    }

    #[test]
    fn kn_groups() {
        for n in [1, -1, 2, -2, 3, -3, 4, 12] {
            let p = knot_group(&shadow_kn(n).unwrap()).unwrap();
            assert_eq!(canonical_form(&p), canonical_form(&expected_kn_group(n)), "n={n}: {p}");
        }
    }

    #[test]
    fn parts_form_matches_normalized() {
        let ks = shadow_kn(2).unwrap();
        let b = ks.xprime.b_vertices()[0].clone();
        let parts = vec![(ks.xprime.clone(), BTreeMap::from([(b, ks.g as i64)]))];
        let p = knot_group_from_parts(&parts).unwrap();
        assert_eq!(canonical_form(&p), canonical_form(&knot_group(&ks).unwrap()));
    }
}
