use std::collections::BTreeSet;

use shadowcalc::encoding_graph::{d_closure, DecoratedGraph, VertexKind};
use shadowcalc::HalfInt;

use VertexKind::*;

/// Group of the closed-up portion; `None` for the trivial group.
pub fn closed_group(k: VertexKind) -> Option<&'static str> {
    match k {
        Y2 => Some("gens: x ; rels: x^2"),
        Y3 | X5 => Some("gens: x ; rels: x^3"),
        X6 => Some("gens: x ; rels: x^4"),
        X7 => Some("gens: x ; rels: x^5"),
        X1 => Some("gens: x,y ; rels: x*y*x^-2*y^-2"),
        X2 => Some("gens: x,y ; rels: x*y*x^2*y^-2"),
        _ => None,
    }
}

/// Boundary words of the unclosed portion, one per slot.
pub fn boundary_words(k: VertexKind) -> &'static [&'static str] {
    match k {
        D => &[""],
        P => &["x", "y", "z"],
        Y2 => &["x^2"],
        Y3 => &["x^3"],
        Y12 => &["x", "x^2"],
        Y111 => &["x", "x", "x"],
        X1 => &["x*y*x^-2*y^-2"],
        X2 => &["x*y*x^2*y^-2"],
        X3 => &["y", "x*y*x^-2*y^-1"],
        X4 => &["y", "x*y*x^-2*y"],
        X5 => &["y", "x*y*x^2*y^-1"],
        X6 => &["x*y", "x^2*y^-2"],
        X7 => &["x*y^2", "x^2*y^-1"],
        X8 => &["x*y*x^-1*y^-1", "x", "y"],
        X9 => &["x*y*x*y^-1", "x", "y"],
        X10 => &["y", "x*y", "x^2*y^-1"],
        X11 => &["x", "y", "x*y", "x*y^-1"],
        _ => &[],
    }
}

pub fn portions() -> Vec<VertexKind> {
    VertexKind::ALL.into_iter().filter(|&k| k != B && !boundary_words(k).is_empty()).collect()
}

/// The portion `v` with a P hung on each slot, so closing `{v}` has edges
/// to cut.
pub fn padded(k: VertexKind) -> DecoratedGraph {
    let mut g = DecoratedGraph::new();
    g.add_vertex("v", k);
    for s in 0..k.valency() {
        let (p, e) = (format!("p{s}"), format!("e{s}"));
        g.add_vertex(&p, P);
        g.add_edge(&e, ("v", s), (&p, 0), HalfInt::ZERO, false);
        for t in 1..3 {
            let d = format!("d{s}{t}");
            g.add_vertex(&d, D);
            g.add_edge(format!("f{s}{t}"), (&p, t), (&d, 0), HalfInt::ZERO, false);
        }
    }
    g
}

pub fn closure(k: VertexKind) -> DecoratedGraph {
    d_closure(&padded(k), &BTreeSet::from(["v".to_string()])).unwrap()
}
