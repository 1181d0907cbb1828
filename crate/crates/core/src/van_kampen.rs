//! Fundamental-group presentations of polyhedra encoded by decorated trees.

use std::collections::BTreeMap;

use crate::encoding_graph::{validate, DecoratedGraph, VId, VertexKind, LOCAL_NAMES};
use crate::error::{Error, Result};
use crate::fp_group::{GenOrigin, GenSym, Presentation, Word};

#[derive(Clone, Debug)]
pub struct Pi1Result {
    pub presentation: Presentation,
    /// Generator index of the boundary class of each B vertex.
    pub boundary_classes: BTreeMap<VId, usize>,
    /// Index of the first local generator of each vertex that has any.
    pub local_base: BTreeMap<VId, usize>,
    kinds: BTreeMap<VId, VertexKind>,
}

impl Pi1Result {
    /// Boundary word of `slot` of vertex `v` in the global generators.
    pub fn slot_word(&self, v: &str, slot: usize) -> Word {
        let kind = self.kinds[v];
        match kind {
            VertexKind::D => Word::empty(),
            VertexKind::B => Word::gen(self.boundary_classes[v]),
            _ => {
                let base = self.local_base[v];
                let syl: Vec<(usize, i64)> =
                    kind.spec().slots[slot].word.iter().map(|&(g, e)| (base + g, e)).collect();
                Word::from_syllables(&syl)
            }
        }
    }

    /// The word an edge glues: the boundary of its `a` side.
    pub fn edge_word(&self, g: &DecoratedGraph, edge: &str) -> Word {
        let e = &g.edges[edge];
        self.slot_word(&e.a.vertex, e.a.slot)
    }
}

/// Name of the boundary generator of the `i`-th B vertex (0-based).
pub fn gamma_name(i: usize) -> String {
    if i == 0 {
        "gamma".to_string()
    } else {
        format!("gamma{}", i + 1)
    }
}

/// Van Kampen presentation of the polyhedron encoded by the tree `g`.
pub fn pi1_tree(g: &DecoratedGraph) -> Result<Pi1Result> {
    let rep = validate(g, false);
    if let Some(f) = rep.findings.first() {
        return Err(Error::input(format!("invalid encoding graph: {}", f.message)));
    }
    let mut p = Presentation::new();
    let mut boundary_classes = BTreeMap::new();
    let mut local_base = BTreeMap::new();
    for (i, b) in g.b_vertices().into_iter().enumerate() {
        let idx = p.add_gen(gamma_name(i), GenOrigin::Boundary);
        boundary_classes.insert(b, idx);
    }
    for (v, &k) in &g.vertices {
        let spec = k.spec();
        if spec.local_generator_count == 0 {
            continue;
        }
        let base = p.num_gens();
        for name in LOCAL_NAMES.iter().take(spec.local_generator_count) {
            p.add_gen(format!("{name}_{v}"), GenOrigin::Local);
        }
        local_base.insert(v.clone(), base);
        for r in &spec.relators {
            let syl: Vec<(usize, i64)> = r.iter().map(|&(g, e)| (base + g, e)).collect();
            p.add_rel(Word::from_syllables(&syl));
        }
    }
    let res = Pi1Result {
        presentation: p,
        boundary_classes,
        local_base,
        kinds: g.vertices.clone(),
    };
    let mut p = res.presentation.clone();
    for e in g.edges.values() {
        let wa = res.slot_word(&e.a.vertex, e.a.slot);
        let wb = res.slot_word(&e.b.vertex, e.b.slot);
        let rel = if e.invert { wa.concat(&wb) } else { wa.concat(&wb.inverse()) };
        p.add_rel(rel);
    }
    Ok(Pi1Result { presentation: p, ..res })
}

/// The boundary generator of B vertex `b`.
pub fn boundary_class(r: &Pi1Result, b: &str) -> Result<GenSym> {
    match r.boundary_classes.get(b) {
        Some(&i) => Ok(r.presentation.gens[i].clone()),
        None => Err(Error::input(format!("`{b}` is not a B vertex"))),
    }
}
