//! Decorated encoding graphs: portion catalogue, validation, `.egf` text
//! format, D-closure and tree utilities.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;
use std::str::FromStr;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::half::HalfInt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum VertexKind {
    B,
    D,
    P,
    Y2,
    Y3,
    Y12,
    Y111,
    X1,
    X2,
    X3,
    X4,
    X5,
    X6,
    X7,
    X8,
    X9,
    X10,
    X11,
}

use VertexKind::*;

impl VertexKind {
    pub const ALL: [VertexKind; 18] =
        [B, D, P, Y2, Y3, Y12, Y111, X1, X2, X3, X4, X5, X6, X7, X8, X9, X10, X11];

    pub fn name(self) -> &'static str {
        match self {
            B => "B",
            D => "D",
            P => "P",
            Y2 => "Y2",
            Y3 => "Y3",
            Y12 => "Y12",
            Y111 => "Y111",
            X1 => "X1",
            X2 => "X2",
            X3 => "X3",
            X4 => "X4",
            X5 => "X5",
            X6 => "X6",
            X7 => "X7",
            X8 => "X8",
            X9 => "X9",
            X10 => "X10",
            X11 => "X11",
        }
    }

    pub fn valency(self) -> usize {
        self.spec().slots.len()
    }

    /// Kinds containing a true vertex.
    pub fn is_x(self) -> bool {
        matches!(self, X1 | X2 | X3 | X4 | X5 | X6 | X7 | X8 | X9 | X10 | X11)
    }

    /// Kinds excluded from graphs of simply connected polyhedra.
    pub fn is_forbidden(self) -> bool {
        matches!(self, Y2 | Y3 | X1 | X2 | X5 | X6 | X7)
    }

    pub fn spec(self) -> PortionSpec {
        portion_spec(self)
    }
}

impl fmt::Display for VertexKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for VertexKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        VertexKind::ALL
            .into_iter()
            .find(|k| k.name() == s)
            .ok_or_else(|| Error::input(format!("unknown kind `{s}`")))
    }
}

/// A boundary slot: the boundary word in local generators (as syllables of
/// `(local generator, exponent)`) and its length.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct SlotSpec {
    pub word: Vec<(usize, i64)>,
    pub length: usize,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct PortionSpec {
    pub kind: VertexKind,
    pub local_generator_count: usize,
    pub slots: Vec<SlotSpec>,
    /// Internal relators in local generators.
    pub relators: Vec<Vec<(usize, i64)>>,
}

pub const LOCAL_NAMES: [&str; 3] = ["x", "y", "z"];

const X: usize = 0;
const Y: usize = 1;
const Z: usize = 2;

fn slot(word: &[(usize, i64)]) -> SlotSpec {
    let length = word.iter().map(|&(_, e)| e.unsigned_abs() as usize).sum();
    SlotSpec { word: word.to_vec(), length }
}

fn portion_spec(kind: VertexKind) -> PortionSpec {
    let (n, slots, relators): (usize, Vec<SlotSpec>, Vec<Vec<(usize, i64)>>) = match kind {
        B => (0, vec![SlotSpec { word: vec![], length: 1 }], vec![]),
        D => (0, vec![slot(&[])], vec![]),
        P => (3, vec![slot(&[(X, 1)]), slot(&[(Y, 1)]), slot(&[(Z, 1)])], vec![vec![
            (X, 1),
            (Y, 1),
            (Z, 1),
        ]]),
        Y2 => (1, vec![SlotSpec { word: vec![(X, 2)], length: 2 }], vec![]),
        Y3 => (1, vec![slot(&[(X, 3)])], vec![]),
        Y12 => (1, vec![slot(&[(X, 1)]), slot(&[(X, 2)])], vec![]),
        Y111 => (1, vec![slot(&[(X, 1)]); 3], vec![]),
        X1 => (2, vec![slot(&[(X, 1), (Y, 1), (X, -2), (Y, -2)])], vec![]),
        X2 => (2, vec![slot(&[(X, 1), (Y, 1), (X, 2), (Y, -2)])], vec![]),
        X3 => (2, vec![slot(&[(Y, 1)]), slot(&[(X, 1), (Y, 1), (X, -2), (Y, -1)])], vec![]),
        X4 => (2, vec![slot(&[(Y, 1)]), slot(&[(X, 1), (Y, 1), (X, -2), (Y, 1)])], vec![]),
        X5 => (2, vec![slot(&[(Y, 1)]), slot(&[(X, 1), (Y, 1), (X, 2), (Y, -1)])], vec![]),
        X6 => (2, vec![slot(&[(X, 1), (Y, 1)]), slot(&[(X, 2), (Y, -2)])], vec![]),
        X7 => (2, vec![slot(&[(X, 1), (Y, 2)]), slot(&[(X, 2), (Y, -1)])], vec![]),
        X8 => (
            2,
            vec![slot(&[(X, 1), (Y, 1), (X, -1), (Y, -1)]), slot(&[(X, 1)]), slot(&[(Y, 1)])],
            vec![],
        ),
        X9 => (
            2,
            vec![slot(&[(X, 1), (Y, 1), (X, 1), (Y, -1)]), slot(&[(X, 1)]), slot(&[(Y, 1)])],
            vec![],
        ),
        X10 => (
            2,
            vec![slot(&[(Y, 1)]), slot(&[(X, 1), (Y, 1)]), slot(&[(X, 2), (Y, -1)])],
            vec![],
        ),
        X11 => (
            2,
            vec![
                slot(&[(X, 1)]),
                slot(&[(Y, 1)]),
                slot(&[(X, 1), (Y, 1)]),
                slot(&[(X, 1), (Y, -1)]),
            ],
            vec![],
        ),
    };
    PortionSpec { kind, local_generator_count: n, slots, relators }
}

pub type VId = String;

#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub struct End {
    pub vertex: VId,
    pub slot: usize,
}

impl End {
    pub fn new(vertex: impl Into<String>, slot: usize) -> Self {
        End { vertex: vertex.into(), slot }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Edge {
    pub a: End,
    pub b: End,
    pub decoration: HalfInt,
    pub invert: bool,
}

impl Edge {
    /// The end at vertex `v`, and the opposite end.
    pub fn oriented(&self, v: &str) -> Option<(&End, &End)> {
        if self.a.vertex == v {
            Some((&self.a, &self.b))
        } else if self.b.vertex == v {
            Some((&self.b, &self.a))
        } else {
            None
        }
    }

    pub fn other(&self, v: &str) -> Option<&str> {
        self.oriented(v).map(|(_, o)| o.vertex.as_str())
    }
}

#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct DecoratedGraph {
    pub vertices: BTreeMap<VId, VertexKind>,
    pub edges: BTreeMap<String, Edge>,
}

/// Unique simple path between two vertices of a tree.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Path {
    pub vertices: Vec<VId>,
    pub edges: Vec<String>,
}

impl Path {
    pub fn len(&self) -> usize {
        self.edges.len()
    }

    pub fn is_empty(&self) -> bool {
        self.edges.is_empty()
    }
}

impl DecoratedGraph {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_vertex(&mut self, id: impl Into<String>, kind: VertexKind) {
        self.vertices.insert(id.into(), kind);
    }

    pub fn add_edge(
        &mut self,
        id: impl Into<String>,
        a: (&str, usize),
        b: (&str, usize),
        decoration: HalfInt,
        invert: bool,
    ) {
        self.edges.insert(
            id.into(),
            Edge { a: End::new(a.0, a.1), b: End::new(b.0, b.1), decoration, invert },
        );
    }

    pub fn kind(&self, v: &str) -> Option<VertexKind> {
        self.vertices.get(v).copied()
    }

    /// An id with the given prefix not yet used by any vertex or edge.
    pub fn fresh_id(&self, prefix: &str) -> String {
        (0..)
            .map(|i| format!("{prefix}{i}"))
            .find(|s| !self.vertices.contains_key(s) && !self.edges.contains_key(s))
            .expect("unbounded")
    }

    /// The edge occupying each `(vertex, slot)`.
    pub fn slot_map(&self) -> BTreeMap<(VId, usize), String> {
        let mut m = BTreeMap::new();
        for (id, e) in &self.edges {
            m.insert((e.a.vertex.clone(), e.a.slot), id.clone());
            m.insert((e.b.vertex.clone(), e.b.slot), id.clone());
        }
        m
    }

    /// The edge attached at `slot` of `v`.
    pub fn edge_at(&self, v: &str, slot: usize) -> Option<&str> {
        self.edges.iter().find_map(|(id, e)| {
            ((e.a.vertex == v && e.a.slot == slot) || (e.b.vertex == v && e.b.slot == slot))
                .then_some(id.as_str())
        })
    }

    /// Incident edges of `v` ordered by slot, as `(slot, edge id, neighbour, neighbour slot)`.
    pub fn incident(&self, v: &str) -> Vec<(usize, String, VId, usize)> {
        let mut out = Vec::new();
        for (id, e) in &self.edges {
            if e.a.vertex == v {
                out.push((e.a.slot, id.clone(), e.b.vertex.clone(), e.b.slot));
            }
            if e.b.vertex == v {
                out.push((e.b.slot, id.clone(), e.a.vertex.clone(), e.a.slot));
            }
        }
        out.sort();
        out
    }

    fn adjacency(&self) -> BTreeMap<&str, Vec<(&str, &str)>> {
        let mut adj: BTreeMap<&str, Vec<(&str, &str)>> =
            self.vertices.keys().map(|v| (v.as_str(), Vec::new())).collect();
        for (id, e) in &self.edges {
            if let Some(l) = adj.get_mut(e.a.vertex.as_str()) {
                l.push((e.b.vertex.as_str(), id.as_str()));
            }
            if let Some(l) = adj.get_mut(e.b.vertex.as_str()) {
                l.push((e.a.vertex.as_str(), id.as_str()));
            }
        }
        adj
    }

    /// Vertices reachable from `start` without using edge `cut`.
    pub fn reachable(&self, start: &str, cut: Option<&str>) -> BTreeSet<VId> {
        let adj = self.adjacency();
        let mut seen = BTreeSet::new();
        let mut q = VecDeque::from([start.to_string()]);
        while let Some(v) = q.pop_front() {
            if !seen.insert(v.clone()) {
                continue;
            }
            for &(w, e) in adj.get(v.as_str()).into_iter().flatten() {
                if Some(e) != cut && !seen.contains(w) {
                    q.push_back(w.to_string());
                }
            }
        }
        seen
    }

    pub fn is_connected(&self) -> bool {
        match self.vertices.keys().next() {
            None => true,
            Some(v) => self.reachable(v, None).len() == self.vertices.len(),
        }
    }

    pub fn is_tree(&self) -> bool {
        !self.vertices.is_empty()
            && self.edges.len() + 1 == self.vertices.len()
            && self.edges.values().all(|e| e.a.vertex != e.b.vertex)
            && self.is_connected()
    }

    pub fn vertices_of_kind(&self, k: VertexKind) -> Vec<VId> {
        self.vertices.iter().filter(|(_, &kk)| kk == k).map(|(v, _)| v.clone()).collect()
    }

    pub fn b_vertices(&self) -> Vec<VId> {
        self.vertices_of_kind(B)
    }

    pub fn x_vertices(&self) -> Vec<VId> {
        self.vertices.iter().filter(|(_, k)| k.is_x()).map(|(v, _)| v.clone()).collect()
    }

    /// Canonical string of the tree up to renaming of ids.
    pub fn iso_signature(&self) -> String {
        let mut best: Option<String> = None;
        for root in self.vertices.keys() {
            let s = self.rooted_sig(root, None);
            if best.as_ref().map_or(true, |b| s < *b) {
                best = Some(s);
            }
        }
        best.unwrap_or_default()
    }

    fn rooted_sig(&self, v: &str, parent_edge: Option<&str>) -> String {
        let mut children: Vec<String> = self
            .incident(v)
            .into_iter()
            .filter(|(_, e, _, _)| Some(e.as_str()) != parent_edge)
            .map(|(s, e, w, ws)| {
                let ed = &self.edges[&e];
                format!(
                    "{s}-{}{}-{ws}{}",
                    ed.decoration.units,
                    if ed.invert { "i" } else { "" },
                    self.rooted_sig(&w, Some(&e))
                )
            })
            .collect();
        children.sort();
        format!("{}[{}]", self.vertices[v], children.join(","))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Serialize)]
#[serde(rename_all = "lowercase")]
pub enum Severity {
    Error,
    Warning,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Finding {
    pub severity: Severity,
    pub code: String,
    pub message: String,
    pub site: Option<String>,
}

#[derive(Clone, Debug, Default, PartialEq, Eq, Serialize)]
pub struct ValidationReport {
    pub findings: Vec<Finding>,
}

impl ValidationReport {
    pub fn is_ok(&self) -> bool {
        self.findings.is_empty()
    }

    pub fn has_errors(&self) -> bool {
        self.findings.iter().any(|f| f.severity == Severity::Error)
    }

    fn error(&mut self, code: &str, message: String, site: Option<&str>) {
        self.findings.push(Finding {
            severity: Severity::Error,
            code: code.into(),
            message,
            site: site.map(str::to_string),
        });
    }
}

/// Checks well-formedness; in strict mode also the exclusions that hold for
/// every graph of a simply connected polyhedron.
pub fn validate(g: &DecoratedGraph, strict_simply_connected: bool) -> ValidationReport {
    let mut r = ValidationReport::default();
    if g.vertices.is_empty() {
        r.error("empty", "graph has no vertices".into(), None);
        return r;
    }
    let mut used: BTreeMap<(&str, usize), &str> = BTreeMap::new();
    let mut ends_ok = true;
    for (id, e) in &g.edges {
        for end in [&e.a, &e.b] {
            let Some(k) = g.kind(&end.vertex) else {
                r.error("unknown-vertex", format!("edge {id} uses unknown vertex {}", end.vertex), Some(id));
                ends_ok = false;
                continue;
            };
            if end.slot >= k.valency() {
                r.error(
                    "slot-range",
                    format!("slot {} out of range ({k} has {})", end.slot, k.valency()),
                    Some(id),
                );
                ends_ok = false;
                continue;
            }
            if let Some(prev) = used.insert((end.vertex.as_str(), end.slot), id) {
                r.error(
                    "slot-reused",
                    format!("slot {}:{} used by {prev} and {id}", end.vertex, end.slot),
                    Some(id),
                );
                ends_ok = false;
            }
        }
        if e.a.vertex == e.b.vertex {
            r.error("self-loop", format!("edge {id} is a loop"), Some(id));
        }
    }
    for (v, k) in &g.vertices {
        for s in 0..k.valency() {
            if !used.contains_key(&(v.as_str(), s)) {
                r.error("slot-unused", format!("slot {v}:{s} has no edge"), Some(v));
            }
        }
    }
    if ends_ok {
        if !g.is_connected() {
            r.error("disconnected", "graph is not connected".into(), None);
        } else if g.edges.len() + 1 != g.vertices.len() {
            r.error("not-a-tree", "not a tree".into(), None);
        }
    }
    if strict_simply_connected {
        for (v, k) in &g.vertices {
            if k.is_forbidden() {
                r.error("forbidden-kind", format!("forbidden-kind {k}"), Some(v));
            }
        }
        if ends_ok {
            for site in forbidden_patterns(g) {
                r.error("forbidden-pattern", format!("forbidden-pattern {}", site.0), Some(&site.1));
            }
        }
    }
    r
}

/// Occurrences of the two subgraph patterns whose D-closures have
/// fundamental group `Z/2`: two Y12 vertices glued along their length-1
/// slots, and a P vertex with two Y12 neighbours attached by their length-1
/// slots. Returns `(pattern label, site id)`.
pub fn forbidden_patterns(g: &DecoratedGraph) -> Vec<(&'static str, String)> {
    let mut out = Vec::new();
    for (id, e) in &g.edges {
        if g.kind(&e.a.vertex) == Some(Y12)
            && g.kind(&e.b.vertex) == Some(Y12)
            && e.a.slot == 0
            && e.b.slot == 0
        {
            out.push(("Y12-Y12", id.clone()));
        }
    }
    for v in g.vertices_of_kind(P) {
        let hits = g
            .incident(&v)
            .iter()
            .filter(|(_, _, w, ws)| g.kind(w) == Some(Y12) && *ws == 0)
            .count();
        if hits >= 2 {
            out.push(("Y12-P-Y12", v));
        }
    }
    out
}

fn valid_id(s: &str) -> bool {
    !s.is_empty() && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_' || c == '-' || c == '.')
}

/// Splits a line into tokens with their 1-based columns.
fn tokens(line: &str) -> Vec<(usize, &str)> {
    let mut out = Vec::new();
    let mut start = None;
    for (i, c) in line.char_indices() {
        if c.is_whitespace() {
            if let Some(s) = start.take() {
                out.push((s + 1, &line[s..i]));
            }
        } else if start.is_none() {
            start = Some(i);
        }
    }
    if let Some(s) = start {
        out.push((s + 1, &line[s..]));
    }
    out
}

/// Parses `.egf` text.
pub fn parse_egf(text: &str) -> Result<DecoratedGraph> {
    let mut g = DecoratedGraph::new();
    let mut edge_lines = Vec::new();
    for (ln, raw) in text.lines().enumerate() {
        let ln = ln + 1;
        let line = raw.split('#').next().unwrap_or("");
        let toks = tokens(line);
        let Some(&(c0, head)) = toks.first() else { continue };
        match head {
            "vertex" => {
                if toks.len() != 3 {
                    return Err(Error::syntax(ln, c0, "expected `vertex <id> <KIND>`"));
                }
                let (ci, id) = toks[1];
                if !valid_id(id) {
                    return Err(Error::syntax(ln, ci, format!("bad id `{id}`")));
                }
                let (ck, k) = toks[2];
                let kind: VertexKind =
                    k.parse().map_err(|e: Error| Error::syntax(ln, ck, e.to_string()))?;
                if g.vertices.insert(id.to_string(), kind).is_some() {
                    return Err(Error::syntax(ln, ci, format!("duplicate vertex `{id}`")));
                }
            }
            "edge" => edge_lines.push((ln, toks)),
            other => return Err(Error::syntax(ln, c0, format!("unknown directive `{other}`"))),
        }
    }
    let mut used: BTreeMap<(String, usize), String> = BTreeMap::new();
    for (ln, toks) in edge_lines {
        if toks.len() < 5 || toks.len() > 6 {
            return Err(Error::syntax(
                ln,
                toks[0].0,
                "expected `edge <id> <v>:<slot> <v>:<slot> gleam=<p>[/2] [invert]`",
            ));
        }
        let (ci, id) = toks[1];
        if !valid_id(id) {
            return Err(Error::syntax(ln, ci, format!("bad id `{id}`")));
        }
        if g.edges.contains_key(id) {
            return Err(Error::syntax(ln, ci, format!("duplicate edge `{id}`")));
        }
        let mut ends = Vec::new();
        for &(c, t) in &toks[2..4] {
            let (v, s) = t
                .split_once(':')
                .ok_or_else(|| Error::syntax(ln, c, format!("expected <vertex>:<slot>, got `{t}`")))?;
            let slot: usize =
                s.parse().map_err(|_| Error::syntax(ln, c, format!("bad slot `{s}`")))?;
            let kind = g
                .kind(v)
                .ok_or_else(|| Error::syntax(ln, c, format!("unknown vertex `{v}`")))?;
            if slot >= kind.valency() {
                return Err(Error::syntax(
                    ln,
                    c,
                    format!("slot {slot} out of range ({kind} has {})", kind.valency()),
                ));
            }
            if let Some(prev) = used.insert((v.to_string(), slot), id.to_string()) {
                return Err(Error::syntax(
                    ln,
                    c,
                    format!("slot {v}:{slot} already used by edge `{prev}`"),
                ));
            }
            ends.push(End::new(v, slot));
        }
        let (cg, gl) = toks[4];
        let val = gl
            .strip_prefix("gleam=")
            .ok_or_else(|| Error::syntax(ln, cg, "expected `gleam=<p>[/2]`"))?;
        let decoration: HalfInt =
            val.parse().map_err(|e: Error| Error::syntax(ln, cg + 6, e.to_string()))?;
        let invert = match toks.get(5) {
            None => false,
            Some(&(_, "invert")) => true,
            Some(&(c, t)) => return Err(Error::syntax(ln, c, format!("unexpected `{t}`"))),
        };
        let b = ends.pop().expect("two ends");
        let a = ends.pop().expect("two ends");
        g.edges.insert(id.to_string(), Edge { a, b, decoration, invert });
    }
    Ok(g)
}

/// Canonical `.egf` text: vertices then edges, each sorted by id.
pub fn serialize_egf(g: &DecoratedGraph) -> String {
    let mut s = String::new();
    for (id, k) in &g.vertices {
        s.push_str(&format!("vertex {id} {k}\n"));
    }
    for (id, e) in &g.edges {
        s.push_str(&format!(
            "edge {id} {}:{} {}:{} gleam={}{}\n",
            e.a.vertex,
            e.a.slot,
            e.b.vertex,
            e.b.slot,
            e.decoration,
            if e.invert { " invert" } else { "" }
        ));
    }
    s
}

/// Keeps the vertices of `keep` and caps every edge leaving `keep` with a
/// fresh D vertex.
pub fn d_closure(g: &DecoratedGraph, keep: &BTreeSet<VId>) -> Result<DecoratedGraph> {
    if keep.is_empty() {
        return Err(Error::input("empty vertex set"));
    }
    for v in keep {
        if !g.vertices.contains_key(v) {
            return Err(Error::input(format!("unknown vertex `{v}`")));
        }
    }
    if keep.len() == g.vertices.len() {
        return Err(Error::input("nothing to close: keep contains every vertex"));
    }
    let mut out = DecoratedGraph::new();
    for v in keep {
        out.vertices.insert(v.clone(), g.vertices[v]);
    }
    let mut caps = Vec::new();
    for (id, e) in &g.edges {
        let (ia, ib) = (keep.contains(&e.a.vertex), keep.contains(&e.b.vertex));
        if ia && ib {
            out.edges.insert(id.clone(), e.clone());
        } else if ia || ib {
            caps.push((id.clone(), e.clone(), ia));
        }
    }
    for (id, mut e, a_inside) in caps {
        let d = {
            let base = format!("{id}_d");
            let mut cand = base.clone();
            let mut i = 0;
            while out.vertices.contains_key(&cand) || g.vertices.contains_key(&cand) {
                i += 1;
                cand = format!("{base}{i}");
            }
            cand
        };
        out.vertices.insert(d.clone(), D);
        if a_inside {
            e.b = End::new(d, 0);
        } else {
            e.a = End::new(d, 0);
        }
        out.edges.insert(id, e);
    }
    if !out.is_connected() {
        return Err(Error::input("kept vertices do not induce a connected subgraph"));
    }
    Ok(out)
}

/// The unique path from `v` to `w` in a tree.
pub fn geodesic(g: &DecoratedGraph, v: &str, w: &str) -> Result<Path> {
    for x in [v, w] {
        if !g.vertices.contains_key(x) {
            return Err(Error::input(format!("unknown vertex `{x}`")));
        }
    }
    if v == w {
        return Err(Error::input("geodesic endpoints coincide"));
    }
    let adj = g.adjacency();
    let mut prev: BTreeMap<&str, (&str, &str)> = BTreeMap::new();
    let mut q = VecDeque::from([v]);
    let mut seen = BTreeSet::from([v]);
    while let Some(x) = q.pop_front() {
        if x == w {
            break;
        }
        for &(y, e) in &adj[x] {
            if seen.insert(y) {
                prev.insert(y, (x, e));
                q.push_back(y);
            }
        }
    }
    if !prev.contains_key(w) {
        return Err(Error::input(format!("`{v}` and `{w}` are not connected")));
    }
    let mut vertices = vec![w.to_string()];
    let mut edges = Vec::new();
    let mut cur = w;
    while cur != v {
        let (p, e) = prev[cur];
        edges.push(e.to_string());
        vertices.push(p.to_string());
        cur = p;
    }
    vertices.reverse();
    edges.reverse();
    Ok(Path { vertices, edges })
}

/// Number of Y12 vertices strictly between `from` and `to` that the path from
/// `from` enters through slot 0.
pub fn one_sided_y12_count(g: &DecoratedGraph, from: &str, to: &str) -> usize {
    let Ok(path) = geodesic(g, from, to) else { return 0 };
    (1..path.vertices.len().saturating_sub(1))
        .filter(|&i| {
            let v = &path.vertices[i];
            g.kind(v) == Some(Y12)
                && g.edges[&path.edges[i - 1]].oriented(v).map(|(end, _)| end.slot) == Some(0)
        })
        .count()
}

#[cfg(test)]
mod tests {
    use super::*;

    const CHAIN: &str = "vertex b B\nvertex d D\nvertex y Y12\nedge e1 b:0 y:0 gleam=0\nedge e2 y:1 d:0 gleam=1/2\n";

    #[test]
    fn slot_lengths_match_words() {
        for k in VertexKind::ALL {
            let s = k.spec();
            for sl in &s.slots {
                let wl: usize = sl.word.iter().map(|&(_, e)| e.unsigned_abs() as usize).sum();
                match k {
                    Y2 => assert_eq!(sl.length, 2),
                    B => assert_eq!(sl.length, 1),
                    _ => assert_eq!(sl.length, wl, "{k}"),
                }
            }
        }
    }

    #[test]
    fn valencies() {
        let v: Vec<usize> = VertexKind::ALL.iter().map(|k| k.valency()).collect();
        assert_eq!(v, vec![1, 1, 3, 1, 1, 2, 3, 1, 1, 2, 2, 2, 2, 2, 3, 3, 3, 4]);
    }

    #[test]
    fn smallest_legal_graph() {
        let g = parse_egf("vertex a B\nvertex b D\nedge e a:0 b:0 gleam=0").unwrap();
        assert!(validate(&g, true).is_ok());
    }

    #[test]
    fn strict_flags_y3() {
        let g = parse_egf("vertex a B\nvertex b Y3\nedge e a:0 b:0 gleam=0").unwrap();
        let r = validate(&g, true);
        assert!(r.findings.iter().any(|f| f.message == "forbidden-kind Y3"));
        assert!(validate(&g, false).is_ok());
    }

    #[test]
    fn cycle_rejected() {
        let g = parse_egf("vertex a Y12\nvertex b Y12\nedge e a:0 b:0 gleam=0\nedge f a:1 b:1 gleam=0")
            .unwrap();
        assert!(validate(&g, false).findings.iter().any(|f| f.message == "not a tree"));
    }

    #[test]
    fn parse_errors() {
        let e = parse_egf("vertex a B\nvertex b P\nedge e a:0 b:5 gleam=0").unwrap_err();
        assert!(e.to_string().contains("slot 5 out of range (P has 3)"), "{e}");
        let e = parse_egf("vertex a B\nvertex b D\nedge e a:0 b:0 gleam=1/3").unwrap_err();
        assert!(e.to_string().contains("decoration must be half-integral"), "{e}");
        let e = parse_egf("vertex a Q").unwrap_err();
        assert_eq!(e, Error::syntax(1, 10, "unknown kind `Q`"));
        let e = parse_egf("vertex a B\nvertex b D\nedge e a:0 b:0 gleam=0\nedge f a:0 b:0 gleam=0")
            .unwrap_err();
        assert!(e.to_string().contains("already used"));
    }

    #[test]
    fn round_trip() {
        let g = parse_egf(CHAIN).unwrap();
        assert_eq!(serialize_egf(&g), CHAIN);
        assert_eq!(parse_egf(&serialize_egf(&g)).unwrap(), g);
    }

    #[test]
    fn closure_of_p_and_x3() {
        let g = parse_egf(
            "vertex b B\nvertex p P\nvertex d D\nvertex x X3\nvertex e D\n\
             edge e1 b:0 p:0 gleam=0\nedge e2 p:1 d:0 gleam=0\nedge e3 p:2 x:0 gleam=0\nedge e4 x:1 e:0 gleam=0",
        )
        .unwrap();
        let c = d_closure(&g, &BTreeSet::from(["x".to_string()])).unwrap();
        assert_eq!(c.vertices.len(), 3);
        assert_eq!(c.vertices_of_kind(D).len(), 2);
        assert!(validate(&c, false).is_ok());
        let c = d_closure(&g, &BTreeSet::from(["p".to_string()])).unwrap();
        assert_eq!(c.vertices_of_kind(D).len(), 3);
        let most: BTreeSet<VId> = ["b", "p", "d", "x"].iter().map(|s| s.to_string()).collect();
        let c = d_closure(&g, &most).unwrap();
        assert_eq!(c.iso_signature(), g.iso_signature());
        let bad: BTreeSet<VId> = ["b", "x"].iter().map(|s| s.to_string()).collect();
        assert!(d_closure(&g, &bad).is_err());
    }

    #[test]
    fn geodesics_and_one_sided() {
        let g = parse_egf(CHAIN).unwrap();
        assert_eq!(geodesic(&g, "b", "y").unwrap().len(), 1);
        assert_eq!(geodesic(&g, "b", "d").unwrap().len(), 2);
        assert!(geodesic(&g, "b", "b").is_err());
        assert_eq!(one_sided_y12_count(&g, "b", "d"), 1);
        assert_eq!(one_sided_y12_count(&g, "d", "b"), 0);
        let g2 = parse_egf(
            "vertex b B\nvertex y Y12\nvertex z Y12\nvertex d D\n\
             edge e1 b:0 y:0 gleam=0\nedge e2 y:1 z:1 gleam=0\nedge e3 z:0 d:0 gleam=0",
        )
        .unwrap();
        assert_eq!(geodesic(&g2, "b", "d").unwrap().len(), 3);
    }

    #[test]
    fn forbidden_patterns_detected() {
        let g = parse_egf(
            "vertex b B\nvertex p P\nvertex y Y12\nvertex z Y12\nvertex d1 D\nvertex d2 D\n\
             edge e1 b:0 p:0 gleam=0\nedge e2 p:1 y:0 gleam=0\nedge e3 p:2 z:0 gleam=0\n\
             edge e4 y:1 d1:0 gleam=0\nedge e5 z:1 d2:0 gleam=0",
        )
        .unwrap();
        assert_eq!(forbidden_patterns(&g).len(), 1);
        assert!(validate(&g, true).has_errors());
    }
}
