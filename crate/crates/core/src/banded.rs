//! Banded unlink diagrams as combinatorial planar maps, and the shadow of a
//! 2-knot read off such a diagram.

use std::collections::{BTreeMap, BTreeSet, VecDeque};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};
use crate::half::HalfInt;

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum ArcLabel {
    /// Link component, 1-based.
    Component(usize),
    /// Band core, 1-based.
    Band(usize),
}

impl fmt::Display for ArcLabel {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ArcLabel::Component(i) => write!(f, "C{i}"),
            ArcLabel::Band(j) => write!(f, "B{j}"),
        }
    }
}

impl std::str::FromStr for ArcLabel {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let bad = || Error::input(format!("bad arc label `{s}` (want C<i> or B<j>)"));
        let (head, num) = s.split_at(1.min(s.len()));
        let i: usize = num.parse().map_err(|_| bad())?;
        if i == 0 {
            return Err(bad());
        }
        match head {
            "C" => Ok(ArcLabel::Component(i)),
            "B" => Ok(ArcLabel::Band(i)),
            _ => Err(bad()),
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub enum NodeKind {
    /// The two darts of the over strand.
    Crossing { over: [usize; 2] },
    BandEnd,
    /// A bivalent point on an arc, used to give closed curves a node.
    Helper,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Node {
    pub name: String,
    pub kind: NodeKind,
    /// Darts in counterclockwise order.
    pub rotation: Vec<usize>,
}

/// A planar map: nodes with rotations, darts paired into arcs, an arc label
/// per dart and a dart on the outer face.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct CombinatorialMap {
    pub nodes: Vec<Node>,
    pub dart_names: Vec<String>,
    pub dart_node: Vec<usize>,
    pub pair: Vec<usize>,
    pub labels: Vec<ArcLabel>,
    pub outer: usize,
}

/// Face decomposition: dart orbits of `d -> sigma(pair(d))`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Faces {
    pub orbits: Vec<Vec<usize>>,
    pub of_dart: Vec<usize>,
}

impl CombinatorialMap {
    pub fn num_darts(&self) -> usize {
        self.pair.len()
    }

    fn position(&self, d: usize) -> usize {
        let n = &self.nodes[self.dart_node[d]];
        n.rotation.iter().position(|&x| x == d).expect("dart in its rotation")
    }

    /// Next dart counterclockwise at the same node.
    pub fn sigma(&self, d: usize) -> usize {
        let r = &self.nodes[self.dart_node[d]].rotation;
        r[(self.position(d) + 1) % r.len()]
    }

    pub fn sigma_inv(&self, d: usize) -> usize {
        let r = &self.nodes[self.dart_node[d]].rotation;
        r[(self.position(d) + r.len() - 1) % r.len()]
    }

    /// The dart continuing a strand straight through a node, if any.
    pub fn straight(&self, d: usize) -> Option<usize> {
        let node = &self.nodes[self.dart_node[d]];
        match node.kind {
            NodeKind::Crossing { .. } => Some(node.rotation[(self.position(d) + 2) % 4]),
            NodeKind::Helper => node.rotation.iter().copied().find(|&x| x != d),
            NodeKind::BandEnd => None,
        }
    }

    fn check_structure(&self) -> Result<()> {
        let nd = self.num_darts();
        if self.dart_node.len() != nd || self.labels.len() != nd || self.dart_names.len() != nd {
            return Err(Error::input("dart tables have different lengths"));
        }
        for d in 0..nd {
            let p = self.pair[d];
            if p >= nd || p == d || self.pair[p] != d {
                return Err(Error::input(format!("dart {} is not paired", self.dart_names[d])));
            }
            if self.labels[p] != self.labels[d] {
                return Err(Error::input(format!("arc {} has two labels", self.dart_names[d])));
            }
        }
        let mut seen = vec![false; nd];
        for (i, n) in self.nodes.iter().enumerate() {
            let want = match n.kind {
                NodeKind::Crossing { .. } => 4,
                NodeKind::BandEnd => 3,
                NodeKind::Helper => 2,
            };
            if n.rotation.len() != want {
                return Err(Error::input(format!("node {} has {} darts, needs {want}", n.name, n.rotation.len())));
            }
            for &d in &n.rotation {
                if d >= nd || seen[d] || self.dart_node[d] != i {
                    return Err(Error::input(format!("node {} has a bad rotation", n.name)));
                }
                seen[d] = true;
            }
        }
        if let Some(d) = seen.iter().position(|s| !s) {
            return Err(Error::input(format!("dart {} is at no node", self.dart_names[d])));
        }
        if self.outer >= nd {
            return Err(Error::input("outer dart out of range"));
        }
        Ok(())
    }

    /// Faces by next-dart tracing, with the Euler check `V - E + F = 2`.
    pub fn faces(&self) -> Result<Faces> {
        self.check_structure()?;
        let nd = self.num_darts();
        let mut of_dart = vec![usize::MAX; nd];
        let mut orbits = Vec::new();
        for s in 0..nd {
            if of_dart[s] != usize::MAX {
                continue;
            }
            let mut orbit = Vec::new();
            let mut d = s;
            while of_dart[d] == usize::MAX {
                of_dart[d] = orbits.len();
                orbit.push(d);
                d = self.sigma(self.pair[d]);
            }
            orbits.push(orbit);
        }
        let (v, e, f) = (self.nodes.len() as i64, (nd / 2) as i64, orbits.len() as i64);
        if v - e + f != 2 {
            return Err(Error::input(format!(
                "Euler check failed: V - E + F = {v} - {e} + {f} = {} (map is not a connected planar map)",
                v - e + f
            )));
        }
        Ok(Faces { orbits, of_dart })
    }

    /// The face holding the corner from `d` counterclockwise to `sigma(d)`.
    pub fn corner_face(&self, faces: &Faces, d: usize) -> usize {
        faces.of_dart[self.pair[d]]
    }
}

/// Gleam contribution of the corner starting at an over dart and at an under
/// dart, turning counterclockwise.
pub const CORNER_GLEAM: [(bool, HalfInt); 2] =
    [(true, HalfInt { units: 1 }), (false, HalfInt { units: -1 })];

fn corner_gleam(from_over: bool) -> HalfInt {
    CORNER_GLEAM.iter().find(|(o, _)| *o == from_over).expect("both cases tabled").1
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct BandedUnlinkDiagram {
    pub map: CombinatorialMap,
    /// Number of link components.
    pub m: usize,
    /// Number of bands.
    pub n: usize,
    /// Twists of each band (1-based), relative to the diagram plane.
    pub twists: BTreeMap<usize, i64>,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, Serialize)]
#[serde(rename_all = "kebab-case")]
pub enum RegionRole {
    DiskFace,
    BandRectangle,
    Cap,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Region {
    pub id: String,
    pub role: RegionRole,
    pub gleam: HalfInt,
    pub in_k: bool,
}

#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct ShadowReport {
    pub true_vertices: usize,
    pub crossings: usize,
    pub band_ends: usize,
    pub regions: Vec<Region>,
    pub k_regions: Vec<String>,
    pub gleam_sum_over_k: HalfInt,
    pub resolved_components: usize,
}

/// A maximal run of arcs going straight through crossings and helpers.
#[derive(Clone, Debug)]
struct Strand {
    label: ArcLabel,
    /// Outgoing darts in traversal order; the first leaves the start node.
    darts: Vec<usize>,
    closed: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord)]
enum Piece {
    Link(usize),
    Left(usize),
    Right(usize),
}

struct Analysis {
    faces: Faces,
    strands: Vec<Strand>,
    /// Strand and direction of every dart along its strand's traversal.
    dart_strand: Vec<(usize, bool)>,
    inside: BTreeMap<usize, usize>,
    components: Vec<Vec<(Piece, i64)>>,
}

fn trace_strands(map: &CombinatorialMap) -> Result<(Vec<Strand>, Vec<(usize, bool)>)> {
    let nd = map.num_darts();
    let mut dart_strand = vec![(usize::MAX, false); nd];
    let mut strands = Vec::new();
    let walk = |start: usize, strands: &mut Vec<Strand>, dart_strand: &mut Vec<(usize, bool)>| {
        let id = strands.len();
        let mut darts = Vec::new();
        let mut d = start;
        let mut closed = false;
        loop {
            darts.push(d);
            dart_strand[d] = (id, true);
            dart_strand[map.pair[d]] = (id, false);
            match map.straight(map.pair[d]) {
                Some(next) if next == start => {
                    closed = true;
                    break;
                }
                Some(next) => d = next,
                None => break,
            }
        }
        strands.push(Strand { label: map.labels[start], darts, closed });
    };
    for node in &map.nodes {
        if node.kind == NodeKind::BandEnd {
            for &d in &node.rotation {
                if dart_strand[d].0 == usize::MAX {
                    walk(d, &mut strands, &mut dart_strand);
                }
            }
        }
    }
    for d in 0..nd {
        if dart_strand[d].0 == usize::MAX {
            walk(d, &mut strands, &mut dart_strand);
        }
    }
    for s in &strands {
        if s.darts.iter().any(|&d| map.labels[d] != s.label) {
            return Err(Error::input(format!("strand through {} changes label", map.dart_names[s.darts[0]])));
        }
    }
    Ok((strands, dart_strand))
}

fn analyse(d: &BandedUnlinkDiagram) -> Result<Analysis> {
    let map = &d.map;
    let faces = map.faces()?;
    for node in &map.nodes {
        match &node.kind {
            NodeKind::Crossing { over } => {
                let [a, b] = *over;
                if map.dart_node[a] != map.dart_node[b] || map.straight(a) != Some(b) {
                    return Err(Error::input(format!("crossing {}: over darts are not opposite", node.name)));
                }
                let r = &node.rotation;
                let (s, t) = (map.labels[r[0]], map.labels[r[1]]);
                if map.labels[r[2]] != s || map.labels[r[3]] != t {
                    return Err(Error::input(format!("crossing {}: strands change label", node.name)));
                }
                if matches!(s, ArcLabel::Component(_)) && matches!(t, ArcLabel::Component(_)) {
                    return Err(Error::input(format!(
                        "crossing {}: link components must be crossing-free",
                        node.name
                    )));
                }
            }
            NodeKind::BandEnd => {
                let mut comps = Vec::new();
                let mut bands = 0;
                for &x in &node.rotation {
                    match map.labels[x] {
                        ArcLabel::Component(i) => comps.push(i),
                        ArcLabel::Band(_) => bands += 1,
                    }
                }
                if bands != 1 || comps.len() != 2 || comps[0] != comps[1] {
                    return Err(Error::input(format!(
                        "band end {} must join one band core to one link component",
                        node.name
                    )));
                }
            }
            NodeKind::Helper => {
                if map.labels[node.rotation[0]] != map.labels[node.rotation[1]] {
                    return Err(Error::input(format!("helper {} joins two labels", node.name)));
                }
            }
        }
    }
    let labels: BTreeSet<ArcLabel> = map.labels.iter().copied().collect();
    let comps: Vec<usize> =
        labels.iter().filter_map(|l| if let ArcLabel::Component(i) = l { Some(*i) } else { None }).collect();
    let bands: Vec<usize> =
        labels.iter().filter_map(|l| if let ArcLabel::Band(j) = l { Some(*j) } else { None }).collect();
    if comps != (1..=d.m).collect::<Vec<_>>() {
        return Err(Error::input(format!("link components must be C1..C{}", d.m)));
    }
    if bands != (1..=d.n).collect::<Vec<_>>() {
        return Err(Error::input(format!("bands must be B1..B{}", d.n)));
    }
    if let Some(j) = d.twists.keys().find(|j| !bands.contains(j)) {
        return Err(Error::input(format!("twist given for unknown band B{j}")));
    }
    let (strands, dart_strand) = trace_strands(map)?;
    let mut core_count = BTreeMap::new();
    for s in &strands {
        if let ArcLabel::Band(j) = s.label {
            if s.closed {
                return Err(Error::input(format!("band core B{j} is a closed curve")));
            }
            *core_count.entry(j).or_insert(0) += 1;
        }
    }
    if let Some((j, _)) = core_count.iter().find(|(_, &c)| c != 1) {
        return Err(Error::input(format!("band core B{j} is not a single arc between band ends")));
    }

    // Faces inside the disk of each component: not reachable from the outer
    // face without crossing an arc of that component.
    let outer_face = faces.of_dart[map.outer];
    let mut inside = BTreeMap::new();
    for &c in &comps {
        let mut seen = BTreeSet::from([outer_face]);
        let mut q = VecDeque::from([outer_face]);
        while let Some(f) = q.pop_front() {
            for &x in &faces.orbits[f] {
                if map.labels[x] == ArcLabel::Component(c) {
                    continue;
                }
                let g = faces.of_dart[map.pair[x]];
                if seen.insert(g) {
                    q.push_back(g);
                }
            }
        }
        for f in 0..faces.orbits.len() {
            if !seen.contains(&f) {
                if let Some(prev) = inside.insert(f, c) {
                    return Err(Error::input(format!("disks of C{prev} and C{c} overlap")));
                }
            }
        }
    }
    if inside.contains_key(&outer_face) {
        return Err(Error::input("the outer face lies inside a component disk"));
    }

    let components = resolve(map, &strands, &dart_strand)?;
    if components.len() as i64 != 2 + d.n as i64 - d.m as i64 {
        return Err(Error::input(format!(
            "positive resolution has {} components; a 2-sphere needs 2 + n - m = {}",
            components.len(),
            2 + d.n as i64 - d.m as i64
        )));
    }
    let a = Analysis { faces, strands, dart_strand, inside, components };
    let (_, between) = crossing_sums(map, &a, &d.twists);
    if let Some(((i, j), x)) = between.into_iter().find(|&(_, x)| x != 0) {
        return Err(Error::input(format!(
            "positive resolution is not an unlink: components {} and {} have linking number {}",
            i + 1,
            j + 1,
            HalfInt::from_units(x)
        )));
    }
    Ok(a)
}

/// Components of the positive resolution as cyclic sequences of pieces with
/// the direction each is traversed in.
fn resolve(
    map: &CombinatorialMap,
    strands: &[Strand],
    dart_strand: &[(usize, bool)],
) -> Result<Vec<Vec<(Piece, i64)>>> {
    // Port: (piece, at_end). Links pair ports.
    let mut link: BTreeMap<(Piece, bool), (Piece, bool)> = BTreeMap::new();
    let l_port = |d: usize| -> (Piece, bool) {
        let (s, fwd) = dart_strand[d];
        (Piece::Link(s), !fwd)
    };
    let mut joins = Vec::new();
    for (s, st) in strands.iter().enumerate() {
        if let ArcLabel::Band(_) = st.label {
            let first = st.darts[0];
            let arrive = map.pair[*st.darts.last().expect("non-empty")];
            joins.push(((Piece::Left(s), false), l_port(map.sigma(first))));
            joins.push(((Piece::Right(s), false), l_port(map.sigma_inv(first))));
            joins.push(((Piece::Left(s), true), l_port(map.sigma_inv(arrive))));
            joins.push(((Piece::Right(s), true), l_port(map.sigma(arrive))));
        }
    }
    for (a, b) in joins {
        if link.insert(a, b).is_some() || link.insert(b, a).is_some() {
            return Err(Error::input("band ends share a link arc end"));
        }
    }
    let mut pieces: Vec<Piece> = Vec::new();
    for (s, st) in strands.iter().enumerate() {
        match st.label {
            ArcLabel::Component(_) => pieces.push(Piece::Link(s)),
            ArcLabel::Band(_) => {
                pieces.push(Piece::Left(s));
                pieces.push(Piece::Right(s));
            }
        }
    }
    let mut done: BTreeSet<Piece> = BTreeSet::new();
    let mut comps = Vec::new();
    for &p0 in &pieces {
        if done.contains(&p0) {
            continue;
        }
        let mut comp = Vec::new();
        if let Piece::Link(s) = p0 {
            if strands[s].closed {
                done.insert(p0);
                comps.push(vec![(p0, 1)]);
                continue;
            }
        }
        let (mut p, mut dir) = (p0, 1i64);
        loop {
            done.insert(p);
            comp.push((p, dir));
            let exit = (p, dir == 1);
            let &(q, at_end) =
                link.get(&exit).ok_or_else(|| Error::input("positive resolution has a loose end"))?;
            let ndir = if at_end { -1 } else { 1 };
            if q == p0 {
                if ndir != 1 {
                    return Err(Error::input("positive resolution is not a closed 1-manifold"));
                }
                break;
            }
            if done.contains(&q) {
                return Err(Error::input("positive resolution is not a closed 1-manifold"));
            }
            p = q;
            dir = ndir;
        }
        comps.push(comp);
    }
    Ok(comps)
}

/// Signed crossing counts of the positive resolution: writhe of each
/// component, and for each pair of components the sum over crossings between
/// them (twice their linking number). A band twisting `t` times adds `t`
/// crossings between its two edges.
fn crossing_sums(
    map: &CombinatorialMap,
    a: &Analysis,
    twists: &BTreeMap<usize, i64>,
) -> (Vec<i64>, BTreeMap<(usize, usize), i64>) {
    let mut where_: BTreeMap<Piece, (usize, i64)> = BTreeMap::new();
    for (c, comp) in a.components.iter().enumerate() {
        for &(p, dir) in comp {
            where_.insert(p, (c, dir));
        }
    }
    let pieces_of = |s: usize| -> Vec<Piece> {
        match a.strands[s].label {
            ArcLabel::Component(_) => vec![Piece::Link(s)],
            ArcLabel::Band(_) => vec![Piece::Left(s), Piece::Right(s)],
        }
    };
    let mut w = vec![0i64; a.components.len()];
    let mut between = BTreeMap::new();
    let mut add = |(cp, dp): (usize, i64), (cq, dq): (usize, i64), sign: i64| {
        if cp == cq {
            w[cp] += sign * dp * dq;
        } else {
            *between.entry((cp.min(cq), cp.max(cq))).or_insert(0) += sign * dp * dq;
        }
    };
    for node in &map.nodes {
        let NodeKind::Crossing { over } = node.kind else { continue };
        let out = |d: usize| -> usize {
            let (_, fwd) = a.dart_strand[d];
            if fwd {
                d
            } else {
                map.straight(d).expect("crossing dart")
            }
        };
        let o1 = out(over[0]);
        let under = node.rotation.iter().copied().find(|x| !over.contains(x)).expect("under dart");
        let o2 = out(under);
        let base = if map.sigma(o1) == o2 { 1 } else { -1 };
        let (s1, s2) = (a.dart_strand[o1].0, a.dart_strand[o2].0);
        for p in pieces_of(s1) {
            for q in pieces_of(s2) {
                add(where_[&p], where_[&q], base);
            }
        }
    }
    for (s, strand) in a.strands.iter().enumerate() {
        let ArcLabel::Band(j) = strand.label else { continue };
        let t = twists.get(&j).copied().unwrap_or(0);
        if t != 0 {
            add(where_[&Piece::Left(s)], where_[&Piece::Right(s)], -t);
        }
    }
    (w, between)
}

impl BandedUnlinkDiagram {
    /// Checks the diagram; see [`shadow_of`] for what is verified.
    pub fn validate(&self) -> Result<()> {
        analyse(self).map(|_| ())
    }

    pub fn crossings(&self) -> usize {
        self.map.nodes.iter().filter(|n| matches!(n.kind, NodeKind::Crossing { .. })).count()
    }

    pub fn band_ends(&self) -> usize {
        self.map.nodes.iter().filter(|n| n.kind == NodeKind::BandEnd).count()
    }
}

/// The shadow of the 2-knot presented by `d`: true vertices at crossings and
/// band ends, disk faces with crossing contributions, one rectangle per band
/// carrying its twist, and one cap per component of the positive resolution
/// with minus its writhe.
pub fn shadow_of(d: &BandedUnlinkDiagram) -> Result<ShadowReport> {
    let a = analyse(d)?;
    let map = &d.map;
    let outer_face = a.faces.of_dart[map.outer];
    let mut face_gleam = vec![HalfInt::ZERO; a.faces.orbits.len()];
    for node in &map.nodes {
        if let NodeKind::Crossing { over } = node.kind {
            for &x in &node.rotation {
                face_gleam[map.corner_face(&a.faces, x)] += corner_gleam(over.contains(&x));
            }
        }
    }
    let mut regions = Vec::new();
    for (f, &gl) in face_gleam.iter().enumerate() {
        if f == outer_face {
            continue;
        }
        regions.push(Region {
            id: format!("F{f}"),
            role: RegionRole::DiskFace,
            gleam: gl,
            in_k: a.inside.contains_key(&f),
        });
    }
    for j in 1..=d.n {
        regions.push(Region {
            id: format!("R{j}"),
            role: RegionRole::BandRectangle,
            gleam: HalfInt::from_int(d.twists.get(&j).copied().unwrap_or(0)),
            in_k: true,
        });
    }
    for (c, w) in crossing_sums(map, &a, &d.twists).0.into_iter().enumerate() {
        regions.push(Region { id: format!("P{}", c + 1), role: RegionRole::Cap, gleam: HalfInt::from_int(-w), in_k: true });
    }
    let k_regions: Vec<String> = regions.iter().filter(|r| r.in_k).map(|r| r.id.clone()).collect();
    let gleam_sum_over_k = regions.iter().filter(|r| r.in_k).map(|r| r.gleam).sum();
    let (crossings, band_ends) = (d.crossings(), d.band_ends());
    Ok(ShadowReport {
        true_vertices: crossings + band_ends,
        crossings,
        band_ends,
        regions,
        k_regions,
        gleam_sum_over_k,
        resolved_components: a.components.len(),
    })
}

/// Upper bound on the shadow-complexity: true vertices left after collapsing
/// from the boundary region of the diagram disk.
pub fn collapse_bound(d: &BandedUnlinkDiagram) -> Result<usize> {
    collapse_bound_ordered(d, |_| 0)
}

/// As [`collapse_bound`], with `pick(len)` choosing which queued edge to
/// delete next.
pub fn collapse_bound_ordered(d: &BandedUnlinkDiagram, mut pick: impl FnMut(usize) -> usize) -> Result<usize> {
    let a = analyse(d)?;
    let map = &d.map;
    let outer_face = a.faces.of_dart[map.outer];
    let mut free = BTreeSet::from([outer_face]);
    let mut queue: Vec<usize> = a.faces.orbits[outer_face].clone();
    let mut gone_arcs = BTreeSet::new();
    let mut eliminated = BTreeSet::new();
    while !queue.is_empty() {
        let i = pick(queue.len()) % queue.len();
        let x = queue.swap_remove(i);
        let arc = x.min(map.pair[x]);
        if !gone_arcs.insert(arc) {
            continue;
        }
        for e in [x, map.pair[x]] {
            let n = map.dart_node[e];
            if map.nodes[n].kind != NodeKind::Helper {
                eliminated.insert(n);
            }
        }
        // The face across the deleted edge gains a free side only if every
        // arc around it has gone.
        let other = a.faces.of_dart[map.pair[x]];
        if !free.contains(&other)
            && a.faces.orbits[other].iter().all(|&y| gone_arcs.contains(&y.min(map.pair[y])))
        {
            free.insert(other);
            queue.extend(a.faces.orbits[other].iter().copied());
        }
    }
    let total = d.crossings() + d.band_ends();
    Ok(total - eliminated.len())
}

/// Parses `.bud` text.
pub fn parse_bud(text: &str) -> Result<BandedUnlinkDiagram> {
    let mut darts: BTreeMap<String, usize> = BTreeMap::new();
    let mut dart_names = Vec::new();
    let intern = |name: &str, darts: &mut BTreeMap<String, usize>, dart_names: &mut Vec<String>| -> usize {
        *darts.entry(name.to_string()).or_insert_with(|| {
            dart_names.push(name.to_string());
            dart_names.len() - 1
        })
    };
    struct Pending {
        name: String,
        kind: String,
        over: Option<(String, String)>,
        rot: Option<Vec<String>>,
        line: usize,
    }
    let mut nodes: Vec<Pending> = Vec::new();
    let mut arcs: Vec<(usize, String, String, ArcLabel)> = Vec::new();
    let mut twists = BTreeMap::new();
    let mut outer = None;
    for (ln, raw) in text.lines().enumerate() {
        let ln = ln + 1;
        let line = raw.split('#').next().unwrap_or("").trim();
        if line.is_empty() {
            continue;
        }
        let col = raw.find(|c: char| !c.is_whitespace()).unwrap_or(0) + 1;
        let err = |m: String| Error::syntax(ln, col, m);
        let w: Vec<&str> = line.split_whitespace().collect();
        match w[0] {
            "node" => {
                let (name, kind) = match w[..] {
                    [_, n, k, ..] => (n, k),
                    _ => return Err(err("expected `node <id> crossing|bandend|helper`".into())),
                };
                let over = match (kind, w.get(3)) {
                    ("crossing", Some(o)) => {
                        let spec = o.strip_prefix("over=").ok_or_else(|| err("expected over=<dart>,<dart>".into()))?;
                        let (a, b) = spec.split_once(',').ok_or_else(|| err("expected two over darts".into()))?;
                        Some((a.to_string(), b.to_string()))
                    }
                    ("crossing", None) => return Err(err("crossing needs over=<dart>,<dart>".into())),
                    ("bandend" | "helper", None) => None,
                    _ => return Err(err(format!("unknown node kind `{kind}`"))),
                };
                if nodes.iter().any(|n| n.name == name) {
                    return Err(err(format!("duplicate node `{name}`")));
                }
                nodes.push(Pending { name: name.into(), kind: kind.into(), over, rot: None, line: ln });
            }
            "rot" => {
                let [_, n, list] = w[..] else { return Err(err("expected `rot <id> <dart,...>`".into())) };
                let node = nodes
                    .iter_mut()
                    .find(|p| p.name == n)
                    .ok_or_else(|| err(format!("rot for undeclared node `{n}`")))?;
                node.rot = Some(list.split(',').map(str::to_string).collect());
            }
            "arc" => {
                let [_, a, b, l] = w[..] else { return Err(err("expected `arc <dart> <dart> label=C<i>|B<j>`".into())) };
                let l = l.strip_prefix("label=").ok_or_else(|| err("expected label=".into()))?;
                let label = l.parse::<ArcLabel>().map_err(|e| err(e.to_string()))?;
                arcs.push((ln, a.into(), b.into(), label));
            }
            "twist" => {
                let [_, b, t] = w[..] else { return Err(err("expected `twist B<j> <int>`".into())) };
                let ArcLabel::Band(j) = b.parse::<ArcLabel>().map_err(|e| err(e.to_string()))? else {
                    return Err(err("twists apply to bands".into()));
                };
                let t: i64 = t.parse().map_err(|_| err(format!("bad twist `{t}`")))?;
                twists.insert(j, t);
            }
            "outer" => {
                let [_, d] = w[..] else { return Err(err("expected `outer <dart>`".into())) };
                outer = Some((ln, d.to_string()));
            }
            other => return Err(err(format!("unknown directive `{other}`"))),
        }
    }
    for (_, a, b, _) in &arcs {
        intern(a, &mut darts, &mut dart_names);
        intern(b, &mut darts, &mut dart_names);
    }
    let mut built = Vec::new();
    let mut dart_node_named: BTreeMap<usize, usize> = BTreeMap::new();
    for (i, p) in nodes.iter().enumerate() {
        let rot = p.rot.as_ref().ok_or_else(|| Error::syntax(p.line, 1, format!("node `{}` has no rot", p.name)))?;
        let rotation: Vec<usize> = rot
            .iter()
            .map(|d| darts.get(d).copied().ok_or_else(|| Error::syntax(p.line, 1, format!("dart `{d}` is in no arc"))))
            .collect::<Result<_>>()?;
        for &d in &rotation {
            if dart_node_named.insert(d, i).is_some() {
                return Err(Error::syntax(p.line, 1, format!("dart `{}` listed twice", dart_names[d])));
            }
        }
        let kind = match p.kind.as_str() {
            "crossing" => {
                let (a, b) = p.over.as_ref().expect("parsed");
                let (Some(&a), Some(&b)) = (darts.get(a), darts.get(b)) else {
                    return Err(Error::syntax(p.line, 1, "over darts must be in the rotation"));
                };
                NodeKind::Crossing { over: [a, b] }
            }
            "bandend" => NodeKind::BandEnd,
            _ => NodeKind::Helper,
        };
        built.push(Node { name: p.name.clone(), kind, rotation });
    }
    let nd = dart_names.len();
    let mut pair = vec![usize::MAX; nd];
    let mut labels = vec![ArcLabel::Component(1); nd];
    for (ln, a, b, label) in arcs {
        let (x, y) = (darts[&a], darts[&b]);
        if !dart_node_named.contains_key(&x) || !dart_node_named.contains_key(&y) {
            return Err(Error::syntax(ln, 1, format!("arc {a} {b} uses a dart at no node")));
        }
        if pair[x] != usize::MAX || pair[y] != usize::MAX || x == y {
            return Err(Error::syntax(ln, 1, format!("arc {a} {b} reuses a dart")));
        }
        pair[x] = y;
        pair[y] = x;
        labels[x] = label;
        labels[y] = label;
    }
    if let Some(d) = pair.iter().position(|&p| p == usize::MAX) {
        return Err(Error::input(format!("dart `{}` is in no arc", dart_names[d])));
    }
    let (oln, od) = outer.ok_or_else(|| Error::input("missing `outer <dart>`"))?;
    let outer = *darts.get(&od).ok_or_else(|| Error::syntax(oln, 1, format!("unknown dart `{od}`")))?;
    let dart_node = (0..nd).map(|d| dart_node_named[&d]).collect();
    let map = CombinatorialMap { nodes: built, dart_names, dart_node, pair, labels, outer };
    let m = map.labels.iter().filter_map(|l| if let ArcLabel::Component(i) = l { Some(*i) } else { None }).max().unwrap_or(0);
    let n = map.labels.iter().filter_map(|l| if let ArcLabel::Band(j) = l { Some(*j) } else { None }).max().unwrap_or(0);
    Ok(BandedUnlinkDiagram { map, m, n, twists })
}

/// Canonical `.bud` text.
pub fn serialize_bud(d: &BandedUnlinkDiagram) -> String {
    let map = &d.map;
    let name = |x: usize| map.dart_names[x].as_str();
    let mut s = String::new();
    for node in &map.nodes {
        match node.kind {
            NodeKind::Crossing { over } => {
                s.push_str(&format!("node {} crossing over={},{}\n", node.name, name(over[0]), name(over[1])))
            }
            NodeKind::BandEnd => s.push_str(&format!("node {} bandend\n", node.name)),
            NodeKind::Helper => s.push_str(&format!("node {} helper\n", node.name)),
        }
        let rot: Vec<&str> = node.rotation.iter().map(|&x| name(x)).collect();
        s.push_str(&format!("rot {} {}\n", node.name, rot.join(",")));
    }
    for x in 0..map.num_darts() {
        if x < map.pair[x] {
            s.push_str(&format!("arc {} {} label={}\n", name(x), name(map.pair[x]), map.labels[x]));
        }
    }
    for (j, t) in &d.twists {
        s.push_str(&format!("twist B{j} {t}\n"));
    }
    s.push_str(&format!("outer {}\n", name(map.outer)));
    s
}

/// A curve of the diagram drawn as a polyline.
#[derive(Clone, Debug)]
pub struct PolyCurve {
    pub label: ArcLabel,
    pub points: Vec<[f64; 2]>,
    pub closed: bool,
}

/// A crossing met while planarizing: curve `a` at its `ka`-th crossing and
/// curve `b` at its `kb`-th, counted along each curve.
#[derive(Clone, Copy, Debug)]
pub struct Meeting {
    pub a: usize,
    pub ka: usize,
    pub b: usize,
    pub kb: usize,
}

const EPS: f64 = 1e-9;

fn same(p: [f64; 2], q: [f64; 2]) -> bool {
    (p[0] - q[0]).abs() < EPS && (p[1] - q[1]).abs() < EPS
}

fn segments(c: &PolyCurve) -> usize {
    if c.closed {
        c.points.len()
    } else {
        c.points.len() - 1
    }
}

fn seg(c: &PolyCurve, i: usize) -> ([f64; 2], [f64; 2]) {
    (c.points[i], c.points[(i + 1) % c.points.len()])
}

fn at(c: &PolyCurve, t: f64) -> [f64; 2] {
    let i = (t.floor() as usize).min(segments(c) - 1);
    let (p, q) = seg(c, i);
    let f = t - i as f64;
    [p[0] + f * (q[0] - p[0]), p[1] + f * (q[1] - p[1])]
}

fn cross2(u: [f64; 2], v: [f64; 2]) -> f64 {
    u[0] * v[1] - u[1] * v[0]
}

fn sub(p: [f64; 2], q: [f64; 2]) -> [f64; 2] {
    [p[0] - q[0], p[1] - q[1]]
}

/// Builds a diagram from polylines in general position. Band cores end on
/// vertices of link polylines; `over` decides each crossing (true when curve
/// `a` passes over curve `b`).
pub fn from_polylines(curves: &[PolyCurve], over: impl Fn(Meeting) -> bool) -> Result<BandedUnlinkDiagram> {
    #[derive(Clone, Copy)]
    struct Event {
        t: f64,
        node: usize,
    }
    let mut events: Vec<Vec<Event>> = vec![Vec::new(); curves.len()];
    let mut kinds: Vec<NodeKind> = Vec::new();
    for (ci, c) in curves.iter().enumerate() {
        if c.points.len() < 2 || (c.closed && c.points.len() < 3) {
            return Err(Error::input(format!("curve {ci} is too short")));
        }
        if let ArcLabel::Band(_) = c.label {
            if c.closed {
                return Err(Error::input(format!("band core {ci} must be open")));
            }
            for (t, p) in [(0.0, c.points[0]), (segments(c) as f64, *c.points.last().expect("points"))] {
                let host = curves.iter().enumerate().find_map(|(li, l)| {
                    if !matches!(l.label, ArcLabel::Component(_)) {
                        return None;
                    }
                    l.points.iter().position(|&q| same(p, q)).map(|v| (li, v))
                });
                let (li, v) = host.ok_or_else(|| Error::input(format!("band core {ci} does not end on a link vertex")))?;
                let node = kinds.len();
                kinds.push(NodeKind::BandEnd);
                events[ci].push(Event { t, node });
                events[li].push(Event { t: v as f64, node });
            }
        } else if !c.closed {
            return Err(Error::input(format!("link component {ci} must be closed")));
        }
    }
    // Crossings, on half-open segments so a hit at a polyline vertex counts
    // once.
    let ends: Vec<[f64; 2]> = curves
        .iter()
        .filter(|c| matches!(c.label, ArcLabel::Band(_)))
        .flat_map(|c| [c.points[0], *c.points.last().expect("points")])
        .collect();
    let mut hits: Vec<(usize, f64, usize, f64)> = Vec::new();
    for a in 0..curves.len() {
        for b in a..curves.len() {
            for i in 0..segments(&curves[a]) {
                for j in 0..segments(&curves[b]) {
                    let nseg = segments(&curves[a]);
                    if a == b && (j <= i || j == i + 1 || (curves[a].closed && i == 0 && j == nseg - 1)) {
                        continue;
                    }
                    let (p, p2) = seg(&curves[a], i);
                    let (q, q2) = seg(&curves[b], j);
                    let (r, s) = (sub(p2, p), sub(q2, q));
                    let den = cross2(r, s);
                    if den.abs() < EPS {
                        continue;
                    }
                    let t = cross2(sub(q, p), s) / den;
                    let u = cross2(sub(q, p), r) / den;
                    let open_end = |c: &PolyCurve, k: usize, x: f64| {
                        x > -1e-12 && (x < 1.0 - 1e-12 || (!c.closed && k == segments(c) - 1 && x <= 1.0))
                    };
                    if !open_end(&curves[a], i, t) || !open_end(&curves[b], j, u) {
                        continue;
                    }
                    let pt = at(&curves[a], i as f64 + t);
                    if ends.iter().any(|&e| same(e, pt)) {
                        continue;
                    }
                    let snap = |k: usize, x: f64| if x.abs() < 1e-12 { k as f64 } else { k as f64 + x };
                    hits.push((a, snap(i, t), b, snap(j, u)));
                }
            }
        }
    }
    let mut order: Vec<Vec<f64>> = vec![Vec::new(); curves.len()];
    for &(a, ta, b, tb) in &hits {
        order[a].push(ta);
        order[b].push(tb);
    }
    for o in &mut order {
        o.sort_by(f64::total_cmp);
    }
    let rank = |c: usize, t: f64| order[c].iter().position(|&x| x == t).expect("recorded");
    let mut over_curve = Vec::new();
    for &(a, ta, b, tb) in &hits {
        let m = Meeting { a, ka: rank(a, ta), b, kb: rank(b, tb) };
        let node = kinds.len();
        kinds.push(NodeKind::Crossing { over: [0, 0] });
        over_curve.push((node, if over(m) { (a, ta) } else { (b, tb) }));
        events[a].push(Event { t: ta, node });
        events[b].push(Event { t: tb, node });
    }
    for ev in &mut events {
        if ev.is_empty() {
            let node = kinds.len();
            kinds.push(NodeKind::Helper);
            ev.push(Event { t: 0.0, node });
        }
        ev.sort_by(|x, y| x.t.total_cmp(&y.t));
    }
    // Arcs and darts, with the polyline each dart runs along.
    let mut dart_node = Vec::new();
    let mut pair = Vec::new();
    let mut labels = Vec::new();
    let mut paths: Vec<Vec<[f64; 2]>> = Vec::new();
    let mut dart_curve: Vec<(usize, f64)> = Vec::new();
    for (ci, c) in curves.iter().enumerate() {
        let ev = &events[ci];
        let n = segments(c) as f64;
        let count = if c.closed { ev.len() } else { ev.len() - 1 };
        for k in 0..count {
            let (e0, e1) = (ev[k], ev[(k + 1) % ev.len()]);
            let t1 = if e1.t <= e0.t { e1.t + n } else { e1.t };
            let mut pts = vec![at(c, e0.t)];
            let mut v = e0.t.floor() + 1.0;
            while v < t1 - EPS {
                pts.push(c.points[(v as usize) % c.points.len()]);
                v += 1.0;
            }
            pts.push(at(c, if c.closed && t1 >= n { t1 - n } else { t1 }));
            let d = dart_node.len();
            dart_node.extend([e0.node, e1.node]);
            pair.extend([d + 1, d]);
            labels.extend([c.label, c.label]);
            let mut back = pts.clone();
            back.reverse();
            paths.push(pts);
            paths.push(back);
            dart_curve.extend([(ci, e0.t), (ci, e1.t)]);
        }
    }
    let angle = |d: usize| {
        let p = &paths[d];
        let v = sub(p[1], p[0]);
        v[1].atan2(v[0])
    };
    let mut nodes: Vec<Node> = kinds
        .iter()
        .enumerate()
        .map(|(i, k)| {
            let name = match k {
                NodeKind::Crossing { .. } => format!("x{i}"),
                NodeKind::BandEnd => format!("e{i}"),
                NodeKind::Helper => format!("h{i}"),
            };
            Node { name, kind: k.clone(), rotation: Vec::new() }
        })
        .collect();
    for d in 0..dart_node.len() {
        nodes[dart_node[d]].rotation.push(d);
    }
    for n in &mut nodes {
        n.rotation.sort_by(|&x, &y| angle(x).total_cmp(&angle(y)));
    }
    for (node, (c, t)) in over_curve {
        let ds: Vec<usize> = nodes[node]
            .rotation
            .iter()
            .copied()
            .filter(|&d| dart_curve[d].0 == c && (dart_curve[d].1 - t).abs() < EPS)
            .collect();
        let [x, y] = ds[..] else {
            return Err(Error::input("a crossing is not transversal"));
        };
        nodes[node].kind = NodeKind::Crossing { over: [x, y] };
    }
    let dart_names = (0..dart_node.len()).map(|d| format!("d{d}")).collect();
    let mut map = CombinatorialMap { nodes, dart_names, dart_node, pair, labels, outer: 0 };
    let faces = map.faces()?;
    let area = |orbit: &[usize]| -> f64 {
        let mut s = 0.0;
        for &d in orbit {
            for w in paths[d].windows(2) {
                s += cross2(w[0], w[1]);
            }
        }
        s / 2.0
    };
    let outer: Vec<usize> = faces.orbits.iter().filter(|o| area(o) > 0.0).map(|o| o[0]).collect();
    let [outer] = outer[..] else {
        return Err(Error::input("drawing does not have a single unbounded face"));
    };
    map.outer = outer;
    let m = curves.iter().filter(|c| matches!(c.label, ArcLabel::Component(_))).count();
    let n = curves.len() - m;
    Ok(BandedUnlinkDiagram { map, m, n, twists: BTreeMap::new() })
}

fn polar(c: [f64; 2], r: f64, deg: f64) -> [f64; 2] {
    let a = deg.to_radians();
    [c[0] + r * a.cos(), c[1] + r * a.sin()]
}

/// A circle with a vertex every five degrees, starting at angle 0.
fn circle(label: usize, c: [f64; 2], r: f64) -> PolyCurve {
    PolyCurve { label: ArcLabel::Component(label), points: (0..72).map(|i| polar(c, r, 5.0 * i as f64)).collect(), closed: true }
}

/// Points alternating between radii `r_in` and `r_out` about `c`, at
/// `count` evenly spaced angles from `from` to `to` degrees.
fn stitch(c: [f64; 2], r_first: f64, r_second: f64, from: f64, to: f64, count: usize) -> Vec<[f64; 2]> {
    let step = if count > 1 { (to - from) / (count - 1) as f64 } else { 0.0 };
    (0..count)
        .map(|i| polar(c, if i % 2 == 0 { r_first } else { r_second }, from + step * i as f64))
        .collect()
}

/// A banded unlink diagram of the `k`-twist spun knot of `T(2, 2n+1)`, laid
/// out with `4n + 2k` crossings and four band ends.
pub fn gen_twist_spun(n: i64, k: i64) -> Result<BandedUnlinkDiagram> {
    if n < 1 {
        return Err(Error::input(format!("twist-spun family needs n >= 1, got {n}")));
    }
    if k < 0 {
        return Err(Error::input(format!("twist-spun family needs k >= 0, got {k}")));
    }
    let (n, k) = (n as usize, k as usize);
    let (c1, c2) = ([0.0, 0.0], [40.0, 0.0]);
    let l1 = circle(1, c1, 5.0);
    let l2 = circle(2, c2, 10.0);
    // B1 leaves L2 at 120 degrees, loops around L1 and returns at 240.
    let b1 = PolyCurve {
        label: ArcLabel::Band(1),
        points: vec![polar(c2, 10.0, 120.0), [30.0, 20.0], [-15.0, 20.0], [-15.0, -20.0], [30.0, -20.0], polar(c2, 10.0, 240.0)],
        closed: false,
    };
    // B2 starts inside L1, stitches across it 4n - 1 times, enters L2 at 180
    // degrees, stitches across its far side 2k times and ends at 330.
    let mut p = vec![polar(c1, 5.0, 0.0)];
    p.extend(stitch(c1, 3.0, 7.0, 10.0, 330.0, 4 * n));
    p.extend([[12.0, -6.0], [25.0, 0.0], polar(c2, 7.0, 180.0)]);
    if k > 0 {
        p.extend(stitch(c2, 8.0, 12.0, 100.0, 10.0, 2 * k + 1));
    }
    p.push(polar(c2, 10.0, 330.0));
    let b2 = PolyCurve { label: ArcLabel::Band(2), points: p, closed: false };
    // Along B2 the passes over L1 alternate; elsewhere the cores pass over.
    from_polylines(&[l1, l2, b1, b2], |m| m.a == 0 && m.b == 3 && m.kb % 2 == 0)
}

/// A banded unlink diagram of `K_n`: one band from `L1` that passes `|n|`
/// times through the disk of `L2`, hooks back over itself and ends on `L2`.
/// The sign of `n` swaps over and under at the passes.
pub fn gen_kn(n: i64) -> Result<BandedUnlinkDiagram> {
    if n == 0 {
        return Err(Error::input("K_n needs n != 0"));
    }
    let a = n.unsigned_abs() as usize;
    let (c1, c2) = ([0.0, 0.0], [30.0, 0.0]);
    let l1 = circle(1, c1, 5.0);
    let l2 = circle(2, c2, 5.0);
    let mut p = vec![polar(c1, 5.0, 0.0), [20.0, 2.0]];
    p.extend(stitch(c2, 3.0, 7.0, 160.0, 20.0, 2 * a));
    p.extend([[42.0, 12.0], [16.0, 12.0], [16.0, -10.0], [30.0, -12.0], polar(c2, 5.0, 270.0)]);
    let b = PolyCurve { label: ArcLabel::Band(1), points: p, closed: false };
    // Curve 2 (the core) meets L2 (curve 1) as `b`; alternate along the core.
    from_polylines(&[l1, l2, b], move |m| {
        if m.a == m.b {
            return true;
        }
        let core_over = (m.kb % 2 == 0) == (n > 0);
        !core_over
    })
}
