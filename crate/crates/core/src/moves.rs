//! Rewriting moves on decorated graphs.
//!
//! The rule table is data (see `rules.txt`): each rule names a structural
//! pattern, a rewrite, side conditions on decorations, homological guards
//! and the new decorations as affine expressions in the matched ones.
//! Sites never touch a B vertex or an edge incident to one.

use std::collections::{BTreeMap, BTreeSet};
use std::fmt;
use std::str::FromStr;
use std::sync::OnceLock;

use serde::Serialize;

use crate::encoding_graph::{d_closure, validate, DecoratedGraph, End, VId, VertexKind as K};
use crate::error::{Error, Result};
use crate::half::HalfInt;
use crate::homology::{abelianize, Abelianization};
use crate::van_kampen::{pi1_tree, Pi1Result};

const BUILTIN_RULES: &str = include_str!("rules.txt");

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum MoveKind {
    YV,
    IH,
    VerticalDiskAdd,
    HorizontalDiskAdd,
    ConnectedSumReduce,
    GleamShift,
    A,
    B,
    C,
    D,
    E,
    F,
    G,
    H,
}

impl MoveKind {
    pub const ALL: [MoveKind; 14] = [
        MoveKind::YV,
        MoveKind::IH,
        MoveKind::VerticalDiskAdd,
        MoveKind::HorizontalDiskAdd,
        MoveKind::ConnectedSumReduce,
        MoveKind::GleamShift,
        MoveKind::A,
        MoveKind::B,
        MoveKind::C,
        MoveKind::D,
        MoveKind::E,
        MoveKind::F,
        MoveKind::G,
        MoveKind::H,
    ];

    pub fn name(self) -> &'static str {
        match self {
            MoveKind::YV => "YV",
            MoveKind::IH => "IH",
            MoveKind::VerticalDiskAdd => "VerticalDiskAdd",
            MoveKind::HorizontalDiskAdd => "HorizontalDiskAdd",
            MoveKind::ConnectedSumReduce => "ConnectedSumReduce",
            MoveKind::GleamShift => "GleamShift",
            MoveKind::A => "A",
            MoveKind::B => "B",
            MoveKind::C => "C",
            MoveKind::D => "D",
            MoveKind::E => "E",
            MoveKind::F => "F",
            MoveKind::G => "G",
            MoveKind::H => "H",
        }
    }
}

impl fmt::Display for MoveKind {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.name())
    }
}

impl FromStr for MoveKind {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        MoveKind::ALL
            .into_iter()
            .find(|k| k.name().eq_ignore_ascii_case(s))
            .ok_or_else(|| Error::input(format!("unknown move kind `{s}`")))
    }
}

#[derive(Clone, Copy, Debug, PartialEq, Eq)]
enum Pattern {
    PLeaf,
    AnyEdge,
    PP,
    Y111Leaf,
    Y111LeafSplit,
    Y111Any,
    Y12Any,
    Y12Leaf0,
    Y12Leaf1,
    Y111TwoLeaves,
    Y111Y12Pair,
}

const PATTERNS: [(&str, Pattern, usize); 11] = [
    ("p-leaf", Pattern::PLeaf, 3),
    ("edge", Pattern::AnyEdge, 1),
    ("p-p", Pattern::PP, 5),
    ("y111-leaf", Pattern::Y111Leaf, 3),
    ("y111-leaf-split", Pattern::Y111LeafSplit, 3),
    ("y111", Pattern::Y111Any, 3),
    ("y12", Pattern::Y12Any, 2),
    ("y12-leaf0", Pattern::Y12Leaf0, 2),
    ("y12-leaf1", Pattern::Y12Leaf1, 2),
    ("y111-two-leaves", Pattern::Y111TwoLeaves, 3),
    ("y111-y12-pair", Pattern::Y111Y12Pair, 5),
];

#[derive(Clone, Debug, PartialEq, Eq)]
enum Rhs {
    Decorate,
    Merge,
    Split([String; 3]),
    Repair,
    InsertCap([String; 3]),
    ToDisk(String),
    Reduce,
}

/// `sum c_i v_i + k`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Affine {
    terms: Vec<(i64, String)>,
    constant: HalfInt,
}

impl Affine {
    fn eval(&self, env: &BTreeMap<String, HalfInt>) -> HalfInt {
        let mut s = self.constant;
        for (c, v) in &self.terms {
            s += env[v] * *c;
        }
        s
    }

    fn vars(&self) -> impl Iterator<Item = &str> {
        self.terms.iter().map(|(_, v)| v.as_str())
    }
}

impl FromStr for Affine {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        let s: String = s.chars().filter(|c| !c.is_whitespace()).collect();
        if s.is_empty() {
            return Err(Error::input("empty expression"));
        }
        let mut out = Affine { terms: Vec::new(), constant: HalfInt::ZERO };
        let mut rest = s.as_str();
        let mut sign = 1;
        if let Some(r) = rest.strip_prefix('-') {
            sign = -1;
            rest = r;
        } else if let Some(r) = rest.strip_prefix('+') {
            rest = r;
        }
        loop {
            let end = rest.find(['+', '-']).unwrap_or(rest.len());
            let term = &rest[..end];
            if term.is_empty() {
                return Err(Error::input(format!("malformed expression `{s}`")));
            }
            let (coef, var) = match term.split_once('*') {
                Some((c, v)) => (
                    c.parse::<i64>().map_err(|_| Error::input(format!("bad coefficient `{c}`")))?,
                    Some(v),
                ),
                None if term.starts_with(|c: char| c.is_ascii_digit()) => (1, None),
                None => (1, Some(term)),
            };
            match var {
                Some(v) if is_ident(v) => out.terms.push((sign * coef, v.to_string())),
                Some(v) => return Err(Error::input(format!("bad variable `{v}`"))),
                None => out.constant += term.parse::<HalfInt>()? * sign,
            }
            if end == rest.len() {
                break;
            }
            sign = if rest.as_bytes()[end] == b'-' { -1 } else { 1 };
            rest = &rest[end + 1..];
        }
        Ok(out)
    }
}

fn is_ident(s: &str) -> bool {
    s.starts_with(|c: char| c.is_ascii_alphabetic())
        && s.chars().all(|c| c.is_ascii_alphanumeric() || c == '_')
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Condition {
    Equals(Affine, HalfInt),
    In(Affine, Vec<HalfInt>),
    NotIn(Affine, Vec<HalfInt>),
    Integer(Affine),
}

impl Condition {
    fn holds(&self, env: &BTreeMap<String, HalfInt>) -> bool {
        match self {
            Condition::Equals(e, v) => e.eval(env) == *v,
            Condition::In(e, vs) => vs.contains(&e.eval(env)),
            Condition::NotIn(e, vs) => !vs.contains(&e.eval(env)),
            Condition::Integer(e) => e.eval(env).is_integer(),
        }
    }

    fn expr(&self) -> &Affine {
        match self {
            Condition::Equals(e, _) | Condition::In(e, _) | Condition::NotIn(e, _) | Condition::Integer(e) => e,
        }
    }
}

#[derive(Clone, Debug, PartialEq, Eq)]
enum Guard {
    /// The edge's boundary word is zero in `H_1` of the whole tree.
    NullClass(String),
    /// The side across the edge carries no B and no true vertex and its
    /// D-closure has trivial `H_1`.
    Discardable(String),
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct MoveRule {
    pub name: String,
    pub kind: MoveKind,
    pattern: Pattern,
    vars: Vec<String>,
    rhs: Rhs,
    sign: Option<String>,
    conditions: Vec<Condition>,
    guards: Vec<Guard>,
    sets: Vec<(String, Affine)>,
}

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct RuleTable {
    pub rules: Vec<MoveRule>,
}

impl RuleTable {
    pub fn builtin() -> &'static Self {
        static TABLE: OnceLock<RuleTable> = OnceLock::new();
        TABLE.get_or_init(|| Self::parse(BUILTIN_RULES).expect("built-in rule table parses"))
    }

    pub fn rule(&self, name: &str) -> Option<&MoveRule> {
        self.rules.iter().find(|r| r.name == name)
    }

    pub fn parse(text: &str) -> Result<Self> {
        let mut rules = Vec::new();
        let mut cur: Option<(usize, MoveRule)> = None;
        for (ln, raw) in text.lines().enumerate() {
            let ln = ln + 1;
            let line = raw.split('#').next().unwrap_or("").trim();
            if line.is_empty() {
                continue;
            }
            let col = raw.find(|c: char| !c.is_whitespace()).unwrap_or(0) + 1;
            let err = |m: String| Error::syntax(ln, col, m);
            let (head, tail) = line.split_once(char::is_whitespace).unwrap_or((line, ""));
            let tail = tail.trim();
            let words: Vec<&str> = tail.split_whitespace().collect();
            if head == "rule" {
                if cur.is_some() {
                    return Err(err("`rule` inside an open rule".into()));
                }
                let [name, kind] = words[..] else {
                    return Err(err("expected `rule <name> <kind>`".into()));
                };
                let kind = kind.parse::<MoveKind>().map_err(|e| err(e.to_string()))?;
                cur = Some((
                    ln,
                    MoveRule {
                        name: name.to_string(),
                        kind,
                        pattern: Pattern::AnyEdge,
                        vars: Vec::new(),
                        rhs: Rhs::Decorate,
                        sign: None,
                        conditions: Vec::new(),
                        guards: Vec::new(),
                        sets: Vec::new(),
                    },
                ));
                continue;
            }
            let Some((_, r)) = cur.as_mut() else {
                return Err(err(format!("`{head}` outside a rule")));
            };
            match head {
                "lhs" => {
                    let Some((&p, vars)) = words.split_first() else {
                        return Err(err("expected `lhs <pattern> <vars...>`".into()));
                    };
                    let &(_, pat, arity) = PATTERNS
                        .iter()
                        .find(|(n, _, _)| *n == p)
                        .ok_or_else(|| err(format!("unknown pattern `{p}`")))?;
                    if vars.len() != arity {
                        return Err(err(format!("pattern `{p}` binds {arity} edges, got {}", vars.len())));
                    }
                    r.pattern = pat;
                    r.vars = vars.iter().map(|s| s.to_string()).collect();
                }
                "rhs" => {
                    let names = |w: &[&str]| -> Result<[String; 3]> {
                        match w {
                            [a, b, c] => Ok([a.to_string(), b.to_string(), c.to_string()]),
                            _ => Err(err("expected three output names".into())),
                        }
                    };
                    r.rhs = match words.first().copied() {
                        Some("decorate") => Rhs::Decorate,
                        Some("merge") => Rhs::Merge,
                        Some("split") => Rhs::Split(names(&words[1..])?),
                        Some("repair") => Rhs::Repair,
                        Some("insert-cap") => Rhs::InsertCap(names(&words[1..])?),
                        Some("to-disk") if words.len() == 2 => Rhs::ToDisk(words[1].to_string()),
                        Some("reduce") => Rhs::Reduce,
                        _ => return Err(err(format!("unknown rewrite `{tail}`"))),
                    };
                }
                "sign" => match words[..] {
                    [v] if is_ident(v) => r.sign = Some(v.to_string()),
                    _ => return Err(err("expected `sign <variable>`".into())),
                },
                "when" => r.conditions.push(parse_condition(tail).map_err(|e| err(e.to_string()))?),
                "guard" => r.guards.push(match words[..] {
                    ["null-class", v] => Guard::NullClass(v.to_string()),
                    ["discardable", v] => Guard::Discardable(v.to_string()),
                    _ => return Err(err(format!("unknown guard `{tail}`"))),
                }),
                "set" => {
                    let (lhs, rhs) = tail
                        .split_once('=')
                        .ok_or_else(|| err("expected `set <edge> = <expr>`".into()))?;
                    let e = rhs.parse::<Affine>().map_err(|e| err(e.to_string()))?;
                    r.sets.push((lhs.trim().to_string(), e));
                }
                "end" => {
                    let (start, r) = cur.take().expect("open rule");
                    check_rule(&r).map_err(|e| Error::syntax(start, 1, e.to_string()))?;
                    if rules.iter().any(|q: &MoveRule| q.name == r.name) {
                        return Err(Error::syntax(start, 1, format!("duplicate rule `{}`", r.name)));
                    }
                    rules.push(r);
                }
                _ => return Err(err(format!("unknown directive `{head}`"))),
            }
        }
        if let Some((start, _)) = cur {
            return Err(Error::syntax(start, 1, "rule is missing `end`"));
        }
        Ok(RuleTable { rules })
    }
}

fn parse_condition(s: &str) -> Result<Condition> {
    if let Some(e) = s.strip_suffix("integer") {
        return Ok(Condition::Integer(e.parse()?));
    }
    let values = |t: &str| -> Result<Vec<HalfInt>> { t.split_whitespace().map(str::parse).collect() };
    if let Some((e, vs)) = s.split_once(" notin ") {
        return Ok(Condition::NotIn(e.parse()?, values(vs)?));
    }
    if let Some((e, vs)) = s.split_once(" in ") {
        return Ok(Condition::In(e.parse()?, values(vs)?));
    }
    if let Some((e, v)) = s.split_once('=') {
        return Ok(Condition::Equals(e.parse()?, v.trim().parse()?));
    }
    Err(Error::input(format!("unknown condition `{s}`")))
}

fn check_rule(r: &MoveRule) -> Result<()> {
    if r.vars.is_empty() {
        return Err(Error::input(format!("rule `{}` has no lhs", r.name)));
    }
    let needs = match r.rhs {
        Rhs::Merge => Some(Pattern::PLeaf),
        Rhs::Split(_) | Rhs::InsertCap(_) => Some(Pattern::AnyEdge),
        Rhs::Repair => Some(Pattern::PP),
        Rhs::Reduce => Some(Pattern::Y111LeafSplit),
        Rhs::Decorate | Rhs::ToDisk(_) => None,
    };
    if needs.is_some_and(|p| p != r.pattern) {
        return Err(Error::input(format!("rule `{}`: rewrite does not fit its pattern", r.name)));
    }
    let mut known: BTreeSet<&str> = r.vars.iter().map(String::as_str).collect();
    if let Some(s) = &r.sign {
        known.insert(s);
    }
    for c in &r.conditions {
        if let Some(v) = c.expr().vars().find(|v| !known.contains(v)) {
            return Err(Error::input(format!("rule `{}`: unknown variable `{v}`", r.name)));
        }
    }
    for (_, e) in &r.sets {
        if let Some(v) = e.vars().find(|v| !known.contains(v)) {
            return Err(Error::input(format!("rule `{}`: unknown variable `{v}`", r.name)));
        }
    }
    for g in &r.guards {
        let (Guard::NullClass(v) | Guard::Discardable(v)) = g;
        if !r.vars.contains(v) {
            return Err(Error::input(format!("rule `{}`: unknown variable `{v}`", r.name)));
        }
    }
    if let Rhs::ToDisk(v) = &r.rhs {
        if !r.vars.contains(v) {
            return Err(Error::input(format!("rule `{}`: unknown variable `{v}`", r.name)));
        }
    }
    let outputs: BTreeSet<&str> = match &r.rhs {
        Rhs::Split(n) | Rhs::InsertCap(n) => n.iter().map(String::as_str).collect(),
        Rhs::Merge => BTreeSet::from([r.vars[1].as_str()]),
        Rhs::Reduce => BTreeSet::from([r.vars[1].as_str()]),
        Rhs::ToDisk(v) => BTreeSet::from([v.as_str()]),
        Rhs::Decorate | Rhs::Repair => r.vars.iter().map(String::as_str).collect(),
    };
    for (t, _) in &r.sets {
        if !outputs.contains(t.as_str()) {
            return Err(Error::input(format!("rule `{}`: `{t}` is not an edge after the move", r.name)));
        }
    }
    Ok(())
}

/// A matching of a rule's left-hand side into a graph.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct Site {
    pub rule: String,
    pub kind: MoveKind,
    pub locus: String,
    /// Matched vertices removed or rebuilt by the rewrite.
    pub internal: Vec<VId>,
    /// Rule variable to edge id.
    pub edges: Vec<(String, String)>,
    pub sign: i64,
}

impl Site {
    fn edge(&self, var: &str) -> &str {
        &self.edges.iter().find(|(v, _)| v == var).expect("bound variable").1
    }
}

impl fmt::Display for Site {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let b: Vec<String> = self.edges.iter().map(|(v, e)| format!("{v}={e}")).collect();
        write!(f, "{} at {} ({})", self.rule, self.locus, b.join(", "))?;
        if self.sign != 0 {
            write!(f, " sign {:+}", self.sign)?;
        }
        Ok(())
    }
}

struct Match {
    locus: String,
    internal: Vec<VId>,
    bind: Vec<String>,
}

fn matches(g: &DecoratedGraph, p: Pattern) -> Vec<Match> {
    let mut out = Vec::new();
    let is = |v: &str, k: K| g.kind(v) == Some(k);
    let full = |v: &str| {
        let inc = g.incident(v);
        (inc.len() == g.kind(v).map_or(0, K::valency)).then_some(inc)
    };
    let others = |n: usize, i: usize| (0..n).filter(move |&j| j != i);
    match p {
        Pattern::AnyEdge => {
            for id in g.edges.keys() {
                out.push(Match { locus: id.clone(), internal: vec![], bind: vec![id.clone()] });
            }
        }
        Pattern::PP => {
            for (id, e) in &g.edges {
                if !is(&e.a.vertex, K::P) || !is(&e.b.vertex, K::P) {
                    continue;
                }
                let mut bind = vec![id.clone()];
                for end in [&e.a, &e.b] {
                    for d in 1..3 {
                        if let Some(o) = g.edge_at(&end.vertex, (end.slot + d) % 3) {
                            bind.push(o.to_string());
                        }
                    }
                }
                if bind.len() == 5 {
                    out.push(Match {
                        locus: id.clone(),
                        internal: vec![e.a.vertex.clone(), e.b.vertex.clone()],
                        bind,
                    });
                }
            }
        }
        Pattern::PLeaf | Pattern::Y111Leaf | Pattern::Y111LeafSplit | Pattern::Y111Any => {
            let kind = if p == Pattern::PLeaf { K::P } else { K::Y111 };
            for v in g.vertices_of_kind(kind) {
                let Some(inc) = full(&v) else { continue };
                for i in 0..3 {
                    let leaf = is(&inc[i].2, K::D);
                    if p != Pattern::Y111Any && !leaf {
                        continue;
                    }
                    let rest: Vec<usize> = others(3, i).collect();
                    let mut orders = vec![(rest[0], rest[1])];
                    if p == Pattern::Y111LeafSplit {
                        orders.push((rest[1], rest[0]));
                    }
                    for (j, k) in orders {
                        let mut internal = vec![v.clone()];
                        if p != Pattern::Y111Any {
                            internal.push(inc[i].2.clone());
                        }
                        out.push(Match {
                            locus: v.clone(),
                            internal,
                            bind: vec![inc[i].1.clone(), inc[j].1.clone(), inc[k].1.clone()],
                        });
                    }
                }
            }
        }
        Pattern::Y12Any | Pattern::Y12Leaf0 | Pattern::Y12Leaf1 => {
            for v in g.vertices_of_kind(K::Y12) {
                let Some(inc) = full(&v) else { continue };
                let (r, o) = if p == Pattern::Y12Leaf1 { (1, 0) } else { (0, 1) };
                let mut internal = vec![v.clone()];
                if p != Pattern::Y12Any {
                    if !is(&inc[r].2, K::D) {
                        continue;
                    }
                    internal.push(inc[r].2.clone());
                }
                out.push(Match { locus: v.clone(), internal, bind: vec![inc[r].1.clone(), inc[o].1.clone()] });
            }
        }
        Pattern::Y111TwoLeaves => {
            for v in g.vertices_of_kind(K::Y111) {
                let Some(inc) = full(&v) else { continue };
                for i in 0..3 {
                    let rest: Vec<usize> = others(3, i).collect();
                    if rest.iter().all(|&j| is(&inc[j].2, K::D)) {
                        out.push(Match {
                            locus: v.clone(),
                            internal: vec![v.clone(), inc[rest[0]].2.clone(), inc[rest[1]].2.clone()],
                            bind: vec![inc[rest[0]].1.clone(), inc[rest[1]].1.clone(), inc[i].1.clone()],
                        });
                    }
                }
            }
        }
        Pattern::Y111Y12Pair => {
            for v in g.vertices_of_kind(K::Y111) {
                let Some(inc) = full(&v) else { continue };
                'slot: for i in 0..3 {
                    let mut internal = vec![v.clone()];
                    let mut bind = Vec::new();
                    for j in others(3, i) {
                        let (_, s, w, ws) = &inc[j];
                        if !is(w, K::Y12) || *ws != 0 {
                            continue 'slot;
                        }
                        let Some(h) = g.edge_at(w, 1) else { continue 'slot };
                        let Some(d) = g.edges[h].other(w) else { continue 'slot };
                        if !is(d, K::D) {
                            continue 'slot;
                        }
                        internal.push(w.clone());
                        internal.push(d.to_string());
                        bind.push(s.clone());
                        bind.push(h.to_string());
                    }
                    bind.push(inc[i].1.clone());
                    out.push(Match { locus: v.clone(), internal, bind });
                }
            }
        }
    }
    out
}

/// Lazily computed homological data of the current graph.
struct Homology<'a> {
    g: &'a DecoratedGraph,
    cache: Option<Option<(Pi1Result, Abelianization)>>,
}

impl<'a> Homology<'a> {
    fn new(g: &'a DecoratedGraph) -> Self {
        Homology { g, cache: None }
    }

    fn null_class(&mut self, edge: &str) -> bool {
        let g = self.g;
        let data = self.cache.get_or_insert_with(|| {
            pi1_tree(g).ok().map(|r| {
                let ab = abelianize(&r.presentation);
                (r, ab)
            })
        });
        match data {
            Some((r, ab)) => ab.is_zero_class(&r.edge_word(g, edge)),
            None => false,
        }
    }
}

/// Vertices on the far side of `edge` as seen from `from`.
fn side(g: &DecoratedGraph, from: &str, edge: &str) -> BTreeSet<VId> {
    match g.edges[edge].other(from) {
        Some(w) => g.reachable(w, Some(edge)),
        None => BTreeSet::new(),
    }
}

fn discardable(g: &DecoratedGraph, from: &str, edge: &str) -> bool {
    let s = side(g, from, edge);
    if s.is_empty() || s.iter().any(|v| g.kind(v).is_some_and(|k| k == K::B || k.is_x())) {
        return false;
    }
    let Ok(closed) = d_closure(g, &s) else { return false };
    match pi1_tree(&closed) {
        Ok(r) => abelianize(&r.presentation).group.is_trivial(),
        Err(_) => false,
    }
}

fn touches_b(g: &DecoratedGraph, m: &Match) -> bool {
    m.internal.iter().any(|v| g.kind(v) == Some(K::B))
        || m.bind.iter().any(|e| {
            let e = &g.edges[e];
            g.kind(&e.a.vertex) == Some(K::B) || g.kind(&e.b.vertex) == Some(K::B)
        })
}

fn env_of(g: &DecoratedGraph, rule: &MoveRule, bind: &[String], sign: i64) -> BTreeMap<String, HalfInt> {
    let mut env: BTreeMap<String, HalfInt> =
        rule.vars.iter().zip(bind).map(|(v, e)| (v.clone(), g.edges[e].decoration)).collect();
    if let Some(s) = &rule.sign {
        env.insert(s.clone(), HalfInt::from_int(sign));
    }
    env
}

/// All sites of moves of kind `k` in the built-in rule table.
pub fn sites(g: &DecoratedGraph, k: MoveKind) -> Vec<Site> {
    sites_with(RuleTable::builtin(), g, k)
}

pub fn sites_with(t: &RuleTable, g: &DecoratedGraph, k: MoveKind) -> Vec<Site> {
    let mut h = Homology::new(g);
    let mut out = Vec::new();
    for rule in t.rules.iter().filter(|r| r.kind == k) {
        for m in matches(g, rule.pattern) {
            if touches_b(g, &m) {
                continue;
            }
            let var_edge = |v: &str| &m.bind[rule.vars.iter().position(|x| x == v).expect("checked")];
            let guards_ok = rule.guards.iter().all(|gd| match gd {
                Guard::NullClass(v) => h.null_class(var_edge(v)),
                Guard::Discardable(v) => discardable(g, &m.internal[0], var_edge(v)),
            });
            if !guards_ok {
                continue;
            }
            let signs: &[i64] = if rule.sign.is_some() { &[1, -1] } else { &[0] };
            for &sign in signs {
                let env = env_of(g, rule, &m.bind, sign);
                if rule.conditions.iter().all(|c| c.holds(&env)) {
                    out.push(Site {
                        rule: rule.name.clone(),
                        kind: k,
                        locus: m.locus.clone(),
                        internal: m.internal.clone(),
                        edges: rule.vars.iter().cloned().zip(m.bind.iter().cloned()).collect(),
                        sign,
                    });
                }
            }
        }
    }
    out
}

/// Applies a site from [`sites`]. `keep` names a vertex on the side that
/// survives a reduction.
pub fn apply(g: &DecoratedGraph, k: MoveKind, site: &Site, keep: Option<&str>) -> Result<DecoratedGraph> {
    apply_with(RuleTable::builtin(), g, k, site, keep)
}

pub fn apply_with(
    t: &RuleTable,
    g: &DecoratedGraph,
    k: MoveKind,
    site: &Site,
    keep: Option<&str>,
) -> Result<DecoratedGraph> {
    if site.kind != k {
        return Err(Error::input(format!("site is for {} moves, not {k}", site.kind)));
    }
    if !sites_with(t, g, k).contains(site) {
        return Err(Error::input(format!("stale site: {site}")));
    }
    let rule = t.rule(&site.rule).expect("site rule exists");
    let bind: Vec<String> = site.edges.iter().map(|(_, e)| e.clone()).collect();
    let env = env_of(g, rule, &bind, site.sign);
    let values: Vec<(String, HalfInt)> = rule.sets.iter().map(|(t, e)| (t.clone(), e.eval(&env))).collect();

    let mut out = g.clone();
    let mut names: BTreeMap<String, String> = site.edges.iter().cloned().collect();
    let e_of = |v: &str| site.edge(v).to_string();
    match &rule.rhs {
        Rhs::Decorate => {}
        Rhs::Merge => {
            let (v, leaf) = (&site.internal[0], &site.internal[1]);
            let (a, c) = (e_of(&rule.vars[1]), e_of(&rule.vars[2]));
            let ec = out.edges.remove(&c).expect("bound edge");
            let far = ec.oriented(v).expect("incident").1.clone();
            out.edges.remove(&e_of(&rule.vars[0]));
            let ea = out.edges.get_mut(&a).expect("bound edge");
            if ea.a.vertex == *v {
                ea.a = far;
            } else {
                ea.b = far;
            }
            ea.invert = ea.invert == ec.invert;
            out.vertices.remove(v);
            out.vertices.remove(leaf);
        }
        Rhs::Split(n) | Rhs::InsertCap(n) => {
            let split = matches!(rule.rhs, Rhs::Split(_));
            let e = e_of(&rule.vars[0]);
            let mid = out.fresh_id(if split { "p" } else { "u" });
            out.add_vertex(&mid, if split { K::P } else { K::Y111 });
            let cap = out.fresh_id("d");
            out.add_vertex(&cap, K::D);
            let old = out.edges[&e].clone();
            let c_id = out.fresh_id("e");
            out.edges.insert(
                c_id.clone(),
                crate::encoding_graph::Edge {
                    a: End::new(&mid, 1),
                    b: old.b.clone(),
                    decoration: HalfInt::ZERO,
                    invert: split && !old.invert,
                },
            );
            let cap_id = out.fresh_id("e");
            out.add_edge(cap_id.clone(), (&mid, 2), (&cap, 0), HalfInt::ZERO, false);
            let ea = out.edges.get_mut(&e).expect("bound edge");
            ea.b = End::new(&mid, 0);
            if split {
                ea.invert = false;
            }
            names.insert(n[0].clone(), e);
            names.insert(n[1].clone(), c_id);
            names.insert(n[2].clone(), cap_id);
        }
        Rhs::Repair => repair(&mut out, site, &rule.vars),
        Rhs::ToDisk(var) => {
            let kept = e_of(var);
            let internal: BTreeSet<&VId> = site.internal.iter().collect();
            for (_, e) in &site.edges {
                if *e != kept {
                    out.edges.remove(e);
                }
            }
            for v in &internal {
                out.vertices.remove(*v);
            }
            let d = out.fresh_id("d");
            out.add_vertex(&d, K::D);
            let ek = out.edges.get_mut(&kept).expect("bound edge");
            if internal.contains(&ek.a.vertex) {
                ek.a = End::new(&d, 0);
            } else {
                ek.b = End::new(&d, 0);
            }
            ek.invert = false;
        }
        Rhs::Reduce => {
            let (u, leaf) = (&site.internal[0], &site.internal[1]);
            let (kept, gone) = (e_of(&rule.vars[1]), e_of(&rule.vars[2]));
            let Some(keep) = keep else {
                return Err(Error::input("reduction disconnects the graph: name the side to keep"));
            };
            if !side(g, u, &kept).contains(keep) {
                return Err(Error::input(format!("`{keep}` is not on the kept side of {site}")));
            }
            let mut dead = side(g, u, &gone);
            dead.insert(u.clone());
            dead.insert(leaf.clone());
            out.edges.retain(|id, e| {
                *id == kept || !(dead.contains(&e.a.vertex) || dead.contains(&e.b.vertex))
            });
            out.vertices.retain(|v, _| !dead.contains(v));
            let d = out.fresh_id("d");
            out.add_vertex(&d, K::D);
            let ek = out.edges.get_mut(&kept).expect("bound edge");
            if ek.a.vertex == *u {
                ek.a = End::new(&d, 0);
            } else {
                ek.b = End::new(&d, 0);
            }
            ek.invert = false;
        }
    }
    for (target, v) in values {
        let id = names.get(&target).ok_or_else(|| Error::invariant(format!("no edge `{target}`")))?;
        let e = out
            .edges
            .get_mut(id)
            .ok_or_else(|| Error::invariant(format!("edge `{id}` vanished in {}", rule.name)))?;
        e.decoration = v;
    }
    let rep = validate(&out, false);
    if let Some(f) = rep.findings.first() {
        return Err(Error::invariant(format!("{} produced an invalid graph: {}", rule.name, f.message)));
    }
    Ok(out)
}

/// The IH move on the P-P edge `e`. With the outer boundary words written
/// `c1 c2 c3 c4 = 1` around the four-holed sphere, the first P is rebuilt
/// on `(c2, c3)` and the second on `(c4, c1)`.
fn repair(out: &mut DecoratedGraph, site: &Site, vars: &[String]) {
    let e = site.edge(&vars[0]).to_string();
    let (p1, p2) = (site.internal[0].clone(), site.internal[1].clone());
    let flip = !out.edges[&e].invert;
    let outer: Vec<(String, i64)> = vars[1..]
        .iter()
        .map(|v| {
            let id = site.edge(v).to_string();
            let s = if out.edges[&id].invert { -1 } else { 1 };
            (id, s)
        })
        .collect();
    let c: Vec<(String, i64)> = if flip {
        vec![
            outer[0].clone(),
            outer[1].clone(),
            (outer[3].0.clone(), -outer[3].1),
            (outer[2].0.clone(), -outer[2].1),
        ]
    } else {
        outer
    };
    let place = [(&c[1], &p1, 0), (&c[2], &p1, 1), (&c[3], &p2, 0), (&c[0], &p2, 1)];
    for ((id, tau), p, slot) in place {
        let ed = out.edges.get_mut(id).expect("bound edge");
        let at_p1 = |end: &End| end.vertex == site.internal[0] || end.vertex == site.internal[1];
        if at_p1(&ed.a) {
            ed.a = End::new(p.as_str(), slot);
        } else {
            ed.b = End::new(p.as_str(), slot);
        }
        ed.invert = *tau == -1;
    }
    let ce = out.edges.get_mut(&e).expect("bound edge");
    ce.a = End::new(&p1, 2);
    ce.b = End::new(&p2, 2);
    ce.invert = true;
}
