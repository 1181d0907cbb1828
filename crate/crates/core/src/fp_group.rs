//! Words, finitely presented groups, Tietze simplification and Fox calculus.

use std::collections::{BTreeMap, HashSet};
use std::fmt;

use serde::Serialize;

use crate::error::{Error, Result};

#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash, Serialize)]
pub enum GenOrigin {
    Local,
    Boundary,
    Meridian,
    Fresh,
}

#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize)]
pub struct GenSym {
    pub name: String,
    pub origin: GenOrigin,
}

impl GenSym {
    pub fn new(name: impl Into<String>, origin: GenOrigin) -> Self {
        GenSym { name: name.into(), origin }
    }
}

/// A generator index together with a sign. The derived order puts a
/// generator before its inverse.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Letter {
    pub gen: usize,
    pub inv: bool,
}

impl Letter {
    pub fn new(gen: usize, inv: bool) -> Self {
        Letter { gen, inv }
    }

    pub fn inverse(self) -> Letter {
        Letter { gen: self.gen, inv: !self.inv }
    }
}

/// A word over generator indices of some presentation.
#[derive(Clone, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Word(pub Vec<Letter>);

impl Word {
    pub fn empty() -> Word {
        Word(Vec::new())
    }

    pub fn gen(g: usize) -> Word {
        Word(vec![Letter::new(g, false)])
    }

    /// `g^e`.
    pub fn power(g: usize, e: i64) -> Word {
        let l = Letter::new(g, e < 0);
        Word(vec![l; e.unsigned_abs() as usize])
    }

    /// Builds a word from `(generator, exponent)` syllables.
    pub fn from_syllables(s: &[(usize, i64)]) -> Word {
        let mut w = Word::empty();
        for &(g, e) in s {
            w = w.concat(&Word::power(g, e));
        }
        w
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn letters(&self) -> &[Letter] {
        &self.0
    }

    pub fn inverse(&self) -> Word {
        Word(self.0.iter().rev().map(|l| l.inverse()).collect())
    }

    pub fn concat(&self, o: &Word) -> Word {
        let mut v = self.0.clone();
        v.extend_from_slice(&o.0);
        Word(v)
    }

    pub fn pow(&self, e: i64) -> Word {
        let base = if e < 0 { self.inverse() } else { self.clone() };
        let mut v = Vec::with_capacity(base.len() * e.unsigned_abs() as usize);
        for _ in 0..e.unsigned_abs() {
            v.extend_from_slice(&base.0);
        }
        Word(v)
    }

    pub fn free_reduce(&self) -> Word {
        let mut out: Vec<Letter> = Vec::with_capacity(self.0.len());
        for &l in &self.0 {
            if out.last() == Some(&l.inverse()) {
                out.pop();
            } else {
                out.push(l);
            }
        }
        Word(out)
    }

    /// Free reduction followed by cancellation of the ends against each other.
    pub fn cyclic_reduce(&self) -> Word {
        let w = self.free_reduce().0;
        let (mut i, mut j) = (0, w.len());
        while j - i >= 2 && w[i] == w[j - 1].inverse() {
            i += 1;
            j -= 1;
        }
        Word(w[i..j].to_vec())
    }

    pub fn exponent_sum(&self, g: usize) -> i64 {
        self.0
            .iter()
            .filter(|l| l.gen == g)
            .map(|l| if l.inv { -1 } else { 1 })
            .sum()
    }

    pub fn occurrences(&self, g: usize) -> usize {
        self.0.iter().filter(|l| l.gen == g).count()
    }

    pub fn contains_gen(&self, g: usize) -> bool {
        self.0.iter().any(|l| l.gen == g)
    }

    /// Replaces every occurrence of `g` by `val` (and `g^-1` by its inverse).
    pub fn substitute(&self, g: usize, val: &Word) -> Word {
        let inv = val.inverse();
        let mut v = Vec::with_capacity(self.len());
        for &l in &self.0 {
            if l.gen == g {
                v.extend_from_slice(if l.inv { &inv.0 } else { &val.0 });
            } else {
                v.push(l);
            }
        }
        Word(v)
    }

    pub fn map_gens(&self, f: impl Fn(usize) -> usize) -> Word {
        Word(self.0.iter().map(|l| Letter::new(f(l.gen), l.inv)).collect())
    }

    /// Least representative among the cyclic rotations of the word and of its
    /// inverse. Two cyclically reduced relators define the same normal
    /// subgroup generator up to conjugacy and inversion iff these agree.
    pub fn cyclic_key(&self) -> Word {
        let w = self.cyclic_reduce();
        if w.is_empty() {
            return w;
        }
        let winv = w.inverse();
        let mut best: Option<Vec<Letter>> = None;
        for base in [&w.0, &winv.0] {
            let n = base.len();
            for r in 0..n {
                let cand: Vec<Letter> = base[r..].iter().chain(&base[..r]).copied().collect();
                if best.as_ref().map_or(true, |b| cand < *b) {
                    best = Some(cand);
                }
            }
        }
        Word(best.unwrap_or_default())
    }
}

/// Free reduction as a free function.
pub fn free_reduce(w: &Word) -> Word {
    w.free_reduce()
}

/// A finite presentation, optionally carrying a distinguished meridian.
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct Presentation {
    pub gens: Vec<GenSym>,
    pub rels: Vec<Word>,
    pub meridian: Option<usize>,
}

impl Presentation {
    pub fn new() -> Self {
        Self::default()
    }

    pub fn add_gen(&mut self, name: impl Into<String>, origin: GenOrigin) -> usize {
        let name = name.into();
        debug_assert!(self.gen_index(&name).is_none(), "duplicate generator {name}");
        self.gens.push(GenSym::new(name, origin));
        self.gens.len() - 1
    }

    pub fn add_rel(&mut self, w: Word) {
        self.rels.push(w.free_reduce());
    }

    pub fn with_rel(&self, w: Word) -> Presentation {
        let mut p = self.clone();
        p.add_rel(w);
        p
    }

    pub fn gen_index(&self, name: &str) -> Option<usize> {
        self.gens.iter().position(|g| g.name == name)
    }

    pub fn num_gens(&self) -> usize {
        self.gens.len()
    }

    pub fn deficiency(&self) -> i64 {
        self.gens.len() as i64 - self.rels.len() as i64
    }

    /// True when the presentation is `<mu | >` with `mu` the meridian.
    pub fn is_meridian_only(&self) -> bool {
        self.gens.len() == 1 && self.rels.is_empty() && self.meridian == Some(0)
    }

    pub fn format_word(&self, w: &Word) -> String {
        format_word_with(w, |g| self.gens[g].name.as_str())
    }
}

fn format_word_with<'a>(w: &Word, name: impl Fn(usize) -> &'a str) -> String {
    if w.is_empty() {
        return "1".to_string();
    }
    let mut parts = Vec::new();
    let mut i = 0;
    let l = &w.0;
    while i < l.len() {
        let mut j = i;
        while j < l.len() && l[j] == l[i] {
            j += 1;
        }
        let e = (j - i) as i64 * if l[i].inv { -1 } else { 1 };
        let n = name(l[i].gen);
        parts.push(if e == 1 { n.to_string() } else { format!("{n}^{e}") });
        i = j;
    }
    parts.join("*")
}

impl fmt::Display for Presentation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let gens: Vec<&str> = self.gens.iter().map(|g| g.name.as_str()).collect();
        let rels: Vec<String> = self.rels.iter().map(|r| self.format_word(r)).collect();
        write!(f, "gens: {} ; rels: {}", gens.join(","), rels.join(", "))
    }
}

fn valid_name(s: &str) -> bool {
    let mut c = s.chars();
    matches!(c.next(), Some(ch) if ch.is_ascii_alphabetic() || ch == '_')
        && c.all(|ch| ch.is_ascii_alphanumeric() || ch == '_')
}

/// Parses a word such as `x^2*mu^-3*x^-1` against the generators of `p`.
/// `col0` is the column of the first character, used for error positions.
pub fn parse_word(p: &Presentation, text: &str) -> Result<Word> {
    parse_word_at(p, text, 1)
}

fn parse_word_at(p: &Presentation, text: &str, col0: usize) -> Result<Word> {
    let t = text.trim();
    let lead = text.len() - text.trim_start().len();
    if t == "1" || t.is_empty() {
        return Ok(Word::empty());
    }
    let mut w = Word::empty();
    let mut off = lead;
    for tok in t.split('*') {
        let col = col0 + off;
        off += tok.len() + 1;
        let tok_t = tok.trim();
        let (name, exp) = match tok_t.split_once('^') {
            Some((n, e)) => {
                let e: i64 = e
                    .trim()
                    .parse()
                    .map_err(|_| Error::syntax(1, col, format!("bad exponent in `{tok_t}`")))?;
                (n.trim(), e)
            }
            None => (tok_t, 1),
        };
        let g = p
            .gen_index(name)
            .ok_or_else(|| Error::syntax(1, col, format!("unknown generator `{name}`")))?;
        w = w.concat(&Word::power(g, exp));
    }
    Ok(w)
}

/// Parses `gens: x,y,mu ; rels: x^2*mu^3*x^-1*mu^-3, ...`.
/// If a generator is named by `meridian` it becomes the distinguished meridian.
pub fn parse_presentation(text: &str, meridian: Option<&str>) -> Result<Presentation> {
    let text = text.trim_end();
    let (gpart, rpart) = match text.split_once(';') {
        Some((a, b)) => (a, b),
        None => (text, ""),
    };
    let gl = gpart.trim_start();
    let gbody = gl
        .strip_prefix("gens:")
        .ok_or_else(|| Error::syntax(1, 1, "expected `gens:`"))?;
    let mut p = Presentation::new();
    let mut col = gpart.len() - gl.len() + 6;
    for name in gbody.split(',') {
        let n = name.trim();
        if !n.is_empty() {
            if !valid_name(n) {
                return Err(Error::syntax(1, col, format!("bad generator name `{n}`")));
            }
            if p.gen_index(n).is_some() {
                return Err(Error::syntax(1, col, format!("duplicate generator `{n}`")));
            }
            let origin = if Some(n) == meridian { GenOrigin::Meridian } else { GenOrigin::Fresh };
            p.add_gen(n, origin);
        }
        col += name.len() + 1;
    }
    let rbase = gpart.len() + 2;
    let rl = rpart.trim_start();
    if !rl.is_empty() {
        let rbody = rl
            .strip_prefix("rels:")
            .ok_or_else(|| Error::syntax(1, rbase + rpart.len() - rl.len(), "expected `rels:`"))?;
        let mut col = rbase + rpart.len() - rl.len() + 5;
        for r in rbody.split(',') {
            if !r.trim().is_empty() {
                let w = parse_word_at(&p, r, col)?;
                p.add_rel(w);
            }
            col += r.len() + 1;
        }
    }
    if let Some(m) = meridian {
        let i = p
            .gen_index(m)
            .ok_or_else(|| Error::input(format!("meridian `{m}` is not a generator")))?;
        p.meridian = Some(i);
    }
    Ok(p)
}

fn normalize_rels(rels: &mut Vec<Word>) {
    let mut seen = HashSet::new();
    let mut out = Vec::with_capacity(rels.len());
    for r in rels.drain(..) {
        let c = r.cyclic_reduce();
        if c.is_empty() {
            continue;
        }
        if seen.insert(c.cyclic_key()) {
            out.push(c);
        }
    }
    *rels = out;
}

/// Result of a bounded Tietze run.
#[derive(Clone, Debug)]
pub struct TietzeOutcome {
    pub presentation: Presentation,
    /// The output has no generators and no relators.
    pub certificate: bool,
    pub steps: usize,
    pub exhausted: bool,
}

pub const DEFAULT_BUDGET: usize = 10_000;

/// Bounded, deterministic Tietze simplification.
///
/// Relators are freely and cyclically reduced, trivial ones dropped and
/// duplicates (up to rotation and inversion) removed. Then, repeatedly, a
/// non-meridian generator occurring exactly once in some relator is solved
/// for and eliminated; the shortest relator is tried first, ties broken
/// lexicographically, and within a relator the lowest generator index wins.
pub fn tietze_simplify(p: &Presentation, budget: usize) -> (Presentation, bool) {
    let o = tietze_run(p, budget);
    (o.presentation, o.certificate)
}

pub fn tietze_run(p: &Presentation, budget: usize) -> TietzeOutcome {
    let mut gens = p.gens.clone();
    let mut rels = p.rels.clone();
    let mut meridian = p.meridian;
    let mut steps = 0;
    let mut exhausted = false;
    loop {
        normalize_rels(&mut rels);
        let mut order: Vec<usize> = (0..rels.len()).collect();
        order.sort_by(|&a, &b| rels[a].len().cmp(&rels[b].len()).then(rels[a].cmp(&rels[b])));
        let mut pick = None;
        'outer: for &ri in &order {
            let r = &rels[ri];
            let mut cands: Vec<usize> = r.0.iter().map(|l| l.gen).collect();
            cands.sort_unstable();
            cands.dedup();
            for g in cands {
                if Some(g) != meridian && r.occurrences(g) == 1 {
                    pick = Some((ri, g));
                    break 'outer;
                }
            }
        }
        let Some((ri, g)) = pick else { break };
        if steps >= budget {
            exhausted = true;
            break;
        }
        steps += 1;
        let r = rels.swap_remove(ri);
        let pos = r.0.iter().position(|l| l.gen == g).expect("generator occurs");
        let u = Word(r.0[..pos].to_vec());
        let v = Word(r.0[pos + 1..].to_vec());
        let val = if r.0[pos].inv {
            v.concat(&u)
        } else {
            v.concat(&u).inverse()
        }
        .free_reduce();
        for w in rels.iter_mut() {
            if w.contains_gen(g) {
                *w = w.substitute(g, &val).free_reduce();
            }
        }
        gens.remove(g);
        let shift = |h: usize| if h > g { h - 1 } else { h };
        for w in rels.iter_mut() {
            *w = w.map_gens(shift);
        }
        meridian = meridian.map(shift);
    }
    normalize_rels(&mut rels);
    let certificate = gens.is_empty() && rels.is_empty();
    TietzeOutcome {
        presentation: Presentation { gens, rels, meridian },
        certificate,
        steps,
        exhausted,
    }
}

fn canonical_gen_name(i: usize) -> String {
    match i {
        0 => "x".into(),
        1 => "y".into(),
        2 => "z".into(),
        _ => format!("a{}", i - 2),
    }
}

/// Renames generators (non-meridian ones in order to `x, y, z, a1, ...`, the
/// meridian to `mu` placed last) and replaces every relator by its
/// [`Word::cyclic_key`], sorted. Equal canonical forms mean the presentations
/// agree up to this renaming, conjugation and inversion of relators.
pub fn canonical_form(p: &Presentation) -> Presentation {
    let n = p.gens.len();
    let mut map = vec![0; n];
    let mut gens = Vec::with_capacity(n);
    let mut k = 0;
    for (i, slot) in map.iter_mut().enumerate() {
        if Some(i) != p.meridian {
            *slot = k;
            gens.push(GenSym::new(canonical_gen_name(k), GenOrigin::Fresh));
            k += 1;
        }
    }
    let mut meridian = None;
    if let Some(m) = p.meridian {
        map[m] = k;
        gens.push(GenSym::new("mu", GenOrigin::Meridian));
        meridian = Some(k);
    }
    let mut rels: Vec<Word> = p
        .rels
        .iter()
        .map(|r| r.map_gens(|g| map[g]).cyclic_key())
        .filter(|r| !r.is_empty())
        .collect();
    rels.sort();
    rels.dedup();
    Presentation { gens, rels, meridian }
}

/// A formal integer combination of group words (an element of the integral
/// group ring, with words kept freely reduced).
#[derive(Clone, Debug, Default, PartialEq, Eq)]
pub struct FoxSum(pub BTreeMap<Word, i64>);

impl FoxSum {
    pub fn add_term(&mut self, w: Word, c: i64) {
        let w = w.free_reduce();
        let e = self.0.entry(w.clone()).or_insert(0);
        *e += c;
        if *e == 0 {
            self.0.remove(&w);
        }
    }

    pub fn add(&self, o: &FoxSum) -> FoxSum {
        let mut s = self.clone();
        for (w, &c) in &o.0 {
            s.add_term(w.clone(), c);
        }
        s
    }

    /// Left multiplication by a group element.
    pub fn left_mul(&self, u: &Word) -> FoxSum {
        let mut s = FoxSum::default();
        for (w, &c) in &self.0 {
            s.add_term(u.concat(w), c);
        }
        s
    }

    pub fn terms(&self) -> impl Iterator<Item = (&Word, i64)> {
        self.0.iter().map(|(w, &c)| (w, c))
    }
}

/// The Fox derivative of `w` with respect to generator `g`.
pub fn fox_derivative(w: &Word, g: usize) -> FoxSum {
    let mut s = FoxSum::default();
    let l = &w.0;
    for i in 0..l.len() {
        if l[i].gen != g {
            continue;
        }
        if l[i].inv {
            s.add_term(Word(l[..=i].to_vec()), -1);
        } else {
            s.add_term(Word(l[..i].to_vec()), 1);
        }
    }
    s
}
