//! Integer matrices, Smith normal form and abelianization.

use std::fmt;

use num_bigint::BigInt;
use num_integer::Integer;
use num_traits::{One, Signed, Zero};
use serde::Serialize;

use crate::fp_group::{Presentation, Word};

#[derive(Clone, Debug, PartialEq, Eq)]
pub struct IntMatrix {
    pub rows: usize,
    pub cols: usize,
    data: Vec<BigInt>,
}

impl IntMatrix {
    pub fn zeros(rows: usize, cols: usize) -> Self {
        IntMatrix { rows, cols, data: vec![BigInt::zero(); rows * cols] }
    }

    pub fn identity(n: usize) -> Self {
        let mut m = Self::zeros(n, n);
        for i in 0..n {
            m.set(i, i, BigInt::one());
        }
        m
    }

    pub fn from_rows<T: Into<BigInt> + Clone>(rows: &[Vec<T>]) -> Self {
        let r = rows.len();
        let c = rows.first().map_or(0, |x| x.len());
        let mut m = Self::zeros(r, c);
        for (i, row) in rows.iter().enumerate() {
            assert_eq!(row.len(), c, "ragged matrix");
            for (j, v) in row.iter().enumerate() {
                m.set(i, j, v.clone().into());
            }
        }
        m
    }

    pub fn get(&self, i: usize, j: usize) -> &BigInt {
        &self.data[i * self.cols + j]
    }

    pub fn set(&mut self, i: usize, j: usize, v: BigInt) {
        self.data[i * self.cols + j] = v;
    }

    pub fn mul(&self, o: &IntMatrix) -> IntMatrix {
        assert_eq!(self.cols, o.rows);
        let mut m = IntMatrix::zeros(self.rows, o.cols);
        for i in 0..self.rows {
            for k in 0..self.cols {
                let a = self.get(i, k);
                if a.is_zero() {
                    continue;
                }
                for j in 0..o.cols {
                    let v = m.get(i, j) + a * o.get(k, j);
                    m.set(i, j, v);
                }
            }
        }
        m
    }

    /// Determinant by fraction-free Bareiss elimination. Square only.
    pub fn det(&self) -> BigInt {
        assert_eq!(self.rows, self.cols);
        let n = self.rows;
        if n == 0 {
            return BigInt::one();
        }
        let mut a = self.clone();
        let mut sign = BigInt::one();
        let mut prev = BigInt::one();
        for k in 0..n {
            if a.get(k, k).is_zero() {
                let Some(p) = (k + 1..n).find(|&i| !a.get(i, k).is_zero()) else {
                    return BigInt::zero();
                };
                a.swap_rows(k, p);
                sign = -sign;
            }
            for i in k + 1..n {
                for j in k + 1..n {
                    let v = (a.get(i, j) * a.get(k, k) - a.get(i, k) * a.get(k, j)) / &prev;
                    a.set(i, j, v);
                }
            }
            prev = a.get(k, k).clone();
        }
        sign * a.get(n - 1, n - 1)
    }

    fn swap_rows(&mut self, a: usize, b: usize) {
        if a != b {
            for j in 0..self.cols {
                self.data.swap(a * self.cols + j, b * self.cols + j);
            }
        }
    }

    fn swap_cols(&mut self, a: usize, b: usize) {
        if a != b {
            for i in 0..self.rows {
                self.data.swap(i * self.cols + a, i * self.cols + b);
            }
        }
    }

    /// row[dst] += k * row[src]
    fn add_row(&mut self, dst: usize, src: usize, k: &BigInt) {
        for j in 0..self.cols {
            let v = self.get(dst, j) + k * self.get(src, j);
            self.set(dst, j, v);
        }
    }

    /// col[dst] += k * col[src]
    fn add_col(&mut self, dst: usize, src: usize, k: &BigInt) {
        for i in 0..self.rows {
            let v = self.get(i, dst) + k * self.get(i, src);
            self.set(i, dst, v);
        }
    }

    fn negate_row(&mut self, r: usize) {
        for j in 0..self.cols {
            let v = -self.get(r, j);
            self.set(r, j, v);
        }
    }

    pub fn transpose(&self) -> IntMatrix {
        let mut m = IntMatrix::zeros(self.cols, self.rows);
        for i in 0..self.rows {
            for j in 0..self.cols {
                m.set(j, i, self.get(i, j).clone());
            }
        }
        m
    }
}

#[derive(Clone, Debug)]
pub struct SnfResult {
    pub s: IntMatrix,
    pub u: IntMatrix,
    pub v: IntMatrix,
}

impl SnfResult {
    pub fn diagonal(&self) -> Vec<BigInt> {
        (0..self.s.rows.min(self.s.cols)).map(|i| self.s.get(i, i).clone()).collect()
    }
}

/// Smith normal form with transforms: `u * m * v == s`.
pub fn snf(m: &IntMatrix) -> SnfResult {
    let (r, c) = (m.rows, m.cols);
    let mut s = m.clone();
    let mut u = IntMatrix::identity(r);
    let mut v = IntMatrix::identity(c);
    for t in 0..r.min(c) {
        loop {
            let mut best: Option<(usize, usize)> = None;
            for i in t..r {
                for j in t..c {
                    let x = s.get(i, j);
                    if !x.is_zero()
                        && best.map_or(true, |(bi, bj)| x.abs() < s.get(bi, bj).abs())
                    {
                        best = Some((i, j));
                    }
                }
            }
            let Some((pi, pj)) = best else {
                debug_check(m, &u, &v, &s);
                return SnfResult { s, u, v };
            };
            s.swap_rows(t, pi);
            u.swap_rows(t, pi);
            s.swap_cols(t, pj);
            v.swap_cols(t, pj);
            let mut clean = true;
            for i in t + 1..r {
                if s.get(i, t).is_zero() {
                    continue;
                }
                let q = -(s.get(i, t) / s.get(t, t));
                s.add_row(i, t, &q);
                u.add_row(i, t, &q);
                clean &= s.get(i, t).is_zero();
            }
            for j in t + 1..c {
                if s.get(t, j).is_zero() {
                    continue;
                }
                let q = -(s.get(t, j) / s.get(t, t));
                s.add_col(j, t, &q);
                v.add_col(j, t, &q);
                clean &= s.get(t, j).is_zero();
            }
            if !clean {
                continue;
            }
            let p = s.get(t, t).clone();
            let bad = (t + 1..r).find(|&i| (t + 1..c).any(|j| !s.get(i, j).is_multiple_of(&p)));
            match bad {
                Some(i) => {
                    s.add_row(t, i, &BigInt::one());
                    u.add_row(t, i, &BigInt::one());
                }
                None => break,
            }
        }
        if s.get(t, t).is_negative() {
            s.negate_row(t);
            u.negate_row(t);
        }
    }
    debug_check(m, &u, &v, &s);
    SnfResult { s, u, v }
}

fn debug_check(m: &IntMatrix, u: &IntMatrix, v: &IntMatrix, s: &IntMatrix) {
    debug_assert!(u.mul(m).mul(v) == *s, "smith normal form identity failed");
}

/// A finitely generated abelian group `Z^rank + sum Z/t_i`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize)]
pub struct AbelianGroup {
    pub rank: usize,
    #[serde(serialize_with = "ser_bigints")]
    pub torsion: Vec<BigInt>,
}

fn ser_bigints<S: serde::Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
    use serde::ser::SerializeSeq;
    let mut seq = s.serialize_seq(Some(v.len()))?;
    for x in v {
        seq.serialize_element(&x.to_string())?;
    }
    seq.end()
}

impl AbelianGroup {
    pub fn trivial() -> Self {
        AbelianGroup { rank: 0, torsion: vec![] }
    }

    pub fn is_trivial(&self) -> bool {
        self.rank == 0 && self.torsion.is_empty()
    }

    pub fn is_infinite_cyclic(&self) -> bool {
        self.rank == 1 && self.torsion.is_empty()
    }

    pub fn cyclic(n: u64) -> Self {
        match n {
            0 => AbelianGroup { rank: 1, torsion: vec![] },
            1 => AbelianGroup::trivial(),
            _ => AbelianGroup { rank: 0, torsion: vec![BigInt::from(n)] },
        }
    }
}

impl fmt::Display for AbelianGroup {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        let mut parts = Vec::new();
        match self.rank {
            0 => {}
            1 => parts.push("Z".to_string()),
            r => parts.push(format!("Z^{r}")),
        }
        for t in &self.torsion {
            parts.push(format!("Z/{t}"));
        }
        if parts.is_empty() {
            write!(f, "0")
        } else {
            write!(f, "{}", parts.join(" + "))
        }
    }
}

/// The abelianization together with coordinates of each generator.
///
/// The group is `prod Z/moduli[i]` where a modulus of zero stands for `Z`;
/// trivial factors are dropped. `images[g]` holds the reduced coordinates of
/// generator `g`.
#[derive(Clone, Debug)]
pub struct Abelianization {
    pub group: AbelianGroup,
    pub moduli: Vec<BigInt>,
    pub images: Vec<Vec<BigInt>>,
}

impl Abelianization {
    pub fn reduce(&self, mut c: Vec<BigInt>) -> Vec<BigInt> {
        for (x, d) in c.iter_mut().zip(&self.moduli) {
            if !d.is_zero() {
                *x = x.mod_floor(d);
            }
        }
        c
    }

    /// Coordinates of the class of a word.
    pub fn class_of(&self, w: &Word) -> Vec<BigInt> {
        let mut c = vec![BigInt::zero(); self.moduli.len()];
        for l in w.letters() {
            for (k, x) in c.iter_mut().enumerate() {
                if l.inv {
                    *x -= &self.images[l.gen][k];
                } else {
                    *x += &self.images[l.gen][k];
                }
            }
        }
        self.reduce(c)
    }

    pub fn is_zero_class(&self, w: &Word) -> bool {
        self.class_of(w).iter().all(Zero::is_zero)
    }

    /// Order of the class of `w`; `None` when it has infinite order.
    pub fn order_of(&self, w: &Word) -> Option<BigInt> {
        let c = self.class_of(w);
        let mut ord = BigInt::one();
        for (x, d) in c.iter().zip(&self.moduli) {
            if x.is_zero() {
                continue;
            }
            if d.is_zero() {
                return None;
            }
            let o = d / x.gcd(d);
            ord = ord.lcm(&o);
        }
        Some(ord)
    }
}

/// The exponent-sum matrix: one row per relator, one column per generator.
pub fn relation_matrix(p: &Presentation) -> IntMatrix {
    let mut m = IntMatrix::zeros(p.rels.len(), p.gens.len());
    for (i, r) in p.rels.iter().enumerate() {
        for l in r.letters() {
            let v = m.get(i, l.gen) + if l.inv { -1 } else { 1 };
            m.set(i, l.gen, v);
        }
    }
    m
}

pub fn abelianize(p: &Presentation) -> Abelianization {
    let n = p.gens.len();
    let m = relation_matrix(p);
    let res = snf(&m);
    let diag = res.diagonal();
    let mut moduli = Vec::new();
    let mut keep = Vec::new();
    for j in 0..n {
        let d = diag.get(j).cloned().unwrap_or_else(BigInt::zero);
        if !d.is_one() {
            moduli.push(d);
            keep.push(j);
        }
    }
    let mut images = Vec::with_capacity(n);
    for g in 0..n {
        let row: Vec<BigInt> = keep.iter().map(|&j| res.v.get(g, j).clone()).collect();
        images.push(row);
    }
    let rank = moduli.iter().filter(|d| d.is_zero()).count();
    let mut torsion: Vec<BigInt> = moduli.iter().filter(|d| !d.is_zero()).cloned().collect();
    torsion.sort();
    let mut ab = Abelianization { group: AbelianGroup { rank, torsion }, moduli, images };
    ab.images = ab.images.iter().map(|c| ab.reduce(c.clone())).collect();
    ab
}

/// The abelianization of `p` as an abstract group.
pub fn abelianization(p: &Presentation) -> AbelianGroup {
    abelianize(p).group
}

/// `H_1(p)` is infinite cyclic and killing `w` kills it.
pub fn is_z_generated_by(p: &Presentation, w: &Word) -> bool {
    abelianization(p).is_infinite_cyclic() && abelianization(&p.with_rel(w.clone())).is_trivial()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fp_group::parse_presentation;

    fn diag(rows: &[Vec<i64>]) -> Vec<BigInt> {
        snf(&IntMatrix::from_rows(rows)).diagonal()
    }

    #[test]
    fn snf_examples() {
        let z = snf(&IntMatrix::zeros(2, 3));
        assert_eq!(z.u, IntMatrix::identity(2));
        assert_eq!(z.v, IntMatrix::identity(3));
        assert_eq!(diag(&[vec![2, 0], vec![0, 3]]), vec![1.into(), 6.into()]);
        assert_eq!(diag(&[vec![4, 6], vec![2, 8]]), vec![2.into(), 10.into()]);
    }

    #[test]
    fn det_small() {
        let m = IntMatrix::from_rows(&[vec![0, 1, 2], vec![3, 4, 5], vec![6, 7, 9]]);
        assert_eq!(m.det(), BigInt::from(-3));
    }

    #[test]
    fn abelianization_examples() {
        let p = parse_presentation("gens: x ; rels: x^2", None).unwrap();
        assert_eq!(abelianization(&p).to_string(), "Z/2");
        let p = parse_presentation("gens: x,y ; rels: x*y*x^-2*y^-2", None).unwrap();
        assert!(abelianization(&p).is_infinite_cyclic());
    }

    #[test]
    fn generated_by_examples() {
        let p = parse_presentation("gens: x,y,g ; rels: g^2*y, x*y*x^-2*y^-1", None).unwrap();
        assert!(is_z_generated_by(&p, &Word::gen(2)));
        let p = parse_presentation("gens: x,y,g ; rels: g*x*y*x^-1*y^-1, x, y", None).unwrap();
        assert!(!is_z_generated_by(&p, &Word::gen(2)));
        let p = parse_presentation("gens: g", None).unwrap();
        assert!(is_z_generated_by(&p, &Word::gen(0)));
    }

    #[test]
    fn orders() {
        let p = parse_presentation("gens: x,y ; rels: x^4, y^6", None).unwrap();
        let ab = abelianize(&p);
        assert_eq!(ab.order_of(&Word::gen(0)), Some(4.into()));
        assert_eq!(ab.order_of(&Word::power(1, 2)), Some(3.into()));
        assert_eq!(ab.group.to_string(), "Z/2 + Z/12");
    }
}
