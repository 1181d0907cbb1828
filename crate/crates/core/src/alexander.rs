//! Integer Laurent polynomials and Alexander polynomials via Fox calculus.

use std::collections::{BTreeMap, HashMap};
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_bigint::BigInt;
use num_traits::{One, Signed, ToPrimitive, Zero};

use crate::error::{Error, Result};
use crate::fp_group::{fox_derivative, Presentation, Word};
use crate::homology::abelianize;

/// A Laurent polynomial in `t` with integer coefficients. Zero coefficients
/// are never stored.
#[derive(Clone, Debug, Default, PartialEq, Eq, Hash)]
pub struct LaurentPoly {
    terms: BTreeMap<i64, BigInt>,
}

impl LaurentPoly {
    pub fn zero() -> Self {
        Self::default()
    }

    pub fn one() -> Self {
        Self::monomial(1, 0)
    }

    /// `c t^e`.
    pub fn monomial(c: impl Into<BigInt>, e: i64) -> Self {
        let mut p = Self::zero();
        p.add_term(e, c.into());
        p
    }

    /// From `(coefficient, exponent)` pairs.
    pub fn from_terms(terms: &[(i64, i64)]) -> Self {
        let mut p = Self::zero();
        for &(c, e) in terms {
            p.add_term(e, BigInt::from(c));
        }
        p
    }

    pub fn add_term(&mut self, e: i64, c: BigInt) {
        let v = self.terms.remove(&e).unwrap_or_else(BigInt::zero) + c;
        if !v.is_zero() {
            self.terms.insert(e, v);
        }
    }

    pub fn is_zero(&self) -> bool {
        self.terms.is_empty()
    }

    pub fn terms(&self) -> impl Iterator<Item = (i64, &BigInt)> {
        self.terms.iter().map(|(&e, c)| (e, c))
    }

    pub fn coefficient(&self, e: i64) -> BigInt {
        self.terms.get(&e).cloned().unwrap_or_else(BigInt::zero)
    }

    pub fn min_exp(&self) -> Option<i64> {
        self.terms.keys().next().copied()
    }

    pub fn max_exp(&self) -> Option<i64> {
        self.terms.keys().next_back().copied()
    }

    pub fn eval_one(&self) -> BigInt {
        self.terms.values().sum()
    }

    /// `p(t^-1)`.
    pub fn mirror(&self) -> Self {
        LaurentPoly { terms: self.terms.iter().map(|(&e, c)| (-e, c.clone())).collect() }
    }

    pub fn shift(&self, k: i64) -> Self {
        LaurentPoly { terms: self.terms.iter().map(|(&e, c)| (e + k, c.clone())).collect() }
    }

    /// Multiplies by the unit `+-t^k` giving lowest exponent 0 and a positive
    /// lowest coefficient.
    pub fn unit_normalize(&self) -> Self {
        let Some(lo) = self.min_exp() else { return Self::zero() };
        let s = self.shift(-lo);
        if s.terms[&0].is_negative() {
            -s
        } else {
            s
        }
    }

    /// Equality up to units and the substitution `t -> t^-1`.
    pub fn eq_up_to_units(&self, o: &LaurentPoly) -> bool {
        let a = self.unit_normalize();
        let b = o.unit_normalize();
        a == b || a.mirror().unit_normalize() == b
    }
}

impl Add for &LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, o: &LaurentPoly) -> LaurentPoly {
        let mut p = self.clone();
        for (&e, c) in &o.terms {
            p.add_term(e, c.clone());
        }
        p
    }
}

impl Add for LaurentPoly {
    type Output = LaurentPoly;
    fn add(self, o: LaurentPoly) -> LaurentPoly {
        &self + &o
    }
}

impl Neg for LaurentPoly {
    type Output = LaurentPoly;
    fn neg(self) -> LaurentPoly {
        LaurentPoly { terms: self.terms.into_iter().map(|(e, c)| (e, -c)).collect() }
    }
}

impl Sub for LaurentPoly {
    type Output = LaurentPoly;
    fn sub(self, o: LaurentPoly) -> LaurentPoly {
        &self + &(-o)
    }
}

impl Mul for &LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, o: &LaurentPoly) -> LaurentPoly {
        let mut p = LaurentPoly::zero();
        for (&e1, c1) in &self.terms {
            for (&e2, c2) in &o.terms {
                p.add_term(e1 + e2, c1 * c2);
            }
        }
        p
    }
}

impl Mul for LaurentPoly {
    type Output = LaurentPoly;
    fn mul(self, o: LaurentPoly) -> LaurentPoly {
        &self * &o
    }
}

impl fmt::Display for LaurentPoly {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (&e, c) in &self.terms {
            let neg = c.is_negative();
            let a = c.abs();
            let mono = match e {
                0 => String::new(),
                1 => "t".to_string(),
                _ => format!("t^{e}"),
            };
            let body = if mono.is_empty() {
                a.to_string()
            } else if a.is_one() {
                mono
            } else {
                format!("{a}{mono}")
            };
            if first {
                write!(f, "{}{body}", if neg { "-" } else { "" })?;
                first = false;
            } else {
                write!(f, " {} {body}", if neg { "-" } else { "+" })?;
            }
        }
        Ok(())
    }
}

/// Images of the generators in `H_1 = Z`, scaled so the meridian maps to 1.
pub fn meridian_map(p: &Presentation) -> Result<Vec<i64>> {
    let mu = p.meridian.ok_or_else(|| Error::input("presentation has no meridian"))?;
    let ab = abelianize(p);
    if !ab.group.is_infinite_cyclic() {
        return Err(Error::input(format!("H1 is {}, not infinite cyclic", ab.group)));
    }
    let k = ab
        .moduli
        .iter()
        .position(Zero::is_zero)
        .expect("rank one has a free coordinate");
    let m = &ab.images[mu][k];
    let sign = if m.is_one() {
        1
    } else if *m == -BigInt::one() {
        -1
    } else {
        return Err(Error::input("the meridian does not generate H1"));
    };
    ab.images
        .iter()
        .map(|c| {
            c[k].to_i64()
                .map(|v| v * sign)
                .ok_or_else(|| Error::input("H1 coordinate out of range"))
        })
        .collect()
}

fn push_forward(w: &Word, phi: &[i64]) -> i64 {
    w.letters().iter().map(|l| if l.inv { -phi[l.gen] } else { phi[l.gen] }).sum()
}

/// Fox matrix of `p` (rows relators, columns generators) pushed to `Z[t, t^-1]`.
pub fn fox_matrix(p: &Presentation, phi: &[i64]) -> Vec<Vec<LaurentPoly>> {
    p.rels
        .iter()
        .map(|r| {
            (0..p.num_gens())
                .map(|g| {
                    let mut e = LaurentPoly::zero();
                    for (w, c) in fox_derivative(r, g).terms() {
                        e.add_term(push_forward(w, phi), BigInt::from(c));
                    }
                    e
                })
                .collect()
        })
        .collect()
}

/// Determinant by expansion over column subsets.
pub fn det(m: &[Vec<LaurentPoly>]) -> LaurentPoly {
    let n = m.len();
    if n == 0 {
        return LaurentPoly::one();
    }
    assert!(n < 24, "matrix too large");
    let mut layer: HashMap<u32, LaurentPoly> = HashMap::from([(0, LaurentPoly::one())]);
    for row in m {
        let mut next: HashMap<u32, LaurentPoly> = HashMap::new();
        for (&mask, acc) in &layer {
            for (j, entry) in row.iter().enumerate() {
                if mask & (1 << j) != 0 || entry.is_zero() {
                    continue;
                }
                let above = (mask >> (j + 1)).count_ones();
                let mut term = acc * entry;
                if above % 2 == 1 {
                    term = -term;
                }
                let slot = next.entry(mask | (1 << j)).or_default();
                *slot = &*slot + &term;
            }
        }
        next.retain(|_, v| !v.is_zero());
        layer = next;
    }
    layer.remove(&((1u32 << n) - 1)).unwrap_or_default()
}

/// Alexander polynomial with the column of generator `col` deleted.
pub fn alexander_poly_deleting(p: &Presentation, col: usize) -> Result<LaurentPoly> {
    if p.deficiency() != 1 {
        return Err(Error::input(format!(
            "deficiency {} (need 1): {} generators, {} relators",
            p.deficiency(),
            p.num_gens(),
            p.rels.len()
        )));
    }
    let phi = meridian_map(p)?;
    let m: Vec<Vec<LaurentPoly>> = fox_matrix(p, &phi)
        .into_iter()
        .map(|row| row.into_iter().enumerate().filter(|&(j, _)| j != col).map(|(_, e)| e).collect())
        .collect();
    Ok(det(&m).unit_normalize())
}

/// Alexander polynomial of a deficiency-one presentation with meridian.
pub fn alexander_poly(p: &Presentation) -> Result<LaurentPoly> {
    let mu = p.meridian.ok_or_else(|| Error::input("presentation has no meridian"))?;
    alexander_poly_deleting(p, mu)
}

/// `2 - t^n` for `n > 0`, `1 - t^|n| + t^2|n|` for `n < 0`, normalized.
pub fn delta_kn(n: i64) -> LaurentPoly {
    let a = n.abs();
    if n > 0 {
        LaurentPoly::from_terms(&[(2, 0), (-1, a)]).unit_normalize()
    } else {
        LaurentPoly::from_terms(&[(1, 0), (-1, a), (1, 2 * a)])
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::fp_group::parse_presentation;

    #[test]
    fn arithmetic() {
        let a = LaurentPoly::from_terms(&[(2, 0), (-1, 1)]);
        assert_eq!((&a * &LaurentPoly::one()).to_string(), "2 - t");
        let b = LaurentPoly::from_terms(&[(-1, -1), (1, 0), (-1, 1)]);
        assert_eq!(b.unit_normalize().to_string(), "1 - t + t^2");
        let c = LaurentPoly::from_terms(&[(1, 0), (-1, 1)]) + LaurentPoly::monomial(1, 1);
        assert_eq!(c, LaurentPoly::one());
    }

    #[test]
    fn units_and_mirror() {
        let a = LaurentPoly::from_terms(&[(2, 0), (-1, 3)]);
        let b = LaurentPoly::from_terms(&[(-1, 0), (2, 3)]);
        assert!(a.eq_up_to_units(&b));
        assert_ne!(a.unit_normalize(), b.unit_normalize());
    }

    #[test]
    fn meridian_maps() {
        let p = parse_presentation("gens: x,mu ; rels: x^2*mu^3*x^-1*mu^-3", Some("mu")).unwrap();
        assert_eq!(meridian_map(&p).unwrap(), vec![0, 1]);
        let p = parse_presentation("gens: x,mu ; rels: x^2*mu^3*x^-1*mu^3", Some("mu")).unwrap();
        assert_eq!(meridian_map(&p).unwrap(), vec![-6, 1]);
        let p = parse_presentation("gens: mu", Some("mu")).unwrap();
        assert_eq!(meridian_map(&p).unwrap(), vec![1]);
        assert_eq!(alexander_poly(&p).unwrap(), LaurentPoly::one());
    }

    #[test]
    fn kn_polys() {
        let p = parse_presentation("gens: x,mu ; rels: x^2*mu*x^-1*mu^-1", Some("mu")).unwrap();
        assert_eq!(alexander_poly(&p).unwrap().to_string(), "2 - t");
        let p = parse_presentation("gens: x,mu ; rels: x^2*mu*x^-1*mu", Some("mu")).unwrap();
        assert!(alexander_poly(&p).unwrap().eq_up_to_units(&delta_kn(-1)));
    }

    #[test]
    fn deficiency_checked() {
        let p = parse_presentation("gens: x,mu ; rels: x, mu^2*x", Some("mu")).unwrap();
        assert!(alexander_poly(&p).is_err());
    }
}
