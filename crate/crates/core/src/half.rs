use std::fmt;
use std::ops::{Add, AddAssign, Mul, Neg, Sub, SubAssign};
use std::str::FromStr;

use serde::{Serialize, Serializer};

use crate::error::Error;

/// An exact half-integer, stored as a count of halves.
#[derive(Clone, Copy, Debug, Default, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct HalfInt {
    pub units: i64,
}

impl HalfInt {
    pub const ZERO: HalfInt = HalfInt { units: 0 };
    pub const HALF: HalfInt = HalfInt { units: 1 };

    pub fn from_units(units: i64) -> Self {
        HalfInt { units }
    }

    pub fn from_int(n: i64) -> Self {
        HalfInt { units: 2 * n }
    }

    pub fn is_integer(self) -> bool {
        self.units % 2 == 0
    }

    pub fn to_integer(self) -> Option<i64> {
        self.is_integer().then_some(self.units / 2)
    }

    pub fn is_zero(self) -> bool {
        self.units == 0
    }
}

impl fmt::Display for HalfInt {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_integer() {
            write!(f, "{}", self.units / 2)
        } else {
            write!(f, "{}/2", self.units)
        }
    }
}

impl FromStr for HalfInt {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self, Error> {
        let s = s.trim();
        let (num, den) = match s.split_once('/') {
            Some((a, b)) => (a.trim(), b.trim()),
            None => (s, "1"),
        };
        let num: i64 = num
            .parse()
            .map_err(|_| Error::input(format!("bad number `{s}`")))?;
        let den: i64 = den
            .parse()
            .map_err(|_| Error::input(format!("bad number `{s}`")))?;
        match den {
            1 => Ok(HalfInt::from_int(num)),
            2 => Ok(HalfInt::from_units(num)),
            -1 => Ok(HalfInt::from_int(-num)),
            -2 => Ok(HalfInt::from_units(-num)),
            0 => Err(Error::input("zero denominator")),
            d if num % d == 0 => Ok(HalfInt::from_int(num / d)),
            d if (2 * num) % d == 0 => Ok(HalfInt::from_units(2 * num / d)),
            _ => Err(Error::input("decoration must be half-integral")),
        }
    }
}

impl Serialize for HalfInt {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl Add for HalfInt {
    type Output = HalfInt;
    fn add(self, o: HalfInt) -> HalfInt {
        HalfInt::from_units(self.units + o.units)
    }
}

impl Sub for HalfInt {
    type Output = HalfInt;
    fn sub(self, o: HalfInt) -> HalfInt {
        HalfInt::from_units(self.units - o.units)
    }
}

impl Neg for HalfInt {
    type Output = HalfInt;
    fn neg(self) -> HalfInt {
        HalfInt::from_units(-self.units)
    }
}

impl Mul<i64> for HalfInt {
    type Output = HalfInt;
    fn mul(self, k: i64) -> HalfInt {
        HalfInt::from_units(self.units * k)
    }
}

impl AddAssign for HalfInt {
    fn add_assign(&mut self, o: HalfInt) {
        self.units += o.units;
    }
}

impl SubAssign for HalfInt {
    fn sub_assign(&mut self, o: HalfInt) {
        self.units -= o.units;
    }
}

impl std::iter::Sum for HalfInt {
    fn sum<I: Iterator<Item = HalfInt>>(it: I) -> HalfInt {
        it.fold(HalfInt::ZERO, |a, b| a + b)
    }
}
