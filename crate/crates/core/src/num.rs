//! Scalar helpers shared by every module: exact integers and rationals,
//! plus the `p/q` text form used by the file formats.

use std::fmt;
use std::ops::{Index, IndexMut};

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

pub type Int = BigInt;
pub type Rat = BigRational;

pub fn int(v: i64) -> Int {
    BigInt::from(v)
}

pub fn rat(n: i64, d: i64) -> Rat {
    Rat::new(int(n), int(d))
}

pub fn rat_int(v: &Int) -> Rat {
    Rat::from_integer(v.clone())
}

/// Parses `"p/q"`, `"p"` or `"-p/q"` into a normalized rational.
pub fn parse_rat(s: &str) -> Option<Rat> {
    let s = s.trim();
    let (n, d) = match s.split_once('/') {
        Some((n, d)) => (n.trim(), d.trim()),
        None => (s, "1"),
    };
    let n: Int = n.parse().ok()?;
    let d: Int = d.parse().ok()?;
    if d.is_zero() {
        return None;
    }
    Some(Rat::new(n, d))
}

/// Canonical text form: `"p"` for integers, `"p/q"` otherwise.
pub fn fmt_rat(r: &Rat) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn floor(r: &Rat) -> Int {
    r.floor().to_integer()
}

pub fn ceil(r: &Rat) -> Int {
    r.ceil().to_integer()
}

pub fn gcd_all<'a, I: IntoIterator<Item = &'a Int>>(it: I) -> Int {
    it.into_iter().fold(Int::zero(), |g, x| g.gcd(x))
}

pub fn lcm_denoms<'a, I: IntoIterator<Item = &'a Rat>>(it: I) -> Int {
    it.into_iter().fold(Int::one(), |l, x| l.lcm(x.denom()))
}

/// Integer vector; coordinates are arbitrary precision.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct IntVector(pub Vec<Int>);

/// Rational vector in normalized form.
#[derive(Clone, Debug, PartialEq, Eq, Hash, PartialOrd, Ord, Default)]
pub struct RatVector(pub Vec<Rat>);

impl IntVector {
    pub fn from_i64(v: &[i64]) -> Self {
        IntVector(v.iter().map(|&x| int(x)).collect())
    }

    pub fn zeros(n: usize) -> Self {
        IntVector(vec![Int::zero(); n])
    }

    pub fn unit(n: usize, i: usize) -> Self {
        let mut v = Self::zeros(n);
        v.0[i] = Int::one();
        v
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Int> {
        self.0.iter()
    }

    pub fn dot(&self, other: &IntVector) -> Int {
        assert_eq!(self.len(), other.len(), "dimension mismatch");
        self.0.iter().zip(&other.0).map(|(a, b)| a * b).sum()
    }

    pub fn dot_rat(&self, other: &RatVector) -> Rat {
        assert_eq!(self.len(), other.len(), "dimension mismatch");
        self.0
            .iter()
            .zip(&other.0)
            .map(|(a, b)| b * a)
            .fold(Rat::zero(), |s, x| s + x)
    }

    pub fn to_rat(&self) -> RatVector {
        RatVector(self.0.iter().map(rat_int).collect())
    }

    pub fn content(&self) -> Int {
        gcd_all(&self.0)
    }

    pub fn add(&self, other: &IntVector) -> IntVector {
        IntVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &IntVector) -> IntVector {
        IntVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: &Int) -> IntVector {
        IntVector(self.0.iter().map(|a| a * k).collect())
    }

    pub fn neg(&self) -> IntVector {
        IntVector(self.0.iter().map(|a| -a).collect())
    }

    pub fn sup_norm(&self) -> Int {
        self.0.iter().map(|x| x.abs()).max().unwrap_or_else(Int::zero)
    }
}

impl RatVector {
    pub fn zeros(n: usize) -> Self {
        RatVector(vec![Rat::zero(); n])
    }

    pub fn from_ratios(v: &[(i64, i64)]) -> Self {
        RatVector(v.iter().map(|&(n, d)| rat(n, d)).collect())
    }

    pub fn from_i64(v: &[i64]) -> Self {
        RatVector(v.iter().map(|&x| rat(x, 1)).collect())
    }

    pub fn len(&self) -> usize {
        self.0.len()
    }

    pub fn is_empty(&self) -> bool {
        self.0.is_empty()
    }

    pub fn is_zero(&self) -> bool {
        self.0.iter().all(|x| x.is_zero())
    }

    pub fn iter(&self) -> std::slice::Iter<'_, Rat> {
        self.0.iter()
    }

    pub fn dot(&self, other: &RatVector) -> Rat {
        assert_eq!(self.len(), other.len(), "dimension mismatch");
        self.0
            .iter()
            .zip(&other.0)
            .fold(Rat::zero(), |s, (a, b)| s + a * b)
    }

    pub fn add(&self, other: &RatVector) -> RatVector {
        RatVector(self.0.iter().zip(&other.0).map(|(a, b)| a + b).collect())
    }

    pub fn sub(&self, other: &RatVector) -> RatVector {
        RatVector(self.0.iter().zip(&other.0).map(|(a, b)| a - b).collect())
    }

    pub fn scale(&self, k: &Rat) -> RatVector {
        RatVector(self.0.iter().map(|a| a * k).collect())
    }

    pub fn neg(&self) -> RatVector {
        RatVector(self.0.iter().map(|a| -a).collect())
    }

    /// The integer vector if every coordinate is integral.
    pub fn to_int(&self) -> Option<IntVector> {
        if self.0.iter().all(|x| x.is_integer()) {
            Some(IntVector(self.0.iter().map(|x| x.to_integer()).collect()))
        } else {
            None
        }
    }

    /// Positive multiple with coprime integer coordinates (zero stays zero).
    pub fn primitive_multiple(&self) -> IntVector {
        let l = lcm_denoms(&self.0);
        let v: Vec<Int> = self.0.iter().map(|x| (x * rat_int(&l)).to_integer()).collect();
        let g = gcd_all(&v);
        if g.is_zero() {
            return IntVector(v);
        }
        IntVector(v.into_iter().map(|x| x / &g).collect())
    }
}

impl Index<usize> for IntVector {
    type Output = Int;
    fn index(&self, i: usize) -> &Int {
        &self.0[i]
    }
}

impl IndexMut<usize> for IntVector {
    fn index_mut(&mut self, i: usize) -> &mut Int {
        &mut self.0[i]
    }
}

impl Index<usize> for RatVector {
    type Output = Rat;
    fn index(&self, i: usize) -> &Rat {
        &self.0[i]
    }
}

impl IndexMut<usize> for RatVector {
    fn index_mut(&mut self, i: usize) -> &mut Rat {
        &mut self.0[i]
    }
}

impl fmt::Display for IntVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{x}")?;
        }
        write!(f, ")")
    }
}

impl fmt::Display for RatVector {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "(")?;
        for (i, x) in self.0.iter().enumerate() {
            if i > 0 {
                write!(f, ",")?;
            }
            write!(f, "{}", fmt_rat(x))?;
        }
        write!(f, ")")
    }
}

/// Serde adapter storing a rational as its `"p/q"` string.
pub mod rat_str {
    use super::*;

    pub fn serialize<S: Serializer>(r: &Rat, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&fmt_rat(r))
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Rat, D::Error> {
        let s = String::deserialize(d)?;
        parse_rat(&s).ok_or_else(|| serde::de::Error::custom(format!("invalid rational {s:?}")))
    }
}

impl Serialize for IntVector {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        let v: Vec<i64> = self
            .0
            .iter()
            .map(|x| i64::try_from(x).map_err(|_| serde::ser::Error::custom("integer out of range")))
            .collect::<Result<_, _>>()?;
        v.serialize(s)
    }
}

impl<'de> Deserialize<'de> for IntVector {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let v = Vec::<i64>::deserialize(d)?;
        Ok(IntVector::from_i64(&v))
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parse_and_format() {
        assert_eq!(parse_rat("2/4"), Some(rat(1, 2)));
        assert_eq!(parse_rat("-3"), Some(rat(-3, 1)));
        assert_eq!(parse_rat(" 6/-4 "), Some(rat(-3, 2)));
        assert_eq!(parse_rat("1/0"), None);
        assert_eq!(parse_rat("x"), None);
        assert_eq!(fmt_rat(&rat(4, 6)), "2/3");
        assert_eq!(fmt_rat(&rat(-4, 2)), "-2");
    }

    #[test]
    fn primitive_multiple_clears_denominators() {
        let v = RatVector::from_ratios(&[(1, 2), (-1, 3), (0, 1)]);
        assert_eq!(v.primitive_multiple(), IntVector::from_i64(&[3, -2, 0]));
    }
}
