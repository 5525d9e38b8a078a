//! Scalars: exact rationals for everything, `f64` only for large truncations.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num::bigint::BigInt;
use num::rational::BigRational;
use num::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

pub type Rational = BigRational;

pub fn rat(p: i64, q: i64) -> Rational {
    Rational::new(BigInt::from(p), BigInt::from(q))
}

pub fn int(p: i64) -> Rational {
    Rational::from_integer(BigInt::from(p))
}

/// Parses "p", "p/q", or a finite decimal such as "-1.25".
pub fn parse_rational(s: &str) -> Result<Rational> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational: {s:?}"));
    if let Some((p, q)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let q = BigInt::from_str(q.trim()).map_err(|_| bad())?;
        if q.is_zero() {
            return Err(bad());
        }
        return Ok(Rational::new(p, q));
    }
    if let Some((ip, fp)) = s.split_once('.') {
        if fp.is_empty() || !fp.chars().all(|c| c.is_ascii_digit()) {
            return Err(bad());
        }
        let neg = ip.starts_with('-');
        let ip = if ip.is_empty() || ip == "-" || ip == "+" { "0" } else { ip };
        let whole = BigInt::from_str(ip).map_err(|_| bad())?;
        let frac = BigInt::from_str(fp).map_err(|_| bad())?;
        let den = num::pow(BigInt::from(10), fp.len());
        let frac = Rational::new(frac, den);
        let whole = Rational::from_integer(whole.abs());
        let v = whole + frac;
        return Ok(if neg { -v } else { v });
    }
    BigInt::from_str(s)
        .map(Rational::from_integer)
        .map_err(|_| bad())
}

/// Lowest-terms string, "p" for integers.
pub fn fmt_rational(r: &Rational) -> String {
    if r.is_integer() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

pub fn to_f64(r: &Rational) -> f64 {
    ToPrimitive::to_f64(r).unwrap_or(f64::NAN)
}

/// Exact conversion of a finite float.
pub fn from_f64(x: f64) -> Rational {
    Rational::from_float(x).unwrap_or_else(Rational::zero)
}

/// Closest rational with denominator at most `max_den` (continued fractions).
pub fn limit_denominator(r: &Rational, max_den: u64) -> Rational {
    let max_den = BigInt::from(max_den);
    if r.denom() <= &max_den {
        return r.clone();
    }
    let (mut p0, mut q0, mut p1, mut q1) = (BigInt::zero(), BigInt::one(), BigInt::one(), BigInt::zero());
    let (mut n, mut d) = (r.numer().clone(), r.denom().clone());
    loop {
        let a = num::Integer::div_floor(&n, &d);
        let q2 = &q0 + &a * &q1;
        if q2 > max_den {
            break;
        }
        let p2 = &p0 + &a * &p1;
        (p0, q0, p1, q1) = (p1, q1, p2, q2);
        let rem = &n - &a * &d;
        (n, d) = (d, rem);
        if d.is_zero() {
            break;
        }
    }
    let k = num::Integer::div_floor(&(&max_den - &q0), &q1);
    let b1 = Rational::new(&p0 + &k * &p1, &q0 + &k * &q1);
    let b2 = Rational::new(p1, q1);
    if (&b2 - r).abs() <= (&b1 - r).abs() {
        b2
    } else {
        b1
    }
}

/// An edge conductance. Physical weights are positive; virtual ones may be any nonzero rational.
#[derive(Clone, PartialEq, Eq, Hash, PartialOrd, Ord)]
pub struct Weight(pub Rational);

impl Weight {
    pub fn physical(r: Rational) -> Result<Self> {
        if r.is_positive() {
            Ok(Weight(r))
        } else {
            Err(Error::ZeroWeight(format!(
                "physical weight must be positive, got {}",
                fmt_rational(&r)
            )))
        }
    }

    pub fn virtual_(r: Rational) -> Result<Self> {
        if r.is_zero() {
            Err(Error::ZeroWeight("virtual weight".into()))
        } else {
            Ok(Weight(r))
        }
    }

    pub fn value(&self) -> &Rational {
        &self.0
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }
}

impl From<Rational> for Weight {
    fn from(r: Rational) -> Self {
        Weight(r)
    }
}

impl From<i64> for Weight {
    fn from(v: i64) -> Self {
        Weight(int(v))
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(&fmt_rational(&self.0))
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Weight({self})")
    }
}

impl FromStr for Weight {
    type Err = Error;
    fn from_str(s: &str) -> Result<Self> {
        parse_rational(s).map(Weight)
    }
}

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let v = serde_json::Value::deserialize(d)?;
        let s = match v {
            serde_json::Value::String(s) => s,
            serde_json::Value::Number(n) => n.to_string(),
            other => return Err(serde::de::Error::custom(format!("bad weight {other}"))),
        };
        s.parse().map_err(serde::de::Error::custom)
    }
}

/// Serde helpers for `Vec<Rational>` as rational strings.
pub mod rational_vec {
    use super::*;

    pub fn serialize<S: Serializer>(v: &[Rational], s: S) -> std::result::Result<S::Ok, S::Error> {
        let strs: Vec<String> = v.iter().map(fmt_rational).collect();
        strs.serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> std::result::Result<Vec<Rational>, D::Error> {
        let ws: Vec<Weight> = Vec::deserialize(d)?;
        Ok(ws.into_iter().map(|w| w.0).collect())
    }
}

/// Field operations shared by the exact and floating evaluation modes.
pub trait Scalar:
    Clone
    + PartialEq
    + fmt::Debug
    + Send
    + Sync
    + Zero
    + One
    + Add<Output = Self>
    + Sub<Output = Self>
    + Mul<Output = Self>
    + Div<Output = Self>
    + Neg<Output = Self>
    + 'static
{
    const EXACT: bool;
    fn from_rational(r: &Rational) -> Self;
    fn approx(&self) -> f64;
    /// Larger is a better pivot; zero means unusable.
    fn pivot_score(&self) -> f64;
    fn render(&self) -> String;
}

impl Scalar for Rational {
    const EXACT: bool = true;
    fn from_rational(r: &Rational) -> Self {
        r.clone()
    }
    fn approx(&self) -> f64 {
        to_f64(self)
    }
    fn pivot_score(&self) -> f64 {
        if self.is_zero() {
            0.0
        } else {
            // prefer short numbers to limit coefficient growth
            let bits = self.numer().bits() + self.denom().bits();
            1.0 / (1.0 + bits as f64)
        }
    }
    fn render(&self) -> String {
        fmt_rational(self)
    }
}

impl Scalar for f64 {
    const EXACT: bool = false;
    fn from_rational(r: &Rational) -> Self {
        to_f64(r)
    }
    fn approx(&self) -> f64 {
        *self
    }
    fn pivot_score(&self) -> f64 {
        self.abs()
    }
    fn render(&self) -> String {
        format!("{self:e}")
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_common_forms() {
        assert_eq!(parse_rational("3/2").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("-4").unwrap(), int(-4));
        assert_eq!(parse_rational("6/4").unwrap(), rat(3, 2));
        assert_eq!(parse_rational("-1.25").unwrap(), rat(-5, 4));
        assert_eq!(parse_rational(".5").unwrap(), rat(1, 2));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("x").is_err());
    }

    #[test]
    fn formats_lowest_terms() {
        assert_eq!(fmt_rational(&rat(10, 4)), "5/2");
        assert_eq!(fmt_rational(&rat(-6, 3)), "-2");
    }

    #[test]
    fn limits_denominators() {
        let pi = parse_rational("3.14159265358979").unwrap();
        assert_eq!(limit_denominator(&pi, 1000), rat(355, 113));
        assert_eq!(limit_denominator(&rat(-7, 3), 10), rat(-7, 3));
        assert_eq!(limit_denominator(&rat(1, 3), 2), rat(1, 2));
    }

    #[test]
    fn weight_serde_round_trip() {
        let w: Weight = serde_json::from_str("\"6/4\"").unwrap();
        assert_eq!(serde_json::to_string(&w).unwrap(), "\"3/2\"");
        let w: Weight = serde_json::from_str("2").unwrap();
        assert_eq!(w, Weight::from(2));
        assert!(Weight::physical(int(-1)).is_err());
        assert!(Weight::virtual_(int(0)).is_err());
    }
}
