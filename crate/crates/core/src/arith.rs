//! Shared exact-arithmetic helpers: points of the projective line, exact
//! logarithms of integers and decimal (de)serialization of big numbers.

use std::fmt;
use std::str::FromStr;

use num_bigint::{BigInt, BigUint, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};

/// A point of the projective line over a field: a finite value or infinity.
#[derive(Clone, Debug, PartialEq, Eq, Hash)]
pub enum Ext<K> {
    Finite(K),
    Infinity,
}

pub type ExtRational = Ext<BigRational>;

impl<K> Ext<K> {
    pub fn is_infinity(&self) -> bool {
        matches!(self, Ext::Infinity)
    }

    pub fn finite(&self) -> Option<&K> {
        match self {
            Ext::Finite(v) => Some(v),
            Ext::Infinity => None,
        }
    }
}

impl<K: Zero> Ext<K> {
    pub fn is_zero(&self) -> bool {
        matches!(self, Ext::Finite(v) if v.is_zero())
    }
}

impl ExtRational {
    pub fn from_int(n: i64) -> Self {
        Ext::Finite(BigRational::from_integer(BigInt::from(n)))
    }

    pub fn from_frac(n: i64, d: i64) -> Self {
        Ext::Finite(BigRational::new(BigInt::from(n), BigInt::from(d)))
    }
}

impl<K: fmt::Display> fmt::Display for Ext<K> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Ext::Finite(v) => write!(f, "{v}"),
            Ext::Infinity => write!(f, "inf"),
        }
    }
}

/// Parses `p`, `p/q` or `inf` (also `oo`, `infinity`).
pub fn parse_ext_rational(s: &str) -> Result<ExtRational> {
    let t = s.trim();
    match t.to_ascii_lowercase().as_str() {
        "inf" | "oo" | "infinity" | "∞" => return Ok(Ext::Infinity),
        _ => {}
    }
    parse_rational(t).map(Ext::Finite)
}

pub fn parse_rational(s: &str) -> Result<BigRational> {
    let t = s.trim();
    let bad = || Error::invalid(format!("not a rational number: {s:?}"));
    match t.split_once('/') {
        Some((n, d)) => {
            let n = BigInt::from_str(n.trim()).map_err(|_| bad())?;
            let d = BigInt::from_str(d.trim()).map_err(|_| bad())?;
            if d.is_zero() {
                return Err(Error::invalid("zero denominator"));
            }
            Ok(BigRational::new(n, d))
        }
        None => Ok(BigRational::from_integer(
            BigInt::from_str(t).map_err(|_| bad())?,
        )),
    }
}

/// Natural logarithm of a positive big integer, accurate to a few ulps
/// regardless of size (no overflow through `f64`).
pub fn ln_biguint(n: &BigUint) -> f64 {
    assert!(!n.is_zero(), "log of zero");
    let bits = n.bits();
    if bits <= 1000 {
        return n.to_f64().expect("finite below 2^1000").ln();
    }
    let shift = bits - 64;
    let top = (n >> shift).to_f64().expect("64-bit value");
    top.ln() + shift as f64 * std::f64::consts::LN_2
}

pub fn ln_bigint_abs(n: &BigInt) -> f64 {
    ln_biguint(n.magnitude())
}

/// `log(arg)` for a positive integer `arg`, kept symbolically so that
/// heights and radicals can be compared exactly.
#[derive(Clone, Debug, PartialEq, Eq, Hash, Serialize, Deserialize)]
pub struct ExactLog {
    #[serde(with = "biguint_dec")]
    pub arg: BigUint,
}

impl ExactLog {
    pub fn of(arg: BigUint) -> Self {
        assert!(!arg.is_zero(), "log of zero");
        ExactLog { arg }
    }

    pub fn zero() -> Self {
        ExactLog { arg: BigUint::one() }
    }

    pub fn value(&self) -> f64 {
        ln_biguint(&self.arg)
    }
}

impl fmt::Display for ExactLog {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "log({})", self.arg)
    }
}

/// Coprime integer representative `(a, b)` of a rational `a/b`, `b > 0`.
pub fn num_den(r: &BigRational) -> (BigInt, BigInt) {
    (r.numer().clone(), r.denom().clone())
}

/// Homogeneous coordinates `(x, y)` with `gcd = 1`, `(1, 0)` for infinity.
pub fn homogeneous(z: &ExtRational) -> (BigInt, BigInt) {
    match z {
        Ext::Finite(r) => num_den(r),
        Ext::Infinity => (BigInt::one(), BigInt::zero()),
    }
}

/// Reduces a pair of integers, not both zero, to a point of P^1(Q).
pub fn from_homogeneous(x: BigInt, y: BigInt) -> ExtRational {
    debug_assert!(!(x.is_zero() && y.is_zero()));
    if y.is_zero() {
        Ext::Infinity
    } else {
        Ext::Finite(BigRational::new(x, y))
    }
}

pub fn gcd_all<'a>(values: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    values
        .into_iter()
        .fold(BigInt::zero(), |acc, v| acc.gcd(v))
}

pub fn lcm_all<'a>(values: impl IntoIterator<Item = &'a BigInt>) -> BigInt {
    values.into_iter().fold(BigInt::one(), |acc, v| acc.lcm(v))
}

pub fn abs_u(n: &BigInt) -> BigUint {
    n.magnitude().clone()
}

pub fn to_biguint_checked(n: &BigInt) -> Option<BigUint> {
    match n.sign() {
        Sign::Minus => None,
        _ => Some(n.magnitude().clone()),
    }
}

/// Decimal digit count estimate of `|n|` (exact up to one digit).
pub fn approx_digits(n: &BigInt) -> u64 {
    (n.bits() as f64 * std::f64::consts::LOG10_2).ceil() as u64
}

pub fn is_perfect_square(n: &BigInt) -> bool {
    if n.is_negative() {
        return false;
    }
    let r = n.sqrt();
    &(&r * &r) == n
}

/// Serde adapters that write big integers as decimal strings.
pub mod bigint_dec {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(v: &BigInt, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigInt, D::Error> {
        let s = String::deserialize(d)?;
        BigInt::from_str(&s).map_err(serde::de::Error::custom)
    }
}

pub mod biguint_dec {
    use num_bigint::BigUint;
    use serde::{Deserialize, Deserializer, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(v: &BigUint, s: S) -> Result<S::Ok, S::Error> {
        s.serialize_str(&v.to_string())
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<BigUint, D::Error> {
        let s = String::deserialize(d)?;
        BigUint::from_str(&s).map_err(serde::de::Error::custom)
    }
}

pub mod opt_bigint_dec {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(v: &Option<BigInt>, s: S) -> Result<S::Ok, S::Error> {
        match v {
            Some(v) => s.serialize_some(&v.to_string()),
            None => s.serialize_none(),
        }
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Option<BigInt>, D::Error> {
        let s = Option::<String>::deserialize(d)?;
        s.map(|s| BigInt::from_str(&s).map_err(serde::de::Error::custom))
            .transpose()
    }
}

pub mod vec_bigint_dec {
    use num_bigint::BigInt;
    use serde::{Deserialize, Deserializer, Serialize, Serializer};
    use std::str::FromStr;

    pub fn serialize<S: Serializer>(v: &[BigInt], s: S) -> Result<S::Ok, S::Error> {
        v.iter()
            .map(|x| x.to_string())
            .collect::<Vec<_>>()
            .serialize(s)
    }

    pub fn deserialize<'de, D: Deserializer<'de>>(d: D) -> Result<Vec<BigInt>, D::Error> {
        let v = Vec::<String>::deserialize(d)?;
        v.iter()
            .map(|s| BigInt::from_str(s).map_err(serde::de::Error::custom))
            .collect()
    }
}
