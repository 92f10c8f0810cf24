//! Exact rational numbers with a `"num/den"` text form, and inverse-CDF
//! sampling at 64-bit resolution.

use std::fmt;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use rand::RngCore;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::error::{Error, Result};

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Rational(pub BigRational);

impl Rational {
    pub fn new(num: i64, den: i64) -> Self {
        Rational(BigRational::new(BigInt::from(num), BigInt::from(den)))
    }
    pub fn from_int(n: i64) -> Self {
        Rational(BigRational::from_integer(BigInt::from(n)))
    }
    pub fn zero() -> Self {
        Rational(BigRational::zero())
    }
    pub fn one() -> Self {
        Rational(BigRational::one())
    }
    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }
    pub fn is_one(&self) -> bool {
        self.0.is_one()
    }
    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }
    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }
    pub fn recip(&self) -> Self {
        Rational(self.0.recip())
    }
    pub fn pow(&self, e: i32) -> Self {
        Rational(num_traits::Pow::pow(&self.0, e))
    }
    pub fn ceil_u64(&self) -> u64 {
        self.0.ceil().to_integer().to_u64().unwrap_or(u64::MAX)
    }
    /// `floor(self * 2^64)` clamped to `[0, 2^64]`.
    pub fn threshold64(&self) -> u128 {
        if self.0.is_negative() || self.0.is_zero() {
            return 0;
        }
        if self.0 >= BigRational::one() {
            return 1u128 << 64;
        }
        let scaled: BigInt = (self.0.numer() << 64u32) / self.0.denom();
        scaled.to_u128().unwrap_or(1u128 << 64)
    }
    pub fn in_unit_interval(&self) -> bool {
        !self.is_negative() && self.0 <= BigRational::one()
    }
}

impl fmt::Display for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Rational {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Rational {
    type Err = Error;

    /// Accepts `n/d`, integers, and finite decimals such as `0.25` (parsed exactly).
    fn from_str(s: &str) -> Result<Self> {
        let s = s.trim();
        let bad = || Error::Parse(format!("not a rational: {s:?}"));
        if let Some((n, d)) = s.split_once('/') {
            let n: BigInt = n.trim().parse().map_err(|_| bad())?;
            let d: BigInt = d.trim().parse().map_err(|_| bad())?;
            if d.is_zero() {
                return Err(bad());
            }
            return Ok(Rational(BigRational::new(n, d)));
        }
        if let Some((int, frac)) = s.split_once('.') {
            if frac.is_empty() || !frac.chars().all(|c| c.is_ascii_digit()) {
                return Err(bad());
            }
            let neg = int.starts_with('-');
            let int_part: BigInt = match int.trim_start_matches(['-', '+']) {
                "" => BigInt::zero(),
                i => i.parse().map_err(|_| bad())?,
            };
            let frac_num: BigInt = frac.parse().map_err(|_| bad())?;
            let den = num_traits::pow(BigInt::from(10), frac.len());
            let mut v = BigRational::from_integer(int_part) + BigRational::new(frac_num, den);
            if neg {
                v = -v;
            }
            return Ok(Rational(v));
        }
        let n: BigInt = s.parse().map_err(|_| bad())?;
        Ok(Rational(BigRational::from_integer(n)))
    }
}

impl Serialize for Rational {
    fn serialize<S: Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        s.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Rational {
    fn deserialize<D: Deserializer<'de>>(d: D) -> std::result::Result<Self, D::Error> {
        let s = String::deserialize(d)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

impl From<BigRational> for Rational {
    fn from(v: BigRational) -> Self {
        Rational(v)
    }
}

macro_rules! binop {
    ($tr:ident, $m:ident) => {
        impl $tr for Rational {
            type Output = Rational;
            fn $m(self, o: Rational) -> Rational {
                Rational(self.0.$m(o.0))
            }
        }
        impl<'a> $tr<&'a Rational> for &'a Rational {
            type Output = Rational;
            fn $m(self, o: &'a Rational) -> Rational {
                Rational((&self.0).$m(&o.0))
            }
        }
        impl<'a> $tr<&'a Rational> for Rational {
            type Output = Rational;
            fn $m(self, o: &'a Rational) -> Rational {
                Rational(self.0.$m(&o.0))
            }
        }
    };
}
binop!(Add, add);
binop!(Sub, sub);
binop!(Mul, mul);
binop!(Div, div);

impl Neg for Rational {
    type Output = Rational;
    fn neg(self) -> Rational {
        Rational(-self.0)
    }
}

/// Draws `true` with probability `threshold / 2^64`.
#[inline]
pub fn bernoulli(threshold: u128, rng: &mut (impl RngCore + ?Sized)) -> bool {
    (rng.next_u64() as u128) < threshold
}

/// Inverse-CDF sampler for a finite distribution given by exact weights.
#[derive(Clone, Debug)]
pub struct Sampler {
    cumulative: Vec<u128>,
}

impl Sampler {
    pub fn new(weights: &[Rational]) -> Result<Self> {
        if weights.is_empty() {
            return Err(Error::MalformedMachine("empty distribution".into()));
        }
        let mut acc = Rational::zero();
        let mut cumulative = Vec::with_capacity(weights.len());
        for w in weights {
            if w.is_negative() {
                return Err(Error::MalformedMachine(format!("negative probability {w}")));
            }
            acc = acc + w;
            cumulative.push(acc.threshold64());
        }
        if !acc.is_one() {
            return Err(Error::MalformedMachine(format!("probabilities sum to {acc}, not 1")));
        }
        Ok(Sampler { cumulative })
    }

    pub fn len(&self) -> usize {
        self.cumulative.len()
    }

    pub fn is_empty(&self) -> bool {
        self.cumulative.is_empty()
    }

    /// Single-outcome distributions consume no randomness.
    #[inline]
    pub fn sample(&self, rng: &mut (impl RngCore + ?Sized)) -> usize {
        if self.cumulative.len() == 1 {
            return 0;
        }
        let u = rng.next_u64() as u128;
        self.cumulative.iter().position(|&c| u < c).unwrap_or(self.cumulative.len() - 1)
    }
}
