//! Exact critical values.
//!
//! Critical values are kept as exact rationals so that ordering checks in the
//! schedule never suffer from float ties. Every value produced by the move
//! calculus has a terminating decimal expansion and is written back as a plain
//! decimal string; values that do not terminate (the level spacing `1/(4n+6)`,
//! for example) are written as `p/q`.

use std::fmt;
use std::str::FromStr;

use num_bigint::BigInt;
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, PartialEq, Eq)]
#[error("invalid level literal `{0}`")]
pub struct ParseLevelError(pub String);

#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub struct Level(BigRational);

impl Level {
    pub fn zero() -> Self {
        Level(BigRational::zero())
    }

    pub fn one() -> Self {
        Level(BigRational::one())
    }

    pub fn from_ratio(numer: i64, denom: i64) -> Self {
        Level(BigRational::new(BigInt::from(numer), BigInt::from(denom)))
    }

    pub fn from_integer(v: i64) -> Self {
        Level(BigRational::from_integer(BigInt::from(v)))
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    /// True when the value lies strictly inside `(0, 1)`.
    pub fn in_open_unit(&self) -> bool {
        self.0.is_positive() && self.0 < BigRational::one()
    }

    pub fn is_terminating(&self) -> bool {
        let mut d = self.0.denom().clone();
        let two = BigInt::from(2);
        let five = BigInt::from(5);
        while d.is_even() {
            d /= &two;
        }
        while (&d % &five).is_zero() {
            d /= &five;
        }
        d.is_one()
    }

    pub fn abs(&self) -> Level {
        Level(self.0.abs())
    }

    pub fn min(a: &Level, b: &Level) -> Level {
        if a <= b {
            a.clone()
        } else {
            b.clone()
        }
    }

    /// Rounds to the nearest multiple of `10^-digits` (ties away from zero).
    pub fn round_decimal(&self, digits: u32) -> Level {
        let scale = BigInt::from(10).pow(digits);
        let scaled = &self.0 * BigRational::from_integer(scale.clone());
        Level(BigRational::new(scaled.round().to_integer(), scale))
    }

    /// Number of decimal digits needed so that `10^-digits <= bound`.
    pub fn digits_below(bound: &Level) -> u32 {
        let mut digits = 0;
        let mut step = BigRational::one();
        let ten = BigRational::from_integer(BigInt::from(10));
        while step > bound.0 {
            step /= ten.clone();
            digits += 1;
        }
        digits
    }

    fn decimal_string(&self) -> Option<String> {
        if !self.is_terminating() {
            return None;
        }
        let neg = self.0.is_negative();
        let r = self.0.abs();
        let mut digits = 0u32;
        let ten = BigInt::from(10);
        let mut scale = BigInt::one();
        while !(r.numer() * &scale % r.denom()).is_zero() {
            scale *= &ten;
            digits += 1;
        }
        let scaled = r.numer() * &scale / r.denom();
        let mut s = scaled.to_string();
        if digits > 0 {
            let d = digits as usize;
            if s.len() <= d {
                s = format!("{}{}", "0".repeat(d + 1 - s.len()), s);
            }
            s.insert(s.len() - d, '.');
        }
        Some(if neg { format!("-{s}") } else { s })
    }
}

impl FromStr for Level {
    type Err = ParseLevelError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let err = || ParseLevelError(s.to_string());
        let t = s.trim();
        if let Some((p, q)) = t.split_once('/') {
            let p: BigInt = p.trim().parse().map_err(|_| err())?;
            let q: BigInt = q.trim().parse().map_err(|_| err())?;
            if q.is_zero() {
                return Err(err());
            }
            return Ok(Level(BigRational::new(p, q)));
        }
        let (neg, body) = match t.strip_prefix('-') {
            Some(rest) => (true, rest),
            None => (false, t),
        };
        let (int_part, frac_part) = match body.split_once('.') {
            Some((i, f)) => (i, f),
            None => (body, ""),
        };
        if int_part.is_empty() && frac_part.is_empty() {
            return Err(err());
        }
        if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
            return Err(err());
        }
        let digits = format!("{int_part}{frac_part}");
        let numer: BigInt = if digits.is_empty() {
            BigInt::zero()
        } else {
            digits.parse().map_err(|_| err())?
        };
        let denom = BigInt::from(10).pow(frac_part.len() as u32);
        let r = BigRational::new(numer, denom);
        Ok(Level(if neg { -r } else { r }))
    }
}

impl fmt::Display for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self.decimal_string() {
            Some(s) => f.write_str(&s),
            None => write!(f, "{}/{}", self.0.numer(), self.0.denom()),
        }
    }
}

impl fmt::Debug for Level {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Level({self})")
    }
}

impl Serialize for Level {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Level {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! level_binop {
    ($trait:ident, $method:ident) => {
        impl std::ops::$trait<&Level> for &Level {
            type Output = Level;
            fn $method(self, rhs: &Level) -> Level {
                Level(std::ops::$trait::$method(&self.0, &rhs.0))
            }
        }
        impl std::ops::$trait<Level> for Level {
            type Output = Level;
            fn $method(self, rhs: Level) -> Level {
                Level(std::ops::$trait::$method(self.0, rhs.0))
            }
        }
    };
}

level_binop!(Add, add);
level_binop!(Sub, sub);
level_binop!(Mul, mul);
level_binop!(Div, div);
