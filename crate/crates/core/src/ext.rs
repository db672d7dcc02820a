//! Extended positive reals and lifted points.
//!
//! Every function in this crate maps into `{0} ∪ (0, ∞) ∪ {∞}`. The two
//! limit objects are carried as tags ([`ExtPos::Zero`], [`ExtPos::Infinity`])
//! rather than as floating sentinels so transform logic can branch on them
//! without epsilon tests.

use std::cmp::Ordering;
use std::fmt;

use serde::de::{self, Deserializer, Visitor};
use serde::{Deserialize, Serialize, Serializer};

use crate::error::{Error, Result};

/// Heights below this are rejected by [`gamma_point`].
pub const MIN_HEIGHT: f64 = 1e-300;

/// A strictly positive, finite real.
#[derive(Debug, Clone, Copy, PartialEq, PartialOrd)]
pub struct Positive(f64);

impl Positive {
    pub fn new(value: f64) -> Result<Self> {
        if value.is_finite() && value > 0.0 {
            Ok(Positive(value))
        } else {
            Err(Error::NotPositive(value))
        }
    }

    #[inline]
    pub fn get(self) -> f64 {
        self.0
    }
}

/// An extended positive real: `0`, a finite positive value, or `+∞`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ExtPos {
    Zero,
    Finite(Positive),
    Infinity,
}

impl ExtPos {
    pub const ONE: ExtPos = ExtPos::Finite(Positive(1.0));

    /// Finite positive value; rejects anything that is not in `(0, ∞)`.
    pub fn finite(value: f64) -> Result<Self> {
        Positive::new(value).map(ExtPos::Finite)
    }

    /// Classifies a raw float: `0` (either sign) is `Zero`, `+∞` is
    /// `Infinity`, positives are `Finite`. Negative values and NaN are
    /// errors.
    pub fn from_value(value: f64) -> Result<Self> {
        if value.is_nan() {
            Err(Error::Undefined("NaN"))
        } else if value == 0.0 {
            Ok(ExtPos::Zero)
        } else if value == f64::INFINITY {
            Ok(ExtPos::Infinity)
        } else if value > 0.0 {
            Ok(ExtPos::Finite(Positive(value)))
        } else {
            Err(Error::NegativeValue { value })
        }
    }

    /// Numeric view: `0.0`, the value, or `f64::INFINITY`.
    #[inline]
    pub fn value(self) -> f64 {
        match self {
            ExtPos::Zero => 0.0,
            ExtPos::Finite(p) => p.0,
            ExtPos::Infinity => f64::INFINITY,
        }
    }

    #[inline]
    pub fn as_finite(self) -> Option<f64> {
        match self {
            ExtPos::Finite(p) => Some(p.0),
            _ => None,
        }
    }

    #[inline]
    pub fn is_finite(self) -> bool {
        matches!(self, ExtPos::Finite(_))
    }

    /// Reciprocal, exchanging `Zero` and `Infinity`.
    pub fn recip(self) -> ExtPos {
        match self {
            ExtPos::Zero => ExtPos::Infinity,
            ExtPos::Infinity => ExtPos::Zero,
            ExtPos::Finite(p) => classify_positive(1.0 / p.0),
        }
    }

    /// Multiplication by a positive finite scalar. Underflow lands on
    /// `Zero` and overflow on `Infinity`.
    pub fn scale(self, factor: f64) -> ExtPos {
        debug_assert!(factor > 0.0 && factor.is_finite());
        match self {
            ExtPos::Finite(p) => classify_positive(p.0 * factor),
            other => other,
        }
    }

    /// `self <= bound` for a finite real bound.
    #[inline]
    pub fn le(self, bound: f64) -> bool {
        self.value() <= bound
    }

    /// Distance used for residuals: equal tags are at distance 0, an
    /// infinite value against anything else is infinitely far.
    pub fn distance(self, other: ExtPos) -> f64 {
        match (self, other) {
            (ExtPos::Infinity, ExtPos::Infinity) => 0.0,
            (ExtPos::Infinity, _) | (_, ExtPos::Infinity) => f64::INFINITY,
            (a, b) => (a.value() - b.value()).abs(),
        }
    }
}

fn classify_positive(v: f64) -> ExtPos {
    if v == 0.0 {
        ExtPos::Zero
    } else if v.is_infinite() {
        ExtPos::Infinity
    } else {
        ExtPos::Finite(Positive(v))
    }
}

impl Eq for ExtPos {}

impl PartialOrd for ExtPos {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for ExtPos {
    fn cmp(&self, other: &Self) -> Ordering {
        use ExtPos::*;
        match (self, other) {
            (Zero, Zero) | (Infinity, Infinity) => Ordering::Equal,
            (Zero, _) | (_, Infinity) => Ordering::Less,
            (_, Zero) | (Infinity, _) => Ordering::Greater,
            (Finite(a), Finite(b)) => a.0.total_cmp(&b.0),
        }
    }
}

impl fmt::Display for ExtPos {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            ExtPos::Zero => f.write_str("0"),
            ExtPos::Infinity => f.write_str("inf"),
            ExtPos::Finite(p) => match f.precision() {
                Some(prec) => write!(f, "{:.*}", prec, p.0),
                None => write!(f, "{}", p.0),
            },
        }
    }
}

impl Serialize for ExtPos {
    fn serialize<S: Serializer>(&self, serializer: S) -> std::result::Result<S::Ok, S::Error> {
        match self {
            ExtPos::Zero => serializer.serialize_u8(0),
            ExtPos::Finite(p) => serializer.serialize_f64(p.0),
            ExtPos::Infinity => serializer.serialize_str("inf"),
        }
    }
}

impl<'de> Deserialize<'de> for ExtPos {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> std::result::Result<Self, D::Error> {
        struct ExtPosVisitor;

        impl Visitor<'_> for ExtPosVisitor {
            type Value = ExtPos;

            fn expecting(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
                f.write_str("0, a positive number, or \"inf\"")
            }

            fn visit_f64<E: de::Error>(self, v: f64) -> std::result::Result<ExtPos, E> {
                ExtPos::from_value(v).map_err(E::custom)
            }

            fn visit_u64<E: de::Error>(self, v: u64) -> std::result::Result<ExtPos, E> {
                self.visit_f64(v as f64)
            }

            fn visit_i64<E: de::Error>(self, v: i64) -> std::result::Result<ExtPos, E> {
                self.visit_f64(v as f64)
            }

            fn visit_str<E: de::Error>(self, v: &str) -> std::result::Result<ExtPos, E> {
                match v {
                    "inf" => Ok(ExtPos::Infinity),
                    "0" => Ok(ExtPos::Zero),
                    _ => Err(E::invalid_value(de::Unexpected::Str(v), &self)),
                }
            }
        }

        deserializer.deserialize_any(ExtPosVisitor)
    }
}

/// Product of an optimal value pair with the convention `∞·0 = 0·∞ = 1`.
///
/// The remaining tag combinations follow the usual rules: `∞·c = ∞` and
/// `0·c = 0` for finite `c`.
pub fn optimality_product(a: ExtPos, b: ExtPos) -> ExtPos {
    use ExtPos::*;
    match (a, b) {
        (Infinity, Zero) | (Zero, Infinity) => ExtPos::ONE,
        (Infinity, _) | (_, Infinity) => Infinity,
        (Zero, _) | (_, Zero) => Zero,
        (Finite(x), Finite(y)) => classify_positive(x.0 * y.0),
    }
}

/// A point `(x, u)` with `u > 0`.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct LiftedPoint {
    pub x: Vec<f64>,
    pub u: f64,
}

impl LiftedPoint {
    pub fn new(x: Vec<f64>, u: f64) -> Result<Self> {
        let p = LiftedPoint { x, u };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        if !self.u.is_finite() || self.u <= 0.0 {
            return Err(Error::InvalidHeight(self.u));
        }
        if self.x.iter().any(|c| !c.is_finite()) {
            return Err(Error::NonFinite("lifted point"));
        }
        Ok(())
    }

    pub fn dim(&self) -> usize {
        self.x.len()
    }

    /// `(ζ, δ)ᵀ(x, u)`.
    pub fn pair(&self, zeta: &[f64], delta: f64) -> f64 {
        dot(zeta, &self.x) + delta * self.u
    }
}

/// The radial point transformation `(x, u) ↦ (x, 1)/u`.
pub fn gamma_point(p: &LiftedPoint) -> Result<LiftedPoint> {
    p.validate()?;
    if p.u < MIN_HEIGHT {
        return Err(Error::HeightUnderflow(p.u));
    }
    let x: Vec<f64> = p.x.iter().map(|c| c / p.u).collect();
    let u = 1.0 / p.u;
    if x.iter().any(|c| !c.is_finite()) || !u.is_finite() {
        return Err(Error::NonFinite("transformed point"));
    }
    Ok(LiftedPoint { x, u })
}

#[inline]
pub(crate) fn dot(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).map(|(x, y)| x * y).sum()
}

#[inline]
pub(crate) fn norm(a: &[f64]) -> f64 {
    dot(a, a).sqrt()
}
