//! Exact arithmetic: rational weights, scaled integer lanes and certified
//! comparisons of p-th roots.
//!
//! Every distance and heuristic value in the crate is a [`Weight`]
//! (an arbitrary-precision rational). Hot loops never touch `BigRational`
//! directly; instead all quantities of one computation are lifted onto a
//! common denominator ([`Scale`]) and handled as integers of some
//! [`Length`] type (`i128` when the magnitudes allow it, `BigInt` otherwise).
//! Lifting is exact, so no rounding is ever introduced.

use std::cmp::Ordering;
use std::fmt;
use std::hash::Hash;
use std::ops::{Add, Div, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::{BigInt, Sign};
use num_integer::Integer;
use num_rational::BigRational;
use num_traits::{One, Signed, ToPrimitive, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

#[derive(Debug, Error, Clone, PartialEq, Eq)]
pub enum RationalParseError {
    #[error("empty rational literal")]
    Empty,
    #[error("bad integer in rational literal `{0}`")]
    BadInteger(String),
    #[error("zero denominator in rational literal `{0}`")]
    ZeroDenominator(String),
    #[error("negative denominator in rational literal `{0}`")]
    NegativeDenominator(String),
}

/// An exact rational quantity, always kept in lowest terms with a positive
/// denominator.
#[derive(Clone, PartialEq, Eq, PartialOrd, Ord, Hash, Default)]
pub struct Weight(BigRational);

impl Weight {
    pub fn new(numer: impl Into<BigInt>, denom: impl Into<BigInt>) -> Weight {
        Weight(BigRational::new(numer.into(), denom.into()))
    }

    pub fn integer(v: impl Into<BigInt>) -> Weight {
        Weight(BigRational::from_integer(v.into()))
    }

    pub fn zero() -> Weight {
        Weight(BigRational::zero())
    }

    pub fn one() -> Weight {
        Weight(BigRational::one())
    }

    pub fn from_rational(r: BigRational) -> Weight {
        Weight(r)
    }

    pub fn as_rational(&self) -> &BigRational {
        &self.0
    }

    pub fn into_rational(self) -> BigRational {
        self.0
    }

    pub fn numer(&self) -> &BigInt {
        self.0.numer()
    }

    pub fn denom(&self) -> &BigInt {
        self.0.denom()
    }

    pub fn is_zero(&self) -> bool {
        self.0.is_zero()
    }

    pub fn is_positive(&self) -> bool {
        self.0.is_positive()
    }

    pub fn is_negative(&self) -> bool {
        self.0.is_negative()
    }

    pub fn is_integer(&self) -> bool {
        self.0.is_integer()
    }

    pub fn abs(&self) -> Weight {
        Weight(self.0.abs())
    }

    pub fn floor(&self) -> Weight {
        Weight(self.0.floor())
    }

    /// Integer power; negative exponents invert.
    pub fn pow(&self, exp: i32) -> Weight {
        Weight(num_traits::Pow::pow(&self.0, exp))
    }

    pub fn to_f64(&self) -> f64 {
        self.0.to_f64().unwrap_or(f64::NAN)
    }

    pub fn max(self, other: Weight) -> Weight {
        if other > self {
            other
        } else {
            self
        }
    }
}

impl fmt::Display for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "{}/{}", self.0.numer(), self.0.denom())
    }
}

impl fmt::Debug for Weight {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        fmt::Display::fmt(self, f)
    }
}

impl FromStr for Weight {
    type Err = RationalParseError;

    /// Accepts `p/q` or a bare integer `p`.
    fn from_str(s: &str) -> Result<Self, Self::Err> {
        let s = s.trim();
        if s.is_empty() {
            return Err(RationalParseError::Empty);
        }
        let (num, den) = match s.split_once('/') {
            Some((n, d)) => (n.trim(), d.trim()),
            None => (s, "1"),
        };
        let num: BigInt = num
            .parse()
            .map_err(|_| RationalParseError::BadInteger(s.to_string()))?;
        let den: BigInt = den
            .parse()
            .map_err(|_| RationalParseError::BadInteger(s.to_string()))?;
        if den.is_zero() {
            return Err(RationalParseError::ZeroDenominator(s.to_string()));
        }
        if den.is_negative() {
            return Err(RationalParseError::NegativeDenominator(s.to_string()));
        }
        Ok(Weight(BigRational::new(num, den)))
    }
}

impl Serialize for Weight {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.serialize_str(&self.to_string())
    }
}

impl<'de> Deserialize<'de> for Weight {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        let s = String::deserialize(deserializer)?;
        s.parse().map_err(serde::de::Error::custom)
    }
}

macro_rules! forward_binop {
    ($tr:ident, $method:ident) => {
        impl $tr for Weight {
            type Output = Weight;
            fn $method(self, rhs: Weight) -> Weight {
                Weight((self.0).$method(rhs.0))
            }
        }
        impl<'a> $tr<&'a Weight> for &'a Weight {
            type Output = Weight;
            fn $method(self, rhs: &'a Weight) -> Weight {
                Weight((&self.0).$method(&rhs.0))
            }
        }
        impl<'a> $tr<&'a Weight> for Weight {
            type Output = Weight;
            fn $method(self, rhs: &'a Weight) -> Weight {
                Weight((self.0).$method(&rhs.0))
            }
        }
    };
}

forward_binop!(Add, add);
forward_binop!(Sub, sub);
forward_binop!(Mul, mul);
forward_binop!(Div, div);

impl Neg for Weight {
    type Output = Weight;
    fn neg(self) -> Weight {
        Weight(-self.0)
    }
}

impl std::iter::Sum for Weight {
    fn sum<I: Iterator<Item = Weight>>(iter: I) -> Weight {
        iter.fold(Weight::zero(), |a, b| a + b)
    }
}

impl From<i64> for Weight {
    fn from(v: i64) -> Weight {
        Weight::integer(v)
    }
}

/// Integer type used for scaled exact computation.
pub trait Length:
    Clone
    + Ord
    + Hash
    + fmt::Debug
    + Send
    + Sync
    + Zero
    + Add<Output = Self>
    + Sub<Output = Self>
    + 'static
{
    fn from_bigint(v: &BigInt) -> Option<Self>;
    fn to_bigint(&self) -> BigInt;

    fn abs_diff(&self, other: &Self) -> Self {
        if self >= other {
            self.clone() - other.clone()
        } else {
            other.clone() - self.clone()
        }
    }

    fn add_ref(&self, other: &Self) -> Self {
        self.clone() + other.clone()
    }
}

impl Length for i128 {
    fn from_bigint(v: &BigInt) -> Option<Self> {
        v.to_i128()
    }

    fn to_bigint(&self) -> BigInt {
        BigInt::from(*self)
    }

    fn abs_diff(&self, other: &Self) -> Self {
        (self - other).abs()
    }

    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
}

impl Length for BigInt {
    fn from_bigint(v: &BigInt) -> Option<Self> {
        Some(v.clone())
    }

    fn to_bigint(&self) -> BigInt {
        self.clone()
    }

    fn abs_diff(&self, other: &Self) -> Self {
        (self - other).abs()
    }

    fn add_ref(&self, other: &Self) -> Self {
        self + other
    }
}

/// Magnitudes below this bound are handled in the `i128` lane; the headroom
/// above it absorbs the handful of additions made per comparison.
pub fn small_lane_limit() -> BigInt {
    BigInt::one() << 118
}

/// A common denominator onto which rationals are lifted as integers.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Scale {
    denom: BigInt,
}

impl Scale {
    pub fn unit() -> Scale {
        Scale {
            denom: BigInt::one(),
        }
    }

    pub fn of<'a>(weights: impl IntoIterator<Item = &'a Weight>) -> Scale {
        let mut s = Scale::unit();
        for w in weights {
            s.include(w);
        }
        s
    }

    pub fn include(&mut self, w: &Weight) {
        if !(&self.denom % w.denom()).is_zero() {
            self.denom = self.denom.lcm(w.denom());
        }
    }

    pub fn merge(&self, other: &Scale) -> Scale {
        Scale {
            denom: self.denom.lcm(&other.denom),
        }
    }

    pub fn denom(&self) -> &BigInt {
        &self.denom
    }

    /// Exact integer representation of `w` on this scale.
    pub fn lift_big(&self, w: &Weight) -> BigInt {
        let scaled = w.as_rational() * BigRational::from_integer(self.denom.clone());
        debug_assert!(scaled.is_integer(), "weight {w} not on scale {}", self.denom);
        scaled.to_integer()
    }

    pub fn lift<L: Length>(&self, w: &Weight) -> L {
        L::from_bigint(&self.lift_big(w)).expect("lane chosen too small for scaled value")
    }

    pub fn lift_int<L: Length>(&self, v: &BigInt) -> L {
        L::from_bigint(&(v * &self.denom)).expect("lane chosen too small for scaled value")
    }

    pub fn lower<L: Length>(&self, v: &L) -> Weight {
        Weight::new(v.to_bigint(), self.denom.clone())
    }

    pub fn lower_rational<L: Length>(&self, v: &L) -> BigRational {
        BigRational::new(v.to_bigint(), self.denom.clone())
    }
}

/// A value that is either an exact rational or `offset + radicand^(1/p)`.
#[derive(Clone, Debug, PartialEq, Eq)]
pub enum Quantity {
    Rational(Weight),
    Radical {
        offset: Weight,
        radicand: Weight,
        p: u32,
    },
}

impl Quantity {
    pub fn as_exact(&self) -> Option<&Weight> {
        match self {
            Quantity::Rational(w) => Some(w),
            Quantity::Radical { .. } => None,
        }
    }

    pub fn to_f64(&self) -> f64 {
        match self {
            Quantity::Rational(w) => w.to_f64(),
            Quantity::Radical {
                offset,
                radicand,
                p,
            } => offset.to_f64() + radicand.to_f64().powf(1.0 / *p as f64),
        }
    }
}

impl fmt::Display for Quantity {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Quantity::Rational(w) => write!(f, "{w}"),
            Quantity::Radical {
                offset,
                radicand,
                p,
            } => write!(f, "{offset}+({radicand})^(1/{p})"),
        }
    }
}

/// `rational + Σ coeff_i · radicand_i^(1/p)` with a certified sign test.
#[derive(Clone, Debug)]
pub struct RadicalSum {
    pub rational: BigRational,
    pub terms: Vec<(BigRational, BigRational)>,
    pub p: u32,
}

const MIN_PRECISION_BITS: u64 = 64;
const MAX_PRECISION_BITS: u64 = 8192;

impl RadicalSum {
    pub fn new(p: u32) -> RadicalSum {
        assert!(p >= 1);
        RadicalSum {
            rational: BigRational::zero(),
            terms: Vec::new(),
            p,
        }
    }

    pub fn add_rational(&mut self, r: &BigRational) {
        self.rational += r;
    }

    pub fn add_root(&mut self, coeff: BigRational, radicand: &BigRational) {
        assert!(!radicand.is_negative());
        if coeff.is_zero() || radicand.is_zero() {
            return;
        }
        if let Some(exact) = exact_root(radicand, self.p) {
            self.rational += coeff * exact;
            return;
        }
        if let Some(term) = self.terms.iter_mut().find(|(_, r)| r == radicand) {
            term.0 += coeff;
        } else {
            self.terms.push((coeff, radicand.clone()));
        }
    }

    /// Sign of the expression. Intervals are refined until the sign is
    /// decided; an enclosure inside `[-gap, gap]` (gap > 0), or exhausting
    /// the precision cap, is reported as `Equal`.
    pub fn sign(&self, gap: &BigRational) -> Ordering {
        let terms: Vec<_> = self.terms.iter().filter(|(c, _)| !c.is_zero()).collect();
        if terms.is_empty() {
            return self.rational.cmp(&BigRational::zero());
        }
        let mut bits = MIN_PRECISION_BITS;
        loop {
            let mut lo = self.rational.clone();
            let mut hi = self.rational.clone();
            for (c, r) in &terms {
                let (rl, rh) = root_bounds(r, self.p, bits);
                if c.is_negative() {
                    lo += c * &rh;
                    hi += c * &rl;
                } else {
                    lo += c * &rl;
                    hi += c * &rh;
                }
            }
            if lo.is_positive() {
                return Ordering::Greater;
            }
            if hi.is_negative() {
                return Ordering::Less;
            }
            if gap.is_positive() && lo >= -gap.clone() && &hi <= gap {
                return Ordering::Equal;
            }
            if bits >= MAX_PRECISION_BITS {
                return Ordering::Equal;
            }
            bits *= 2;
        }
    }
}

/// Exact p-th root of a non-negative rational, when it is rational.
pub fn exact_root(r: &BigRational, p: u32) -> Option<BigRational> {
    if p == 1 {
        return Some(r.clone());
    }
    let n = r.numer().magnitude();
    let d = r.denom().magnitude();
    let rn = n.nth_root(p);
    let rd = d.nth_root(p);
    if num_traits::Pow::pow(&rn, p) == *n && num_traits::Pow::pow(&rd, p) == *d {
        Some(BigRational::new(
            BigInt::from_biguint(Sign::Plus, rn),
            BigInt::from_biguint(Sign::Plus, rd),
        ))
    } else {
        None
    }
}

/// Bounds `lo <= r^(1/p) <= hi` with `hi - lo = 2^-bits`.
fn root_bounds(r: &BigRational, p: u32, bits: u64) -> (BigRational, BigRational) {
    let shift = bits * p as u64;
    let scaled = (r.numer() << shift) / r.denom();
    let lo = scaled.nth_root(p);
    let denom = BigInt::one() << bits;
    let hi = &lo + BigInt::one();
    (
        BigRational::new(lo, denom.clone()),
        BigRational::new(hi, denom),
    )
}
