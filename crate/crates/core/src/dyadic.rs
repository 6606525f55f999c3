//! Exact rationals of the form `K / 2^q` and their 2-adic valuation.
//!
//! A nonzero [`Dyadic`] is always stored with an odd numerator, so the
//! representation is canonical and `ord(K / 2^q) = -q`. Zero is a separate
//! state whose valuation is [`Valuation::Infinite`].

use std::cmp::Ordering;
use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};
use std::str::FromStr;

use num_bigint::BigInt;
use num_traits::{One, Signed, Zero};
use serde::{Deserialize, Deserializer, Serialize, Serializer};
use thiserror::Error;

/// A 2-adic valuation: an integer, or `+∞` for zero.
///
/// `Finite(_) < Infinite`, so `min`/`max` behave as on the extended integers.
#[derive(Clone, Copy, Debug, PartialEq, Eq, PartialOrd, Ord, Hash)]
pub enum Valuation {
    Finite(i64),
    Infinite,
}

impl Valuation {
    pub fn finite(self) -> Option<i64> {
        match self {
            Valuation::Finite(v) => Some(v),
            Valuation::Infinite => None,
        }
    }

    pub fn is_infinite(self) -> bool {
        matches!(self, Valuation::Infinite)
    }
}

impl Add for Valuation {
    type Output = Valuation;

    fn add(self, rhs: Valuation) -> Valuation {
        match (self, rhs) {
            (Valuation::Finite(a), Valuation::Finite(b)) => Valuation::Finite(a + b),
            _ => Valuation::Infinite,
        }
    }
}

impl fmt::Display for Valuation {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        match self {
            Valuation::Finite(v) => write!(f, "{v}"),
            Valuation::Infinite => f.write_str("inf"),
        }
    }
}

/// 2-adic valuation of a nonzero integer; `Infinite` for zero.
pub fn ord_int(n: &BigInt) -> Valuation {
    match n.trailing_zeros() {
        Some(tz) => Valuation::Finite(tz as i64),
        None => Valuation::Infinite,
    }
}

/// Exact dyadic rational `numerator / 2^exponent`.
///
/// Invariant: either `numerator == 0 && exponent == 0` (the zero state), or
/// `numerator` is odd.
#[derive(Clone, PartialEq, Eq, Hash)]
pub struct Dyadic {
    numerator: BigInt,
    exponent: i64,
}

impl Dyadic {
    pub fn zero() -> Self {
        Dyadic {
            numerator: BigInt::zero(),
            exponent: 0,
        }
    }

    pub fn one() -> Self {
        Dyadic::from_int(1)
    }

    /// `numerator / 2^exponent`, normalized.
    pub fn new(numerator: impl Into<BigInt>, exponent: i64) -> Self {
        let mut d = Dyadic {
            numerator: numerator.into(),
            exponent,
        };
        d.normalize();
        d
    }

    pub fn from_int(n: i64) -> Self {
        Dyadic::new(n, 0)
    }

    pub fn from_bigint(n: BigInt) -> Self {
        Dyadic::new(n, 0)
    }

    fn normalize(&mut self) {
        match self.numerator.trailing_zeros() {
            None => self.exponent = 0,
            Some(0) => {}
            Some(tz) => {
                self.numerator >>= tz;
                self.exponent -= tz as i64;
            }
        }
    }

    pub fn is_zero(&self) -> bool {
        self.numerator.is_zero()
    }

    pub fn is_one(&self) -> bool {
        self.exponent == 0 && self.numerator.is_one()
    }

    /// Odd numerator `K` (zero for the zero value).
    pub fn numerator(&self) -> &BigInt {
        &self.numerator
    }

    /// Denominator exponent `q` in `K / 2^q`; zero for the zero value.
    pub fn exponent(&self) -> i64 {
        self.exponent
    }

    pub fn ord(&self) -> Valuation {
        if self.is_zero() {
            Valuation::Infinite
        } else {
            Valuation::Finite(-self.exponent)
        }
    }

    pub fn signum(&self) -> i32 {
        if self.numerator.is_zero() {
            0
        } else if self.numerator.is_negative() {
            -1
        } else {
            1
        }
    }

    /// Multiplies by `2^k` (divides when `k < 0`).
    pub fn mul_pow2(&self, k: i64) -> Self {
        if self.is_zero() {
            return Dyadic::zero();
        }
        Dyadic {
            numerator: self.numerator.clone(),
            exponent: self.exponent - k,
        }
    }

    pub fn half(&self) -> Self {
        self.mul_pow2(-1)
    }

    pub fn mul_int(&self, n: &BigInt) -> Self {
        Dyadic::new(&self.numerator * n, self.exponent)
    }

    /// Bit length of the odd numerator.
    pub fn numerator_bits(&self) -> u64 {
        self.numerator.bits()
    }

    /// Lossy conversion, for debug output only.
    pub fn to_f64_lossy(&self) -> f64 {
        use num_traits::ToPrimitive;
        if self.is_zero() {
            return 0.0;
        }
        let bits = self.numerator.bits() as i64;
        let shift = (bits - 60).max(0);
        let top = (&self.numerator >> shift).to_f64().unwrap_or(f64::NAN);
        top * 2f64.powi((shift - self.exponent).clamp(i32::MIN as i64, i32::MAX as i64) as i32)
    }

    /// Exact sum of many terms, aligning all numerators once at the largest
    /// exponent instead of normalizing after every addition.
    pub fn sum<'a, I>(terms: I) -> Dyadic
    where
        I: IntoIterator<Item = &'a Dyadic>,
    {
        let terms: Vec<&Dyadic> = terms.into_iter().filter(|t| !t.is_zero()).collect();
        sum_aligned(terms.iter().map(|t| (&t.numerator, t.exponent)))
    }

    /// Exact `Σ a_i * b_i` over paired terms.
    pub fn dot<'a, I>(pairs: I) -> Dyadic
    where
        I: IntoIterator<Item = (&'a Dyadic, &'a Dyadic)>,
    {
        let products: Vec<(BigInt, i64)> = pairs
            .into_iter()
            .filter(|(a, b)| !a.is_zero() && !b.is_zero())
            .map(|(a, b)| (&a.numerator * &b.numerator, a.exponent + b.exponent))
            .collect();
        sum_aligned(products.iter().map(|(n, e)| (n, *e)))
    }
}

fn sum_aligned<'a, I>(terms: I) -> Dyadic
where
    I: Iterator<Item = (&'a BigInt, i64)> + Clone,
{
    let Some(top) = terms.clone().map(|(_, e)| e).max() else {
        return Dyadic::zero();
    };
    let mut acc = BigInt::zero();
    for (n, e) in terms {
        let shift = (top - e) as usize;
        if shift == 0 {
            acc += n;
        } else {
            acc += n << shift;
        }
    }
    Dyadic::new(acc, top)
}

impl Default for Dyadic {
    fn default() -> Self {
        Dyadic::zero()
    }
}

impl From<i64> for Dyadic {
    fn from(n: i64) -> Self {
        Dyadic::from_int(n)
    }
}

impl From<BigInt> for Dyadic {
    fn from(n: BigInt) -> Self {
        Dyadic::from_bigint(n)
    }
}

impl<'a> Add<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;

    fn add(self, rhs: &'a Dyadic) -> Dyadic {
        if self.is_zero() {
            return rhs.clone();
        }
        if rhs.is_zero() {
            return self.clone();
        }
        match self.exponent.cmp(&rhs.exponent) {
            // Both numerators odd: the sum is even, so normalization may shift.
            Ordering::Equal => Dyadic::new(&self.numerator + &rhs.numerator, self.exponent),
            // Exactly one odd term at the top exponent: the sum stays odd.
            Ordering::Greater => Dyadic {
                numerator: &self.numerator
                    + (&rhs.numerator << (self.exponent - rhs.exponent) as usize),
                exponent: self.exponent,
            },
            Ordering::Less => Dyadic {
                numerator: (&self.numerator << (rhs.exponent - self.exponent) as usize)
                    + &rhs.numerator,
                exponent: rhs.exponent,
            },
        }
    }
}

impl<'a> Sub<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;

    fn sub(self, rhs: &'a Dyadic) -> Dyadic {
        self + &(-rhs)
    }
}

impl<'a> Mul<&'a Dyadic> for &'a Dyadic {
    type Output = Dyadic;

    fn mul(self, rhs: &'a Dyadic) -> Dyadic {
        if self.is_zero() || rhs.is_zero() {
            return Dyadic::zero();
        }
        // odd * odd is odd
        Dyadic {
            numerator: &self.numerator * &rhs.numerator,
            exponent: self.exponent + rhs.exponent,
        }
    }
}

impl Neg for &Dyadic {
    type Output = Dyadic;

    fn neg(self) -> Dyadic {
        Dyadic {
            numerator: -&self.numerator,
            exponent: self.exponent,
        }
    }
}

impl Neg for Dyadic {
    type Output = Dyadic;

    fn neg(self) -> Dyadic {
        -&self
    }
}

macro_rules! forward_owned {
    ($tr:ident, $method:ident) => {
        impl $tr<Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $method(self, rhs: Dyadic) -> Dyadic {
                (&self).$method(&rhs)
            }
        }
        impl<'a> $tr<&'a Dyadic> for Dyadic {
            type Output = Dyadic;
            fn $method(self, rhs: &'a Dyadic) -> Dyadic {
                (&self).$method(rhs)
            }
        }
    };
}

forward_owned!(Add, add);
forward_owned!(Sub, sub);
forward_owned!(Mul, mul);

impl PartialOrd for Dyadic {
    fn partial_cmp(&self, other: &Self) -> Option<Ordering> {
        Some(self.cmp(other))
    }
}

impl Ord for Dyadic {
    fn cmp(&self, other: &Self) -> Ordering {
        (self - other).signum().cmp(&0)
    }
}

/// Result of [`sum_with_order_certificate`].
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct OrderCertificate {
    pub sum: Dyadic,
    /// `-p0`, where `p0` is the largest exponent among nonzero terms.
    /// `Infinite` when every term is zero.
    pub bound: Valuation,
    /// True iff an odd number of terms attain the largest exponent; then
    /// `ord(sum) == bound`, otherwise `ord(sum) > bound`.
    pub attains_bound: bool,
}

/// Sums `terms` exactly and returns the lower bound on `ord(sum)` together
/// with the parity test that decides whether the bound is attained.
pub fn sum_with_order_certificate(terms: &[Dyadic]) -> OrderCertificate {
    let sum = Dyadic::sum(terms);
    let top = terms.iter().filter(|t| !t.is_zero()).map(|t| t.exponent).max();
    match top {
        None => OrderCertificate {
            sum,
            bound: Valuation::Infinite,
            attains_bound: false,
        },
        Some(p0) => {
            let hits = terms
                .iter()
                .filter(|t| !t.is_zero() && t.exponent == p0)
                .count();
            OrderCertificate {
                sum,
                bound: Valuation::Finite(-p0),
                attains_bound: hits % 2 == 1,
            }
        }
    }
}

impl fmt::Display for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            f.write_str("0")
        } else {
            write!(f, "{}/2^{}", self.numerator, self.exponent)
        }
    }
}

impl fmt::Debug for Dyadic {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        write!(f, "Dyadic({self})")
    }
}

#[derive(Debug, Error, PartialEq, Eq)]
pub enum ParseDyadicError {
    #[error("expected \"0\" or \"K/2^q\", got {0:?}")]
    Malformed(String),
    #[error("numerator {0} is not odd; dyadic strings must be normalized")]
    EvenNumerator(String),
}

impl FromStr for Dyadic {
    type Err = ParseDyadicError;

    fn from_str(s: &str) -> Result<Self, Self::Err> {
        if s == "0" {
            return Ok(Dyadic::zero());
        }
        let malformed = || ParseDyadicError::Malformed(s.to_string());
        let (num, exp) = s.split_once("/2^").ok_or_else(malformed)?;
        let numerator: BigInt = parse_decimal(num).ok_or_else(malformed)?;
        let exponent: i64 = parse_decimal(exp).ok_or_else(malformed)?;
        if !numerator.bit(0) {
            return Err(ParseDyadicError::EvenNumerator(num.to_string()));
        }
        Ok(Dyadic {
            numerator,
            exponent,
        })
    }
}

// Plain decimal with an optional leading '-'; rejects '+', whitespace and
// leading zeros so that the string form stays canonical.
fn parse_decimal<T: FromStr>(s: &str) -> Option<T> {
    let digits = s.strip_prefix('-').unwrap_or(s);
    let canonical = !digits.is_empty()
        && digits.bytes().all(|b| b.is_ascii_digit())
        && (digits == "0" || !digits.starts_with('0'));
    if !canonical {
        return None;
    }
    s.parse().ok()
}

/// JSON object form `{"num": "<decimal>", "exp": <int>}`.
#[derive(Clone, Debug, PartialEq, Eq, Serialize, Deserialize)]
pub struct DyadicObject {
    pub num: String,
    pub exp: i64,
}

impl From<&Dyadic> for DyadicObject {
    fn from(d: &Dyadic) -> Self {
        DyadicObject {
            num: d.numerator.to_string(),
            exp: d.exponent,
        }
    }
}

impl TryFrom<DyadicObject> for Dyadic {
    type Error = ParseDyadicError;

    fn try_from(obj: DyadicObject) -> Result<Self, Self::Error> {
        let numerator: BigInt = parse_decimal(&obj.num)
            .ok_or_else(|| ParseDyadicError::Malformed(obj.num.clone()))?;
        if numerator.is_zero() {
            return Ok(Dyadic::zero());
        }
        if !numerator.bit(0) {
            return Err(ParseDyadicError::EvenNumerator(obj.num));
        }
        Ok(Dyadic {
            numerator,
            exponent: obj.exp,
        })
    }
}

impl Serialize for Dyadic {
    fn serialize<S: Serializer>(&self, serializer: S) -> Result<S::Ok, S::Error> {
        serializer.collect_str(self)
    }
}

impl<'de> Deserialize<'de> for Dyadic {
    fn deserialize<D: Deserializer<'de>>(deserializer: D) -> Result<Self, D::Error> {
        #[derive(Deserialize)]
        #[serde(untagged)]
        enum Either {
            Text(String),
            Object(DyadicObject),
        }
        match Either::deserialize(deserializer)? {
            Either::Text(s) => s.parse().map_err(serde::de::Error::custom),
            Either::Object(o) => Dyadic::try_from(o).map_err(serde::de::Error::custom),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    fn d(s: &str) -> Dyadic {
        s.parse().unwrap()
    }

    fn frac(n: i64, e: i64) -> Dyadic {
        Dyadic::new(n, e)
    }

    #[test]
    fn ord_examples() {
        assert_eq!(Dyadic::from_int(12).ord(), Valuation::Finite(2));
        assert_eq!(Dyadic::zero().ord(), Valuation::Infinite);
        assert_eq!(frac(3, 3).ord(), Valuation::Finite(-3));
        // unreduced 6/16 = 3/8
        assert_eq!(frac(6, 4).ord(), Valuation::Finite(-3));
        assert_eq!(ord_int(&BigInt::from(40)), Valuation::Finite(3));
    }

    #[test]
    fn arithmetic_examples() {
        let one = &frac(1, 1) + &frac(1, 1);
        assert!(one.is_one());
        assert_eq!(one.ord(), Valuation::Finite(0));

        let s = &frac(1, 3) + &frac(1, 2);
        assert_eq!(s, frac(3, 3));
        assert_eq!(s.ord(), Valuation::Finite(-3));

        let p = &frac(3, 3) * &frac(5, 2);
        assert_eq!(p, frac(15, 5));
        assert_eq!(p.ord(), Valuation::Finite(-5));

        assert_eq!(-frac(3, 3), frac(-3, 3));
        assert!((&frac(3, 3) - &frac(3, 3)).is_zero());
    }

    #[test]
    fn integers_use_negative_exponents() {
        let twelve = Dyadic::from_int(12);
        assert_eq!(twelve.numerator(), &BigInt::from(3));
        assert_eq!(twelve.exponent(), -2);
        assert_eq!(twelve.to_string(), "3/2^-2");
    }

    #[test]
    fn order_certificate_examples() {
        let c = sum_with_order_certificate(&[frac(1, 1), frac(1, 1)]);
        assert!(c.sum.is_one());
        assert_eq!(c.bound, Valuation::Finite(-1));
        assert!(!c.attains_bound);
        assert!(c.sum.ord() > c.bound);

        let c = sum_with_order_certificate(&[frac(1, 1), frac(1, 1), frac(1, 1)]);
        assert_eq!(c.sum, frac(3, 1));
        assert!(c.attains_bound);
        assert_eq!(c.sum.ord(), c.bound);

        let c = sum_with_order_certificate(&[frac(1, 3), frac(1, 2), frac(1, 3)]);
        assert_eq!(c.sum, frac(1, 1));
        assert_eq!(c.bound, Valuation::Finite(-3));
        assert!(!c.attains_bound);
        assert_eq!(c.sum.ord(), Valuation::Finite(-1));

        let c = sum_with_order_certificate(&[Dyadic::zero()]);
        assert_eq!(c.bound, Valuation::Infinite);
        assert!(c.sum.is_zero());
    }

    #[test]
    fn string_format() {
        assert_eq!(Dyadic::zero().to_string(), "0");
        assert_eq!(frac(-1, 3).to_string(), "-1/2^3");
        assert_eq!(d("-1/2^3"), frac(-1, 3));
        assert_eq!(d("0"), Dyadic::zero());
        assert_eq!(d("5/2^0"), Dyadic::from_int(5));
    }

    #[test]
    fn string_format_rejects_noncanonical() {
        for bad in ["", "1/2", "2/2^3", "0/2^1", "+1/2^3", "01/2^3", "1/2^ 3", "1/2^03", "x"] {
            assert!(bad.parse::<Dyadic>().is_err(), "{bad:?} should be rejected");
        }
    }

    #[test]
    fn json_forms() {
        let x = frac(-7, 5);
        assert_eq!(serde_json::to_string(&x).unwrap(), "\"-7/2^5\"");
        let back: Dyadic = serde_json::from_str("\"-7/2^5\"").unwrap();
        assert_eq!(back, x);
        let obj: Dyadic = serde_json::from_str(r#"{"num":"-7","exp":5}"#).unwrap();
        assert_eq!(obj, x);
        let obj = serde_json::to_string(&DyadicObject::from(&x)).unwrap();
        assert_eq!(obj, r#"{"num":"-7","exp":5}"#);
        let zero: Dyadic = serde_json::from_str(r#"{"num":"0","exp":9}"#).unwrap();
        assert!(zero.is_zero());
        assert!(serde_json::from_str::<Dyadic>(r#"{"num":"6","exp":1}"#).is_err());
    }

    #[test]
    fn sum_and_dot_match_pairwise() {
        let xs = [frac(3, 4), frac(-5, 2), frac(7, 4), frac(1, 0), Dyadic::zero()];
        let folded = xs.iter().fold(Dyadic::zero(), |acc, x| &acc + x);
        assert_eq!(Dyadic::sum(&xs), folded);
        let dot = Dyadic::dot(xs.iter().zip(xs.iter().rev()));
        let naive = xs
            .iter()
            .zip(xs.iter().rev())
            .fold(Dyadic::zero(), |acc, (a, b)| &acc + &(a * b));
        assert_eq!(dot, naive);
        assert!(Dyadic::sum(std::iter::empty()).is_zero());
    }

    #[test]
    fn ordering_and_lossy_float() {
        assert!(frac(1, 3) < frac(1, 2));
        assert!(frac(-1, 1) < Dyadic::zero());
        assert_eq!(frac(-3, 3).to_f64_lossy(), -0.375);
        assert_eq!(Dyadic::from_int(12).to_f64_lossy(), 12.0);
    }
}
