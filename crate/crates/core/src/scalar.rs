//! Number types shared by the exact and floating code paths.
//!
//! Everything polynomial (recurrences, q-numbers, coefficient algebra) is written
//! once against [`Scalar`], which is implemented for exact rationals
//! ([`ExactScalar`]), `f64`, and the double-double [`Quad`]. Code that needs
//! square roots or transcendental functions uses [`Real`], which only the two
//! floating types implement.

use std::fmt::Debug;
use std::ops::Neg;
use std::str::FromStr;

use num_bigint::BigInt;
use num_rational::BigRational;
use num_traits::{Num, One, Signed, ToPrimitive, Zero};

/// Double-double float, about 31 significant digits.
pub type Quad = qd::Quad<f64>;

use crate::error::{Error, Result};

/// Arbitrary-precision rational, always in lowest terms with a positive denominator.
pub type ExactScalar = BigRational;

/// Ring-with-division operations common to exact and floating scalars.
pub trait Scalar:
    Clone + Debug + PartialEq + PartialOrd + Num + Neg<Output = Self> + Send + Sync + 'static
{
    fn from_i64(v: i64) -> Self;

    fn abs_val(&self) -> Self;

    /// Nearest `f64` (used for diagnostics and domain guards).
    fn to_f64(&self) -> f64;

    fn is_exact() -> bool {
        false
    }

    fn powu(&self, mut e: u32) -> Self {
        let mut base = self.clone();
        let mut acc = Self::one();
        while e > 0 {
            if e & 1 == 1 {
                acc = acc * base.clone();
            }
            e >>= 1;
            if e > 0 {
                base = base.clone() * base;
            }
        }
        acc
    }
}

/// Floating scalars: `f64` and double-double [`Quad`].
pub trait Real: Scalar + Copy {
    /// Unit roundoff of the type.
    const EPSILON: f64;

    fn from_f64(v: f64) -> Self;
    fn sqrt(self) -> Self;
    fn exp(self) -> Self;
    fn ln(self) -> Self;
    fn pi() -> Self;
    fn from_exact(r: &ExactScalar) -> Self;
    fn to_exact(self) -> ExactScalar;
}

impl Scalar for ExactScalar {
    fn from_i64(v: i64) -> Self {
        BigRational::from_integer(BigInt::from(v))
    }

    fn abs_val(&self) -> Self {
        self.abs()
    }

    fn to_f64(&self) -> f64 {
        ToPrimitive::to_f64(self).unwrap_or(f64::NAN)
    }

    fn is_exact() -> bool {
        true
    }
}

impl Scalar for f64 {
    fn from_i64(v: i64) -> Self {
        v as f64
    }

    fn abs_val(&self) -> Self {
        self.abs()
    }

    fn to_f64(&self) -> f64 {
        *self
    }
}

impl Real for f64 {
    const EPSILON: f64 = f64::EPSILON;

    fn from_f64(v: f64) -> Self {
        v
    }
    fn sqrt(self) -> Self {
        f64::sqrt(self)
    }
    fn exp(self) -> Self {
        f64::exp(self)
    }
    fn ln(self) -> Self {
        f64::ln(self)
    }
    fn pi() -> Self {
        std::f64::consts::PI
    }
    fn from_exact(r: &ExactScalar) -> Self {
        Scalar::to_f64(r)
    }
    fn to_exact(self) -> ExactScalar {
        BigRational::from_float(self).expect("finite f64")
    }
}

impl Scalar for Quad {
    fn from_i64(v: i64) -> Self {
        // i64 values above 2^53 need both limbs.
        let hi = v as f64;
        let lo = (v - hi as i64) as f64;
        Quad::from(hi) + Quad::from(lo)
    }

    fn abs_val(&self) -> Self {
        self.abs()
    }

    fn to_f64(&self) -> f64 {
        self.0 + self.1
    }
}

impl Real for Quad {
    const EPSILON: f64 = 4.93038065763132e-32;

    fn from_f64(v: f64) -> Self {
        Quad::from(v)
    }
    fn sqrt(self) -> Self {
        if self == Quad::ZERO {
            return Quad::ZERO;
        }
        Quad::sqrt(self)
    }
    fn exp(self) -> Self {
        Quad::exp(self)
    }
    fn ln(self) -> Self {
        Quad::ln(self)
    }
    fn pi() -> Self {
        Quad::PI
    }
    fn from_exact(r: &ExactScalar) -> Self {
        let hi = Scalar::to_f64(r);
        if !hi.is_finite() {
            return Quad::from(hi);
        }
        let rest = r - BigRational::from_float(hi).expect("finite");
        Quad::from(hi) + Quad::from(Scalar::to_f64(&rest))
    }
    fn to_exact(self) -> ExactScalar {
        BigRational::from_float(self.0).expect("finite")
            + BigRational::from_float(self.1).expect("finite")
    }
}

/// Exact rational `p/r`.
pub fn ratio(p: i64, r: i64) -> ExactScalar {
    BigRational::new(BigInt::from(p), BigInt::from(r))
}

/// Parses `"p/r"`, an integer, or a plain decimal such as `"-0.35"` or `"1e-3"`
/// into an exact rational. Decimals are read as the exact decimal fraction they
/// spell, not as the nearest binary float.
pub fn parse_rational(s: &str) -> Result<ExactScalar> {
    let s = s.trim();
    let bad = || Error::Parse(format!("not a rational number: {s:?}"));
    if let Some((p, r)) = s.split_once('/') {
        let p = BigInt::from_str(p.trim()).map_err(|_| bad())?;
        let r = BigInt::from_str(r.trim()).map_err(|_| bad())?;
        if r.is_zero() {
            return Err(Error::Parse(format!("zero denominator in {s:?}")));
        }
        return Ok(BigRational::new(p, r));
    }
    let (mantissa, exponent) = match s.find(['e', 'E']) {
        Some(pos) => (&s[..pos], s[pos + 1..].parse::<i32>().map_err(|_| bad())?),
        None => (s, 0),
    };
    let (neg, digits) = match mantissa.strip_prefix('-') {
        Some(rest) => (true, rest),
        None => (false, mantissa.strip_prefix('+').unwrap_or(mantissa)),
    };
    let (int_part, frac_part) = digits.split_once('.').unwrap_or((digits, ""));
    if int_part.is_empty() && frac_part.is_empty() {
        return Err(bad());
    }
    if !int_part.chars().chain(frac_part.chars()).all(|c| c.is_ascii_digit()) {
        return Err(bad());
    }
    let all = format!("{int_part}{frac_part}");
    let mut value = BigRational::from_integer(BigInt::from_str(&all).map_err(|_| bad())?);
    let shift = exponent - frac_part.len() as i32;
    let ten = BigRational::from_integer(BigInt::from(10));
    if shift >= 0 {
        value *= num_traits::pow(ten, shift as usize);
    } else {
        value /= num_traits::pow(ten, (-shift) as usize);
    }
    Ok(if neg { -value } else { value })
}

/// The exact decimal fraction printed by `f64`'s shortest round-trip formatting,
/// so that `0.3` becomes `3/10` rather than the binary float nearest to it.
pub fn decimal_to_rational(v: f64) -> Result<ExactScalar> {
    if !v.is_finite() {
        return Err(Error::Parse(format!("non-finite value {v}")));
    }
    parse_rational(&format!("{v:?}"))
}

/// Canonical `"p/r"` (or `"p"` for integers) rendering.
pub fn format_rational(r: &ExactScalar) -> String {
    if r.denom().is_one() {
        r.numer().to_string()
    } else {
        format!("{}/{}", r.numer(), r.denom())
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn parses_fractions_and_decimals() {
        assert_eq!(parse_rational("3/6").unwrap(), ratio(1, 2));
        assert_eq!(parse_rational("-0.35").unwrap(), ratio(-7, 20));
        assert_eq!(parse_rational("1e-3").unwrap(), ratio(1, 1000));
        assert_eq!(parse_rational("2.5E1").unwrap(), ratio(25, 1));
        assert_eq!(parse_rational("7").unwrap(), ratio(7, 1));
        assert!(parse_rational("1/0").is_err());
        assert!(parse_rational("abc").is_err());
        assert!(parse_rational(".").is_err());
    }

    #[test]
    fn decimal_floats_map_to_short_fractions() {
        assert_eq!(decimal_to_rational(0.3).unwrap(), ratio(3, 10));
        assert_eq!(decimal_to_rational(-0.5).unwrap(), ratio(-1, 2));
        assert_eq!(decimal_to_rational(0.0).unwrap(), ratio(0, 1));
    }

    #[test]
    fn quad_conversion_keeps_both_limbs() {
        let third = ratio(1, 3);
        let q = Quad::from_exact(&third);
        let err = (q * Quad::from(3.0) - Quad::ONE).abs();
        assert!(err.0 < 1e-31);
        let back = q.to_exact();
        let diff = Scalar::to_f64(&(back - third)).abs();
        assert!(diff < 1e-32);
    }

    #[test]
    fn powu_matches_repeated_product() {
        assert_eq!(ratio(2, 3).powu(5), ratio(32, 243));
        assert_eq!(ratio(0, 1).powu(0), ratio(1, 1));
        assert_eq!(Scalar::powu(&0.5f64, 3), 0.125);
    }

    #[test]
    fn format_is_canonical() {
        assert_eq!(format_rational(&ratio(6, -4)), "-3/2");
        assert_eq!(format_rational(&ratio(4, 2)), "2");
    }
}
