//! Dense univariate and bivariate polynomials over a [`Scalar`] field.
//!
//! Coefficients are stored densely by power. Every constructor and operation
//! normalizes (trailing zeros trimmed), so structural equality is polynomial
//! equality.

use std::fmt;
use std::ops::{Add, Mul, Neg, Sub};

use num_traits::Zero;
use serde::{Deserialize, Deserializer, Serialize, Serializer};

use crate::scalar::{format_rational, parse_rational, ExactScalar, Scalar};

/// `Σ c_i x^i`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly1<T> {
    coeffs: Vec<T>,
}

impl<T: Scalar> Poly1<T> {
    pub fn new(mut coeffs: Vec<T>) -> Self {
        while coeffs.last().is_some_and(|c| c.is_zero()) {
            coeffs.pop();
        }
        Poly1 { coeffs }
    }

    pub fn zero() -> Self {
        Poly1 { coeffs: Vec::new() }
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![c])
    }

    /// The monomial `x`.
    pub fn x() -> Self {
        Self::new(vec![T::zero(), T::one()])
    }

    pub fn coeffs(&self) -> &[T] {
        &self.coeffs
    }

    pub fn coeff(&self, power: usize) -> T {
        self.coeffs.get(power).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    /// `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn leading_coeff(&self) -> T {
        self.coeffs.last().cloned().unwrap_or_else(T::zero)
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::new(self.coeffs.iter().map(|a| a.clone() * c.clone()).collect())
    }

    pub fn eval(&self, x: &T) -> T {
        self.coeffs.iter().rev().fold(T::zero(), |acc, c| acc * x.clone() + c.clone())
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Poly1<U> {
        Poly1::new(self.coeffs.iter().map(f).collect())
    }

    /// The same polynomial read as a bivariate one in `x`.
    pub fn in_x(&self) -> Poly2<T> {
        Poly2::new(self.coeffs.iter().map(|c| vec![c.clone()]).collect())
    }

    /// The same polynomial read as a bivariate one in `y`.
    pub fn in_y(&self) -> Poly2<T> {
        Poly2::new(vec![self.coeffs.clone()])
    }
}

impl<T: Scalar> Add for &Poly1<T> {
    type Output = Poly1<T>;
    fn add(self, rhs: Self) -> Poly1<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly1::new((0..n).map(|i| self.coeff(i) + rhs.coeff(i)).collect())
    }
}

impl<T: Scalar> Sub for &Poly1<T> {
    type Output = Poly1<T>;
    fn sub(self, rhs: Self) -> Poly1<T> {
        let n = self.coeffs.len().max(rhs.coeffs.len());
        Poly1::new((0..n).map(|i| self.coeff(i) - rhs.coeff(i)).collect())
    }
}

impl<T: Scalar> Mul for &Poly1<T> {
    type Output = Poly1<T>;
    fn mul(self, rhs: Self) -> Poly1<T> {
        if self.is_zero() || rhs.is_zero() {
            return Poly1::zero();
        }
        let mut out = vec![T::zero(); self.coeffs.len() + rhs.coeffs.len() - 1];
        for (i, a) in self.coeffs.iter().enumerate() {
            if a.is_zero() {
                continue;
            }
            for (j, b) in rhs.coeffs.iter().enumerate() {
                out[i + j] = out[i + j].clone() + a.clone() * b.clone();
            }
        }
        Poly1::new(out)
    }
}

impl<T: Scalar> Neg for &Poly1<T> {
    type Output = Poly1<T>;
    fn neg(self) -> Poly1<T> {
        Poly1 { coeffs: self.coeffs.iter().map(|c| -c.clone()).collect() }
    }
}

/// `Σ c_{ij} x^i y^j`, stored as rows indexed by the power of `x`.
#[derive(Debug, Clone, PartialEq)]
pub struct Poly2<T> {
    rows: Vec<Vec<T>>,
}

impl<T: Scalar> Poly2<T> {
    pub fn new(mut rows: Vec<Vec<T>>) -> Self {
        for row in rows.iter_mut() {
            while row.last().is_some_and(|c| c.is_zero()) {
                row.pop();
            }
        }
        while rows.last().is_some_and(|r| r.is_empty()) {
            rows.pop();
        }
        Poly2 { rows }
    }

    pub fn zero() -> Self {
        Poly2 { rows: Vec::new() }
    }

    pub fn one() -> Self {
        Self::constant(T::one())
    }

    pub fn constant(c: T) -> Self {
        Self::new(vec![vec![c]])
    }

    pub fn x() -> Self {
        Self::new(vec![vec![], vec![T::one()]])
    }

    pub fn y() -> Self {
        Self::new(vec![vec![T::zero(), T::one()]])
    }

    /// `c x^i y^j`.
    pub fn monomial(c: T, i: usize, j: usize) -> Self {
        let mut rows = vec![Vec::new(); i + 1];
        rows[i] = vec![T::zero(); j + 1];
        rows[i][j] = c;
        Self::new(rows)
    }

    pub fn rows(&self) -> &[Vec<T>] {
        &self.rows
    }

    /// Coefficient of `x^i y^j`.
    pub fn coeff(&self, i: usize, j: usize) -> T {
        self.rows.get(i).and_then(|r| r.get(j)).cloned().unwrap_or_else(T::zero)
    }

    pub fn is_zero(&self) -> bool {
        self.rows.is_empty()
    }

    /// Highest `i + j` over nonzero coefficients; `None` for zero.
    pub fn total_degree(&self) -> Option<usize> {
        self.terms().map(|(i, j, _)| i + j).max()
    }

    pub fn degree_x(&self) -> Option<usize> {
        self.rows.len().checked_sub(1)
    }

    pub fn degree_y(&self) -> Option<usize> {
        self.rows.iter().filter_map(|r| r.len().checked_sub(1)).max()
    }

    /// Nonzero terms as `(power of x, power of y, coefficient)`.
    pub fn terms(&self) -> impl Iterator<Item = (usize, usize, &T)> {
        self.rows.iter().enumerate().flat_map(|(i, row)| {
            row.iter().enumerate().filter(|(_, c)| !c.is_zero()).map(move |(j, c)| (i, j, c))
        })
    }

    pub fn scale(&self, c: &T) -> Self {
        Self::new(
            self.rows
                .iter()
                .map(|row| row.iter().map(|a| a.clone() * c.clone()).collect())
                .collect(),
        )
    }

    /// Horner evaluation, exact when the scalars are exact.
    pub fn eval(&self, x: &T, y: &T) -> T {
        self.rows.iter().rev().fold(T::zero(), |acc, row| {
            let inner = row.iter().rev().fold(T::zero(), |a, c| a * y.clone() + c.clone());
            acc * x.clone() + inner
        })
    }

    pub fn map<U: Scalar>(&self, f: impl Fn(&T) -> U) -> Poly2<U> {
        Poly2::new(self.rows.iter().map(|row| row.iter().map(&f).collect()).collect())
    }

    /// `p(y, x)`.
    pub fn swap_xy(&self) -> Self {
        let ny = self.degree_y().map_or(0, |d| d + 1);
        Self::new(
            (0..ny)
                .map(|j| (0..self.rows.len()).map(|i| self.coeff(i, j)).collect())
                .collect(),
        )
    }

    /// `p(a x, b y)`.
    pub fn rescale(&self, a: &T, b: &T) -> Self {
        Self::new(
            self.rows
                .iter()
                .enumerate()
                .map(|(i, row)| {
                    let ai = a.powu(i as u32);
                    row.iter()
                        .enumerate()
                        .map(|(j, c)| c.clone() * ai.clone() * b.powu(j as u32))
                        .collect()
                })
                .collect(),
        )
    }

    pub fn pow(&self, e: u32) -> Self {
        (0..e).fold(Self::one(), |acc, _| &acc * self)
    }
}

impl<T: Scalar> Add for &Poly2<T> {
    type Output = Poly2<T>;
    fn add(self, rhs: Self) -> Poly2<T> {
        let nx = self.rows.len().max(rhs.rows.len());
        Poly2::new(
            (0..nx)
                .map(|i| {
                    let a = self.rows.get(i).map_or(&[][..], |r| r.as_slice());
                    let b = rhs.rows.get(i).map_or(&[][..], |r| r.as_slice());
                    let ny = a.len().max(b.len());
                    (0..ny)
                        .map(|j| {
                            let ca = a.get(j).cloned().unwrap_or_else(T::zero);
                            let cb = b.get(j).cloned().unwrap_or_else(T::zero);
                            ca + cb
                        })
                        .collect()
                })
                .collect(),
        )
    }
}

impl<T: Scalar> Neg for &Poly2<T> {
    type Output = Poly2<T>;
    fn neg(self) -> Poly2<T> {
        Poly2 { rows: self.rows.iter().map(|r| r.iter().map(|c| -c.clone()).collect()).collect() }
    }
}

impl<T: Scalar> Sub for &Poly2<T> {
    type Output = Poly2<T>;
    fn sub(self, rhs: Self) -> Poly2<T> {
        self + &(-rhs)
    }
}

impl<T: Scalar> Mul for &Poly2<T> {
    type Output = Poly2<T>;
    fn mul(self, rhs: Self) -> Poly2<T> {
        if self.is_zero() || rhs.is_zero() {
            return Poly2::zero();
        }
        let nx = self.rows.len() + rhs.rows.len() - 1;
        let ny = self.degree_y().unwrap_or(0) + rhs.degree_y().unwrap_or(0) + 1;
        let mut out = vec![vec![T::zero(); ny]; nx];
        for (i1, r1) in self.rows.iter().enumerate() {
            for (j1, a) in r1.iter().enumerate() {
                if a.is_zero() {
                    continue;
                }
                for (i2, r2) in rhs.rows.iter().enumerate() {
                    for (j2, b) in r2.iter().enumerate() {
                        if b.is_zero() {
                            continue;
                        }
                        let slot = &mut out[i1 + i2][j1 + j2];
                        *slot = slot.clone() + a.clone() * b.clone();
                    }
                }
            }
        }
        Poly2::new(out)
    }
}

macro_rules! forward_owned_ops {
    ($poly:ident) => {
        impl<T: Scalar> Add for $poly<T> {
            type Output = $poly<T>;
            fn add(self, rhs: Self) -> $poly<T> {
                &self + &rhs
            }
        }
        impl<T: Scalar> Sub for $poly<T> {
            type Output = $poly<T>;
            fn sub(self, rhs: Self) -> $poly<T> {
                &self - &rhs
            }
        }
        impl<T: Scalar> Mul for $poly<T> {
            type Output = $poly<T>;
            fn mul(self, rhs: Self) -> $poly<T> {
                &self * &rhs
            }
        }
        impl<T: Scalar> Neg for $poly<T> {
            type Output = $poly<T>;
            fn neg(self) -> $poly<T> {
                -&self
            }
        }
    };
}

forward_owned_ops!(Poly1);
forward_owned_ops!(Poly2);

fn fmt_term(f: &mut fmt::Formatter<'_>, first: bool, c: &ExactScalar, mono: &str) -> fmt::Result {
    let neg = c < &ExactScalar::zero();
    let mag = if neg { -c.clone() } else { c.clone() };
    match (first, neg) {
        (true, true) => write!(f, "-")?,
        (false, true) => write!(f, " - ")?,
        (false, false) => write!(f, " + ")?,
        (true, false) => {}
    }
    let unit = mag == ExactScalar::from_i64(1);
    match (unit, mono.is_empty()) {
        (true, false) => write!(f, "{mono}"),
        (_, true) => write!(f, "{}", format_rational(&mag)),
        (false, false) => write!(f, "{}*{mono}", format_rational(&mag)),
    }
}

fn monomial_name(var: &str, p: usize) -> String {
    match p {
        0 => String::new(),
        1 => var.to_string(),
        _ => format!("{var}^{p}"),
    }
}

impl fmt::Display for Poly1<ExactScalar> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut first = true;
        for (i, c) in self.coeffs.iter().enumerate().rev() {
            if c.is_zero() {
                continue;
            }
            fmt_term(f, first, c, &monomial_name("x", i))?;
            first = false;
        }
        Ok(())
    }
}

impl fmt::Display for Poly2<ExactScalar> {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        if self.is_zero() {
            return write!(f, "0");
        }
        let mut terms: Vec<_> = self.terms().collect();
        terms.sort_by_key(|&(i, j, _)| (std::cmp::Reverse(i + j), std::cmp::Reverse(i)));
        for (k, (i, j, c)) in terms.into_iter().enumerate() {
            let mono = [monomial_name("x", i), monomial_name("y", j)]
                .into_iter()
                .filter(|s| !s.is_empty())
                .collect::<Vec<_>>()
                .join("*");
            fmt_term(f, k == 0, c, &mono)?;
        }
        Ok(())
    }
}

/// Exact coefficient as a `[numerator, denominator]` string pair.
fn coeff_to_wire(c: &ExactScalar) -> [String; 2] {
    [c.numer().to_string(), c.denom().to_string()]
}

fn coeff_from_wire<E: serde::de::Error>(pair: &[String; 2]) -> Result<ExactScalar, E> {
    parse_rational(&format!("{}/{}", pair[0], pair[1])).map_err(E::custom)
}

#[derive(Serialize, Deserialize)]
struct Poly1Wire {
    coefficients: Vec<[String; 2]>,
}

#[derive(Serialize, Deserialize)]
struct Poly2Wire {
    /// `coefficients[i][j]` multiplies `x^i y^j`.
    coefficients: Vec<Vec<[String; 2]>>,
}

impl Serialize for Poly1<ExactScalar> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        Poly1Wire { coefficients: self.coeffs.iter().map(coeff_to_wire).collect() }.serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly1<ExactScalar> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let wire = Poly1Wire::deserialize(d)?;
        let coeffs = wire.coefficients.iter().map(coeff_from_wire).collect::<Result<_, _>>()?;
        Ok(Poly1::new(coeffs))
    }
}

impl Serialize for Poly2<ExactScalar> {
    fn serialize<S: Serializer>(&self, s: S) -> Result<S::Ok, S::Error> {
        Poly2Wire {
            coefficients: self.rows.iter().map(|r| r.iter().map(coeff_to_wire).collect()).collect(),
        }
        .serialize(s)
    }
}

impl<'de> Deserialize<'de> for Poly2<ExactScalar> {
    fn deserialize<D: Deserializer<'de>>(d: D) -> Result<Self, D::Error> {
        let wire = Poly2Wire::deserialize(d)?;
        let rows = wire
            .coefficients
            .iter()
            .map(|r| r.iter().map(coeff_from_wire::<D::Error>).collect::<Result<Vec<_>, _>>())
            .collect::<Result<Vec<_>, _>>()?;
        Ok(Poly2::new(rows))
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::ratio;
    use proptest::prelude::*;

    type P2 = Poly2<ExactScalar>;

    fn r(p: i64) -> ExactScalar {
        ratio(p, 1)
    }

    #[test]
    fn additive_identity_and_inverse() {
        let p = &(&P2::x() * &P2::y()) + &P2::constant(ratio(3, 2));
        assert_eq!(&p + &P2::zero(), p);
        assert!((&p + &(-&p)).is_zero());
        let s = &P2::x() + &P2::y();
        assert_eq!(s.total_degree(), Some(1));
        assert_eq!(s.coeff(1, 0), r(1));
        assert_eq!(s.coeff(0, 1), r(1));
    }

    #[test]
    fn difference_of_squares() {
        let p = &(&P2::x() - &P2::y()) * &(&P2::x() + &P2::y());
        let expect = &P2::monomial(r(1), 2, 0) - &P2::monomial(r(1), 0, 2);
        assert_eq!(p, expect);
        assert_eq!(&p * &P2::one(), p);
        assert_eq!(p.eval(&r(3), &r(2)), r(5));
        assert_eq!(P2::one().eval(&ratio(7, 3), &ratio(-1, 9)), r(1));
    }

    #[test]
    fn equality_is_structural_after_normalization() {
        assert_eq!(P2::new(vec![vec![r(1), r(0)], vec![]]), P2::one());
        assert_ne!(P2::x(), P2::y());
        assert_eq!(P2::x().swap_xy(), P2::y());
    }

    #[test]
    fn json_uses_string_pairs() {
        let p = &P2::monomial(ratio(-2, 3), 1, 2) + &P2::constant(r(5));
        let json = serde_json::to_string(&p).unwrap();
        assert_eq!(json, r#"{"coefficients":[[["5","1"]],[["0","1"],["0","1"],["-2","3"]]]}"#);
        let back: P2 = serde_json::from_str(&json).unwrap();
        assert_eq!(back, p);
        let q = Poly1::new(vec![ratio(1, 2), r(0), r(-1)]);
        let back: Poly1<ExactScalar> = serde_json::from_str(&serde_json::to_string(&q).unwrap()).unwrap();
        assert_eq!(back, q);
    }

    #[test]
    fn display_is_readable() {
        let p = &(&P2::monomial(r(1), 2, 0) - &P2::monomial(ratio(1, 2), 1, 1)) + &P2::constant(r(-3));
        assert_eq!(p.to_string(), "x^2 - 1/2*x*y - 3");
        assert_eq!(Poly1::new(vec![r(-1), r(0), r(1)]).to_string(), "x^2 - 1");
    }

    fn small_poly() -> impl Strategy<Value = P2> {
        proptest::collection::vec(proptest::collection::vec(-4i64..=4, 0..4), 0..4)
            .prop_map(|rows| P2::new(rows.into_iter().map(|r| r.into_iter().map(|c| ratio(c, 1)).collect()).collect()))
    }

    fn small_rational() -> impl Strategy<Value = ExactScalar> {
        (-7i64..=7, 1i64..=5).prop_map(|(p, q)| ratio(p, q))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(64))]

        #[test]
        fn ring_axioms(a in small_poly(), b in small_poly(), c in small_poly()) {
            prop_assert_eq!(&(&a * &b) * &c, &a * &(&b * &c));
            prop_assert_eq!(&a * &(&b + &c), &(&a * &b) + &(&a * &c));
            prop_assert_eq!(&a * &b, &b * &a);
        }

        #[test]
        fn degree_is_additive(a in small_poly(), b in small_poly()) {
            prop_assume!(!a.is_zero() && !b.is_zero());
            prop_assert_eq!((&a * &b).total_degree().unwrap(), a.total_degree().unwrap() + b.total_degree().unwrap());
        }

        #[test]
        fn eval_is_a_ring_homomorphism(a in small_poly(), b in small_poly(), x in small_rational(), y in small_rational()) {
            prop_assert_eq!((&a + &b).eval(&x, &y), a.eval(&x, &y) + b.eval(&x, &y));
            prop_assert_eq!((&a * &b).eval(&x, &y), a.eval(&x, &y) * b.eval(&x, &y));
        }
    }
}
