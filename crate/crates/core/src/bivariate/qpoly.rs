//! The bivariate polynomials `Q_{i,j}(x,y|ρ,q)` built from the finite expansion
//!
//! `Q_{i,j} = Σ_{s=0}^{j} (−1)^s q^{C(s,2)} [j s]_q ρ^s H_{j−s}(y) P_{i+s}(x|y,ρ,q) / (ρ²)_{i+s}`.

use std::collections::BTreeMap;

use rayon::prelude::*;
use serde::Serialize;

use crate::error::{Error, Result};
use crate::families::{asc_p_poly2_all, hermite_q_poly_all};
use crate::poly::Poly2;
use crate::qarith::{binom2, q_binomial, q_number, q_pochhammer};
use crate::scalar::{format_rational, ExactScalar, Scalar};

/// `(ρ²)_k` for `k = 0..=n`, rejecting any zero factor.
fn rho2_pochhammers<T: Scalar>(n: usize, rho: &T, q: &T) -> Result<Vec<T>> {
    let r2 = rho.clone() * rho.clone();
    let out: Vec<T> = (0..=n).map(|k| q_pochhammer(&r2, q, k)).collect();
    if let Some(k) = out.iter().position(|v| v.is_zero()) {
        return Err(Error::domain(format!("(rho^2; q)_{k} vanishes, so Q is undefined")));
    }
    Ok(out)
}

fn check_params<T: Scalar>(rho: &T, q: &T) -> Result<()> {
    if rho.abs_val() >= T::one() {
        return Err(Error::domain(format!("|rho| must be < 1, got {}", rho.to_f64())));
    }
    crate::qarith::QParam::new(q.clone())?;
    Ok(())
}

/// Expansion coefficients `c_s = (−1)^s q^{C(s,2)} [j s]_q ρ^s / (ρ²)_{i+s}`.
fn expansion_coeffs<T: Scalar>(i: usize, j: usize, rho: &T, q: &T, poch: &[T]) -> Vec<T> {
    (0..=j)
        .map(|s| {
            let sign = if s % 2 == 0 { T::one() } else { -T::one() };
            sign * q.powu(binom2(s)) * q_binomial(j as i64, s as i64, q) * rho.powu(s as u32) / poch[i + s].clone()
        })
        .collect()
}

/// `Q_{i,j}(x,y|ρ,q)` as an exact (or floating-coefficient) polynomial.
pub fn q_poly<T: Scalar>(i: usize, j: usize, rho: &T, q: &T) -> Result<Poly2<T>> {
    check_params(rho, q)?;
    let poch = rho2_pochhammers(i + j, rho, q)?;
    let hermite: Vec<Poly2<T>> = hermite_q_poly_all(j, q).iter().map(|h| h.in_y()).collect();
    let p = asc_p_poly2_all(i + j, rho, q)?;
    Ok(combine(i, j, rho, q, &poch, &hermite, &p))
}

fn combine<T: Scalar>(i: usize, j: usize, rho: &T, q: &T, poch: &[T], hermite_y: &[Poly2<T>], p: &[Poly2<T>]) -> Poly2<T> {
    expansion_coeffs(i, j, rho, q, poch)
        .into_iter()
        .enumerate()
        .fold(Poly2::zero(), |acc, (s, c)| &acc + &(&hermite_y[j - s] * &p[i + s]).scale(&c))
}

/// `Q_{i,j}(x,y|ρ,q)` at a point, evaluated through the expansion without
/// forming coefficients.
pub fn q_value<T: Scalar>(i: usize, j: usize, x: &T, y: &T, rho: &T, q: &T) -> Result<T> {
    QEvaluator::new(x.clone(), y.clone(), rho.clone(), q.clone())?.value(i, j)
}

/// `Q_{k,k}(x,y)` for `k = 0..=n`.
pub fn q_diagonal_values<T: Scalar>(n: usize, x: &T, y: &T, rho: &T, q: &T) -> Result<Vec<T>> {
    let mut eval = QEvaluator::new(x.clone(), y.clone(), rho.clone(), q.clone())?;
    (0..=n).map(|k| eval.value(k, k)).collect()
}

/// Point evaluator for many `Q_{i,j}` at one `(x, y)`.
///
/// `H_k(y)`, `P_k(x|y)`, `(ρ²)_k` and the q-binomial rows are grown on demand
/// and shared across calls, so a batch of `Q`s up to degree `D` costs
/// `O(D²)` per polynomial rather than `O(D³)`.
#[derive(Debug, Clone)]
pub struct QEvaluator<T> {
    x: T,
    y: T,
    rho: T,
    q: T,
    /// `H_k(y|q)`.
    h: Vec<T>,
    /// `P_k(x|y,ρ,q)`.
    p: Vec<T>,
    /// `(ρ²; q)_k`.
    poch: Vec<T>,
    /// `binom[j][s] = [j s]_q`.
    binom: Vec<Vec<T>>,
}

impl<T: Scalar> QEvaluator<T> {
    pub fn new(x: T, y: T, rho: T, q: T) -> Result<Self> {
        check_params(&rho, &q)?;
        let ry = rho.clone() * y.clone();
        Ok(QEvaluator {
            h: vec![T::one(), y.clone()],
            p: vec![T::one(), x.clone() - ry],
            poch: vec![T::one()],
            binom: vec![vec![T::one()]],
            x,
            y,
            rho,
            q,
        })
    }

    fn grow(&mut self, degree: usize) -> Result<()> {
        let q = &self.q;
        let r2 = self.rho.clone() * self.rho.clone();
        while self.h.len() <= degree {
            let k = self.h.len() - 1;
            let next = self.y.clone() * self.h[k].clone() - q_number(k, q) * self.h[k - 1].clone();
            self.h.push(next);
        }
        while self.p.len() <= degree {
            let k = self.p.len() - 1;
            let b = self.rho.clone() * self.y.clone() * q.powu(k as u32);
            let c = q_number(k, q) * (T::one() - r2.clone() * q.powu(k as u32 - 1));
            let next = (self.x.clone() - b) * self.p[k].clone() - c * self.p[k - 1].clone();
            self.p.push(next);
        }
        while self.poch.len() <= degree {
            let k = self.poch.len() - 1;
            let next = self.poch[k].clone() * (T::one() - r2.clone() * q.powu(k as u32));
            if next.is_zero() {
                return Err(Error::domain(format!("(rho^2; q)_{} vanishes, so Q is undefined", k + 1)));
            }
            self.poch.push(next);
        }
        while self.binom.len() <= degree {
            let prev = self.binom.last().expect("row 0");
            let j = prev.len();
            let mut row = Vec::with_capacity(j + 1);
            row.push(T::one());
            for s in 1..j {
                row.push(prev[s - 1].clone() + q.powu(s as u32) * prev[s].clone());
            }
            row.push(T::one());
            self.binom.push(row);
        }
        Ok(())
    }

    pub fn value(&mut self, i: usize, j: usize) -> Result<T> {
        self.grow(i + j)?;
        let q = &self.q;
        let mut acc = T::zero();
        let mut rho_s = T::one();
        for s in 0..=j {
            let mut term = q.powu(binom2(s)) * self.binom[j][s].clone() * rho_s.clone() * self.h[j - s].clone()
                * self.p[i + s].clone()
                / self.poch[i + s].clone();
            if s % 2 == 1 {
                term = -term;
            }
            acc = acc + term;
            rho_s = rho_s * self.rho.clone();
        }
        Ok(acc)
    }
}

/// All `Q_{i,j}` with `i + j ≤ max_degree` for fixed `(ρ, q)`.
#[derive(Debug, Clone)]
pub struct QPolyTable<T> {
    rho: T,
    q: T,
    max_degree: usize,
    polys: BTreeMap<(usize, usize), Poly2<T>>,
}

impl<T: Scalar> QPolyTable<T> {
    pub fn build(rho: T, q: T, max_degree: usize) -> Result<Self> {
        check_params(&rho, &q)?;
        let poch = rho2_pochhammers(max_degree, &rho, &q)?;
        let hermite: Vec<Poly2<T>> = hermite_q_poly_all(max_degree, &q).iter().map(|h| h.in_y()).collect();
        let p = asc_p_poly2_all(max_degree, &rho, &q)?;
        let pairs: Vec<(usize, usize)> =
            (0..=max_degree).flat_map(|d| (0..=d).map(move |j| (d - j, j))).collect();
        let polys = pairs
            .par_iter()
            .map(|&(i, j)| ((i, j), combine(i, j, &rho, &q, &poch, &hermite, &p)))
            .collect();
        Ok(QPolyTable { rho, q, max_degree, polys })
    }

    pub fn rho(&self) -> &T {
        &self.rho
    }

    pub fn q(&self) -> &T {
        &self.q
    }

    pub fn max_degree(&self) -> usize {
        self.max_degree
    }

    /// `None` when `i + j` exceeds the table degree.
    pub fn get(&self, i: usize, j: usize) -> Option<&Poly2<T>> {
        self.polys.get(&(i, j))
    }

    pub fn iter(&self) -> impl Iterator<Item = (&(usize, usize), &Poly2<T>)> {
        self.polys.iter()
    }

    /// `Q_{n−j,j}` for `j = 0..=n`, the spanning set of level `n`.
    pub fn level(&self, n: usize) -> Option<Vec<&Poly2<T>>> {
        (0..=n).map(|j| self.get(n - j, j)).collect()
    }
}

#[derive(Serialize)]
struct TableEntry<'a> {
    i: usize,
    j: usize,
    degree: usize,
    poly: &'a Poly2<ExactScalar>,
}

#[derive(Serialize)]
struct TableWire<'a> {
    rho: String,
    q: String,
    max_degree: usize,
    entries: Vec<TableEntry<'a>>,
}

impl Serialize for QPolyTable<ExactScalar> {
    fn serialize<S: serde::Serializer>(&self, s: S) -> std::result::Result<S::Ok, S::Error> {
        TableWire {
            rho: format_rational(&self.rho),
            q: format_rational(&self.q),
            max_degree: self.max_degree,
            entries: self
                .polys
                .iter()
                .map(|(&(i, j), poly)| TableEntry { i, j, degree: i + j, poly })
                .collect(),
        }
        .serialize(s)
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{asc_p_poly2_all, hermite_q_poly};
    use crate::qarith::q_pochhammer;
    use crate::scalar::{ratio, Real};

    fn r(p: i64, q: i64) -> ExactScalar {
        ratio(p, q)
    }

    #[test]
    fn low_order_cases() {
        let (rho, q) = (r(1, 2), r(1, 2));
        assert_eq!(q_poly(0, 0, &rho, &q).unwrap(), Poly2::one());
        let q10 = q_poly(1, 0, &rho, &q).unwrap();
        assert_eq!(q10.eval(&r(1, 1), &r(0, 1)), r(4, 3));
        let p = asc_p_poly2_all(4, &rho, &q).unwrap();
        for k in 0..=4 {
            let expect = p[k].scale(&(r(1, 1) / q_pochhammer(&(rho.clone() * rho.clone()), &q, k)));
            assert_eq!(q_poly(k, 0, &rho, &q).unwrap(), expect);
        }
    }

    #[test]
    fn zero_rho_gives_hermite_products() {
        let q = r(2, 3);
        for i in 0..4 {
            for j in 0..4 {
                let expect = &hermite_q_poly(i, &q).in_x() * &hermite_q_poly(j, &q).in_y();
                assert_eq!(q_poly(i, j, &r(0, 1), &q).unwrap(), expect);
            }
        }
    }

    #[test]
    fn symmetry_and_degree() {
        for (rho, q) in [(r(1, 3), r(1, 2)), (r(-2, 5), r(-1, 3)), (r(3, 4), r(0, 1))] {
            let table = QPolyTable::build(rho, q, 8).unwrap();
            for (&(i, j), poly) in table.iter() {
                assert_eq!(poly.total_degree(), Some(i + j));
                assert_eq!(&poly.swap_xy(), table.get(j, i).unwrap(), "({i},{j})");
            }
        }
    }

    #[test]
    fn point_values_match_polynomials() {
        let (rho, q) = (r(2, 5), r(3, 7));
        let (x, y) = (r(-5, 4), r(2, 3));
        for i in 0..4 {
            for j in 0..4 {
                let poly = q_poly(i, j, &rho, &q).unwrap();
                assert_eq!(q_value(i, j, &x, &y, &rho, &q).unwrap(), poly.eval(&x, &y));
            }
        }
        let diag = q_diagonal_values(4, &x, &y, &rho, &q).unwrap();
        for (k, v) in diag.iter().enumerate() {
            assert_eq!(*v, q_value(k, k, &x, &y, &rho, &q).unwrap());
        }
    }

    #[test]
    fn float_coefficients_track_exact() {
        let table = QPolyTable::build(r(3, 5), r(9, 10), 6).unwrap();
        let float = QPolyTable::build(0.6f64, 0.9f64, 6).unwrap();
        let (x, y) = (1.7f64, -2.3f64);
        for (&(i, j), poly) in table.iter() {
            let exact = poly.map(<f64 as Real>::from_exact).eval(&x, &y);
            let approx = float.get(i, j).unwrap().eval(&x, &y);
            assert!((exact - approx).abs() < 1e-9 * exact.abs().max(1.0));
        }
    }

    #[test]
    fn rejects_bad_rho() {
        assert!(q_poly(1, 1, &r(1, 1), &r(1, 2)).is_err());
        assert!(q_value(1, 1, &0.0, &0.0, &-1.5, &0.5).is_err());
    }

    #[test]
    fn table_serializes_exact_strings() {
        let table = QPolyTable::build(r(1, 3), r(1, 2), 1).unwrap();
        let json = serde_json::to_value(&table).unwrap();
        assert_eq!(json["rho"], "1/3");
        assert_eq!(json["entries"].as_array().unwrap().len(), 3);
        assert_eq!(json["entries"][0]["poly"]["coefficients"][0][0][0], "1");
    }
}
