//! q-numbers, q-factorials, Gaussian binomials and q-Pochhammer symbols.

use crate::error::{Error, Result};
use crate::scalar::{Real, Scalar};
use crate::truncation::{q_product, TruncationPolicy, Truncated};

/// The deformation parameter, restricted to `-1 < q <= 1`.
#[derive(Debug, Clone, PartialEq, PartialOrd)]
pub struct QParam<T>(T);

impl<T: Scalar> QParam<T> {
    pub fn new(q: T) -> Result<Self> {
        let one = T::one();
        if q > -one.clone() && q <= one {
            Ok(QParam(q))
        } else {
            Err(Error::domain(format!("q must satisfy -1 < q <= 1, got {}", q.to_f64())))
        }
    }

    /// Like [`QParam::new`] but also excludes `q = 1`, as needed wherever an
    /// infinite q-product or the bounded support `S(q)` appears.
    pub fn new_convergent(q: T) -> Result<Self> {
        let p = Self::new(q)?;
        if p.0 == T::one() {
            return Err(Error::domain("this operation needs |q| < 1"));
        }
        Ok(p)
    }

    pub fn value(&self) -> &T {
        &self.0
    }

    pub fn into_inner(self) -> T {
        self.0
    }

    pub fn is_convergent(&self) -> bool {
        self.0 != T::one()
    }
}

/// `[n]_q = 1 + q + … + q^{n-1}`, with `[0]_q = 0`.
pub fn q_number<T: Scalar>(n: usize, q: &T) -> T {
    if *q == T::one() {
        return T::from_i64(n as i64);
    }
    if q.is_zero() {
        return if n == 0 { T::zero() } else { T::one() };
    }
    let mut acc = T::zero();
    let mut power = T::one();
    for _ in 0..n {
        acc = acc + power.clone();
        power = power * q.clone();
    }
    acc
}

/// `[n]_q! = [1]_q [2]_q ⋯ [n]_q`, with `[0]_q! = 1`.
pub fn q_factorial<T: Scalar>(n: usize, q: &T) -> T {
    if q.is_zero() {
        return T::one();
    }
    (1..=n).fold(T::one(), |acc, j| acc * q_number(j, q))
}

/// Gaussian binomial `[n k]_q`; zero unless `n >= k >= 0`.
///
/// Built by the q-Pascal rule `[n k] = [n-1 k-1] + q^k [n-1 k]`, which never
/// divides and is therefore exact for rational `q`, including `q = 1`.
pub fn q_binomial<T: Scalar>(n: i64, k: i64, q: &T) -> T {
    if k < 0 || n < 0 || k > n {
        return T::zero();
    }
    let k = k.min(n - k) as usize;
    let n = n as usize;
    if *q == T::one() {
        let mut acc = T::one();
        for i in 0..k {
            acc = acc * T::from_i64((n - i) as i64) / T::from_i64((i + 1) as i64);
        }
        return acc;
    }
    let q_pows: Vec<T> = (0..=k).map(|i| q.powu(i as u32)).collect();
    let mut row = vec![T::zero(); k + 1];
    row[0] = T::one();
    for m in 1..=n {
        for j in (1..=k.min(m)).rev() {
            row[j] = row[j - 1].clone() + q_pows[j].clone() * row[j].clone();
        }
    }
    row[k].clone()
}

/// `(a; q)_n = ∏_{j<n} (1 - a q^j)`, with `(a; q)_0 = 1`.
pub fn q_pochhammer<T: Scalar>(a: &T, q: &T, n: usize) -> T {
    let mut acc = T::one();
    let mut aq = a.clone();
    for _ in 0..n {
        acc = acc * (T::one() - aq.clone());
        aq = aq * q.clone();
    }
    acc
}

/// `(a; q)_∞` for `|a| < 1`, `|q| < 1`, truncated at the first `J` with
/// `|a| |q|^{J+1} / ((1-|q|)(1-|a|)) < tol`; that quantity bounds the log of
/// the neglected tail and is reported as `tail_bound`.
pub fn q_pochhammer_inf<T: Real>(a: T, q: T, policy: &TruncationPolicy) -> Result<Truncated<T>> {
    let (af, qf) = (a.to_f64().abs(), q.to_f64().abs());
    if !(qf < 1.0) {
        return Err(Error::domain(format!("(a;q)_inf needs |q| < 1, got q = {}", q.to_f64())));
    }
    if !(af < 1.0) {
        return Err(Error::domain(format!("(a;q)_inf needs |a| < 1, got a = {}", a.to_f64())));
    }
    q_product(
        q,
        |qj| T::one() - a * qj,
        |last| af * qf.powi(last as i32 + 1) / ((1.0 - qf) * (1.0 - af)),
        policy,
    )
}

/// `k (k - 1) / 2`, the exponent in `q^{C(k,2)}`.
pub(crate) fn binom2(k: usize) -> u32 {
    (k * k.saturating_sub(1) / 2) as u32
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, ExactScalar};
    use proptest::prelude::*;

    fn q_half() -> ExactScalar {
        ratio(1, 2)
    }

    #[test]
    fn q_number_values() {
        assert_eq!(q_number(0, &q_half()), ratio(0, 1));
        assert_eq!(q_number(0, &ratio(1, 1)), ratio(0, 1));
        assert_eq!(q_number(5, &ratio(1, 1)), ratio(5, 1));
        assert_eq!(q_number(3, &q_half()), ratio(7, 4));
        assert_eq!(q_number(4, &ratio(0, 1)), ratio(1, 1));
    }

    #[test]
    fn q_factorial_values() {
        assert_eq!(q_factorial(0, &q_half()), ratio(1, 1));
        assert_eq!(q_factorial(3, &ratio(1, 1)), ratio(6, 1));
        assert_eq!(q_factorial(3, &q_half()), ratio(21, 8));
        assert_eq!(q_factorial(6, &ratio(0, 1)), ratio(1, 1));
    }

    #[test]
    fn q_binomial_values() {
        let one = ratio(1, 1);
        for n in 0..10i64 {
            let mut classical = 1i64;
            for k in 0..=n {
                assert_eq!(q_binomial(n, k, &one), ratio(classical, 1));
                classical = classical * (n - k) / (k + 1);
            }
        }
        assert_eq!(q_binomial(2, 5, &q_half()), ratio(0, 1));
        assert_eq!(q_binomial(3, -1, &q_half()), ratio(0, 1));
        assert_eq!(q_binomial(4, 2, &q_half()), ratio(35, 16));
        assert_eq!(q_binomial(7, 3, &ratio(0, 1)), ratio(1, 1));
    }

    #[test]
    fn q_pochhammer_values() {
        let a = ratio(2, 7);
        assert_eq!(q_pochhammer(&a, &q_half(), 0), ratio(1, 1));
        assert_eq!(q_pochhammer(&a, &ratio(1, 1), 4), (ratio(1, 1) - a.clone()).powu(4));
        assert_eq!(q_pochhammer(&q_half(), &q_half(), 2), ratio(3, 8));
    }

    #[test]
    fn q_pochhammer_inf_edge_cases() {
        let policy = TruncationPolicy::default();
        assert_eq!(q_pochhammer_inf(0.0, 0.7, &policy).unwrap().value, 1.0);
        assert!((q_pochhammer_inf(0.4, 0.0, &policy).unwrap().value - 0.6).abs() < 1e-16);
        assert!(q_pochhammer_inf(0.5, 1.0, &policy).is_err());
        assert!(q_pochhammer_inf(1.0, 0.5, &policy).is_err());
    }

    #[test]
    fn q_pochhammer_inf_matches_long_product() {
        let brute: f64 = (0..200).map(|j| 1.0 - 0.5 * 0.5f64.powi(j)).product();
        let policy = TruncationPolicy { tol: 1e-14, ..TruncationPolicy::default() };
        let t = q_pochhammer_inf(0.5, 0.5, &policy).unwrap();
        assert!((t.value - brute).abs() < 1e-12);
        assert!(t.tail_bound.unwrap() < 1e-14);
    }

    #[test]
    fn qparam_guards() {
        assert!(QParam::new(1.0).is_ok());
        assert!(QParam::new(-1.0).is_err());
        assert!(QParam::new(1.5).is_err());
        assert!(QParam::new_convergent(1.0).is_err());
        assert!(QParam::new_convergent(ratio(-1, 2)).is_ok());
    }

    fn rational_q() -> impl Strategy<Value = ExactScalar> {
        (-9i64..=9, 10i64..=12).prop_map(|(p, r)| ratio(p, r))
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(48))]

        #[test]
        fn pochhammer_q_is_scaled_factorial(q in rational_q(), n in 0usize..=20) {
            let one = ratio(1, 1);
            let lhs = q_pochhammer(&q, &q, n);
            let rhs = (one - q.clone()).powu(n as u32) * q_factorial(n, &q);
            prop_assert_eq!(lhs, rhs);
        }

        #[test]
        fn binomial_symmetry_and_pascal(q in rational_q(), n in 1i64..=20, k in 0i64..=20) {
            prop_assume!(k <= n);
            prop_assert_eq!(q_binomial(n, k, &q), q_binomial(n, n - k, &q));
            if k >= 1 {
                let pascal = q_binomial(n - 1, k - 1, &q) + q.powu(k as u32) * q_binomial(n - 1, k, &q);
                prop_assert_eq!(q_binomial(n, k, &q), pascal);
            }
        }

        #[test]
        fn pochhammer_splits(q in rational_q(), a in rational_q(), n in 0usize..8, m in 0usize..8) {
            let shifted = a.clone() * q.powu(n as u32);
            prop_assert_eq!(
                q_pochhammer(&a, &q, n + m),
                q_pochhammer(&a, &q, n) * q_pochhammer(&shifted, &q, m)
            );
        }
    }
}
