//! Univariate families: q-Hermite `H_n`, continuous q-Hermite `h_n`, big
//! q-Hermite `H_n(·|a,q)`, Al-Salam–Chihara `A_n` and the rescaled `P_n(·|y,ρ,q)`.
//!
//! Every family is evaluated by its forward three-term recurrence, written once
//! over [`Scalar`] so the same code yields exact rationals, `f64`, `Quad`, or
//! (through the `*_poly` variants) exact coefficient polynomials.

use crate::error::{Error, Result};
use crate::poly::{Poly1, Poly2};
use crate::qarith::{binom2, q_binomial, q_number, QParam};
use crate::scalar::{Real, Scalar};

/// Largest degree the floating evaluators are meant for; stability of the
/// forward recurrences is only relied on inside `S(q)` and up to this degree.
pub const MAX_FLOAT_DEGREE: usize = 64;

/// `S(q) = [−2/√(1−q), 2/√(1−q)]`, the whole line at `q = 1`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SupportInterval {
    q: f64,
}

impl SupportInterval {
    pub fn new(q: f64) -> Result<Self> {
        QParam::new(q)?;
        Ok(SupportInterval { q })
    }

    pub fn q(&self) -> f64 {
        self.q
    }

    /// `2/√(1−q)`, or `None` when the support is unbounded.
    pub fn half_width(&self) -> Option<f64> {
        (self.q < 1.0).then(|| 2.0 / (1.0 - self.q).sqrt())
    }

    pub fn contains(&self, x: f64) -> bool {
        self.half_width().map_or(x.is_finite(), |c| x.abs() <= c)
    }

    /// Indicator of `S(q)`.
    pub fn indicator(&self, x: f64) -> f64 {
        if self.contains(x) {
            1.0
        } else {
            0.0
        }
    }

    /// `frac · 2/√(1−q)`; the points actually used for grids inside `S(q)`.
    pub fn scaled_half_width(&self, frac: f64) -> Option<f64> {
        self.half_width().map(|c| frac * c)
    }
}

/// Runs `p_{k+1} = (x - b_k) p_k - c_k p_{k-1}` from `p_{-1} = 0`, `p_0 = 1`,
/// returning `p_0..=p_n`.
fn recurrence<T: Scalar>(n: usize, x: &T, b: impl Fn(usize) -> T, c: impl Fn(usize) -> T) -> Vec<T> {
    let mut out = Vec::with_capacity(n + 1);
    out.push(T::one());
    if n == 0 {
        return out;
    }
    out.push(x.clone() - b(0));
    for k in 1..n {
        let next = (x.clone() - b(k)) * out[k].clone() - c(k) * out[k - 1].clone();
        out.push(next);
    }
    out
}

/// `H_0..=H_n` at `x`.
pub fn hermite_q_all<T: Scalar>(n: usize, x: &T, q: &T) -> Vec<T> {
    recurrence(n, x, |_| T::zero(), |k| q_number(k, q))
}

/// `H_n(x|q)` from `H_{n+1} = x H_n − [n]_q H_{n−1}`.
pub fn hermite_q<T: Scalar>(n: usize, x: &T, q: &T) -> T {
    hermite_q_all(n, x, q).pop().expect("non-empty")
}

/// `H_n(·|q)` as a polynomial in `x`.
pub fn hermite_q_poly<T: Scalar>(n: usize, q: &T) -> Poly1<T> {
    hermite_q_poly_all(n, q).pop().expect("non-empty")
}

pub fn hermite_q_poly_all<T: Scalar>(n: usize, q: &T) -> Vec<Poly1<T>> {
    let x = Poly1::x();
    let mut out = vec![Poly1::constant(T::one())];
    for k in 0..n {
        let mut next = &x * &out[k];
        if k >= 1 {
            next = &next - &out[k - 1].scale(&q_number(k, q));
        }
        out.push(next);
    }
    out
}

/// `Ĥ_k = H_k/√([k]_q!)` for `k = 0..=n`.
pub fn hermite_q_normalized_all<T: Real>(n: usize, x: T, q: T) -> Vec<T> {
    NormalizedHermite::new(x, q).take(n + 1).collect()
}

/// Endless iterator over `Ĥ_k = H_k(x|q)/√([k]_q!)`, `k = 0, 1, …`.
///
/// The normalized recurrence `Ĥ_{k+1} = (x Ĥ_k − √[k] Ĥ_{k−1})/√[k+1]` keeps
/// values of order one on `S(q)`, where `H_k` itself grows like `√([k]_q!)`.
#[derive(Debug, Clone)]
pub struct NormalizedHermite<T> {
    x: T,
    q: T,
    prev: T,
    cur: T,
    /// `[k]_q` and its square root.
    qnum: T,
    root_k: T,
}

impl<T: Real> NormalizedHermite<T> {
    pub fn new(x: T, q: T) -> Self {
        NormalizedHermite { x, q, prev: T::zero(), cur: T::one(), qnum: T::zero(), root_k: T::zero() }
    }
}

impl<T: Real> Iterator for NormalizedHermite<T> {
    type Item = T;

    fn next(&mut self) -> Option<T> {
        let out = self.cur;
        self.qnum = T::one() + self.q * self.qnum;
        let root_next = self.qnum.sqrt();
        let next = (self.x * self.cur - self.root_k * self.prev) / root_next;
        self.prev = self.cur;
        self.cur = next;
        self.root_k = root_next;
        Some(out)
    }
}

/// `h_n(x|q)` from `h_{n+1} = 2x h_n − (1 − q^n) h_{n−1}`.
pub fn hermite_cq<T: Scalar>(n: usize, x: &T, q: &T) -> T {
    let two_x = T::from_i64(2) * x.clone();
    let (mut prev, mut cur) = (T::zero(), T::one());
    let mut qk = T::one();
    for _ in 0..n {
        let next = two_x.clone() * cur.clone() - (T::one() - qk.clone()) * prev;
        prev = cur;
        cur = next;
        qk = qk * q.clone();
    }
    cur
}

/// `h_n(x√(1−q)/2 | q) / (1−q)^{n/2}`, which equals `H_n(x|q)`.
pub fn rescale_cq_to_q<T: Real>(n: usize, x: T, q: T) -> Result<T> {
    QParam::new(q)?;
    if q == T::one() {
        return Err(Error::domain("the h_n to H_n rescaling divides by (1-q)^(n/2); q = 1 is excluded"));
    }
    let s = (T::one() - q).sqrt();
    let two = T::from_i64(2);
    Ok(hermite_cq(n, &(x * s / two), &q) / s.powu(n as u32))
}

/// `H_n(x|a,q)` from `H_{n+1} = (x − a q^n) H_n − [n]_q H_{n−1}`.
pub fn big_hermite_q<T: Scalar>(n: usize, x: &T, a: &T, q: &T) -> T {
    big_hermite_q_all(n, x, a, q).pop().expect("non-empty")
}

pub fn big_hermite_q_all<T: Scalar>(n: usize, x: &T, a: &T, q: &T) -> Vec<T> {
    recurrence(n, x, |k| a.clone() * q.powu(k as u32), |k| q_number(k, q))
}

/// `H_n(·|a,q)` as a polynomial in `x`, built by the recurrence.
pub fn big_hermite_q_poly<T: Scalar>(n: usize, a: &T, q: &T) -> Poly1<T> {
    let x = Poly1::x();
    let mut out = vec![Poly1::constant(T::one())];
    for k in 0..n {
        let shift = Poly1::constant(a.clone() * q.powu(k as u32));
        let mut next = &(&x - &shift) * &out[k];
        if k >= 1 {
            next = &next - &out[k - 1].scale(&q_number(k, q));
        }
        out.push(next);
    }
    out.pop().expect("non-empty")
}

/// `Σ_k [n k]_q (−a)^k q^{C(k,2)} H_{n−k}(x|q)`, the q-Hermite expansion of
/// `H_n(x|a,q)`.
pub fn bqh_expansion<T: Scalar>(n: usize, a: &T, q: &T) -> Poly1<T> {
    let hermite = hermite_q_poly_all(n, q);
    let minus_a = -a.clone();
    (0..=n).fold(Poly1::zero(), |acc, k| {
        let c = q_binomial(n as i64, k as i64, q) * minus_a.powu(k as u32) * q.powu(binom2(k));
        &acc + &hermite[n - k].scale(&c)
    })
}

/// Al-Salam–Chihara `A_n(x|a,b,q)`.
///
/// `A_{n+1} = (2x − (a+b) q^n) A_n − (1 − ab q^{n−1})(1 − q^n) A_{n−1}`.
pub fn asc<T: Scalar>(n: usize, x: &T, a: &T, b: &T, q: &T) -> Result<T> {
    let ab = a.clone() * b.clone();
    if ab.abs_val() > T::one() {
        return Err(Error::domain(format!(
            "Al-Salam-Chihara positivity needs |ab| <= 1, got |ab| = {}",
            ab.abs_val().to_f64()
        )));
    }
    Ok(asc_sym(n, x, &(a.clone() + b.clone()), &ab, q))
}

/// `A_n` through the symmetric functions `a + b` and `ab` only, which stay real
/// for complex-conjugate parameter pairs.
pub fn asc_sym<T: Scalar>(n: usize, x: &T, sum: &T, prod: &T, q: &T) -> T {
    let two_x = T::from_i64(2) * x.clone();
    let (mut prev, mut cur) = (T::zero(), T::one());
    let mut qk = T::one();
    let mut qkm1 = T::zero();
    for k in 0..n {
        let mut next = (two_x.clone() - sum.clone() * qk.clone()) * cur.clone();
        if k >= 1 {
            next = next - (T::one() - prod.clone() * qkm1.clone()) * (T::one() - qk.clone()) * prev;
        }
        prev = cur;
        cur = next;
        qkm1 = qk.clone();
        qk = qk * q.clone();
    }
    cur
}

fn check_rho<T: Scalar>(rho: &T) -> Result<()> {
    if rho.abs_val() >= T::one() {
        return Err(Error::domain(format!("|rho| must be < 1, got {}", rho.to_f64())));
    }
    Ok(())
}

/// `P_n(x|y,ρ,q)` from `P_{n+1} = (x − ρ y q^n) P_n − [n]_q (1 − ρ² q^{n−1}) P_{n−1}`.
pub fn asc_p<T: Scalar>(n: usize, x: &T, y: &T, rho: &T, q: &T) -> Result<T> {
    Ok(asc_p_all(n, x, y, rho, q)?.pop().expect("non-empty"))
}

pub fn asc_p_all<T: Scalar>(n: usize, x: &T, y: &T, rho: &T, q: &T) -> Result<Vec<T>> {
    check_rho(rho)?;
    let rho2 = rho.clone() * rho.clone();
    let ry = rho.clone() * y.clone();
    Ok(recurrence(
        n,
        x,
        |k| ry.clone() * q.powu(k as u32),
        |k| q_number(k, q) * (T::one() - rho2.clone() * q.powu(k as u32 - 1)),
    ))
}

/// `P_n(x|y,ρ,q)` as a polynomial in `x` for fixed `y`.
pub fn asc_p_poly<T: Scalar>(n: usize, y: &T, rho: &T, q: &T) -> Result<Poly1<T>> {
    check_rho(rho)?;
    let rho2 = rho.clone() * rho.clone();
    let x = Poly1::x();
    let mut out = vec![Poly1::constant(T::one())];
    for k in 0..n {
        let shift = Poly1::constant(rho.clone() * y.clone() * q.powu(k as u32));
        let mut next = &(&x - &shift) * &out[k];
        if k >= 1 {
            let c = q_number(k, q) * (T::one() - rho2.clone() * q.powu(k as u32 - 1));
            next = &next - &out[k - 1].scale(&c);
        }
        out.push(next);
    }
    Ok(out.pop().expect("non-empty"))
}

/// `P_0..=P_n` as polynomials in both `x` and `y`.
pub fn asc_p_poly2_all<T: Scalar>(n: usize, rho: &T, q: &T) -> Result<Vec<Poly2<T>>> {
    check_rho(rho)?;
    let rho2 = rho.clone() * rho.clone();
    let (x, y) = (Poly2::x(), Poly2::y());
    let mut out = vec![Poly2::one()];
    for k in 0..n {
        let shift = y.scale(&(rho.clone() * q.powu(k as u32)));
        let mut next = &(&x - &shift) * &out[k];
        if k >= 1 {
            let c = q_number(k, q) * (T::one() - rho2.clone() * q.powu(k as u32 - 1));
            next = &next - &out[k - 1].scale(&c);
        }
        out.push(next);
    }
    Ok(out)
}

/// Chebyshev polynomial of the second kind, extended by `U_{−1} = 0` and
/// `U_{−2} = −1`.
///
/// # Panics
/// If `n < −2`.
pub fn chebyshev_u<T: Scalar>(n: i64, x: &T) -> T {
    assert!(n >= -2, "chebyshev_u is defined for n >= -2, got {n}");
    match n {
        -2 => return -T::one(),
        -1 => return T::zero(),
        _ => {}
    }
    let two_x = T::from_i64(2) * x.clone();
    let (mut prev, mut cur) = (T::zero(), T::one());
    for _ in 0..n {
        let next = two_x.clone() * cur.clone() - prev;
        prev = cur;
        cur = next;
    }
    cur
}

/// A univariate family with its extra parameters.
#[derive(Debug, Clone, PartialEq)]
pub enum Family<T> {
    QHermite,
    ContinuousQHermite,
    BigQHermite { a: T },
    AlSalamChihara { a: T, b: T },
    Rescaled { y: T, rho: T },
}

/// A validated family and deformation parameter.
#[derive(Debug, Clone, PartialEq)]
pub struct FamilySpec<T> {
    family: Family<T>,
    q: QParam<T>,
}

impl<T: Scalar> FamilySpec<T> {
    pub fn new(family: Family<T>, q: T) -> Result<Self> {
        let q = QParam::new(q)?;
        match &family {
            Family::AlSalamChihara { a, b } if (a.clone() * b.clone()).abs_val() > T::one() => {
                return Err(Error::domain("Al-Salam-Chihara positivity needs |ab| <= 1"));
            }
            Family::Rescaled { rho, .. } => check_rho(rho)?,
            _ => {}
        }
        Ok(FamilySpec { family, q })
    }

    pub fn family(&self) -> &Family<T> {
        &self.family
    }

    pub fn q(&self) -> &T {
        self.q.value()
    }

    pub fn eval(&self, n: usize, x: &T) -> T {
        let q = self.q.value();
        match &self.family {
            Family::QHermite => hermite_q(n, x, q),
            Family::ContinuousQHermite => hermite_cq(n, x, q),
            Family::BigQHermite { a } => big_hermite_q(n, x, a, q),
            Family::AlSalamChihara { a, b } => {
                asc_sym(n, x, &(a.clone() + b.clone()), &(a.clone() * b.clone()), q)
            }
            Family::Rescaled { y, rho } => asc_p(n, x, y, rho, q).expect("validated rho"),
        }
    }
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::scalar::{ratio, ExactScalar, Quad};
    use proptest::prelude::*;

    fn r(p: i64, q: i64) -> ExactScalar {
        ratio(p, q)
    }

    #[test]
    fn hermite_low_degrees() {
        let q = 0.37;
        assert_eq!(hermite_q(1, &1.3, &q), 1.3);
        assert!((hermite_q(2, &1.3, &q) - (1.3f64 * 1.3 - 1.0)).abs() < 1e-15);
        assert_eq!(hermite_q(3, &2.0, &1.0), 2.0);
        assert_eq!(hermite_q(2, &r(1, 1), &r(1, 2)), r(0, 1));
    }

    #[test]
    fn hermite_is_monic_of_exact_degree() {
        let q = r(-3, 7);
        for n in 0..=20 {
            let p = hermite_q_poly(n, &q);
            assert_eq!(p.degree(), Some(n));
            assert_eq!(p.leading_coeff(), r(1, 1));
        }
    }

    #[test]
    fn continuous_hermite_special_values() {
        for n in 0..6u32 {
            let x = 0.7f64;
            assert!((hermite_cq(n as usize, &x, &1.0) - 2f64.powi(n as i32) * x.powi(n as i32)).abs() < 1e-12);
        }
        assert_eq!(hermite_cq(2, &r(1, 2), &r(0, 1)), r(0, 1));
        assert_eq!(hermite_cq(0, &0.3, &0.5), 1.0);
    }

    #[test]
    fn rescaling_reproduces_hermite() {
        assert_eq!(rescale_cq_to_q(0, 0.4, 0.5).unwrap(), 1.0);
        assert!(rescale_cq_to_q(2, 1.0, 0.5).unwrap().abs() < 1e-15);
        let x = 0.813;
        let direct = hermite_q(5, &x, &0.75);
        assert!((rescale_cq_to_q(5, x, 0.75).unwrap() - direct).abs() < 1e-12);
        assert!(rescale_cq_to_q(3, x, 1.0).is_err());
    }

    #[test]
    fn big_hermite_cases() {
        let (x, a) = (0.6f64, 0.3f64);
        for n in 0..7 {
            assert_eq!(big_hermite_q(n, &x, &0.0, &0.4), hermite_q(n, &x, &0.4));
            let classical = hermite_q(n, &(x - a), &1.0);
            assert!((big_hermite_q(n, &x, &a, &1.0) - classical).abs() < 1e-12);
        }
        assert!((big_hermite_q(1, &x, &a, &0.4) - (x - a)).abs() < 1e-15);
    }

    #[test]
    fn bqh_expansion_matches_recurrence() {
        assert_eq!(bqh_expansion(0, &r(1, 3), &r(1, 2)), Poly1::constant(r(1, 1)));
        assert_eq!(bqh_expansion(1, &r(1, 3), &r(1, 2)), Poly1::new(vec![r(-1, 3), r(1, 1)]));
        for (a, q) in [(r(1, 3), r(1, 2)), (r(-2, 5), r(3, 4)), (r(7, 3), r(-1, 3))] {
            for n in 0..=12 {
                assert_eq!(bqh_expansion(n, &a, &q), big_hermite_q_poly(n, &a, &q), "n = {n}");
            }
        }
    }

    #[test]
    fn asc_cases() {
        let (x, a, b, q) = (0.3f64, 0.4, -0.7, 0.6);
        assert_eq!(asc(0, &x, &a, &b, &q).unwrap(), 1.0);
        assert!((asc(1, &x, &a, &b, &q).unwrap() - (2.0 * x - (a + b))).abs() < 1e-15);
        for n in 0..8 {
            assert_eq!(asc(n, &x, &0.0, &0.0, &q).unwrap(), hermite_cq(n, &x, &q));
        }
        assert!(asc(2, &x, &2.0, &0.6, &q).is_err());
        for n in 0..8 {
            let (ra, rb) = (r(2, 5), r(-5, 7));
            let qq = r(3, 4);
            assert_eq!(asc(n, &r(1, 3), &ra, &rb, &qq).unwrap(), asc(n, &r(1, 3), &rb, &ra, &qq).unwrap());
        }
    }

    #[test]
    fn asc_p_cases() {
        let (x, y, rho, q) = (0.45f64, -0.8, 0.35, 0.55);
        for n in 0..8 {
            assert_eq!(asc_p(n, &x, &y, &0.0, &q).unwrap(), hermite_q(n, &x, &q));
        }
        assert!((asc_p(1, &x, &y, &rho, &q).unwrap() - (x - rho * y)).abs() < 1e-15);
        assert!(asc_p(1, &x, &y, &1.0, &q).is_err());
        // q = 0 Chebyshev form; holds for n >= 1, while P_0 = 1.
        let (x, y, rho) = (r(3, 5), r(-1, 2), r(2, 7));
        let half = x.clone() / r(2, 1);
        assert_eq!(asc_p(0, &x, &y, &rho, &r(0, 1)).unwrap(), r(1, 1));
        for n in 1..=8i64 {
            let expect = chebyshev_u(n, &half) - rho.clone() * y.clone() * chebyshev_u(n - 1, &half)
                + rho.clone() * rho.clone() * chebyshev_u(n - 2, &half);
            assert_eq!(asc_p(n as usize, &x, &y, &rho, &r(0, 1)).unwrap(), expect, "n = {n}");
        }
    }

    #[test]
    fn asc_p_is_rescaled_asc() {
        let (rho, q) = (0.45f64, 0.3);
        let s = (1.0 - q).sqrt();
        for &(x, y) in &[(0.2, -0.9), (1.5, 0.4), (-1.1, 1.2)] {
            let sum = rho * y * s;
            let prod = rho * rho;
            for n in 0..=10 {
                let lhs = asc_sym(n, &(x * s / 2.0), &sum, &prod, &q) / s.powi(n as i32);
                let rhs = asc_p(n, &x, &y, &rho, &q).unwrap();
                assert!((lhs - rhs).abs() < 1e-12 * rhs.abs().max(1.0), "n = {n}: {lhs} vs {rhs}");
            }
        }
    }

    #[test]
    fn asc_p_poly2_matches_pointwise() {
        let (rho, q) = (r(1, 3), r(2, 5));
        let polys = asc_p_poly2_all(6, &rho, &q).unwrap();
        let (x, y) = (r(-4, 3), r(5, 7));
        for (n, p) in polys.iter().enumerate() {
            assert_eq!(p.eval(&x, &y), asc_p(n, &x, &y, &rho, &q).unwrap());
            assert_eq!(asc_p_poly(n, &y, &rho, &q).unwrap().eval(&x), p.eval(&x, &y));
        }
    }

    #[test]
    fn chebyshev_values() {
        assert_eq!(chebyshev_u(0, &0.3), 1.0);
        assert_eq!(chebyshev_u(2, &r(1, 3)), r(4, 9) - r(1, 1));
        let theta = std::f64::consts::FRAC_PI_3;
        assert!((chebyshev_u(2, &theta.cos()) * theta.sin() - (3.0 * theta).sin()).abs() < 1e-15);
    }

    #[test]
    fn normalized_hermite_matches_plain() {
        let (x, q) = (Quad::from(1.1), Quad::from(0.6));
        let hat = hermite_q_normalized_all(30, x, q);
        let plain = hermite_q_all(30, &x, &q);
        let mut fact = Quad::from(1.0);
        for n in 0..=30 {
            if n > 0 {
                fact = fact * q_number(n, &q);
            }
            let err = (hat[n] * fact.sqrt() - plain[n]).abs().to_f64() / plain[n].abs().to_f64().max(1.0);
            assert!(err < 1e-28, "n = {n}");
        }
    }

    #[test]
    fn family_spec_validates() {
        assert!(FamilySpec::new(Family::AlSalamChihara { a: 2.0, b: 0.9 }, 0.5).is_err());
        assert!(FamilySpec::new(Family::Rescaled { y: 0.0, rho: -1.0 }, 0.5).is_err());
        assert!(FamilySpec::new(Family::QHermite, -1.0).is_err());
        let spec = FamilySpec::new(Family::BigQHermite { a: 0.2 }, 0.5).unwrap();
        assert_eq!(spec.eval(3, &0.4), big_hermite_q(3, &0.4, &0.2, &0.5));
    }

    #[test]
    fn support_interval() {
        let s = SupportInterval::new(0.0).unwrap();
        assert_eq!(s.half_width(), Some(2.0));
        assert!(s.contains(-2.0) && !s.contains(2.0001));
        assert_eq!(SupportInterval::new(1.0).unwrap().half_width(), None);
        assert!(SupportInterval::new(1.2).is_err());
    }

    proptest! {
        #![proptest_config(ProptestConfig::with_cases(32))]

        #[test]
        fn floating_recurrence_tracks_exact(qn in -9i64..=9, n in 0usize..=20, t in -0.95f64..0.95) {
            let q = ratio(qn, 10);
            let qf = q.to_f64();
            let x = t * 2.0 / (1.0 - qf).sqrt();
            let exact = hermite_q_poly(n, &q).map(<f64 as Real>::from_exact).eval(&x);
            let float = hermite_q(n, &x, &qf);
            prop_assert!((exact - float).abs() < 1e-10 * exact.abs().max(1.0));
        }
    }
}
