//! Truncation of infinite q-products and power series.
//!
//! Every infinite product in the library has the shape `∏_{j≥0} F(q^j)` with
//! `F(0) = 1`. The caller supplies the factor and a certified bound on
//! `|ln ∏_{j>J} F(q^j)|`; the product is cut at the first `J` where that bound
//! drops below the policy tolerance. When `0 < q < 1` is so close to 1 that the
//! cut would exceed `max_terms`, the log-sum is evaluated by Euler–Maclaurin
//! instead.

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::quadrature::gauss_legendre;
use crate::scalar::Real;

/// Tolerance and budget for every infinite sum or product.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct TruncationPolicy {
    pub tol: f64,
    pub max_terms: usize,
    pub report_tail_bound: bool,
}

impl Default for TruncationPolicy {
    fn default() -> Self {
        TruncationPolicy { tol: 1e-16, max_terms: 100_000, report_tail_bound: true }
    }
}

impl TruncationPolicy {
    pub fn new(tol: f64, max_terms: usize) -> Result<Self> {
        if !(tol > 0.0) || !tol.is_finite() {
            return Err(Error::domain(format!("truncation tolerance must be positive, got {tol}")));
        }
        if max_terms == 0 {
            return Err(Error::domain("max_terms must be at least 1"));
        }
        Ok(TruncationPolicy { tol, max_terms, report_tail_bound: true })
    }

    /// Policy for double-double residual checks.
    pub fn extended() -> Self {
        TruncationPolicy { tol: 1e-26, max_terms: 100_000, report_tail_bound: true }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
pub enum TruncationMethod {
    Direct,
    EulerMaclaurin,
}

/// A truncated infinite sum or product.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Truncated<T> {
    pub value: T,
    /// Number of terms or factors actually used.
    pub terms: usize,
    /// Certified (products) or estimated (series) bound on the neglected tail.
    pub tail_bound: Option<f64>,
    pub method: TruncationMethod,
}

/// Running product that rescales by powers of two so long products of factors
/// far from 1 cannot overflow or underflow before they settle.
#[derive(Debug, Clone, Copy)]
pub(crate) struct ScaledProduct<T> {
    mantissa: T,
    exp2: i64,
}

const SCALE_BITS: i32 = 256;

impl<T: Real> ScaledProduct<T> {
    pub(crate) fn one() -> Self {
        ScaledProduct { mantissa: T::one(), exp2: 0 }
    }

    pub(crate) fn mul(&mut self, factor: T) {
        self.mantissa = self.mantissa * factor;
        let m = self.mantissa.to_f64().abs();
        if m > 2f64.powi(SCALE_BITS) {
            self.mantissa = self.mantissa * T::from_f64(2f64.powi(-SCALE_BITS));
            self.exp2 += SCALE_BITS as i64;
        } else if m != 0.0 && m < 2f64.powi(-SCALE_BITS) {
            self.mantissa = self.mantissa * T::from_f64(2f64.powi(SCALE_BITS));
            self.exp2 -= SCALE_BITS as i64;
        }
    }

    pub(crate) fn value(&self) -> T {
        let mut v = self.mantissa;
        let mut e = self.exp2;
        let step = T::from_f64(2f64.powi(SCALE_BITS));
        let inv = T::from_f64(2f64.powi(-SCALE_BITS));
        while e >= SCALE_BITS as i64 && v.to_f64().is_finite() {
            v = v * step;
            e -= SCALE_BITS as i64;
        }
        while e <= -(SCALE_BITS as i64) && v.to_f64() != 0.0 {
            v = v * inv;
            e += SCALE_BITS as i64;
        }
        v * T::from_f64(2f64.powi(e as i32))
    }
}

/// `∏_{j≥0} factor(q^j)` with a caller-certified tail bound.
///
/// `tail_bound(J)` must bound `|ln ∏_{j>J} factor(q^j)|` (returning
/// `f64::INFINITY` while no bound is available yet) and be non-increasing in `J`.
pub(crate) fn q_product<T: Real>(
    q: T,
    factor: impl Fn(T) -> T,
    tail_bound: impl Fn(usize) -> f64,
    policy: &TruncationPolicy,
) -> Result<Truncated<T>> {
    let p = q_product_scaled(q, factor, tail_bound, policy)?;
    Ok(Truncated { value: p.value.value(), terms: p.terms, tail_bound: p.tail_bound, method: p.method })
}

pub(crate) fn q_product_scaled<T: Real>(
    q: T,
    factor: impl Fn(T) -> T,
    tail_bound: impl Fn(usize) -> f64,
    policy: &TruncationPolicy,
) -> Result<Truncated<ScaledProduct<T>>> {
    let qf = q.to_f64();
    if !(qf.abs() < 1.0) {
        return Err(Error::domain(format!("infinite q-product needs |q| < 1, got q = {qf}")));
    }
    let needed = first_index_below(&tail_bound, policy.tol, policy.max_terms);
    let Some(last) = needed else {
        if qf > 0.0 {
            return euler_maclaurin_product(qf, &factor, policy);
        }
        return Err(Error::Convergence(format!(
            "q-product at q = {qf} needs more than {} factors",
            policy.max_terms
        )));
    };
    let mut acc = ScaledProduct::one();
    let mut qj = T::one();
    for _ in 0..=last {
        acc.mul(factor(qj));
        qj = qj * q;
    }
    Ok(Truncated {
        value: acc,
        terms: last + 1,
        tail_bound: policy.report_tail_bound.then(|| tail_bound(last)),
        method: TruncationMethod::Direct,
    })
}

/// Smallest `J < max_terms` with `bound(J) < tol`, found by doubling then bisection.
pub(crate) fn first_index_below(bound: &impl Fn(usize) -> f64, tol: f64, max_terms: usize) -> Option<usize> {
    if bound(0) < tol {
        return Some(0);
    }
    let mut hi = 1usize;
    while bound(hi) >= tol {
        if hi >= max_terms {
            return None;
        }
        hi = (hi * 2).min(max_terms);
    }
    let mut lo = hi / 2;
    while hi - lo > 1 {
        let mid = lo + (hi - lo) / 2;
        if bound(mid) < tol {
            hi = mid;
        } else {
            lo = mid;
        }
    }
    if hi >= max_terms {
        None
    } else {
        Some(hi)
    }
}

/// Euler–Maclaurin evaluation of `Σ_{j≥0} g(q^j)` with `g = ln factor`, for
/// `q` close to 1:
/// `∫_0^1 g(s)/s ds / (−ln q) + g(1)/2 − g'(1) ln q / 12`.
/// The next correction is `O(|ln q|^3)`.
fn euler_maclaurin_product<T: Real>(
    q: f64,
    factor: &impl Fn(T) -> T,
    policy: &TruncationPolicy,
) -> Result<Truncated<ScaledProduct<T>>> {
    let g = |s: f64| factor(T::from_f64(s)).to_f64().ln();
    let lnq = q.ln();
    let rule = gauss_legendre(256);
    let integral: f64 = rule
        .iter()
        .map(|&(node, weight)| {
            let s = 0.5 * (node + 1.0);
            0.5 * weight * g(s) / s
        })
        .sum();
    let h = 1e-5;
    let dg = (g(1.0) - g(1.0 - h)) / h;
    let d2 = (g(1.0) - 2.0 * g(1.0 - h) + g(1.0 - 2.0 * h)) / (h * h);
    let slope = dg + 0.5 * h * d2;
    let log_sum = integral / (-lnq) + 0.5 * g(1.0) - slope * lnq / 12.0;
    if !log_sum.is_finite() {
        return Err(Error::Convergence(format!("Euler-Maclaurin log-sum is not finite at q = {q}")));
    }
    let mut acc = ScaledProduct::one();
    let whole = (log_sum / std::f64::consts::LN_2).floor();
    acc.exp2 = whole as i64;
    acc.mul(T::from_f64((log_sum - whole * std::f64::consts::LN_2).exp()));
    Ok(Truncated {
        value: acc,
        terms: rule.len(),
        tail_bound: policy.report_tail_bound.then(|| lnq.abs().powi(3)),
        method: TruncationMethod::EulerMaclaurin,
    })
}

/// Sums `Σ_{n≥0} term(n)`, stopping once three consecutive terms are below
/// `tol / 10` in magnitude.
pub(crate) fn sum_series<T: Real>(
    policy: &TruncationPolicy,
    mut term: impl FnMut(usize) -> T,
) -> Result<Truncated<T>> {
    let cutoff = policy.tol / 10.0;
    let mut sum = T::zero();
    let mut small_run = 0usize;
    let mut last = [0.0f64; 3];
    for n in 0..policy.max_terms {
        let t = term(n);
        let mag = t.to_f64().abs();
        if !mag.is_finite() {
            return Err(Error::Convergence(format!("series term {n} is not finite")));
        }
        sum = sum + t;
        last = [last[1], last[2], mag];
        small_run = if mag < cutoff { small_run + 1 } else { 0 };
        if small_run >= 3 {
            let tail = policy.report_tail_bound.then(|| {
                let denom = last[0] + last[1];
                let r = if denom > 0.0 { (last[1] + last[2]) / denom } else { 0.0 };
                if r < 1.0 {
                    last[2] * r / (1.0 - r)
                } else {
                    cutoff
                }
            });
            return Ok(Truncated { value: sum, terms: n + 1, tail_bound: tail, method: TruncationMethod::Direct });
        }
    }
    Err(Error::Convergence(format!(
        "series did not reach tolerance {} within {} terms",
        policy.tol, policy.max_terms
    )))
}
