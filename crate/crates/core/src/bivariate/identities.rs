//! Identities tying `γ_{i,j}`, `Q_{i,j}` and the `ω`-products together.
//!
//! Exact checks take rational `(ρ, q)` and compare polynomials coefficient by
//! coefficient. Residual checks evaluate both sides numerically and return
//! `|LHS − RHS|`.

use crate::bivariate::gamma::gamma;
use crate::bivariate::qpoly::{q_poly, QEvaluator};
use crate::error::{Error, Result};
use crate::families::{big_hermite_q_all, hermite_q, hermite_q_poly_all};
use crate::kernels::{omega_scaled_poly, phi_h, poisson_mehler_product, KernelParams};
use crate::poly::Poly2;
use crate::qarith::{binom2, q_binomial, q_factorial, q_number, q_pochhammer, QParam};
use crate::scalar::{ExactScalar, Real, Scalar};
use crate::truncation::{sum_series, TruncationPolicy, Truncated};

/// Both sides of an exact polynomial identity.
#[derive(Debug, Clone, PartialEq)]
pub struct Comparison<T> {
    pub lhs: Poly2<T>,
    pub rhs: Poly2<T>,
}

impl<T: Scalar> Comparison<T> {
    pub fn holds(&self) -> bool {
        self.lhs == self.rhs
    }

    /// `lhs − rhs`; zero exactly when the identity holds.
    pub fn difference(&self) -> Poly2<T> {
        &self.lhs - &self.rhs
    }
}

/// Maximum residual of a check over a set of points.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ResidualReport {
    pub residual: f64,
    pub tolerance: f64,
    pub pass: bool,
}

impl ResidualReport {
    pub fn from_residuals(residuals: impl IntoIterator<Item = f64>, tolerance: f64) -> Self {
        let residual = residuals.into_iter().fold(0.0f64, |m, r| if r.is_nan() { f64::NAN } else { m.max(r) });
        ResidualReport { residual, tolerance, pass: residual < tolerance }
    }
}

fn sign<T: Scalar>(k: usize) -> T {
    if k % 2 == 0 {
        T::one()
    } else {
        -T::one()
    }
}

/// `|γ_{i,j} − Q_{i,j} γ_{0,0}|` at one point.
pub fn upm_residual<T: Real>(i: usize, j: usize, p: &KernelParams<T>, policy: &TruncationPolicy) -> Result<f64> {
    let g = gamma(i, j, p, policy)?.value;
    let g00 = gamma(0, 0, p, policy)?.value;
    let qij = QEvaluator::new(p.x, p.y, p.rho, p.q)?.value(i, j)?;
    Ok((g - qij * g00).abs_val().to_f64())
}

/// `max |γ_{i,j} − Q_{i,j} γ_{0,0}|` over the given points.
pub fn verify_upm<T: Real>(
    i: usize,
    j: usize,
    points: &[KernelParams<T>],
    policy: &TruncationPolicy,
    tolerance: f64,
) -> Result<ResidualReport> {
    let residuals = points.iter().map(|p| upm_residual(i, j, p, policy)).collect::<Result<Vec<_>>>()?;
    Ok(ResidualReport::from_residuals(residuals, tolerance))
}

/// `Σ_k (−1)^k [m k]_q q^{C(k,2)} (1−q)^k ρ^k σ_{n+k}(ρ)` against `σ_n(ρ q^m)`.
///
/// `sigma(index, ρ)` supplies the sequence.
pub fn shifted_rho_identity<T: Real>(
    n: usize,
    m: usize,
    mut sigma: impl FnMut(usize, T) -> Result<T>,
    rho: T,
    q: T,
) -> Result<f64> {
    QParam::new(q)?;
    let lhs = sigma(n, rho * q.powu(m as u32))?;
    let mut rhs = T::zero();
    for k in 0..=m {
        let c = sign::<T>(k)
            * q_binomial(m as i64, k as i64, &q)
            * q.powu(binom2(k))
            * (T::one() - q).powu(k as u32)
            * rho.powu(k as u32);
        rhs = rhs + c * sigma(n + k, rho)?;
    }
    Ok((lhs - rhs).abs_val().to_f64())
}

/// The shifted-ρ identity with `σ_n = γ_{i+n,j+n}`, compared as formal power
/// series in `ρ` up to `ρ^order`.
///
/// The coefficient of `ρ^p` is `q^{mp}/[p]_q! ξ_p` on the left and
/// `Σ_k (−1)^k [m k]_q q^{C(k,2)} (1−q)^k ξ_p/[p−k]_q!` on the right, with
/// `ξ_p = H_{p+i}(x) H_{p+j}(y)`; one comparison per power.
pub fn shifted_rho_exact(i: usize, j: usize, m: usize, order: usize, q: &ExactScalar) -> Result<Vec<Comparison<ExactScalar>>> {
    QParam::new(q.clone())?;
    let hermite = hermite_q_poly_all(order + i.max(j), q);
    let one = ExactScalar::from_i64(1);
    Ok((0..=order)
        .map(|p| {
            let xi = &hermite[p + i].in_x() * &hermite[p + j].in_y();
            let lhs = xi.scale(&(q.powu((m * p) as u32) / q_factorial(p, q)));
            let c = (0..=m.min(p)).fold(ExactScalar::from_i64(0), |acc, k| {
                acc + sign::<ExactScalar>(k)
                    * q_binomial(m as i64, k as i64, q)
                    * q.powu(binom2(k))
                    * (one.clone() - q.clone()).powu(k as u32)
                    / q_factorial(p - k, q)
            });
            Comparison { lhs, rhs: xi.scale(&c) }
        })
        .collect())
}

/// `Σ_k (−1)^k q^{C(k,2)} ρ^k/[k]_q! γ_{i+k,j+k}`, which sums to `H_i(x) H_j(y)`.
pub fn hermite_product_series<T: Real>(
    i: usize,
    j: usize,
    p: &KernelParams<T>,
    policy: &TruncationPolicy,
) -> Result<Truncated<T>> {
    let q = p.q;
    let mut coef = T::one();
    let mut err = None;
    let out = sum_series(policy, |k| {
        if k > 0 {
            coef = -coef * p.rho * q.powu(k as u32 - 1) / q_number(k, &q);
        }
        if coef == T::zero() {
            return T::zero();
        }
        match gamma(i + k, j + k, p, policy) {
            Ok(g) => coef * g.value,
            Err(e) => {
                err.get_or_insert(e);
                T::zero()
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => out,
    }
}

/// `|H_i(x) H_j(y) − hermite_product_series|`.
pub fn lnsk_residual<T: Real>(i: usize, j: usize, p: &KernelParams<T>, policy: &TruncationPolicy) -> Result<f64> {
    let series = hermite_product_series(i, j, p, policy)?.value;
    let direct = hermite_q(i, &p.x, &p.q) * hermite_q(j, &p.y, &p.q);
    Ok((series - direct).abs_val().to_f64())
}

fn check_exact(rho: &ExactScalar, q: &ExactScalar) -> Result<()> {
    QParam::new(q.clone())?;
    if rho.abs_val() >= ExactScalar::from_i64(1) {
        return Err(Error::domain("|rho| must be < 1"));
    }
    Ok(())
}

/// `∏_{l<m} ω(x√(1−q)/2, y√(1−q)/2 | ρ q^l)`.
pub fn omega_product_poly(m: usize, rho: &ExactScalar, q: &ExactScalar) -> Poly2<ExactScalar> {
    (0..m).fold(Poly2::one(), |acc, l| &acc * &omega_scaled_poly(&(rho.clone() * q.powu(l as u32)), q))
}

/// `(ρ²)_{2m} Σ_k (−1)^k [m k]_q q^{C(k,2)} (1−q)^k ρ^k Q_{i+k,j+k}(·|ρ,q)`.
fn shifted_q_sum(i: usize, j: usize, m: usize, rho: &ExactScalar, q: &ExactScalar) -> Result<Poly2<ExactScalar>> {
    let one = ExactScalar::from_i64(1);
    let mut acc = Poly2::zero();
    for k in 0..=m {
        let c = sign::<ExactScalar>(k)
            * q_binomial(m as i64, k as i64, q)
            * q.powu(binom2(k))
            * (one.clone() - q.clone()).powu(k as u32)
            * rho.powu(k as u32);
        acc = &acc + &q_poly(i + k, j + k, rho, q)?.scale(&c);
    }
    let r2 = rho.clone() * rho.clone();
    Ok(acc.scale(&q_pochhammer(&r2, q, 2 * m)))
}

/// `Q_{i,j}(·|ρq^m,q) ∏_{l<m} ω(·|ρq^l)` against
/// `(ρ²)_{2m} Σ_k (−1)^k [m k]_q q^{C(k,2)} (1−q)^k ρ^k Q_{i+k,j+k}(·|ρ,q)`.
pub fn q_shift_identity(i: usize, j: usize, m: usize, rho: &ExactScalar, q: &ExactScalar) -> Result<Comparison<ExactScalar>> {
    check_exact(rho, q)?;
    let shifted = q_poly(i, j, &(rho.clone() * q.powu(m as u32)), q)?;
    let lhs = &shifted * &omega_product_poly(m, rho, q);
    Ok(Comparison { lhs, rhs: shifted_q_sum(i, j, m, rho, q)? })
}

/// `∏_{l<n} ω(·|ρq^l)` against `(ρ²)_{2n} Σ_k (−1)^k [n k]_q q^{C(k,2)} (1−q)^k ρ^k Q_{k,k}`.
pub fn omega_product_identity(n: usize, rho: &ExactScalar, q: &ExactScalar) -> Result<Comparison<ExactScalar>> {
    check_exact(rho, q)?;
    Ok(Comparison { lhs: omega_product_poly(n, rho, q), rhs: shifted_q_sum(0, 0, n, rho, q)? })
}

/// `q^{C(n,2)} ρ^n (1−q)^n Q_{n,n}` against
/// `Σ_k (−1)^k q^{C(n−k,2)} [n k]_q ∏_{l<k} ω(·|ρq^l) / (ρ²)_{2k}`.
pub fn qkk_inversion(n: usize, rho: &ExactScalar, q: &ExactScalar) -> Result<Comparison<ExactScalar>> {
    check_exact(rho, q)?;
    if *rho == ExactScalar::from_i64(0) {
        return Err(Error::domain("the Q_{n,n} inversion degenerates at rho = 0"));
    }
    let one = ExactScalar::from_i64(1);
    let scale = q.powu(binom2(n)) * rho.powu(n as u32) * (one.clone() - q.clone()).powu(n as u32);
    let lhs = q_poly(n, n, rho, q)?.scale(&scale);
    let r2 = rho.clone() * rho.clone();
    let mut rhs = Poly2::zero();
    for k in 0..=n {
        let c = sign::<ExactScalar>(k) * q.powu(binom2(n - k)) * q_binomial(n as i64, k as i64, q)
            / q_pochhammer(&r2, q, 2 * k);
        rhs = &rhs + &omega_product_poly(k, rho, q).scale(&c);
    }
    Ok(Comparison { lhs, rhs })
}

/// Internal consistency of the `Q` expansion at rational `(ρ, q)`: the swap
/// symmetry `Q_{i,j}(x,y) = Q_{j,i}(y,x)` for every `i + j ≤ max_degree`.
pub fn expansion_symmetry(max_degree: usize, rho: &ExactScalar, q: &ExactScalar) -> Result<Vec<Comparison<ExactScalar>>> {
    check_exact(rho, q)?;
    let mut out = Vec::new();
    for d in 0..=max_degree {
        for j in 0..=d {
            let i = d - j;
            out.push(Comparison { lhs: q_poly(i, j, rho, q)?, rhs: q_poly(j, i, rho, q)?.swap_xy() });
        }
    }
    Ok(out)
}

/// Partial sum `Σ_{k≤N} (−1)^k q^{C(k,2)} ρ^k/[k]_q! Q_{k,k}(x,y|ρ,q)`, which
/// tends to `1/γ_{0,0}`.
///
/// Accepts `q = 1` when `|ρ| < 1/2`.
pub fn reciprocal_series<T: Real>(x: T, y: T, rho: T, q: T, n: usize) -> Result<T> {
    reciprocal_guard(rho, q)?;
    let mut eval = QEvaluator::new(x, y, rho, q)?;
    let mut coef = T::one();
    let mut acc = T::zero();
    for k in 0..=n {
        if k > 0 {
            coef = -coef * rho * q.powu(k as u32 - 1) / q_number(k, &q);
        }
        acc = acc + coef * eval.value(k, k)?;
    }
    Ok(acc)
}

fn reciprocal_guard<T: Real>(rho: T, q: T) -> Result<()> {
    QParam::new(q)?;
    if q == T::one() && rho.abs_val().to_f64() >= 0.5 {
        return Err(Error::domain("at q = 1 the reciprocal series needs |rho| < 1/2"));
    }
    if q != T::one() && rho.abs_val() >= T::one() {
        return Err(Error::domain("|rho| must be < 1"));
    }
    Ok(())
}

/// `Σ_k (−1)^k q^{C(k,2)} ρ^k/[k]_q! Q_{i+k,j+k}(x,y)` summed adaptively.
pub fn shifted_diagonal_series<T: Real>(
    i: usize,
    j: usize,
    x: T,
    y: T,
    rho: T,
    q: T,
    policy: &TruncationPolicy,
) -> Result<Truncated<T>> {
    reciprocal_guard(rho, q)?;
    let mut eval = QEvaluator::new(x, y, rho, q)?;
    let mut coef = T::one();
    let mut err = None;
    let out = sum_series(policy, |k| {
        if k > 0 {
            coef = -coef * rho * q.powu(k as u32 - 1) / q_number(k, &q);
        }
        match eval.value(i + k, j + k) {
            Ok(v) => coef * v,
            Err(e) => {
                err.get_or_insert(e);
                T::zero()
            }
        }
    });
    match err {
        Some(e) => Err(e),
        None => out,
    }
}

/// `|reciprocal series · γ_{0,0} − 1|` with both sides summed adaptively.
pub fn reciprocal_product_residual<T: Real>(p: &KernelParams<T>, policy: &TruncationPolicy) -> Result<f64> {
    let recip = shifted_diagonal_series(0, 0, p.x, p.y, p.rho, p.q, policy)?.value;
    let g00 = gamma(0, 0, p, policy)?.value;
    Ok((recip * g00 - T::one()).abs_val().to_f64())
}

/// `|H_i(x) H_j(y) ∏ω/(ρ²)_∞ − Σ_k (−1)^k q^{C(k,2)} ρ^k/[k]_q! Q_{i+k,j+k}|`.
pub fn main_i_residual<T: Real>(i: usize, j: usize, p: &KernelParams<T>, policy: &TruncationPolicy) -> Result<f64> {
    let kernel = poisson_mehler_product(p, policy)?.value;
    let lhs = hermite_q(i, &p.x, &p.q) * hermite_q(j, &p.y, &p.q) / kernel;
    let rhs = shifted_diagonal_series(i, j, p.x, p.y, p.rho, p.q, policy)?.value;
    Ok((lhs - rhs).abs_val().to_f64())
}

/// Residual of the double generating function of the `Q_{n,m}`:
///
/// `Σ_{n,m} t^n s^m/([n]_q![m]_q!) Q_{n,m}(x,y)` against
/// `φ_H(x|t) φ_H(y|s)/γ_{0,0} · Σ_k ρ^k/[k]_q! H_k(x|t,q) H_k(y|s,q)`,
/// where `H_k(·|a,q)` are big q-Hermite polynomials. The density ratio
/// `f_bN(x|t) f_bN(y|s)/f_2D` has been reduced to `φ_H φ_H/γ_{0,0}`.
pub fn q_generating_function_check<T: Real>(s: T, t: T, p: &KernelParams<T>, policy: &TruncationPolicy) -> Result<f64> {
    Ok((q_generating_function_lhs(s, t, p, policy)? - q_generating_function_rhs(s, t, p, policy)?).abs_val().to_f64())
}

fn q_generating_function_lhs<T: Real>(s: T, t: T, p: &KernelParams<T>, policy: &TruncationPolicy) -> Result<T> {
    let q = p.q;
    let mut eval = QEvaluator::new(p.x, p.y, p.rho, q)?;
    let mut inv_fact = vec![T::one()];
    let mut err = None;
    // Diagonal d collects every term with n + m = d.
    let out = sum_series(policy, |d| {
        while inv_fact.len() <= d {
            let k = inv_fact.len();
            let next = inv_fact[k - 1] / q_number(k, &q);
            inv_fact.push(next);
        }
        let mut acc = T::zero();
        for m in 0..=d {
            let n = d - m;
            let w = t.powu(n as u32) * s.powu(m as u32) * inv_fact[n] * inv_fact[m];
            if w == T::zero() {
                continue;
            }
            match eval.value(n, m) {
                Ok(v) => acc = acc + w * v,
                Err(e) => {
                    err.get_or_insert(e);
                }
            }
        }
        acc
    });
    match err {
        Some(e) => Err(e),
        None => Ok(out?.value),
    }
}

fn q_generating_function_rhs<T: Real>(s: T, t: T, p: &KernelParams<T>, policy: &TruncationPolicy) -> Result<T> {
    let q = p.q;
    let phi_x = phi_h(p.x, t, q, policy)?.value;
    let phi_y = phi_h(p.y, s, q, policy)?.value;
    let g00 = gamma(0, 0, p, policy)?.value;
    let mut hx: Vec<T> = Vec::new();
    let mut hy: Vec<T> = Vec::new();
    let mut coef = T::one();
    let kernel = sum_series(policy, |k| {
        if hx.len() <= k {
            let target = (2 * hx.len()).max(32);
            hx = big_hermite_q_all(target, &p.x, &t, &q);
            hy = big_hermite_q_all(target, &p.y, &s, &q);
        }
        if k > 0 {
            coef = coef * p.rho / q_number(k, &q);
        }
        coef * hx[k] * hy[k]
    })?;
    Ok(phi_x * phi_y / g00 * kernel.value)
}
