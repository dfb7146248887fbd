//! Kernel polynomials `v`, `l`, `ω`, the densities `f_N`, `f_bN`, `f_CN`,
//! `f_2D`, and the generating functions `φ_H`, `φ_P`, `η_n`.
//!
//! Products and series are generic over [`Real`]: `f64` for quadrature and grid
//! evaluation, [`Quad`](crate::scalar::Quad) where large cancellations have to be resolved.
//! Densities are zero outside `S(q)`.

use crate::error::{Error, Result};
use crate::families::NormalizedHermite;
use crate::poly::Poly2;
use crate::qarith::{q_number, QParam};
use crate::scalar::{Real, Scalar};
use crate::truncation::{first_index_below, q_product, sum_series, TruncationPolicy, Truncated};

/// `v(x|t) = 1 − 2xt + t²`.
pub fn v_poly<T: Scalar>(x: &T, t: &T) -> T {
    T::one() - T::from_i64(2) * x.clone() * t.clone() + t.clone() * t.clone()
}

/// `l(x|a) = (1 + a)² − 4ax²`.
pub fn l_poly<T: Scalar>(x: &T, a: &T) -> T {
    let one_a = T::one() + a.clone();
    one_a.clone() * one_a - T::from_i64(4) * a.clone() * x.clone() * x.clone()
}

/// `ω(x,y|ρ) = (1 − ρ²)² − 4ρ(1 + ρ²)xy + 4ρ²(x² + y²)`.
pub fn omega_poly<T: Scalar>(x: &T, y: &T, rho: &T) -> T {
    let r2 = rho.clone() * rho.clone();
    let a = T::one() - r2.clone();
    let four = T::from_i64(4);
    a.clone() * a - four.clone() * rho.clone() * (T::one() + r2.clone()) * x.clone() * y.clone()
        + four * r2 * (x.clone() * x.clone() + y.clone() * y.clone())
}

/// `ω(x√(1−q)/2, y√(1−q)/2 | r)` as a polynomial in `x, y`; only `(1−q)/4`
/// enters, so coefficients stay rational.
pub fn omega_scaled_poly<T: Scalar>(r: &T, q: &T) -> Poly2<T> {
    let r2 = r.clone() * r.clone();
    let a = T::one() - r2.clone();
    let one_q = T::one() - q.clone();
    let mut rows = vec![vec![T::zero(); 3]; 3];
    rows[0][0] = a.clone() * a;
    rows[1][1] = -(r.clone() * (T::one() + r2.clone()) * one_q.clone());
    rows[2][0] = r2.clone() * one_q.clone();
    rows[0][2] = r2 * one_q;
    Poly2::new(rows)
}

/// `√(1−q)/2`, the factor that maps `S(q)` onto `[−1, 1]`.
fn unit_scale<T: Real>(q: T) -> T {
    (T::one() - q).sqrt() / T::from_i64(2)
}

fn convergent_q<T: Real>(q: T) -> Result<()> {
    QParam::new_convergent(q).map(|_| ())
}

fn in_support<T: Real>(x: T, q: T) -> bool {
    (x * unit_scale(q)).abs_val() <= T::one()
}

fn require_support<T: Real>(name: &str, x: T, q: T) -> Result<()> {
    if in_support(x, q) {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} = {} lies outside S(q) for q = {}", x.to_f64(), q.to_f64())))
    }
}

fn require_rho<T: Real>(rho: T) -> Result<()> {
    if rho.abs_val() < T::one() {
        Ok(())
    } else {
        Err(Error::domain(format!("|rho| must be < 1, got {}", rho.to_f64())))
    }
}

/// Generating-function argument guard `|t|√(1−q) < 1`.
fn require_gf_arg<T: Real>(name: &str, t: T, q: T) -> Result<()> {
    let r = t.abs_val().to_f64() * (1.0 - q.to_f64()).sqrt();
    if r < 1.0 {
        Ok(())
    } else {
        Err(Error::domain(format!("{name} needs |{name}|*sqrt(1-q) < 1, got {r}")))
    }
}

/// Sum over `j > J` of `c r |q|^j / (1 − r |q|^j)`, bounded geometrically.
fn geometric_tail(c: f64, r: f64, q: f64, last: usize) -> f64 {
    let qa = q.abs();
    let lead = r * qa.powi(last as i32 + 1);
    if lead >= 1.0 {
        return f64::INFINITY;
    }
    c * lead / ((1.0 - qa) * (1.0 - lead))
}

/// Validated `(x, y, ρ, q)` with `|ρ| < 1`, `|q| < 1`, `x, y ∈ S(q)`.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct KernelParams<T> {
    pub x: T,
    pub y: T,
    pub rho: T,
    pub q: T,
}

impl<T: Real> KernelParams<T> {
    pub fn new(x: T, y: T, rho: T, q: T) -> Result<Self> {
        convergent_q(q)?;
        require_rho(rho)?;
        require_support("x", x, q)?;
        require_support("y", y, q)?;
        Ok(KernelParams { x, y, rho, q })
    }

    pub fn swapped(&self) -> Self {
        KernelParams { x: self.y, y: self.x, ..*self }
    }

    pub fn with_rho(&self, rho: T) -> Result<Self> {
        Self::new(self.x, self.y, rho, self.q)
    }
}

/// `φ_H(x|ρ,q) = 1/∏_{j≥0} v(x√(1−q)/2 | ρ q^j √(1−q))`.
pub fn phi_h<T: Real>(x: T, rho: T, q: T, policy: &TruncationPolicy) -> Result<Truncated<T>> {
    convergent_q(q)?;
    require_support("x", x, q)?;
    require_gf_arg("rho", rho, q)?;
    let xs = x * unit_scale(q);
    let tau = rho * (T::one() - q).sqrt();
    let r = tau.abs_val().to_f64();
    let prod = q_product(q, |u| v_poly(&xs, &(tau * u)), |j| geometric_tail(2.0, r, q.to_f64(), j), policy)?;
    Ok(Truncated { value: T::one() / prod.value, ..prod })
}

/// `Σ_n ρ^n/[n]_q! H_n(x|q)`, the series form of [`phi_h`].
pub fn phi_h_series<T: Real>(x: T, rho: T, q: T, policy: &TruncationPolicy) -> Result<Truncated<T>> {
    eta_n(0, x, rho, q, policy)
}

/// `η_n(x|t,q) = Σ_j t^j/[j]_q! H_{j+n}(x|q)`.
pub fn eta_n<T: Real>(n: usize, x: T, t: T, q: T, policy: &TruncationPolicy) -> Result<Truncated<T>> {
    convergent_q(q)?;
    require_support("x", x, q)?;
    require_gf_arg("t", t, q)?;
    let mut hermite = NormalizedHermite::new(x, q).skip(n);
    // coef = t^j √([j+n]_q!) / [j]_q!
    let mut coef = (1..=n).fold(T::one(), |acc, k| acc * q_number(k, &q)).sqrt();
    sum_series(policy, |j| {
        if j > 0 {
            coef = coef * t * q_number(j + n, &q).sqrt() / q_number(j, &q);
        }
        coef * hermite.next().expect("endless")
    })
}

/// Number of factors the direct `f_N` product needs, or `None` past `max_terms`.
fn f_n_factors(q: f64, policy: &TruncationPolicy) -> Option<usize> {
    first_index_below(&|j| geometric_tail(3.0, 1.0, q, j + 1), policy.tol, policy.max_terms)
}

/// q-Normal density `f_N(x|q)`, zero outside `S(q)`.
pub fn f_n<T: Real>(x: T, q: T, policy: &TruncationPolicy) -> Result<T> {
    convergent_q(q)?;
    let xs = x * unit_scale(q);
    if xs.abs_val() >= T::one() {
        return Ok(T::zero());
    }
    if f_n_factors(q.to_f64(), policy).is_none() {
        return Ok(T::from_f64(f_n_theta(x.to_f64(), q.to_f64(), policy)?));
    }
    let qf = q.to_f64();
    // j ≥ 1 factors of (q)_∞ ∏ l(x'|q^j), indexed from u = q^0.
    let prod = q_product(
        q,
        |u| {
            let a = q * u;
            (T::one() - a) * l_poly(&xs, &a)
        },
        |j| geometric_tail(3.0, 1.0, qf, j + 1),
        policy,
    )?;
    let edge = ((T::one() - q) * (T::from_i64(4) - (T::one() - q) * x * x)).sqrt();
    Ok(edge * prod.value / (T::from_i64(2) * T::pi()))
}

/// `f_N` through the theta series
/// `(√(1−q)/π) Σ_{n≥1} (−1)^{n+1} q^{n(n−1)/2} sin((2n−1)θ)`, `x = (2/√(1−q)) cos θ`,
/// which needs `O(√(log(1/tol)/(1−q)))` terms instead of `O(1/(1−q))` factors.
fn f_n_theta(x: f64, q: f64, policy: &TruncationPolicy) -> Result<f64> {
    let s = (1.0 - q).sqrt();
    let theta = (x * s / 2.0).clamp(-1.0, 1.0).acos();
    let mut sum = 0.0;
    let mut weight = 1.0f64;
    let mut sign = 1.0;
    for n in 1..=policy.max_terms {
        sum += sign * weight * ((2 * n - 1) as f64 * theta).sin();
        weight *= q.powi(n as i32);
        sign = -sign;
        if weight.abs() < policy.tol * 1e-3 {
            return Ok(s * sum / std::f64::consts::PI);
        }
    }
    Err(Error::Convergence(format!("theta series for f_N did not converge at q = {q}")))
}

/// Big q-Hermite weight `f_bN(x|a,q) = f_N(x|q) φ_H(x|a,q)`.
pub fn f_bn<T: Real>(x: T, a: T, q: T, policy: &TruncationPolicy) -> Result<T> {
    convergent_q(q)?;
    require_gf_arg("a", a, q)?;
    if !in_support(x, q) {
        return Ok(T::zero());
    }
    Ok(f_n(x, q, policy)? * phi_h(x, a, q, policy)?.value)
}

/// Poisson–Mehler product `(ρ²)_∞ / ∏_{j≥0} ω(x√(1−q)/2, y√(1−q)/2 | ρ q^j)`.
pub fn poisson_mehler_product<T: Real>(p: &KernelParams<T>, policy: &TruncationPolicy) -> Result<Truncated<T>> {
    let s = unit_scale(p.q);
    let (xs, ys) = (p.x * s, p.y * s);
    let rho = p.rho;
    let r = rho.abs_val().to_f64();
    q_product(
        p.q,
        |u| (T::one() - rho * rho * u) / omega_poly(&xs, &ys, &(rho * u)),
        |j| geometric_tail(5.0, r, p.q.to_f64(), j),
        policy,
    )
}

/// Conditional density `f_CN(x|y,ρ,q) = f_N(x|q) (ρ²)_∞ / ∏ ω`, zero when
/// `x` or `y` is outside `S(q)`.
pub fn f_cn<T: Real>(x: T, y: T, rho: T, q: T, policy: &TruncationPolicy) -> Result<T> {
    convergent_q(q)?;
    require_rho(rho)?;
    if !in_support(x, q) || !in_support(y, q) {
        return Ok(T::zero());
    }
    let fx = f_n(x, q, policy)?;
    if fx == T::zero() {
        return Ok(fx);
    }
    let p = KernelParams { x, y, rho, q };
    Ok(fx * poisson_mehler_product(&p, policy)?.value)
}

/// Joint density `f_2D(x,y|ρ,q) = f_CN(x|y,ρ,q) f_N(y|q)`.
pub fn f_2d<T: Real>(x: T, y: T, rho: T, q: T, policy: &TruncationPolicy) -> Result<T> {
    let c = f_cn(x, y, rho, q, policy)?;
    if c == T::zero() {
        return Ok(c);
    }
    Ok(c * f_n(y, q, policy)?)
}

/// `φ_P = ∏_j v(y√(1−q)/2 | ρ t q^j √(1−q)) / v(x√(1−q)/2 | t q^j √(1−q))`.
pub fn phi_p<T: Real>(x: T, y: T, rho: T, t: T, q: T, policy: &TruncationPolicy) -> Result<Truncated<T>> {
    let p = KernelParams::new(x, y, rho, q)?;
    require_gf_arg("t", t, q)?;
    let s = unit_scale(q);
    let (xs, ys) = (p.x * s, p.y * s);
    let tau = t * (T::one() - q).sqrt();
    let r = tau.abs_val().to_f64();
    q_product(
        q,
        |u| v_poly(&ys, &(rho * tau * u)) / v_poly(&xs, &(tau * u)),
        |j| geometric_tail(4.0, r, q.to_f64(), j),
        policy,
    )
}

/// `Σ_n t^n/[n]_q! P_n(x|y,ρ,q)`, the series form of [`phi_p`].
pub fn phi_p_series<T: Real>(x: T, y: T, rho: T, t: T, q: T, policy: &TruncationPolicy) -> Result<Truncated<T>> {
    let p = KernelParams::new(x, y, rho, q)?;
    require_gf_arg("t", t, q)?;
    let rho2 = rho * rho;
    let (mut prev, mut cur) = (T::zero(), T::one());
    let mut coef = T::one();
    sum_series(policy, |n| {
        if n > 0 {
            let k = n - 1;
            let c = if k == 0 { T::zero() } else { q_number(k, &q) * (T::one() - rho2 * q.powu(k as u32 - 1)) };
            let next = (p.x - rho * p.y * q.powu(k as u32)) * cur - c * prev;
            prev = cur;
            cur = next;
            coef = coef * t / q_number(n, &q);
        }
        coef * cur
    })
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::families::{big_hermite_q, hermite_q};
    use crate::quadrature::{integrate_1d, QuadratureRule};
    use crate::scalar::{ratio, Quad};

    fn pol() -> TruncationPolicy {
        TruncationPolicy::default()
    }

    #[test]
    fn small_polys() {
        assert_eq!(v_poly(&0.7, &0.0), 1.0);
        assert!((v_poly(&1.0, &0.3) - 0.49).abs() < 1e-15);
        for i in 0..=20 {
            let x = -1.0 + 0.1 * i as f64;
            for t in [-3.0, -0.5, 0.0, 0.9, 2.5] {
                assert!(v_poly(&x, &t) >= -1e-15);
            }
        }
        assert_eq!(l_poly(&0.4, &0.0), 1.0);
        assert!((l_poly(&0.0, &0.3) - 1.69).abs() < 1e-15);
        assert!((l_poly(&1.0, &0.3) - 0.49).abs() < 1e-15);
        assert_eq!(omega_poly(&0.3, &0.7, &0.0), 1.0);
        let r = ratio(2, 5);
        assert_eq!(omega_poly(&ratio(1, 3), &ratio(-3, 4), &r), omega_poly(&ratio(-3, 4), &ratio(1, 3), &r));
        assert_eq!(omega_poly(&ratio(0, 1), &ratio(0, 1), &r), (ratio(1, 1) - r.clone() * r.clone()).powu(2));
    }

    #[test]
    fn omega_scaled_poly_matches_pointwise() {
        let (r, q) = (ratio(1, 3), ratio(1, 2));
        let p = omega_scaled_poly(&r, &q);
        let (x, y) = (0.37f64, -1.2f64);
        let s = 0.5f64.sqrt() / 2.0;
        let direct = omega_poly(&(x * s), &(y * s), &(1.0 / 3.0));
        assert!((p.map(<f64 as Real>::from_exact).eval(&x, &y) - direct).abs() < 1e-15);
        assert_eq!(omega_scaled_poly(&ratio(0, 1), &q), Poly2::one());
    }

    #[test]
    fn phi_h_product_and_series_agree() {
        assert_eq!(phi_h(0.8, 0.0, 0.5, &pol()).unwrap().value, 1.0);
        let a = phi_h(0.5, 0.3, 0.5, &pol()).unwrap().value;
        let b = phi_h_series(0.5, 0.3, 0.5, &pol()).unwrap().value;
        assert!((a - b).abs() < 1e-10);
        for q in [-0.5, 0.0, 0.3, 0.9] {
            let c = 2.0 / (1.0f64 - q).sqrt();
            let a = phi_h(0.9 * c, 0.6, q, &pol()).unwrap().value;
            let b = phi_h_series(0.9 * c, 0.6, q, &pol()).unwrap().value;
            assert!((a - b).abs() < 1e-10 * a.abs().max(1.0), "q = {q}: {a} vs {b}");
        }
        assert!(phi_h(0.1, 5.0, 0.0, &pol()).is_err());
    }

    #[test]
    fn phi_h_classical_limit() {
        let (x, rho) = (0.5f64, 0.3f64);
        let v = phi_h(x, rho, 1.0 - 1e-6, &pol()).unwrap().value;
        assert!((v - (rho * x - rho * rho / 2.0).exp()).abs() < 1e-3);
    }

    #[test]
    fn f_n_values() {
        assert!((f_n(0.0, 0.0, &pol()).unwrap() - 1.0 / std::f64::consts::PI).abs() < 1e-15);
        for q in [-0.5, 0.3, 0.9] {
            let c = 2.0 / (1.0f64 - q).sqrt();
            assert_eq!(f_n(c, q, &pol()).unwrap(), 0.0);
            assert_eq!(f_n(-c * 1.01, q, &pol()).unwrap(), 0.0);
        }
        assert!(f_n(0.0, 1.0, &pol()).is_err());
    }

    #[test]
    fn theta_route_matches_product() {
        for q in [-0.5, 0.2, 0.7, 0.95] {
            let c = 2.0 / (1.0f64 - q).sqrt();
            for t in [-0.9, -0.3, 0.0, 0.55] {
                let x = t * c;
                let direct = f_n(x, q, &pol()).unwrap();
                let theta = f_n_theta(x, q, &pol()).unwrap();
                assert!((direct - theta).abs() < 1e-13, "q = {q}, x = {x}: {direct} vs {theta}");
            }
        }
    }

    #[test]
    fn f_n_has_unit_mass() {
        for q in [-0.5, 0.0, 0.5, 0.9] {
            let est = integrate_1d(|x| f_n(x, q, &pol()).unwrap(), q, &QuadratureRule::default()).unwrap();
            assert!((est.value - 1.0).abs() < 1e-8, "q = {q}: {}", est.value);
        }
    }

    #[test]
    fn f_n_approaches_normal_monotonically() {
        let mut last = f64::INFINITY;
        for q in [0.9, 0.99, 0.999] {
            let dev = (0..=40)
                .map(|i| {
                    let x = -4.0 + 0.2 * i as f64;
                    let normal = (-x * x / 2.0).exp() / (2.0 * std::f64::consts::PI).sqrt();
                    (f_n(x, q, &pol()).unwrap() - normal).abs()
                })
                .fold(0.0, f64::max);
            assert!(dev < last, "q = {q}");
            last = dev;
        }
    }

    #[test]
    fn f_bn_orthogonality() {
        let (a, q) = (0.3, 0.5);
        assert_eq!(f_bn(0.4, 0.0, q, &pol()).unwrap(), f_n(0.4, q, &pol()).unwrap());
        let rule = QuadratureRule::default();
        let mass = integrate_1d(|x| f_bn(x, a, q, &pol()).unwrap(), q, &rule).unwrap();
        assert!((mass.value - 1.0).abs() < 1e-7);
        let norm = integrate_1d(
            |x| {
                let h = big_hermite_q(1, &x, &a, &q);
                h * h * f_bn(x, a, q, &pol()).unwrap()
            },
            q,
            &rule,
        )
        .unwrap();
        assert!((norm.value - 1.0).abs() < 1e-7);
    }

    #[test]
    fn f_cn_properties() {
        let q = 0.3;
        assert!((f_cn(0.2, 0.9, 0.0, q, &pol()).unwrap() - f_n(0.2, q, &pol()).unwrap()).abs() < 1e-16);
        let est = integrate_1d(|x| f_cn(x, 0.4, 0.5, q, &pol()).unwrap(), q, &QuadratureRule::default()).unwrap();
        assert!((est.value - 1.0).abs() < 1e-7);
        let c = 2.0 / (1.0f64 - q).sqrt();
        let ratio_min = (1..200)
            .map(|i| {
                let x = -c + 2.0 * c * i as f64 / 200.0;
                f_cn(x, 0.4, 0.5, q, &pol()).unwrap() / f_n(x, q, &pol()).unwrap()
            })
            .fold(f64::INFINITY, f64::min);
        assert!(ratio_min > 0.0);
    }

    #[test]
    fn f_cn_classical_limit() {
        let (y, rho, q) = (0.4f64, 0.5f64, 1.0 - 1e-6);
        for i in 0..=20 {
            let x = -3.0 + 0.3 * i as f64;
            let var = 1.0 - rho * rho;
            let g = (-(x - rho * y).powi(2) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt();
            assert!((f_cn(x, y, rho, q, &pol()).unwrap() - g).abs() < 1e-3, "x = {x}");
        }
    }

    #[test]
    fn f_2d_is_symmetric() {
        let (rho, q) = (0.45, 0.6);
        assert!((f_2d(0.3, -0.5, 0.0, q, &pol()).unwrap()
            - f_n(0.3, q, &pol()).unwrap() * f_n(-0.5, q, &pol()).unwrap())
        .abs()
            < 1e-16);
        let c = 2.0 / (1.0f64 - q).sqrt();
        for i in 0..5 {
            for j in 0..5 {
                let x = c * (-0.9 + 0.45 * i as f64);
                let y = c * (-0.9 + 0.45 * j as f64);
                let a = f_2d(x, y, rho, q, &pol()).unwrap();
                let b = f_2d(y, x, rho, q, &pol()).unwrap();
                assert!((a - b).abs() < 1e-10);
            }
        }
    }

    #[test]
    fn phi_p_cases() {
        let p = pol();
        assert_eq!(phi_p(0.3, -0.2, 0.4, 0.0, 0.5, &p).unwrap().value, 1.0);
        let a = phi_p(0.3, -0.2, 0.0, 0.25, 0.5, &p).unwrap().value;
        assert!((a - phi_h(0.3, 0.25, 0.5, &p).unwrap().value).abs() < 1e-14);
        let prod = phi_p(0.3, -0.2, 0.4, 0.25, 0.5, &p).unwrap().value;
        let series = phi_p_series(0.3, -0.2, 0.4, 0.25, 0.5, &p).unwrap().value;
        assert!((prod - series).abs() < 1e-10);
    }

    #[test]
    fn eta_lemma() {
        let p = pol();
        let (x, t, q) = (0.5, 0.3, 0.4);
        assert!((eta_n(0, x, t, q, &p).unwrap().value - phi_h(x, t, q, &p).unwrap().value).abs() < 1e-14);
        assert!((eta_n(4, x, 0.0, q, &p).unwrap().value - hermite_q(4, &x, &q)).abs() < 1e-14);
        let lhs = eta_n(3, x, t, q, &p).unwrap().value;
        let rhs = big_hermite_q(3, &x, &t, &q) * phi_h(x, t, q, &p).unwrap().value;
        assert!((lhs - rhs).abs() < 1e-9);
    }

    #[test]
    fn poisson_mehler_in_quad() {
        let policy = TruncationPolicy::extended();
        let q = Quad::from(0.9);
        let c = Quad::from(2.0) / (Quad::from(1.0) - q).sqrt() * Quad::from(0.95);
        let p = KernelParams::new(c, c, Quad::from(0.6), q).unwrap();
        let prod = poisson_mehler_product(&p, &policy).unwrap().value;
        assert!(prod.to_f64() > 1e8);
        assert!(KernelParams::new(c * Quad::from(1.1), c, Quad::from(0.6), q).is_err());
    }
}
