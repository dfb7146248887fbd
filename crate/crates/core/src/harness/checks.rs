//! One function per registered identity. Each returns the worst residual (or an
//! exact verdict) over its grid together with the parameters it covered.

use rayon::prelude::*;
use serde_json::{json, Value};

use crate::bivariate::{
    gamma, gram_entry, hermite_product_series, main_i_residual, omega_product_identity, q_generating_function_check,
    q_shift_identity, qkk_inversion, quadrature_inner_products, reciprocal_product_residual, shifted_rho_exact,
    Comparison, QEvaluator, QPolyTable,
};
use crate::error::{Error, Result};
use crate::families::{asc_p_all, big_hermite_q, hermite_q, hermite_q_all, SupportInterval};
use crate::harness::SuiteConfig;
use crate::kernels::{eta_n, f_cn, f_n, phi_h, poisson_mehler_product, KernelParams};
use crate::poly::Poly2;
use crate::qarith::{q_factorial, q_pochhammer};
use crate::quadrature::integrate_many_1d;
use crate::scalar::{format_rational, ExactScalar, Quad, Scalar};

/// Result of a single check before tolerance is applied.
pub(crate) enum Outcome {
    Residual(f64, Value),
    Exact(bool, Value),
}

fn worst<P: Sync>(items: &[P], f: impl Fn(&P) -> Result<f64> + Sync + Send) -> Result<f64> {
    let residuals: Vec<Result<f64>> = items.par_iter().map(f).collect();
    let mut m = 0.0f64;
    for r in residuals {
        let r = r?;
        if r.is_nan() {
            return Err(Error::Numerical("residual evaluated to NaN".into()));
        }
        m = m.max(r);
    }
    Ok(m)
}

fn all_hold<P: Sync>(items: &[P], f: impl Fn(&P) -> Result<bool> + Sync + Send) -> Result<bool> {
    let verdicts: Vec<Result<bool>> = items.par_iter().map(f).collect();
    let mut ok = true;
    for v in verdicts {
        ok &= v?;
    }
    Ok(ok)
}

fn quad_params(p: &[f64; 4]) -> Result<KernelParams<Quad>> {
    KernelParams::new(Quad::from(p[0]), Quad::from(p[1]), Quad::from(p[2]), Quad::from(p[3]))
}

fn grid_params(cfg: &SuiteConfig) -> Value {
    json!({ "qs": cfg.qs, "rhos": cfg.rhos, "grid_points": cfg.grid_points, "grid_fraction": cfg.grid_fraction })
}

fn exact_params(cfg: &SuiteConfig) -> Value {
    json!({ "pairs": cfg.exact_pairs, "max_level": cfg.exact_max_level })
}

fn half_width(q: f64) -> Result<f64> {
    SupportInterval::new(q)?.half_width().ok_or_else(|| Error::domain("needs |q| < 1"))
}

/// Ten deterministic interior points `(x, y, ρ, q, s, t)` cycling through the grid.
fn sample_points(cfg: &SuiteConfig) -> Result<Vec<[f64; 6]>> {
    (0..10)
        .map(|k| {
            let q = cfg.qs[k % cfg.qs.len()];
            let rho = cfg.rhos[(k + k / cfg.qs.len()) % cfg.rhos.len()];
            let w = cfg.grid_fraction * half_width(q)?;
            let kf = k as f64;
            Ok([w * (-0.8 + 0.16 * kf), w * (0.6 - 0.13 * kf), rho, q, 0.2 + 0.02 * kf, 0.25 - 0.03 * kf])
        })
        .collect()
}

pub(crate) fn pm(cfg: &SuiteConfig) -> Result<Outcome> {
    let policy = cfg.extended_policy;
    let r = worst(&cfg.grid()?, |p| {
        let kp = quad_params(p)?;
        let series = gamma(0, 0, &kp, &policy)?.value;
        let product = poisson_mehler_product(&kp, &policy)?.value;
        Ok((series - product).abs_val().to_f64())
    })?;
    Ok(Outcome::Residual(r, grid_params(cfg)))
}

pub(crate) fn upm(cfg: &SuiteConfig) -> Result<Outcome> {
    let policy = cfg.extended_policy;
    let top = cfg.max_index;
    let r = worst(&cfg.grid()?, |p| {
        let kp = quad_params(p)?;
        let g00 = gamma(0, 0, &kp, &policy)?.value;
        let mut eval = QEvaluator::new(kp.x, kp.y, kp.rho, kp.q)?;
        let mut m = 0.0f64;
        for d in 0..=top {
            for j in 0..=d {
                let g = gamma(d - j, j, &kp, &policy)?.value;
                m = m.max((g - eval.value(d - j, j)? * g00).abs_val().to_f64());
            }
        }
        Ok(m)
    })?;
    let mut params = grid_params(cfg);
    params["max_index"] = json!(top);
    Ok(Outcome::Residual(r, params))
}

pub(crate) fn lemma_basic(cfg: &SuiteConfig) -> Result<Outcome> {
    let policy = cfg.policy;
    let points = sample_points(cfg)?;
    let r = worst(&points, |p| {
        let (x, q, t) = (p[0], p[3], p[5]);
        let phi = phi_h(x, t, q, &policy)?.value;
        let mut m = 0.0f64;
        for n in 0..=5 {
            let eta = eta_n(n, x, t, q, &policy)?.value;
            m = m.max((eta - big_hermite_q(n, &x, &t, &q) * phi).abs());
        }
        Ok(m)
    })?;
    let pts: Vec<[f64; 3]> = points.iter().map(|p| [p[0], p[5], p[3]]).collect();
    Ok(Outcome::Residual(r, json!({ "points_x_t_q": pts, "max_n": 5 })))
}

/// Quadrature inner products of all `Q_{i,j}` with `i + j ≤ top`, in level order.
fn level_products(rho: f64, q: f64, top: usize, cfg: &SuiteConfig) -> Result<(Vec<usize>, Vec<(usize, usize)>, Vec<Vec<f64>>)> {
    let table = QPolyTable::build(rho, q, top)?;
    let mut levels = Vec::new();
    let mut index = Vec::new();
    let mut polys: Vec<Poly2<f64>> = Vec::new();
    for d in 0..=top {
        for j in 0..=d {
            levels.push(d);
            index.push((d - j, j));
            polys.push(table.get(d - j, j).expect("built").clone());
        }
    }
    let (mat, _) = quadrature_inner_products(&polys, rho, q, &cfg.quadrature, &cfg.policy)?;
    Ok((levels, index, mat))
}

pub(crate) fn fch_i_cross(cfg: &SuiteConfig) -> Result<Outcome> {
    let top = cfg.cross_max_level;
    let r = worst(&cfg.parameter_pairs(), |&(rho, q)| {
        let (levels, _, mat) = level_products(rho, q, top, cfg)?;
        let mut m = 0.0f64;
        for a in 0..levels.len() {
            for b in 0..levels.len() {
                if levels[a] != levels[b] {
                    m = m.max(mat[a][b].abs());
                }
            }
        }
        Ok(m)
    })?;
    Ok(Outcome::Residual(r, json!({ "qs": cfg.qs, "rhos": cfg.rhos, "max_level": top })))
}

pub(crate) fn fch_i_gram(cfg: &SuiteConfig) -> Result<Outcome> {
    let top = cfg.gram_max_level;
    let r = worst(&cfg.parameter_pairs(), |&(rho, q)| {
        let (levels, index, mat) = level_products(rho, q, top, cfg)?;
        let mut m = 0.0f64;
        for a in 0..levels.len() {
            for b in 0..levels.len() {
                if levels[a] == levels[b] {
                    let closed = gram_entry(levels[a], index[a].1, index[b].1, &rho, &q)?;
                    m = m.max((mat[a][b] - closed).abs());
                }
            }
        }
        Ok(m)
    })?;
    Ok(Outcome::Residual(r, json!({ "qs": cfg.qs, "rhos": cfg.rhos, "max_level": top })))
}

pub(crate) fn fch_ii(cfg: &SuiteConfig) -> Result<Outcome> {
    let policy = cfg.extended_policy;
    let points = sample_points(cfg)?;
    let r = worst(&points, |p| {
        let kp = quad_params(&[p[0], p[1], p[2], p[3]])?;
        q_generating_function_check(Quad::from(p[4]), Quad::from(p[5]), &kp, &policy)
    })?;
    Ok(Outcome::Residual(r, json!({ "points_x_y_rho_q_s_t": points })))
}

fn exact_levels(cfg: &SuiteConfig) -> Vec<(usize, usize)> {
    let l = cfg.exact_max_level;
    (0..=l).flat_map(|d| (0..=d).map(move |j| (d - j, j))).collect()
}

pub(crate) fn qnaq(cfg: &SuiteConfig) -> Result<Outcome> {
    let pairs = cfg.exact_pairs()?;
    let cases: Vec<_> = pairs
        .iter()
        .flat_map(|pair| exact_levels(cfg).into_iter().flat_map(move |ij| (0..=cfg.exact_max_level).map(move |m| (pair, ij, m))))
        .collect();
    let ok = all_hold(&cases, |((rho, q), (i, j), m)| Ok(q_shift_identity(*i, *j, *m, rho, q)?.holds()))?;
    Ok(Outcome::Exact(ok, exact_params(cfg)))
}

pub(crate) fn il(cfg: &SuiteConfig) -> Result<Outcome> {
    let pairs = cfg.exact_pairs()?;
    let cases: Vec<_> = pairs.iter().flat_map(|p| (0..=cfg.exact_max_level).map(move |n| (p, n))).collect();
    let ok = all_hold(&cases, |((rho, q), n)| Ok(omega_product_identity(*n, rho, q)?.holds()))?;
    Ok(Outcome::Exact(ok, exact_params(cfg)))
}

pub(crate) fn qkk(cfg: &SuiteConfig) -> Result<Outcome> {
    let pairs: Vec<_> = cfg.exact_pairs()?.into_iter().filter(|(rho, _)| *rho != ExactScalar::from_i64(0)).collect();
    let cases: Vec<_> = pairs.iter().flat_map(|p| (0..=cfg.exact_max_level).map(move |n| (p, n))).collect();
    let ok = all_hold(&cases, |((rho, q), n)| Ok(qkk_inversion(*n, rho, q)?.holds()))?;
    let used: Vec<(String, String)> = pairs.iter().map(|(r, q)| (format_rational(r), format_rational(q))).collect();
    Ok(Outcome::Exact(ok, json!({ "pairs": used, "max_level": cfg.exact_max_level })))
}

pub(crate) fn pomoc(cfg: &SuiteConfig) -> Result<Outcome> {
    let pairs = cfg.exact_pairs()?;
    let l = cfg.exact_max_level;
    let order = l + 2;
    let cases: Vec<_> = pairs
        .iter()
        .flat_map(|(_, q)| exact_levels(cfg).into_iter().flat_map(move |ij| (0..=l).map(move |m| (q, ij, m))))
        .collect();
    let ok = all_hold(&cases, |(q, (i, j), m)| {
        Ok(shifted_rho_exact(*i, *j, *m, order, q)?.iter().all(Comparison::holds))
    })?;
    let mut params = exact_params(cfg);
    params["series_order"] = json!(order);
    Ok(Outcome::Exact(ok, params))
}

pub(crate) fn main_i(cfg: &SuiteConfig) -> Result<Outcome> {
    let policy = cfg.extended_policy;
    let r = worst(&cfg.grid()?, |p| {
        let kp = quad_params(p)?;
        (0..=2).map(|i| main_i_residual(i, i, &kp, &policy)).try_fold(0.0f64, |m, r| Ok(m.max(r?)))
    })?;
    let mut params = grid_params(cfg);
    params["max_diagonal"] = json!(2);
    Ok(Outcome::Residual(r, params))
}

pub(crate) fn recip(cfg: &SuiteConfig) -> Result<Outcome> {
    let policy = cfg.extended_policy;
    let r = worst(&cfg.grid()?, |p| reciprocal_product_residual(&quad_params(p)?, &policy))?;
    Ok(Outcome::Residual(r, grid_params(cfg)))
}

pub(crate) fn lnsk(cfg: &SuiteConfig) -> Result<Outcome> {
    let policy = cfg.extended_policy;
    let r = worst(&cfg.grid()?, |p| {
        let kp = quad_params(p)?;
        let mut m = 0.0f64;
        for d in 0..=2 {
            for j in 0..=d {
                let series = hermite_product_series(d - j, j, &kp, &policy)?.value;
                let direct = hermite_q(d - j, &kp.x, &kp.q) * hermite_q(j, &kp.y, &kp.q);
                m = m.max((series - direct).abs_val().to_f64());
            }
        }
        Ok(m)
    })?;
    let mut params = grid_params(cfg);
    params["max_index"] = json!(2);
    Ok(Outcome::Residual(r, params))
}

pub(crate) fn ort(cfg: &SuiteConfig) -> Result<Outcome> {
    let d = cfg.ort_max_degree;
    let policy = cfg.policy;
    let r = worst(&cfg.ort_qs, |&q| {
        let pairs: Vec<(usize, usize)> = (0..=d).flat_map(|n| (n..=d).map(move |m| (n, m))).collect();
        let est = integrate_many_1d(
            pairs.len(),
            |x, out| {
                let w = f_n(x, q, &policy).unwrap_or(f64::NAN);
                let h = hermite_q_all(d, &x, &q);
                for (o, &(n, m)) in out.iter_mut().zip(&pairs) {
                    *o = w * h[n] * h[m];
                }
            },
            q,
            &cfg.quadrature,
        )?;
        Ok(pairs
            .iter()
            .zip(&est.values)
            .map(|(&(n, m), v)| (v - if n == m { q_factorial(n, &q) } else { 0.0 }).abs())
            .fold(0.0, f64::max))
    })?;
    Ok(Outcome::Residual(r, json!({ "qs": cfg.ort_qs, "max_degree": d })))
}

pub(crate) fn pkw(cfg: &SuiteConfig) -> Result<Outcome> {
    let d = cfg.pkw_max_degree;
    let policy = cfg.policy;
    let mut cases = Vec::new();
    for (rho, q) in cfg.parameter_pairs() {
        let w = cfg.grid_fraction * half_width(q)?;
        for y in [-w, 0.0, 0.5 * w] {
            cases.push((rho, q, y));
        }
    }
    let r = worst(&cases, |&(rho, q, y)| {
        let pairs: Vec<(usize, usize)> = (0..=d).flat_map(|n| (n..=d).map(move |m| (n, m))).collect();
        let est = integrate_many_1d(
            pairs.len(),
            |x, out| {
                let w = f_cn(x, y, rho, q, &policy).unwrap_or(f64::NAN);
                let p = asc_p_all(d, &x, &y, &rho, &q).unwrap_or_else(|_| vec![f64::NAN; d + 1]);
                for (o, &(n, m)) in out.iter_mut().zip(&pairs) {
                    *o = w * p[n] * p[m];
                }
            },
            q,
            &cfg.quadrature,
        )?;
        let r2 = rho * rho;
        Ok(pairs
            .iter()
            .zip(&est.values)
            .map(|(&(n, m), v)| {
                let norm = if n == m { q_factorial(n, &q) * q_pochhammer(&r2, &q, n) } else { 0.0 };
                (v - norm).abs()
            })
            .fold(0.0, f64::max))
    })?;
    Ok(Outcome::Residual(r, json!({ "qs": cfg.qs, "rhos": cfg.rhos, "y": "-w, 0, w/2", "max_degree": d })))
}

fn normal_pdf(x: f64, mean: f64, var: f64) -> f64 {
    (-(x - mean) * (x - mean) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
}

/// Deviation of `f_N(·|q)` from the standard normal density over `[-4, 4]`.
pub(crate) fn normal_deviation(q: f64, cfg: &SuiteConfig) -> Result<f64> {
    let xs: Vec<f64> = (0..=80).map(|k| -4.0 + 0.1 * k as f64).collect();
    worst(&xs, |&x| Ok((f_n(x, q, &cfg.policy)? - normal_pdf(x, 0.0, 1.0)).abs()))
}

/// Deviation of `f_CN(·|y,ρ,q)` from the `N(ρy, 1 − ρ²)` density.
pub(crate) fn conditional_deviation(q: f64, cfg: &SuiteConfig) -> Result<f64> {
    let mut cases = Vec::new();
    for rho in [0.3, 0.6] {
        for y in [-1.0, 0.0, 0.8] {
            for k in 0..=80 {
                cases.push((-4.0 + 0.1 * k as f64, y, rho));
            }
        }
    }
    worst(&cases, |&(x, y, rho)| {
        Ok((f_cn(x, y, rho, q, &cfg.policy)? - normal_pdf(x, rho * y, 1.0 - rho * rho)).abs())
    })
}

pub(crate) fn zb1_limit(cfg: &SuiteConfig) -> Result<Outcome> {
    let devs = cfg.limit_qs.iter().map(|&q| normal_deviation(q, cfg)).collect::<Result<Vec<_>>>()?;
    let monotone = devs.windows(2).all(|w| w[1] < w[0]);
    let last = *cfg.limit_qs.last().ok_or_else(|| Error::domain("limit probes need at least one q"))?;
    let conditional = conditional_deviation(last, cfg)?;
    let (x, rho) = (0.5, 0.3);
    let zb2 = (phi_h(x, rho, last, &cfg.policy)?.value - (rho * x - rho * rho / 2.0).exp()).abs();
    let residual = if monotone { devs.last().copied().unwrap_or(0.0).max(conditional).max(zb2) } else { f64::INFINITY };
    Ok(Outcome::Residual(
        residual,
        json!({
            "qs": cfg.limit_qs,
            "normal_deviation": devs,
            "monotone": monotone,
            "conditional_deviation": conditional,
            "generating_function_deviation": zb2,
        }),
    ))
}
