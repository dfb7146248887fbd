//! Gauss–Legendre integration over `S(q)` and `S(q)²`.
//!
//! The default transform substitutes `x = c cos θ`, `c = 2/√(1−q)`, which turns
//! the square-root edge of every density here into a smooth factor in `θ`.
//! Values are refined by doubling the node count; the reported error is the
//! difference between the last two levels.

use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use rayon::prelude::*;
use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::SupportInterval;

/// Nodes and weights of the `n`-point Gauss–Legendre rule on `[-1, 1]`,
/// ascending by node. Rules are cached per `n`.
pub fn gauss_legendre(n: usize) -> Arc<Vec<(f64, f64)>> {
    static CACHE: OnceLock<Mutex<HashMap<usize, Arc<Vec<(f64, f64)>>>>> = OnceLock::new();
    let cache = CACHE.get_or_init(|| Mutex::new(HashMap::new()));
    if let Some(rule) = cache.lock().expect("rule cache poisoned").get(&n) {
        return Arc::clone(rule);
    }
    let rule = Arc::new(compute_gauss_legendre(n));
    cache.lock().expect("rule cache poisoned").insert(n, Arc::clone(&rule));
    rule
}

fn compute_gauss_legendre(n: usize) -> Vec<(f64, f64)> {
    assert!(n >= 1, "Gauss-Legendre rule needs at least one node");
    let mut out = vec![(0.0, 0.0); n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi initial guess for the i-th largest root.
        let theta = std::f64::consts::PI * (i as f64 + 0.75) / (nf + 0.5);
        let mut x = (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf)) * theta.cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        out[n - 1 - i] = (x, w);
        out[i] = (-x, w);
    }
    out
}

/// `(P_n(x), P_n'(x))` by the three-term recurrence.
fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let (mut p0, mut p1) = (1.0, x);
    if n == 0 {
        return (1.0, 0.0);
    }
    for k in 1..n {
        let kf = k as f64;
        let p2 = ((2.0 * kf + 1.0) * x * p1 - kf * p0) / (kf + 1.0);
        p0 = p1;
        p1 = p2;
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "kebab-case")]
pub enum Transform {
    /// Affine map of `[-1, 1]` onto `S(q)`.
    Direct,
    /// `x = c cos θ` with `θ ∈ [0, π]`.
    Trig,
}

/// Starting node count per axis, transform, and refinement target.
#[derive(Debug, Clone, Copy, PartialEq, Serialize, Deserialize)]
pub struct QuadratureRule {
    pub nodes: usize,
    pub transform: Transform,
    /// Refinement stops once the level-to-level change is below
    /// `target · max(1, |value|)`.
    pub target: f64,
    pub max_nodes: usize,
}

impl Default for QuadratureRule {
    fn default() -> Self {
        QuadratureRule { nodes: 128, transform: Transform::Trig, target: 1e-10, max_nodes: 1024 }
    }
}

impl QuadratureRule {
    pub fn new(nodes: usize, transform: Transform, target: f64) -> Result<Self> {
        let rule = QuadratureRule { nodes, transform, target, ..Self::default() };
        rule.validate()?;
        Ok(rule)
    }

    fn validate(&self) -> Result<()> {
        if self.nodes < 2 {
            return Err(Error::domain(format!("quadrature needs at least 2 nodes, got {}", self.nodes)));
        }
        if !(self.target > 0.0) {
            return Err(Error::domain(format!("quadrature target must be positive, got {}", self.target)));
        }
        Ok(())
    }

    /// Physical nodes and weights on `[-c, c]` for `n` points.
    pub fn points(&self, half_width: f64, n: usize) -> Vec<(f64, f64)> {
        let base = gauss_legendre(n);
        match self.transform {
            Transform::Direct => base.iter().map(|&(u, w)| (half_width * u, half_width * w)).collect(),
            Transform::Trig => {
                let half_pi = std::f64::consts::FRAC_PI_2;
                base.iter()
                    .map(|&(u, w)| {
                        let theta = half_pi * (u + 1.0);
                        (half_width * theta.cos(), half_width * theta.sin() * half_pi * w)
                    })
                    .collect()
            }
        }
    }
}

/// A refined integral with its refinement-based error estimate.
#[derive(Debug, Clone, Copy, PartialEq, Serialize)]
pub struct Estimate {
    pub value: f64,
    pub error: f64,
    /// Nodes per axis at the final level.
    pub nodes: usize,
}

/// Several integrals refined together over one set of nodes.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct VecEstimate {
    pub values: Vec<f64>,
    /// Largest level-to-level change over all components.
    pub error: f64,
    pub nodes: usize,
}

fn half_width(q: f64) -> Result<f64> {
    SupportInterval::new(q)?
        .half_width()
        .ok_or_else(|| Error::domain("quadrature over S(q) needs |q| < 1"))
}

/// `∫_{S(q)} f(x) dx`.
pub fn integrate_1d(f: impl Fn(f64) -> f64 + Sync, q: f64, rule: &QuadratureRule) -> Result<Estimate> {
    let est = integrate_many_1d(1, |x, out| out[0] = f(x), q, rule)?;
    Ok(Estimate { value: est.values[0], error: est.error, nodes: est.nodes })
}

/// `∬_{S(q)²} f(x, y) dx dy` on a tensor-product grid.
pub fn integrate_2d(f: impl Fn(f64, f64) -> f64 + Sync, q: f64, rule: &QuadratureRule) -> Result<Estimate> {
    let est = integrate_many_2d(1, |x, y, out| out[0] = f(x, y), q, rule)?;
    Ok(Estimate { value: est.values[0], error: est.error, nodes: est.nodes })
}

/// `dim` integrals at once; `f(x, out)` writes the integrand values into `out`.
pub fn integrate_many_1d(
    dim: usize,
    f: impl Fn(f64, &mut [f64]) + Sync,
    q: f64,
    rule: &QuadratureRule,
) -> Result<VecEstimate> {
    rule.validate()?;
    let c = half_width(q)?;
    refine(dim, rule, |n| {
        let pts = rule.points(c, n);
        let rows: Vec<Vec<f64>> = pts
            .par_iter()
            .map(|&(x, w)| {
                let mut out = vec![0.0; dim];
                f(x, &mut out);
                out.iter_mut().for_each(|v| *v *= w);
                out
            })
            .collect();
        sum_rows(dim, &rows)
    })
}

/// `dim` integrals over `S(q)²` at once; `f(x, y, out)` writes into `out`.
pub fn integrate_many_2d(
    dim: usize,
    f: impl Fn(f64, f64, &mut [f64]) + Sync,
    q: f64,
    rule: &QuadratureRule,
) -> Result<VecEstimate> {
    rule.validate()?;
    let c = half_width(q)?;
    refine(dim, rule, |n| {
        let pts = rule.points(c, n);
        let rows: Vec<Vec<f64>> = pts
            .par_iter()
            .map(|&(x, wx)| {
                let mut acc = vec![0.0; dim];
                let mut out = vec![0.0; dim];
                for &(y, wy) in &pts {
                    out.iter_mut().for_each(|v| *v = 0.0);
                    f(x, y, &mut out);
                    let w = wx * wy;
                    acc.iter_mut().zip(&out).for_each(|(a, v)| *a += w * v);
                }
                acc
            })
            .collect();
        sum_rows(dim, &rows)
    })
}

/// Sequential sum so results do not depend on thread scheduling.
fn sum_rows(dim: usize, rows: &[Vec<f64>]) -> Vec<f64> {
    let mut total = vec![0.0; dim];
    for row in rows {
        total.iter_mut().zip(row).for_each(|(t, v)| *t += v);
    }
    total
}

fn refine(dim: usize, rule: &QuadratureRule, mut level: impl FnMut(usize) -> Vec<f64>) -> Result<VecEstimate> {
    let mut n = rule.nodes;
    let mut prev = level(n);
    let mut last_error = f64::INFINITY;
    loop {
        let next_n = 2 * n;
        if next_n > rule.max_nodes.max(rule.nodes) {
            return Err(Error::Convergence(format!(
                "quadrature did not reach target {} within {} nodes (last error estimate {:e})",
                rule.target, n, last_error
            )));
        }
        let next = level(next_n);
        let error = max_delta(&prev, &next);
        last_error = error;
        let scale = next.iter().fold(1.0f64, |m, v| m.max(v.abs()));
        if !error.is_finite() {
            return Err(Error::Convergence("quadrature produced a non-finite value".into()));
        }
        if error <= rule.target * scale {
            debug_assert_eq!(next.len(), dim);
            return Ok(VecEstimate { values: next, error, nodes: next_n });
        }
        prev = next;
        n = next_n;
    }
}

fn max_delta(a: &[f64], b: &[f64]) -> f64 {
    a.iter().zip(b).fold(0.0, |m, (x, y)| if (x - y).is_nan() { f64::NAN } else { m.max((x - y).abs()) })
}
