use std::collections::BTreeMap;

use serde::{Deserialize, Serialize};

use crate::error::{Error, Result};
use crate::families::SupportInterval;
use crate::quadrature::QuadratureRule;
use crate::scalar::{parse_rational, ExactScalar, Scalar};
use crate::truncation::TruncationPolicy;

/// Parameter grids, policies and per-check tolerance overrides for a suite run.
#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
#[serde(default)]
pub struct SuiteConfig {
    pub qs: Vec<f64>,
    pub rhos: Vec<f64>,
    /// Points per axis of the `(x, y)` grid.
    pub grid_points: usize,
    /// Fraction of the half-width of `S(q)` the grid spans.
    pub grid_fraction: f64,
    /// Rational `(ρ, q)` pairs as `"p/r"` strings.
    pub exact_pairs: Vec<(String, String)>,
    pub exact_max_level: usize,
    /// Largest `i + j` for index-ranging residual checks.
    pub max_index: usize,
    pub ort_qs: Vec<f64>,
    pub ort_max_degree: usize,
    pub pkw_max_degree: usize,
    pub cross_max_level: usize,
    pub gram_max_level: usize,
    pub limit_qs: Vec<f64>,
    pub policy: TruncationPolicy,
    /// Policy for double-double residual paths.
    pub extended_policy: TruncationPolicy,
    pub quadrature: QuadratureRule,
    pub tolerances: BTreeMap<String, f64>,
    /// Record wall-clock time per check; off keeps reports byte-identical.
    pub timing: bool,
}

impl Default for SuiteConfig {
    fn default() -> Self {
        let pair = |a: &str, b: &str| (a.to_string(), b.to_string());
        SuiteConfig {
            qs: vec![-0.5, 0.0, 0.3, 0.5, 0.9],
            rhos: vec![0.0, 0.2, 0.4, 0.6],
            grid_points: 5,
            grid_fraction: 0.95,
            exact_pairs: vec![
                pair("1/3", "1/2"),
                pair("1/4", "2/3"),
                pair("1/5", "3/4"),
                pair("-2/5", "1/3"),
                pair("1/2", "-1/2"),
                pair("3/7", "0"),
            ],
            exact_max_level: 4,
            max_index: 5,
            ort_qs: vec![-0.5, 0.0, 0.3, 0.7],
            ort_max_degree: 8,
            pkw_max_degree: 6,
            cross_max_level: 6,
            gram_max_level: 4,
            limit_qs: vec![0.9, 0.99, 0.999, 1.0 - 1e-6],
            policy: TruncationPolicy::default(),
            extended_policy: TruncationPolicy::extended(),
            quadrature: QuadratureRule::default(),
            tolerances: BTreeMap::new(),
            timing: false,
        }
    }
}

impl SuiteConfig {
    /// Rejects parameters outside the domains the checks assume.
    pub fn validate(&self) -> Result<()> {
        for &q in self.qs.iter().chain(&self.ort_qs) {
            if !(q > -1.0 && q < 1.0) {
                return Err(Error::domain(format!("suite q must lie in (-1, 1), got {q}")));
            }
        }
        for &q in &self.limit_qs {
            if !(q > 0.0 && q < 1.0) {
                return Err(Error::domain(format!("limit probes need q in (0, 1), got {q}")));
            }
        }
        for &rho in &self.rhos {
            if !(rho.abs() < 1.0) {
                return Err(Error::domain(format!("suite rho must satisfy |rho| < 1, got {rho}")));
            }
        }
        if self.qs.is_empty() || self.rhos.is_empty() || self.grid_points == 0 {
            return Err(Error::domain("suite grids must be non-empty"));
        }
        if !(self.grid_fraction > 0.0 && self.grid_fraction < 1.0) {
            return Err(Error::domain(format!("grid fraction must lie in (0, 1), got {}", self.grid_fraction)));
        }
        for (name, &tol) in &self.tolerances {
            if !(tol >= 0.0) {
                return Err(Error::domain(format!("tolerance for {name} must be non-negative")));
            }
        }
        self.exact_pairs()?;
        Ok(())
    }

    pub fn exact_pairs(&self) -> Result<Vec<(ExactScalar, ExactScalar)>> {
        self.exact_pairs
            .iter()
            .map(|(r, q)| {
                let (r, q) = (parse_rational(r)?, parse_rational(q)?);
                if r.abs_val() >= ExactScalar::from_i64(1) {
                    return Err(Error::domain(format!("exact rho must satisfy |rho| < 1, got {r}")));
                }
                crate::qarith::QParam::new_convergent(q.clone())?;
                Ok((r, q))
            })
            .collect()
    }

    /// Uniform `grid_points`-point axis over `grid_fraction` of `S(q)`.
    pub fn axis(&self, q: f64) -> Result<Vec<f64>> {
        let w = self.grid_fraction
            * SupportInterval::new(q)?.half_width().ok_or_else(|| Error::domain("grid needs |q| < 1"))?;
        let n = self.grid_points;
        if n == 1 {
            return Ok(vec![0.0]);
        }
        Ok((0..n).map(|a| w * (2.0 * a as f64 / (n - 1) as f64 - 1.0)).collect())
    }

    /// Every `(x, y, ρ, q)` of the default grid, in `q`, `ρ`, `x`, `y` order.
    pub fn grid(&self) -> Result<Vec<[f64; 4]>> {
        let mut out = Vec::new();
        for &q in &self.qs {
            let axis = self.axis(q)?;
            for &rho in &self.rhos {
                for &x in &axis {
                    for &y in &axis {
                        out.push([x, y, rho, q]);
                    }
                }
            }
        }
        Ok(out)
    }

    /// `(ρ, q)` pairs of the grid.
    pub fn parameter_pairs(&self) -> Vec<(f64, f64)> {
        self.qs.iter().flat_map(|&q| self.rhos.iter().map(move |&rho| (rho, q))).collect()
    }
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn default_grid_shape() {
        let cfg = SuiteConfig::default();
        cfg.validate().unwrap();
        let grid = cfg.grid().unwrap();
        assert_eq!(grid.len(), 5 * 4 * 25);
        let c = 2.0 / 0.1f64.sqrt();
        let corner = grid.iter().filter(|p| p[3] == 0.9).map(|p| p[0].abs()).fold(0.0, f64::max);
        assert!((corner - 0.95 * c).abs() < 1e-12);
        assert!(cfg.exact_pairs().unwrap().len() >= 5);
    }

    #[test]
    fn invalid_configs() {
        let mut cfg = SuiteConfig { rhos: vec![1.0], ..SuiteConfig::default() };
        assert!(cfg.validate().is_err());
        cfg = SuiteConfig { exact_pairs: vec![("3/2".into(), "1/2".into())], ..SuiteConfig::default() };
        assert!(cfg.validate().is_err());
        cfg = SuiteConfig { qs: vec![1.0], ..SuiteConfig::default() };
        assert!(cfg.validate().is_err());
    }

    #[test]
    fn config_json_round_trip() {
        let cfg = SuiteConfig::default();
        let s = serde_json::to_string(&cfg).unwrap();
        let back: SuiteConfig = serde_json::from_str(&s).unwrap();
        assert_eq!(back, cfg);
        let partial: SuiteConfig = serde_json::from_str(r#"{"qs":[0.5]}"#).unwrap();
        assert_eq!(partial.rhos, cfg.rhos);
    }
}
