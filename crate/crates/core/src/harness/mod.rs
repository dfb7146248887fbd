//! Registry of named identity checks and the suite runner.
//!
//! Every check reduces to a worst-case residual over its parameter grid or to
//! an exact verdict. Reports list checks in registry order whatever order they
//! finish in, and carry no timing unless asked, so equal configs give
//! byte-identical JSON.

mod checks;
mod config;

use std::time::Instant;

use rayon::prelude::*;
use serde::{Deserialize, Serialize};
use serde_json::Value;

pub use config::SuiteConfig;

use crate::error::{Error, Result};
use checks::Outcome;

#[derive(Debug, Clone, Copy, PartialEq, Eq, Serialize, Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Mode {
    Exact,
    Residual,
}

/// A registered check with its default tolerance.
#[derive(Clone, Copy)]
pub struct IdentityCheck {
    pub name: &'static str,
    pub mode: Mode,
    pub tolerance: f64,
    pub description: &'static str,
    run: fn(&SuiteConfig) -> Result<Outcome>,
}

impl std::fmt::Debug for IdentityCheck {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        f.debug_struct("IdentityCheck").field("name", &self.name).field("mode", &self.mode).finish()
    }
}

const RESIDUAL: f64 = 1e-7;
const QUADRATURE: f64 = 1e-6;
const LIMIT: f64 = 1e-3;

macro_rules! check {
    ($name:expr, $mode:ident, $tol:expr, $run:path, $desc:expr) => {
        IdentityCheck { name: $name, mode: Mode::$mode, tolerance: $tol, description: $desc, run: $run }
    };
}

/// All identity checks, in report order.
pub static REGISTRY: [IdentityCheck; 16] = [
    check!("PM", Residual, 1e-8, checks::pm, "gamma_00 series against the Poisson-Mehler product"),
    check!("uPM", Residual, RESIDUAL, checks::upm, "gamma_ij = Q_ij gamma_00 for i + j <= max_index"),
    check!("lemma-basic", Residual, 1e-9, checks::lemma_basic, "eta_n = H_n(x|t,q) phi_H(x|t,q) for n <= 5"),
    check!("fch-i-cross", Residual, QUADRATURE, checks::fch_i_cross, "Q_ij orthogonal across levels under f_2D"),
    check!("fch-i-gram", Residual, QUADRATURE, checks::fch_i_gram, "within-level quadrature Gram against the closed form"),
    check!("fch-ii", Residual, RESIDUAL, checks::fch_ii, "double generating function of Q_nm"),
    check!("QnaQ", Exact, 0.0, checks::qnaq, "Q_ij at rho q^m through Q at rho"),
    check!("il", Exact, 0.0, checks::il, "omega product expanded in Q_kk"),
    check!("qkk", Exact, 0.0, checks::qkk, "Q_nn expanded in omega products"),
    check!("main-i", Residual, RESIDUAL, checks::main_i, "H_i H_j / kernel as a Q-series, i = j <= 2"),
    check!("recip", Residual, RESIDUAL, checks::recip, "reciprocal Q_kk series times gamma_00 equals 1"),
    check!("lnsk", Residual, RESIDUAL, checks::lnsk, "H_i H_j recovered from a gamma-series, i + j <= 2"),
    check!("pomoc", Exact, 0.0, checks::pomoc, "shifted-rho identity for gamma as formal power series"),
    check!("ort", Residual, RESIDUAL, checks::ort, "q-Hermite orthogonality under f_N"),
    check!("pkw", Residual, RESIDUAL, checks::pkw, "Al-Salam-Chihara orthogonality under f_CN"),
    check!("zb1-limit", Residual, LIMIT, checks::zb1_limit, "f_N and f_CN approach their Gaussian limits as q -> 1"),
];

/// Names of every registered check.
pub fn check_names() -> Vec<&'static str> {
    REGISTRY.iter().map(|c| c.name).collect()
}

pub fn find_check(name: &str) -> Result<&'static IdentityCheck> {
    REGISTRY.iter().find(|c| c.name == name).ok_or_else(|| Error::UnknownCheck(name.to_string()))
}

/// Resolves a comma-separated selection, or `all`, against the registry.
pub fn parse_selection(selection: &str) -> Result<Vec<&'static IdentityCheck>> {
    let names: Vec<&str> = selection.split(',').map(str::trim).filter(|s| !s.is_empty()).collect();
    if names.is_empty() {
        return Err(Error::UnknownCheck(selection.to_string()));
    }
    if names == ["all"] {
        return Ok(REGISTRY.iter().collect());
    }
    names.into_iter().map(find_check).collect()
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckError {
    pub kind: String,
    pub message: String,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct CheckRecord {
    pub name: String,
    pub mode: Mode,
    pub params: Value,
    pub residual: Option<f64>,
    pub exact_pass: Option<bool>,
    pub tolerance: f64,
    pub pass: bool,
    pub runtime_ms: u64,
    #[serde(default, skip_serializing_if = "Option::is_none")]
    pub error: Option<CheckError>,
}

#[derive(Debug, Clone, PartialEq, Serialize, Deserialize)]
pub struct Report {
    pub suite: String,
    pub config: SuiteConfig,
    pub checks: Vec<CheckRecord>,
    pub pass: bool,
}

impl Report {
    pub fn to_json(&self) -> String {
        serde_json::to_string_pretty(self).expect("report serializes")
    }

    pub fn failed(&self) -> impl Iterator<Item = &CheckRecord> {
        self.checks.iter().filter(|c| !c.pass)
    }
}

fn run_one(check: &IdentityCheck, cfg: &SuiteConfig) -> CheckRecord {
    let tolerance = cfg.tolerances.get(check.name).copied().unwrap_or(check.tolerance);
    let start = Instant::now();
    let outcome = (check.run)(cfg);
    let runtime_ms = if cfg.timing { start.elapsed().as_millis() as u64 } else { 0 };
    let mut record = CheckRecord {
        name: check.name.to_string(),
        mode: check.mode,
        params: Value::Null,
        residual: None,
        exact_pass: None,
        tolerance,
        pass: false,
        runtime_ms,
        error: None,
    };
    match outcome {
        Ok(Outcome::Residual(r, params)) => {
            record.residual = Some(r).filter(|r| r.is_finite());
            record.pass = r < tolerance || (tolerance == 0.0 && r == 0.0);
            record.params = params;
        }
        Ok(Outcome::Exact(ok, params)) => {
            record.exact_pass = Some(ok);
            record.pass = ok;
            record.params = params;
        }
        Err(e) => record.error = Some(CheckError { kind: e.kind().to_string(), message: e.to_string() }),
    }
    record
}

/// Runs the named checks (comma-separated, or `all`) under `cfg`.
///
/// Unknown names and invalid configs fail the whole call; errors inside a
/// check are recorded on that check and fail only it.
pub fn run_suite(selection: &str, cfg: &SuiteConfig) -> Result<Report> {
    let selected = parse_selection(selection)?;
    cfg.validate()?;
    let checks: Vec<CheckRecord> = selected.par_iter().map(|c| run_one(c, cfg)).collect();
    let pass = checks.iter().all(|c| c.pass);
    Ok(Report { suite: selection.to_string(), config: cfg.clone(), checks, pass })
}
