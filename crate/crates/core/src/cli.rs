//! Command-line front end: `eval`, `verify`, `gram` and `export-qtable`.
//!
//! Exit status is 0 on success, 1 when a check fails or a computation does
//! not converge, and 2 for usage and validation errors. Errors are written to
//! stdout as `{"error": {"kind": …, "message": …}}`.

use std::ffi::OsString;
use std::fmt::Write as _;
use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};
use serde_json::{json, Map, Value};

use crate::bivariate::{gamma, gram_matrix, gram_schmidt_basis, orthonormality_defect, reciprocal_series, QEvaluator, QPolyTable};
use crate::error::{Error, Result};
use crate::families::{asc, asc_p, big_hermite_q, hermite_cq, hermite_q, SupportInterval};
use crate::harness::{run_suite, SuiteConfig};
use crate::kernels::{eta_n, f_2d, f_bn, f_cn, f_n, omega_poly, phi_h, phi_p, KernelParams};
use crate::qarith::QParam;
use crate::scalar::{format_rational, parse_rational, ExactScalar, Quad, Scalar};
use crate::truncation::TruncationPolicy;

/// Exit status for a failed check or computation.
pub const EXIT_FAILURE: i32 = 1;
/// Exit status for usage and validation errors.
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, Parser)]
#[command(name = "qmehler", version, about = "q-Hermite kernels, Q_{i,j} polynomials and identity checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a family, density or kernel at a point or over a grid.
    Eval(EvalArgs),
    /// Run identity checks and print a JSON report.
    Verify(VerifyArgs),
    /// Gram matrix of level n and, optionally, an orthonormal basis.
    Gram(GramArgs),
    /// Export exact Q_{i,j} coefficients as JSON.
    ExportQtable(ExportArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Target {
    #[value(name = "H")]
    H,
    #[value(name = "h")]
    ContinuousH,
    #[value(name = "bqH")]
    BigH,
    #[value(name = "ASC")]
    Asc,
    #[value(name = "P")]
    P,
    #[value(name = "phiH")]
    PhiH,
    #[value(name = "phiP")]
    PhiP,
    #[value(name = "eta")]
    Eta,
    #[value(name = "fN")]
    FN,
    #[value(name = "fbN")]
    FbN,
    #[value(name = "fCN")]
    FCN,
    #[value(name = "f2D")]
    F2D,
    #[value(name = "gamma")]
    Gamma,
    #[value(name = "Q")]
    Q,
    #[value(name = "omega")]
    Omega,
    #[value(name = "recip-series")]
    RecipSeries,
}

/// Parameter flags shared by the subcommands. Values are kept as strings so
/// `--exact` can read them as rationals.
#[derive(Debug, Clone, Default, Args)]
pub struct ParamArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub rho: Option<String>,
    #[arg(long)]
    pub n: Option<usize>,
    #[arg(long)]
    pub m: Option<usize>,
    #[arg(long)]
    pub i: Option<usize>,
    #[arg(long)]
    pub j: Option<usize>,
    #[arg(long, allow_hyphen_values = true)]
    pub x: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub y: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub t: Option<String>,
    #[arg(long, allow_hyphen_values = true)]
    pub s: Option<String>,
    /// Big q-Hermite / Al-Salam–Chihara parameter.
    #[arg(long, allow_hyphen_values = true)]
    pub a: Option<String>,
    /// Second Al-Salam–Chihara parameter.
    #[arg(long, allow_hyphen_values = true)]
    pub b: Option<String>,
    #[arg(long)]
    pub trunc_tol: Option<f64>,
    #[arg(long)]
    pub max_terms: Option<usize>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long, value_enum)]
    pub target: Target,
    #[command(flatten)]
    pub params: ParamArgs,
    /// `x0:x1:count[,y0:y1:count]`.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Keep grid endpoints on the boundary of S(q) instead of clipping them to 99.9%.
    #[arg(long)]
    pub allow_endpoints: bool,
    /// Read parameters as exact rationals and print exact values.
    #[arg(long)]
    pub exact: bool,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Comma-separated check names, or `all`.
    #[arg(long, default_value = "all")]
    pub suite: String,
    /// Comma-separated q values replacing the default grid.
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
    /// Comma-separated ρ values replacing the default grid.
    #[arg(long, allow_hyphen_values = true)]
    pub rho: Option<String>,
    /// JSON file with a full suite configuration.
    #[arg(long)]
    pub config: Option<PathBuf>,
    #[arg(long)]
    pub trunc_tol: Option<f64>,
    #[arg(long)]
    pub max_terms: Option<usize>,
    /// Record per-check wall-clock time (reports are then not reproducible).
    #[arg(long)]
    pub timing: bool,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct GramArgs {
    #[arg(long)]
    pub n: usize,
    #[arg(long, allow_hyphen_values = true)]
    pub rho: String,
    #[arg(long, allow_hyphen_values = true)]
    pub q: String,
    /// Also print the Gram–Schmidt coefficients and ‖BGBᵀ − I‖.
    #[arg(long)]
    pub basis: bool,
    /// Print the Gram matrix as exact rationals.
    #[arg(long)]
    pub exact: bool,
    #[arg(long, value_enum, default_value = "json")]
    pub format: Format,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct ExportArgs {
    #[arg(long, allow_hyphen_values = true)]
    pub rho: String,
    #[arg(long, allow_hyphen_values = true)]
    pub q: String,
    /// Largest total degree i + j.
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

/// Output of a command and the exit status it implies.
#[derive(Debug, Clone, PartialEq)]
pub struct Outcome {
    pub text: String,
    pub status: i32,
}

fn exit_status(e: &Error) -> i32 {
    match e {
        Error::Numerical(_) | Error::Convergence(_) => EXIT_FAILURE,
        _ => EXIT_USAGE,
    }
}

pub fn error_payload(e: &Error) -> String {
    json!({ "error": { "kind": e.kind(), "message": e.to_string() } }).to_string()
}

/// Parses arguments, runs the command, writes its output, and returns the exit status.
pub fn main_with_args<I, T>(args: I) -> i32
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    let cli = match Cli::try_parse_from(args) {
        Ok(cli) => cli,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { EXIT_USAGE } else { 0 };
        }
    };
    if let Err(e) = configure_threads() {
        println!("{}", error_payload(&e));
        return EXIT_USAGE;
    }
    let out = match &cli.command {
        Command::Eval(a) => a.out.clone(),
        Command::Verify(a) => a.out.clone(),
        Command::Gram(a) => a.out.clone(),
        Command::ExportQtable(a) => a.out.clone(),
    };
    match execute(&cli.command) {
        Ok(outcome) => {
            match out {
                Some(path) => {
                    if let Err(e) = std::fs::write(&path, &outcome.text) {
                        let err = Error::Parse(format!("cannot write {}: {e}", path.display()));
                        println!("{}", error_payload(&err));
                        return EXIT_USAGE;
                    }
                }
                None => print!("{}", outcome.text),
            }
            outcome.status
        }
        Err(e) => {
            println!("{}", error_payload(&e));
            exit_status(&e)
        }
    }
}

/// Caps the global rayon pool from `QMEHLER_THREADS`.
fn configure_threads() -> Result<()> {
    let Ok(raw) = std::env::var("QMEHLER_THREADS") else {
        return Ok(());
    };
    let n: usize = raw.trim().parse().map_err(|_| Error::Parse(format!("QMEHLER_THREADS must be a positive integer, got {raw:?}")))?;
    if n == 0 {
        return Err(Error::Parse("QMEHLER_THREADS must be at least 1".into()));
    }
    // A pool built earlier in the same process keeps its size.
    let _ = rayon::ThreadPoolBuilder::new().num_threads(n).build_global();
    Ok(())
}

/// Runs a parsed command without touching stdout or files.
pub fn execute(command: &Command) -> Result<Outcome> {
    match command {
        Command::Eval(a) => cmd_eval(a),
        Command::Verify(a) => cmd_verify(a),
        Command::Gram(a) => cmd_gram(a),
        Command::ExportQtable(a) => cmd_export(a),
    }
}

fn policy(tol: Option<f64>, max_terms: Option<usize>) -> Result<TruncationPolicy> {
    let d = TruncationPolicy::default();
    TruncationPolicy::new(tol.unwrap_or(d.tol), max_terms.unwrap_or(d.max_terms))
}

/// Reads a float flag; `p/r` is accepted and rounded once.
pub fn parse_float(s: &str) -> Result<f64> {
    let s = s.trim();
    if s.contains('/') {
        return Ok(parse_rational(s)?.to_f64());
    }
    s.parse::<f64>().map_err(|_| Error::Parse(format!("not a number: {s:?}")))
}

fn parse_list(s: &str) -> Result<Vec<f64>> {
    s.split(',').map(parse_float).collect()
}

// ---------------------------------------------------------------- eval

/// Values the evaluators can be instantiated at.
trait CliScalar: Scalar {
    fn parse(s: &str) -> Result<Self>;
    fn render(&self) -> Value;
    fn csv(&self) -> String;
}

impl CliScalar for f64 {
    fn parse(s: &str) -> Result<Self> {
        parse_float(s)
    }
    fn render(&self) -> Value {
        serde_json::Number::from_f64(*self).map(Value::Number).unwrap_or(Value::Null)
    }
    fn csv(&self) -> String {
        format!("{self:.16e}")
    }
}

impl CliScalar for ExactScalar {
    fn parse(s: &str) -> Result<Self> {
        parse_rational(s)
    }
    fn render(&self) -> Value {
        Value::String(format_rational(self))
    }
    fn csv(&self) -> String {
        format_rational(self)
    }
}

/// Columns read by each target, in output order; `x` and `y` may come from the grid.
fn columns(target: Target) -> &'static [&'static str] {
    use Target::*;
    match target {
        H | ContinuousH => &["n", "q", "x"],
        BigH => &["n", "a", "q", "x"],
        Asc => &["n", "a", "b", "q", "x"],
        P => &["n", "rho", "q", "x", "y"],
        PhiH => &["t", "q", "x"],
        PhiP => &["rho", "t", "q", "x", "y"],
        Eta => &["n", "t", "q", "x"],
        FN => &["q", "x"],
        FbN => &["a", "q", "x"],
        FCN | F2D => &["rho", "q", "x", "y"],
        Gamma | Q => &["i", "j", "rho", "q", "x", "y"],
        Omega => &["rho", "x", "y"],
        RecipSeries => &["n", "rho", "q", "x", "y"],
    }
}

fn is_polynomial(target: Target) -> bool {
    matches!(target, Target::H | Target::ContinuousH | Target::BigH | Target::Asc | Target::P | Target::Q | Target::Omega)
}

/// One evaluation point: integer indices and scalar parameters by name.
#[derive(Debug, Clone)]
struct Point<T> {
    ints: Vec<(&'static str, usize)>,
    vals: Vec<(&'static str, T)>,
}

impl<T: Clone> Point<T> {
    fn val(&self, name: &str) -> T {
        self.vals.iter().find(|(k, _)| *k == name).map(|(_, v)| v.clone()).expect("column present")
    }
    fn int(&self, name: &str) -> usize {
        self.ints.iter().find(|(k, _)| *k == name).map(|(_, v)| *v).expect("column present")
    }
}

fn required<'a>(name: &str, v: &'a Option<String>) -> Result<&'a str> {
    v.as_deref().ok_or_else(|| Error::Parse(format!("--{name} is required for this target")))
}

fn index(p: &ParamArgs, name: &'static str) -> Result<usize> {
    let v = match name {
        "n" => p.n,
        "i" => p.i.or(p.n),
        "j" => p.j.or(p.m),
        _ => None,
    };
    v.ok_or_else(|| Error::Parse(format!("--{name} is required for this target")))
}

fn string_param<'a>(p: &'a ParamArgs, name: &str) -> &'a Option<String> {
    match name {
        "q" => &p.q,
        "rho" => &p.rho,
        "x" => &p.x,
        "y" => &p.y,
        "t" => &p.t,
        "s" => &p.s,
        "a" => &p.a,
        _ => &p.b,
    }
}

fn linspace<T: CliScalar>(spec: &str) -> Result<Vec<T>> {
    let parts: Vec<&str> = spec.split(':').collect();
    let bad = || Error::Parse(format!("grid axis must be x0:x1:count, got {spec:?}"));
    if parts.len() != 3 {
        return Err(bad());
    }
    let (a, b) = (T::parse(parts[0])?, T::parse(parts[1])?);
    let count: usize = parts[2].trim().parse().map_err(|_| bad())?;
    if count == 0 {
        return Err(bad());
    }
    if count == 1 {
        return Ok(vec![a]);
    }
    let steps = T::from_i64(count as i64 - 1);
    Ok((0..count).map(|k| a.clone() + (b.clone() - a.clone()) * T::from_i64(k as i64) / steps.clone()).collect())
}

fn clip(v: f64, q: f64) -> Result<f64> {
    match SupportInterval::new(q)?.half_width() {
        Some(c) => Ok(v.clamp(-0.999 * c, 0.999 * c)),
        None => Ok(v),
    }
}

fn build_points<T: CliScalar>(a: &EvalArgs) -> Result<Vec<Point<T>>> {
    let cols = columns(a.target);
    let p = &a.params;
    let mut ints = Vec::new();
    let mut fixed: Vec<(&'static str, T)> = Vec::new();
    for &c in cols {
        match c {
            "n" | "i" | "j" => ints.push((c, index(p, c)?)),
            "x" | "y" => {}
            _ => fixed.push((c, T::parse(required(c, string_param(p, c))?)?)),
        }
    }
    let needs_y = cols.contains(&"y");
    let (xs, ys): (Vec<T>, Vec<T>) = match &a.grid {
        Some(spec) => {
            let (xspec, yspec) = match spec.split_once(',') {
                Some((x, y)) => (x, Some(y)),
                None => (spec.as_str(), None),
            };
            let xs = linspace::<T>(xspec)?;
            let ys = match (yspec, needs_y) {
                (Some(y), true) => linspace::<T>(y)?,
                (None, true) => vec![T::parse(required("y", &p.y)?)?],
                (Some(_), false) => return Err(Error::Parse("this target takes no y axis".into())),
                (None, false) => vec![T::zero()],
            };
            (xs, ys)
        }
        None => {
            let x = T::parse(required("x", &p.x)?)?;
            let y = if needs_y { T::parse(required("y", &p.y)?)? } else { T::zero() };
            (vec![x], vec![y])
        }
    };
    let mut out = Vec::with_capacity(xs.len() * ys.len());
    for x in &xs {
        for y in &ys {
            let mut vals = fixed.clone();
            vals.push(("x", x.clone()));
            if needs_y {
                vals.push(("y", y.clone()));
            }
            out.push(Point { ints: ints.clone(), vals });
        }
    }
    Ok(out)
}

fn clip_points(points: &mut [Point<f64>], target: Target) -> Result<()> {
    if !columns(target).contains(&"q") {
        return Ok(());
    }
    for pt in points {
        let q = pt.val("q");
        for (name, v) in pt.vals.iter_mut() {
            if *name == "x" || *name == "y" {
                *v = clip(*v, q)?;
            }
        }
    }
    Ok(())
}

fn eval_polynomial<T: CliScalar>(target: Target, pt: &Point<T>) -> Result<T> {
    if columns(target).contains(&"q") {
        QParam::new(pt.val("q"))?;
    }
    let x = pt.val("x");
    Ok(match target {
        Target::H => hermite_q(pt.int("n"), &x, &pt.val("q")),
        Target::ContinuousH => hermite_cq(pt.int("n"), &x, &pt.val("q")),
        Target::BigH => big_hermite_q(pt.int("n"), &x, &pt.val("a"), &pt.val("q")),
        Target::Asc => asc(pt.int("n"), &x, &pt.val("a"), &pt.val("b"), &pt.val("q"))?,
        Target::P => asc_p(pt.int("n"), &x, &pt.val("y"), &pt.val("rho"), &pt.val("q"))?,
        Target::Q => QEvaluator::new(x, pt.val("y"), pt.val("rho"), pt.val("q"))?.value(pt.int("i"), pt.int("j"))?,
        Target::Omega => omega_poly(&x, &pt.val("y"), &pt.val("rho")),
        _ => return Err(Error::Parse("exact mode supports only H, h, bqH, ASC, P, Q and omega".into())),
    })
}

fn eval_float(target: Target, pt: &Point<f64>, policy: &TruncationPolicy) -> Result<f64> {
    if is_polynomial(target) {
        return eval_polynomial(target, pt);
    }
    let x = pt.val("x");
    let q = pt.val("q");
    Ok(match target {
        Target::PhiH => phi_h(x, pt.val("t"), q, policy)?.value,
        Target::PhiP => phi_p(x, pt.val("y"), pt.val("rho"), pt.val("t"), q, policy)?.value,
        Target::Eta => eta_n(pt.int("n"), x, pt.val("t"), q, policy)?.value,
        Target::FN => f_n(x, q, policy)?,
        Target::FbN => f_bn(x, pt.val("a"), q, policy)?,
        Target::FCN => f_cn(x, pt.val("y"), pt.val("rho"), q, policy)?,
        Target::F2D => f_2d(x, pt.val("y"), pt.val("rho"), q, policy)?,
        Target::Gamma => {
            let kp = KernelParams::new(x, pt.val("y"), pt.val("rho"), q)?;
            gamma(pt.int("i"), pt.int("j"), &kp, policy)?.value
        }
        Target::RecipSeries => reciprocal_series(x, pt.val("y"), pt.val("rho"), q, pt.int("n"))?,
        _ => unreachable!("polynomial targets handled above"),
    })
}

fn render_records<T: CliScalar>(target: Target, points: &[Point<T>], values: &[T], format: Format) -> String {
    let cols = columns(target);
    match format {
        Format::Csv => {
            let mut s = cols.join(",");
            s.push_str(",value\n");
            for (pt, v) in points.iter().zip(values) {
                for &c in cols {
                    match pt.ints.iter().find(|(k, _)| *k == c) {
                        Some((_, n)) => write!(s, "{n},").expect("string write"),
                        None => write!(s, "{},", pt.val(c).csv()).expect("string write"),
                    }
                }
                writeln!(s, "{}", v.csv()).expect("string write");
            }
            s
        }
        Format::Json => {
            let records: Vec<Value> = points
                .iter()
                .zip(values)
                .map(|(pt, v)| {
                    let mut m = Map::new();
                    for &c in cols {
                        let val = match pt.ints.iter().find(|(k, _)| *k == c) {
                            Some((_, n)) => json!(n),
                            None => pt.val(c).render(),
                        };
                        m.insert(c.to_string(), val);
                    }
                    m.insert("value".into(), v.render());
                    Value::Object(m)
                })
                .collect();
            let name = target.to_possible_value().expect("named").get_name().to_string();
            let mut s = serde_json::to_string_pretty(&json!({ "target": name, "records": records })).expect("json");
            s.push('\n');
            s
        }
    }
}

fn cmd_eval(a: &EvalArgs) -> Result<Outcome> {
    let text = if a.exact {
        if !is_polynomial(a.target) {
            return Err(Error::Parse("exact mode supports only H, h, bqH, ASC, P, Q and omega".into()));
        }
        let points = build_points::<ExactScalar>(a)?;
        let values = points.iter().map(|pt| eval_polynomial(a.target, pt)).collect::<Result<Vec<_>>>()?;
        render_records(a.target, &points, &values, a.format)
    } else {
        let policy = policy(a.params.trunc_tol, a.params.max_terms)?;
        let mut points = build_points::<f64>(a)?;
        if a.grid.is_some() && !a.allow_endpoints {
            clip_points(&mut points, a.target)?;
        }
        use rayon::prelude::*;
        let values = points.par_iter().map(|pt| eval_float(a.target, pt, &policy)).collect::<Result<Vec<_>>>()?;
        render_records(a.target, &points, &values, a.format)
    };
    Ok(Outcome { text, status: 0 })
}

// ---------------------------------------------------------------- verify

fn cmd_verify(a: &VerifyArgs) -> Result<Outcome> {
    let mut cfg = match &a.config {
        Some(path) => {
            let raw = std::fs::read_to_string(path).map_err(|e| Error::Parse(format!("cannot read {}: {e}", path.display())))?;
            serde_json::from_str(&raw).map_err(|e| Error::Parse(format!("bad suite config: {e}")))?
        }
        None => SuiteConfig::default(),
    };
    if let Some(q) = &a.q {
        cfg.qs = parse_list(q)?;
        cfg.ort_qs = cfg.qs.clone();
    }
    if let Some(rho) = &a.rho {
        cfg.rhos = parse_list(rho)?;
    }
    if a.trunc_tol.is_some() || a.max_terms.is_some() {
        cfg.policy = TruncationPolicy::new(a.trunc_tol.unwrap_or(cfg.policy.tol), a.max_terms.unwrap_or(cfg.policy.max_terms))?;
        cfg.extended_policy.max_terms = cfg.policy.max_terms;
    }
    cfg.timing = a.timing;
    let report = run_suite(&a.suite, &cfg)?;
    let status = if report.pass { 0 } else { EXIT_FAILURE };
    let mut text = report.to_json();
    text.push('\n');
    Ok(Outcome { text, status })
}

// ---------------------------------------------------------------- gram

fn matrix_csv(label: &str, rows: &[Vec<String>], s: &mut String) {
    for (r, row) in rows.iter().enumerate() {
        writeln!(s, "{label},{r},{}", row.join(",")).expect("string write");
    }
}

fn cmd_gram(a: &GramArgs) -> Result<Outcome> {
    let exact_rho = parse_rational(&a.rho)?;
    let exact_q = parse_rational(&a.q)?;
    let (rho, q) = (parse_float(&a.rho)?, parse_float(&a.q)?);
    // Entries and basis are formed in double-double and rounded once.
    let gq = gram_matrix(a.n, &Quad::from(rho), &Quad::from(q))?;
    let entries: Vec<Vec<String>>;
    let mut obj = Map::new();
    obj.insert("n".into(), json!(a.n));
    if a.exact {
        let g = gram_matrix(a.n, &exact_rho, &exact_q)?;
        entries = g.entries.iter().map(|r| r.iter().map(format_rational).collect()).collect();
        obj.insert("rho".into(), json!(format_rational(&exact_rho)));
        obj.insert("q".into(), json!(format_rational(&exact_q)));
        obj.insert("gram".into(), json!(entries));
    } else {
        let g = gq.map(|v| v.to_f64());
        entries = g.entries.iter().map(|r| r.iter().map(|v| format!("{v:.16e}")).collect()).collect();
        obj.insert("rho".into(), json!(rho));
        obj.insert("q".into(), json!(q));
        obj.insert("gram".into(), json!(g.entries));
    }
    let mut basis_rows = None;
    if a.basis {
        let b = gram_schmidt_basis(&gq)?;
        let defect = orthonormality_defect(&b, &gq);
        let bf: Vec<Vec<f64>> = b.iter().map(|r| r.iter().map(|v| v.to_f64()).collect()).collect();
        basis_rows = Some((bf.iter().map(|r| r.iter().map(|v| format!("{v:.16e}")).collect::<Vec<_>>()).collect::<Vec<_>>(), defect));
        obj.insert("basis".into(), json!(bf));
        obj.insert("defect".into(), json!(defect));
    }
    let text = match a.format {
        Format::Json => {
            let mut s = serde_json::to_string_pretty(&Value::Object(obj)).expect("json");
            s.push('\n');
            s
        }
        Format::Csv => {
            let mut s = String::from("matrix,row");
            for k in 0..=a.n {
                write!(s, ",c{k}").expect("string write");
            }
            s.push('\n');
            matrix_csv("G", &entries, &mut s);
            if let Some((rows, defect)) = basis_rows {
                matrix_csv("B", &rows, &mut s);
                writeln!(s, "defect,0,{defect:.16e}").expect("string write");
            }
            s
        }
    };
    Ok(Outcome { text, status: 0 })
}

// ---------------------------------------------------------------- export-qtable

fn cmd_export(a: &ExportArgs) -> Result<Outcome> {
    let rho = parse_rational(&a.rho)?;
    let q = parse_rational(&a.q)?;
    let table = QPolyTable::build(rho, q, a.n)?;
    let mut text = serde_json::to_string_pretty(&table).expect("json");
    text.push('\n');
    Ok(Outcome { text, status: 0 })
}

#[cfg(test)]
mod tests {
    use super::*;

    fn run(args: &[&str]) -> Result<Outcome> {
        let cli = Cli::try_parse_from(std::iter::once("qmehler").chain(args.iter().copied())).expect("parses");
        execute(&cli.command)
    }

    fn value(out: &Outcome) -> Value {
        serde_json::from_str::<Value>(&out.text).unwrap()["records"][0]["value"].clone()
    }

    #[test]
    fn eval_examples() {
        let out = run(&["eval", "--target", "H", "--n", "2", "--q", "0.5", "--x", "1"]).unwrap();
        assert_eq!(value(&out), json!(0.0));
        let out = run(&["eval", "--target", "omega", "--rho", "0", "--x", "0.3", "--y", "0.7"]).unwrap();
        assert_eq!(value(&out), json!(1.0));
        let args = ["eval", "--target", "Q", "--i", "1", "--j", "0", "--rho", "0.5", "--q", "0.5", "--x", "1", "--y", "0"];
        let v = value(&run(&args).unwrap()).as_f64().unwrap();
        assert!((v - 4.0 / 3.0).abs() < 1e-15);
        let mut exact = args.to_vec();
        exact.push("--exact");
        assert_eq!(value(&run(&exact).unwrap()), json!("4/3"));
    }

    #[test]
    fn eval_csv_grid_clips_endpoints() {
        let out = run(&["eval", "--target", "fN", "--q", "0", "--grid", "-2:2:5", "--format", "csv"]).unwrap();
        let lines: Vec<&str> = out.text.lines().collect();
        assert_eq!(lines[0], "q,x,value");
        assert_eq!(lines.len(), 6);
        let first: Vec<f64> = lines[1].split(',').map(|v| v.parse().unwrap()).collect();
        assert_eq!(first[1], -1.998);
        assert!(first[2] > 0.0);
        let raw = run(&["eval", "--target", "fN", "--q", "0", "--grid", "-2:2:5", "--format", "csv", "--allow-endpoints"]).unwrap();
        assert!(raw.text.lines().nth(1).unwrap().ends_with(",0.0000000000000000e0"));
    }

    #[test]
    fn eval_validation() {
        let e = run(&["eval", "--target", "H", "--q", "0.5", "--x", "1"]).unwrap_err();
        assert_eq!(exit_status(&e), EXIT_USAGE);
        let e = run(&["eval", "--target", "gamma", "--i", "0", "--j", "0", "--rho", "1.5", "--q", "0.5", "--x", "0", "--y", "0"]).unwrap_err();
        assert_eq!(e.kind(), "DomainError");
        assert!(run(&["eval", "--target", "fN", "--q", "1/2", "--x", "0", "--exact"]).is_err());
        assert!(run(&["eval", "--target", "H", "--n", "2", "--q", "2", "--x", "1"]).is_err());
    }

    #[test]
    fn gram_examples() {
        let g: Value = serde_json::from_str(&run(&["gram", "--n", "0", "--rho", "0.4", "--q", "0.5"]).unwrap().text).unwrap();
        assert_eq!(g["gram"], json!([[1.0]]));
        let g: Value = serde_json::from_str(&run(&["gram", "--n", "1", "--rho", "0", "--q", "0.5"]).unwrap().text).unwrap();
        assert_eq!(g["gram"], json!([[1.0, 0.0], [0.0, 1.0]]));
        let g: Value = serde_json::from_str(&run(&["gram", "--n", "2", "--rho", "0.4", "--q", "0.5", "--basis"]).unwrap().text).unwrap();
        assert!(g["defect"].as_f64().unwrap() < 1e-10);
        let g: Value = serde_json::from_str(&run(&["gram", "--n", "1", "--rho", "1/3", "--q", "1/2", "--exact"]).unwrap().text).unwrap();
        assert_eq!(g["gram"][1][1], json!("9/8"));
    }

    #[test]
    fn verify_subset_and_unknown() {
        let out = run(&["verify", "--suite", "PM,recip", "--q", "0.5", "--rho", "0.3"]).unwrap();
        assert_eq!(out.status, 0);
        let report: Value = serde_json::from_str(&out.text).unwrap();
        assert_eq!(report["checks"].as_array().unwrap().len(), 2);
        let e = run(&["verify", "--suite", "bogus"]).unwrap_err();
        assert_eq!(e.kind(), "UnknownCheckError");
        assert_eq!(exit_status(&e), EXIT_USAGE);
    }

    #[test]
    fn export_table() {
        let out = run(&["export-qtable", "--rho", "1/2", "--q", "1/2", "--n", "2"]).unwrap();
        let v: Value = serde_json::from_str(&out.text).unwrap();
        assert_eq!(v["entries"].as_array().unwrap().len(), 6);
    }
}
