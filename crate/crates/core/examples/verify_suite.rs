//! Runs a few registered identity checks on a reduced grid and prints the report.
//!
//! `cargo run --release --example verify_suite -- all` runs the whole registry
//! on the default grid.

use qmehler::harness::{check_names, run_suite, SuiteConfig};

fn main() -> qmehler::error::Result<()> {
    let selection = std::env::args().nth(1);
    let cfg = match selection {
        Some(_) => SuiteConfig::default(),
        None => SuiteConfig { qs: vec![0.3, 0.9], rhos: vec![0.6], grid_points: 3, exact_max_level: 2, ..SuiteConfig::default() },
    };
    let selection = selection.unwrap_or_else(|| "PM,uPM,QnaQ,recip,ort".into());
    println!("registered: {}", check_names().join(", "));
    let report = run_suite(&selection, &cfg)?;
    for c in &report.checks {
        let result = match (c.residual, c.exact_pass) {
            (Some(r), _) => format!("{r:.3e} (tol {:.0e})", c.tolerance),
            (_, Some(ok)) => format!("exact {ok}"),
            _ => format!("{:?}", c.error),
        };
        println!("{:12} {:8} {}", c.name, if c.pass { "pass" } else { "FAIL" }, result);
    }
    println!("overall: {}", if report.pass { "pass" } else { "FAIL" });
    Ok(())
}
