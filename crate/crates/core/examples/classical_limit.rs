//! Calibration probes as q -> 1: `f_N` approaches the standard normal density
//! and `f_CN(·|y,ρ,q)` the `N(ρy, 1 − ρ²)` density.

use qmehler::kernels::{f_cn, f_n, phi_h};
use qmehler::truncation::TruncationPolicy;

fn normal(x: f64, mean: f64, var: f64) -> f64 {
    (-(x - mean).powi(2) / (2.0 * var)).exp() / (2.0 * std::f64::consts::PI * var).sqrt()
}

fn main() -> qmehler::error::Result<()> {
    let policy = TruncationPolicy::default();
    let xs: Vec<f64> = (0..=40).map(|k| -4.0 + 0.2 * k as f64).collect();
    let (y, rho) = (0.8, 0.6);
    for q in [0.9, 0.99, 0.999, 1.0 - 1e-6] {
        let mut dn = 0.0f64;
        let mut dc = 0.0f64;
        for &x in &xs {
            dn = dn.max((f_n(x, q, &policy)? - normal(x, 0.0, 1.0)).abs());
            dc = dc.max((f_cn(x, y, rho, q, &policy)? - normal(x, rho * y, 1.0 - rho * rho)).abs());
        }
        let gf = phi_h(0.5, 0.3, q, &policy)?.value - (0.3f64 * 0.5 - 0.045).exp();
        println!("q = {q:<10} |f_N - normal| = {dn:.2e}   |f_CN - conditional normal| = {dc:.2e}   phi_H - exp(rho x - rho^2/2) = {gf:+.2e}");
    }
    Ok(())
}
