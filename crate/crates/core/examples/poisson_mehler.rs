//! The Poisson–Mehler kernel as a bilinear series and as an infinite product,
//! and the densities built from it.

use qmehler::bivariate::gamma;
use qmehler::kernels::{f_2d, f_cn, f_n, phi_h, phi_h_series, poisson_mehler_product, KernelParams};
use qmehler::scalar::{Quad, Scalar};
use qmehler::truncation::TruncationPolicy;

fn main() -> qmehler::error::Result<()> {
    let policy = TruncationPolicy::default();
    let p = KernelParams::new(0.5, -0.3, 0.4, 0.5)?;
    let series = gamma(0, 0, &p, &policy)?;
    let product = poisson_mehler_product(&p, &policy)?;
    println!("gamma_00 series  = {:.16} ({} terms)", series.value, series.terms);
    println!("product form     = {:.16} ({} factors)", product.value, product.terms);

    // Near the corner of S(q)^2 at q = 0.9 the kernel is ~1e9 and f64 loses
    // digits; double-double keeps about 31.
    let q = Quad::from(0.9);
    let c = Quad::from(1.9) / (Quad::from(1.0) - q).sqrt();
    let hard = KernelParams::new(c, c, Quad::from(0.6), q)?;
    let ext = TruncationPolicy::extended();
    let s = gamma(0, 0, &hard, &ext)?.value;
    let r = poisson_mehler_product(&hard, &ext)?.value;
    println!("corner, double-double: series {:.6e}, |series - product| = {:.2e}", s.to_f64(), (s - r).abs_val().to_f64());

    println!("phi_H(0.7|0.3, 0.5): product {:.15}, series {:.15}", phi_h(0.7, 0.3, 0.5, &policy)?.value, phi_h_series(0.7, 0.3, 0.5, &policy)?.value);
    println!("f_N(0.2|0.5) = {:.15}", f_n(0.2, 0.5, &policy)?);
    println!("f_CN(0.2|-0.3, 0.4, 0.5) = {:.15}", f_cn(0.2, -0.3, 0.4, 0.5, &policy)?);
    println!("f_2D(0.2, -0.3|0.4, 0.5) = {:.15}", f_2d(0.2, -0.3, 0.4, 0.5, &policy)?);
    Ok(())
}
