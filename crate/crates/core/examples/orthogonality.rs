//! Orthogonality of q-Hermite polynomials under `f_N` by Gauss–Legendre
//! quadrature on `S(q)`.

use qmehler::families::hermite_q_all;
use qmehler::kernels::f_n;
use qmehler::qarith::q_factorial;
use qmehler::quadrature::{integrate_many_1d, QuadratureRule};
use qmehler::truncation::TruncationPolicy;

fn main() -> qmehler::error::Result<()> {
    let policy = TruncationPolicy::default();
    let rule = QuadratureRule::default();
    for q in [-0.5, 0.0, 0.7] {
        let est = integrate_many_1d(
            16,
            |x, out| {
                let w = f_n(x, q, &policy).expect("inside S(q)");
                let h = hermite_q_all(3, &x, &q);
                for n in 0..4 {
                    for m in 0..4 {
                        out[4 * n + m] = w * h[n] * h[m];
                    }
                }
            },
            q,
            &rule,
        )?;
        println!("q = {q}: {} nodes", est.nodes);
        for n in 0..4 {
            let row: Vec<String> = (0..4).map(|m| format!("{:+.3e}", est.values[4 * n + m])).collect();
            println!("  {}   [{n}]_q! = {:.6}", row.join(" "), q_factorial(n, &q));
        }
    }
    Ok(())
}
