//! q-numbers, Gaussian binomials and q-Pochhammer symbols, exact and floating.

use qmehler::qarith::{q_binomial, q_factorial, q_number, q_pochhammer, q_pochhammer_inf};
use qmehler::scalar::{format_rational, ratio};
use qmehler::truncation::TruncationPolicy;

fn main() -> qmehler::error::Result<()> {
    let q = ratio(1, 2);
    println!("exact, q = 1/2");
    for n in 0..=5 {
        println!(
            "  [{n}]_q = {:>8}   [{n}]_q! = {:>12}   [5 {n}]_q = {}",
            format_rational(&q_number(n, &q)),
            format_rational(&q_factorial(n, &q)),
            format_rational(&q_binomial(5, n as i64, &q)),
        );
    }
    println!("  (1/3; 1/2)_4 = {}", format_rational(&q_pochhammer(&ratio(1, 3), &q, 4)));

    // At q = 1 the Gaussian binomial is the ordinary one.
    println!("  [6 3]_1 = {}", format_rational(&q_binomial(6, 3, &ratio(1, 1))));

    println!("infinite products, tol 1e-16");
    let policy = TruncationPolicy::default();
    for q in [0.5, 0.9, 0.99] {
        let p = q_pochhammer_inf(q, q, &policy)?;
        println!("  (q; q)_inf at q = {q:<5} = {:.12e}  ({:?}, {} factors)", p.value, p.method, p.terms);
    }
    // (1-q; q)_inf tends to 1/e; near q = 1 the log-sum is taken by Euler-Maclaurin.
    for q in [0.999, 1.0 - 1e-6] {
        let p = q_pochhammer_inf(1.0 - q, q, &policy)?;
        println!(
            "  (1-q; q)_inf at q = {q:<8} = {:.12}  ({:?}, tail bound {:.1e}); 1/e = {:.12}",
            p.value,
            p.method,
            p.tail_bound.unwrap_or(f64::NAN),
            (-1.0f64).exp()
        );
    }
    Ok(())
}
