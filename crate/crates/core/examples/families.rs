//! The univariate families: q-Hermite, continuous q-Hermite, big q-Hermite,
//! Al-Salam–Chihara and its rescaled form `P_n(x|y,ρ,q)`.

use qmehler::families::{
    asc, asc_p, asc_p_poly, big_hermite_q, chebyshev_u, hermite_cq, hermite_q, hermite_q_poly, rescale_cq_to_q,
};
use qmehler::scalar::ratio;

fn main() -> qmehler::error::Result<()> {
    let q = ratio(1, 2);
    for n in 0..=4 {
        println!("H_{n}(x|1/2) = {}", hermite_q_poly(n, &q));
    }
    println!("P_2(x|y=1, rho=1/3, q=1/2) = {}", asc_p_poly(2, &ratio(1, 1), &ratio(1, 3), &q)?);

    let (x, q) = (0.8, 0.5);
    println!("\nat x = {x}, q = {q}");
    println!("  H_5  = {:.15}", hermite_q(5, &x, &q));
    println!("  h_5  = {:.15}", hermite_cq(5, &(x * (1.0f64 - q).sqrt() / 2.0), &q));
    println!("  H_5 via h_5 rescaled = {:.15}", rescale_cq_to_q(5, x, q)?);
    println!("  big q-Hermite H_3(x|0.4) = {:.15}", big_hermite_q(3, &x, &0.4, &q));
    println!("  Al-Salam-Chihara A_3(x|0.3,-0.2) = {:.15}", asc(3, &x, &0.3, &-0.2, &q)?);
    println!("  P_3(x|y=0.5, rho=0.4) = {:.15}", asc_p(3, &x, &0.5, &0.4, &q)?);

    // q = 0 reduces H_n to Chebyshev U_n(x/2).
    println!("  H_4(1.2|0) = {:.15}, U_4(0.6) = {:.15}", hermite_q(4, &1.2, &0.0), chebyshev_u(4, &0.6));
    Ok(())
}
