//! Exact bivariate polynomials `Q_{i,j}` and the exact identities they satisfy.

use qmehler::bivariate::{omega_product_identity, q_poly, q_shift_identity, qkk_inversion, QPolyTable};
use qmehler::scalar::ratio;

fn main() -> qmehler::error::Result<()> {
    let (rho, q) = (ratio(1, 3), ratio(1, 2));
    let table = QPolyTable::build(rho.clone(), q.clone(), 2)?;
    for n in 0..=2 {
        for j in 0..=n {
            println!("Q_{},{}(x,y|1/3,1/2) = {}", n - j, j, table.get(n - j, j).expect("in table"));
        }
    }

    let swapped = q_poly(1, 2, &rho, &q)?.swap_xy();
    println!("\nQ_1,2(y,x) == Q_2,1(x,y): {}", swapped == q_poly(2, 1, &rho, &q)?);

    for m in 0..=3 {
        println!(
            "m = {m}: shift identity {}, omega product {}, Q_mm inversion {}",
            q_shift_identity(1, 1, m, &rho, &q)?.holds(),
            omega_product_identity(m, &rho, &q)?.holds(),
            qkk_inversion(m, &rho, &q)?.holds(),
        );
    }

    let json = serde_json::to_string(&QPolyTable::build(ratio(1, 4), ratio(2, 3), 1)?).expect("serializes");
    println!("\n{json}");
    Ok(())
}
