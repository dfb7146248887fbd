//! Gram matrices of the levels `Λ_n` in closed form and by quadrature, and an
//! orthonormal basis of each level.

use qmehler::bivariate::{gram_matrix, gram_schmidt_basis, orthonormality_defect, quadrature_inner_products, QPolyTable};
use qmehler::quadrature::QuadratureRule;
use qmehler::scalar::{format_rational, ratio};
use qmehler::truncation::TruncationPolicy;

fn main() -> qmehler::error::Result<()> {
    let exact = gram_matrix(2, &ratio(2, 5), &ratio(1, 2))?;
    println!("level 2, rho = 2/5, q = 1/2:");
    for row in &exact.entries {
        println!("  [{}]", row.iter().map(format_rational).collect::<Vec<_>>().join(", "));
    }

    let (rho, q) = (0.4, 0.5);
    let g = gram_matrix(2, &rho, &q)?;
    let table = QPolyTable::build(rho, q, 2)?;
    let level: Vec<_> = table.level(2).expect("in table").into_iter().cloned().collect();
    let (quad, err) = quadrature_inner_products(&level, rho, q, &QuadratureRule::default(), &TruncationPolicy::default())?;
    let worst = (0..3).flat_map(|a| (0..3).map(move |b| (a, b))).map(|(a, b)| (quad[a][b] - g.entries[a][b]).abs()).fold(0.0, f64::max);
    println!("quadrature vs closed form: max difference {worst:.2e} (refinement error {err:.1e})");

    let b = gram_schmidt_basis(&g)?;
    println!("orthonormal basis coefficients in Q_2,0, Q_1,1, Q_0,2:");
    for row in &b {
        println!("  {:?}", row.iter().map(|v| format!("{v:.6}")).collect::<Vec<_>>());
    }
    println!("|B G B^T - I| = {:.2e}", orthonormality_defect(&b, &g));
    Ok(())
}
