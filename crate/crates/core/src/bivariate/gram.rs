//! Inner products within a level `Λ_n = span{Q_{n−j,j} : j = 0..=n}` and
//! orthonormal bases obtained by Gram–Schmidt.

use serde::Serialize;

use crate::error::{Error, Result};
use crate::kernels::f_2d;
use crate::poly::Poly2;
use crate::qarith::{binom2, q_binomial, q_factorial, q_pochhammer, QParam};
use crate::quadrature::{integrate_many_2d, QuadratureRule};
use crate::scalar::{Real, Scalar};
use crate::truncation::TruncationPolicy;

/// `∬ Q_{n−j,j} Q_{n−k,k} f_2D` in closed form:
///
/// `(−1)^d ρ^d q^{C(d,2)} [j]_q! [n−j]_q!/(ρ²)_n ·
///  Σ_{s=0}^{j} q^{s(s−1)+ds} [k d+s]_q [n−j+s s]_q ρ^{2s} (ρ² q^{n−j+s})_{j−s}`
/// with `d = k − j` for `j ≤ k`; the other triangle follows by symmetry.
pub fn gram_entry<T: Scalar>(n: usize, j: usize, k: usize, rho: &T, q: &T) -> Result<T> {
    if j > n || k > n {
        return Err(Error::domain(format!("indices ({j},{k}) exceed level {n}")));
    }
    QParam::new(q.clone())?;
    if rho.abs_val() >= T::one() {
        return Err(Error::domain("|rho| must be < 1"));
    }
    if j > k {
        return gram_entry(n, k, j, rho, q);
    }
    let d = k - j;
    let r2 = rho.clone() * rho.clone();
    let mut sum = T::zero();
    for s in 0..=j {
        let e = (s * s.saturating_sub(1) + d * s) as u32;
        sum = sum
            + q.powu(e)
                * q_binomial(k as i64, (d + s) as i64, q)
                * q_binomial((n - j + s) as i64, s as i64, q)
                * r2.powu(s as u32)
                * q_pochhammer(&(r2.clone() * q.powu((n - j + s) as u32)), q, j - s);
    }
    let sign = if d % 2 == 0 { T::one() } else { -T::one() };
    let lead = sign * rho.powu(d as u32) * q.powu(binom2(d)) * q_factorial(j, q) * q_factorial(n - j, q)
        / q_pochhammer(&r2, q, n);
    Ok(lead * sum)
}

/// Symmetric `(n+1)×(n+1)` matrix of inner products of `Q_{n−j,j}`, `j = 0..=n`.
#[derive(Debug, Clone, PartialEq, Serialize)]
pub struct GramMatrix<T> {
    pub n: usize,
    pub entries: Vec<Vec<T>>,
}

impl<T: Scalar> GramMatrix<T> {
    pub fn new(n: usize, rho: &T, q: &T) -> Result<Self> {
        let entries = (0..=n)
            .map(|j| (0..=n).map(|k| gram_entry(n, j, k, rho, q)).collect::<Result<Vec<_>>>())
            .collect::<Result<Vec<_>>>()?;
        Ok(GramMatrix { n, entries })
    }

    pub fn dim(&self) -> usize {
        self.n + 1
    }

    pub fn map<U>(&self, f: impl Fn(&T) -> U) -> GramMatrix<U> {
        GramMatrix { n: self.n, entries: self.entries.iter().map(|r| r.iter().map(&f).collect()).collect() }
    }
}

/// `gram_matrix(n, ρ, q)`.
pub fn gram_matrix<T: Scalar>(n: usize, rho: &T, q: &T) -> Result<GramMatrix<T>> {
    GramMatrix::new(n, rho, q)
}

/// Lower-triangular `B` with `B G Bᵀ = I`, i.e. `B = L⁻¹` for the Cholesky
/// factor `G = L Lᵀ`. Row `r` of `B` holds the coordinates of the `r`-th
/// orthonormal vector in the `Q_{n−j,j}` basis; diagonals are positive.
pub fn gram_schmidt_basis<T: Real>(g: &GramMatrix<T>) -> Result<Vec<Vec<T>>> {
    let dim = g.dim();
    let a = &g.entries;
    let scale = a.iter().enumerate().map(|(i, r)| r[i].abs_val().to_f64()).fold(0.0, f64::max);
    let mut l = vec![vec![T::zero(); dim]; dim];
    for i in 0..dim {
        for j in 0..=i {
            let mut acc = a[i][j];
            for k in 0..j {
                acc = acc - l[i][k] * l[j][k];
            }
            if i == j {
                if !(acc.to_f64() > scale * 1e3 * T::EPSILON) {
                    return Err(Error::Numerical(format!(
                        "Gram matrix of level {} is not numerically positive definite (pivot {} = {:e})",
                        g.n,
                        i,
                        acc.to_f64()
                    )));
                }
                l[i][i] = acc.sqrt();
            } else {
                l[i][j] = acc / l[j][j];
            }
        }
    }
    let mut b = vec![vec![T::zero(); dim]; dim];
    for col in 0..dim {
        b[col][col] = T::one() / l[col][col];
        for row in col + 1..dim {
            let mut acc = T::zero();
            for k in col..row {
                acc = acc + l[row][k] * b[k][col];
            }
            b[row][col] = -acc / l[row][row];
        }
    }
    Ok(b)
}

/// `max |B G Bᵀ − I|`.
pub fn orthonormality_defect<T: Real>(b: &[Vec<T>], g: &GramMatrix<T>) -> f64 {
    let dim = g.dim();
    let mut worst = 0.0f64;
    for r in 0..dim {
        for c in 0..dim {
            let mut v = T::zero();
            for i in 0..dim {
                for j in 0..dim {
                    v = v + b[r][i] * g.entries[i][j] * b[c][j];
                }
            }
            let target = if r == c { T::one() } else { T::zero() };
            worst = worst.max((v - target).abs_val().to_f64());
        }
    }
    worst
}

/// `∬ p_a p_b f_2D` for every pair of the given polynomials, by tensor
/// Gauss–Legendre; returns the matrix and its refinement error.
pub fn quadrature_inner_products(
    polys: &[Poly2<f64>],
    rho: f64,
    q: f64,
    rule: &QuadratureRule,
    policy: &TruncationPolicy,
) -> Result<(Vec<Vec<f64>>, f64)> {
    let m = polys.len();
    let density_err = std::sync::Mutex::new(None);
    let est = integrate_many_2d(
        m * (m + 1) / 2,
        |x, y, out| {
            let w = match f_2d(x, y, rho, q, policy) {
                Ok(w) => w,
                Err(e) => {
                    density_err.lock().expect("poisoned").get_or_insert(e);
                    0.0
                }
            };
            if w == 0.0 {
                return;
            }
            let vals: Vec<f64> = polys.iter().map(|p| p.eval(&x, &y)).collect();
            let mut idx = 0;
            for a in 0..m {
                for b in a..m {
                    out[idx] = w * vals[a] * vals[b];
                    idx += 1;
                }
            }
        },
        q,
        rule,
    )?;
    if let Some(e) = density_err.into_inner().expect("poisoned") {
        return Err(e);
    }
    let mut mat = vec![vec![0.0; m]; m];
    let mut idx = 0;
    for a in 0..m {
        for b in a..m {
            mat[a][b] = est.values[idx];
            mat[b][a] = est.values[idx];
            idx += 1;
        }
    }
    Ok((mat, est.error))
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::bivariate::qpoly::QPolyTable;
    use crate::scalar::{ratio, ExactScalar, Quad};

    fn r(p: i64, q: i64) -> ExactScalar {
        ratio(p, q)
    }

    /// Inner product assembled term by term from the level expansion, used as an
    /// independent oracle for the closed form.
    fn derivation_oracle(n: usize, j: usize, k: usize, rho: &ExactScalar, q: &ExactScalar) -> ExactScalar {
        let d = k - j;
        let r2 = rho.clone() * rho.clone();
        let mut sum = r(0, 1);
        for s in 0..=j {
            sum = sum
                + q.powu(binom2(s) + binom2(d + s))
                    * q_binomial(j as i64, s as i64, q)
                    * q_binomial(k as i64, (d + s) as i64, q)
                    * r2.powu(s as u32)
                    * q_factorial(n - j + s, q)
                    / q_pochhammer(&r2, q, n - j + s)
                    * q_factorial(j - s, q);
        }
        let sign = if d % 2 == 0 { r(1, 1) } else { r(-1, 1) };
        sign * rho.powu(d as u32) * sum
    }

    #[test]
    fn closed_form_matches_oracle() {
        for (rho, q) in [(r(2, 5), r(1, 2)), (r(-1, 3), r(3, 4)), (r(3, 5), r(-1, 2)), (r(1, 7), r(0, 1))] {
            for n in 0..=6 {
                for j in 0..=n {
                    for k in j..=n {
                        assert_eq!(gram_entry(n, j, k, &rho, &q).unwrap(), derivation_oracle(n, j, k, &rho, &q));
                    }
                }
            }
        }
    }

    #[test]
    fn small_levels() {
        assert_eq!(gram_entry(0, 0, 0, &r(2, 5), &r(1, 2)).unwrap(), r(1, 1));
        assert_eq!(gram_entry(1, 0, 0, &r(2, 5), &r(1, 2)).unwrap(), r(25, 21));
        assert_eq!(gram_entry(1, 1, 1, &r(1, 3), &r(1, 2)).unwrap(), r(9, 8));
        let g = gram_matrix(3, &r(0, 1), &r(1, 2)).unwrap();
        for j in 0..=3 {
            for k in 0..=3 {
                let expect = if j == k { q_factorial(3 - j, &r(1, 2)) * q_factorial(j, &r(1, 2)) } else { r(0, 1) };
                assert_eq!(g.entries[j][k], expect);
            }
        }
    }

    #[test]
    fn gram_schmidt_orthonormalizes() {
        let g = gram_matrix(0, &0.4, &0.5).unwrap();
        assert_eq!(gram_schmidt_basis(&g).unwrap(), vec![vec![1.0]]);
        let g = gram_matrix(2, &0.4, &0.5).unwrap();
        let b = gram_schmidt_basis(&g).unwrap();
        assert!(orthonormality_defect(&b, &g) < 1e-10);
        for (i, row) in b.iter().enumerate() {
            assert!(row[i] > 0.0);
            assert!(row[i + 1..].iter().all(|v| *v == 0.0));
        }
        let q = 0.5;
        let g = gram_matrix(3, &0.0, &q).unwrap();
        let b = gram_schmidt_basis(&g).unwrap();
        for j in 0..=3 {
            let expect = 1.0 / (q_factorial(3 - j, &q) * q_factorial(j, &q)).sqrt();
            assert!((b[j][j] - expect).abs() < 1e-15);
        }
    }

    #[test]
    fn gram_schmidt_in_quad_at_hard_corner() {
        let g = gram_matrix(5, &Quad::from(0.6), &Quad::from(0.9)).unwrap();
        let b = gram_schmidt_basis(&g).unwrap();
        assert!(orthonormality_defect(&b, &g) < 1e-20);
    }

    #[test]
    fn singular_gram_is_rejected() {
        let g = GramMatrix { n: 1, entries: vec![vec![1.0, 1.0], vec![1.0, 1.0]] };
        assert!(matches!(gram_schmidt_basis(&g), Err(Error::Numerical(_))));
    }

    #[test]
    fn quadrature_matches_closed_form() {
        let (rho, q) = (0.4, 0.5);
        let table = QPolyTable::build(rho, q, 2).unwrap();
        let polys: Vec<Poly2<f64>> = (0..=2).flat_map(|d| (0..=d).map(move |j| (d - j, j))).map(|(i, j)| table.get(i, j).unwrap().clone()).collect();
        let (mat, _) = quadrature_inner_products(&polys, rho, q, &QuadratureRule::default(), &TruncationPolicy::default()).unwrap();
        // Ordering: (0,0), (1,0), (0,1), (2,0), (1,1), (0,2).
        assert!((mat[0][0] - 1.0).abs() < 1e-6);
        assert!((mat[1][1] - gram_entry(1, 0, 0, &rho, &q).unwrap()).abs() < 1e-6);
        assert!((mat[1][2] - gram_entry(1, 0, 1, &rho, &q).unwrap()).abs() < 1e-6);
        assert!((mat[3][5] - gram_entry(2, 0, 2, &rho, &q).unwrap()).abs() < 1e-6);
        assert!(mat[1][5].abs() < 1e-6 && mat[0][4].abs() < 1e-6);
    }
}
