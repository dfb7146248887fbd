//! The bilinear series `γ_{i,j}(x,y|ρ,q) = Σ_n ρ^n/[n]_q! H_{n+i}(x|q) H_{n+j}(y|q)`.

use crate::error::Result;
use crate::families::NormalizedHermite;
use crate::kernels::KernelParams;
use crate::scalar::Real;
use crate::truncation::{sum_series, TruncationPolicy, Truncated};

/// `γ_{i,j}`, summed until three consecutive terms fall below `tol/10`.
///
/// Terms are formed as `ρ^n √([n+i]_q! [n+j]_q!)/[n]_q! · Ĥ_{n+i}(x) Ĥ_{n+j}(y)`
/// so no factorial is ever materialized.
pub fn gamma<T: Real>(i: usize, j: usize, p: &KernelParams<T>, policy: &TruncationPolicy) -> Result<Truncated<T>> {
    let q = p.q;
    let mut hx = NormalizedHermite::new(p.x, q).skip(i);
    let mut hy = NormalizedHermite::new(p.y, q).skip(j);
    // qn[m] = [m]_q, grown on demand.
    let mut qn = vec![T::zero()];
    let grow = |qn: &mut Vec<T>, m: usize| {
        while qn.len() <= m {
            let next = T::one() + q * *qn.last().expect("non-empty");
            qn.push(next);
        }
    };
    grow(&mut qn, i.max(j));
    let mut coef = (qn[1..=i].iter().fold(T::one(), |a, &b| a * b) * qn[1..=j].iter().fold(T::one(), |a, &b| a * b)).sqrt();
    sum_series(policy, |n| {
        if n > 0 {
            grow(&mut qn, n + i.max(j));
            coef = coef * p.rho * (qn[n + i] * qn[n + j]).sqrt() / qn[n];
        }
        coef * hx.next().expect("endless") * hy.next().expect("endless")
    })
}
