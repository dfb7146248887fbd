//! The bivariate layer: the kernels `γ_{i,j}`, the polynomials `Q_{i,j}`, the
//! identities relating them, and Gram geometry within each level `Λ_n`.

pub mod gamma;
pub mod gram;
pub mod identities;
pub mod qpoly;

pub use gamma::gamma;
pub use gram::{gram_entry, gram_matrix, gram_schmidt_basis, orthonormality_defect, quadrature_inner_products, GramMatrix};
pub use identities::{
    expansion_symmetry, hermite_product_series, lnsk_residual, main_i_residual, omega_product_identity,
    q_generating_function_check, q_shift_identity, qkk_inversion, reciprocal_product_residual, reciprocal_series,
    shifted_diagonal_series, shifted_rho_exact, shifted_rho_identity, upm_residual, verify_upm, Comparison,
    ResidualReport,
};
pub use qpoly::{q_diagonal_values, q_poly, q_value, QEvaluator, QPolyTable};
