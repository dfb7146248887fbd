//! q-Hermite, Al-Salam–Chihara and Poisson–Mehler kernel computations.
//!
//! The crate evaluates the q-Hermite family and its relatives, the q-Normal
//! density and the Poisson–Mehler kernel, the bilinear series `γ_{i,j}` and
//! the bivariate polynomials `Q_{i,j}(x,y|ρ,q)`. Each identity that connects
//! these objects can be checked either exactly over rationals or as a residual
//! in `f64` or double-double.
//!
//! Algorithms are generic over [`scalar::Scalar`]. Exact arithmetic uses
//! [`ExactScalar`] (big rationals). Floating code runs on `f64`, or on
//! [`Quad`] when sums cancel heavily.
//!
//! ```
//! use qmehler::bivariate::{gamma, q_poly};
//! use qmehler::kernels::{poisson_mehler_product, KernelParams};
//! use qmehler::scalar::ratio;
//! use qmehler::TruncationPolicy;
//!
//! let q10 = q_poly(1, 0, &ratio(1, 2), &ratio(1, 2)).unwrap();
//! assert_eq!(q10.to_string(), "4/3*x - 2/3*y");
//!
//! let p = KernelParams::new(0.5, -0.3, 0.4, 0.5).unwrap();
//! let policy = TruncationPolicy::default();
//! let series = gamma(0, 0, &p, &policy).unwrap().value;
//! let product = poisson_mehler_product(&p, &policy).unwrap().value;
//! assert!((series - product).abs() < 1e-12);
//! ```

pub mod bivariate;
pub mod cli;
pub mod error;
pub mod families;
pub mod harness;
pub mod kernels;
pub mod poly;
pub mod qarith;
pub mod quadrature;
pub mod scalar;
pub mod truncation;

pub use error::{Error, Result};
pub use poly::{Poly1, Poly2};
pub use qarith::QParam;
pub use scalar::{ExactScalar, Quad};
pub use truncation::{TruncationPolicy, Truncated};
