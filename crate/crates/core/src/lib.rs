//! Exact symbolic calculus for products of elementary symplectic matrices,
//! and numeric factorization of concrete Sp4(C) matrices.
//!
//! The library is organized around the last-row map of an alternating
//! product of elementary symplectic factors:
//!
//! - [`poly`] — sparse multivariate polynomials over exact rationals,
//!   with differentiation, determinants and exact rank,
//! - [`symgroup`] — elementary symplectic matrices, the alternating
//!   product, the last-row recursion and fixed matrix identities,
//! - [`strata`] — Jacobians, the singular set of the last-row map,
//!   fiber classification and exact point sampling,
//! - [`fields`] — the tangent vector-field calculus: determinant fields,
//!   complete-triple classification, R-minors and the theta/phi/gamma
//!   families, plus golden-table regeneration,
//! - [`factor`] — numeric factorization of Sp4(C) matrices into
//!   elementary factors and into products of exponentials,
//! - [`suites`] — seeded verification campaigns producing reports.

pub mod factor;
pub mod fields;
pub mod jsonio;
pub mod matrix;
pub mod poly;
pub mod report;
pub mod sampling;
pub mod strata;
pub mod suites;
pub mod symgroup;
pub mod vars;

pub use matrix::Mat;
pub use poly::{MPoly, Rat};
pub use symgroup::{ElemFactor, Parity};
pub use vars::VarId;

/// Complex double precision, the numeric scalar type of the factorization
/// pipeline.
pub type C64 = num::complex::Complex<f64>;
