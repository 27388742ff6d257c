//! Dense complex linear algebra for matrices up to about 32x32.
//!
//! Everything here is self-contained: cyclic Jacobi for Hermitian
//! eigenproblems, one-sided Jacobi for singular values and kernels,
//! Faddeev-LeVerrier for characteristic polynomials and a shifted
//! Hessenberg QR for companion-matrix roots.

mod eigen;
mod jacobi;
mod matrix;
mod poly;
mod svd;

pub use eigen::{eig_hermitian, projection_residual, pseudo_inverse, quadratic_form, Spectrum};
pub(crate) use eigen::{check_tau, pseudo_inverse_from};
pub use matrix::{
    c, conj_vec, inner, kron_vec, norm, normalized, orthonormalize, phase_fixed, r, real_vec,
    scale_vec, sub_vec, CVector, ComplexMatrix, C64, HERMITIAN_TOL, I, ONE, ZERO,
};
pub use poly::{
    char_poly, poly_eval, poly_roots, relative_residual, CharPoly, CHAR_POLY_MAX_DIM,
    ROOTS_MAX_DEGREE,
};
pub use svd::{kernel_basis, rank_tol, svd, SingularValues};

/// Default relative rank cut.
pub const DEFAULT_TAU: f64 = 1e-9;
