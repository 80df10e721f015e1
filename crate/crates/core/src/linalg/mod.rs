//! Dense and banded Hermitian eigensolvers.

mod banded;
mod dense;

pub use banded::BandedHermitian;
pub use dense::{eigensolve, eigenvalues, norm_inf, orthonormality_defect, residual, self_adjoint_defect, EigenSystem};

pub use faer::c64;
pub use faer::Mat;

/// Relative tolerance on ‖H − Hᴴ‖∞ / ‖H‖∞ for accepting a matrix as self-adjoint.
pub const SELF_ADJOINT_TOLERANCE: f64 = 1e-12;
