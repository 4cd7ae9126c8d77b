//! Dense factorization kernels.

pub mod cpqr;
pub mod lu;
pub mod norm_est;
pub mod qr;
pub mod solve;
pub mod svd;
mod symeig;

pub use cpqr::{cpqr, PivotedQr};
pub use lu::{lupp, PivotedLu};
pub use norm_est::spectral_norm_estimate;
pub use qr::{householder_qr, qr_ortho, qr_ortho_tol, Qr};
pub use svd::{singular_values, spectral_norm, svd_thin, ThinSvd};

/// Default relative tolerance for rank decisions.
pub const RANK_TOL: f64 = 1e-12;
