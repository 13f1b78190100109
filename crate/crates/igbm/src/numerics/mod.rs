//! Shared numerical kernels: Gaussian quadrature, special functions,
//! bracketed root finding and deterministic seeded RNG streams.
//!
//! Everything here is pure and reentrant; rules and streams are immutable
//! once constructed and safe to share between threads.

mod quadrature;
mod rng;
mod roots;
mod special;

pub use quadrature::{
    adaptive_quadrature, gauss_generalized_laguerre, gauss_hermite, gauss_legendre, trapezoid_rule,
    QuadratureKind, QuadratureRule,
};
pub use rng::{stream_ids, RngStream};
pub use roots::find_root_bracketed;
pub use special::{
    erf, erfc, ln_gamma, normal_cdf, normal_pdf, owen_t, parabolic_cylinder_d,
    parabolic_cylinder_d_scaled,
};

/// Errors raised by the numerical kernels.
#[derive(Debug, thiserror::Error)]
pub enum NumericsError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("no sign change on [{lo:e}, {hi:e}]: f(lo)={f_lo:e}, f(hi)={f_hi:e}")]
    Bracket { lo: f64, hi: f64, f_lo: f64, f_hi: f64 },
    #[error("numerical failure: {0}")]
    Numerical(String),
}

pub type Result<T> = std::result::Result<T, NumericsError>;
