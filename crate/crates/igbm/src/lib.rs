//! Numerical laboratory for a market of interacting log-prices.
//!
//! A system of `N` assets evolves under mean reversion, sigmoid-coupled
//! pairwise interactions with quenched random strengths, a shared slow
//! Ornstein-Uhlenbeck factor and idiosyncratic white noise. The crate
//! provides
//!
//! * [`simulator`] — explicit integration of the coupled Langevin system,
//!   with index, overlap and return recording,
//! * [`couplings`] — Erdős–Rényi / fully-connected coupling ensembles with
//!   controlled symmetry correlation and optional Hebbian pattern terms,
//! * [`meanfield`] — the quasi-stationary self-consistency equations for the
//!   order parameters (m, q, χ, Ĉ(0)) at fixed slow-factor value, plus phase
//!   scans,
//! * [`returns`] — analytic distributions of log-returns across the ensemble
//!   on the three natural time scales,
//! * [`pricing`] — distributions of equilibrium log-prices, both the
//!   closed-form non-interacting law and the interacting law obtained by a
//!   Jacobian transform,
//! * [`numerics`] — quadrature, special functions, root finding and seeded
//!   RNG streams shared by everything above.

pub mod couplings;
pub mod density;
pub mod meanfield;
pub mod numerics;
pub mod params;
pub mod pricing;
pub mod returns;
pub mod simulator;

pub use density::DensityCurve;
pub use params::{KappaDist, ModelParams};

/// Render a float with 17 significant digits, enough for the decimal
/// representation to round-trip bit-exactly.
pub fn fmt_float(x: f64) -> String {
    format!("{x:.16e}")
}
