//! Quasi-stationary self-consistency equations for the order parameters at
//! fixed slow-factor value, and phase-structure scans built on the solver.
//!
//! The state of the theory at one `u0` is the quadruple
//! `(m, q, chi, Chat0)`:
//!
//! * `m` — magnetization, the ensemble mean of `erf(u)`,
//! * `q` — time-persistent part of the `erf(u)` autocorrelation,
//! * `chi` — integrated response to the frozen noise,
//! * `Chat0` — zero-frequency weight of the non-persistent autocorrelation.
//!
//! Every average couples back through the per-member long-term mean, which
//! solves `kappa ubar = J0 m + I0 + sqrt(sigma_I^2 + J^2 q) z
//! + alpha J^2 chi erf(ubar / sqrt(1 + 2 sigma_u^2)) + sigma0 u0`. For
//! sufficiently strong self-coupling that equation folds: the map from the
//! frozen noise `z` to `ubar` develops a forbidden interval (a gap) and the
//! solution jumps between the outer branches at the symmetric point. All
//! ensemble averages are then taken over the stable branches only, weighted
//! by the Gaussian measure carried through the transform.

mod grid;
mod rhs;
mod scan;
mod solver;
mod ubar;

pub use grid::{kappa_quadrature, GridSizes, ThetaGrid};
pub use rhs::{erf_pair_average, erf_pair_average_quadrature, rhs_order_parameters, RhsScalars};
pub use scan::{phase_boundary_curve, phase_scan, PhasePoint, PhaseScan, ScanAxis};
pub use solver::{noninteracting_init, solve_fixed_point, FixedPointCtrl, SolveResult};
pub use ubar::{solve_ubar, Stability, UbarEquation};

#[derive(Debug, thiserror::Error)]
pub enum MeanfieldError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error(
        "fixed point did not converge after {iters} sweeps (residual {residual:.3e}){}",
        if *oscillating { "; the iterate oscillates, retry with smaller damping" } else { "" }
    )]
    NonConvergence {
        iters: usize,
        residual: f64,
        oscillating: bool,
    },
    #[error("internal consistency failure: {0}")]
    Internal(String),
    #[error(transparent)]
    Numerics(#[from] crate::numerics::NumericsError),
}

pub type Result<T> = std::result::Result<T, MeanfieldError>;

/// Converged (or in-flight) order parameters at one slow-factor value.
#[derive(Clone, Debug, PartialEq)]
pub struct OrderParameters {
    pub m: f64,
    pub q: f64,
    pub chi: f64,
    pub chat0: f64,
    /// Tabulated autocorrelation grid; empty while iterating, filled on the
    /// converged result.
    pub q_tau_grid: Vec<f64>,
    pub q_tau: Vec<f64>,
    /// Slow-factor value these parameters solve for.
    pub u0: f64,
}

impl OrderParameters {
    /// All-zero starting point.
    pub fn zero(u0: f64) -> Self {
        OrderParameters {
            m: 0.0,
            q: 0.0,
            chi: 0.0,
            chat0: 0.0,
            q_tau_grid: Vec::new(),
            q_tau: Vec::new(),
            u0,
        }
    }

    pub(crate) fn scalars(&self) -> [f64; 4] {
        [self.m, self.q, self.chi, self.chat0]
    }

    pub(crate) fn from_scalars(s: [f64; 4], u0: f64) -> Self {
        OrderParameters {
            m: s[0],
            q: s[1],
            chi: s[2],
            chat0: s[3],
            q_tau_grid: Vec::new(),
            q_tau: Vec::new(),
            u0,
        }
    }

    /// Check range and consistency invariants.
    ///
    /// Violations of hard ranges are errors; a negative response is only
    /// reported (the glassy region is allowed to produce it). `q_tau` must
    /// decay monotonically within `monotone_slack` and the stored `chat0`
    /// must match the trapezoid of `2 (q_tau - q)` within `chat0_rel_tol`.
    pub fn validate(
        &self,
        monotone_slack: f64,
        chat0_rel_tol: f64,
    ) -> std::result::Result<Vec<String>, String> {
        let mut warnings = Vec::new();
        if !(self.m.abs() <= 1.0 + 1e-12) {
            return Err(format!("|m| = {} > 1", self.m.abs()));
        }
        if !(-1e-12..=1.0 + 1e-12).contains(&self.q) {
            return Err(format!("q = {} outside [0, 1]", self.q));
        }
        if !(self.chat0 >= -1e-12) {
            return Err(format!("Chat0 = {} < 0", self.chat0));
        }
        if self.chi < 0.0 {
            warnings.push(format!("negative integrated response chi = {}", self.chi));
        }
        if !self.q_tau.is_empty() {
            for w in self.q_tau.windows(2) {
                if w[1] > w[0] + monotone_slack {
                    return Err(format!("q_tau not monotone: {} -> {}", w[0], w[1]));
                }
            }
            if self.q_tau.iter().any(|&v| v < self.q - monotone_slack) {
                return Err("q_tau drops below its persistent limit".into());
            }
            let trapz = 2.0 * trapezoid_excess(&self.q_tau_grid, &self.q_tau, self.q);
            let scale = self.chat0.abs().max(1e-9);
            if (trapz - self.chat0).abs() > chat0_rel_tol * scale {
                return Err(format!(
                    "Chat0 = {} vs tabulated integral {} (tol {chat0_rel_tol})",
                    self.chat0, trapz
                ));
            }
        }
        Ok(warnings)
    }
}

pub(crate) fn trapezoid_excess(grid: &[f64], values: &[f64], base: f64) -> f64 {
    let mut acc = 0.0;
    for i in 1..grid.len() {
        let h = grid[i] - grid[i - 1];
        acc += 0.5 * h * ((values[i - 1] - base) + (values[i] - base));
    }
    acc
}

/// Equal-time variance of the fast fluctuations of one ensemble member:
/// `(sigma^2 + J^2 Chat0) / (2 kappa)`.
pub fn sigma_u2(kappa: f64, chat0: f64, sigma: f64, j: f64) -> f64 {
    debug_assert!(kappa > 0.0);
    (sigma * sigma + j * j * chat0) / (2.0 * kappa)
}

/// Normalized autocovariance of the fast fluctuations at lag `tau`:
/// `(sigma^2 e^{-kappa tau} + J^2 Chat0) / (sigma^2 + J^2 Chat0)`.
pub fn rho_u(tau: f64, kappa: f64, chat0: f64, sigma: f64, j: f64) -> Result<f64> {
    let denom = sigma * sigma + j * j * chat0;
    if !(denom > 0.0) {
        return Err(MeanfieldError::Parameter(
            "sigma^2 + J^2 Chat0 must be > 0 for the correlation ratio".into(),
        ));
    }
    Ok((sigma * sigma * (-kappa * tau.abs()).exp() + j * j * chat0) / denom)
}
