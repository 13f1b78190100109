//! Damped fixed-point iteration for the order parameters.

use super::grid::ThetaGrid;
use super::rhs::{q_tau_curve, rhs_order_parameters};
use super::{MeanfieldError, OrderParameters, Result};
use crate::params::ModelParams;

/// Iteration controls.
#[derive(Clone, Debug)]
pub struct FixedPointCtrl {
    /// Mixing weight of the fresh right-hand side, in (0, 1].
    pub damping: f64,
    /// Convergence threshold on the largest per-sweep component change.
    pub tol: f64,
    pub max_iter: usize,
    /// Warm start; defaults to the non-interacting solution.
    pub init: Option<OrderParameters>,
}

impl Default for FixedPointCtrl {
    fn default() -> Self {
        FixedPointCtrl { damping: 0.5, tol: 1e-9, max_iter: 1000, init: None }
    }
}

impl FixedPointCtrl {
    fn validate(&self) -> Result<()> {
        if !(self.damping > 0.0 && self.damping <= 1.0) {
            return Err(MeanfieldError::Parameter(format!(
                "damping must lie in (0, 1], got {}",
                self.damping
            )));
        }
        if !(self.tol > 0.0) {
            return Err(MeanfieldError::Parameter(format!(
                "tol must be > 0, got {}",
                self.tol
            )));
        }
        Ok(())
    }
}

/// A converged solve, with iteration metadata.
#[derive(Clone, Debug)]
pub struct SolveResult {
    pub op: OrderParameters,
    pub iters: usize,
    pub residual: f64,
}

/// Raw outcome of the damped iteration, convergent or not.
pub(crate) struct IterateOutcome {
    pub state: OrderParameters,
    pub iters: usize,
    pub residual: f64,
    pub converged: bool,
    pub oscillating: bool,
}

/// Order parameters of the decoupled system (couplings zeroed), used as the
/// default starting point.
pub fn noninteracting_init(
    params: &ModelParams,
    u0: f64,
    grid: &ThetaGrid,
) -> Result<OrderParameters> {
    let mut free = params.clone();
    free.coupling.j0 = 0.0;
    free.coupling.j = 0.0;
    free.coupling.alpha = 0.0;
    let rhs = rhs_order_parameters(&OrderParameters::zero(u0), grid, &free, u0)?;
    Ok(OrderParameters::from_scalars(rhs.as_array(), u0))
}

pub(crate) fn iterate_scalars(
    params: &ModelParams,
    u0: f64,
    grid: &ThetaGrid,
    ctrl: &FixedPointCtrl,
) -> Result<IterateOutcome> {
    ctrl.validate()?;
    params.validate().map_err(MeanfieldError::Parameter)?;
    let mut state = match &ctrl.init {
        Some(op) => {
            let mut op = op.clone();
            op.u0 = u0;
            op.q_tau_grid.clear();
            op.q_tau.clear();
            op
        }
        None => noninteracting_init(params, u0, grid)?,
    };

    let lambda = ctrl.damping;
    let mut residual = f64::INFINITY;
    let mut best_residual = f64::INFINITY;
    let mut best_iter = 0usize;
    for iter in 1..=ctrl.max_iter {
        let rhs = rhs_order_parameters(&state, grid, params, u0)?;
        let cur = state.scalars();
        let fresh = rhs.as_array();
        let mut next = [0.0; 4];
        residual = 0.0;
        for i in 0..4 {
            next[i] = (1.0 - lambda) * cur[i] + lambda * fresh[i];
            residual = residual.max((next[i] - cur[i]).abs());
        }
        state = OrderParameters::from_scalars(next, u0);
        if residual < ctrl.tol {
            return Ok(IterateOutcome {
                state,
                iters: iter,
                residual,
                converged: true,
                oscillating: false,
            });
        }
        if residual < best_residual {
            best_residual = residual;
            best_iter = iter;
        }
    }
    // A run that stopped shrinking long before the cap is cycling rather
    // than critically slow.
    let oscillating =
        ctrl.max_iter - best_iter > 50 && residual > 1.5 * best_residual;
    Ok(IterateOutcome {
        state,
        iters: ctrl.max_iter,
        residual,
        converged: false,
        oscillating,
    })
}

/// Iterate `x <- (1 - damping) x + damping rhs(x)` until the largest
/// component change drops below `tol`.
///
/// The member self-consistency is re-solved inside every sweep. On success
/// the returned order parameters carry the tabulated autocorrelation curve.
pub fn solve_fixed_point(
    params: &ModelParams,
    u0: f64,
    grid: &ThetaGrid,
    ctrl: &FixedPointCtrl,
) -> Result<SolveResult> {
    let out = iterate_scalars(params, u0, grid, ctrl)?;
    if !out.converged {
        return Err(MeanfieldError::NonConvergence {
            iters: out.iters,
            residual: out.residual,
            oscillating: out.oscillating,
        });
    }
    let mut op = out.state;
    finalize(&mut op, grid, params, u0)?;
    Ok(SolveResult { op, iters: out.iters, residual: out.residual })
}

/// Tabulate the autocorrelation curve of the converged iterate. The grid is
/// zero plus logarithmically spaced lags out to twenty relaxation times of
/// the slowest member, so every decay scale in the mixture is resolved.
fn finalize(
    op: &mut OrderParameters,
    grid: &ThetaGrid,
    params: &ModelParams,
    u0: f64,
) -> Result<()> {
    let kappa_min = grid
        .kappa_nodes
        .iter()
        .cloned()
        .fold(f64::INFINITY, f64::min);
    let kappa_max = grid.kappa_nodes.iter().cloned().fold(0.0, f64::max);
    let tau_max = 20.0 / kappa_min;
    let tau_min = 0.01 / kappa_max;
    let n = grid.sizes.n_tau_out.max(3);
    let mut taus = Vec::with_capacity(n);
    taus.push(0.0);
    let l0 = tau_min.ln();
    let step = (tau_max.ln() - l0) / (n - 2) as f64;
    for i in 0..n - 1 {
        taus.push((l0 + step * i as f64).exp());
    }
    let values = q_tau_curve(op, grid, params, u0, &taus)?;
    op.q_tau_grid = taus;
    op.q_tau = values;
    Ok(())
}
