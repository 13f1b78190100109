//! Per-member long-term mean: the self-consistency equation in `ubar`, its
//! fold geometry and the branch-resolved root solver.

use super::{sigma_u2, MeanfieldError, OrderParameters, Result};
use crate::numerics::{erf, find_root_bracketed};
use crate::params::ModelParams;

/// Stability of a root of the `ubar` self-consistency equation: stable
/// where `dz/d ubar > 0`.
#[derive(Clone, Copy, Debug, PartialEq, Eq)]
pub enum Stability {
    Stable,
    Unstable,
}

/// The scalar equation `F(ubar) = y` for one member, with
/// `F(u) = kappa u - achi erf(u / denom)`, `achi = alpha J^2 chi`,
/// `denom = sqrt(1 + 2 sigma_u^2)` and `y = J0 m + I0 + s z + sigma0 u0`.
#[derive(Clone, Copy, Debug)]
pub struct UbarEquation {
    pub kappa: f64,
    /// Self-coupling strength `alpha J^2 chi`.
    pub achi: f64,
    /// `sqrt(1 + 2 sigma_u^2)`.
    pub denom: f64,
    /// Fold indicator `2 achi / (kappa sqrt(pi) denom)`; the map `z -> ubar`
    /// is single-valued iff this is <= 1.
    pub fold: f64,
    /// Positive branch endpoint `ubar*` (root of `F` on the outer branch)
    /// when folded, zero otherwise.
    pub ustar: f64,
    /// Turning point of `F` when folded (both `+-ubar_c`), zero otherwise.
    pub ucrit: f64,
}

const SQRT_PI: f64 = 1.772453850905516;

impl UbarEquation {
    /// Build the equation for one `kappa` from the current order parameters.
    pub fn new(kappa: f64, op: &OrderParameters, params: &ModelParams) -> Result<UbarEquation> {
        if !(kappa > 0.0) {
            return Err(MeanfieldError::Parameter(format!(
                "kappa must be > 0, got {kappa}"
            )));
        }
        let j = params.coupling.j;
        let su2 = sigma_u2(kappa, op.chat0, params.sigma, j);
        let denom = (1.0 + 2.0 * su2).sqrt();
        let achi = params.coupling.alpha * j * j * op.chi;
        let fold = 2.0 * achi / (kappa * SQRT_PI * denom);
        let mut eq = UbarEquation { kappa, achi, denom, fold, ustar: 0.0, ucrit: 0.0 };
        if eq.has_gap() {
            // F'(u) = 0 at u_c = denom sqrt(ln fold); ubar* is the positive
            // zero of F beyond it.
            eq.ucrit = denom * fold.ln().sqrt();
            let hi = (achi / kappa) + denom;
            eq.ustar = find_root_bracketed(|u| eq.f(u), eq.ucrit, hi.max(eq.ucrit * 2.0), 1e-13)?;
        }
        Ok(eq)
    }

    /// Whether the `z -> ubar` map is multivalued (gap regime).
    pub fn has_gap(&self) -> bool {
        self.fold > 1.0
    }

    #[inline]
    pub fn f(&self, u: f64) -> f64 {
        self.kappa * u - self.achi * erf(u / self.denom)
    }

    /// Derivative `F'(u) = s * dz/d ubar`.
    #[inline]
    pub fn f_prime(&self, u: f64) -> f64 {
        self.kappa - 2.0 * self.achi / (SQRT_PI * self.denom) * (-(u / self.denom).powi(2)).exp()
    }

    /// Member response `erf(ubar / denom)` at a solved mean.
    #[inline]
    pub fn response(&self, u: f64) -> f64 {
        erf(u / self.denom)
    }

    fn root_tol(&self, y: f64) -> f64 {
        1e-12 * (1.0 + (y.abs() + self.achi.abs()) / self.kappa + self.denom)
    }

    /// All real solutions of `F(ubar) = y`, sorted ascending, tagged by
    /// stability. One root when the map is single-valued, up to three in the
    /// gap regime.
    pub fn roots(&self, y: f64) -> Result<Vec<(f64, Stability)>> {
        let tol = self.root_tol(y);
        // |erf| <= 1 confines every root to this bracket.
        let lo = (y - self.achi.abs()) / self.kappa - tol;
        let hi = (y + self.achi.abs()) / self.kappa + tol;
        if !self.has_gap() {
            let r = find_root_bracketed(|u| self.f(u) - y, lo, hi, tol)?;
            return Ok(vec![(r, Stability::Stable)]);
        }
        // Local max of F at -u_c, local min at +u_c; f_c = F(-u_c) > 0.
        let f_c = -self.f(self.ucrit);
        if y.abs() < f_c {
            let left = find_root_bracketed(|u| self.f(u) - y, lo, -self.ucrit, tol)?;
            let middle = find_root_bracketed(|u| self.f(u) - y, -self.ucrit, self.ucrit, tol)?;
            let right = find_root_bracketed(|u| self.f(u) - y, self.ucrit, hi, tol)?;
            Ok(vec![
                (left, Stability::Stable),
                (middle, Stability::Unstable),
                (right, Stability::Stable),
            ])
        } else if y.abs() == f_c {
            // Fold point: a simple root plus a marginal double root.
            let (simple, marginal) = if y > 0.0 {
                (
                    find_root_bracketed(|u| self.f(u) - y, self.ucrit, hi, tol)?,
                    -self.ucrit,
                )
            } else {
                (
                    find_root_bracketed(|u| self.f(u) - y, lo, -self.ucrit, tol)?,
                    self.ucrit,
                )
            };
            let mut out = vec![(simple, Stability::Stable), (marginal, Stability::Unstable)];
            out.sort_by(|a, b| a.0.partial_cmp(&b.0).unwrap());
            Ok(out)
        } else {
            let r = if y > 0.0 {
                find_root_bracketed(|u| self.f(u) - y, self.ucrit, hi, tol)?
            } else {
                find_root_bracketed(|u| self.f(u) - y, lo, -self.ucrit, tol)?
            };
            Ok(vec![(r, Stability::Stable)])
        }
    }

    /// The physical root under the jump prescription: in the gap regime the
    /// solution follows the outer branch whose sign matches `y`, jumping
    /// from `-ubar*` to `+ubar*` as `y` crosses zero.
    pub fn select_root(&self, y: f64) -> Result<f64> {
        let tol = self.root_tol(y);
        if !self.has_gap() {
            let lo = (y - self.achi.abs()) / self.kappa - tol;
            let hi = (y + self.achi.abs()) / self.kappa + tol;
            return Ok(find_root_bracketed(|u| self.f(u) - y, lo, hi, tol)?);
        }
        if y == 0.0 {
            return Ok(self.ustar);
        }
        if y > 0.0 {
            let hi = (y + self.achi.abs()) / self.kappa + tol;
            Ok(find_root_bracketed(|u| self.f(u) - y, self.ustar, hi.max(self.ustar), tol)?)
        } else {
            let lo = (y - self.achi.abs()) / self.kappa - tol;
            Ok(find_root_bracketed(|u| self.f(u) - y, lo.min(-self.ustar), -self.ustar, tol)?)
        }
    }
}

/// All roots of the member self-consistency equation at frozen noise `z`,
/// with stability tags.
pub fn solve_ubar(
    z: f64,
    kappa: f64,
    op: &OrderParameters,
    params: &ModelParams,
) -> Result<Vec<(f64, Stability)>> {
    let s2 = params.sigma_i2 + params.coupling.j * params.coupling.j * op.q;
    let eq = UbarEquation::new(kappa, op, params)?;
    let y = params.coupling.j0 * op.m
        + params.i0
        + s2.max(0.0).sqrt() * z
        + params.sigma0 * op.u0;
    eq.roots(y)
}
