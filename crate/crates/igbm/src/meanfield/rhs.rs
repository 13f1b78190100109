//! One sweep of the self-consistency map: evaluate the right-hand sides of
//! the order-parameter equations at the current iterate.

use super::grid::ThetaGrid;
use super::ubar::UbarEquation;
use super::{MeanfieldError, OrderParameters, Result};
use crate::numerics::{erf, owen_t, QuadratureRule};
use crate::params::ModelParams;
use rayon::prelude::*;

/// Scaled-lag cutoff for the per-member autocorrelation integral; the
/// integrand decays like `e^{-s}`, so the truncated tail is ~1e-9.
const S_MAX: f64 = 20.0;

/// Pair average `< erf(a + b x) erf(a + b y) >` over standard bivariate
/// normals with correlation `rho >= 0`, via Owen's T:
/// `1 - 8 T(sqrt(2) a / sqrt(1 + 2 b^2), sqrt((1 - r)/(1 + r)))` with
/// `r = 2 b^2 rho / (1 + 2 b^2)`.
pub fn erf_pair_average(shift: f64, scale: f64, rho: f64) -> f64 {
    debug_assert!((0.0..=1.0 + 1e-12).contains(&rho));
    let b2 = scale * scale;
    let r = (2.0 * b2 * rho / (1.0 + 2.0 * b2)).clamp(0.0, 1.0);
    let t_arg = std::f64::consts::SQRT_2 * shift / (1.0 + 2.0 * b2).sqrt();
    let c = ((1.0 - r) / (1.0 + r)).sqrt();
    1.0 - 8.0 * owen_t(t_arg, c)
}

/// Reference evaluation of the same pair average through the explicit
/// fast-noise quadrature: the conditional form
/// `< erf(a + b x) erf((a + rho b x) / sqrt(1 + 2 (1 - rho^2) b^2)) >_x`.
pub fn erf_pair_average_quadrature(
    shift: f64,
    scale: f64,
    rho: f64,
    x_rule: &QuadratureRule,
) -> f64 {
    let inner_denom = (1.0 + 2.0 * (1.0 - rho * rho) * scale * scale).sqrt();
    let inv_sqrt_pi = 1.0 / std::f64::consts::PI.sqrt();
    x_rule.integrate(|t| {
        let x = std::f64::consts::SQRT_2 * t;
        erf(shift + scale * x) * erf((shift + rho * scale * x) / inner_denom)
    }) * inv_sqrt_pi
}

/// Right-hand-side values of the four scalar order-parameter equations.
#[derive(Clone, Copy, Debug, PartialEq)]
pub struct RhsScalars {
    pub m: f64,
    pub q: f64,
    pub chi: f64,
    pub chat0: f64,
}

impl RhsScalars {
    pub(crate) fn as_array(&self) -> [f64; 4] {
        [self.m, self.q, self.chi, self.chat0]
    }
}

struct MemberAccum {
    m: f64,
    chi_num: f64,
    q_inf: f64,
    c_integral: f64,
}

/// Evaluate the right-hand sides at the iterate `op` for slow-factor value
/// `u0`.
///
/// Averages run over the frozen noise `z` and the mean-reversion law; each
/// member's mean is re-solved from its self-consistency equation. In the
/// gap regime the `z`-average is split at the jump (equivalently: taken
/// over `ubar` on the stable branches with the Jacobian weight, the gap
/// interval excluded), so the discontinuity never crosses a quadrature
/// panel.
pub fn rhs_order_parameters(
    op: &OrderParameters,
    grid: &ThetaGrid,
    params: &ModelParams,
    u0: f64,
) -> Result<RhsScalars> {
    let j = params.coupling.j;
    let s2 = params.sigma_i2 + j * j * op.q;
    if !(s2 > 0.0) && j != 0.0 {
        return Err(MeanfieldError::Parameter(
            "sigma_I^2 + J^2 q vanished with J > 0: the frozen-noise average is undefined"
                .into(),
        ));
    }
    let s = s2.max(0.0).sqrt();
    let h = params.coupling.j0 * op.m + params.i0 + params.sigma0 * u0;
    let noise2 = params.sigma * params.sigma + j * j * op.chat0;

    let per_kappa: Vec<Result<MemberAccum>> = grid
        .kappa_nodes
        .par_iter()
        .map(|&kappa| member_average(kappa, op, params, grid, h, s, noise2))
        .collect();

    let mut m = 0.0;
    let mut chi_num = 0.0;
    let mut q_inf = 0.0;
    let mut chat0 = 0.0;
    for (acc, &w) in per_kappa.into_iter().zip(&grid.kappa_weights) {
        let acc = acc?;
        m += w * acc.m;
        chi_num += w * acc.chi_num;
        q_inf += w * acc.q_inf;
        chat0 += w * 2.0 * acc.c_integral;
    }
    let chi = if s > 0.0 {
        chi_num / s
    } else {
        // J = 0 degenerate frozen noise: chi_num already holds the
        // derivative form (Stein's identity limit).
        chi_num
    };
    Ok(RhsScalars { m, q: q_inf, chi, chat0 })
}

/// z-average for a single mean-reversion value.
fn member_average(
    kappa: f64,
    op: &OrderParameters,
    params: &ModelParams,
    grid: &ThetaGrid,
    h: f64,
    s: f64,
    noise2: f64,
) -> Result<MemberAccum> {
    let eq = UbarEquation::new(kappa, op, params)?;
    let sigma_u = (noise2 / (2.0 * kappa)).sqrt();
    let rho_inf = if noise2 > 0.0 {
        params.coupling.j * params.coupling.j * op.chat0 / noise2
    } else {
        0.0
    };

    // Quadrature points in z, with the selected member mean at each.
    let mut pts: Vec<(f64, f64, f64)> = Vec::new(); // (z, weight, ubar)
    if s == 0.0 {
        let u = eq.select_root(h)?;
        check_branch(&eq, u)?;
        pts.push((0.0, 1.0, u));
    } else if eq.has_gap() {
        let z_jump = -h / s;
        for (z, w) in grid.split_z_points(z_jump) {
            let u = eq.select_root(h + s * z)?;
            check_branch(&eq, u)?;
            pts.push((z, w, u));
        }
    } else {
        for &(z, w) in grid.z_points() {
            let u = eq.select_root(h + s * z)?;
            check_branch(&eq, u)?;
            pts.push((z, w, u));
        }
    }

    let mut m = 0.0;
    let mut chi_num = 0.0;
    for &(z, w, u) in &pts {
        let g = eq.response(u);
        m += w * g;
        // With degenerate frozen noise (only reachable at J = 0) the
        // z-average of z * erf is identically zero.
        if s > 0.0 {
            chi_num += w * z * g;
        }
    }

    // Persistent limit and the zero-frequency integral of the excess
    // correlation, on the member's own scaled-lag grid s = kappa tau.
    let q_at = |rho: f64| -> f64 {
        pts.iter()
            .map(|&(_, w, u)| w * erf_pair_average(u, sigma_u, rho))
            .sum()
    };
    let q_inf = q_at(rho_inf);
    let n_s = grid.sizes.n_s + grid.sizes.n_s % 2; // Simpson needs even
    let hs = S_MAX / n_s as f64;
    let mut c_integral = 0.0;
    if sigma_u > 0.0 {
        let mut simpson = 0.0;
        for i in 0..=n_s {
            let sl = hs * i as f64;
            let rho = (params.sigma * params.sigma * (-sl).exp()
                + params.coupling.j * params.coupling.j * op.chat0)
                / noise2;
            let excess = q_at(rho) - q_inf;
            let coeff = if i == 0 || i == n_s {
                1.0
            } else if i % 2 == 1 {
                4.0
            } else {
                2.0
            };
            simpson += coeff * excess;
        }
        c_integral = simpson * hs / 3.0 / kappa;
    }
    Ok(MemberAccum { m, chi_num, q_inf, c_integral })
}

fn check_branch(eq: &UbarEquation, u: f64) -> Result<()> {
    // dz/d ubar must be positive on every selected branch point.
    if eq.f_prime(u) <= 0.0 {
        return Err(MeanfieldError::Internal(format!(
            "non-positive Jacobian {} at selected mean {u}",
            eq.f_prime(u)
        )));
    }
    Ok(())
}

/// The ensemble-averaged autocorrelation at explicit physical lags, for the
/// converged iterate: used to tabulate the output curve.
pub(crate) fn q_tau_curve(
    op: &OrderParameters,
    grid: &ThetaGrid,
    params: &ModelParams,
    u0: f64,
    taus: &[f64],
) -> Result<Vec<f64>> {
    let j = params.coupling.j;
    let s = (params.sigma_i2 + j * j * op.q).max(0.0).sqrt();
    let h = params.coupling.j0 * op.m + params.i0 + params.sigma0 * u0;
    let noise2 = params.sigma * params.sigma + j * j * op.chat0;

    let contributions: Vec<Result<Vec<f64>>> = grid
        .kappa_nodes
        .par_iter()
        .map(|&kappa| -> Result<Vec<f64>> {
            let eq = UbarEquation::new(kappa, op, params)?;
            let sigma_u = (noise2 / (2.0 * kappa)).sqrt();
            let mut pts: Vec<(f64, f64)> = Vec::new(); // (weight, ubar)
            if s == 0.0 {
                pts.push((1.0, eq.select_root(h)?));
            } else if eq.has_gap() {
                for (z, w) in grid.split_z_points(-h / s) {
                    pts.push((w, eq.select_root(h + s * z)?));
                }
            } else {
                for &(z, w) in grid.z_points() {
                    pts.push((w, eq.select_root(h + s * z)?));
                }
            }
            Ok(taus
                .iter()
                .map(|&tau| {
                    let rho = if noise2 > 0.0 {
                        (params.sigma * params.sigma * (-kappa * tau).exp()
                            + j * j * op.chat0)
                            / noise2
                    } else {
                        0.0
                    };
                    pts.iter()
                        .map(|&(w, u)| w * erf_pair_average(u, sigma_u, rho))
                        .sum()
                })
                .collect())
        })
        .collect();

    let mut out = vec![0.0; taus.len()];
    for (contrib, &w) in contributions.into_iter().zip(&grid.kappa_weights) {
        for (o, v) in out.iter_mut().zip(contrib?) {
            *o += w * v;
        }
    }
    Ok(out)
}
