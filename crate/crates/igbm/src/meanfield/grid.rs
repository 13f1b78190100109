//! Discretization of the ensemble averages: frozen-noise and fast-noise
//! Gaussians via Gauss–Hermite, the mean-reversion law via generalized
//! Gauss–Laguerre.

use super::{MeanfieldError, Result};
use crate::numerics::{gauss_generalized_laguerre, gauss_hermite, gauss_legendre, QuadratureRule};
use crate::params::KappaDist;

/// Quadrature sizes; the defaults are chosen so halving any of them moves
/// converged order parameters at or below the solver tolerance.
#[derive(Clone, Copy, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct GridSizes {
    /// Frozen-noise (z) Gauss–Hermite size.
    pub n_z: usize,
    /// Fast-noise (x) Gauss–Hermite size (reference path for the pair
    /// average).
    pub n_x: usize,
    /// Mean-reversion quadrature size.
    pub n_kappa: usize,
    /// Simpson intervals for the per-member autocorrelation integral over
    /// scaled lag `s = kappa tau` on [0, 20].
    pub n_s: usize,
    /// Points of the tabulated output autocorrelation curve.
    pub n_tau_out: usize,
}

impl Default for GridSizes {
    fn default() -> Self {
        GridSizes { n_z: 128, n_x: 64, n_kappa: 48, n_s: 96, n_tau_out: 400 }
    }
}

/// Nodes and normalized weights for averages over the mean-reversion law.
///
/// For the Gamma law these are generalized Gauss–Laguerre nodes for the
/// weight `x^(nu-1) e^{-x}` scaled by `kappa0`; nodes are clamped to the
/// distribution floor and the weights renormalized to unit mass.
pub fn kappa_quadrature(dist: &KappaDist, n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    dist.validate().map_err(MeanfieldError::Parameter)?;
    match *dist {
        KappaDist::Fixed { kappa } => Ok((vec![kappa], vec![1.0])),
        KappaDist::Gamma { kappa0, nu } => {
            let (xs, ws) = gauss_generalized_laguerre(n, nu - 1.0)?;
            let floor = dist.floor();
            let nodes: Vec<f64> = xs.iter().map(|&x| (kappa0 * x).max(floor)).collect();
            let total: f64 = ws.iter().sum();
            let weights: Vec<f64> = ws.iter().map(|&w| w / total).collect();
            Ok((nodes, weights))
        }
    }
}

/// Quadrature bundle for the ensemble (theta) averages.
#[derive(Clone, Debug)]
pub struct ThetaGrid {
    /// Frozen-noise rule (raw Gauss–Hermite; see [`ThetaGrid::z_points`]).
    pub z_rule: QuadratureRule,
    /// Fast-noise rule for the reference pair-average path.
    pub x_rule: QuadratureRule,
    pub kappa_nodes: Vec<f64>,
    pub kappa_weights: Vec<f64>,
    pub sizes: GridSizes,
    /// Standard-normal transformed z nodes/weights (weights sum to one).
    z_std: Vec<(f64, f64)>,
    /// Panel rule used for branch-split averages in the gapped regime.
    panel: (Vec<f64>, Vec<f64>),
}

impl ThetaGrid {
    pub fn new(dist: &KappaDist, sizes: GridSizes) -> Result<ThetaGrid> {
        let z_rule = gauss_hermite(sizes.n_z)?;
        let x_rule = gauss_hermite(sizes.n_x)?;
        let (kappa_nodes, kappa_weights) = kappa_quadrature(dist, sizes.n_kappa)?;
        let inv_sqrt_pi = 1.0 / std::f64::consts::PI.sqrt();
        let z_std = z_rule
            .nodes
            .iter()
            .zip(&z_rule.weights)
            .map(|(&x, &w)| (std::f64::consts::SQRT_2 * x, w * inv_sqrt_pi))
            .collect();
        let panel = gauss_legendre(16)?;
        Ok(ThetaGrid {
            z_rule,
            x_rule,
            kappa_nodes,
            kappa_weights,
            sizes,
            z_std,
            panel,
        })
    }

    /// Standard-normal nodes and weights for smooth z-averages.
    pub fn z_points(&self) -> &[(f64, f64)] {
        &self.z_std
    }

    /// Weighted points for a z-average whose integrand is smooth on each
    /// side of a jump at `z_jump` but discontinuous across it: composite
    /// Gauss–Legendre panels against the explicit normal density, split at
    /// the jump. The two sides are mirror images, so odd symmetry survives
    /// discretization exactly.
    pub fn split_z_points(&self, z_jump: f64) -> Vec<(f64, f64)> {
        const Z_MAX: f64 = 9.0;
        const OFFSETS: [f64; 8] = [0.0, 0.5, 1.5, 3.0, 5.5, 9.0, 13.5, 18.5];
        let (nodes, weights) = &self.panel;
        let mut pts = Vec::with_capacity(2 * OFFSETS.len() * nodes.len());
        let push_panel = |a: f64, b: f64, pts: &mut Vec<(f64, f64)>| {
            if b <= a {
                return;
            }
            let c = 0.5 * (a + b);
            let h = 0.5 * (b - a);
            for (&x, &w) in nodes.iter().zip(weights) {
                let z = c + h * x;
                pts.push((z, w * h * crate::numerics::normal_pdf(z)));
            }
        };
        for w in OFFSETS.windows(2) {
            // Right side of the jump, clipped to the Gaussian support.
            let a = (z_jump + w[0]).min(Z_MAX);
            let b = (z_jump + w[1]).min(Z_MAX);
            push_panel(a, b, &mut pts);
            // Mirrored left side.
            let a = (z_jump - w[1]).max(-Z_MAX);
            let b = (z_jump - w[0]).max(-Z_MAX);
            push_panel(a, b, &mut pts);
        }
        pts
    }
}
