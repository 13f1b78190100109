//! Static model parameters shared by the simulator and the analytic modules.

use crate::couplings::CouplingSpec;
use rand::Rng;
use rand_distr::Distribution;
use serde::{Deserialize, Serialize};

/// Distribution of the per-asset mean-reversion rates.
#[derive(Clone, Copy, Debug, PartialEq, Serialize, Deserialize)]
#[serde(tag = "type", rename_all = "snake_case")]
pub enum KappaDist {
    /// Gamma law with scale `kappa0` and shape `nu`; the mean is `nu * kappa0`
    /// for general shape and `kappa0` for the exponential case `nu = 1`.
    Gamma { kappa0: f64, nu: f64 },
    /// All assets share one rate.
    Fixed { kappa: f64 },
}

impl KappaDist {
    /// Scale parameter of the law (the rate itself for `Fixed`).
    pub fn kappa0(&self) -> f64 {
        match *self {
            KappaDist::Gamma { kappa0, .. } => kappa0,
            KappaDist::Fixed { kappa } => kappa,
        }
    }

    /// Lower cutoff below which draws are resampled. The raw Gamma law puts
    /// mass arbitrarily close to zero, which makes relaxation times and
    /// zero-frequency correlation integrals ill-defined; the floor
    /// regularizes both and is small enough that halving it leaves reported
    /// statistics unchanged at the percent level.
    pub fn floor(&self) -> f64 {
        match *self {
            KappaDist::Gamma { kappa0, .. } => 1e-3 * kappa0,
            KappaDist::Fixed { kappa } => kappa,
        }
    }

    pub fn validate(&self) -> Result<(), String> {
        match *self {
            KappaDist::Gamma { kappa0, nu } => {
                if !(kappa0 > 0.0) {
                    return Err(format!("kappa0 must be > 0, got {kappa0}"));
                }
                if !(nu > 0.0) {
                    return Err(format!("nu must be > 0, got {nu}"));
                }
            }
            KappaDist::Fixed { kappa } => {
                if !(kappa > 0.0) {
                    return Err(format!("fixed kappa must be > 0, got {kappa}"));
                }
            }
        }
        Ok(())
    }

    /// Draw one rate; values below the floor are resampled.
    pub fn sample<R: Rng>(&self, rng: &mut R) -> f64 {
        match *self {
            KappaDist::Fixed { kappa } => kappa,
            KappaDist::Gamma { kappa0, nu } => {
                let gamma = rand_distr::Gamma::new(nu, kappa0).expect("validated shape/scale");
                let floor = self.floor();
                loop {
                    let k = gamma.sample(rng);
                    if k >= floor {
                        return k;
                    }
                }
            }
        }
    }
}

/// All static parameters of the market model.
#[derive(Clone, Debug, PartialEq, Serialize, Deserialize)]
pub struct ModelParams {
    /// Quenched coupling ensemble.
    pub coupling: CouplingSpec,
    /// Mean of the per-asset drift field `I ~ Normal(i0, sigma_i2)`.
    pub i0: f64,
    /// Variance of the drift field.
    pub sigma_i2: f64,
    /// Fast-noise amplitude, homogeneous across assets.
    pub sigma: f64,
    /// Coupling of every asset to the slow factor.
    pub sigma0: f64,
    /// Relaxation rate of the slow Ornstein-Uhlenbeck factor.
    pub gamma: f64,
    /// Mean-reversion rate distribution.
    pub kappa: KappaDist,
}

impl ModelParams {
    pub fn validate(&self) -> Result<(), String> {
        self.coupling.validate()?;
        if !(self.sigma_i2 >= 0.0) {
            return Err(format!("sigma_i2 must be >= 0, got {}", self.sigma_i2));
        }
        if !(self.sigma >= 0.0) {
            return Err(format!("sigma must be >= 0, got {}", self.sigma));
        }
        if !(self.sigma0 >= 0.0) {
            return Err(format!("sigma0 must be >= 0, got {}", self.sigma0));
        }
        if !(self.gamma >= 0.0) {
            return Err(format!("gamma must be >= 0, got {}", self.gamma));
        }
        self.kappa.validate()
    }
}
