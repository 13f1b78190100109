//! Explicit integration of the coupled log-price Langevin system together
//! with the slow Ornstein-Uhlenbeck factor.
//!
//! Per asset: `du_i = dt (-kappa_i u_i + sum_j J_ij erf(u_j) + sigma0 u0 + I_i)
//! + sigma sqrt(dt) xi_i`, and the slow factor follows
//! `du0 = -gamma u0 dt + sqrt(2 gamma dt) xi_0` (unit stationary variance).
//!
//! A single trajectory is integrated sequentially; ensembles parallelize at
//! the replica level with per-replica sub-streams. Fast and slow noise use
//! separate sub-streams so toggling recording never perturbs the path.

pub mod stats;

use crate::couplings::{CouplingMatrix, CsrView, PatternSet};
use crate::density::DensityCurve;
use crate::numerics::{erf, stream_ids, RngStream};
use crate::params::ModelParams;
use rand_chacha::ChaCha8Rng;
use rand_distr::{Distribution, StandardNormal};

#[derive(Debug, thiserror::Error)]
pub enum SimError {
    #[error("invalid parameter: {0}")]
    Parameter(String),
    #[error("stability guard violated: dt * max(kappa) = {0:.3e} >= 0.1")]
    Unstable(f64),
    #[error("non-finite state at t = {t}: first offending asset index {index}")]
    NonFinite { t: f64, index: usize },
    #[error("too few samples for statistics: {0}")]
    Statistics(String),
}

pub type Result<T> = std::result::Result<T, SimError>;

/// Instantaneous state: log-prices, slow factor and time.
#[derive(Clone, Debug)]
pub struct MarketState {
    pub u: Vec<f64>,
    pub u0: f64,
    pub t: f64,
}

/// Quenched per-asset parameters, drawn once per run.
#[derive(Clone, Debug)]
pub struct PerAsset {
    pub drift: Vec<f64>,
    pub kappa: Vec<f64>,
    max_kappa: f64,
}

impl PerAsset {
    pub fn new(drift: Vec<f64>, kappa: Vec<f64>) -> Self {
        let max_kappa = kappa.iter().cloned().fold(0.0, f64::max);
        Self { drift, kappa, max_kappa }
    }

    /// Draw drifts and mean-reversion rates from dedicated sub-streams.
    pub fn draw(params: &ModelParams, n: usize, stream: RngStream) -> Self {
        let mut kappa_rng = stream.substream(stream_ids::KAPPA).rng();
        let kappa: Vec<f64> = (0..n).map(|_| params.kappa.sample(&mut kappa_rng)).collect();
        let mut drift_rng = stream.substream(stream_ids::DRIFT).rng();
        let sd = params.sigma_i2.sqrt();
        let drift: Vec<f64> = (0..n)
            .map(|_| {
                let z: f64 = StandardNormal.sample(&mut drift_rng);
                params.i0 + sd * z
            })
            .collect();
        Self::new(drift, kappa)
    }
}

/// Integration schedule and recording layout.
#[derive(Clone, Debug, PartialEq, serde::Serialize, serde::Deserialize)]
pub struct Schedule {
    pub dt: f64,
    /// Records start once `t >= t_warmup`.
    pub t_warmup: f64,
    pub t_max: f64,
    /// Record every this many steps.
    pub record_stride: usize,
    /// Full-state snapshot every this many records (`None` = no snapshots).
    pub snapshot_stride: Option<usize>,
    /// Start the slow factor here instead of drawing from its stationary
    /// law; with `gamma = 0` this clamps `u0` for the whole run.
    pub u0_init: Option<f64>,
}

impl Schedule {
    /// Default warmup: ten relaxation times of the slowest admissible asset.
    pub fn default_warmup(params: &ModelParams) -> f64 {
        10.0 / params.kappa.floor()
    }

    pub fn validate(&self) -> Result<()> {
        if !(self.dt > 0.0) {
            return Err(SimError::Parameter(format!("dt must be > 0, got {}", self.dt)));
        }
        if !(self.t_warmup < self.t_max) {
            return Err(SimError::Parameter(format!(
                "need t_warmup < t_max, got {} >= {}",
                self.t_warmup, self.t_max
            )));
        }
        if self.record_stride == 0 {
            return Err(SimError::Parameter("record_stride must be >= 1".into()));
        }
        Ok(())
    }
}

/// Recorded output of a run. The market index is the equal-weight average of
/// the log-prices, `index(t) = (1/N) sum_i u_i(t)`.
#[derive(Clone, Debug, PartialEq)]
pub struct Trajectory {
    pub times: Vec<f64>,
    pub u0_series: Vec<f64>,
    pub index_series: Vec<f64>,
    /// Per-record overlap vectors, present when the matrix carries patterns.
    pub overlap_series: Option<Vec<Vec<f64>>>,
    /// Sparse full-state dumps `(t, u)`.
    pub snapshots: Vec<(f64, Vec<f64>)>,
    /// Time between consecutive records.
    pub record_dt: f64,
}

/// Drift of the log-price implied by a raw price drift `mu` and volatility
/// `sigma`: `I = mu - sigma^2 / 2`.
pub fn derive_drift(mu: f64, sigma: f64) -> f64 {
    mu - 0.5 * sigma * sigma
}

/// Pattern overlaps `m_mu = (1/N) sum_i xi_i^mu erf(u_i)`.
pub fn overlaps(u: &[f64], patterns: &PatternSet) -> Vec<f64> {
    assert_eq!(u.len(), patterns.n, "state/pattern dimension mismatch");
    let gs: Vec<f64> = u.iter().map(|&x| erf(x)).collect();
    (0..patterns.p)
        .map(|mu| {
            gs.iter()
                .enumerate()
                .map(|(i, &g)| patterns.get(mu, i) * g)
                .sum::<f64>()
                / patterns.n as f64
        })
        .collect()
}

/// One Euler–Maruyama step of the full system.
///
/// Asset noise comes from `fast`, the slow-factor noise from `slow`; the
/// two streams are never interleaved.
pub fn step(
    state: &mut MarketState,
    csr: &CsrView,
    params: &ModelParams,
    per_asset: &PerAsset,
    dt: f64,
    fast: &mut ChaCha8Rng,
    slow: &mut ChaCha8Rng,
) -> Result<()> {
    let n = state.u.len();
    if dt * per_asset.max_kappa >= 0.1 {
        return Err(SimError::Unstable(dt * per_asset.max_kappa));
    }
    let g: Vec<f64> = state.u.iter().map(|&x| erf(x)).collect();
    let sqrt_dt = dt.sqrt();
    let u0_cur = state.u0;
    for i in 0..n {
        let mut field = 0.0;
        for k in csr.row_ptr[i]..csr.row_ptr[i + 1] {
            field += csr.vals[k] * g[csr.cols[k] as usize];
        }
        let drift = -per_asset.kappa[i] * state.u[i]
            + field
            + params.sigma0 * u0_cur
            + per_asset.drift[i];
        let noise: f64 = StandardNormal.sample(fast);
        state.u[i] += dt * drift + params.sigma * sqrt_dt * noise;
    }
    let xi0: f64 = StandardNormal.sample(slow);
    state.u0 += -params.gamma * u0_cur * dt + (2.0 * params.gamma * dt).sqrt() * xi0;
    state.t += dt;
    for (i, &ui) in state.u.iter().enumerate() {
        if !ui.is_finite() {
            return Err(SimError::NonFinite { t: state.t, index: i });
        }
    }
    if !state.u0.is_finite() {
        return Err(SimError::NonFinite { t: state.t, index: n });
    }
    Ok(())
}

/// Integrate a full trajectory.
///
/// Initial log-prices are drawn from the zero-interaction stationary laws
/// `Normal(0, sigma^2 / (2 kappa_i))`; the slow factor starts from its unit
/// stationary law unless the schedule pins it. Per-asset parameters are
/// quenched once at the start from dedicated sub-streams.
pub fn run(
    params: &ModelParams,
    matrix: &CouplingMatrix,
    schedule: &Schedule,
    stream: RngStream,
) -> Result<Trajectory> {
    schedule.validate()?;
    params.validate().map_err(SimError::Parameter)?;
    let n = matrix.n;
    let csr = matrix.csr();
    let per_asset = PerAsset::draw(params, n, stream);

    let mut fast = stream.substream(stream_ids::FAST_NOISE).rng();
    let mut slow = stream.substream(stream_ids::SLOW_NOISE).rng();

    let u: Vec<f64> = per_asset
        .kappa
        .iter()
        .map(|&k| {
            let sd = params.sigma / (2.0 * k).sqrt();
            let z: f64 = StandardNormal.sample(&mut fast);
            sd * z
        })
        .collect();
    let u0 = schedule
        .u0_init
        .unwrap_or_else(|| StandardNormal.sample(&mut slow));
    let mut state = MarketState { u, u0, t: 0.0 };

    let n_steps = (schedule.t_max / schedule.dt).round() as usize;
    let mut traj = Trajectory {
        times: Vec::new(),
        u0_series: Vec::new(),
        index_series: Vec::new(),
        overlap_series: matrix.patterns.as_ref().map(|_| Vec::new()),
        snapshots: Vec::new(),
        record_dt: schedule.dt * schedule.record_stride as f64,
    };
    let mut records = 0usize;
    for k in 1..=n_steps {
        step(&mut state, &csr, params, &per_asset, schedule.dt, &mut fast, &mut slow)?;
        if k % schedule.record_stride == 0 && state.t >= schedule.t_warmup {
            // Reconstruct the time from the step count so the recorded grid
            // has an exactly constant stride.
            let t = schedule.dt * k as f64;
            traj.times.push(t);
            traj.u0_series.push(state.u0);
            traj.index_series
                .push(state.u.iter().sum::<f64>() / n as f64);
            if let (Some(series), Some(patterns)) =
                (traj.overlap_series.as_mut(), matrix.patterns.as_ref())
            {
                series.push(overlaps(&state.u, patterns));
            }
            if let Some(stride) = schedule.snapshot_stride {
                if stride > 0 && records % stride == 0 {
                    traj.snapshots.push((t, state.u.clone()));
                }
            }
            records += 1;
        }
    }
    Ok(traj)
}

/// Index returns at the given lag on the recorded grid:
/// `r_k = index_{k+lag} - index_k`.
pub fn index_returns(traj: &Trajectory, lag: usize) -> Result<Vec<f64>> {
    if lag == 0 || lag >= traj.index_series.len() {
        return Err(SimError::Parameter(format!(
            "lag {lag} outside 1..{}",
            traj.index_series.len()
        )));
    }
    Ok(traj
        .index_series
        .windows(lag + 1)
        .map(|w| w[lag] - w[0])
        .collect())
}

/// Normalized histogram density of raw samples.
///
/// The curve is tabulated at the bin midpoints plus the two range edges
/// (edge density continued from the boundary bins); with that layout the
/// trapezoid integral telescopes to exactly `sum_i count_i / total = 1`.
pub fn empirical_density(samples: &[f64], bins: usize) -> Result<DensityCurve> {
    if samples.len() < 1000 {
        return Err(SimError::Statistics(format!(
            "need at least 1000 samples, got {}",
            samples.len()
        )));
    }
    if bins < 1 {
        return Err(SimError::Parameter("need at least one bin".into()));
    }
    let lo = samples.iter().cloned().fold(f64::INFINITY, f64::min);
    let hi = samples.iter().cloned().fold(f64::NEG_INFINITY, f64::max);
    let width = if hi > lo {
        (hi - lo) / bins as f64
    } else {
        // Degenerate data: a single occupied bin of unit mass.
        1.0
    };
    let mut counts = vec![0usize; bins];
    for &s in samples {
        let idx = (((s - lo) / width) as usize).min(bins - 1);
        counts[idx] += 1;
    }
    let total = samples.len() as f64;
    let mut grid = Vec::with_capacity(bins + 2);
    let mut density = Vec::with_capacity(bins + 2);
    grid.push(lo);
    density.push(counts[0] as f64 / (total * width));
    for (i, &c) in counts.iter().enumerate() {
        grid.push(lo + width * (i as f64 + 0.5));
        density.push(c as f64 / (total * width));
    }
    grid.push(lo + width * bins as f64);
    density.push(counts[bins - 1] as f64 / (total * width));
    Ok(DensityCurve::new(grid, density))
}

/// Histogram density of index returns at the given lag.
pub fn index_return_density(traj: &Trajectory, lag: usize, bins: usize) -> Result<DensityCurve> {
    let returns = index_returns(traj, lag)?;
    empirical_density(&returns, bins)
}

#[cfg(test)]
mod tests;
