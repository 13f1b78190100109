//! Phase-structure scans: sweep a coupling-bias or mean-reversion axis in
//! the zero-field symmetric setting and locate the ferromagnetic onset.

use super::grid::{GridSizes, ThetaGrid};
use super::solver::{iterate_scalars, noninteracting_init, FixedPointCtrl};
use super::{MeanfieldError, Result};
use crate::params::{KappaDist, ModelParams};
use rayon::prelude::*;

/// Which parameter the scan varies.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
#[serde(rename_all = "snake_case")]
pub enum ScanAxis {
    J0,
    Kappa0,
}

/// One scan point. `m`, `q`, `chi` are NaN when the solve did not converge
/// (the point is recorded as missing and the scan continues).
#[derive(Clone, Copy, Debug)]
pub struct PhasePoint {
    pub axis_value: f64,
    pub m: f64,
    pub q: f64,
    pub chi: f64,
    pub converged: bool,
}

/// Scan result: the sampled points and, if the ordering detector found a
/// crossing, the bisected boundary value of the axis.
#[derive(Clone, Debug)]
pub struct PhaseScan {
    pub axis: ScanAxis,
    pub points: Vec<PhasePoint>,
    pub boundary: Option<f64>,
}

fn params_at(template: &ModelParams, axis: ScanAxis, value: f64) -> ModelParams {
    let mut p = template.clone();
    match axis {
        ScanAxis::J0 => p.coupling.j0 = value,
        ScanAxis::Kappa0 => match p.kappa {
            KappaDist::Gamma { nu, .. } => p.kappa = KappaDist::Gamma { kappa0: value, nu },
            KappaDist::Fixed { .. } => p.kappa = KappaDist::Fixed { kappa: value },
        },
    }
    p
}

/// Solve one zero-field point from a symmetry-broken start (`m = 0.1`).
/// Near the onset the iteration slows critically; the detector classifies
/// by where the iterate settled, converged or not, while the recorded
/// point marks non-convergence with NaN values.
fn classify(
    template: &ModelParams,
    axis: ScanAxis,
    value: f64,
    sizes: GridSizes,
    ctrl: &FixedPointCtrl,
) -> Result<(PhasePoint, f64)> {
    let params = params_at(template, axis, value);
    let grid = ThetaGrid::new(&params.kappa, sizes)?;
    let mut init = noninteracting_init(&params, 0.0, &grid)?;
    init.m = 0.1;
    let ctrl = FixedPointCtrl { init: Some(init), ..ctrl.clone() };
    let out = iterate_scalars(&params, 0.0, &grid, &ctrl)?;
    let detector = out.state.m.abs();
    let point = if out.converged {
        PhasePoint {
            axis_value: value,
            m: out.state.m,
            q: out.state.q,
            chi: out.state.chi,
            converged: true,
        }
    } else {
        PhasePoint {
            axis_value: value,
            m: f64::NAN,
            q: f64::NAN,
            chi: f64::NAN,
            converged: false,
        }
    };
    Ok((point, detector))
}

fn detector_m(
    template: &ModelParams,
    axis: ScanAxis,
    value: f64,
    sizes: GridSizes,
    ctrl: &FixedPointCtrl,
) -> Result<f64> {
    classify(template, axis, value, sizes, ctrl).map(|(_, d)| d)
}

/// Scan the axis over `range` with `resolution` evenly spaced points,
/// solving each from a small symmetry-broken start, and bisect the axis
/// value where the settled magnetization crosses `detection_threshold`.
///
/// The scan is defined in the zero-field symmetric setting: `i0` must be
/// zero and the solve runs at `u0 = 0`.
pub fn phase_scan(
    template: &ModelParams,
    axis: ScanAxis,
    range: (f64, f64),
    resolution: usize,
    detection_threshold: f64,
    sizes: GridSizes,
    ctrl: &FixedPointCtrl,
) -> Result<PhaseScan> {
    if template.i0 != 0.0 {
        return Err(MeanfieldError::Parameter(
            "phase scans are defined for i0 = 0 (zero-field setting)".into(),
        ));
    }
    if resolution < 2 || !(range.1 > range.0) {
        return Err(MeanfieldError::Parameter(
            "need resolution >= 2 and an increasing axis range".into(),
        ));
    }
    let values: Vec<f64> = (0..resolution)
        .map(|i| range.0 + (range.1 - range.0) * i as f64 / (resolution - 1) as f64)
        .collect();
    let classified: Vec<(PhasePoint, f64)> = values
        .par_iter()
        .map(|&v| classify(template, axis, v, sizes, ctrl))
        .collect::<Result<_>>()?;
    let (points, det): (Vec<PhasePoint>, Vec<f64>) = classified.into_iter().unzip();

    let mut boundary = None;
    for i in 1..points.len() {
        let lo_ord = det[i - 1] > detection_threshold;
        let hi_ord = det[i] > detection_threshold;
        if lo_ord != hi_ord {
            boundary = Some(bisect_boundary(
                template,
                axis,
                (values[i - 1], values[i]),
                lo_ord,
                detection_threshold,
                sizes,
                ctrl,
            )?);
            break;
        }
    }
    Ok(PhaseScan { axis, points, boundary })
}

fn bisect_boundary(
    template: &ModelParams,
    axis: ScanAxis,
    mut bracket: (f64, f64),
    lo_ordered: bool,
    threshold: f64,
    sizes: GridSizes,
    ctrl: &FixedPointCtrl,
) -> Result<f64> {
    let tol = 5e-3 * (bracket.1 - bracket.0).max(1e-6);
    while bracket.1 - bracket.0 > tol {
        let mid = 0.5 * (bracket.0 + bracket.1);
        let ordered = detector_m(template, axis, mid, sizes, ctrl)? > threshold;
        if ordered == lo_ordered {
            bracket.0 = mid;
        } else {
            bracket.1 = mid;
        }
    }
    Ok(0.5 * (bracket.0 + bracket.1))
}

/// The ferromagnetic onset `J0^c` as a function of the mean-reversion scale:
/// for each `kappa0`, bisect `J0` over `j0_range`. Entries are `None` when
/// both ends of the range classify identically.
pub fn phase_boundary_curve(
    template: &ModelParams,
    kappa0_values: &[f64],
    j0_range: (f64, f64),
    detection_threshold: f64,
    sizes: GridSizes,
    ctrl: &FixedPointCtrl,
) -> Result<Vec<(f64, Option<f64>)>> {
    if template.i0 != 0.0 {
        return Err(MeanfieldError::Parameter(
            "phase scans are defined for i0 = 0 (zero-field setting)".into(),
        ));
    }
    kappa0_values
        .par_iter()
        .map(|&k0| {
            let tpl = params_at(template, ScanAxis::Kappa0, k0);
            let lo = detector_m(&tpl, ScanAxis::J0, j0_range.0, sizes, ctrl)? > detection_threshold;
            let hi = detector_m(&tpl, ScanAxis::J0, j0_range.1, sizes, ctrl)? > detection_threshold;
            if lo == hi {
                return Ok((k0, None));
            }
            let b = bisect_boundary(
                &tpl,
                ScanAxis::J0,
                j0_range,
                lo,
                detection_threshold,
                sizes,
                ctrl,
            )?;
            Ok((k0, Some(b)))
        })
        .collect()
}
