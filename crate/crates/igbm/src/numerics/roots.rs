//! Bracketed scalar root finding: bisection with secant acceleration.

use super::{NumericsError, Result};

/// Find a root of `f` inside `[lo, hi]`.
///
/// Requires a sign change (or a zero endpoint). Deterministic: bisection
/// with secant acceleration, final result is the bracket endpoint with the
/// smaller |f|, ties broken toward the low side. The returned bracket width
/// is below `tol`.
pub fn find_root_bracketed<F: FnMut(f64) -> f64>(
    mut f: F,
    lo: f64,
    hi: f64,
    tol: f64,
) -> Result<f64> {
    if !(tol > 0.0) {
        return Err(NumericsError::Parameter(format!("tol must be > 0, got {tol}")));
    }
    if !(lo < hi) {
        return Err(NumericsError::Parameter(format!(
            "need lo < hi, got [{lo}, {hi}]"
        )));
    }
    let mut a = lo;
    let mut b = hi;
    let mut fa = f(a);
    let mut fb = f(b);
    if fa == 0.0 {
        return Ok(a);
    }
    if fb == 0.0 {
        return Ok(b);
    }
    if fa.signum() == fb.signum() {
        return Err(NumericsError::Bracket { lo, hi, f_lo: fa, f_hi: fb });
    }

    let mut bisect_next = false;
    for _ in 0..200 {
        if b - a < tol {
            break;
        }
        let mid = a + 0.5 * (b - a);
        let mut x = mid;
        if !bisect_next {
            // Secant proposal, accepted only if it lands strictly inside.
            let sec = b - fb * (b - a) / (fb - fa);
            let margin = 0.01 * (b - a);
            if sec.is_finite() && sec > a + margin && sec < b - margin {
                x = sec;
            }
        }
        if x <= a || x >= b {
            x = mid;
        }
        let fx = f(x);
        if fx == 0.0 {
            return Ok(x);
        }
        // Alternate in secant/bisection pairs so the bracket provably shrinks.
        bisect_next = !bisect_next;
        if fx.signum() == fa.signum() {
            a = x;
            fa = fx;
        } else {
            b = x;
            fb = fx;
        }
        if a >= b {
            break;
        }
    }
    // Tie-break toward lo.
    Ok(if fa.abs() <= fb.abs() { a } else { b })
}
