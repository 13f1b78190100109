//! Special functions: error function, log-gamma, Owen's T and the parabolic
//! cylinder function of negative order.

use super::quadrature::{adaptive_quadrature, gauss_legendre};
use super::{NumericsError, Result};
use std::sync::OnceLock;

/// Error function. Odd, total on finite input, |result| <= 1.
#[inline]
pub fn erf(x: f64) -> f64 {
    libm::erf(x)
}

/// Complementary error function `1 - erf(x)`.
#[inline]
pub fn erfc(x: f64) -> f64 {
    libm::erfc(x)
}

/// Natural log of the gamma function for positive arguments.
#[inline]
pub fn ln_gamma(x: f64) -> f64 {
    libm::lgamma(x)
}

/// Standard normal density.
#[inline]
pub fn normal_pdf(x: f64) -> f64 {
    const INV_SQRT_2PI: f64 = 0.3989422804014327;
    INV_SQRT_2PI * (-0.5 * x * x).exp()
}

/// Standard normal CDF via erfc for accuracy in both tails.
#[inline]
pub fn normal_cdf(x: f64) -> f64 {
    0.5 * libm::erfc(-x / std::f64::consts::SQRT_2)
}

fn gl_rule(n: usize) -> &'static (Vec<f64>, Vec<f64>) {
    static GL24: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    static GL12: OnceLock<(Vec<f64>, Vec<f64>)> = OnceLock::new();
    match n {
        24 => GL24.get_or_init(|| gauss_legendre(24).unwrap()),
        _ => GL12.get_or_init(|| gauss_legendre(12).unwrap()),
    }
}

fn gl_integrate(n: usize, a: f64, b: f64, f: impl Fn(f64) -> f64) -> f64 {
    let (nodes, weights) = gl_rule(n);
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    nodes
        .iter()
        .zip(weights)
        .map(|(&x, &w)| w * f(c + h * x))
        .sum::<f64>()
        * h
}

/// Owen's T function
/// `T(h, a) = 1/(2 pi) * integral_0^a exp(-h^2 (1+x^2)/2) / (1+x^2) dx`
/// for `0 <= a <= 1` (the range needed here). Even in `h`.
pub fn owen_t(h: f64, a: f64) -> f64 {
    debug_assert!((-1e-12..=1.0 + 1e-12).contains(&a), "owen_t needs a in [0,1]");
    let a = a.clamp(0.0, 1.0);
    if a == 0.0 {
        return 0.0;
    }
    let h = h.abs();
    let h2 = h * h;
    if 0.5 * h2 > 745.0 {
        return 0.0;
    }
    if h == 0.0 {
        return a.atan() / (2.0 * std::f64::consts::PI);
    }
    let integrand = |x: f64| (-0.5 * h2 * (1.0 + x * x)).exp() / (1.0 + x * x);
    // For large h the integrand decays on the scale 1/h; split so the
    // Gauss-Legendre panel sees a resolved shape.
    let x0 = (5.0 / h.max(1.0)).min(a);
    let mut t = gl_integrate(24, 0.0, x0, integrand);
    if x0 < a {
        t += gl_integrate(12, x0, a, integrand);
    }
    t / (2.0 * std::f64::consts::PI)
}

/// Scaled parabolic cylinder function of negative order:
/// `exp(z^2/4) * D_{-a}(z) = (1/Gamma(a)) * integral_0^inf t^(a-1) exp(-z t - t^2/2) dt`
/// for `a > 0`. The scaling removes the cancellation between the
/// `exp(-z^2/4)` prefactor and the growth of the integral.
pub fn parabolic_cylinder_d_scaled(a: f64, z: f64) -> Result<f64> {
    if !(a > 0.0) || !a.is_finite() {
        return Err(NumericsError::Parameter(format!(
            "parabolic cylinder order must satisfy a > 0, got {a}"
        )));
    }
    if !z.is_finite() {
        return Err(NumericsError::Parameter("non-finite argument".into()));
    }
    // exp(z^2/2) enters for z < 0; keep it representable.
    if z < 0.0 && 0.5 * z * z > 700.0 {
        return Err(NumericsError::Numerical(format!(
            "scaled parabolic cylinder overflows for z = {z}"
        )));
    }
    let integral = if z >= 0.0 {
        pcf_integral(a, z, 0.0)?
    } else {
        // t^(a-1) exp(-z t - t^2/2) = t^(a-1) exp(-(t-|z|)^2/2) exp(z^2/2)
        (0.5 * z * z).exp() * pcf_integral(a, 0.0, -z)?
    };
    Ok(integral / libm::tgamma(a))
}

/// `integral_0^inf t^(a-1) exp(-z t - (t - m)^2/2 + m^2/2 ... )`:
/// concretely, integrand `t^(a-1) exp(-z t - (t - m)^2 / 2)` with `m >= 0`,
/// where the caller has already factored out any overall exponential scale.
fn pcf_integral(a: f64, z: f64, m: f64) -> Result<f64> {
    let expo = |t: f64| -z * t - 0.5 * (t - m) * (t - m);
    // Head [0, 1]: substitute t = s^(1/a) when a < 1 so the endpoint
    // singularity of t^(a-1) disappears; integrate directly otherwise.
    let head = if a < 1.0 {
        adaptive_quadrature(
            |s: f64| {
                let t = s.powf(1.0 / a);
                expo(t).exp() / a
            },
            0.0,
            1.0,
            1e-11,
            1e-300,
        )?
    } else {
        adaptive_quadrature(|t: f64| t.powf(a - 1.0) * expo(t).exp(), 0.0, 1.0, 1e-11, 1e-300)?
    };
    // Tail [1, hi]: pick hi where the exponent is ~ -760 relative to its
    // maximum, so the truncated mass is below f64 resolution. Both call
    // sites have z >= 0; a negative original argument is folded into m.
    let hi = (-z + (z * z + 2.0 * 760.0).sqrt()).max(2.0).max(m + 40.0);
    let tail = adaptive_quadrature(|t: f64| t.powf(a - 1.0) * expo(t).exp(), 1.0, hi, 1e-11, 1e-300)?;
    Ok(head + tail)
}

/// Parabolic cylinder function `D_p(z)` for negative order `p < 0`,
/// evaluated from its integral representation. Relative accuracy ~1e-10
/// for moderate arguments (|z| <= 30 is the supported range).
pub fn parabolic_cylinder_d(p: f64, z: f64) -> Result<f64> {
    if !(p < 0.0) {
        return Err(NumericsError::Parameter(format!(
            "only negative orders are supported, got p = {p}"
        )));
    }
    let a = -p;
    let scaled = parabolic_cylinder_d_scaled(a, z)?;
    Ok((-0.25 * z * z).exp() * scaled)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_abs_diff_eq;

    /// erf by its Taylor series, summed to machine precision. The alternating
    /// series cancels catastrophically beyond |x| ~ 2.5, so it is only an
    /// oracle on the core range.
    fn erf_taylor(x: f64) -> f64 {
        let mut term = x;
        let mut sum = x;
        let mut n = 0usize;
        while term.abs() > 1e-20 * sum.abs().max(1.0) && n < 300 {
            n += 1;
            let nf = n as f64;
            term *= -x * x / nf;
            sum += term / (2.0 * nf + 1.0);
        }
        sum * 2.0 / std::f64::consts::PI.sqrt()
    }

    /// erfc by the Legendre continued fraction (modified Lentz), accurate for
    /// x >= 2; the tail oracle complementing the Taylor series.
    fn erfc_continued_fraction(x: f64) -> f64 {
        assert!(x >= 2.0);
        let tiny = 1e-300;
        let mut f: f64 = x;
        let mut c: f64 = x;
        let mut d: f64 = 0.0;
        for n in 1..200 {
            let a = n as f64 / 2.0;
            // K = 1/(x + a1/(x + a2/(x + ...))), a_n = n/2
            d = x + a * d;
            if d.abs() < tiny {
                d = tiny;
            }
            c = x + a / c;
            if c.abs() < tiny {
                c = tiny;
            }
            d = 1.0 / d;
            let delta = c * d;
            f *= delta;
            if (delta - 1.0).abs() < 1e-17 {
                break;
            }
        }
        (-x * x).exp() / (std::f64::consts::PI.sqrt() * f)
    }

    #[test]
    fn erf_matches_taylor_series_oracle() {
        for i in 0..=50 {
            let x = -2.5 + 0.1 * i as f64;
            assert!(
                (erf(x) - erf_taylor(x)).abs() < 1e-12,
                "x={x}: {} vs {}",
                erf(x),
                erf_taylor(x)
            );
        }
        assert_abs_diff_eq!(erf(1.0), 0.8427007929497149, epsilon = 1e-14);
    }

    #[test]
    fn erf_matches_continued_fraction_oracle_in_the_tail() {
        for i in 0..=35 {
            let x = 2.5 + 0.1 * i as f64;
            let want = 1.0 - erfc_continued_fraction(x);
            assert!(
                (erf(x) - want).abs() < 1e-12,
                "x={x}: {} vs {want}",
                erf(x)
            );
            assert!((erfc(x) - erfc_continued_fraction(x)).abs() < 1e-12 * erfc(x).max(1e-300));
        }
    }

    #[test]
    fn erf_limits_and_oddness() {
        assert_eq!(erf(0.0), 0.0);
        assert!((erf(10.0) - 1.0).abs() < 1e-15);
        assert!((erf(-10.0) + 1.0).abs() < 1e-15);
    }

    #[test]
    fn owen_t_special_values() {
        // T(0, a) = atan(a) / (2 pi)
        for &a in &[0.1, 0.5, 1.0] {
            assert_abs_diff_eq!(
                owen_t(0.0, a),
                a.atan() / (2.0 * std::f64::consts::PI),
                epsilon = 1e-14
            );
        }
        // T(h, 1) = Phi(h) (1 - Phi(h)) / 2
        for &h in &[0.0, 0.3, 1.0, 2.5, -1.7, 6.0] {
            let phi = normal_cdf(h);
            assert_abs_diff_eq!(owen_t(h, 1.0), 0.5 * phi * (1.0 - phi), epsilon = 1e-13);
        }
    }

    #[test]
    fn owen_t_matches_adaptive_quadrature() {
        for &h in &[0.2, 1.0, 3.0, 8.0, -2.2] {
            for &a in &[0.05, 0.4, 0.9, 1.0] {
                let hh = f64::abs(h);
                let oracle = adaptive_quadrature(
                    |x: f64| (-0.5 * hh * hh * (1.0 + x * x)).exp() / (1.0 + x * x),
                    0.0,
                    a,
                    1e-13,
                    1e-300,
                )
                .unwrap()
                    / (2.0 * std::f64::consts::PI);
                assert!(
                    (owen_t(h, a) - oracle).abs() < 1e-13,
                    "h={h} a={a}: {} vs {oracle}",
                    owen_t(h, a)
                );
            }
        }
    }

    #[test]
    fn parabolic_cylinder_at_zero() {
        // D_{-1}(0) = integral exp(-t^2/2) = sqrt(pi/2); D_{-2}(0) = integral t exp(-t^2/2) = 1.
        let d1 = parabolic_cylinder_d(-1.0, 0.0).unwrap();
        assert_abs_diff_eq!(d1, (std::f64::consts::PI / 2.0).sqrt(), epsilon = 1e-10);
        let d2 = parabolic_cylinder_d(-2.0, 0.0).unwrap();
        assert_abs_diff_eq!(d2, 1.0, epsilon = 1e-10);
    }

    #[test]
    fn parabolic_cylinder_matches_erfc_closed_forms() {
        // D_{-1}(z) = exp(z^2/4) sqrt(pi/2) erfc(z/sqrt(2))
        // D_{-2}(z) = exp(-z^2/4) - z D_{-1}(z)
        let sqrt_pi_2 = (std::f64::consts::PI / 2.0).sqrt();
        for i in 0..=100 {
            let z = -5.0 + 0.1 * i as f64;
            let d1_want = (0.25 * z * z).exp() * sqrt_pi_2 * erfc(z / std::f64::consts::SQRT_2);
            let d1 = parabolic_cylinder_d(-1.0, z).unwrap();
            assert!(
                ((d1 - d1_want) / d1_want).abs() < 1e-8,
                "D_-1({z}): {d1} vs {d1_want}"
            );
            let d2_want = (-0.25 * z * z).exp() - z * d1_want;
            let d2 = parabolic_cylinder_d(-2.0, z).unwrap();
            assert!(
                ((d2 - d2_want) / d2_want).abs() < 1e-8,
                "D_-2({z}): {d2} vs {d2_want}"
            );
        }
        // Point value from the identity, cross-checked by a second route:
        // D_-1(1) = exp(-1/4) integral_0^inf exp(-t - t^2/2) dt
        //         = exp(1/4) sqrt(2 pi) (1 - Phi(1)) = 0.5106437...
        let d = parabolic_cylinder_d(-1.0, 1.0).unwrap();
        let want = (0.25f64).exp() * sqrt_pi_2 * erfc(1.0 / std::f64::consts::SQRT_2);
        assert_abs_diff_eq!(d, want, epsilon = 1e-10);
        let second_route = (0.25f64).exp()
            * (2.0 * std::f64::consts::PI).sqrt()
            * (1.0 - normal_cdf(1.0));
        assert_abs_diff_eq!(d, second_route, epsilon = 1e-10);
        assert_abs_diff_eq!(d, 0.5106437410796607, epsilon = 1e-9);
    }

    #[test]
    fn parabolic_cylinder_fractional_order_vs_direct_quadrature() {
        // Independent check for non-integer a at larger |z|.
        for &(a, z) in &[(0.5, 2.0), (1.5, -3.0), (2.5, 10.0), (1.5, -20.0)] {
            let scaled = parabolic_cylinder_d_scaled(a, z).unwrap();
            let oracle = adaptive_quadrature(
                |t: f64| {
                    if t <= 0.0 {
                        0.0
                    } else {
                        (((a - 1.0) * t.ln()) - z * t - 0.5 * t * t).exp()
                    }
                },
                0.0,
                z.abs() + 60.0,
                1e-12,
                1e-280,
            )
            .unwrap()
                / libm::tgamma(a);
            assert!(
                ((scaled - oracle) / oracle).abs() < 1e-8,
                "a={a} z={z}: {scaled} vs {oracle}"
            );
        }
    }

    #[test]
    fn parabolic_cylinder_rejects_nonnegative_order() {
        assert!(parabolic_cylinder_d(0.0, 1.0).is_err());
        assert!(parabolic_cylinder_d(1.0, 1.0).is_err());
    }
}
