//! Summary statistics for recorded trajectories: kurtosis, autocorrelation
//! and windowed volatility diagnostics.

/// Excess kurtosis; `None` when the variance is numerically zero.
pub fn excess_kurtosis(xs: &[f64]) -> Option<f64> {
    if xs.len() < 4 {
        return None;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let m2 = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    let m4 = xs.iter().map(|x| (x - mean).powi(4)).sum::<f64>() / n;
    if m2 <= 1e-300 {
        return None;
    }
    Some(m4 / (m2 * m2) - 3.0)
}

/// Sample autocorrelation at the given lag; `None` on zero variance.
pub fn autocorrelation(xs: &[f64], lag: usize) -> Option<f64> {
    if lag == 0 || lag >= xs.len() {
        return None;
    }
    let n = xs.len() as f64;
    let mean = xs.iter().sum::<f64>() / n;
    let var = xs.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n;
    if var <= 1e-300 {
        return None;
    }
    let cov = xs
        .windows(lag + 1)
        .map(|w| (w[0] - mean) * (w[lag] - mean))
        .sum::<f64>()
        / n;
    Some(cov / var)
}

/// Pearson correlation of two equal-length series.
pub fn pearson(a: &[f64], b: &[f64]) -> Option<f64> {
    if a.len() != b.len() || a.len() < 2 {
        return None;
    }
    let n = a.len() as f64;
    let ma = a.iter().sum::<f64>() / n;
    let mb = b.iter().sum::<f64>() / n;
    let mut sab = 0.0;
    let mut saa = 0.0;
    let mut sbb = 0.0;
    for (x, y) in a.iter().zip(b) {
        sab += (x - ma) * (y - mb);
        saa += (x - ma) * (x - ma);
        sbb += (y - mb) * (y - mb);
    }
    if saa <= 1e-300 || sbb <= 1e-300 {
        return None;
    }
    Some(sab / (saa * sbb).sqrt())
}

/// Standard deviation of `xs` over non-overlapping windows.
pub fn windowed_std(xs: &[f64], window: usize) -> Vec<f64> {
    assert!(window >= 2);
    xs.chunks_exact(window)
        .map(|w| {
            let n = w.len() as f64;
            let mean = w.iter().sum::<f64>() / n;
            (w.iter().map(|x| (x - mean).powi(2)).sum::<f64>() / n).sqrt()
        })
        .collect()
}

/// Mean absolute first difference of `xs` over non-overlapping windows,
/// a discrete `|d xs / dt|` proxy up to the constant record step.
pub fn windowed_mean_abs_diff(xs: &[f64], window: usize) -> Vec<f64> {
    assert!(window >= 2);
    xs.chunks_exact(window)
        .map(|w| {
            w.windows(2).map(|p| (p[1] - p[0]).abs()).sum::<f64>() / (w.len() - 1) as f64
        })
        .collect()
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn kurtosis_of_gaussian_sample_is_small() {
        use rand_distr::{Distribution, StandardNormal};
        let mut rng = crate::numerics::RngStream::new(5, 1).rng();
        let xs: Vec<f64> = (0..100_000)
            .map(|_| StandardNormal.sample(&mut rng))
            .collect();
        let k = excess_kurtosis(&xs).unwrap();
        assert!(k.abs() < 0.1, "excess kurtosis {k}");
    }

    #[test]
    fn kurtosis_undefined_for_constant_series() {
        assert_eq!(excess_kurtosis(&[2.0; 64]), None);
    }

    #[test]
    fn autocorrelation_of_alternating_series_is_negative() {
        let xs: Vec<f64> = (0..1000).map(|i| if i % 2 == 0 { 1.0 } else { -1.0 }).collect();
        let r = autocorrelation(&xs, 1).unwrap();
        assert!(r < -0.99);
        let r2 = autocorrelation(&xs, 2).unwrap();
        assert!(r2 > 0.99);
    }

    #[test]
    fn pearson_detects_linear_relation() {
        let a: Vec<f64> = (0..100).map(|i| i as f64).collect();
        let b: Vec<f64> = a.iter().map(|x| 3.0 * x - 7.0).collect();
        assert!((pearson(&a, &b).unwrap() - 1.0).abs() < 1e-12);
        let c: Vec<f64> = a.iter().map(|x| -x).collect();
        assert!((pearson(&a, &c).unwrap() + 1.0).abs() < 1e-12);
    }

    #[test]
    fn windowed_stats_have_expected_shape() {
        let xs = vec![1.0, 1.0, 2.0, 2.0, 3.0, 3.0, 4.0, 4.0];
        let stds = windowed_std(&xs, 4);
        assert_eq!(stds.len(), 2);
        let diffs = windowed_mean_abs_diff(&xs, 4);
        assert_eq!(diffs.len(), 2);
        assert!(diffs.iter().all(|&d| d > 0.0));
    }
}
