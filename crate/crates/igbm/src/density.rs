//! Tabulated probability densities on one-dimensional grids.

/// A probability density tabulated on a strictly increasing grid.
#[derive(Clone, Debug, PartialEq)]
pub struct DensityCurve {
    pub grid: Vec<f64>,
    pub density: Vec<f64>,
}

impl DensityCurve {
    pub fn new(grid: Vec<f64>, density: Vec<f64>) -> Self {
        debug_assert_eq!(grid.len(), density.len());
        Self { grid, density }
    }

    pub fn len(&self) -> usize {
        self.grid.len()
    }

    pub fn is_empty(&self) -> bool {
        self.grid.is_empty()
    }

    /// Trapezoid integral over the tabulated support.
    pub fn integral(&self) -> f64 {
        self.moment(0)
    }

    /// Trapezoid integral of `x^k * density`.
    pub fn moment(&self, k: i32) -> f64 {
        let mut acc = 0.0;
        for i in 1..self.grid.len() {
            let h = self.grid[i] - self.grid[i - 1];
            let f0 = self.grid[i - 1].powi(k) * self.density[i - 1];
            let f1 = self.grid[i].powi(k) * self.density[i];
            acc += 0.5 * h * (f0 + f1);
        }
        acc
    }

    /// Central variance of the tabulated density.
    pub fn variance(&self) -> f64 {
        let mass = self.integral();
        let mean = self.moment(1) / mass;
        self.moment(2) / mass - mean * mean
    }

    /// Skewness of the tabulated density.
    pub fn skewness(&self) -> f64 {
        let mass = self.integral();
        let mean = self.moment(1) / mass;
        let var = self.moment(2) / mass - mean * mean;
        let m3 = self.moment(3) / mass - 3.0 * mean * var - mean.powi(3);
        m3 / var.powf(1.5)
    }

    /// Rescale so the trapezoid integral is exactly one; returns the factor
    /// the raw mass was divided by.
    pub fn normalize(&mut self) -> f64 {
        let mass = self.integral();
        if mass > 0.0 {
            for d in &mut self.density {
                *d /= mass;
            }
        }
        mass
    }

    /// Structural and normalization invariants: increasing grid, nonnegative
    /// density, unit mass within `(lo, hi)` bounds.
    pub fn validate(&self, mass_lo: f64, mass_hi: f64) -> Result<(), String> {
        if self.grid.len() != self.density.len() || self.grid.len() < 2 {
            return Err("grid/density size mismatch or too short".into());
        }
        if self.grid.windows(2).any(|p| p[0] >= p[1]) {
            return Err("grid not strictly increasing".into());
        }
        if self.density.iter().any(|&d| !(d >= 0.0)) {
            return Err("negative or NaN density".into());
        }
        let mass = self.integral();
        if !(mass >= mass_lo && mass <= mass_hi) {
            return Err(format!("mass {mass} outside [{mass_lo}, {mass_hi}]"));
        }
        Ok(())
    }

    /// Largest pointwise |self - other| over the shared grid (grids must match).
    pub fn sup_distance(&self, other: &DensityCurve) -> f64 {
        assert_eq!(self.grid.len(), other.grid.len());
        self.density
            .iter()
            .zip(&other.density)
            .map(|(a, b)| (a - b).abs())
            .fold(0.0, f64::max)
    }
}

/// Least-squares slope of `ln y` against `ln x` over the points with
/// `x in [lo, hi]` and `y > 0`. Used for tail-exponent estimates.
pub fn log_log_slope(xs: &[f64], ys: &[f64], lo: f64, hi: f64) -> Option<f64> {
    let pts: Vec<(f64, f64)> = xs
        .iter()
        .zip(ys)
        .filter(|(&x, &y)| x >= lo && x <= hi && x > 0.0 && y > 0.0)
        .map(|(&x, &y)| (x.ln(), y.ln()))
        .collect();
    if pts.len() < 3 {
        return None;
    }
    let n = pts.len() as f64;
    let sx: f64 = pts.iter().map(|p| p.0).sum();
    let sy: f64 = pts.iter().map(|p| p.1).sum();
    let sxx: f64 = pts.iter().map(|p| p.0 * p.0).sum();
    let sxy: f64 = pts.iter().map(|p| p.0 * p.1).sum();
    let denom = n * sxx - sx * sx;
    if denom.abs() < 1e-300 {
        return None;
    }
    Some((n * sxy - sx * sy) / denom)
}

/// Uniform grid of `n` points covering [lo, hi].
pub fn uniform_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && hi > lo);
    let h = (hi - lo) / (n - 1) as f64;
    (0..n).map(|i| lo + h * i as f64).collect()
}

/// Logarithmically spaced grid of `n` points covering [lo, hi], lo > 0.
pub fn log_grid(lo: f64, hi: f64, n: usize) -> Vec<f64> {
    assert!(n >= 2 && hi > lo && lo > 0.0);
    let l0 = lo.ln();
    let h = (hi.ln() - l0) / (n - 1) as f64;
    (0..n).map(|i| (l0 + h * i as f64).exp()).collect()
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::numerics::normal_pdf;

    #[test]
    fn moments_of_tabulated_normal() {
        let grid = uniform_grid(-8.0, 8.0, 2001);
        let density: Vec<f64> = grid.iter().map(|&x| normal_pdf(x)).collect();
        let curve = DensityCurve::new(grid, density);
        assert!((curve.integral() - 1.0).abs() < 1e-9);
        assert!((curve.variance() - 1.0).abs() < 1e-6);
        assert!(curve.skewness().abs() < 1e-9);
        curve.validate(0.99, 1.001).unwrap();
    }

    #[test]
    fn log_log_slope_recovers_power_law() {
        let xs = log_grid(1.0, 1e3, 200);
        let ys: Vec<f64> = xs.iter().map(|&x| 2.5 * x.powf(-3.0)).collect();
        let slope = log_log_slope(&xs, &ys, 10.0, 500.0).unwrap();
        assert!((slope + 3.0).abs() < 1e-10);
    }

    #[test]
    fn normalize_reports_raw_mass() {
        let grid = uniform_grid(0.0, 1.0, 11);
        let density = vec![2.0; 11];
        let mut curve = DensityCurve::new(grid, density);
        let mass = curve.normalize();
        assert!((mass - 2.0).abs() < 1e-12);
        assert!((curve.integral() - 1.0).abs() < 1e-12);
    }
}
