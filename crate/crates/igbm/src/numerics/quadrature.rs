//! Gaussian quadrature rules via Golub–Welsch (symmetric tridiagonal
//! eigenvalues + Christoffel weights) and an adaptive Gauss–Kronrod
//! integrator for one-off integrals.

use super::{NumericsError, Result};

/// Which family a [`QuadratureRule`] belongs to.
#[derive(Clone, Copy, Debug, PartialEq, Eq, serde::Serialize, serde::Deserialize)]
pub enum QuadratureKind {
    GaussHermite,
    Trapezoid,
}

/// A fixed quadrature rule: strictly increasing nodes with positive weights.
///
/// For `GaussHermite` the rule integrates against the weight `exp(-x^2)` over
/// the whole real line and is exact for polynomials of degree `<= 2n-1`.
#[derive(Clone, Debug)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    pub kind: QuadratureKind,
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// Apply the rule to `f`.
    pub fn integrate<F: FnMut(f64) -> f64>(&self, mut f: F) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&x, &w)| w * f(x))
            .sum()
    }

    /// Check the structural invariants (ordering and positivity).
    pub fn validate(&self) -> Result<()> {
        if self.nodes.len() != self.weights.len() {
            return Err(NumericsError::Numerical(
                "node/weight length mismatch".into(),
            ));
        }
        if self.nodes.windows(2).any(|p| p[0] >= p[1]) {
            return Err(NumericsError::Numerical(
                "nodes not strictly increasing".into(),
            ));
        }
        if self.weights.iter().any(|&w| !(w > 0.0)) {
            return Err(NumericsError::Numerical("non-positive weight".into()));
        }
        Ok(())
    }
}

/// Eigenvalues of a symmetric tridiagonal matrix by the implicit QL method.
///
/// `diag` has length n, `off` length n-1. Returns the eigenvalues sorted
/// ascending.
fn symtri_eigenvalues(diag: &[f64], off: &[f64]) -> Result<Vec<f64>> {
    let n = diag.len();
    let mut d = diag.to_vec();
    let mut e = off.to_vec();
    e.push(0.0);

    for l in 0..n {
        let mut iter = 0;
        loop {
            // Find a negligible off-diagonal element.
            let mut m = l;
            while m < n - 1 {
                let dd = d[m].abs() + d[m + 1].abs();
                if e[m].abs() <= f64::EPSILON * dd {
                    break;
                }
                m += 1;
            }
            if m == l {
                break;
            }
            iter += 1;
            if iter > 50 {
                return Err(NumericsError::Numerical(
                    "tridiagonal QL failed to converge".into(),
                ));
            }
            // Implicit shift from the 2x2 trailing block.
            let mut g = (d[l + 1] - d[l]) / (2.0 * e[l]);
            let mut r = g.hypot(1.0);
            g = d[m] - d[l] + e[l] / (g + r.copysign(g));
            let (mut s, mut c) = (1.0f64, 1.0f64);
            let mut p = 0.0f64;
            for i in (l..m).rev() {
                let f = s * e[i];
                let b = c * e[i];
                r = f.hypot(g);
                e[i + 1] = r;
                if r == 0.0 {
                    d[i + 1] -= p;
                    e[m] = 0.0;
                    break;
                }
                s = f / r;
                c = g / r;
                g = d[i + 1] - p;
                r = (d[i] - g) * s + 2.0 * c * b;
                p = s * r;
                d[i + 1] = g + p;
                g = c * r - b;
                if i == l {
                    d[l] -= p;
                    e[l] = g;
                    e[m] = 0.0;
                }
            }
        }
    }
    d.sort_by(|a, b| a.partial_cmp(b).unwrap());
    Ok(d)
}

/// Golub–Welsch: nodes are the Jacobi-matrix eigenvalues; each weight is the
/// Christoffel number `1 / sum_k p_k(x)^2` over the orthonormal polynomials.
struct Jacobi {
    /// Recurrence diagonal a_k, k = 0..n-1.
    a: Vec<f64>,
    /// Recurrence off-diagonal b_k, k = 1..n-1 (b[0] unused, kept 0).
    b: Vec<f64>,
    /// Zeroth moment of the weight function.
    mu0: f64,
}

impl Jacobi {
    fn nodes_weights(&self) -> Result<(Vec<f64>, Vec<f64>)> {
        let n = self.a.len();
        let nodes = symtri_eigenvalues(&self.a, &self.b[1..])?;
        let weights = nodes
            .iter()
            .map(|&x| {
                // Orthonormal recurrence: b_{k+1} p_{k+1} = (x - a_k) p_k - b_k p_{k-1}.
                let mut sum = 0.0;
                let mut p_prev = 0.0;
                let mut p = 1.0 / self.mu0.sqrt();
                sum += p * p;
                for k in 0..n - 1 {
                    let p_next = ((x - self.a[k]) * p - if k > 0 { self.b[k] } else { 0.0 } * p_prev)
                        / self.b[k + 1];
                    p_prev = p;
                    p = p_next;
                    sum += p * p;
                }
                let w = 1.0 / sum;
                // Extreme Hermite weights fall below the f64 range for large
                // rules (e.g. exp(-x^2) ~ 1e-440 at n = 512); clamp them to
                // the smallest positive value rather than zero.
                if w > 0.0 {
                    w
                } else {
                    f64::from_bits(1)
                }
            })
            .collect();
        Ok((nodes, weights))
    }
}

const MAX_GAUSS_NODES: usize = 512;

fn check_n(n: usize) -> Result<()> {
    if n == 0 || n > MAX_GAUSS_NODES {
        return Err(NumericsError::Parameter(format!(
            "rule size {n} outside 1..={MAX_GAUSS_NODES}"
        )));
    }
    Ok(())
}

/// Gauss–Hermite rule for the weight `exp(-x^2)` on the real line.
///
/// Exact for polynomials of degree `<= 2n-1`; the weights sum to `sqrt(pi)`.
pub fn gauss_hermite(n: usize) -> Result<QuadratureRule> {
    check_n(n)?;
    let jac = Jacobi {
        a: vec![0.0; n],
        b: (0..n).map(|k| (k as f64 / 2.0).sqrt()).collect(),
        mu0: std::f64::consts::PI.sqrt(),
    };
    let (mut nodes, mut weights) = jac.nodes_weights()?;
    symmetrize(&mut nodes, &mut weights);
    let rule = QuadratureRule {
        nodes,
        weights,
        kind: QuadratureKind::GaussHermite,
    };
    rule.validate()?;
    Ok(rule)
}

/// Gauss–Legendre rule on [-1, 1] (unit weight).
pub fn gauss_legendre(n: usize) -> Result<(Vec<f64>, Vec<f64>)> {
    check_n(n)?;
    let jac = Jacobi {
        a: vec![0.0; n],
        b: (0..n)
            .map(|k| {
                let k = k as f64;
                if k == 0.0 {
                    0.0
                } else {
                    k / (4.0 * k * k - 1.0).sqrt()
                }
            })
            .collect(),
        mu0: 2.0,
    };
    let (mut nodes, mut weights) = jac.nodes_weights()?;
    symmetrize(&mut nodes, &mut weights);
    Ok((nodes, weights))
}

/// Generalized Gauss–Laguerre rule for the weight `x^alpha exp(-x)` on
/// `[0, inf)`; requires `alpha > -1`. Weights sum to `Gamma(alpha + 1)`.
pub fn gauss_generalized_laguerre(n: usize, alpha: f64) -> Result<(Vec<f64>, Vec<f64>)> {
    check_n(n)?;
    if !(alpha > -1.0) {
        return Err(NumericsError::Parameter(format!(
            "Laguerre alpha must be > -1, got {alpha}"
        )));
    }
    let jac = Jacobi {
        a: (0..n).map(|k| 2.0 * k as f64 + alpha + 1.0).collect(),
        b: (0..n)
            .map(|k| {
                let k = k as f64;
                (k * (k + alpha)).max(0.0).sqrt()
            })
            .collect(),
        mu0: libm::tgamma(alpha + 1.0),
    };
    jac.nodes_weights()
}

/// Enforce the exact +/- symmetry of rules with even weight functions.
fn symmetrize(nodes: &mut [f64], weights: &mut [f64]) {
    let n = nodes.len();
    for i in 0..n / 2 {
        let j = n - 1 - i;
        let x = 0.5 * (nodes[j] - nodes[i]);
        nodes[i] = -x;
        nodes[j] = x;
        let w = 0.5 * (weights[i] + weights[j]);
        weights[i] = w;
        weights[j] = w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.0;
    }
}

/// Composite trapezoid rule on [a, b] with `n >= 2` nodes.
pub fn trapezoid_rule(a: f64, b: f64, n: usize) -> Result<QuadratureRule> {
    if n < 2 || !(b > a) {
        return Err(NumericsError::Parameter(format!(
            "trapezoid rule needs n >= 2 and b > a (got n={n}, a={a}, b={b})"
        )));
    }
    let h = (b - a) / (n - 1) as f64;
    let nodes: Vec<f64> = (0..n).map(|i| a + h * i as f64).collect();
    let weights: Vec<f64> = (0..n)
        .map(|i| if i == 0 || i == n - 1 { 0.5 * h } else { h })
        .collect();
    Ok(QuadratureRule {
        nodes,
        weights,
        kind: QuadratureKind::Trapezoid,
    })
}

// Gauss(7)/Kronrod(15) node and weight constants on [-1, 1].
const GK_NODES: [f64; 8] = [
    0.0,
    0.207784955007898467600689403773245,
    0.405845151377397166906606412076961,
    0.586087235467691130294144838258730,
    0.741531185599394439863864773280788,
    0.864864423359769072789712788640926,
    0.949107912342758524526189684047851,
    0.991455371120812639206854697526329,
];
const GK_WK: [f64; 8] = [
    0.209482141084727828012999174891714,
    0.204432940075298892414161999234649,
    0.190350578064785409913256402421014,
    0.169004726639267902826583426598550,
    0.140653259715525918745189590510238,
    0.104790010322250183839876322541518,
    0.063092092629978553290700663189204,
    0.022935322010529224963732008058970,
];
const GK_WG: [f64; 4] = [
    0.417959183673469387755102040816327,
    0.381830050505118944950369775488975,
    0.279705391489276667901467771423780,
    0.129484966168869693270611432679082,
];

fn gk15<F: FnMut(f64) -> f64>(f: &mut F, a: f64, b: f64) -> (f64, f64) {
    let c = 0.5 * (a + b);
    let h = 0.5 * (b - a);
    let fc = f(c);
    let mut kronrod = GK_WK[0] * fc;
    let mut gauss = GK_WG[0] * fc;
    for i in 1..8 {
        let dx = h * GK_NODES[i];
        let fsum = f(c - dx) + f(c + dx);
        kronrod += GK_WK[i] * fsum;
        if i % 2 == 0 {
            gauss += GK_WG[i / 2] * fsum;
        }
    }
    (kronrod * h, ((kronrod - gauss) * h).abs())
}

/// Adaptive Gauss–Kronrod integration of `f` over [a, b].
///
/// Splits intervals until the local error estimate satisfies
/// `err <= max(abs_tol, rel_tol * |integral|)` scaled by interval share.
pub fn adaptive_quadrature<F: FnMut(f64) -> f64>(
    mut f: F,
    a: f64,
    b: f64,
    rel_tol: f64,
    abs_tol: f64,
) -> Result<f64> {
    if !(a.is_finite() && b.is_finite()) {
        return Err(NumericsError::Parameter("non-finite integration bounds".into()));
    }
    if a == b {
        return Ok(0.0);
    }

    struct Seg {
        a: f64,
        b: f64,
        value: f64,
        err: f64,
    }
    let (value, err) = gk15(&mut f, a, b);
    let mut segs = vec![Seg { a, b, value, err }];
    let mut total: f64 = value;
    let mut total_err: f64 = err;
    const MAX_SEGS: usize = 4096;

    while total_err > abs_tol.max(rel_tol * total.abs()) {
        if segs.len() >= MAX_SEGS {
            return Err(NumericsError::Numerical(format!(
                "adaptive quadrature did not converge on [{a:e}, {b:e}]: \
                 {} segments, value {total:e}, error {total_err:e}",
                segs.len()
            )));
        }
        // Split the segment with the largest error.
        let (idx, _) = segs
            .iter()
            .enumerate()
            .max_by(|x, y| x.1.err.partial_cmp(&y.1.err).unwrap())
            .unwrap();
        let seg = segs.swap_remove(idx);
        total -= seg.value;
        total_err -= seg.err;
        let m = 0.5 * (seg.a + seg.b);
        if m == seg.a || m == seg.b {
            return Err(NumericsError::Numerical(
                "adaptive quadrature interval underflow".into(),
            ));
        }
        for (lo, hi) in [(seg.a, m), (m, seg.b)] {
            let (v, e) = gk15(&mut f, lo, hi);
            total += v;
            total_err += e;
            segs.push(Seg { a: lo, b: hi, value: v, err: e });
        }
    }
    Ok(total)
}
