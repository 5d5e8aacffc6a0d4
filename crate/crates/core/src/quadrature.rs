//! Gauss rules on `[0, 1]` and product-integration weights for weakly
//! singular Volterra kernels.

use std::collections::HashMap;
use std::f64::consts::PI;
use std::sync::{Arc, Mutex, OnceLock};

use nalgebra::{DMatrix, SymmetricEigen};

use crate::error::{Error, Result};
use crate::specfun::{gamma_real, ln_gamma};

pub const MAX_ORDER: usize = 256;

/// Nodes and weights on `(0, 1)` for the weight `(1-u)^a u^b`.
#[derive(Debug, Clone, PartialEq)]
pub struct QuadratureRule {
    pub nodes: Vec<f64>,
    pub weights: Vec<f64>,
    /// `(a, b)` of the weight `(1-u)^a u^b`.
    pub weight_exponents: (f64, f64),
}

impl QuadratureRule {
    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    /// `∫_0^1 (1-u)^a u^b f(u) du`.
    pub fn integrate(&self, f: impl Fn(f64) -> f64) -> f64 {
        self.nodes
            .iter()
            .zip(&self.weights)
            .map(|(&u, &w)| w * f(u))
            .sum()
    }

    /// `∫_lo^hi (hi-s)^a (s-lo)^b f(s) ds`.
    pub fn integrate_on(&self, lo: f64, hi: f64, f: impl Fn(f64) -> f64) -> f64 {
        let h = hi - lo;
        if h == 0.0 {
            return 0.0;
        }
        let (a, b) = self.weight_exponents;
        let scale = if a == 0.0 && b == 0.0 {
            h
        } else {
            h.powf(a + b + 1.0)
        };
        scale * self.integrate(|u| f(lo + h * u))
    }
}

fn check_order(n: usize) -> Result<()> {
    if n == 0 || n > MAX_ORDER {
        return Err(Error::InvalidArgument(format!(
            "quadrature order must be in 1..={MAX_ORDER}, got {n}"
        )));
    }
    Ok(())
}

/// `n`-point Gauss-Legendre rule on `[0, 1]`, by Newton iteration on the
/// three-term recurrence.
pub fn gauss_legendre(n: usize) -> Result<QuadratureRule> {
    check_order(n)?;
    let mut nodes = vec![0.0; n];
    let mut weights = vec![0.0; n];
    let nf = n as f64;
    for i in 0..n.div_ceil(2) {
        // Tricomi's initial guess for the i-th largest root on [-1, 1]
        let theta = PI * (i as f64 + 0.75) / (nf + 0.5);
        let mut x = (1.0 - (nf - 1.0) / (8.0 * nf * nf * nf)) * theta.cos();
        let mut dp = 0.0;
        for _ in 0..100 {
            let (p, d) = legendre_with_derivative(n, x);
            dp = d;
            let dx = p / d;
            x -= dx;
            if dx.abs() < 1e-16 {
                break;
            }
        }
        let (_, d) = legendre_with_derivative(n, x);
        dp = if d != 0.0 { d } else { dp };
        let w = 2.0 / ((1.0 - x * x) * dp * dp);
        // map [-1, 1] -> [0, 1]
        nodes[n - 1 - i] = 0.5 * (1.0 + x);
        nodes[i] = 0.5 * (1.0 - x);
        weights[n - 1 - i] = 0.5 * w;
        weights[i] = 0.5 * w;
    }
    if n % 2 == 1 {
        nodes[n / 2] = 0.5;
    }
    Ok(QuadratureRule {
        nodes,
        weights,
        weight_exponents: (0.0, 0.0),
    })
}

fn legendre_with_derivative(n: usize, x: f64) -> (f64, f64) {
    let mut p0 = 1.0;
    let mut p1 = x;
    for k in 2..=n {
        let kf = k as f64;
        let p2 = ((2.0 * kf - 1.0) * x * p1 - (kf - 1.0) * p0) / kf;
        p0 = p1;
        p1 = p2;
    }
    if n == 0 {
        return (1.0, 0.0);
    }
    let d = n as f64 * (x * p1 - p0) / (x * x - 1.0);
    (p1, d)
}

/// `n`-point Gauss-Jacobi rule on `[0, 1]` for the weight `(1-u)^a u^b`,
/// by eigen-decomposition of the Jacobi matrix (Golub-Welsch).
pub fn gauss_jacobi(n: usize, a: f64, b: f64) -> Result<QuadratureRule> {
    check_order(n)?;
    if !(a > -1.0) || !(b > -1.0) || !a.is_finite() || !b.is_finite() {
        return Err(Error::InvalidArgument(format!(
            "Jacobi exponents must exceed -1 (got a = {a}, b = {b})"
        )));
    }
    if a == 0.0 && b == 0.0 {
        return gauss_legendre(n);
    }
    // Recurrence for P^{(a,b)} on [-1, 1], weight (1-x)^a (1+x)^b.
    let ab = a + b;
    let mut diag = vec![0.0; n];
    let mut off = vec![0.0; n.saturating_sub(1)];
    for (k, d) in diag.iter_mut().enumerate() {
        let kf = k as f64;
        let s = 2.0 * kf + ab;
        *d = if k == 0 {
            (b - a) / (ab + 2.0)
        } else {
            (b * b - a * a) / (s * (s + 2.0))
        };
    }
    for (idx, o) in off.iter_mut().enumerate() {
        let k = (idx + 1) as f64;
        let s = 2.0 * k + ab;
        let beta = if idx == 0 {
            4.0 * (1.0 + a) * (1.0 + b) / ((2.0 + ab).powi(2) * (3.0 + ab))
        } else {
            4.0 * k * (k + a) * (k + b) * (k + ab) / (s * s * (s + 1.0) * (s - 1.0))
        };
        *o = beta.sqrt();
    }
    let mut jm = DMatrix::<f64>::zeros(n, n);
    for k in 0..n {
        jm[(k, k)] = diag[k];
        if k + 1 < n {
            jm[(k, k + 1)] = off[k];
            jm[(k + 1, k)] = off[k];
        }
    }
    let eig = SymmetricEigen::new(jm);
    // total mass on [0, 1]: B(a+1, b+1)
    let mass = (ln_gamma(a + 1.0) + ln_gamma(b + 1.0) - ln_gamma(a + b + 2.0)).exp();
    let mut pairs: Vec<(f64, f64)> = (0..n)
        .map(|k| {
            let v0 = eig.eigenvectors[(0, k)];
            (0.5 * (1.0 + eig.eigenvalues[k]), mass * v0 * v0)
        })
        .collect();
    pairs.sort_by(|p, q| p.0.total_cmp(&q.0));
    Ok(QuadratureRule {
        nodes: pairs.iter().map(|p| p.0).collect(),
        weights: pairs.iter().map(|p| p.1).collect(),
        weight_exponents: (a, b),
    })
}

type RuleKey = (usize, u64, u64);

fn rule_cache() -> &'static Mutex<HashMap<RuleKey, Arc<QuadratureRule>>> {
    static CACHE: OnceLock<Mutex<HashMap<RuleKey, Arc<QuadratureRule>>>> = OnceLock::new();
    CACHE.get_or_init(|| Mutex::new(HashMap::new()))
}

/// Memoized [`gauss_jacobi`]; rules are immutable and shared.
pub fn gauss_jacobi_cached(n: usize, a: f64, b: f64) -> Result<Arc<QuadratureRule>> {
    // normalize -0.0 so it shares the entry of 0.0
    let (a, b) = (a + 0.0, b + 0.0);
    let key = (n, a.to_bits(), b.to_bits());
    if let Some(rule) = rule_cache().lock().expect("rule cache poisoned").get(&key) {
        return Ok(Arc::clone(rule));
    }
    let rule = Arc::new(gauss_jacobi(n, a, b)?);
    rule_cache()
        .lock()
        .expect("rule cache poisoned")
        .insert(key, Arc::clone(&rule));
    Ok(rule)
}

pub fn gauss_legendre_cached(n: usize) -> Result<Arc<QuadratureRule>> {
    gauss_jacobi_cached(n, 0.0, 0.0)
}

/// `∫_0^x (x-t)^sigma f(t) dt` for smooth `f` and `sigma > -1`, via `t = x u`.
pub fn singular_integral(n: usize, sigma: f64, x: f64, f: impl Fn(f64) -> f64) -> Result<f64> {
    let rule = gauss_jacobi_cached(n, sigma, 0.0)?;
    Ok(rule.integrate_on(0.0, x, f))
}

/// Lower-triangular product-integration weights: row `i` integrates
/// `(x_i - s)^sigma g(s)` over `[0, x_i]` for the piecewise-linear
/// interpolant of `g` on the grid.
#[derive(Debug, Clone, PartialEq)]
pub struct TriangularWeights {
    pub grid: Vec<f64>,
    pub sigma: f64,
    rows: Vec<Vec<f64>>,
}

impl TriangularWeights {
    /// Weights `W[i][0..=i]`.
    pub fn row(&self, i: usize) -> &[f64] {
        &self.rows[i]
    }

    pub fn len(&self) -> usize {
        self.rows.len()
    }

    pub fn is_empty(&self) -> bool {
        self.rows.is_empty()
    }

    /// `Σ_j W[i][j] g_j`.
    pub fn apply(&self, i: usize, g: &[f64]) -> f64 {
        self.rows[i].iter().zip(g).map(|(w, v)| w * v).sum()
    }
}

/// Product-integration weights for `(x_i - s)^sigma`, `sigma ∈ (-1, 0)`.
pub fn product_weights(grid: &[f64], sigma: f64) -> Result<TriangularWeights> {
    if !(sigma > -1.0 && sigma < 0.0) {
        return Err(Error::InvalidArgument(format!(
            "product weights need sigma in (-1, 0), got {sigma}"
        )));
    }
    product_weights_any(grid, sigma)
}

/// Same construction for any `sigma > -1`; used by the fractional-integral
/// diagnostics where the order can exceed one.
pub(crate) fn product_weights_any(grid: &[f64], sigma: f64) -> Result<TriangularWeights> {
    if grid.first() != Some(&0.0) {
        return Err(Error::InvalidArgument(
            "product-integration grid must start at 0".into(),
        ));
    }
    if grid.windows(2).any(|w| !(w[1] > w[0])) {
        return Err(Error::InvalidArgument(
            "grid nodes must be strictly increasing".into(),
        ));
    }
    let s1 = sigma + 1.0;
    let s2 = sigma + 2.0;
    let rows = (0..grid.len())
        .map(|i| {
            let xi = grid[i];
            let mut row = vec![0.0; i + 1];
            for j in 0..i {
                let h = grid[j + 1] - grid[j];
                let da = xi - grid[j];
                let db = xi - grid[j + 1];
                let m0 = (da.powf(s1) - db.powf(s1)) / s1;
                // ∫ (x_i - s)^sigma (s - x_j) ds over the cell
                let m1 = da * m0 - (da.powf(s2) - db.powf(s2)) / s2;
                row[j] += m0 - m1 / h;
                row[j + 1] += m1 / h;
            }
            row
        })
        .collect();
    Ok(TriangularWeights {
        grid: grid.to_vec(),
        sigma,
        rows,
    })
}

/// `B(p, q)` through the gamma function.
pub fn beta_fn(p: f64, q: f64) -> f64 {
    let g = |x: f64| gamma_real(x).expect("beta arguments are positive");
    g(p) * g(q) / g(p + q)
}

#[cfg(test)]
mod tests {
    use super::*;
    use approx::assert_relative_eq;

    #[test]
    fn legendre_small_orders() {
        let r = gauss_legendre(1).unwrap();
        assert_eq!(r.nodes, vec![0.5]);
        assert_relative_eq!(r.weights[0], 1.0, max_relative = 1e-15);
        let r2 = gauss_legendre(2).unwrap();
        assert_relative_eq!(r2.integrate(|u| u * u * u), 0.25, max_relative = 1e-14);
        let r16 = gauss_legendre(16).unwrap();
        assert!((r16.integrate(|u| (PI * u).sin()) - 2.0 / PI).abs() < 1e-12);
    }

    #[test]
    fn legendre_exactness_degree() {
        for n in [3, 7, 20, 64, 256] {
            let r = gauss_legendre(n).unwrap();
            assert!(r.nodes.windows(2).all(|w| w[1] > w[0]));
            for k in [0, n, 2 * n - 1] {
                let exact = 1.0 / (k as f64 + 1.0);
                assert_relative_eq!(
                    r.integrate(|u| u.powi(k as i32)),
                    exact,
                    max_relative = 1e-12
                );
            }
        }
    }

    #[test]
    fn jacobi_reduces_to_legendre() {
        let gj = gauss_jacobi(9, 0.0, 0.0).unwrap();
        let gl = gauss_legendre(9).unwrap();
        for (a, b) in gj.nodes.iter().zip(&gl.nodes) {
            assert!((a - b).abs() < 1e-14);
        }
    }

    #[test]
    fn jacobi_masses() {
        let r = gauss_jacobi(8, 0.25, 0.0).unwrap();
        assert!((r.integrate(|_| 1.0) - 0.8).abs() < 1e-12);
        let r = gauss_jacobi(8, -0.5, -0.5).unwrap();
        assert!((r.integrate(|_| 1.0) - PI).abs() < 1e-12);
    }

    #[test]
    fn jacobi_exactness() {
        for &(a, b) in &[
            (-0.5, 0.0),
            (0.75, -0.25),
            (-0.75, -0.75),
            (0.25, 0.25),
            (1.5, 0.5),
        ] {
            for n in [1, 4, 12, 40] {
                let r = gauss_jacobi(n, a, b).unwrap();
                for k in [0, n, 2 * n - 1] {
                    // ∫ (1-u)^a u^{b+k} du = B(a+1, b+k+1)
                    let exact = beta_fn(a + 1.0, b + k as f64 + 1.0);
                    let got = r.integrate(|u| u.powi(k as i32));
                    assert!(
                        ((got - exact) / exact).abs() < 1e-11,
                        "a={a} b={b} n={n} k={k}"
                    );
                }
            }
        }
    }

    #[test]
    fn jacobi_rejects_bad_exponents() {
        assert!(gauss_jacobi(4, -1.0, 0.0).is_err());
        assert!(gauss_jacobi(4, 0.0, -1.5).is_err());
        assert!(gauss_jacobi(0, 0.0, 0.0).is_err());
    }

    #[test]
    fn product_weight_examples() {
        let grid: Vec<f64> = (0..=10).map(|i| i as f64 / 10.0).collect();
        let w = product_weights(&grid, -0.5).unwrap();
        let ones = vec![1.0; grid.len()];
        assert!((w.apply(10, &ones) - 2.0).abs() < 1e-13);
        assert!((w.apply(10, &grid) - 4.0 / 3.0).abs() < 1e-13);
        assert_eq!(w.apply(7, &vec![0.0; grid.len()]), 0.0);
        assert!(product_weights(&grid, 0.3).is_err());
        assert!(product_weights(&grid, -1.0).is_err());
    }

    #[test]
    fn product_weight_row_sums() {
        let grid: Vec<f64> = (0..=40).map(|i| (i as f64 / 40.0).powf(1.3)).collect();
        for &sigma in &[-0.9, -0.5, -0.1] {
            let w = product_weights(&grid, sigma).unwrap();
            for (i, x) in grid.iter().enumerate() {
                let sum: f64 = w.row(i).iter().sum();
                assert!((sum - x.powf(sigma + 1.0) / (sigma + 1.0)).abs() < 1e-12);
            }
        }
    }

    #[test]
    fn product_weights_refinement_order() {
        // ∫_0^1 (1-s)^{-1/2} cos s ds, reference from a 64-point Jacobi rule
        let exact = gauss_jacobi(64, -0.5, 0.0).unwrap().integrate(f64::cos);
        let err = |n: usize| {
            let grid: Vec<f64> = (0..=n).map(|i| i as f64 / n as f64).collect();
            let w = product_weights(&grid, -0.5).unwrap();
            let g: Vec<f64> = grid.iter().map(|s| s.cos()).collect();
            (w.apply(n, &g) - exact).abs()
        };
        let (e1, e2) = (err(20), err(40));
        assert!(e1 / e2 >= 3.0, "ratio {}", e1 / e2);
    }
}
