//! Function representations shared by the operators: analytic callables,
//! polynomials with exact derivatives, and sampled grid functions.

use crate::error::{Error, Result};
use crate::quadrature::{gauss_jacobi_cached, gauss_legendre_cached};

/// A real function on `[0, 1]`, optionally with derivatives.
pub trait SmoothFunction {
    fn value(&self, x: f64) -> f64;

    /// Highest derivative order [`SmoothFunction::derivative`] honors.
    fn smoothness(&self) -> usize {
        0
    }

    /// `k`-th derivative, `None` when `k` exceeds [`SmoothFunction::smoothness`].
    fn derivative(&self, k: usize, x: f64) -> Option<f64> {
        (k == 0).then(|| self.value(x))
    }

    /// Points where the function is only piecewise smooth; quadratures
    /// split there. Empty for analytic functions.
    fn breakpoints(&self) -> &[f64] {
        &[]
    }
}

impl<F: Fn(f64) -> f64> SmoothFunction for F {
    fn value(&self, x: f64) -> f64 {
        self(x)
    }
}

/// Polynomial with coefficients in ascending order.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct Polynomial {
    coeffs: Vec<f64>,
}

impl Polynomial {
    pub fn new(coeffs: Vec<f64>) -> Self {
        let mut p = Self { coeffs };
        while p.coeffs.last() == Some(&0.0) {
            p.coeffs.pop();
        }
        p
    }

    pub fn zero() -> Self {
        Self::default()
    }

    pub fn monomial(degree: usize) -> Self {
        let mut c = vec![0.0; degree + 1];
        c[degree] = 1.0;
        Self::new(c)
    }

    pub fn coeffs(&self) -> &[f64] {
        &self.coeffs
    }

    /// Degree, with `None` for the zero polynomial.
    pub fn degree(&self) -> Option<usize> {
        self.coeffs.len().checked_sub(1)
    }

    pub fn is_zero(&self) -> bool {
        self.coeffs.is_empty()
    }

    pub fn eval(&self, x: f64) -> f64 {
        self.coeffs.iter().rev().fold(0.0, |acc, c| acc * x + c)
    }

    pub fn derivative_poly(&self, k: usize) -> Polynomial {
        if k >= self.coeffs.len() {
            return Polynomial::zero();
        }
        let c = (k..self.coeffs.len())
            .map(|i| {
                let falling: f64 = ((i - k + 1)..=i).map(|j| j as f64).product();
                falling * self.coeffs[i]
            })
            .collect();
        Polynomial::new(c)
    }

    /// Index of the lowest nonzero coefficient.
    pub fn lowest_order(&self) -> Option<usize> {
        self.coeffs.iter().position(|&c| c != 0.0)
    }
}

impl SmoothFunction for Polynomial {
    fn value(&self, x: f64) -> f64 {
        self.eval(x)
    }

    fn smoothness(&self) -> usize {
        usize::MAX
    }

    fn derivative(&self, k: usize, x: f64) -> Option<f64> {
        Some(self.derivative_poly(k).eval(x))
    }
}

/// Values on a strictly increasing node set. Between nodes the function is
/// the cubic through the four nearest nodes (fewer near tiny grids).
#[derive(Debug, Clone, PartialEq)]
pub struct GridFunction {
    nodes: Vec<f64>,
    values: Vec<f64>,
}

impl GridFunction {
    pub fn new(nodes: Vec<f64>, values: Vec<f64>) -> Result<Self> {
        if nodes.len() != values.len() {
            return Err(Error::GridMismatch(format!(
                "{} nodes but {} values",
                nodes.len(),
                values.len()
            )));
        }
        if nodes.is_empty() {
            return Err(Error::InvalidArgument(
                "grid function needs at least one node".into(),
            ));
        }
        if nodes.windows(2).any(|w| !(w[1] > w[0])) {
            return Err(Error::InvalidArgument(
                "grid nodes must be strictly increasing".into(),
            ));
        }
        Ok(Self { nodes, values })
    }

    pub fn sample(nodes: &[f64], f: impl Fn(f64) -> f64) -> Result<Self> {
        Self::new(nodes.to_vec(), nodes.iter().map(|&x| f(x)).collect())
    }

    pub fn zeros(nodes: &[f64]) -> Result<Self> {
        Self::sample(nodes, |_| 0.0)
    }

    pub fn nodes(&self) -> &[f64] {
        &self.nodes
    }

    pub fn values(&self) -> &[f64] {
        &self.values
    }

    pub fn len(&self) -> usize {
        self.nodes.len()
    }

    pub fn is_empty(&self) -> bool {
        self.nodes.is_empty()
    }

    pub fn same_grid(&self, other: &GridFunction) -> bool {
        self.nodes == other.nodes
    }

    pub fn ensure_same_grid(&self, other: &GridFunction, what: &str) -> Result<()> {
        if self.same_grid(other) {
            Ok(())
        } else {
            Err(Error::GridMismatch(format!("{what}: node sets differ")))
        }
    }

    /// Pointwise `a·self + b·other` on a shared grid.
    pub fn combine(&self, a: f64, other: &GridFunction, b: f64) -> Result<GridFunction> {
        self.ensure_same_grid(other, "combine")?;
        let values = self
            .values
            .iter()
            .zip(&other.values)
            .map(|(u, v)| a * u + b * v)
            .collect();
        GridFunction::new(self.nodes.clone(), values)
    }

    pub fn map(&self, f: impl Fn(f64, f64) -> f64) -> GridFunction {
        GridFunction {
            nodes: self.nodes.clone(),
            values: self
                .nodes
                .iter()
                .zip(&self.values)
                .map(|(&x, &v)| f(x, v))
                .collect(),
        }
    }

    pub fn max_abs(&self) -> f64 {
        self.values.iter().fold(0.0, |m, v| m.max(v.abs()))
    }

    /// Index `j` of the cell `[x_j, x_{j+1}]` containing `x` (clamped).
    fn cell(&self, x: f64) -> usize {
        let n = self.nodes.len();
        if n < 2 {
            return 0;
        }
        match self.nodes.binary_search_by(|p| p.total_cmp(&x)) {
            Ok(i) => i.min(n - 2),
            Err(i) => i.saturating_sub(1).min(n - 2),
        }
    }

    pub fn eval(&self, x: f64) -> f64 {
        let n = self.nodes.len();
        if n == 1 {
            return self.values[0];
        }
        let j = self.cell(x);
        if x == self.nodes[j] {
            return self.values[j];
        }
        if x == self.nodes[j + 1] {
            return self.values[j + 1];
        }
        let width = n.min(4);
        let start = j.saturating_sub(1).min(n - width);
        let xs = &self.nodes[start..start + width];
        let ys = &self.values[start..start + width];
        let mut total = 0.0;
        for i in 0..width {
            let mut basis = 1.0;
            for k in 0..width {
                if k != i {
                    basis *= (x - xs[k]) / (xs[i] - xs[k]);
                }
            }
            total += basis * ys[i];
        }
        total
    }
}

impl SmoothFunction for GridFunction {
    fn value(&self, x: f64) -> f64 {
        self.eval(x)
    }

    fn breakpoints(&self) -> &[f64] {
        &self.nodes
    }
}

/// `n + 1` equally spaced nodes on `[0, 1]`.
pub fn uniform_nodes(n_nodes: usize) -> Vec<f64> {
    assert!(n_nodes >= 2, "a uniform grid needs at least two nodes");
    let n = (n_nodes - 1) as f64;
    (0..n_nodes).map(|i| i as f64 / n).collect()
}

const INTERIOR_CELL_ORDER: usize = 8;
const END_CELL_ORDER: usize = 12;

/// `∫_lo^hi (s-lo)^p (hi-s)^q f(s) ds`, split at the grid `breaks` inside
/// `(lo, hi)`. Cells touching an endpoint absorb the endpoint power into a
/// Jacobi rule; interior cells use Gauss-Legendre. With `f` built from
/// [`GridFunction`] data each cell sees a single cubic piece.
pub fn integrate_piecewise(
    breaks: &[f64],
    lo: f64,
    hi: f64,
    p: f64,
    q: f64,
    f: impl Fn(f64) -> f64,
) -> f64 {
    if !(hi > lo) {
        return 0.0;
    }
    let start = breaks.partition_point(|&b| b <= lo);
    let end = breaks.partition_point(|&b| b < hi);
    let inner = if start < end {
        &breaks[start..end]
    } else {
        &[][..]
    };
    let rule = |a: f64, b: f64, n: usize| gauss_jacobi_cached(n, a, b).expect("valid exponents");
    if inner.is_empty() {
        return rule(q, p, END_CELL_ORDER).integrate_on(lo, hi, f);
    }
    let first = rule(0.0, p, END_CELL_ORDER);
    let mut total = first.integrate_on(lo, inner[0], |s| (hi - s).powf(q) * f(s));
    let gl = gauss_legendre_cached(INTERIOR_CELL_ORDER).expect("valid order");
    for w in inner.windows(2) {
        total += gl.integrate_on(w[0], w[1], |s| (s - lo).powf(p) * (hi - s).powf(q) * f(s));
    }
    let last = rule(q, 0.0, END_CELL_ORDER);
    total += last.integrate_on(*inner.last().unwrap(), hi, |s| (s - lo).powf(p) * f(s));
    total
}

const ANALYTIC_ORDER: usize = 48;

/// [`integrate_piecewise`] when `breaks` is nonempty, otherwise a single
/// high-order Jacobi rule suited to analytic integrands.
pub fn integrate_against(
    breaks: &[f64],
    lo: f64,
    hi: f64,
    p: f64,
    q: f64,
    f: impl Fn(f64) -> f64,
) -> f64 {
    if !(hi > lo) {
        return 0.0;
    }
    if breaks.is_empty() {
        let rule = gauss_jacobi_cached(ANALYTIC_ORDER, q, p).expect("valid exponents");
        return rule.integrate_on(lo, hi, f);
    }
    integrate_piecewise(breaks, lo, hi, p, q, f)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn polynomial_derivatives() {
        let p = Polynomial::new(vec![0.0, 0.0, 0.0, 0.0, 1.0]);
        assert_eq!(p.derivative_poly(3).coeffs(), &[0.0, 24.0]);
        assert_eq!(p.derivative(2, 0.5), Some(3.0));
        assert_eq!(p.lowest_order(), Some(4));
        assert!(p.derivative_poly(5).is_zero());
        assert_eq!(Polynomial::new(vec![1.0, 0.0, 0.0]).degree(), Some(0));
    }

    #[test]
    fn grid_function_reproduces_cubics() {
        let nodes: Vec<f64> = (0..=12).map(|i| (i as f64 / 12.0).powi(2)).collect();
        let f = |x: f64| 1.0 - 2.0 * x + 0.5 * x * x * x;
        let g = GridFunction::sample(&nodes, f).unwrap();
        for i in 0..=50 {
            let x = i as f64 / 50.0;
            assert!((g.eval(x) - f(x)).abs() < 1e-13);
        }
    }

    #[test]
    fn grid_function_validation() {
        assert!(GridFunction::new(vec![0.0, 1.0], vec![1.0]).is_err());
        assert!(GridFunction::new(vec![0.0, 0.0], vec![1.0, 2.0]).is_err());
        let a = GridFunction::zeros(&uniform_nodes(5)).unwrap();
        let b = GridFunction::zeros(&uniform_nodes(6)).unwrap();
        assert!(a.combine(1.0, &b, 1.0).is_err());
    }

    #[test]
    fn piecewise_integration_with_endpoint_powers() {
        let breaks = uniform_nodes(41);
        // ∫_0.1^0.9 (s-0.1)^{0.75} (0.9-s)^{0.75} ds = 0.8^{2.5} B(1.75, 1.75)
        let exact = 0.8_f64.powf(2.5) * crate::quadrature::beta_fn(1.75, 1.75);
        let got = integrate_piecewise(&breaks, 0.1, 0.9, 0.75, 0.75, |_| 1.0);
        assert!((got - exact).abs() < 1e-13);
        // single cell path
        let got = integrate_piecewise(&breaks, 0.1, 0.11, 0.0, -0.5, |_| 1.0);
        assert!((got - 2.0 * 0.01_f64.sqrt()).abs() < 1e-14);
        assert_eq!(
            integrate_piecewise(&breaks, 0.3, 0.3, 0.0, 0.0, |_| 1.0),
            0.0
        );
    }
}
