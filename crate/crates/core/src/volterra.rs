//! The weakly singular Volterra equation for `ν`:
//!
//! ```text
//! ν(x) - c₁ ∫_0^x (x-s)^{-2β-2} Ī_{-β-1}[λ(x-s)] ν(s) ds = Q(x)
//! ```
//!
//! with `c₁ = 2β(2β+1)γ₃/Γ(1+δ)`, solved by product integration.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::functions::{GridFunction, Polynomial};
use crate::hyperbolic::{phi_reduced_unchecked, psi_exponent, tau_relation_14, ProblemParameters};
use crate::ode_bvp::green_apply;
use crate::quadrature::{gauss_jacobi_cached, product_weights};
use crate::specfun::{eb, gamma_real};

const Q_ORDER: usize = 32;

/// Exponent `σ = -2β-2` of the kernel singularity.
pub fn kernel_exponent(params: &ProblemParameters) -> f64 {
    -2.0 * params.beta - 2.0
}

/// `c₁ = 2β(2β+1)γ₃/Γ(1+δ)`.
pub fn kernel_coefficient(params: &ProblemParameters) -> f64 {
    let b = params.beta;
    2.0 * b * (2.0 * b + 1.0) * params.gamma3 / params.gamma_one_plus_delta()
}

/// Smooth factor `Ī_{-β-1}(λr)` of the kernel.
pub fn kernel_factor(params: &ProblemParameters, r: f64) -> f64 {
    eb(-params.beta - 1.0, -params.lambda2 * r * r)
}

/// Coefficient in front of the `Q` integral.
pub fn q_coefficient(params: &ProblemParameters) -> f64 {
    let b = params.beta;
    4.0 * b * (2.0 * b + 1.0) * (PI * b).cos()
        / (params.gamma_one_plus_delta() * gamma_real(1.0 - b).expect("1 - beta > 1"))
}

/// `Q(x)` on `grid`. With `Φ(t) = t^{2+2β}Φ̃(t)` and `t = xu` the integral
/// becomes `x ∫_0^1 (1-u)^{-2β-2} u^{2+2β} Ī_{-β-1}[λx(1-u)] Φ̃(xu) du`.
pub fn assemble_q(
    params: &ProblemParameters,
    psi: &Polynomial,
    grid: &[f64],
) -> Result<GridFunction> {
    psi_exponent(params, psi)?;
    let psi3 = psi.derivative_poly(3);
    let b = params.beta;
    let rule = gauss_jacobi_cached(Q_ORDER, -2.0 * b - 2.0, 2.0 + 2.0 * b)?;
    let c = q_coefficient(params);
    GridFunction::sample(grid, |x| {
        if x == 0.0 || psi3.is_zero() {
            return 0.0;
        }
        let integral = rule.integrate(|u| {
            kernel_factor(params, x * (1.0 - u)) * phi_reduced_unchecked(params, &psi3, x * u)
        });
        c * x * integral
    })
}

/// Solves `v(x_i) - coef Σ_j W_ij k(x_i - x_j) v_j = rhs_i` where `W` are
/// the product-integration weights of `(x_i - s)^sigma` and `k` is smooth.
pub fn solve_weakly_singular(
    grid: &[f64],
    sigma: f64,
    coef: f64,
    kernel: impl Fn(f64) -> f64,
    rhs: &[f64],
) -> Result<Vec<f64>> {
    if grid.len() != rhs.len() {
        return Err(Error::GridMismatch(format!(
            "{} grid nodes but {} right-hand-side values",
            grid.len(),
            rhs.len()
        )));
    }
    let weights = product_weights(grid, sigma)?;
    let k0 = kernel(0.0);
    let mut v = Vec::with_capacity(grid.len());
    for i in 0..grid.len() {
        let row = weights.row(i);
        let xi = grid[i];
        let history: f64 = (0..i).map(|j| row[j] * kernel(xi - grid[j]) * v[j]).sum();
        let diag = 1.0 - coef * row[i] * k0;
        if diag.abs() < 1e-14 {
            return Err(Error::ZeroPivot(i));
        }
        v.push((rhs[i] + coef * history) / diag);
    }
    Ok(v)
}

/// Solves the Volterra equation for `ν` on the grid of `q`.
pub fn solve_volterra_20(params: &ProblemParameters, q: &GridFunction) -> Result<GridFunction> {
    let v = solve_weakly_singular(
        q.nodes(),
        kernel_exponent(params),
        kernel_coefficient(params),
        |r| kernel_factor(params, r),
        q.values(),
    )?;
    GridFunction::new(q.nodes().to_vec(), v)
}

/// Number of points in the diagnostic grid of [`verify_19`].
pub const VERIFY_POINTS: usize = 21;

/// Sup-norm residual of the integrated `ν` equation on 21 equispaced points.
/// The Green's function side `Γ(1+δ)∫Gν` is recomputed from `ν` and compared
/// with the right-hand side built from `ν` and `Φ`. `tau` must share the grid
/// of `ν`.
pub fn verify_19(
    params: &ProblemParameters,
    nu: &GridFunction,
    phi_vals: &GridFunction,
    tau: &GridFunction,
) -> Result<f64> {
    nu.ensure_same_grid(tau, "verify_19")?;
    let gd = params.gamma_one_plus_delta();
    let mut worst = 0.0_f64;
    for i in 0..VERIFY_POINTS {
        let x = i as f64 / (VERIFY_POINTS - 1) as f64;
        let lhs = gd * green_apply(params, nu, x);
        let rhs = tau_relation_14(params, nu, phi_vals, x)?;
        worst = worst.max((lhs - rhs).abs());
    }
    Ok(worst)
}
