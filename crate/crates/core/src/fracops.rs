//! Riemann-Liouville fractional integrals and the Bessel-kernel operator pair
//! `A^{1,λ}_{kx}`, `B^{1,λ}_{kx}`.
//!
//! Both operators carry a derivative of `J_0[λ√(...)]` in their kernels. It is
//! reduced analytically through `d/dw J̄_0(√w) = -J̄_1(√w)/4`:
//!
//! ```text
//! A[g](x) = g(x) - (λ²/4) ∫_k^x g(t) (t-k) J̄_1(λ²(x-k)(x-t)) dt
//! B[g](x) = g(x) - (λ²/4) ∫_k^x g(t) (k-t) J̄_1(λ²(k-t)(x-t)) dt
//! ```
//!
//! where `J̄_1(w)` is [`even_bessel`](crate::specfun::even_bessel) of order 1
//! in squared-argument form. The `iλ` variants are the same calls with
//! `lambda2` negated.

use crate::error::{Error, Result};
use crate::functions::SmoothFunction;
use crate::quadrature::{gauss_jacobi_cached, gauss_legendre_cached};
use crate::specfun::{eb, gamma_real};

const OPERATOR_ORDER: usize = 40;
const FRACTIONAL_ORDER: usize = 40;

/// `(1/Γ(mu)) ∫_0^x (x-t)^{mu-1} f(t) dt`.
pub fn rl_integral<F: SmoothFunction + ?Sized>(mu: f64, f: &F, x: f64) -> Result<f64> {
    if !(mu > 0.0) {
        return Err(Error::InvalidArgument(format!(
            "fractional integral order must be positive, got {mu}"
        )));
    }
    if x < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "fractional integral at x = {x} < 0"
        )));
    }
    if x == 0.0 {
        return Ok(0.0);
    }
    let rule = gauss_jacobi_cached(FRACTIONAL_ORDER, mu - 1.0, 0.0)?;
    Ok(rule.integrate_on(0.0, x, |t| f.value(t)) / gamma_real(mu)?)
}

/// Riemann-Liouville derivative of order `q ∈ (1, 2)` for `f` with
/// `f(0) = f'(0) = 0`, computed as `I^{2-q} f''`.
pub fn rl_derivative_q<F: SmoothFunction + ?Sized>(q: f64, f: &F, x: f64) -> Result<f64> {
    if !(q > 1.0 && q < 2.0) {
        return Err(Error::InvalidArgument(format!(
            "derivative order must lie in (1, 2), got {q}"
        )));
    }
    let missing = || Error::Precondition("function must supply a second derivative".into());
    if f.smoothness() < 2 {
        return Err(missing());
    }
    let f0 = f.value(0.0);
    let f1 = f.derivative(1, 0.0).ok_or_else(missing)?;
    if f0.abs() > 1e-12 || f1.abs() > 1e-12 {
        return Err(Error::Precondition(format!(
            "need f(0) = f'(0) = 0, got f(0) = {f0:e}, f'(0) = {f1:e}"
        )));
    }
    let second = |t: f64| f.derivative(2, t).unwrap_or(f64::NAN);
    rl_integral(2.0 - q, &second, x)
}

fn check_interval(k: f64, x: f64) -> Result<()> {
    if x < k {
        return Err(Error::InvalidArgument(format!(
            "operator evaluated at x = {x} below its base point k = {k}"
        )));
    }
    Ok(())
}

/// `A^{1,λ}_{kx}[g](x)`; pass `-lambda2` for the `iλ` variant.
pub fn op_a<F: SmoothFunction + ?Sized>(k: f64, lambda2: f64, g: &F, x: f64) -> Result<f64> {
    check_interval(k, x)?;
    if lambda2 == 0.0 || x == k {
        return Ok(g.value(x));
    }
    let rule = gauss_legendre_cached(OPERATOR_ORDER)?;
    let integral = rule.integrate_on(k, x, |t| {
        g.value(t) * (t - k) * eb(1.0, lambda2 * (x - k) * (x - t))
    });
    Ok(g.value(x) - 0.25 * lambda2 * integral)
}

/// `B^{1,λ}_{kx}[g](x)`; pass `-lambda2` for the `iλ` variant.
pub fn op_b<F: SmoothFunction + ?Sized>(k: f64, lambda2: f64, g: &F, x: f64) -> Result<f64> {
    check_interval(k, x)?;
    if lambda2 == 0.0 || x == k {
        return Ok(g.value(x));
    }
    let rule = gauss_legendre_cached(OPERATOR_ORDER)?;
    let integral = rule.integrate_on(k, x, |t| {
        g.value(t) * (k - t) * eb(1.0, lambda2 * (k - t) * (x - t))
    });
    Ok(g.value(x) - 0.25 * lambda2 * integral)
}

/// `∫_0^x (x-t)^{-β} J̄_{-β}[λ√(t(x-t))] g(t) dt`.
pub fn lemma1_lhs<F: SmoothFunction + ?Sized>(
    beta: f64,
    lambda2: f64,
    g: &F,
    x: f64,
) -> Result<f64> {
    if !(beta < 1.0) {
        return Err(Error::InvalidArgument(format!("need beta < 1, got {beta}")));
    }
    if x <= 0.0 {
        return Ok(0.0);
    }
    let rule = gauss_jacobi_cached(FRACTIONAL_ORDER, -beta, 0.0)?;
    Ok(rule.integrate_on(0.0, x, |t| eb(-beta, lambda2 * t * (x - t)) * g.value(t)))
}

/// `Γ(1-β) D^{β-1}_{0x} B^{1,λi}_{0x}[g]`, where `D^{β-1}` is the fractional
/// integral of order `1-β`.
pub fn lemma1_rhs<F: SmoothFunction + ?Sized>(
    beta: f64,
    lambda2: f64,
    g: &F,
    x: f64,
) -> Result<f64> {
    if !(beta < 1.0) {
        return Err(Error::InvalidArgument(format!("need beta < 1, got {beta}")));
    }
    // the inner operator is total on [0, x], so errors cannot occur inside the closure
    let inner = |t: f64| op_b(0.0, -lambda2, g, t).unwrap_or(f64::NAN);
    let value = gamma_real(1.0 - beta)? * rl_integral(1.0 - beta, &inner, x)?;
    if value.is_nan() {
        return Err(Error::Quadrature("inner operator failed".into()));
    }
    Ok(value)
}
