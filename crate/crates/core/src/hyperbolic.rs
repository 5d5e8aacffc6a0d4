//! The hyperbolic subdomain: problem constants, characteristic coordinates,
//! the modified Cauchy solution, the class `R₀₀^λ` representation and the
//! formulas that recover `T`, `N` and `Φ` from the boundary data.
//!
//! Bessel kernels appear in squared-argument form throughout. `J̄_γ(λ√w)` is
//! `eb(γ, λ² w)` and `Ī_γ(λ√w)` is `eb(γ, -λ² w)`.

use std::f64::consts::PI;

use crate::error::{Error, Result};
use crate::fracops::{op_a, rl_derivative_q};
use crate::functions::{integrate_against, GridFunction, Polynomial, SmoothFunction};
use crate::quadrature::gauss_jacobi_cached;
use crate::specfun::{eb, gamma_real};

const CAUCHY_ORDER: usize = 64;
const PSI_ORDER: usize = 16;
const PHI_S_ORDER: usize = 32;

/// Parameters of problem `T₀` together with the derived constants.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct ProblemParameters {
    pub alpha: f64,
    pub delta: f64,
    /// Signed `λ²`; negative for purely imaginary `λ`.
    pub lambda2: f64,
    pub beta: f64,
    pub gamma1: f64,
    pub gamma2: f64,
    pub gamma3: f64,
}

/// Relative distance from `λ² = -(πn)²` below which the spectral parameter
/// is treated as singular.
const SINGULAR_REL_TOL: f64 = 1e-9;

pub fn derive_parameters(alpha: f64, delta: f64, lambda2: f64) -> Result<ProblemParameters> {
    if !(alpha > -0.5 && alpha < 0.0) {
        return Err(Error::ParameterRange(format!(
            "alpha must lie in (-1/2, 0), got {alpha}"
        )));
    }
    if !(delta > 0.0 && delta < 1.0) {
        return Err(Error::ParameterRange(format!(
            "delta must lie in (0, 1), got {delta}"
        )));
    }
    if !lambda2.is_finite() {
        return Err(Error::ParameterRange(format!(
            "lambda^2 must be finite, got {lambda2}"
        )));
    }
    if lambda2 < 0.0 {
        let n = ((-lambda2).sqrt() / PI).round();
        if n >= 1.0 {
            let pole = -(PI * n).powi(2);
            if (lambda2 - pole).abs() <= SINGULAR_REL_TOL * pole.abs() {
                return Err(Error::SingularSpectralParameter(lambda2));
            }
        }
    }
    let beta = alpha - 0.5;
    let gamma1 = gamma_real(1.0 + 2.0 * alpha)? / gamma_real(0.5 + alpha)?.powi(2);
    let gamma2 = 2.0 * gamma_real(2.0 - 2.0 * alpha)? / gamma_real(1.5 - alpha)?.powi(2);
    let gamma3 = 2.0 * 4f64.powf(2.0 * beta - 1.0) * gamma2 * (PI * beta).cos();
    Ok(ProblemParameters {
        alpha,
        delta,
        lambda2,
        beta,
        gamma1,
        gamma2,
        gamma3,
    })
}

impl ProblemParameters {
    pub fn new(alpha: f64, delta: f64, lambda2: f64) -> Result<Self> {
        derive_parameters(alpha, delta, lambda2)
    }

    /// `Γ(1+δ)`, the coefficient of `ν` in the limiting ODE.
    pub fn gamma_one_plus_delta(&self) -> f64 {
        gamma_real(1.0 + self.delta).expect("1 + delta > 1")
    }

    /// `2 cos(πβ) / Γ(1-β)`, the weight of `Φ` in `T`.
    pub fn phi_weight(&self) -> f64 {
        2.0 * (PI * self.beta).cos() / gamma_real(1.0 - self.beta).expect("1 - beta > 1")
    }

    /// Same parameters with a different `λ²`.
    pub fn with_lambda2(&self, lambda2: f64) -> Result<Self> {
        derive_parameters(self.alpha, self.delta, lambda2)
    }
}

/// A point of `Ω₂` in characteristic coordinates.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct CharacteristicPoint {
    pub xi: f64,
    pub eta: f64,
}

const COORD_SLACK: f64 = 1e-12;

impl CharacteristicPoint {
    pub fn new(xi: f64, eta: f64) -> Result<Self> {
        if !(xi >= -COORD_SLACK && eta <= 1.0 + COORD_SLACK && xi <= eta) {
            return Err(Error::InvalidArgument(format!(
                "need 0 <= xi <= eta <= 1, got xi = {xi}, eta = {eta}"
            )));
        }
        Ok(Self {
            xi: xi.max(0.0),
            eta: eta.min(1.0),
        })
    }

    /// Inverse of [`CharacteristicPoint::to_xy`]; needs `y <= 0`.
    pub fn from_xy(x: f64, y: f64) -> Result<Self> {
        if y > 0.0 {
            return Err(Error::InvalidArgument(format!(
                "Ω₂ point needs y <= 0, got {y}"
            )));
        }
        let r = 2.0 * (-y).sqrt();
        Self::new(x - r, x + r)
    }

    pub fn to_xy(&self) -> (f64, f64) {
        let d = 0.25 * (self.eta - self.xi);
        (0.5 * (self.xi + self.eta), -d * d)
    }

    pub fn width(&self) -> f64 {
        self.eta - self.xi
    }
}

/// `A_α⁻(τ, λ)` with the bracket `λ²τ - τ''` supplied directly.
pub fn a_minus_with_bracket<F, B>(
    params: &ProblemParameters,
    tau: &F,
    bracket: &B,
    p: CharacteristicPoint,
) -> Result<f64>
where
    F: SmoothFunction + ?Sized,
    B: SmoothFunction + ?Sized,
{
    let (xi, eta) = (p.xi, p.eta);
    let d = eta - xi;
    if d == 0.0 {
        return Ok(tau.value(xi));
    }
    let b = params.beta;
    let l2d2 = params.lambda2 * d * d;
    let main = gauss_jacobi_cached(CAUCHY_ORDER, b, b)?
        .integrate(|u| eb(b, l2d2 * u * (1.0 - u)) * tau.value(xi + d * u));
    let correction = gauss_jacobi_cached(CAUCHY_ORDER, b + 1.0, b + 1.0)?
        .integrate(|u| eb(b + 1.0, l2d2 * u * (1.0 - u)) * bracket.value(xi + d * u));
    let scale = d * d / (2.0 * (1.0 + 2.0 * b) * (1.0 + b));
    Ok(params.gamma1 * (main - scale * correction))
}

/// `A_α⁻(τ, λ)` in characteristic form, with `λ²τ - τ'' = -Γ(1+δ)ν`.
pub fn a_minus<F, G>(
    params: &ProblemParameters,
    tau: &F,
    nu: &G,
    p: CharacteristicPoint,
) -> Result<f64>
where
    F: SmoothFunction + ?Sized,
    G: SmoothFunction + ?Sized,
{
    let g = params.gamma_one_plus_delta();
    let bracket = |t: f64| -g * nu.value(t);
    a_minus_with_bracket(params, tau, &bracket, p)
}

/// `A_α⁻(τ, λ)` in the `(x, y)` form, integrating over `z ∈ [0, 1]` with
/// `ζ = x - 2√(-y)(1-2z)` and `σ² = -16λ²y z(1-z)`.
pub fn a_minus_xy<F, B>(
    params: &ProblemParameters,
    tau: &F,
    bracket: &B,
    x: f64,
    y: f64,
) -> Result<f64>
where
    F: SmoothFunction + ?Sized,
    B: SmoothFunction + ?Sized,
{
    if y > 0.0 {
        return Err(Error::InvalidArgument(format!(
            "Ω₂ point needs y <= 0, got {y}"
        )));
    }
    if y == 0.0 {
        return Ok(tau.value(x));
    }
    let b = params.beta;
    let r = (-y).sqrt();
    let zeta = |z: f64| x - 2.0 * r * (1.0 - 2.0 * z);
    let w = |z: f64| -16.0 * params.lambda2 * y * z * (1.0 - z);
    let first =
        gauss_jacobi_cached(CAUCHY_ORDER, b, b)?.integrate(|z| tau.value(zeta(z)) * eb(b, w(z)));
    let second = gauss_jacobi_cached(CAUCHY_ORDER, b + 1.0, b + 1.0)?
        .integrate(|z| bracket.value(zeta(z)) * eb(b + 1.0, w(z)));
    Ok(params.gamma1 * first + 8.0 * params.gamma1 * y / ((1.0 + b) * (1.0 + 2.0 * b)) * second)
}

fn nu_term<G: SmoothFunction + ?Sized>(
    params: &ProblemParameters,
    nu: &G,
    p: CharacteristicPoint,
) -> Result<f64> {
    let b = params.beta;
    let d = p.width();
    let l2d2 = params.lambda2 * d * d;
    let integral = gauss_jacobi_cached(CAUCHY_ORDER, -b, -b)?.integrate_on(p.xi, p.eta, |t| {
        let u = (t - p.xi) / d;
        eb(-b, l2d2 * u * (1.0 - u)) * nu.value(t)
    });
    Ok(4f64.powf(2.0 * b - 1.0) * params.gamma2 * integral)
}

/// Solution of the modified Cauchy problem at `p`.
pub fn u_cauchy<F, G>(
    params: &ProblemParameters,
    tau: &F,
    nu: &G,
    p: CharacteristicPoint,
) -> Result<f64>
where
    F: SmoothFunction + ?Sized,
    G: SmoothFunction + ?Sized,
{
    if p.width() == 0.0 {
        return Ok(tau.value(p.xi));
    }
    Ok(a_minus(params, tau, nu, p)? - nu_term(params, nu, p)?)
}

/// [`u_cauchy`] with an explicit bracket `λ²τ - τ''` in place of the one
/// implied by `ν`.
pub fn u_cauchy_with_bracket<F, B, G>(
    params: &ProblemParameters,
    tau: &F,
    bracket: &B,
    nu: &G,
    p: CharacteristicPoint,
) -> Result<f64>
where
    F: SmoothFunction + ?Sized,
    B: SmoothFunction + ?Sized,
    G: SmoothFunction + ?Sized,
{
    if p.width() == 0.0 {
        return Ok(tau.value(p.xi));
    }
    Ok(a_minus_with_bracket(params, tau, bracket, p)? - nu_term(params, nu, p)?)
}

/// `τ(x) = ∫_0^x (x-s)^{-2β} Ī_{-β}[λ(x-s)] T(s) ds`.
pub fn tau_from_t<F: SmoothFunction + ?Sized>(params: &ProblemParameters, t_fn: &F, x: f64) -> f64 {
    let b = params.beta;
    integrate_against(t_fn.breakpoints(), 0.0, x, 0.0, -2.0 * b, |s| {
        let r = x - s;
        eb(-b, -params.lambda2 * r * r) * t_fn.value(s)
    })
}

/// `τ''(x)` for `τ` given by [`tau_from_t`]. The kernel
/// `k(r) = r^{-2β} Ī_{-β}(λr)` has `k(0) = k'(0) = 0`, so
/// `τ'' = λ²τ + 2β(2β+1) ∫_0^x (x-s)^{-2β-2} Ī_{-β-1}[λ(x-s)] T(s) ds`.
pub fn tau_second_derivative_from_t<F: SmoothFunction + ?Sized>(
    params: &ProblemParameters,
    t_fn: &F,
    x: f64,
) -> f64 {
    let b = params.beta;
    let singular = integrate_against(t_fn.breakpoints(), 0.0, x, 0.0, -2.0 * b - 2.0, |s| {
        let r = x - s;
        eb(-b - 1.0, -params.lambda2 * r * r) * t_fn.value(s)
    });
    params.lambda2 * tau_from_t(params, t_fn, x) + 2.0 * b * (2.0 * b + 1.0) * singular
}

/// Class `R₀₀^λ` solution at `p` from the densities `T` and `N`.
pub fn u_class_r00<F, G>(
    params: &ProblemParameters,
    t_fn: &F,
    n_fn: &G,
    p: CharacteristicPoint,
) -> f64
where
    F: SmoothFunction + ?Sized,
    G: SmoothFunction + ?Sized,
{
    let (xi, eta) = (p.xi, p.eta);
    let b = params.beta;
    let l2 = params.lambda2;
    let lower = if xi <= 0.0 {
        0.0
    } else if eta == xi {
        tau_from_t(params, t_fn, xi)
    } else {
        integrate_against(t_fn.breakpoints(), 0.0, xi, 0.0, -b, |s| {
            (eta - s).powf(-b) * eb(-b, -l2 * (eta - s) * (xi - s)) * t_fn.value(s)
        })
    };
    let upper = integrate_against(n_fn.breakpoints(), xi, eta, -b, -b, |s| {
        eb(-b, l2 * (eta - s) * (s - xi)) * n_fn.value(s)
    });
    lower + upper
}

/// Checks `ψ(0) = ψ'(0) = ψ''(0) = 0` on a polynomial `ψ`.
/// Returns the exponent `p` of `ψ'''(s/2) = s^p ψ₀(s)`, or `None` when
/// `ψ''' ≡ 0`.
pub fn psi_exponent(params: &ProblemParameters, psi: &Polynomial) -> Result<Option<usize>> {
    for (m, &c) in psi.coeffs().iter().take(3).enumerate() {
        if c != 0.0 {
            return Err(Error::Precondition(format!(
                "psi^({m})(0) = {} must vanish",
                c * (1..=m).product::<usize>() as f64
            )));
        }
    }
    let p = psi.derivative_poly(3).lowest_order();
    if let Some(p) = p {
        let bound = -2.0 - 2.0 * params.beta;
        if !(p as f64 > bound) {
            return Err(Error::Precondition(format!(
                "need p > {bound}, got p = {p}"
            )));
        }
    }
    Ok(p)
}

/// `F(u) = ∫_0^1 (1-z)^{1+β} ψ'''(zu/2) dz`.
fn psi_moment(beta: f64, psi3: &Polynomial, u: f64) -> f64 {
    gauss_jacobi_cached(PSI_ORDER, 1.0 + beta, 0.0)
        .expect("valid exponents")
        .integrate(|z| psi3.eval(0.5 * z * u))
}

/// `Φ(t) t^{-2-2β}`, a smooth function on `[0, 1]`:
///
/// ```text
/// Φ̃(t) = F(t)/(8Γ(2+β)) + λ²t²/(32Γ(2+β)) ∫_0^1 σ^{3+β} Ī_1[λt√(1-σ)] F(tσ) dσ
/// ```
///
/// This is `t^β A^{1,iλ}_{0t}[D^{1-β} ψ(t/2)]` with the operator kernel
/// reduced to a single `σ`-integral.
pub fn phi_reduced(params: &ProblemParameters, psi: &Polynomial, t: f64) -> Result<f64> {
    psi_exponent(params, psi)?;
    Ok(phi_reduced_unchecked(params, &psi.derivative_poly(3), t))
}

pub(crate) fn phi_reduced_unchecked(params: &ProblemParameters, psi3: &Polynomial, t: f64) -> f64 {
    if psi3.is_zero() {
        return 0.0;
    }
    let b = params.beta;
    let g = gamma_real(2.0 + b).expect("2 + beta > 1");
    let head = psi_moment(b, psi3, t) / (8.0 * g);
    if params.lambda2 == 0.0 || t == 0.0 {
        return head;
    }
    let l2t2 = params.lambda2 * t * t;
    let tail = gauss_jacobi_cached(PHI_S_ORDER, 0.0, 3.0 + b)
        .expect("valid exponents")
        .integrate(|s| eb(1.0, -l2t2 * (1.0 - s)) * psi_moment(b, psi3, t * s));
    head + l2t2 / (32.0 * g) * tail
}

/// `Φ(t) = t^{2+2β} Φ̃(t)`; see [`phi_reduced`].
pub fn phi_fn(params: &ProblemParameters, psi: &Polynomial, t: f64) -> Result<f64> {
    if t < 0.0 {
        return Err(Error::InvalidArgument(format!("Phi needs t >= 0, got {t}")));
    }
    if t == 0.0 {
        psi_exponent(params, psi)?;
        return Ok(0.0);
    }
    Ok(t.powf(2.0 + 2.0 * params.beta) * phi_reduced(params, psi, t)?)
}

/// An expanded `Φ` with kernel `J̄_1[λt√(s(1-s))]` and
/// a leading minus sign. Kept for comparison against [`phi_fn`].
pub fn phi_fn_expanded_j1(params: &ProblemParameters, psi: &Polynomial, t: f64) -> Result<f64> {
    psi_exponent(params, psi)?;
    if t <= 0.0 {
        return Ok(0.0);
    }
    let psi3 = psi.derivative_poly(3);
    let b = params.beta;
    let g = gamma_real(2.0 + b)?;
    let head = t.powf(2.0 + 2.0 * b) / (8.0 * g) * psi_moment(b, &psi3, t);
    let tail = gauss_jacobi_cached(PHI_S_ORDER, 0.0, 3.0 + b)?.integrate(|s| {
        eb(1.0, params.lambda2 * t * t * s * (1.0 - s)) * psi_moment(b, &psi3, t * s)
    });
    Ok(head - params.lambda2 * t.powf(4.0 + 2.0 * b) / (32.0 * g) * tail)
}

/// `t^β A^{1,μ}_{0t}[D^{1-β} ψ(t/2)]` with `μ² = operator_lambda2`, built
/// from the operator and the fractional derivative directly. Pass
/// `params.lambda2` for the `A^{1,λ}` reading and its negative for
/// `A^{1,iλ}`.
pub fn phi_operator_form(
    params: &ProblemParameters,
    psi: &Polynomial,
    operator_lambda2: f64,
    t: f64,
) -> Result<f64> {
    psi_exponent(params, psi)?;
    if t <= 0.0 {
        return Ok(0.0);
    }
    let half = Polynomial::new(
        psi.coeffs()
            .iter()
            .enumerate()
            .map(|(k, c)| c * 0.5f64.powi(k as i32))
            .collect(),
    );
    let q = 1.0 - params.beta;
    let inner = |s: f64| rl_derivative_q(q, &half, s).unwrap_or(f64::NAN);
    let value = t.powf(params.beta) * op_a(0.0, operator_lambda2, &inner, t)?;
    if value.is_nan() {
        return Err(Error::Quadrature(
            "fractional derivative of psi failed".into(),
        ));
    }
    Ok(value)
}

/// `T = γ₃ν + (2cos πβ/Γ(1-β)) Φ` on the shared grid.
pub fn t_from_nu(
    params: &ProblemParameters,
    nu: &GridFunction,
    phi_vals: &GridFunction,
) -> Result<GridFunction> {
    nu.combine(params.gamma3, phi_vals, params.phi_weight())
}

/// `N = T/(2cos πβ) - 4^{2β-1} γ₂ ν` on the shared grid.
pub fn n_from_t_nu(
    params: &ProblemParameters,
    t_vals: &GridFunction,
    nu: &GridFunction,
) -> Result<GridFunction> {
    let b = params.beta;
    t_vals.combine(
        1.0 / (2.0 * (PI * b).cos()),
        nu,
        -4f64.powf(2.0 * b - 1.0) * params.gamma2,
    )
}

/// `τ` as implied by `ν` and `Φ` through the hyperbolic trace relation.
pub fn tau_relation_14(
    params: &ProblemParameters,
    nu: &GridFunction,
    phi_vals: &GridFunction,
    x: f64,
) -> Result<f64> {
    let t_vals = t_from_nu(params, nu, phi_vals)?;
    Ok(tau_from_t(params, &t_vals, x))
}
