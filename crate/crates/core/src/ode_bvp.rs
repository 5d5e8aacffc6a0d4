//! Dirichlet problem `τ'' - λ²τ = Γ(1+δ)ν`, `τ(0) = a`, `τ(1) = b`, solved
//! through its Green's function.

use crate::error::{Error, Result};
use crate::functions::{integrate_against, GridFunction, SmoothFunction};
use crate::hyperbolic::ProblemParameters;

/// Boundary values `τ(0) = a`, `τ(1) = b`.
#[derive(Debug, Clone, Copy, PartialEq, Default)]
pub struct BvpData {
    pub a: f64,
    pub b: f64,
}

/// `|λ²|` below which [`s_fn`] sums its power series.
pub const SERIES_THRESHOLD: f64 = 1.0;

/// `S(λ², u) = sinh(λu)/λ`, real for either sign of `λ²`.
pub fn s_fn(lambda2: f64, u: f64) -> f64 {
    if lambda2.abs() < SERIES_THRESHOLD {
        let w = lambda2 * u * u;
        let mut term = u;
        let mut sum = u;
        for k in 1..40 {
            term *= w / ((2 * k) as f64 * (2 * k + 1) as f64);
            sum += term;
            if term.abs() <= 1e-17 * sum.abs() {
                break;
            }
        }
        sum
    } else if lambda2 > 0.0 {
        let l = lambda2.sqrt();
        (l * u).sinh() / l
    } else {
        let m = (-lambda2).sqrt();
        (m * u).sin() / m
    }
}

/// Green's function of `d²/dx² - λ²` with zero Dirichlet data on `[0, 1]`.
pub fn green_g(params: &ProblemParameters, x: f64, t: f64) -> f64 {
    let l2 = params.lambda2;
    let (lo, hi) = if x <= t { (x, t) } else { (t, x) };
    s_fn(l2, lo) * s_fn(l2, hi - 1.0) / s_fn(l2, 1.0)
}

fn check_denominator(params: &ProblemParameters) -> Result<()> {
    if s_fn(params.lambda2, 1.0).abs() < 1e-12 {
        return Err(Error::SingularSpectralParameter(params.lambda2));
    }
    Ok(())
}

/// `∫_0^1 G(x,t) f(t) dt`, split at the kink `t = x`.
pub fn green_apply<F: SmoothFunction + ?Sized>(params: &ProblemParameters, f: &F, x: f64) -> f64 {
    let breaks = f.breakpoints();
    let g = |t: f64| green_g(params, x, t) * f.value(t);
    integrate_against(breaks, 0.0, x, 0.0, 0.0, g) + integrate_against(breaks, x, 1.0, 0.0, 0.0, g)
}

/// `τ = a + (b-a)x + Γ(1+δ)∫Gν + λ²∫G(a + (b-a)t)` on the nodes of `nu`.
pub fn solve_bvp_17(
    params: &ProblemParameters,
    bvp: BvpData,
    nu: &GridFunction,
) -> Result<GridFunction> {
    check_denominator(params)?;
    let gd = params.gamma_one_plus_delta();
    let BvpData { a, b } = bvp;
    let linear = |t: f64| a + t * (b - a);
    let lifted = params.lambda2 != 0.0 && (a != 0.0 || b != 0.0);
    Ok(nu.map(|x, _| {
        let mut v = linear(x) + gd * green_apply(params, nu, x);
        if lifted {
            v += params.lambda2 * green_apply(params, &linear, x);
        }
        v
    }))
}

/// `τ = Γ(1+δ) ∫ G ν`, the `a = b = 0` case of [`solve_bvp_17`].
pub fn tau_from_nu_18(params: &ProblemParameters, nu: &GridFunction) -> Result<GridFunction> {
    solve_bvp_17(params, BvpData::default(), nu)
}
