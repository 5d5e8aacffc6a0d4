//! Self-check suites run by the `verify` command. Each returns one report
//! line; none of them depend on the boundary data of a run.

use crate::error::Result;
use crate::fracops::{lemma1_lhs, lemma1_rhs, op_a, op_b};
use crate::functions::uniform_nodes;
use crate::functions::GridFunction;
use crate::hyperbolic::{derive_parameters, ProblemParameters};
use crate::parabolic::heat_kernel_gate;
use crate::pipeline::{DiagnosticsReport, HEAT_GATE_TOL};
use crate::quadrature::beta_fn;
use crate::volterra::{
    kernel_coefficient, kernel_exponent, solve_volterra_20, solve_weakly_singular,
};

pub const INVERSE_TOL: f64 = 1e-7;
pub const IDENTITY_TOL: f64 = 1e-6;
pub const ABEL_TOL: f64 = 1e-4;
pub const SMOOTH_VOLTERRA_TOL: f64 = 1e-5;
pub const MIN_ORDER: f64 = 1.5;

/// Largest of `|A∘B[g] - g|` and `|B∘A[g] - g|` over 50 points of `[k, 1]`
/// for `g ∈ {x², x³(1-x)}`, `k ∈ {0, 0.3}` and `λ² ∈ {-4, 0, 4}`.
pub fn operator_inverse_error() -> Result<f64> {
    let square = |t: f64| t * t;
    let quartic = |t: f64| t * t * t * (1.0 - t);
    let gs: [&dyn Fn(f64) -> f64; 2] = [&square, &quartic];
    let mut worst = 0.0_f64;
    for g in gs {
        for k in [0.0, 0.3] {
            for l2 in [-4.0, 0.0, 4.0] {
                let bg = |t: f64| op_b(k, l2, &g, t).unwrap_or(f64::NAN);
                let ag = |t: f64| op_a(k, l2, &g, t).unwrap_or(f64::NAN);
                for i in 0..50 {
                    let x = k + (1.0 - k) * i as f64 / 49.0;
                    let ab = op_a(k, l2, &bg, x)?;
                    let ba = op_b(k, l2, &ag, x)?;
                    worst = worst.max((ab - g(x)).abs()).max((ba - g(x)).abs());
                }
            }
        }
    }
    Ok(worst)
}

/// Largest difference between the two sides of the fractional identity for
/// `g = x²(1-x)`, `β = -0.75`, `λ² ∈ {0, 1}` at `x = 0.05, 0.10, …, 1`.
pub fn fractional_identity_error() -> Result<f64> {
    let g = |t: f64| t * t * (1.0 - t);
    let mut worst = 0.0_f64;
    for l2 in [0.0, 1.0] {
        for i in 1..=20 {
            let x = i as f64 / 20.0;
            worst =
                worst.max((lemma1_lhs(-0.75, l2, &g, x)? - lemma1_rhs(-0.75, l2, &g, x)?).abs());
        }
    }
    Ok(worst)
}

/// `v - ∫_0^x (x-s)^{-1/2} v(s) ds = 1 - 2√x` has `v ≡ 1`; max error on 401 nodes.
pub fn abel_error() -> Result<f64> {
    let nodes = uniform_nodes(401);
    let rhs: Vec<f64> = nodes.iter().map(|x| 1.0 - 2.0 * x.sqrt()).collect();
    let v = solve_weakly_singular(&nodes, -0.5, 1.0, |_| 1.0, &rhs)?;
    Ok(v.iter().map(|x| (x - 1.0).abs()).fold(0.0, f64::max))
}

/// Manufactured density of the smooth Volterra case.
pub const SMOOTH_DENSITY: [f64; 4] = [1.0, 1.0, -0.5, 1.0 / 3.0];

/// Right-hand side that makes [`SMOOTH_DENSITY`] the exact solution of the
/// `ν` equation at `λ = 0`, where the kernel is a pure power.
pub fn smooth_rhs(params: &ProblemParameters, x: f64) -> f64 {
    let sigma = kernel_exponent(params);
    let c = kernel_coefficient(params);
    SMOOTH_DENSITY
        .iter()
        .enumerate()
        .map(|(n, a)| {
            let n = n as f64;
            a * (x.powf(n) - c * beta_fn(sigma + 1.0, n + 1.0) * x.powf(n + sigma + 1.0))
        })
        .sum()
}

/// Max error of the smooth manufactured case on `n_nodes` nodes.
pub fn smooth_volterra_error(params: &ProblemParameters, n_nodes: usize) -> Result<f64> {
    let nodes = uniform_nodes(n_nodes);
    let q = GridFunction::sample(&nodes, |x| smooth_rhs(params, x))?;
    let nu = solve_volterra_20(params, &q)?;
    let exact = |x: f64| SMOOTH_DENSITY.iter().rev().fold(0.0, |acc, a| acc * x + a);
    Ok(nodes
        .iter()
        .zip(nu.values())
        .map(|(&x, v)| (v - exact(x)).abs())
        .fold(0.0, f64::max))
}

/// Errors on 101, 201 and 401 nodes and the two observed orders.
pub fn smooth_volterra_convergence(params: &ProblemParameters) -> Result<([f64; 3], [f64; 2])> {
    let e = [
        smooth_volterra_error(params, 101)?,
        smooth_volterra_error(params, 201)?,
        smooth_volterra_error(params, 401)?,
    ];
    Ok((e, [(e[0] / e[1]).log2(), (e[1] / e[2]).log2()]))
}

/// Runs every suite and collects the results.
pub fn run_all() -> Result<DiagnosticsReport> {
    let mut report = DiagnosticsReport::default();
    report.push("operator_inverse", operator_inverse_error()?, INVERSE_TOL);
    report.push(
        "fractional_identity",
        fractional_identity_error()?,
        IDENTITY_TOL,
    );
    report.push("volterra_abel", abel_error()?, ABEL_TOL);
    let params = derive_parameters(-0.25, 0.5, 0.0)?;
    let (errors, orders) = smooth_volterra_convergence(&params)?;
    report.push("volterra_smooth", errors[2], SMOOTH_VOLTERRA_TOL);
    let order = orders[0].min(orders[1]);
    report.push_lower_bound("volterra_order", order, MIN_ORDER);
    report.push("heat_kernel_gate", heat_kernel_gate()?, HEAT_GATE_TOL);
    Ok(report)
}

#[cfg(test)]
mod tests {
    use super::*;

    #[test]
    fn smooth_rhs_is_consistent_at_origin() {
        let p = derive_parameters(-0.25, 0.5, 0.0).unwrap();
        assert_eq!(smooth_rhs(&p, 0.0), 1.0);
    }

    #[test]
    fn abel_case() {
        assert!(abel_error().unwrap() < ABEL_TOL);
    }

    #[test]
    fn smooth_case_converges() {
        let p = derive_parameters(-0.25, 0.5, 0.0).unwrap();
        let (e, orders) = smooth_volterra_convergence(&p).unwrap();
        assert!(e[2] < SMOOTH_VOLTERRA_TOL, "{e:?}");
        assert!(orders.iter().all(|&o| o >= MIN_ORDER), "{orders:?}");
    }
}
