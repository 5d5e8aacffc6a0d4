//! Gamma function, normalized Bessel functions in squared-argument form and
//! the two-parameter Wright-type series `e^{mu,delta}_{alpha,beta}`.
//!
//! The normalized Bessel function `J̄_γ(z) = Γ(γ+1) (z/2)^{-γ} J_γ(z)` is even
//! in `z`, so every kernel in the solver is written in terms of `w = z²`.
//! [`even_bessel`] with `w >= 0` gives `J̄_γ(√w)`, and with `w < 0` it gives the
//! modified function `Ī_γ(√-w)`. Real and purely imaginary spectral parameters
//! are then handled by the sign of `λ²` alone.

use std::f64::consts::PI;

use crate::error::{Error, Result};

/// Stopping rule shared by the power-series evaluators.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct SeriesTolerance {
    pub rel_tol: f64,
    pub max_terms: usize,
}

impl Default for SeriesTolerance {
    fn default() -> Self {
        Self {
            rel_tol: 1e-14,
            max_terms: 200,
        }
    }
}

impl SeriesTolerance {
    pub fn new(rel_tol: f64, max_terms: usize) -> Result<Self> {
        if !(rel_tol > 0.0) || max_terms == 0 {
            return Err(Error::InvalidArgument(format!(
                "series tolerance needs rel_tol > 0 and max_terms >= 1 (got {rel_tol}, {max_terms})"
            )));
        }
        Ok(Self { rel_tol, max_terms })
    }
}

// Lanczos approximation, g = 7, n = 9.
const LANCZOS_G: f64 = 7.0;
const LANCZOS: [f64; 9] = [
    0.999_999_999_999_809_9,
    676.520_368_121_885_1,
    -1_259.139_216_722_402_8,
    771.323_428_777_653_1,
    -176.615_029_162_140_6,
    12.507_343_278_686_905,
    -0.138_571_095_265_720_12,
    9.984_369_578_019_572e-6,
    1.505_632_735_149_311_6e-7,
];

fn is_nonpositive_integer(x: f64) -> bool {
    x <= 0.0 && x == x.floor()
}

/// `sin(πx)` with the argument reduced before multiplying by π, so that
/// integers give exact zeros.
pub fn sin_pi(x: f64) -> f64 {
    let r = x.rem_euclid(2.0);
    if r == 0.0 || r == 1.0 {
        return 0.0;
    }
    if r < 0.5 {
        (PI * r).sin()
    } else if r < 1.5 {
        (PI * (1.0 - r)).sin()
    } else {
        (PI * (r - 2.0)).sin()
    }
}

fn lanczos_sum(x: f64) -> f64 {
    let mut a = LANCZOS[0];
    for (i, c) in LANCZOS.iter().enumerate().skip(1) {
        a += c / (x + i as f64);
    }
    a
}

/// `Γ(x)` for real `x`; reflection is used below 1/2.
pub fn gamma_real(x: f64) -> Result<f64> {
    if is_nonpositive_integer(x) {
        return Err(Error::GammaPole(x));
    }
    Ok(gamma_unchecked(x))
}

fn gamma_unchecked(x: f64) -> f64 {
    if x < 0.5 {
        return PI / (sin_pi(x) * gamma_unchecked(1.0 - x));
    }
    let x = x - 1.0;
    let t = x + LANCZOS_G + 0.5;
    // split the power so it does not overflow before exp(-t) brings it back
    let half = t.powf(0.5 * (x + 0.5));
    (2.0 * PI).sqrt() * half * (half * (-t).exp()) * lanczos_sum(x)
}

/// `ln Γ(x)` for `x > 0`.
pub fn ln_gamma(x: f64) -> f64 {
    debug_assert!(x > 0.0);
    if x < 0.5 {
        return (PI / sin_pi(x).abs()).ln() - ln_gamma(1.0 - x);
    }
    let x = x - 1.0;
    let t = x + LANCZOS_G + 0.5;
    0.5 * (2.0 * PI).ln() + (x + 0.5) * t.ln() - t + lanczos_sum(x).ln()
}

/// `1/Γ(x)`, an entire function: zero at the poles of `Γ`.
pub fn recip_gamma(x: f64) -> f64 {
    if is_nonpositive_integer(x) {
        return 0.0;
    }
    if x > 170.0 {
        return (-ln_gamma(x)).exp();
    }
    if x < 0.5 {
        let s = sin_pi(x);
        if 1.0 - x > 170.0 {
            return s.signum() * (s.abs().ln() + ln_gamma(1.0 - x) - PI.ln()).exp();
        }
        return s * gamma_unchecked(1.0 - x) / PI;
    }
    1.0 / gamma_unchecked(x)
}

/// Sign and `ln |1/Γ(x)|`. Poles give sign 0.
fn recip_gamma_parts(x: f64) -> (f64, f64) {
    if is_nonpositive_integer(x) {
        return (0.0, f64::NEG_INFINITY);
    }
    if x > 0.0 {
        return (1.0, -ln_gamma(x));
    }
    let s = sin_pi(x);
    (s.signum(), s.abs().ln() + ln_gamma(1.0 - x) - PI.ln())
}

/// Upper bound of `ln |1/Γ(x)|` that ignores the `sin(πx)` factor, so it
/// stays finite on poles and decreases smoothly along a series.
fn recip_gamma_log_bound(x: f64) -> f64 {
    if x > 0.0 {
        -ln_gamma(x)
    } else {
        ln_gamma(1.0 - x) - PI.ln()
    }
}

/// `Γ(γ+1) Σ (-w/4)^m / (m! Γ(m+γ+1))`, i.e. `J̄_γ(√w)` for `w >= 0` and
/// `Ī_γ(√-w)` for `w < 0`.
///
/// Summed by the term recurrence, no gamma evaluations. Intended for the
/// moderate `|w|` that the solver produces (a few hundred at most).
pub fn even_bessel(gamma: f64, w: f64, tol: SeriesTolerance) -> Result<f64> {
    if gamma < 0.0 && gamma == gamma.floor() {
        return Err(Error::InvalidArgument(format!(
            "normalized Bessel order {gamma} is a negative integer"
        )));
    }
    let q = -0.25 * w;
    let mut term = 1.0_f64;
    let mut sum = 1.0_f64;
    let mut peak = 1.0_f64;
    for m in 0..tol.max_terms {
        let mf = m as f64;
        term *= q / ((mf + 1.0) * (mf + gamma + 1.0));
        sum += term;
        peak = peak.max(term.abs());
        let next_ratio = q.abs() / ((mf + 2.0) * (mf + gamma + 2.0).abs());
        if next_ratio < 1.0
            && (term.abs() <= tol.rel_tol * sum.abs() || term.abs() <= f64::EPSILON * peak)
        {
            return Ok(sum);
        }
    }
    Err(Error::NonConvergence {
        what: "even_bessel",
        max_terms: tol.max_terms,
    })
}

/// Shorthand with the default tolerance. Panics only for a negative-integer
/// order or a non-convergent argument, neither of which the solver produces.
#[inline]
pub(crate) fn eb(gamma: f64, w: f64) -> f64 {
    even_bessel(gamma, w, SeriesTolerance::default())
        .unwrap_or_else(|e| panic!("even_bessel({gamma}, {w}): {e}"))
}

struct WrightSeries {
    sum: f64,
    peak: f64,
}

fn wright_series(
    mu: f64,
    delta2: f64,
    a: f64,
    b: f64,
    z: f64,
    tol: SeriesTolerance,
) -> Result<WrightSeries> {
    if z == 0.0 {
        let v = recip_gamma(mu) * recip_gamma(delta2);
        return Ok(WrightSeries {
            sum: v,
            peak: v.abs(),
        });
    }
    let ln_z = z.abs().ln();
    let neg = z < 0.0;
    let mut sum = 0.0_f64;
    let mut peak = 0.0_f64;
    let mut peak_bound = f64::NEG_INFINITY;
    let mut prev_bound = f64::INFINITY;
    let mut quiet = 0usize;
    for k in 0..tol.max_terms {
        let kf = k as f64;
        let (s1, l1) = recip_gamma_parts(mu + a * kf);
        let (s2, l2) = recip_gamma_parts(delta2 - b * kf);
        let sign = if neg && k % 2 == 1 { -1.0 } else { 1.0 };
        let term = if s1 == 0.0 || s2 == 0.0 {
            0.0
        } else {
            sign * s1 * s2 * (kf * ln_z + l1 + l2).exp()
        };
        sum += term;
        peak = peak.max(term.abs());
        let bound =
            kf * ln_z + recip_gamma_log_bound(mu + a * kf) + recip_gamma_log_bound(delta2 - b * kf);
        peak_bound = peak_bound.max(bound);
        let small =
            bound <= (tol.rel_tol * sum.abs()).ln() || bound <= f64::EPSILON.ln() + peak_bound;
        if k > 0 && bound < prev_bound && small {
            quiet += 1;
            if quiet >= 3 {
                return Ok(WrightSeries { sum, peak });
            }
        } else {
            quiet = 0;
        }
        prev_bound = bound;
    }
    Err(Error::NonConvergence {
        what: "wright_e",
        max_terms: tol.max_terms,
    })
}

/// `e^{mu,delta}_{alpha,beta}(z) = Σ z^k / (Γ(mu + alpha k) Γ(delta - beta k))`
/// with `alpha = a > beta = b`. Poles of either gamma factor give zero terms.
pub fn wright_e(mu: f64, delta2: f64, a: f64, b: f64, z: f64, tol: SeriesTolerance) -> Result<f64> {
    if !(a > b) {
        return Err(Error::InvalidArgument(format!(
            "wright_e needs alpha > beta (got {a} <= {b})"
        )));
    }
    wright_series(mu, delta2, a, b, z, tol).map(|s| s.sum)
}

/// Peak term magnitude above which the alternating series for
/// [`wright_e_neg_axis`] loses too many digits and the contour integral is
/// used instead.
const SERIES_PEAK_LIMIT: f64 = 10.0;

/// `e^{1,delta}_{1,b}(-z)` for `z >= 0`, `0 < b < 1`, `delta < 1`.
///
/// Small `z` uses the series. For large `z` the alternating series cancels
/// catastrophically, so the Hankel representation of `1/Γ` is collapsed onto
/// the negative real axis:
///
/// `e(-z) = (1/π) ∫_0^∞ exp(-r - z r^b cos πb) r^{-delta} sin(π delta + z r^b sin πb) dr`
///
/// which is evaluated after the substitution `r = s^{1/b}`.
pub fn wright_e_neg_axis(b: f64, delta2: f64, z: f64) -> Result<f64> {
    if !(b > 0.0 && b < 1.0) || !(delta2 < 1.0) || z < 0.0 {
        return Err(Error::InvalidArgument(format!(
            "wright_e_neg_axis needs 0 < b < 1, delta < 1, z >= 0 (got b={b}, delta={delta2}, z={z})"
        )));
    }
    if let Ok(s) = wright_series(1.0, delta2, 1.0, b, -z, SeriesTolerance::new(1e-16, 400)?) {
        if s.peak <= SERIES_PEAK_LIMIT {
            return Ok(s.sum);
        }
    }
    Ok(wright_neg_axis_integral(b, delta2, z))
}

fn wright_neg_axis_integral(b: f64, delta2: f64, z: f64) -> f64 {
    use crate::quadrature::{gauss_jacobi_cached, gauss_legendre_cached};
    let (sin_b, cos_b) = (PI * b).sin_cos();
    let exponent = (1.0 - delta2) / b - 1.0;
    // exp(-s^{1/b}) < 1e-20 past this point
    let mut upper = 46.0_f64.powf(b);
    if cos_b > 0.0 && z > 0.0 {
        upper = upper.min(46.0 / (z * cos_b));
    }
    let smooth = |s: f64| {
        let r = s.powf(1.0 / b);
        (-r - z * s * cos_b).exp() * (PI * delta2 + z * s * sin_b).sin()
    };
    let panels = ((z * upper * sin_b / 2.0).ceil() as usize).max(8);
    let width = upper / panels as f64;
    let first = gauss_jacobi_cached(24, 0.0, exponent).expect("valid Jacobi exponents");
    let mut total = first.integrate_on(0.0, width, smooth);
    let gl = gauss_legendre_cached(24).expect("valid order");
    for p in 1..panels {
        let lo = p as f64 * width;
        total += gl.integrate_on(lo, lo + width, |s| s.powf(exponent) * smooth(s));
    }
    total / (PI * b)
}
