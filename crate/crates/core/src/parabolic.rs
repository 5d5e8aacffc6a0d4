//! The fractional parabolic subdomain `Ω₁ = (0,1) × (0,1)`.
//!
//! The fundamental solution is
//!
//! ```text
//! Γ(x, y) = 1/(2y) ∫_{|x|}^∞ f(ξ/y^ν) J₀(λ√(ξ² - x²)) dξ,   f(z) = e^{1,0}_{1,ν}(-z),  ν = δ/2
//! ```
//!
//! and the Green's function of the strip is its method-of-images sum. With
//! `ξ = y^ν z` the kernel depends on `y` only through the prefactor
//! `y^{ν-1}/2` and the Bessel argument `κ = λ² y^{2ν}`. `f` is tabulated once
//! per `ν`. For each `y` at which `u` is needed, `Γ(·, y)` is tabulated on a
//! grid in `|x|`, and all lattice sums are read from that table.
//!
//! Since `∫ Γ(x, y) dx = y^{δ-1}/Γ(δ)`, the initial term carries a factor
//! `Γ(δ)` so that `y^{1-δ} u → τ` as `y → 0`.

use std::cell::RefCell;
use std::collections::HashMap;
use std::sync::{Arc, Mutex, OnceLock};

use crate::error::{Error, Result};
use crate::functions::{GridFunction, Polynomial, SmoothFunction};
use crate::hyperbolic::ProblemParameters;
use crate::quadrature::{
    gauss_jacobi_cached, gauss_legendre_cached, product_weights, TriangularWeights,
};
use crate::specfun::{even_bessel, gamma_real, wright_e_neg_axis, SeriesTolerance};

/// Spacing of the `f` table in `z`.
const WRIGHT_STEP: f64 = 0.005;
/// `|f(z)| e^{L z}` below which the table is cut off.
const WRIGHT_CUTOFF: f64 = 1e-18;
const WRIGHT_Z_CAP: f64 = 400.0;
/// Level below which `f` is continued by its asymptotic form.
const SWITCH_LEVEL: f64 = 1e-15;
/// Table points per unit of `z = |x|/y^ν` in a per-`y` kernel table.
const KERNEL_POINTS_PER_UNIT: f64 = 32.0;
const PANEL_WIDTH: f64 = 1.0;
/// Relative size below which kernel table entries are treated as zero.
const TABLE_FLOOR: f64 = 1e-17;
const PANEL_ORDER: usize = 12;
const PANEL_TOL: f64 = 1e-14;
const PANEL_CAP: usize = 4000;
/// Gauss-Legendre points per panel in `∫ τ G dt`.
const PANEL_GL_ORDER: usize = 16;
const LATERAL_ORDER: usize = 32;
/// Finite-difference step for `G_t`.
pub const GT_STEP: f64 = 1e-5;
/// Default heights for the scaled-trace extrapolation. The expansion in
/// powers of `y^δ` has coefficients of size `λ_k^m` for the `x`-modes of
/// `τ`, so the heights must be small enough for the third power to be
/// negligible.
pub const TRACE_HEIGHTS: [f64; 3] = [4e-6, 2e-6, 1e-6];

/// Uniformly tabulated `f(z) = e^{1,0}_{1,ν}(-z)` and
/// `g(z) = e^{1,ν}_{1,ν}(-z) = ∫_z^∞ f`.
#[derive(Debug)]
struct WrightTable {
    f: Vec<f64>,
    g: Vec<f64>,
}

impl WrightTable {
    fn build(nu: f64, growth: f64) -> Result<Self> {
        let mut f = Vec::new();
        let mut g = Vec::new();
        // direct evaluation until the leading asymptotic term drops below
        // SWITCH_LEVEL, where the integral representation hits round-off
        let mut i = 0usize;
        loop {
            let z = i as f64 * WRIGHT_STEP;
            if z > 1.0 && wright_asymptotic(nu, z) < SWITCH_LEVEL {
                break;
            }
            if z > WRIGHT_Z_CAP {
                return Err(Error::NonDecay { panels: i });
            }
            f.push(wright_e_neg_axis(nu, 0.0, z)?);
            g.push(wright_e_neg_axis(nu, nu, z)?);
            i += 1;
        }
        let z_switch = (i - 1) as f64 * WRIGHT_STEP;
        let scale = f[i - 1] / wright_asymptotic(nu, z_switch);
        let mut tail = Vec::new();
        loop {
            let z = (i + tail.len()) as f64 * WRIGHT_STEP;
            if z > WRIGHT_Z_CAP {
                return Err(Error::NonDecay {
                    panels: i + tail.len(),
                });
            }
            let v = scale * wright_asymptotic(nu, z);
            tail.push(v);
            if v * (growth * z).exp() < WRIGHT_CUTOFF && tail.len() > 200 {
                break;
            }
        }
        // g(z) = ∫_z^∞ f on the asymptotic range, trapezoidal rule from the far end
        let mut g_tail = vec![0.0; tail.len()];
        for k in (0..tail.len() - 1).rev() {
            g_tail[k] = g_tail[k + 1] + 0.5 * WRIGHT_STEP * (tail[k] + tail[k + 1]);
        }
        f.extend_from_slice(&tail);
        g.extend_from_slice(&g_tail);
        Ok(Self { f, g })
    }

    fn z_max(&self) -> f64 {
        (self.f.len() - 1) as f64 * WRIGHT_STEP
    }

    fn f(&self, z: f64) -> f64 {
        cubic_uniform(&self.f, z / WRIGHT_STEP, false)
    }

    fn g(&self, z: f64) -> f64 {
        cubic_uniform(&self.g, z / WRIGHT_STEP, false)
    }
}

/// Leading term of `f(z) = νz M_ν(z)` for large `z`, where the M-Wright
/// function behaves like `Y^{ν-1/2} e^{-Y} / √(2π(1-ν))` with
/// `Y = (1-ν)(ν^ν z)^{1/(1-ν)}`. Exact when `ν = 1/2`.
fn wright_asymptotic(nu: f64, z: f64) -> f64 {
    let y = (1.0 - nu) * (nu.powf(nu) * z).powf(1.0 / (1.0 - nu));
    let a = 1.0 / (2.0 * std::f64::consts::PI * (1.0 - nu)).sqrt();
    nu * z * a * y.powf(nu - 0.5) * (-y).exp()
}

/// Four-point interpolation in a uniform table at fractional index `s`.
/// `even` extends the table by `v[-i] = v[i]`; otherwise the stencil is
/// shifted inward at the left end. Zero past the right end.
fn cubic_uniform(v: &[f64], s: f64, even: bool) -> f64 {
    let n = v.len();
    if !(s >= 0.0) || s > (n - 1) as f64 {
        return if s < 0.0 {
            cubic_uniform(v, -s, even)
        } else {
            0.0
        };
    }
    let i = (s.floor() as usize).min(n - 2);
    let start = if even {
        i as isize - 1
    } else {
        (i as isize - 1).max(0)
    };
    let start = start.min(n as isize - 4);
    let at = |k: isize| v[k.unsigned_abs()];
    let mut total = 0.0;
    for a in 0..4 {
        let xa = (start + a) as f64;
        let mut basis = 1.0;
        for b in 0..4 {
            if a != b {
                let xb = (start + b) as f64;
                basis *= (s - xb) / (xa - xb);
            }
        }
        total += basis * at(start + a);
    }
    total
}

type TableKey = (u64, u64);

fn wright_table(nu: f64, growth: f64) -> Result<Arc<WrightTable>> {
    static CACHE: OnceLock<Mutex<HashMap<TableKey, Arc<WrightTable>>>> = OnceLock::new();
    let key = (nu.to_bits(), growth.to_bits());
    let cache = CACHE.get_or_init(Default::default);
    if let Some(t) = cache.lock().expect("table cache poisoned").get(&key) {
        return Ok(Arc::clone(t));
    }
    let table = Arc::new(WrightTable::build(nu, growth)?);
    cache
        .lock()
        .expect("table cache poisoned")
        .insert(key, Arc::clone(&table));
    Ok(table)
}

/// The fundamental solution `Γ(x, y)` for given `δ ∈ (0, 1]` and `λ²`.
/// `δ = 1` is accepted so that the classical heat kernel can serve as a
/// reference.
#[derive(Debug, Clone)]
pub struct ParabolicKernel {
    delta: f64,
    lambda2: f64,
    nu: f64,
    table: Arc<WrightTable>,
}

impl ParabolicKernel {
    pub fn new(delta: f64, lambda2: f64) -> Result<Self> {
        if !(delta > 0.0 && delta <= 1.0) {
            return Err(Error::ParameterRange(format!(
                "kernel needs delta in (0, 1], got {delta}"
            )));
        }
        let nu = 0.5 * delta;
        let growth = (-lambda2).max(0.0).sqrt();
        Ok(Self {
            delta,
            lambda2,
            nu,
            table: wright_table(nu, growth)?,
        })
    }

    pub fn delta(&self) -> f64 {
        self.delta
    }

    pub fn lambda2(&self) -> f64 {
        self.lambda2
    }

    /// Largest `|x|/y^ν` at which `Γ` is not negligible.
    pub fn z_max(&self) -> f64 {
        self.table.z_max()
    }

    /// `∫_{z0}^∞ f(z) J̄₀(κ(z² - z0²)) dz` by Gauss-Legendre panels.
    fn reduced_integral(&self, z0: f64, kappa: f64) -> Result<f64> {
        let z_end = self.table.z_max();
        if z0 >= z_end {
            return Ok(0.0);
        }
        let rule = gauss_legendre_cached(PANEL_ORDER)?;
        let tol = SeriesTolerance::default();
        let mut total = 0.0;
        let mut small = 0usize;
        let failure = RefCell::new(None);
        for k in 0..PANEL_CAP {
            let lo = z0 + k as f64 * PANEL_WIDTH;
            if lo >= z_end {
                return Ok(total);
            }
            let hi = (lo + PANEL_WIDTH).min(z_end);
            let part = rule.integrate_on(lo, hi, |z| {
                let j0 = if kappa == 0.0 {
                    1.0
                } else {
                    match even_bessel(0.0, kappa * (z * z - z0 * z0), tol) {
                        Ok(v) => v,
                        Err(e) => {
                            failure.borrow_mut().get_or_insert(e);
                            0.0
                        }
                    }
                };
                self.table.f(z) * j0
            });
            if let Some(e) = failure.take() {
                return Err(e);
            }
            total += part;
            if part.abs() < PANEL_TOL {
                small += 1;
                if small >= 3 {
                    return Ok(total);
                }
            } else {
                small = 0;
            }
        }
        Err(Error::NonDecay { panels: PANEL_CAP })
    }

    /// `Γ(x, y)` by direct evaluation of the integral.
    pub fn gamma(&self, x: f64, y: f64) -> Result<f64> {
        if !(y > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "Gamma(x, y) needs y > 0, got {y}"
            )));
        }
        let scale = y.powf(self.nu);
        let kappa = self.lambda2 * scale * scale;
        Ok(0.5 * scale / y * self.reduced_integral(x.abs() / scale, kappa)?)
    }

    /// `Γ(x, y)` at `λ = 0` through the antiderivative `g`; no integration.
    pub fn gamma_closed_form(&self, x: f64, y: f64) -> Result<f64> {
        if self.lambda2 != 0.0 {
            return Err(Error::Precondition(
                "closed form requires lambda = 0".into(),
            ));
        }
        if !(y > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "Gamma(x, y) needs y > 0, got {y}"
            )));
        }
        let scale = y.powf(self.nu);
        Ok(0.5 * scale / y * self.table.g(x.abs() / scale))
    }

    /// Closed form when `λ = 0`, integral otherwise.
    fn gamma_any(&self, x: f64, y: f64) -> Result<f64> {
        if self.lambda2 == 0.0 {
            self.gamma_closed_form(x, y)
        } else {
            self.gamma(x, y)
        }
    }

    /// `Γ(·, y)` tabulated in `|x|`.
    pub fn table(&self, y: f64) -> Result<KernelTable> {
        if !(y > 0.0) {
            return Err(Error::InvalidArgument(format!(
                "kernel table needs y > 0, got {y}"
            )));
        }
        let scale = y.powf(self.nu);
        let kappa = self.lambda2 * scale * scale;
        let prefactor = 0.5 * scale / y;
        let n = (self.table.z_max() * KERNEL_POINTS_PER_UNIT).ceil() as usize + 1;
        let dz = 1.0 / KERNEL_POINTS_PER_UNIT;
        let mut values = Vec::with_capacity(n);
        let mut peak = 0.0_f64;
        let mut quiet = 0usize;
        for i in 0..n {
            let z0 = i as f64 * dz;
            let v = if kappa == 0.0 {
                self.table.g(z0)
            } else {
                self.reduced_integral(z0, kappa)?
            };
            values.push(prefactor * v);
            peak = peak.max(v.abs());
            // one unit of z below the noise floor ends the table
            quiet = if v.abs() < TABLE_FLOOR * peak {
                quiet + 1
            } else {
                0
            };
            if quiet > KERNEL_POINTS_PER_UNIT as usize && values.len() >= 4 {
                break;
            }
        }
        Ok(KernelTable {
            y,
            step: scale * dz,
            values,
        })
    }
}

/// `Γ(x, y)` for the parameters of the problem.
pub fn gamma_fundamental(params: &ProblemParameters, x: f64, y: f64) -> Result<f64> {
    ParabolicKernel::new(params.delta, params.lambda2)?.gamma(x, y)
}

/// `Γ(·, y)` on a uniform grid in `|x|`, with the image sum built on top.
#[derive(Debug, Clone)]
pub struct KernelTable {
    y: f64,
    step: f64,
    values: Vec<f64>,
}

impl KernelTable {
    pub fn y(&self) -> f64 {
        self.y
    }

    /// Largest tabulated `|x|`; `Γ` is taken as zero beyond it.
    pub fn x_max(&self) -> f64 {
        (self.values.len() - 1) as f64 * self.step
    }

    pub fn gamma(&self, x: f64) -> f64 {
        cubic_uniform(&self.values, x.abs() / self.step, true)
    }

    fn image_sum(&self, d: f64) -> f64 {
        let reach = self.x_max();
        let lo = ((-reach - d) / 2.0).ceil() as i64;
        let hi = ((reach - d) / 2.0).floor() as i64;
        (lo..=hi).map(|m| self.gamma(d + 2.0 * m as f64)).sum()
    }

    /// `G(x, y; t, 0) = Σ_m [Γ(x-t+2m, y) - Γ(x+t+2m, y)]`.
    pub fn green(&self, x: f64, t: f64) -> f64 {
        self.image_sum(x - t) - self.image_sum(x + t)
    }
}

fn pointwise_green(
    kernel: &ParabolicKernel,
    x: f64,
    y: f64,
    t: f64,
    terms: usize,
) -> Result<(f64, f64)> {
    let mut total = 0.0;
    let mut last = 0.0_f64;
    for m in -(terms as i64)..=(terms as i64) {
        let shift = 2.0 * m as f64;
        let term = kernel.gamma_any(x - t + shift, y)? - kernel.gamma_any(x + t + shift, y)?;
        total += term;
        if m.unsigned_abs() as usize == terms {
            last = last.max(term.abs());
        }
    }
    Ok((total, last))
}

/// Tail bound for the truncated image sum.
pub const IMAGE_TAIL_TOL: f64 = 1e-14;

/// `G(x, y; t, s)` truncated at `|m| ≤ terms`.
pub fn green_parabolic(
    params: &ProblemParameters,
    x: f64,
    y: f64,
    t: f64,
    s: f64,
    terms: usize,
) -> Result<f64> {
    if !(y > s) {
        return Err(Error::InvalidArgument(format!(
            "G needs y > s, got y = {y}, s = {s}"
        )));
    }
    let kernel = ParabolicKernel::new(params.delta, params.lambda2)?;
    let (g, last) = pointwise_green(&kernel, x, y - s, t, terms)?;
    if last >= IMAGE_TAIL_TOL {
        return Err(Error::InsufficientTerms {
            m: terms,
            term: last,
        });
    }
    Ok(g)
}

/// Scaled lateral traces `y^{1-δ}φ₁(y)` on `x = 0` and `y^{1-δ}φ₂(y)` on
/// `x = 1`, as polynomials.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct LateralTraces {
    pub left: Polynomial,
    pub right: Polynomial,
}

impl LateralTraces {
    pub fn is_zero(&self) -> bool {
        self.left.is_zero() && self.right.is_zero()
    }
}

/// Solution operator in `Ω₁` for a given trace `τ` and lateral data.
/// Per-height kernel tables are cached, so repeated evaluation on a grid
/// costs one table per distinct `y`.
#[derive(Debug)]
pub struct OmegaOne {
    params: ProblemParameters,
    kernel: ParabolicKernel,
    tau: GridFunction,
    traces: LateralTraces,
    gamma_delta: f64,
    y_floor: f64,
    tables: Mutex<HashMap<u64, Arc<KernelTable>>>,
}

/// Default lowest height at which `u` is evaluated directly.
pub const DEFAULT_Y_FLOOR: f64 = 1e-3;

impl OmegaOne {
    pub fn new(
        params: &ProblemParameters,
        tau: GridFunction,
        traces: LateralTraces,
    ) -> Result<Self> {
        Ok(Self {
            params: *params,
            kernel: ParabolicKernel::new(params.delta, params.lambda2)?,
            tau,
            traces,
            gamma_delta: gamma_real(params.delta)?,
            y_floor: DEFAULT_Y_FLOOR,
            tables: Mutex::new(HashMap::new()),
        })
    }

    pub fn with_y_floor(mut self, floor: f64) -> Self {
        self.y_floor = floor;
        self
    }

    pub fn params(&self) -> &ProblemParameters {
        &self.params
    }

    pub fn tau(&self) -> &GridFunction {
        &self.tau
    }

    pub fn kernel(&self) -> &ParabolicKernel {
        &self.kernel
    }

    fn table(&self, y: f64) -> Result<Arc<KernelTable>> {
        let key = y.to_bits();
        if let Some(t) = self.tables.lock().expect("table cache poisoned").get(&key) {
            return Ok(Arc::clone(t));
        }
        let t = Arc::new(self.kernel.table(y)?);
        self.tables
            .lock()
            .expect("table cache poisoned")
            .insert(key, Arc::clone(&t));
        Ok(t)
    }

    /// `Γ(δ) ∫_0^1 τ(t) G(x, y; t, 0) dt` on panels that are graded
    /// geometrically away from `t = x` and from both ends, starting at the
    /// kernel width `y^ν`.
    fn initial_term(&self, x: f64, y: f64) -> Result<f64> {
        let table = self.table(y)?;
        let width = y.powf(self.kernel.nu);
        let mut breaks = vec![0.0, x, 1.0];
        let mut d = width;
        while d < 1.0 {
            breaks.extend_from_slice(&[x - d, x + d, d, 1.0 - d]);
            d *= 2.0;
        }
        breaks.retain(|b| (0.0..=1.0).contains(b));
        breaks.sort_by(f64::total_cmp);
        breaks.dedup_by(|a, b| (*a - *b).abs() < 1e-12);
        let rule = gauss_legendre_cached(PANEL_GL_ORDER)?;
        let f = |t: f64| self.tau.value(t) * table.green(x, t);
        let total: f64 = breaks
            .windows(2)
            .map(|w| rule.integrate_on(w[0], w[1], f))
            .sum();
        Ok(self.gamma_delta * total)
    }

    /// `∫_0^y φ(s) G_t(x, y; edge, s) ds` with `φ(s) = s^{δ-1} scaled(s)`.
    fn lateral_term(&self, scaled: &Polynomial, edge: f64, x: f64, y: f64) -> Result<f64> {
        if scaled.is_zero() {
            return Ok(0.0);
        }
        let reach = (self.kernel.z_max() * y.powf(self.kernel.nu) / 2.0).ceil() as usize + 1;
        let failure = RefCell::new(None);
        let g_t = |s: f64| {
            let eval = |t: f64| pointwise_green(&self.kernel, x, y - s, t, reach).map(|(g, _)| g);
            match (eval(edge + GT_STEP), eval(edge - GT_STEP)) {
                (Ok(a), Ok(b)) => (a - b) / (2.0 * GT_STEP),
                (Err(e), _) | (_, Err(e)) => {
                    failure.borrow_mut().get_or_insert(e);
                    0.0
                }
            }
        };
        let mid = 0.5 * y;
        let head = gauss_jacobi_cached(LATERAL_ORDER, 0.0, self.params.delta - 1.0)?.integrate_on(
            0.0,
            mid,
            |s| scaled.eval(s) * g_t(s),
        );
        let tail = gauss_legendre_cached(LATERAL_ORDER)?.integrate_on(mid, y, |s| {
            s.powf(self.params.delta - 1.0) * scaled.eval(s) * g_t(s)
        });
        match failure.into_inner() {
            Some(e) => Err(e),
            None => Ok(head + tail),
        }
    }

    /// `u(x, y)` for `0 ≤ x ≤ 1`, `y ≥ y_floor`.
    pub fn u(&self, x: f64, y: f64) -> Result<f64> {
        if !(0.0..=1.0).contains(&x) {
            return Err(Error::InvalidArgument(format!("x = {x} outside [0, 1]")));
        }
        if !(y >= self.y_floor) {
            return Err(Error::Precondition(format!(
                "y = {y} is below the evaluation floor {}; use the scaled trace instead",
                self.y_floor
            )));
        }
        self.u_unchecked(x, y)
    }

    fn u_unchecked(&self, x: f64, y: f64) -> Result<f64> {
        let mut u = self.initial_term(x, y)?;
        if !self.traces.is_zero() {
            u += self.lateral_term(&self.traces.left, 0.0, x, y)?;
            u -= self.lateral_term(&self.traces.right, 1.0, x, y)?;
        }
        Ok(u)
    }

    /// `lim_{y→0} y^{1-δ} u(x, y)`, extrapolated from three heights under
    /// the expansion `τ + c₁y^δ + c₂y^{2δ} + …`. The heights may lie below
    /// the evaluation floor.
    pub fn scaled_trace(&self, x: f64, heights: [f64; 3]) -> Result<f64> {
        let d = self.params.delta;
        let mut rows = [[0.0; 3]; 3];
        let mut rhs = [0.0; 3];
        for (k, &y) in heights.iter().enumerate() {
            if !(y > 0.0) {
                return Err(Error::InvalidArgument(format!(
                    "extrapolation height {y} is not positive"
                )));
            }
            rows[k] = [1.0, y.powf(d), y.powf(2.0 * d)];
            rhs[k] = y.powf(1.0 - d) * self.u_unchecked(x, y)?;
        }
        solve3(rows, rhs).map(|v| v[0])
    }
}

fn solve3(a: [[f64; 3]; 3], b: [f64; 3]) -> Result<[f64; 3]> {
    let m = nalgebra::Matrix3::from_fn(|i, j| a[i][j]);
    let v = nalgebra::Vector3::from_column_slice(&b);
    let x = m
        .lu()
        .solve(&v)
        .ok_or_else(|| Error::InvalidArgument("extrapolation heights must be distinct".into()))?;
    Ok([x[0], x[1], x[2]])
}

/// `u(x, y)` at a single point; builds an [`OmegaOne`] on the fly.
pub fn u_omega1(
    params: &ProblemParameters,
    tau: &GridFunction,
    traces: &LateralTraces,
    x: f64,
    y: f64,
) -> Result<f64> {
    OmegaOne::new(params, tau.clone(), traces.clone())?.u(x, y)
}

/// The classical heat kernel `exp(-x²/4y)/(2√(πy))`.
pub fn heat_kernel(x: f64, y: f64) -> f64 {
    (-x * x / (4.0 * y)).exp() / (2.0 * (std::f64::consts::PI * y).sqrt())
}

/// Sample for the heat-kernel gate.
pub const GATE_X: [f64; 5] = [0.0, 0.1, 0.2, 0.35, 0.5];
pub const GATE_Y: [f64; 5] = [0.05, 0.1, 0.2, 0.4, 0.8];

/// Largest deviation of the integral form of `Γ` at `δ = 1`, `λ = 0` from
/// the heat kernel on the 5×5 gate sample.
pub fn heat_kernel_gate() -> Result<f64> {
    let kernel = ParabolicKernel::new(1.0, 0.0)?;
    let mut worst = 0.0_f64;
    for &x in &GATE_X {
        for &y in &GATE_Y {
            worst = worst.max((kernel.gamma(x, y)? - heat_kernel(x, y)).abs());
        }
    }
    Ok(worst)
}

/// Step of the uniform part of the grid behind [`pde_residual_omega1`].
pub const RESIDUAL_STEP: f64 = 1.0 / 64.0;

/// Residual of `u_xx - D^δ_{0y} u - λ²u` at `(x, y)`.
///
/// `u` is split as `y^{δ-1}τ(x) + r`. The first part is annihilated by
/// `D^δ`, and `D^δ r = d/dy I^{1-δ} r` is a central difference of a
/// fractional integral of `r` sampled on a height grid. The grid is
/// graded as `(j/N)³` on `[0, 1/8]` and uniform with step `h` above.
/// Near `y = 0` the remainder behaves like `Σ_k c_k y^{(k+1)δ-1}`. The two
/// leading powers are fitted to the lowest samples and integrated exactly.
/// What is left is integrated with product weights for `(Y - s)^{-δ}`.
/// `u_xx` is a central difference with the same step `h` = [`RESIDUAL_STEP`].
pub fn pde_residual_omega1(field: &OmegaOne, x: f64, y: f64) -> Result<f64> {
    pde_residual_with_step(field, x, y, RESIDUAL_STEP, RESIDUAL_STEP)
}

/// Top of the graded part of the height grid.
const GRADED_TOP: f64 = 0.125;
const GRADED_CELLS: usize = 48;

/// [`pde_residual_omega1`] with steps `hx` in `x` and `hy` in `y`.
pub fn pde_residual_with_step(field: &OmegaOne, x: f64, y: f64, hx: f64, hy: f64) -> Result<f64> {
    let offset = (y - GRADED_TOP) / hy;
    let ky = offset.round() as usize;
    if !(offset >= 1.0 - 1e-9)
        || (offset - ky as f64).abs() > 1e-9
        || !(x - hx >= 0.0 && x + hx <= 1.0)
    {
        return Err(Error::Precondition(format!(
            "residual point ({x}, {y}) must lie on the height grid 1/8 + k·{hy}, k ≥ 1, \
             and one step {hx} inside the sides"
        )));
    }
    let d = field.params().delta;
    let mut heights: Vec<f64> = (0..GRADED_CELLS)
        .map(|j| GRADED_TOP * (j as f64 / GRADED_CELLS as f64).powi(3))
        .collect();
    heights.extend((0..=ky + 1).map(|k| GRADED_TOP + k as f64 * hy));
    let centre = GRADED_CELLS + ky;
    let tau = field.tau().value(x);
    let mut r = vec![0.0; heights.len()];
    for k in 1..heights.len() {
        r[k] = field.u_unchecked(x, heights[k])? - heights[k].powf(d - 1.0) * tau;
    }
    let u0 = r[centre] + y.powf(d - 1.0) * tau;
    let weights = product_weights(&heights, -d)?;
    let lo = fractional_integral_of_remainder(&heights, &r, d, &weights, centre - 1)?;
    let hi = fractional_integral_of_remainder(&heights, &r, d, &weights, centre + 1)?;
    let ul = field.u_unchecked(x - hx, y)?;
    let ur = field.u_unchecked(x + hx, y)?;
    let u_xx = (ur - 2.0 * u0 + ul) / (hx * hx);
    let d_delta = (hi - lo) / (2.0 * hy);
    Ok(u_xx - d_delta - field.params().lambda2 * u0)
}

const REMAINDER_POWERS: usize = 2;

/// `I^{1-δ} r` at `heights[k]`, with `r` known at `heights[1..]`.
fn fractional_integral_of_remainder(
    heights: &[f64],
    r: &[f64],
    d: f64,
    weights: &TriangularWeights,
    k: usize,
) -> Result<f64> {
    let m = REMAINDER_POWERS.min(heights.len() - 1);
    let powers: Vec<f64> = (1..=m).map(|j| (j + 1) as f64 * d - 1.0).collect();
    let a = nalgebra::DMatrix::from_fn(m, m, |i, j| heights[i + 1].powf(powers[j]));
    let b = nalgebra::DVector::from_fn(m, |i, _| r[i + 1]);
    let c = a
        .lu()
        .solve(&b)
        .ok_or_else(|| Error::Precondition("singular fit near y = 0".into()))?;
    let model = |s: f64| -> f64 {
        powers
            .iter()
            .zip(c.iter())
            .map(|(p, c)| c * s.powf(*p))
            .sum()
    };
    let big_y = heights[k];
    let mut exact = 0.0;
    for (p, c) in powers.iter().zip(c.iter()) {
        exact += c * gamma_real(p + 1.0)? / gamma_real(p + 2.0 - d)? * big_y.powf(p + 1.0 - d);
    }
    // the remainder of the fit is taken to vanish at y = 0
    let rest: Vec<f64> = heights
        .iter()
        .zip(r)
        .enumerate()
        .map(|(j, (&s, &v))| if j == 0 { 0.0 } else { v - model(s) })
        .collect();
    Ok(exact + weights.apply(k, &rest[..=k]) / gamma_real(1.0 - d)?)
}
