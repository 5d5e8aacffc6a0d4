//! End-to-end solve: boundary data in, sampled field and diagnostics out.

use std::fmt::Write as _;
use std::fs;
use std::path::Path;

use crate::error::{Error, Result};
use crate::functions::{
    integrate_against, uniform_nodes, GridFunction, Polynomial, SmoothFunction,
};
use crate::hyperbolic::{
    derive_parameters, n_from_t_nu, phi_fn, phi_fn_expanded_j1, phi_operator_form, psi_exponent,
    t_from_nu, tau_from_t, tau_relation_14, u_class_r00, CharacteristicPoint, ProblemParameters,
};
use crate::ode_bvp::tau_from_nu_18;
use crate::parabolic::{
    heat_kernel_gate, pde_residual_omega1, LateralTraces, OmegaOne, TRACE_HEIGHTS,
};
use crate::specfun::gamma_real;
use crate::volterra::{assemble_q, solve_volterra_20, verify_19, VERIFY_POINTS};

/// Highest admissible degree of `ψ`.
pub const MAX_PSI_DEGREE: usize = 12;

/// Data on `AC` and on the lateral sides of `Ω₁`.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct BoundaryData {
    /// `ψ` on `[0, 1/2]`.
    pub psi: Polynomial,
    /// `y^{1-δ}φ₁(y)` on `x = 0`.
    pub trace1: Polynomial,
    /// `y^{1-δ}φ₂(y)` on `x = 1`.
    pub trace2: Polynomial,
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct GridConfig {
    pub line_n: usize,
    pub omega1_nx: usize,
    pub omega1_ny: usize,
    pub omega2_n: usize,
}

impl Default for GridConfig {
    fn default() -> Self {
        Self {
            line_n: 401,
            omega1_nx: 101,
            omega1_ny: 101,
            omega2_n: 101,
        }
    }
}

impl GridConfig {
    fn check(&self) -> Result<()> {
        let small = [
            ("line_n", self.line_n, 11),
            ("omega1_nx", self.omega1_nx, 2),
            ("omega1_ny", self.omega1_ny, 2),
            ("omega2_n", self.omega2_n, 7),
        ];
        for (name, v, min) in small {
            if v < min {
                return Err(Error::Config(format!(
                    "grids.{name} = {v} is below the minimum {min}"
                )));
            }
        }
        Ok(())
    }
}

#[derive(Debug, Clone, Copy, PartialEq)]
pub struct Tolerances {
    pub ac: f64,
    pub gluing: f64,
    pub relation14: f64,
    pub pde: f64,
}

impl Default for Tolerances {
    fn default() -> Self {
        Self {
            ac: 1e-3,
            gluing: 1e-3,
            relation14: 1e-3,
            pde: 1e-2,
        }
    }
}

/// Fixed tolerances that are not configurable.
pub const TAU_SLOPE_TOL: f64 = 1e-2;
pub const HEAT_GATE_TOL: f64 = 1e-6;

/// Lowest height of the `Ω₁` sample grid.
pub const OMEGA1_Y_MIN: f64 = 0.01;

/// Outcome of [`validate_inputs`]: empty when the data are admissible.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct ValidationReport {
    pub violations: Vec<String>,
}

impl ValidationReport {
    pub fn accepted(&self) -> bool {
        self.violations.is_empty()
    }
}

/// Checks the hypotheses under which the solution exists and is unique.
pub fn validate_inputs(
    alpha: f64,
    delta: f64,
    lambda2: f64,
    data: &BoundaryData,
) -> ValidationReport {
    let mut violations = Vec::new();
    let params = match derive_parameters(alpha, delta, lambda2) {
        Ok(p) => Some(p),
        Err(e) => {
            violations.push(e.to_string());
            None
        }
    };
    if data.psi.degree().unwrap_or(0) > MAX_PSI_DEGREE {
        violations.push(format!("psi has degree above {MAX_PSI_DEGREE}"));
    }
    if let Some(p) = params {
        if let Err(e) = psi_exponent(&p, &data.psi) {
            violations.push(e.to_string());
        }
    }
    for (name, tr) in [("trace1", &data.trace1), ("trace2", &data.trace2)] {
        if tr.coeffs().first().is_some_and(|&c| c != 0.0) {
            violations.push(format!("{name}: the scaled trace must vanish at y = 0"));
        }
    }
    ValidationReport { violations }
}

/// `u` on the tensor grid of `Ω₁`, indexed `u[i][j]` for `(xs[i], ys[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct Omega1Samples {
    pub xs: Vec<f64>,
    pub ys: Vec<f64>,
    pub u: Vec<Vec<f64>>,
}

/// `u` on the triangle `0 ≤ ξ ≤ η ≤ 1`; `u[i][j - i]` belongs to
/// `(nodes[i], nodes[j])`.
#[derive(Debug, Clone, PartialEq)]
pub struct Omega2Samples {
    pub nodes: Vec<f64>,
    pub u: Vec<Vec<f64>>,
}

impl Omega2Samples {
    pub fn at(&self, i: usize, j: usize) -> f64 {
        self.u[i][j - i]
    }

    pub fn max_abs(&self) -> f64 {
        self.u.iter().flatten().fold(0.0, |m, v| m.max(v.abs()))
    }
}

/// The one-dimensional functions produced along the way.
#[derive(Debug, Clone, PartialEq)]
pub struct TraceRecords {
    pub tau: GridFunction,
    pub nu: GridFunction,
    pub t: GridFunction,
    pub n: GridFunction,
    pub phi: GridFunction,
    pub q: GridFunction,
}

#[derive(Debug, Clone, PartialEq)]
pub struct SolutionField {
    pub omega1: Omega1Samples,
    pub omega2: Omega2Samples,
    pub traces: TraceRecords,
}

#[derive(Debug, Clone, PartialEq)]
pub struct DiagnosticEntry {
    pub name: String,
    pub value: f64,
    pub tolerance: f64,
    pub pass: bool,
}

/// Named residuals with pass/fail, plus informational values that carry no
/// tolerance.
#[derive(Debug, Clone, PartialEq, Default)]
pub struct DiagnosticsReport {
    pub entries: Vec<DiagnosticEntry>,
    pub notes: Vec<(String, f64)>,
}

impl DiagnosticsReport {
    /// Adds an entry that passes when `value < tolerance`.
    pub fn push(&mut self, name: &str, value: f64, tolerance: f64) {
        self.entries.push(DiagnosticEntry {
            name: name.to_string(),
            value,
            tolerance,
            pass: value.is_finite() && value < tolerance,
        });
    }

    /// Adds an entry that passes when `value >= bound`; the bound is printed
    /// in the tolerance column.
    pub fn push_lower_bound(&mut self, name: &str, value: f64, bound: f64) {
        self.entries.push(DiagnosticEntry {
            name: name.to_string(),
            value,
            tolerance: bound,
            pass: value.is_finite() && value >= bound,
        });
    }

    pub fn note(&mut self, name: &str, value: f64) {
        self.notes.push((name.to_string(), value));
    }

    pub fn get(&self, name: &str) -> Option<&DiagnosticEntry> {
        self.entries.iter().find(|e| e.name == name)
    }

    pub fn note_value(&self, name: &str) -> Option<f64> {
        self.notes.iter().find(|(n, _)| n == name).map(|(_, v)| *v)
    }

    pub fn all_pass(&self) -> bool {
        self.entries.iter().all(|e| e.pass)
    }

    pub fn failures(&self) -> Vec<&str> {
        self.entries
            .iter()
            .filter(|e| !e.pass)
            .map(|e| e.name.as_str())
            .collect()
    }

    /// One `name,value,tolerance,PASS|FAIL` line per entry, followed by
    /// `# name,value` lines for the notes.
    pub fn to_text(&self) -> String {
        let mut out = String::new();
        for e in &self.entries {
            let verdict = if e.pass { "PASS" } else { "FAIL" };
            let _ = writeln!(
                out,
                "{},{:.6e},{:.1e},{verdict}",
                e.name, e.value, e.tolerance
            );
        }
        for (name, v) in &self.notes {
            let _ = writeln!(out, "# {name},{v:.6e}");
        }
        out
    }
}

/// Points at which the scaled trace is compared with the `Ω₂` trace.
pub const GLUING_POINTS: [f64; 19] = [
    0.05, 0.1, 0.15, 0.2, 0.25, 0.3, 0.35, 0.4, 0.45, 0.5, 0.55, 0.6, 0.65, 0.7, 0.75, 0.8, 0.85,
    0.9, 0.95,
];

/// `Ω₁` residual sample.
pub const OMEGA1_RESIDUAL_POINTS: [f64; 3] = [0.25, 0.5, 0.75];

/// Solves problem `T₀` on the configured grids and evaluates every
/// diagnostic.
pub fn solve_t0(
    params: &ProblemParameters,
    data: &BoundaryData,
    grids: &GridConfig,
    tolerances: &Tolerances,
) -> Result<(SolutionField, DiagnosticsReport)> {
    let report = validate_inputs(params.alpha, params.delta, params.lambda2, data);
    if !report.accepted() {
        return Err(Error::Precondition(report.violations.join("; ")));
    }
    grids.check()?;
    let nodes = uniform_nodes(grids.line_n);

    let phi_values = nodes
        .iter()
        .map(|&s| phi_fn(params, &data.psi, s))
        .collect::<Result<Vec<_>>>()
        .map_err(Error::at("phi"))?;
    let phi = GridFunction::new(nodes.clone(), phi_values).map_err(Error::at("phi"))?;
    let q = assemble_q(params, &data.psi, &nodes).map_err(Error::at("assemble_q"))?;
    let nu = solve_volterra_20(params, &q).map_err(Error::at("volterra"))?;
    let tau = tau_from_nu_18(params, &nu).map_err(Error::at("tau"))?;
    let t = t_from_nu(params, &nu, &phi).map_err(Error::at("t_density"))?;
    let n = n_from_t_nu(params, &t, &nu).map_err(Error::at("n_density"))?;

    let omega2 = sample_omega2(params, &t, &n, grids.omega2_n).map_err(Error::at("omega2"))?;

    let traces = LateralTraces {
        left: data.trace1.clone(),
        right: data.trace2.clone(),
    };
    let omega_one = OmegaOne::new(params, tau.clone(), traces).map_err(Error::at("omega1"))?;
    let omega1 = sample_omega1(&omega_one, grids).map_err(Error::at("omega1"))?;

    let records = TraceRecords {
        tau,
        nu,
        t,
        n,
        phi,
        q,
    };
    let diagnostics = diagnose(
        params, data, &records, &omega_one, &omega1, &omega2, tolerances,
    )
    .map_err(Error::at("diagnostics"))?;
    Ok((
        SolutionField {
            omega1,
            omega2,
            traces: records,
        },
        diagnostics,
    ))
}

fn sample_omega2(
    params: &ProblemParameters,
    t: &GridFunction,
    n: &GridFunction,
    size: usize,
) -> Result<Omega2Samples> {
    let nodes = uniform_nodes(size);
    let mut u = Vec::with_capacity(size);
    for i in 0..size {
        let mut row = Vec::with_capacity(size - i);
        for j in i..size {
            let p = CharacteristicPoint::new(nodes[i], nodes[j])?;
            row.push(u_class_r00(params, t, n, p));
        }
        u.push(row);
    }
    Ok(Omega2Samples { nodes, u })
}

fn sample_omega1(field: &OmegaOne, grids: &GridConfig) -> Result<Omega1Samples> {
    let xs = uniform_nodes(grids.omega1_nx);
    let ys: Vec<f64> = uniform_nodes(grids.omega1_ny)
        .iter()
        .map(|s| OMEGA1_Y_MIN + (1.0 - OMEGA1_Y_MIN) * s)
        .collect();
    let mut u = Vec::with_capacity(xs.len());
    for &x in &xs {
        u.push(
            ys.iter()
                .map(|&y| field.u(x, y))
                .collect::<Result<Vec<_>>>()?,
        );
    }
    Ok(Omega1Samples { xs, ys, u })
}

/// Central-difference residual of `u_xx + y u_yy + α u_y - λ²u` at the
/// `Ω₂` node `(i, j)`. In characteristic variables the operator reads
/// `4u_ξη + 4β(u_ξ - u_η)/(η - ξ) - λ²u`.
pub fn pde_residual_omega2(
    params: &ProblemParameters,
    field: &Omega2Samples,
    i: usize,
    j: usize,
) -> Result<f64> {
    let n = field.nodes.len();
    if i < 2 || j + 3 > n || j < i + 2 {
        return Err(Error::Precondition(format!(
            "Ω₂ node ({i}, {j}) is within two steps of the boundary"
        )));
    }
    let h = field.nodes[1] - field.nodes[0];
    let u = |a: usize, b: usize| field.at(a, b);
    let u_xi = (u(i + 1, j) - u(i - 1, j)) / (2.0 * h);
    let u_eta = (u(i, j + 1) - u(i, j - 1)) / (2.0 * h);
    let u_xi_eta =
        (u(i + 1, j + 1) - u(i + 1, j - 1) - u(i - 1, j + 1) + u(i - 1, j - 1)) / (4.0 * h * h);
    let width = field.nodes[j] - field.nodes[i];
    Ok(4.0 * u_xi_eta + 4.0 * params.beta * (u_xi - u_eta) / width - params.lambda2 * u(i, j))
}

/// Largest `Ω₂` residual over all admissible nodes, relative to `max|u|`.
/// Next to `y = 0` the solution has a `(-y)^{1-α}` component, so near the
/// diagonal this converges only like `h^{1/2}`.
pub fn max_residual_omega2(params: &ProblemParameters, field: &Omega2Samples) -> Result<f64> {
    let n = field.nodes.len();
    let mut worst = 0.0_f64;
    for i in 2..n {
        for j in i + 2..n.saturating_sub(2) {
            worst = worst.max(pde_residual_omega2(params, field, i, j)?.abs());
        }
    }
    Ok(relative(worst, field.max_abs()))
}

/// Characteristic coordinates of the fixed `Ω₂` residual sample: the
/// lattice `{0.1, …, 0.9}²` with `η - ξ ≥ 0.1`.
pub const OMEGA2_SAMPLE_STEPS: usize = 10;

/// Largest `Ω₂` residual over the grid nodes nearest to the fixed sample,
/// relative to `max|u|`.
pub fn sample_residual_omega2(params: &ProblemParameters, field: &Omega2Samples) -> Result<f64> {
    let last = (field.nodes.len() - 1) as f64;
    let index = |k: usize| (k as f64 / OMEGA2_SAMPLE_STEPS as f64 * last).round() as usize;
    let mut worst = 0.0_f64;
    for a in 1..OMEGA2_SAMPLE_STEPS {
        for b in a + 1..OMEGA2_SAMPLE_STEPS {
            worst = worst.max(pde_residual_omega2(params, field, index(a), index(b))?.abs());
        }
    }
    Ok(relative(worst, field.max_abs()))
}

fn relative(value: f64, scale: f64) -> f64 {
    if scale > 0.0 {
        value / scale
    } else {
        value
    }
}

/// `|D^{1-β} I^{1-β} N - N|` on interior nodes of a 101-point grid. `I`
/// is a product quadrature against the grid values of `N`, and the outer
/// derivative is `d²/dx² I^{1+β}` by central differences.
pub fn left_inverse_residual(params: &ProblemParameters, n: &GridFunction) -> Result<f64> {
    let order = 1.0 - params.beta;
    let grid = uniform_nodes(101);
    let inner_values = grid
        .iter()
        .map(|&x| fractional_integral(order, n, x))
        .collect::<Result<Vec<_>>>()?;
    let inner = GridFunction::new(grid.clone(), inner_values)?;
    let outer = grid
        .iter()
        .map(|&x| fractional_integral(2.0 - order, &inner, x))
        .collect::<Result<Vec<_>>>()?;
    let h = grid[1];
    let mut worst = 0.0_f64;
    for k in 2..grid.len() - 2 {
        let d2 = (outer[k + 1] - 2.0 * outer[k] + outer[k - 1]) / (h * h);
        worst = worst.max((d2 - n.value(grid[k])).abs());
    }
    Ok(worst)
}

fn fractional_integral(mu: f64, f: &GridFunction, x: f64) -> Result<f64> {
    if x == 0.0 {
        return Ok(0.0);
    }
    Ok(integrate_against(f.breakpoints(), 0.0, x, 0.0, mu - 1.0, |s| f.value(s)) / gamma_real(mu)?)
}

/// Sample for the `Φ` form comparison.
const PHI_SAMPLE: usize = 11;

fn diagnose(
    params: &ProblemParameters,
    data: &BoundaryData,
    records: &TraceRecords,
    omega_one: &OmegaOne,
    omega1: &Omega1Samples,
    omega2: &Omega2Samples,
    tol: &Tolerances,
) -> Result<DiagnosticsReport> {
    let mut report = DiagnosticsReport::default();
    let TraceRecords {
        tau, nu, t, n, phi, ..
    } = records;

    let ac = omega2
        .nodes
        .iter()
        .enumerate()
        .map(|(j, &eta)| (omega2.at(0, j) - data.psi.eval(0.5 * eta)).abs())
        .fold(0.0, f64::max);
    report.push("ac_boundary", ac, tol.ac);

    let mut gluing = 0.0_f64;
    let mut recovery = 0.0_f64;
    for &x in &GLUING_POINTS {
        let from_above = omega_one.scaled_trace(x, TRACE_HEIGHTS)?;
        gluing = gluing.max((from_above - tau_from_t(params, t, x)).abs());
        recovery = recovery.max((from_above - tau.value(x)).abs());
    }
    report.push("gluing_trace", gluing, tol.gluing);

    let mut rel14 = 0.0_f64;
    for k in 0..VERIFY_POINTS {
        let x = k as f64 / (VERIFY_POINTS - 1) as f64;
        rel14 = rel14.max((tau.value(x) - tau_relation_14(params, nu, phi, x)?).abs());
    }
    report.push("relation_14", rel14, tol.relation14);
    report.push(
        "relation_19",
        verify_19(params, nu, phi, tau)?,
        tol.relation14,
    );

    report.push(
        "pde_omega2",
        sample_residual_omega2(params, omega2)?,
        tol.pde,
    );

    let scale1 = omega1
        .u
        .iter()
        .flatten()
        .fold(0.0_f64, |m, v| m.max(v.abs()));
    let mut res1 = 0.0_f64;
    for &x in &OMEGA1_RESIDUAL_POINTS {
        for &y in &OMEGA1_RESIDUAL_POINTS {
            res1 = res1.max(pde_residual_omega1(omega_one, x, y)?.abs());
        }
    }
    report.push("pde_omega1", relative(res1, scale1), tol.pde);

    let v = tau.values();
    let h = tau.nodes()[1] - tau.nodes()[0];
    let slope = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h);
    let origin = if v[0] == 0.0 {
        slope.abs()
    } else {
        f64::INFINITY
    };
    report.push("tau_origin", origin, TAU_SLOPE_TOL);

    report.push("heat_kernel_gate", heat_kernel_gate()?, HEAT_GATE_TOL);
    report.push("scaled_trace", recovery, tol.gluing);

    let mut expanded_vs_l = 0.0_f64;
    let mut expanded_vs_il = 0.0_f64;
    let mut used_vs_il = 0.0_f64;
    for k in 1..PHI_SAMPLE {
        let s = k as f64 / (PHI_SAMPLE - 1) as f64;
        let expanded = phi_fn_expanded_j1(params, &data.psi, s)?;
        expanded_vs_l = expanded_vs_l
            .max((expanded - phi_operator_form(params, &data.psi, params.lambda2, s)?).abs());
        let operator_il = phi_operator_form(params, &data.psi, -params.lambda2, s)?;
        expanded_vs_il = expanded_vs_il.max((expanded - operator_il).abs());
        used_vs_il = used_vs_il.max((phi_fn(params, &data.psi, s)? - operator_il).abs());
    }
    report.note("phi_expanded_vs_operator_lambda", expanded_vs_l);
    report.note("phi_expanded_vs_operator_ilambda", expanded_vs_il);
    report.note("phi_used_vs_operator_ilambda", used_vs_il);
    report.note("pde_omega2_all_nodes", max_residual_omega2(params, omega2)?);
    report.note("left_inverse", left_inverse_residual(params, n)?);
    report.note("tau_at_zero", v[0].abs());
    let coarse = GLUING_POINTS
        .iter()
        .map(|&x| Ok((omega_one.scaled_trace(x, COARSE_TRACE_HEIGHTS)? - tau.value(x)).abs()))
        .collect::<Result<Vec<f64>>>()?
        .into_iter()
        .fold(0.0, f64::max);
    report.note("scaled_trace_coarse_heights", coarse);
    Ok(report)
}

/// The larger extrapolation heights, reported for comparison only.
pub const COARSE_TRACE_HEIGHTS: [f64; 3] = [0.02, 0.01, 0.005];

const FIELD_HEADER: &str = "domain,x,y,xi,eta,u";

/// Field table in the export format: `omega1` rows in `(x, y)` order, then
/// `omega2` rows in `(ξ, η)` order.
pub fn field_csv(field: &SolutionField) -> String {
    let mut out = String::new();
    out.push_str(FIELD_HEADER);
    out.push('\n');
    let o1 = &field.omega1;
    for (i, &x) in o1.xs.iter().enumerate() {
        for (j, &y) in o1.ys.iter().enumerate() {
            let _ = writeln!(out, "omega1,{x:.10},{y:.10},,,{:.15e}", o1.u[i][j]);
        }
    }
    let o2 = &field.omega2;
    let n = o2.nodes.len();
    for i in 0..n {
        for j in i..n {
            let (xi, eta) = (o2.nodes[i], o2.nodes[j]);
            let d = 0.25 * (eta - xi);
            let (x, y) = (0.5 * (xi + eta), -d * d);
            let _ = writeln!(
                out,
                "omega2,{x:.10},{y:.10},{xi:.10},{eta:.10},{:.15e}",
                o2.at(i, j)
            );
        }
    }
    out
}

/// `x,tau,nu,T,N,Phi,Q` on the line grid.
pub fn traces_csv(records: &TraceRecords) -> String {
    let mut out = String::from("x,tau,nu,T,N,Phi,Q\n");
    let cols = [
        &records.tau,
        &records.nu,
        &records.t,
        &records.n,
        &records.phi,
        &records.q,
    ];
    for (k, x) in records.tau.nodes().iter().enumerate() {
        let _ = write!(out, "{x:.10}");
        for c in cols {
            let _ = write!(out, ",{:.15e}", c.values()[k]);
        }
        out.push('\n');
    }
    out
}

/// Writes `field.csv`, `diagnostics.txt` and `traces.csv` into `dir`.
pub fn export_field(
    field: &SolutionField,
    diagnostics: &DiagnosticsReport,
    dir: &Path,
) -> Result<()> {
    fs::create_dir_all(dir)?;
    fs::write(dir.join("field.csv"), field_csv(field))?;
    fs::write(dir.join("diagnostics.txt"), diagnostics.to_text())?;
    fs::write(dir.join("traces.csv"), traces_csv(&field.traces))?;
    Ok(())
}

#[cfg(test)]
mod tests {
    use super::*;

    fn baseline_data() -> BoundaryData {
        BoundaryData {
            psi: Polynomial::monomial(4),
            ..Default::default()
        }
    }

    #[test]
    fn validation_examples() {
        assert!(validate_inputs(-0.25, 0.5, 0.0, &baseline_data()).accepted());
        let pi2 = std::f64::consts::PI.powi(2);
        let singular = validate_inputs(-0.25, 0.5, -pi2, &baseline_data());
        assert!(singular.violations[0].contains("singular spectral parameter"));
        let quadratic = BoundaryData {
            psi: Polynomial::monomial(2),
            ..Default::default()
        };
        assert!(!validate_inputs(-0.25, 0.5, 0.0, &quadratic).accepted());
        let bad_trace = BoundaryData {
            trace1: Polynomial::new(vec![1.0, 1.0]),
            ..baseline_data()
        };
        let r = validate_inputs(-0.25, 0.5, 0.0, &bad_trace);
        assert!(r.violations.iter().any(|v| v.contains("trace1")));
        let high = BoundaryData {
            psi: Polynomial::monomial(13),
            ..Default::default()
        };
        assert!(!validate_inputs(-0.25, 0.5, 0.0, &high).accepted());
        assert!(!validate_inputs(0.1, 0.5, 0.0, &baseline_data()).accepted());
    }

    #[test]
    fn omega2_residual_of_zero_field() {
        let p = derive_parameters(-0.25, 0.5, 1.0).unwrap();
        let nodes = uniform_nodes(11);
        let u = (0..11).map(|i| vec![0.0; 11 - i]).collect();
        let field = Omega2Samples { nodes, u };
        assert_eq!(pde_residual_omega2(&p, &field, 3, 7).unwrap(), 0.0);
        assert!(pde_residual_omega2(&p, &field, 1, 7).is_err());
        assert!(pde_residual_omega2(&p, &field, 3, 4).is_err());
        assert!(pde_residual_omega2(&p, &field, 3, 9).is_err());
    }

    #[test]
    fn omega2_residual_of_polynomial_solutions() {
        // u = x and u = x² - 2y/α solve u_xx + y u_yy + α u_y = 0; both are
        // quadratic in (ξ, η), so the differences are exact
        let p = derive_parameters(-0.25, 0.5, 0.0).unwrap();
        let nodes = uniform_nodes(21);
        let build = |f: &dyn Fn(f64, f64) -> f64| Omega2Samples {
            nodes: nodes.clone(),
            u: (0..21)
                .map(|i| {
                    (i..21)
                        .map(|j| {
                            let (x, y) = CharacteristicPoint::new(nodes[i], nodes[j])
                                .unwrap()
                                .to_xy();
                            f(x, y)
                        })
                        .collect()
                })
                .collect(),
        };
        assert!(max_residual_omega2(&p, &build(&|x, _| x)).unwrap() < 1e-12);
        let alpha = p.alpha;
        assert!(max_residual_omega2(&p, &build(&|x, y| x * x - 2.0 * y / alpha)).unwrap() < 1e-10);
        assert!(max_residual_omega2(&p, &build(&|x, _| x * x)).unwrap() > 0.1);
    }

    #[test]
    fn report_text_format() {
        let mut r = DiagnosticsReport::default();
        r.push("a", 1e-4, 1e-3);
        r.push("b", 0.5, 1e-3);
        r.note("c", 2.0);
        assert_eq!(
            r.to_text(),
            "a,1.000000e-4,1.0e-3,PASS\nb,5.000000e-1,1.0e-3,FAIL\n# c,2.000000e0\n"
        );
        assert!(!r.all_pass());
        assert_eq!(r.failures(), vec!["b"]);
    }
    #[test]
    fn trace_relations_differ_by_a_homogeneous_solution() {
        // τ from the trace relation has τ(0) = τ'(0) = 0, the Dirichlet τ has
        // τ(0) = τ(1) = 0; the gap is -τ₁₄(1) S(λ², x) / S(λ², 1)
        use crate::ode_bvp::s_fn;
        for l2 in [0.0, 1.0, -1.0] {
            let p = derive_parameters(-0.25, 0.5, l2).unwrap();
            let nodes = uniform_nodes(201);
            let q = assemble_q(&p, &baseline_data().psi, &nodes).unwrap();
            let nu = solve_volterra_20(&p, &q).unwrap();
            let phi =
                GridFunction::sample(&nodes, |t| phi_fn(&p, &baseline_data().psi, t).unwrap())
                    .unwrap();
            let tau = tau_from_nu_18(&p, &nu).unwrap();
            let end = tau_relation_14(&p, &nu, &phi, 1.0).unwrap();
            assert!(end.abs() > 0.04, "gap {end}");
            for i in (0..nodes.len()).step_by(20) {
                let x = nodes[i];
                let t14 = tau_relation_14(&p, &nu, &phi, x).unwrap();
                let predicted = -end * s_fn(l2, x) / s_fn(l2, 1.0);
                assert!(
                    (tau.values()[i] - t14 - predicted).abs() < 1e-6,
                    "l2 = {l2}, x = {x}"
                );
            }
        }
    }
}
