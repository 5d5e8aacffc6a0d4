//! Acceptance criteria, one PASS/FAIL line each. Reference values are built
//! here from closed forms rather than from the library.

use std::f64::consts::PI;
use std::fs;
use std::process::Command;
use std::time::Instant;

use t0_solver::fracops::{lemma1_lhs, lemma1_rhs, op_a, op_b};
use t0_solver::functions::{uniform_nodes, GridFunction, Polynomial};
use t0_solver::hyperbolic::derive_parameters;
use t0_solver::ode_bvp::tau_from_nu_18;
use t0_solver::parabolic::{LateralTraces, OmegaOne, ParabolicKernel, TRACE_HEIGHTS};
use t0_solver::pipeline::{solve_t0, BoundaryData, GridConfig, Tolerances};
use t0_solver::specfun::{even_bessel, wright_e, SeriesTolerance};
use t0_solver::volterra::{
    kernel_coefficient, kernel_exponent, solve_volterra_20, solve_weakly_singular,
};

const SQRT_PI: f64 = 1.772_453_850_905_516;

struct Outcome {
    pass: bool,
    detail: String,
}

fn check(pass: bool, detail: String) -> Outcome {
    Outcome { pass, detail }
}

fn sup(values: impl IntoIterator<Item = f64>) -> f64 {
    values
        .into_iter()
        .fold(0.0, |a, b| if b.is_nan() { f64::NAN } else { a.max(b) })
}

fn criterion_operator_inverse() -> Outcome {
    let start = Instant::now();
    let square = |t: f64| t * t;
    let quartic = |t: f64| t * t * t * (1.0 - t);
    let gs: [&dyn Fn(f64) -> f64; 2] = [&square, &quartic];
    let mut worst = 0.0_f64;
    for g in gs {
        for k in [0.0, 0.3] {
            for l2 in [-4.0, 0.0, 4.0] {
                let bg = |t: f64| op_b(k, l2, &g, t).unwrap();
                let ag = |t: f64| op_a(k, l2, &g, t).unwrap();
                for i in 0..50 {
                    let x = k + (1.0 - k) * i as f64 / 49.0;
                    worst = worst
                        .max((op_a(k, l2, &bg, x).unwrap() - g(x)).abs())
                        .max((op_b(k, l2, &ag, x).unwrap() - g(x)).abs());
                }
            }
        }
    }
    let secs = start.elapsed().as_secs_f64();
    check(
        worst < 1e-7 && secs < 2.0,
        format!("sup error {worst:.3e} (< 1e-7), {secs:.2} s (< 2 s)"),
    )
}

fn criterion_fractional_identity() -> Outcome {
    let g = |t: f64| t * t * (1.0 - t);
    let mut worst = 0.0_f64;
    for l2 in [0.0, 1.0] {
        for i in 1..=20 {
            let x = i as f64 / 20.0;
            let d = lemma1_lhs(-0.75, l2, &g, x).unwrap() - lemma1_rhs(-0.75, l2, &g, x).unwrap();
            worst = worst.max(d.abs());
        }
    }
    // at λ = 0 the left side is ∫(x-t)^{3/4} t²(1-t) dt = B(7/4,3)x^{15/4} - B(7/4,4)x^{19/4}
    let b3 = 2.0 / (1.75 * 2.75 * 3.75);
    let b4 = 6.0 / (1.75 * 2.75 * 3.75 * 4.75);
    let closed = sup((1..=20).map(|i| {
        let x = i as f64 / 20.0;
        (lemma1_lhs(-0.75, 0.0, &g, x).unwrap() - (b3 * x.powf(3.75) - b4 * x.powf(4.75))).abs()
    }));
    check(
        worst < 1e-6 && closed < 1e-6,
        format!("sup |lhs - rhs| {worst:.3e} (< 1e-6), lhs vs closed form at λ = 0 {closed:.3e}"),
    )
}

fn criterion_special_functions() -> Outcome {
    let tol = SeriesTolerance::default();
    let origin = [0.0, 0.5, 1.0, 2.5, -0.5]
        .iter()
        .all(|&g| even_bessel(g, 0.0, tol).unwrap() == 1.0);
    let sinc = sup((1..=40).map(|i| {
        let w = 0.9 * i as f64;
        (even_bessel(0.5, w, tol).unwrap() - w.sqrt().sin() / w.sqrt()).abs()
    }));
    // d/dw J̄_γ(√w) = -J̄_{γ+1}(√w) / (4(γ+1))
    let h = 1e-4;
    let mut recurrence = 0.0_f64;
    for &g in &[0.0, 0.5, 1.5, -0.25] {
        for &w in &[-3.0, -0.5, 0.7, 2.0, 9.0] {
            let fd = (even_bessel(g, w + h, tol).unwrap() - even_bessel(g, w - h, tol).unwrap())
                / (2.0 * h);
            let exact = -even_bessel(g + 1.0, w, tol).unwrap() / (4.0 * (g + 1.0));
            recurrence = recurrence.max((fd - exact).abs());
        }
    }
    let mut exponential = 0.0_f64;
    for (d, recip_gamma) in [
        (1.0, 1.0),
        (2.0, 1.0),
        (0.5, 1.0 / SQRT_PI),
        (1.5, 2.0 / SQRT_PI),
    ] {
        for i in 0..=40 {
            let z = -5.0 + 0.25 * i as f64;
            let v = wright_e(1.0, d, 1.0, 0.0, z, tol).unwrap();
            exponential = exponential.max((v - z.exp() * recip_gamma).abs());
        }
    }
    check(
        origin && sinc < 1e-10 && recurrence < 1e-6 && exponential < 1e-10,
        format!(
            "value at 0 exact: {origin}, half-order sinc {sinc:.3e} (< 1e-10), \
             recurrence {recurrence:.3e} (< 1e-6), exponential reduction {exponential:.3e} (< 1e-10)"
        ),
    )
}

fn criterion_volterra() -> Outcome {
    let start = Instant::now();
    let nodes = uniform_nodes(401);
    let rhs: Vec<f64> = nodes.iter().map(|x| 1.0 - 2.0 * x.sqrt()).collect();
    let v = solve_weakly_singular(&nodes, -0.5, 1.0, |_| 1.0, &rhs).unwrap();
    let abel = sup(v.iter().map(|x| (x - 1.0).abs()));

    // ν = 1 + x - x²/2 + x³/3 at λ = 0, where the kernel is c (x-s)^{-1/2};
    // ∫_0^x (x-s)^{-1/2} s^n ds = B(1/2, n+1) x^{n+1/2}
    let p = derive_parameters(-0.25, 0.5, 0.0).unwrap();
    assert_eq!(kernel_exponent(&p), -0.5);
    let c = kernel_coefficient(&p);
    let a = [1.0, 1.0, -0.5, 1.0 / 3.0];
    let beta_half = [2.0, 4.0 / 3.0, 16.0 / 15.0, 32.0 / 35.0];
    let exact = |x: f64| a.iter().rev().fold(0.0, |acc, c| acc * x + c);
    let q = |x: f64| {
        exact(x)
            - c * (0..4)
                .map(|n| a[n] * beta_half[n] * x.powf(n as f64 + 0.5))
                .sum::<f64>()
    };
    let errors: Vec<f64> = [101, 201, 401]
        .iter()
        .map(|&n| {
            let nodes = uniform_nodes(n);
            let qg = GridFunction::sample(&nodes, q).unwrap();
            let nu = solve_volterra_20(&p, &qg).unwrap();
            sup(nodes
                .iter()
                .zip(nu.values())
                .map(|(&x, v)| (v - exact(x)).abs()))
        })
        .collect();
    let orders = [
        (errors[0] / errors[1]).log2(),
        (errors[1] / errors[2]).log2(),
    ];
    let secs = start.elapsed().as_secs_f64();
    check(
        abel < 1e-4 && errors[2] < 1e-5 && orders.iter().all(|&o| o >= 1.5) && secs < 5.0,
        format!(
            "Abel {abel:.3e} (< 1e-4), smooth {:.3e} (< 1e-5), orders {:.2}/{:.2} (>= 1.5), {secs:.2} s (< 5 s)",
            errors[2], orders[0], orders[1]
        ),
    )
}

fn criterion_ode_green() -> Outcome {
    let p = derive_parameters(-0.25, 0.5, 0.0).unwrap();
    let gd = SQRT_PI / 2.0;
    let nodes = uniform_nodes(101);
    let one = GridFunction::sample(&nodes, |_| 1.0).unwrap();
    let tau = tau_from_nu_18(&p, &one).unwrap();
    let constant = sup(nodes
        .iter()
        .zip(tau.values())
        .map(|(&x, v)| (v - gd * x * (x - 1.0) / 2.0).abs()));

    // second differences of τ against τ'' - λ²τ = Γ(1+δ)ν for a smooth ν
    let mut orders = Vec::new();
    for l2 in [0.0, 1.0, -1.0] {
        let p = p.with_lambda2(l2).unwrap();
        let residual = |n: usize| {
            let nodes = uniform_nodes(n);
            let nu = GridFunction::sample(&nodes, |x| (3.0 * x).sin() + x * x).unwrap();
            let t = tau_from_nu_18(&p, &nu).unwrap();
            let (v, h) = (t.values(), nodes[1]);
            sup((1..n - 1).map(|i| {
                ((v[i + 1] - 2.0 * v[i] + v[i - 1]) / (h * h) - l2 * v[i] - gd * nu.values()[i])
                    .abs()
            }))
        };
        let r = [residual(26), residual(51), residual(101)];
        orders.push((r[0] / r[1]).log2());
        orders.push((r[1] / r[2]).log2());
    }
    let near_two = orders.iter().all(|o| (o - 2.0).abs() < 0.25);
    check(
        constant < 1e-8 && near_two,
        format!("constant source {constant:.3e} (< 1e-8), residual orders {orders:.2?} (2 ± 0.25)"),
    )
}

fn criterion_end_to_end() -> Outcome {
    let start = Instant::now();
    let data = BoundaryData {
        psi: Polynomial::monomial(4),
        ..Default::default()
    };
    let mut pass = true;
    let mut parts = Vec::new();
    for l2 in [0.0, 1.0, -1.0] {
        let p = derive_parameters(-0.25, 0.5, l2).unwrap();
        let (field, report) =
            solve_t0(&p, &data, &GridConfig::default(), &Tolerances::default()).unwrap();
        let o2 = &field.omega2;
        let ac = sup(o2
            .nodes
            .iter()
            .enumerate()
            .map(|(j, &eta)| (o2.at(0, j) - (eta / 2.0).powi(4)).abs()));
        let tau = field.traces.tau.values();
        let h = field.traces.tau.nodes()[1];
        let slope = ((-3.0 * tau[0] + 4.0 * tau[1] - tau[2]) / (2.0 * h)).abs();
        let value = |name: &str| report.get(name).unwrap().value;
        let items = [
            ("ac", ac, 1e-3),
            ("gluing", value("gluing_trace"), 1e-3),
            ("rel14", value("relation_14"), 1e-3),
            ("rel19", value("relation_19"), 1e-3),
            ("pde", value("pde_omega2"), 1e-2),
            ("tau'(0)", slope, 1e-2),
        ];
        let mut line = format!("λ²={l2}: τ(0)={:e}", tau[0]);
        pass &= tau[0] == 0.0;
        for (name, v, tol) in items {
            let ok = v < tol;
            pass &= ok;
            line += &format!(" {name}={v:.2e}{}", if ok { "" } else { "!" });
        }
        parts.push(line);
    }
    let secs = start.elapsed().as_secs_f64();
    pass &= secs < 60.0;
    parts.push(format!("{secs:.1} s (< 60 s)"));
    check(pass, parts.join("; "))
}

fn criterion_parabolic_gates() -> Outcome {
    // δ = 1, λ = 0 reduces to the heat kernel e^{-x²/4y}/(2√(πy))
    let kernel = ParabolicKernel::new(1.0, 0.0).unwrap();
    let mut gate = 0.0_f64;
    for &x in &[0.0_f64, 0.1, 0.2, 0.35, 0.5] {
        for &y in &[0.05_f64, 0.1, 0.2, 0.4, 0.8] {
            let heat = (-x * x / (4.0 * y)).exp() / (2.0 * (PI * y).sqrt());
            gate = gate.max((kernel.gamma(x, y).unwrap() - heat).abs());
        }
    }
    let mut images = 0.0_f64;
    for l2 in [0.0, 1.0, -1.0] {
        let k = ParabolicKernel::new(0.5, l2).unwrap();
        for &y in &[0.05, 0.3, 1.0] {
            let table = k.table(y).unwrap();
            for &t in &[0.05, 0.3, 0.5, 0.77, 0.95] {
                images = images
                    .max(table.green(0.0, t).abs())
                    .max(table.green(1.0, t).abs());
            }
        }
    }
    // τ = sin πx: y^{1-δ}u = Γ(δ)E_{δ,δ}(-π²y^δ) sin πx → sin πx
    let p = derive_parameters(-0.25, 0.5, 0.0).unwrap();
    let nodes = uniform_nodes(401);
    let tau = GridFunction::sample(&nodes, |x| (PI * x).sin()).unwrap();
    let field = OmegaOne::new(&p, tau, LateralTraces::default()).unwrap();
    let trace = sup([0.1, 0.3, 0.5, 0.8]
        .iter()
        .map(|&x| (field.scaled_trace(x, TRACE_HEIGHTS).unwrap() - (PI * x).sin()).abs()));
    check(
        gate < 1e-6 && images < 1e-12 && trace < 1e-3,
        format!("heat kernel {gate:.3e} (< 1e-6), images {images:.3e} (< 1e-12), scaled trace {trace:.3e} (< 1e-3)"),
    )
}

fn criterion_determinism() -> Outcome {
    let dir = tempfile::tempdir().unwrap();
    let config = dir.path().join("run.toml");
    fs::write(
        &config,
        "alpha = -0.25\ndelta = 0.5\nlambda2 = 0.0\n[psi]\ncoeffs = [0.0, 0.0, 0.0, 0.0, 1.0]\n",
    )
    .unwrap();
    let run = |name: &str| {
        let out = dir.path().join(name);
        let status = Command::new(env!("CARGO_BIN_EXE_t0"))
            .args(["solve", "--config"])
            .arg(&config)
            .arg("--out")
            .arg(&out)
            .output()
            .unwrap()
            .status;
        assert!(status.success());
        (
            fs::read(out.join("field.csv")).unwrap(),
            fs::read(out.join("diagnostics.txt")).unwrap(),
        )
    };
    let first = run("a");
    let second = run("b");
    let same = first == second;
    check(
        same,
        format!("field.csv and diagnostics.txt identical: {same}"),
    )
}

#[test]
fn acceptance() {
    type Criterion = (&'static str, fn() -> Outcome);
    let criteria: [Criterion; 8] = [
        ("1 operator inverse", criterion_operator_inverse),
        ("2 fractional identity", criterion_fractional_identity),
        ("3 special functions", criterion_special_functions),
        ("4 volterra solver", criterion_volterra),
        ("5 ode green relation", criterion_ode_green),
        ("6 end-to-end baseline", criterion_end_to_end),
        ("7 parabolic gates", criterion_parabolic_gates),
        ("8 determinism", criterion_determinism),
    ];
    let mut failed = Vec::new();
    for (name, run) in criteria {
        let outcome = run();
        println!(
            "{} criterion {name}: {}",
            if outcome.pass { "PASS" } else { "FAIL" },
            outcome.detail
        );
        if !outcome.pass {
            failed.push(name);
        }
    }
    assert!(failed.is_empty(), "failing criteria: {failed:?}");
}
