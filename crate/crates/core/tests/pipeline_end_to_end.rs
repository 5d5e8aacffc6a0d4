use t0_solver::functions::Polynomial;
use t0_solver::hyperbolic::derive_parameters;
use t0_solver::pipeline::{
    export_field, field_csv, solve_t0, validate_inputs, BoundaryData, GridConfig, Tolerances,
};

fn small_grids() -> GridConfig {
    GridConfig {
        line_n: 101,
        omega1_nx: 11,
        omega1_ny: 11,
        omega2_n: 21,
    }
}

#[test]
fn zero_data_gives_zero_field() {
    let p = derive_parameters(-0.25, 0.5, 1.0).unwrap();
    let data = BoundaryData::default();
    assert!(validate_inputs(-0.25, 0.5, 1.0, &data).accepted());
    let (field, report) = solve_t0(&p, &data, &small_grids(), &Tolerances::default()).unwrap();
    assert_eq!(field.omega2.max_abs(), 0.0);
    assert!(field.omega1.u.iter().flatten().all(|&v| v == 0.0));
    for name in [
        "ac_boundary",
        "gluing_trace",
        "relation_14",
        "relation_19",
        "pde_omega2",
        "pde_omega1",
        "tau_origin",
    ] {
        assert_eq!(report.get(name).unwrap().value, 0.0, "{name}");
    }
    let csv = field_csv(&field);
    assert!(csv.starts_with("domain,x,y,xi,eta,u\n"));
    assert!(csv
        .lines()
        .skip(1)
        .all(|l| l.rsplit(',').next().unwrap().parse::<f64>().unwrap() == 0.0));
}

#[test]
fn field_layout_and_export() {
    let p = derive_parameters(-0.25, 0.5, 0.0).unwrap();
    let data = BoundaryData {
        psi: Polynomial::monomial(4),
        ..Default::default()
    };
    let grids = small_grids();
    let (field, report) = solve_t0(&p, &data, &grids, &Tolerances::default()).unwrap();
    let o2 = &field.omega2;
    assert!(o2.nodes.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(o2.u.len(), grids.omega2_n);
    assert!(field.omega1.ys.windows(2).all(|w| w[0] < w[1]));
    assert_eq!(report.entries.len(), 9);

    let dir = tempfile::tempdir().unwrap();
    export_field(&field, &report, dir.path()).unwrap();
    let csv = std::fs::read_to_string(dir.path().join("field.csv")).unwrap();
    let rows = csv.lines().count() - 1;
    let triangle = grids.omega2_n * (grids.omega2_n + 1) / 2;
    assert_eq!(rows, grids.omega1_nx * grids.omega1_ny + triangle);
    for line in csv.lines().skip(1) {
        let cells: Vec<&str> = line.split(',').collect();
        assert_eq!(cells.len(), 6);
        match cells[0] {
            "omega1" => assert!(cells[3].is_empty() && cells[4].is_empty()),
            "omega2" => {
                let (xi, eta): (f64, f64) = (cells[3].parse().unwrap(), cells[4].parse().unwrap());
                assert!(0.0 <= xi && xi <= eta && eta <= 1.0);
                let y: f64 = cells[2].parse().unwrap();
                assert!(y <= 0.0);
            }
            other => panic!("unexpected domain {other}"),
        }
    }
    let diag = std::fs::read_to_string(dir.path().join("diagnostics.txt")).unwrap();
    assert!(diag.lines().next().unwrap().starts_with("ac_boundary,"));
    let traces = std::fs::read_to_string(dir.path().join("traces.csv")).unwrap();
    assert_eq!(traces.lines().next().unwrap(), "x,tau,nu,T,N,Phi,Q");
}

#[test]
fn omega2_residual_decreases_under_refinement() {
    let p = derive_parameters(-0.25, 0.5, 0.0).unwrap();
    let data = BoundaryData {
        psi: Polynomial::monomial(4),
        ..Default::default()
    };
    let residual = |n: usize| {
        let grids = GridConfig {
            omega2_n: n,
            omega1_nx: 3,
            omega1_ny: 3,
            ..GridConfig::default()
        };
        let (_, report) = solve_t0(&p, &data, &grids, &Tolerances::default()).unwrap();
        report.get("pde_omega2").unwrap().value
    };
    let coarse = residual(51);
    let fine = residual(101);
    assert!(fine < coarse / 2.0, "{coarse:e} -> {fine:e}");
}
