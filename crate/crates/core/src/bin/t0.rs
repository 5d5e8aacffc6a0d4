use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use t0_solver::config::RunConfig;
use t0_solver::hyperbolic::derive_parameters;
use t0_solver::pipeline::{export_field, solve_t0, validate_inputs};
use t0_solver::specfun::{even_bessel, SeriesTolerance};
use t0_solver::verify;

#[derive(Parser)]
#[command(
    name = "t0",
    version,
    about = "Solver and verification harness for the mixed-type problem T0"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Solve for the configured data and write field.csv, traces.csv and diagnostics.txt.
    Solve {
        #[arg(long)]
        config: PathBuf,
        #[arg(long)]
        out: PathBuf,
        /// Exit with a nonzero status when any diagnostic fails.
        #[arg(long)]
        strict: bool,
    },
    /// Run the built-in identity and convergence suites.
    Verify,
    /// Tabulate the normalized Bessel function of order gamma on [wmin, wmax].
    Kernels {
        #[arg(long, allow_hyphen_values = true)]
        gamma: f64,
        #[arg(long, allow_hyphen_values = true)]
        wmin: f64,
        #[arg(long, allow_hyphen_values = true)]
        wmax: f64,
        #[arg(long, default_value_t = 21)]
        points: usize,
    },
}

fn main() -> ExitCode {
    match run(Cli::parse()) {
        Ok(code) => code,
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}

fn run(cli: Cli) -> Result<ExitCode, String> {
    match cli.command {
        Command::Solve {
            config,
            out,
            strict,
        } => {
            let cfg = RunConfig::from_file(&config).map_err(|e| e.to_string())?;
            let validation = validate_inputs(cfg.alpha, cfg.delta, cfg.lambda2, &cfg.data);
            if !validation.accepted() {
                return Err(format!(
                    "input rejected: {}",
                    validation.violations.join("; ")
                ));
            }
            let params =
                derive_parameters(cfg.alpha, cfg.delta, cfg.lambda2).map_err(|e| e.to_string())?;
            let (field, report) = solve_t0(&params, &cfg.data, &cfg.grids, &cfg.tolerances)
                .map_err(|e| e.to_string())?;
            export_field(&field, &report, &out).map_err(|e| e.to_string())?;
            print!("{}", report.to_text());
            if strict && !report.all_pass() {
                eprintln!("failed diagnostics: {}", report.failures().join(", "));
                return Ok(ExitCode::from(1));
            }
            Ok(ExitCode::SUCCESS)
        }
        Command::Verify => {
            let report = verify::run_all().map_err(|e| e.to_string())?;
            print!("{}", report.to_text());
            Ok(if report.all_pass() {
                ExitCode::SUCCESS
            } else {
                ExitCode::from(1)
            })
        }
        Command::Kernels {
            gamma,
            wmin,
            wmax,
            points,
        } => {
            if points < 2 || wmax.partial_cmp(&wmin) != Some(std::cmp::Ordering::Greater) {
                return Err("need --wmax > --wmin and --points >= 2".into());
            }
            println!("w,value");
            for i in 0..points {
                let w = wmin + (wmax - wmin) * i as f64 / (points - 1) as f64;
                let v =
                    even_bessel(gamma, w, SeriesTolerance::default()).map_err(|e| e.to_string())?;
                println!("{w:.10},{v:.15e}");
            }
            Ok(ExitCode::SUCCESS)
        }
    }
}
