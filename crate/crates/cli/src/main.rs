//! `supergc` — verification CLI for the SUSY and classical Gauss-Codazzi
//! systems, their symmetry algebras and the invariant-solution catalog.
//!
//! Exit codes: 0 all checks pass, 1 at least one check failed (including
//! structured discrepancy records), 2 usage or scenario errors.

mod eval;
mod expr;
mod scenario;

use std::collections::BTreeMap;
use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};
use num_complex::Complex64;

use supergc_core::catalog::{default_points, verify, FamilyId, FamilyParameters, VerifyConfig};
use supergc_core::report::Report;

use scenario::{run, run_brackets_by_name, Scenario};

#[derive(Parser)]
#[command(
    name = "supergc",
    about = "Verify supersymmetric and classical Gauss-Codazzi identities, symmetry algebras and invariant solutions",
    version
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    global: GlobalOpts,
}

#[derive(Args, Clone)]
struct GlobalOpts {
    /// Number of plain odd generators K (theta+ and theta- come on top).
    #[arg(long, global = true)]
    generators: Option<usize>,
    /// Truncation order of the Taylor jets.
    #[arg(long, global = true)]
    jet_order: Option<usize>,
    /// Residual tolerance (scaled by the input magnitude).
    #[arg(long, global = true)]
    tolerance: Option<f64>,
    /// Number of sampled evaluation points.
    #[arg(long, global = true)]
    points: Option<usize>,
    /// Sampler seed.
    #[arg(long, global = true)]
    seed: Option<u64>,
    /// Write the JSON report to this file.
    #[arg(long, global = true)]
    report: Option<PathBuf>,
}

#[derive(Subcommand)]
enum Command {
    /// Evaluate the six SUSY Gauss-Codazzi residuals and the zero-curvature
    /// condition for a scenario file.
    CheckGc { scenario: PathBuf },
    /// Evaluate the classical Gauss and Codazzi residuals for a scenario
    /// file.
    CheckClassical { scenario: PathBuf },
    /// Work with the invariant-solution catalog.
    Catalog {
        #[command(subcommand)]
        action: CatalogAction,
    },
    /// Reproduce all distinct (anti)commutators of a built-in algebra from
    /// its vector-field realization and compare with the stored table.
    Brackets { algebra: String },
    /// Transport an algebra element with the exponential of a generator and
    /// compare with an expected result (scenario file).
    Adjoint { scenario: PathBuf },
}

#[derive(Subcommand)]
enum CatalogAction {
    /// Verify one family: residuals, zero-curvature condition, curvature
    /// comparison; failing checks yield structured discrepancy records.
    Verify {
        family: String,
        /// Scalar parameter overrides, repeated: --param a=2 --param k0=1
        #[arg(long = "param", value_parser = parse_param)]
        params: Vec<(String, f64)>,
    },
}

fn parse_param(s: &str) -> Result<(String, f64), String> {
    let (k, v) = s
        .split_once('=')
        .ok_or_else(|| format!("expected key=value, got {s}"))?;
    let value: f64 = v.parse().map_err(|_| format!("bad numeric value {v}"))?;
    Ok((k.to_string(), value))
}

fn apply_overrides(scenario: &mut Scenario, opts: &GlobalOpts) {
    if let Some(k) = opts.generators {
        scenario.generators = k;
    }
    if let Some(d) = opts.jet_order {
        scenario.jet_order = d;
    }
    if let Some(t) = opts.tolerance {
        scenario.tolerance = t;
    }
    if let Some(n) = opts.points {
        let seed = opts.seed.unwrap_or(0);
        scenario.sampler = Some(scenario::Sampler {
            count: n,
            seed,
            range: [-1.0, 1.0, -1.0, 1.0],
        });
    } else if let Some(s) = opts.seed {
        if let Some(sampler) = &mut scenario.sampler {
            sampler.seed = s;
        }
    }
}

fn emit(report: &Report, opts: &GlobalOpts) -> ExitCode {
    for check in &report.per_check {
        println!(
            "[{}] {:<28} max residual {:.3e}  (monomial {}, point {:?})",
            if check.pass { "pass" } else { "FAIL" },
            check.name,
            check.max_residual,
            check.worst_monomial,
            check.worst_point,
        );
    }
    for d in &report.discrepancies {
        println!(
            "DISCREPANCY {}: {} residual {:.3e} on {}{}",
            d.family,
            d.check,
            d.residual,
            d.leading_monomial,
            d.suggested_fix
                .as_ref()
                .map(|f| format!("; candidate fix: {f}"))
                .unwrap_or_default(),
        );
    }
    if let Some(path) = &opts.report {
        match serde_json::to_string_pretty(report) {
            Ok(text) => {
                if let Err(e) = std::fs::write(path, text) {
                    eprintln!("cannot write report {}: {e}", path.display());
                    return ExitCode::from(2);
                }
            }
            Err(e) => {
                eprintln!("cannot serialize report: {e}");
                return ExitCode::from(2);
            }
        }
    }
    if report.exit_code() == 0 {
        ExitCode::SUCCESS
    } else {
        ExitCode::from(1)
    }
}

fn load_scenario(
    path: &PathBuf,
    opts: &GlobalOpts,
    expected_mode: scenario::Mode,
) -> Result<Scenario, String> {
    let text =
        std::fs::read_to_string(path).map_err(|e| format!("cannot read {}: {e}", path.display()))?;
    let mut sc = Scenario::from_json(&text).map_err(|e| e.to_string())?;
    if sc.mode != expected_mode {
        return Err(format!(
            "scenario mode {:?} does not match the invoked command",
            sc.mode
        ));
    }
    apply_overrides(&mut sc, opts);
    Ok(sc)
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let opts = cli.global.clone();
    let result: Result<Report, String> = match cli.command {
        Command::CheckGc { scenario } => load_scenario(&scenario, &opts, scenario::Mode::SusyGc)
            .and_then(|sc| run(&sc).map_err(|e| e.to_string())),
        Command::CheckClassical { scenario } => {
            load_scenario(&scenario, &opts, scenario::Mode::ClassicalGc)
                .and_then(|sc| run(&sc).map_err(|e| e.to_string()))
        }
        Command::Adjoint { scenario } => load_scenario(&scenario, &opts, scenario::Mode::Adjoint)
            .and_then(|sc| run(&sc).map_err(|e| e.to_string())),
        Command::Brackets { algebra } => {
            run_brackets_by_name(&algebra, opts.tolerance.unwrap_or(1e-12))
                .map_err(|e| e.to_string())
        }
        Command::Catalog {
            action: CatalogAction::Verify { family, params },
        } => (|| {
            let fam = FamilyId::parse(&family).map_err(|e| e.to_string())?;
            let mut fp = FamilyParameters::default();
            let mut scalars = BTreeMap::new();
            for (k, v) in params {
                scalars.insert(k, Complex64::new(v, 0.0));
            }
            fp.scalars = scalars;
            let config = VerifyConfig {
                k: opts.generators.unwrap_or(8),
                order: opts.jet_order.unwrap_or(4),
                tolerance: opts.tolerance.unwrap_or(1e-10),
            };
            let points = default_points(fam, opts.points.unwrap_or(10), opts.seed.unwrap_or(0));
            verify(fam, &fp, &points, &config).map_err(|e| e.to_string())
        })(),
    };
    match result {
        Ok(report) => emit(&report, &opts),
        Err(message) => {
            eprintln!("error: {message}");
            ExitCode::from(2)
        }
    }
}
