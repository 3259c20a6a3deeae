//! Command-line surface of the kinetic-theory toolkit: closed-form
//! reports, reference-table reproduction, viscosity fitting, plot data,
//! and the Monte Carlo verification battery.
//!
//! Exit codes: 0 success, 1 validation/parse error, 2 numerical
//! mismatch, 3 I/O error.

mod config;
mod csvio;
mod figures;
mod fit;
mod report;
mod tables;
mod verify;

use clap::{Parser, Subcommand};
use polykin::ensembles::EnsembleError;
use polykin::fourteen_moment::{
    eucken_prandtl, prandtl, relaxation_times, solve_gamma_star, transport_coefficients,
    FourteenError,
};
use polykin::mc::{McError, McOptions};
use polykin::microdynamics::MicroError;
use polykin::six_field::{relax_homogeneous, tau_pi_six, SixFieldError};
use polykin::special::SpecialFnError;
use serde::Serialize;
use std::path::{Path, PathBuf};
use thiserror::Error;

use crate::config::{resolve, Overrides};

/// Top-level failure, mapped onto the process exit code.
#[derive(Debug, Error)]
pub enum AppError {
    /// Bad input: flags, config, dataset, domain violations. Exit 1.
    #[error("{0}")]
    Validation(String),
    /// Numerical mismatch: a verified quantity missed its gate. Exit 2.
    #[error("{0}")]
    Numerical(String),
    /// Filesystem or serialization failure. Exit 3.
    #[error("{0}")]
    Io(String),
}

impl AppError {
    fn exit_code(&self) -> i32 {
        match self {
            AppError::Validation(_) => 1,
            AppError::Numerical(_) => 2,
            AppError::Io(_) => 3,
        }
    }
}

macro_rules! validation_from {
    ($($err:ty),*) => {$(
        impl From<$err> for AppError {
            fn from(e: $err) -> Self {
                AppError::Validation(e.to_string())
            }
        }
    )*};
}

validation_from!(SpecialFnError, MicroError, EnsembleError, SixFieldError, FourteenError, McError);

#[derive(Parser)]
#[command(
    name = "polykin",
    version,
    about = "Kinetic-theory toolkit for polyatomic gases with continuous internal energy"
)]
struct Cli {
    /// Base seed of the Monte Carlo estimators.
    #[arg(long, global = true, default_value_t = 1)]
    seed: u64,
    /// Samples per Monte Carlo estimator.
    #[arg(long, global = true, default_value_t = 1_000_000)]
    samples: u64,
    /// Worker threads; results are bit-identical per (seed, samples, workers).
    #[arg(long, global = true, default_value_t = 4)]
    workers: usize,
    /// Force the dimensionless unit system (m = 1, k = 1).
    #[arg(long, global = true)]
    dimensionless: bool,
    /// Output file (or directory for `reproduce-tables`).
    #[arg(long, global = true)]
    out: Option<PathBuf>,
    /// Flat key=value configuration file.
    #[arg(long, global = true)]
    config: Option<PathBuf>,
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Equilibrium collision-frequency surface as plot-ready CSV.
    CollisionFreq {
        /// Internal-energy exponents.
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.5])]
        alpha: Vec<f64>,
        /// Kernel velocity exponents.
        #[arg(long, value_delimiter = ',', default_values_t = [0.5, 1.0, 2.0])]
        gamma: Vec<f64>,
        /// Upper end of the speed axis.
        #[arg(long, default_value_t = 5.0)]
        c_max: f64,
        /// Upper end of the internal-energy axis.
        #[arg(long, default_value_t = 5.0)]
        i_max: f64,
        /// Grid nodes per axis.
        #[arg(long, default_value_t = 101)]
        points: usize,
    },
    /// Bulk-pressure (six-field) closed-form report at one state.
    SixField {
        #[command(flatten)]
        physics: PhysicsArgs,
        /// Dynamic pressure as a fraction of `p`.
        #[arg(long, default_value_t = 0.3)]
        pi_ratio: f64,
    },
    /// Homogeneous relaxation trajectory of the dynamic pressure.
    SixFieldRelax {
        #[command(flatten)]
        physics: PhysicsArgs,
        /// Initial dynamic pressure as a fraction of `p`.
        #[arg(long, default_value_t = 0.3)]
        pi_ratio: f64,
        /// Integration horizon in units of the relaxation time.
        #[arg(long, default_value_t = 5.0)]
        horizon: f64,
        /// Relative tolerance of the adaptive integrator.
        #[arg(long, default_value_t = 1e-8)]
        rel_tol: f64,
    },
    /// Fourteen-moment transport coefficients and relaxation times.
    Fourteen {
        #[command(flatten)]
        physics: PhysicsArgs,
    },
    /// Kernel exponent at which the model Prandtl number equals the
    /// theoretical one.
    PrandtlMatch {
        /// Internal-energy exponents to match.
        #[arg(long, value_delimiter = ',')]
        alpha: Option<Vec<f64>>,
        /// Atom counts N (alpha = (3N-5)/2), alternative to --alpha.
        #[arg(long, value_delimiter = ',')]
        n_atoms: Option<Vec<u32>>,
    },
    /// Prandtl-gap scan over the kernel exponent (plot-ready CSV).
    DeltaScan {
        /// Internal-energy exponents.
        #[arg(long, value_delimiter = ',', default_values_t = [0.0, 0.5, 1.0, 2.0, 5.0])]
        alpha: Vec<f64>,
        /// Upper end of the exponent axis.
        #[arg(long, default_value_t = 6.0)]
        gamma_max: f64,
        /// Number of scan points.
        #[arg(long, default_value_t = 600)]
        points: usize,
    },
    /// Fit a viscosity power law `mu = A T^s` and derive the kernel
    /// exponent and Prandtl number.
    FitViscosity {
        /// Dataset CSV (`T_K,mu_Pa_s` with `# gas:`/`# source:` comments).
        #[arg(long)]
        input: PathBuf,
        /// Internal-energy exponent for the Prandtl number.
        #[arg(long, default_value_t = 0.0)]
        alpha: f64,
        /// Also write the fitted curve (T, observed, fitted) as CSV.
        #[arg(long)]
        emit_curve: Option<PathBuf>,
    },
    /// Reproduce the four reference tables with per-cell pass/fail.
    ReproduceTables,
    /// Monte Carlo verification battery of the closed forms.
    Verify,
}

/// Physics flags shared by the closed-form report commands.
#[derive(clap::Args)]
struct PhysicsArgs {
    /// Internal-energy exponent.
    #[arg(long)]
    alpha: Option<f64>,
    /// Kernel velocity exponent.
    #[arg(long)]
    gamma: Option<f64>,
    /// Constant angular factor of the kernel.
    #[arg(long)]
    k_const: Option<f64>,
    /// Mass density.
    #[arg(long)]
    rho: Option<f64>,
    /// Temperature.
    #[arg(long)]
    temp: Option<f64>,
}

impl PhysicsArgs {
    fn overrides(&self, dimensionless: bool, pi_ratio: Option<f64>) -> Overrides {
        Overrides {
            alpha: self.alpha,
            gamma: self.gamma,
            k_const: self.k_const,
            rho: self.rho,
            temp: self.temp,
            pi_ratio,
            dimensionless,
        }
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(e) => {
            let code = if e.use_stderr() { 1 } else { 0 };
            let _ = e.print();
            std::process::exit(code);
        }
    };
    if let Err(e) = run(cli) {
        eprintln!("error: {e}");
        std::process::exit(e.exit_code());
    }
}

fn out_or(out: &Option<PathBuf>, default: &str) -> PathBuf {
    out.clone().unwrap_or_else(|| PathBuf::from(default))
}

#[derive(Serialize)]
struct CsvSummary {
    schema: u32,
    command: String,
    rows: usize,
    path: String,
}

fn emit_csv_artifact(
    command: &str,
    path: &Path,
    csv: &str,
    rows: usize,
) -> Result<(), AppError> {
    report::write_text(path, csv)?;
    let summary = CsvSummary {
        schema: 1,
        command: command.to_string(),
        rows,
        path: path.display().to_string(),
    };
    print!("{}", report::json_string(&summary)?);
    Ok(())
}

fn run(cli: Cli) -> Result<(), AppError> {
    let mc_opt = McOptions {
        seed: cli.seed,
        n: cli.samples,
        workers: cli.workers,
    };
    match &cli.command {
        Command::CollisionFreq { alpha, gamma, c_max, i_max, points } => {
            let rows = figures::collision_freq_rows(alpha, gamma, *c_max, *i_max, *points)?;
            let csv = figures::rows_csv("alpha,gamma,c_hat,i_hat,nu_hat", &rows);
            let path = out_or(&cli.out, "collision_freq.csv");
            emit_csv_artifact("collision-freq", &path, &csv, rows.len())
        }
        Command::SixField { physics, pi_ratio } => {
            let cfg = resolve(
                cli.config.as_deref(),
                &physics.overrides(cli.dimensionless, Some(*pi_ratio)),
            )?;
            let rep = polykin::six_field::report(&cfg.hydro, &cfg.species, &cfg.interaction)?;
            #[derive(Serialize)]
            struct Out {
                schema: u32,
                command: String,
                alpha: f64,
                gamma: f64,
                pi_over_p: f64,
                #[serde(flatten)]
                report: polykin::six_field::SixFieldReport,
            }
            let out = Out {
                schema: 1,
                command: "six-field".to_string(),
                alpha: cfg.species.alpha,
                gamma: cfg.interaction.gamma,
                pi_over_p: cfg.hydro.pi_over_p(&cfg.species),
                report: rep,
            };
            print!("{}", report::json_string(&out)?);
            if let Some(path) = &cli.out {
                report::write_json(path, &out)?;
            }
            Ok(())
        }
        Command::SixFieldRelax { physics, pi_ratio, horizon, rel_tol } => {
            let cfg = resolve(
                cli.config.as_deref(),
                &physics.overrides(cli.dimensionless, Some(*pi_ratio)),
            )?;
            let tau = 3.0 * tau_pi_six(&cfg.hydro, &cfg.species, &cfg.interaction)?;
            let points =
                relax_homogeneous(&cfg.hydro, &cfg.species, &cfg.interaction, horizon * tau, *rel_tol)?;
            let mut csv = String::from("t,pi,pi_over_p\n");
            for p in &points {
                csv.push_str(&format!("{},{},{}\n", p.t, p.pi, p.pi_over_p));
            }
            let path = out_or(&cli.out, "six_field_relax.csv");
            report::write_text(&path, &csv)?;
            #[derive(Serialize)]
            struct Out {
                schema: u32,
                command: String,
                tau_pi: f64,
                steps: usize,
                pi_over_p_final: f64,
                path: String,
            }
            let out = Out {
                schema: 1,
                command: "six-field-relax".to_string(),
                tau_pi: tau,
                steps: points.len(),
                pi_over_p_final: points.last().map_or(f64::NAN, |p| p.pi_over_p),
                path: path.display().to_string(),
            };
            print!("{}", report::json_string(&out)?);
            Ok(())
        }
        Command::Fourteen { physics } => {
            let cfg = resolve(
                cli.config.as_deref(),
                &physics.overrides(cli.dimensionless, None),
            )?;
            let transport = transport_coefficients(&cfg.hydro, &cfg.species, &cfg.interaction)?;
            let times = relaxation_times(&cfg.hydro, &cfg.species, &cfg.interaction)?;
            #[derive(Serialize)]
            struct Out {
                schema: u32,
                command: String,
                alpha: f64,
                gamma: f64,
                transport: polykin::fourteen_moment::TransportCoefficients,
                relaxation: polykin::fourteen_moment::RelaxationTimes,
            }
            let out = Out {
                schema: 1,
                command: "fourteen".to_string(),
                alpha: cfg.species.alpha,
                gamma: cfg.interaction.gamma,
                transport,
                relaxation: times,
            };
            print!("{}", report::json_string(&out)?);
            if let Some(path) = &cli.out {
                report::write_json(path, &out)?;
            }
            Ok(())
        }
        Command::PrandtlMatch { alpha, n_atoms } => {
            let mut targets: Vec<(Option<u32>, f64)> = Vec::new();
            if let Some(list) = alpha {
                targets.extend(list.iter().map(|&a| (None, a)));
            }
            if let Some(list) = n_atoms {
                for &n in list {
                    if n < 2 {
                        return Err(AppError::Validation(format!(
                            "a molecule needs at least 2 atoms, got {n}"
                        )));
                    }
                    targets.push((Some(n), 0.5 * (3.0 * f64::from(n) - 5.0)));
                }
            }
            if targets.is_empty() {
                targets.push((None, 0.0));
                targets.push((None, 0.5));
                targets.extend((3..=10).map(|n| (Some(n), 0.5 * (3.0 * f64::from(n) - 5.0))));
            }
            #[derive(Serialize)]
            struct Row {
                n_atoms: Option<u32>,
                alpha: f64,
                gamma_star: f64,
                prandtl_at_root: f64,
                prandtl_eucken: f64,
            }
            let mut rows = Vec::new();
            for (n, a) in targets {
                let eucken = eucken_prandtl(a);
                let root = solve_gamma_star(a, eucken)?;
                rows.push(Row {
                    n_atoms: n,
                    alpha: a,
                    gamma_star: root,
                    prandtl_at_root: prandtl(a, root)?,
                    prandtl_eucken: eucken,
                });
            }
            #[derive(Serialize)]
            struct Out {
                schema: u32,
                command: String,
                rows: Vec<Row>,
            }
            let out = Out {
                schema: 1,
                command: "prandtl-match".to_string(),
                rows,
            };
            print!("{}", report::json_string(&out)?);
            if let Some(path) = &cli.out {
                report::write_json(path, &out)?;
            }
            Ok(())
        }
        Command::DeltaScan { alpha, gamma_max, points } => {
            let rows = figures::delta_rows(alpha, *gamma_max, *points)?;
            let csv = figures::rows_csv("alpha,gamma,delta", &rows);
            let path = out_or(&cli.out, "delta_scan.csv");
            emit_csv_artifact("delta-scan", &path, &csv, rows.len())
        }
        Command::FitViscosity { input, alpha, emit_curve } => {
            let ds = csvio::read_viscosity_csv(input)?;
            let fit_result = fit::fit_power_law(&ds, *alpha)?;
            if let Some(curve_path) = emit_curve {
                let rows = fit::curve_rows(&ds, &fit_result);
                let csv = figures::rows_csv("T_K,mu_obs_Pa_s,mu_fit_Pa_s", &rows);
                report::write_text(curve_path, &csv)?;
            }
            #[derive(Serialize)]
            struct Out {
                schema: u32,
                command: String,
                fit: fit::FitResult,
            }
            let out = Out {
                schema: 1,
                command: "fit-viscosity".to_string(),
                fit: fit_result,
            };
            print!("{}", report::json_string(&out)?);
            if let Some(path) = &cli.out {
                report::write_json(path, &out)?;
            }
            Ok(())
        }
        Command::ReproduceTables => {
            let reports = tables::reproduce_all()?;
            let dir = out_or(&cli.out, "tables_out");
            for rep in &reports {
                report::write_text(&dir.join(format!("{}.csv", rep.name)), &tables::table_csv(rep))?;
                report::write_json(&dir.join(format!("{}.json", rep.name)), rep)?;
            }
            #[derive(Serialize)]
            struct Out<'a> {
                schema: u32,
                command: String,
                out_dir: String,
                tables: &'a [tables::TableReport],
                all_pass: bool,
            }
            let all_pass = reports.iter().all(|r| r.all_pass);
            let out = Out {
                schema: 1,
                command: "reproduce-tables".to_string(),
                out_dir: dir.display().to_string(),
                tables: &reports,
                all_pass,
            };
            report::write_json(&dir.join("summary.json"), &out)?;
            print!("{}", report::json_string(&out)?);
            if !all_pass {
                let failed: Vec<String> = reports
                    .iter()
                    .flat_map(|r| r.cells.iter().filter(|c| !c.pass).map(move |c| {
                        format!("{} {} {}", r.name, c.row, c.column)
                    }))
                    .collect();
                return Err(AppError::Numerical(format!(
                    "table cells out of tolerance: {}",
                    failed.join(", ")
                )));
            }
            Ok(())
        }
        Command::Verify => {
            let rep = verify::run_verify(&mc_opt)?;
            for check in &rep.checks {
                println!(
                    "{} {}: {}",
                    if check.pass { "PASS" } else { "FAIL" },
                    check.name,
                    check.detail
                );
            }
            if let Some(path) = &cli.out {
                report::write_json(path, &rep)?;
            }
            if !rep.all_pass {
                return Err(AppError::Numerical(
                    "verification battery failed; see the FAIL lines above".to_string(),
                ));
            }
            Ok(())
        }
    }
}
