//! `crnbal`: balance analysis and mass-action simulation for `.crn` files.
//!
//! Exit codes: 0 success / all requested verdicts hold, 1 a requested
//! verdict fails, 2 parse or I/O error, 3 precondition violation,
//! 4 simulation aborted near the positive boundary.

use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand};

use crnbal::balance::{is_complex_balanced, is_detailed_balanced, is_formally_balanced};
use crnbal::dynamics::{find_compatible_equilibrium, gibbs, simulate, DynamicsError, SimOptions};
use crnbal::graphkit::{connected_components, is_strongly_connected};
use crnbal::kirchhoff::rho_by_cofactor;
use crnbal::model::build_matrices;
use crnbal::rational::format_rational;
use crnbal::report::{AnalysisReport, WitnessReport};
use crnbal::{ArithmeticMode, BalanceVerdict, ReactionNetwork};

const EXIT_VERDICT_FAILED: u8 = 1;
const EXIT_PARSE_ERROR: u8 = 2;
const EXIT_PRECONDITION: u8 = 3;
const EXIT_BOUNDARY: u8 = 4;

#[derive(Parser)]
#[command(name = "crnbal", version, about = "Reaction-network balance analysis")]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Full analysis report: structure, Kirchhoff vector, all verdicts.
    Analyze {
        file: PathBuf,
        /// Emit the JSON report instead of text.
        #[arg(long, conflicts_with = "text")]
        json: bool,
        /// Emit the text report (default).
        #[arg(long)]
        text: bool,
    },
    /// Check selected balance properties; exit 0 iff all requested hold.
    Check {
        file: PathBuf,
        /// Check complex balancing.
        #[arg(long)]
        complex: bool,
        /// Check formal balancing (requires a reversible network).
        #[arg(long)]
        formal: bool,
        /// Check detailed balancing (requires a reversible network).
        #[arg(long)]
        detailed: bool,
    },
    /// Integrate the mass-action dynamics and write a CSV trajectory.
    Simulate {
        file: PathBuf,
        /// Initial concentrations, comma separated, one per species.
        #[arg(long, value_delimiter = ',', required = true)]
        x0: Vec<f64>,
        /// Integration horizon.
        #[arg(long = "t-end")]
        t_end: f64,
        /// Output CSV path (header `t,x_1,...,x_m,G`).
        #[arg(long)]
        out: PathBuf,
        /// Also print the compatible equilibrium and the final Gibbs value.
        #[arg(long)]
        equilibrium: bool,
        /// Relative integration tolerance.
        #[arg(long, default_value_t = 1e-8)]
        rtol: f64,
        /// Absolute integration tolerance.
        #[arg(long, default_value_t = 1e-12)]
        atol: f64,
        /// Integrate in logarithmic coordinates (stiffness fallback).
        #[arg(long)]
        log_coordinates: bool,
    },
    /// Print the Kirchhoff vector per component with connectivity flags.
    Rho { file: PathBuf },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli.command) {
        Ok(()) => ExitCode::SUCCESS,
        Err((code, message)) => {
            eprintln!("crnbal: {message}");
            ExitCode::from(code)
        }
    }
}

type Failure = (u8, String);

fn arithmetic_mode() -> Result<ArithmeticMode, Failure> {
    match std::env::var("CRNBAL_MODE") {
        Err(_) => Ok(ArithmeticMode::Exact),
        Ok(value) => match value.as_str() {
            "exact" => Ok(ArithmeticMode::Exact),
            "float" => Ok(ArithmeticMode::Float),
            other => Err((
                EXIT_PRECONDITION,
                format!("CRNBAL_MODE must be `exact` or `float`, got `{other}`"),
            )),
        },
    }
}

fn load_network(path: &Path) -> Result<ReactionNetwork, Failure> {
    let text = std::fs::read_to_string(path)
        .map_err(|e| (EXIT_PARSE_ERROR, format!("{}: {e}", path.display())))?;
    let net = crnbal::parse_network(&text)
        .map_err(|e| (EXIT_PARSE_ERROR, format!("{}: {e}", path.display())))?;
    Ok(net.with_mode(arithmetic_mode()?))
}

fn run(command: Command) -> Result<(), Failure> {
    match command {
        Command::Analyze { file, json, text: _ } => {
            let net = load_network(&file)?;
            let report = AnalysisReport::analyze(&net);
            if json {
                println!("{}", report.to_json());
            } else {
                print!("{}", report.to_text());
            }
            Ok(())
        }
        Command::Check { file, complex, formal, detailed } => {
            if !(complex || formal || detailed) {
                return Err((
                    EXIT_PRECONDITION,
                    "no checks requested; pass --complex, --formal and/or --detailed".into(),
                ));
            }
            let net = load_network(&file)?;
            let mut all_hold = true;
            if complex {
                all_hold &= report_verdict("complex", &is_complex_balanced(&net));
            }
            if formal {
                let verdict = is_formally_balanced(&net).map_err(not_reversible)?;
                all_hold &= report_verdict("formal", &verdict);
            }
            if detailed {
                let verdict = is_detailed_balanced(&net).map_err(not_reversible)?;
                all_hold &= report_verdict("detailed", &verdict);
            }
            if all_hold {
                Ok(())
            } else {
                Err((EXIT_VERDICT_FAILED, "one or more requested verdicts failed".into()))
            }
        }
        Command::Simulate { file, x0, t_end, out, equilibrium, rtol, atol, log_coordinates } => {
            let net = load_network(&file)?;
            if x0.len() != net.num_species() {
                return Err((
                    EXIT_PRECONDITION,
                    format!("--x0 needs {} values, got {}", net.num_species(), x0.len()),
                ));
            }
            if let Some(i) = x0.iter().position(|v| !(*v > 0.0)) {
                return Err((
                    EXIT_PRECONDITION,
                    format!("initial concentration {} must be positive", i + 1),
                ));
            }
            if !(t_end > 0.0) {
                return Err((EXIT_PRECONDITION, "--t-end must be positive".into()));
            }

            // Gibbs reference: the compatible equilibrium, when one exists.
            let x_ref = match find_compatible_equilibrium(&net, &x0) {
                Ok(x) => Some(x),
                Err(DynamicsError::NotComplexBalanced) => None,
                Err(e) => return Err((EXIT_PRECONDITION, e.to_string())),
            };
            if equilibrium && x_ref.is_none() {
                return Err((
                    EXIT_PRECONDITION,
                    "--equilibrium requires a complex-balanced network".into(),
                ));
            }

            let options =
                SimOptions { rtol, atol, log_coordinates, ..Default::default() };
            let write = |csv: String| -> Result<(), Failure> {
                std::fs::write(&out, csv)
                    .map_err(|e| (EXIT_PARSE_ERROR, format!("{}: {e}", out.display())))
            };
            match simulate(&net, &x0, t_end, &options) {
                Ok(trajectory) => {
                    write(trajectory.to_csv(x_ref.as_deref()))?;
                    if let (true, Some(x_ref)) = (equilibrium, &x_ref) {
                        let xs: Vec<String> =
                            x_ref.iter().map(|x| format!("{x:.12e}")).collect();
                        println!("x** = [{}]", xs.join(", "));
                        let g = gibbs(&trajectory.last().x, x_ref)
                            .map_err(|e| (EXIT_PRECONDITION, e.to_string()))?;
                        println!("final G = {g:.12e}");
                    }
                    Ok(())
                }
                Err(DynamicsError::BoundaryApproach { t, proximity, trajectory }) => {
                    write(trajectory.to_csv(x_ref.as_deref()))?;
                    Err((
                        EXIT_BOUNDARY,
                        format!(
                            "boundary approach at t = {t} (proximity {proximity:e}); \
                             partial trajectory written to {}",
                            out.display()
                        ),
                    ))
                }
                Err(e) => Err((EXIT_PRECONDITION, e.to_string())),
            }
        }
        Command::Rho { file } => {
            let net = load_network(&file)?;
            let bundle = build_matrices(&net);
            let partition = connected_components(&bundle);
            let kirchhoff = rho_by_cofactor(&bundle.l, &partition);
            for (i, comp) in partition.components().iter().enumerate() {
                let values: Vec<String> = comp
                    .vertices
                    .iter()
                    .map(|&v| format_rational(&kirchhoff.rho()[v]))
                    .collect();
                let flag = if is_strongly_connected(comp) {
                    "strongly connected"
                } else {
                    "not strongly connected"
                };
                println!("component {i} ({flag}): {}", values.join(" "));
            }
            Ok(())
        }
    }
}

fn not_reversible(e: crnbal::NotReversible) -> Failure {
    (
        EXIT_PRECONDITION,
        format!("{e}; formal and detailed balance are defined for reversible networks only"),
    )
}

fn report_verdict(label: &str, verdict: &BalanceVerdict) -> bool {
    if verdict.holds {
        println!("{label}: holds");
    } else {
        println!("{label}: fails");
        if let Some(violation) = &verdict.violation {
            match WitnessReport::from(violation) {
                WitnessReport::NotStronglyConnected { component } => {
                    println!("  witness: component {component} is not strongly connected");
                }
                WitnessReport::KernelViolation { context, sigma, lhs, rhs } => {
                    println!(
                        "  witness: sigma = [{}] in {context}, {lhs} != {rhs}",
                        sigma.join(", ")
                    );
                }
            }
        }
    }
    verdict.holds
}
