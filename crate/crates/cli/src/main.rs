use std::path::PathBuf;
use std::process::ExitCode;

use adwlab_core::scenario::{load_scenario, CheckId, Suite, BUILTIN_NAMES};
use adwlab_core::series::takeda_coefficients;
use adwlab_core::suite::{emit_error_curve, profile_curve_csv, run_suite, Status};
use anyhow::{Context, Result};
use clap::{Parser, Subcommand, ValueEnum};

/// Verification runner for modal solutions of damped wave equations.
#[derive(Debug, Parser)]
#[command(name = "adwlab", version)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Run a verification suite on one or more scenarios (built-in names or JSON files).
    Run {
        #[arg(required = true)]
        scenarios: Vec<String>,
        #[arg(long, value_enum, default_value = "all")]
        suite: SuiteArg,
        /// Expansion order used by the decay checks (capped by each scenario's m_max).
        #[arg(long, default_value_t = 3)]
        m: usize,
        /// Write the JSON report here instead of stdout.
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Write the expansion error curve `t,error,bound_ref` as CSV.
    Curve {
        scenario: String,
        #[arg(long)]
        m: usize,
        #[arg(long)]
        out: PathBuf,
    },
    /// Write the profile `ubar_l` of one mode as `t,value` CSV.
    Profile {
        scenario: String,
        #[arg(long)]
        mode: usize,
        #[arg(long)]
        ell: usize,
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Print the exact Takeda coefficient tables as CSV.
    TakedaCoeffs {
        #[arg(long, default_value_t = 4)]
        jmax: usize,
        #[arg(long, default_value_t = 4)]
        kmax: usize,
    },
    /// List built-in scenarios and check identifiers.
    List,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum SuiteArg {
    Identities,
    Recursions,
    Decay,
    Oracle,
    All,
}

impl From<SuiteArg> for Suite {
    fn from(s: SuiteArg) -> Self {
        match s {
            SuiteArg::Identities => Suite::Identities,
            SuiteArg::Recursions => Suite::Recursions,
            SuiteArg::Decay => Suite::Decay,
            SuiteArg::Oracle => Suite::Oracle,
            SuiteArg::All => Suite::All,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match execute(cli.command) {
        Ok(code) => ExitCode::from(code),
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}

fn execute(command: Command) -> Result<u8> {
    match command {
        Command::Run {
            scenarios,
            suite,
            m,
            out,
        } => {
            let loaded = scenarios
                .iter()
                .map(|s| load_scenario(s).with_context(|| format!("loading scenario `{s}`")))
                .collect::<Result<Vec<_>>>()?;
            let report = run_suite(&loaded, suite.into(), m)?;
            let text = report.to_json()?;
            match out {
                Some(path) => {
                    std::fs::write(&path, text + "\n").with_context(|| format!("writing {}", path.display()))?;
                    for r in &report.records {
                        let status = match r.status {
                            Status::Pass => "PASS",
                            Status::Fail => "FAIL",
                            Status::Error => "ERROR",
                        };
                        println!("{status:5} {:<26} {:<16} {}", r.check, r.scenario, r.params);
                    }
                    println!(
                        "{} passed, {} failed, {} errors",
                        report.passed, report.failed, report.errors
                    );
                }
                None => println!("{text}"),
            }
            Ok(report.exit_code() as u8)
        }
        Command::Curve { scenario, m, out } => {
            let s = load_scenario(&scenario)?;
            emit_error_curve(&s, m, &out).with_context(|| format!("writing {}", out.display()))?;
            Ok(0)
        }
        Command::Profile {
            scenario,
            mode,
            ell,
            out,
        } => {
            let s = load_scenario(&scenario)?;
            let csv = profile_curve_csv(&s, mode, ell)?;
            match out {
                Some(path) => std::fs::write(&path, csv).with_context(|| format!("writing {}", path.display()))?,
                None => print!("{csv}"),
            }
            Ok(0)
        }
        Command::TakedaCoeffs { jmax, kmax } => {
            print!("{}", takeda_coefficients(jmax, kmax)?.to_csv());
            Ok(0)
        }
        Command::List => {
            println!("scenarios:");
            for name in BUILTIN_NAMES {
                println!("  {name}");
            }
            println!("checks:");
            for c in CheckId::ALL {
                println!("  {:<26} {:?}", c.name(), c.suite());
            }
            Ok(0)
        }
    }
}
