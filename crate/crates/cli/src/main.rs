//! `loccforge`: verification, decision and simulation commands with JSON or
//! plain-text reports.
//!
//! Exit status is 0 for `pass` and `not-found`, 1 for `fail` and 2 for
//! input errors.

mod commands;
mod input;
mod report;

use std::io::Write;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use loccforge::Tolerances;

use report::Report;

#[derive(Parser, Debug)]
#[command(
    name = "loccforge",
    version,
    about = "Finite-round LOCC transformations in SLOCC classes with finite stabilizers"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    #[command(flatten)]
    global: GlobalArgs,
}

#[derive(Args, Debug, Clone)]
pub struct GlobalArgs {
    /// Report format.
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    pub format: Format,

    /// Equality tolerance.
    #[arg(long, env = "LOCCFORGE_TOL", default_value_t = Tolerances::<f64>::DEFAULT_EQ, global = true)]
    pub tol: f64,

    /// Threshold above which a quantity counts as nonzero.
    #[arg(long, default_value_t = Tolerances::<f64>::DEFAULT_NONZERO, global = true)]
    pub nz: f64,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Text,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Verify a seed state and its stabilizer group.
    VerifySeed(commands::VerifySeedArgs),
    /// Decide whether a class member is reachable by a nontrivial protocol.
    CheckReachable(commands::ReachableArgs),
    /// Decide one-round deterministic convertibility.
    CheckConvertible(commands::ConvertibleArgs),
    /// Simulate a protocol file on a class member.
    Simulate(commands::SimulateArgs),
    /// Build and check the two-round L-state protocol.
    PaperExample(commands::ExampleArgs),
    /// Estimate reachable or convertible fractions by sampling.
    Sample(commands::SampleArgs),
}

impl Command {
    fn name(&self) -> &'static str {
        match self {
            Command::VerifySeed(_) => "verify-seed",
            Command::CheckReachable(_) => "check-reachable",
            Command::CheckConvertible(_) => "check-convertible",
            Command::Simulate(_) => "simulate",
            Command::PaperExample(_) => "paper-example",
            Command::Sample(_) => "sample",
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let name = cli.command.name();
    let tol = Tolerances::new(cli.global.tol, cli.global.nz);
    let report = if !tol.is_valid() {
        Report::error(name, format!("need 0 < tol < nz, got tol = {}, nz = {}", tol.eq, tol.nonzero), tol)
    } else {
        let result = match &cli.command {
            Command::VerifySeed(a) => commands::verify_seed(a, tol),
            Command::CheckReachable(a) => commands::check_reachable(a, tol),
            Command::CheckConvertible(a) => commands::check_convertible(a, tol),
            Command::Simulate(a) => commands::simulate(a, tol),
            Command::PaperExample(a) => commands::paper_example(a, tol),
            Command::Sample(a) => commands::sample(a, tol),
        };
        result.unwrap_or_else(|msg| Report::error(name, msg, tol))
    };
    // a closed pipe downstream is not our failure
    let _ = writeln!(std::io::stdout(), "{}", report.render(cli.global.format == Format::Json));
    report.status.exit_code()
}
