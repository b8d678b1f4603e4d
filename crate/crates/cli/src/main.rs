//! Command-line front end for the multi-cloud workflow scheduler.
//!
//! Exit codes: 0 on success, 1 for usage errors, 2 for unreadable or
//! inconsistent input data, 3 for internal invariant violations.

use clap::{Parser, Subcommand};

mod demo;
mod error;
mod eval;
mod generate;
mod run;

use error::CliError;

#[derive(Parser)]
#[command(
    name = "mcsched",
    version,
    about = "Schedule DAG-structured applications onto heterogeneous clouds"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Generate a benchmark instance (ETC matrix, dependency matrix, manifest)
    Generate(generate::GenerateArgs),
    /// Run the genetic algorithm and baselines, reporting CSV rows
    Run(run::RunArgs),
    /// Score an explicit schedule against an instance
    Eval(eval::EvalArgs),
    /// Print the built-in worked example
    Demo(demo::DemoArgs),
}

fn dispatch(cli: &Cli) -> Result<(), CliError> {
    match &cli.command {
        Command::Generate(args) => generate::run(args),
        Command::Run(args) => run::run(args),
        Command::Eval(args) => eval::run(args),
        Command::Demo(args) => demo::run(args),
    }
}

fn main() {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            // --help and --version land here too; only real parse failures
            // should report a usage error.
            let code = if err.use_stderr() { 1 } else { 0 };
            let _ = err.print();
            std::process::exit(code);
        }
    };
    if let Err(err) = dispatch(&cli) {
        eprintln!("{err}");
        std::process::exit(err.exit_code());
    }
}
