mod commands;
mod config;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use crate::config::ConfigFile;
use crate::output::Format;

const AFTER_HELP: &str = "\
Integrand expressions (--f) are written in the variable t:

  expr   := term (('+' | '-') term)*
  term   := factor (('*' | '/') factor)*
  factor := '-' factor | atom ('^' factor)?
  atom   := number | 't' | '(' expr ')'
  number := digits ['.' digits] [('e' | 'E') ['+' | '-'] digits]

'^' is right-associative and unary minus applies to the whole factor, so
-t^2 means -(t^2). There are no function calls; t^r for non-integer r is
exp(r ln t) and needs t > 0.

Points are a comma list (0.5,1,2) or start:stop:count with geometric spacing.

Every flag can also be given as key=value in the --config file (keys are the
flag names without dashes, e.g. max_terms = 20000); flags win on conflict.

Exit codes: 0 success, 1 a verification failed, 2 usage, configuration or
evaluation error, 3 a series did not converge.";

#[derive(Debug, Parser)]
#[command(
    name = "qfrac",
    version,
    about = "Generalized q-fractional integrals and derivatives",
    after_help = AFTER_HELP
)]
struct Cli {
    /// Flat key=value file supplying values for flags not given.
    #[arg(long, global = true, value_name = "PATH")]
    config: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Evaluate J^α f (or D^α f) at each point.
    Eval(EvalArgs),
    /// Run the identity verification suites.
    Verify(VerifyArgs),
    /// Compare J^α t^{λ(p+1)} with its closed form.
    Table(TableArgs),
}

#[derive(Debug, Args)]
struct OutputArgs {
    /// Write to this file instead of standard output.
    #[arg(long, value_name = "PATH")]
    output: Option<PathBuf>,
    /// Output format.
    #[arg(long, value_enum)]
    format: Option<Format>,
}

#[derive(Debug, Args)]
struct ParamArgs {
    /// Base q, strictly inside (0, 1) [default: 0.5].
    #[arg(long)]
    q: Option<f64>,
    /// Parameter p > -1 [default: 0].
    #[arg(long, allow_negative_numbers = true)]
    p: Option<f64>,
    /// Operator order [default: 1].
    #[arg(long)]
    alpha: Option<f64>,
    /// Evaluation points [default: 1].
    #[arg(long)]
    points: Option<String>,
    /// Relative tail tolerance [default: 1e-12].
    #[arg(long)]
    tol: Option<f64>,
    /// Term cap for every truncated sum or product [default: 10000].
    #[arg(long)]
    max_terms: Option<usize>,
}

#[derive(Debug, Args)]
struct EvalArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Lower limit of the operator [default: 0].
    #[arg(long)]
    lower: Option<f64>,
    /// Integrand expression in t.
    #[arg(long = "f", value_name = "EXPR", allow_hyphen_values = true)]
    integrand: Option<String>,
    /// Evaluate the derivative D^α instead of the integral.
    #[arg(long)]
    derivative: bool,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct VerifyArgs {
    /// Comma-separated identity names, or `all` [default: all].
    #[arg(long)]
    suite: Option<String>,
    /// Comma-separated q values replacing each suite's q grid.
    #[arg(long)]
    q: Option<String>,
    /// Comma-separated p values replacing each suite's p grid.
    #[arg(long, allow_hyphen_values = true)]
    p: Option<String>,
    #[command(flatten)]
    out: OutputArgs,
}

#[derive(Debug, Args)]
struct TableArgs {
    #[command(flatten)]
    params: ParamArgs,
    /// Exponent λ of the integrand t^{λ(p+1)}, λ > -1 [default: 0].
    #[arg(long, allow_negative_numbers = true)]
    lambda: Option<f64>,
    #[command(flatten)]
    out: OutputArgs,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = ConfigFile::load(cli.config.as_deref()).and_then(|cfg| match &cli.command {
        Command::Eval(args) => commands::eval(args, &cfg),
        Command::Verify(args) => commands::verify(args, &cfg),
        Command::Table(args) => commands::table(args, &cfg),
    });
    match result {
        Ok(code) => code,
        Err(e) => {
            eprintln!("error: {e:#}");
            ExitCode::from(2)
        }
    }
}
