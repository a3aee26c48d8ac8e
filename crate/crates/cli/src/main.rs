use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

use hecke_cli::commands::{self, Format, Mode};

/// Hecke operators U_n and V_n on power series and hypergeometric terms.
#[derive(Debug, Parser)]
#[command(name = "hecke", version)]
struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "json")]
    format: Format,
    /// Truncation order; 64 unless a verify suite has its own default.
    #[arg(long, global = true)]
    order: Option<usize>,
    /// Seed for verification runs.
    #[arg(long, global = true, default_value_t = 0)]
    seed: u64,
    #[command(subcommand)]
    command: Command,
}

#[derive(Debug, Clone, Copy, ValueEnum)]
enum Suite {
    Algebra,
    Pochhammer,
    Transform,
    Adjoint,
    Eigen,
    Spectrum,
    Multiplicative,
    All,
}

#[derive(Debug, Subcommand)]
enum Command {
    /// Expand an expression into its coefficients.
    Expand {
        #[arg(long)]
        expr: String,
    },
    /// Apply U_n in closed form, termwise, or both and compare.
    Transform {
        #[arg(long, value_parser = clap::value_parser!(u64).range(1..))]
        n: u64,
        #[arg(long)]
        expr: String,
        #[arg(long, value_enum, default_value = "both")]
        mode: Mode,
    },
    /// Test whether an expression is an eigenfunction of U_n.
    Eigen {
        #[arg(long, value_parser = clap::value_parser!(u64).range(2..))]
        n: u64,
        #[arg(long)]
        expr: String,
    },
    /// Decide whether hypergeometric coefficients are completely multiplicative.
    ClassifyCm {
        /// Upper parameters, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        a: String,
        /// Lower parameters without the k! slot, comma separated.
        #[arg(long, allow_hyphen_values = true)]
        b: String,
        #[arg(long, default_value_t = 30)]
        bound: u64,
    },
    /// Inner-product sequence of two expressions (the 2πi factor omitted).
    Inner {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
        /// Also sum the sequence at this value of R².
        #[arg(long, allow_hyphen_values = true)]
        r_squared: Option<String>,
    },
    /// Run a seeded verification suite.
    Verify {
        #[arg(long, value_enum)]
        suite: Suite,
        #[arg(long, default_value_t = 20, value_parser = clap::value_parser!(u64).range(1..))]
        trials: u64,
    },
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match &cli.command {
        Command::Expand { expr } => commands::expand(expr, cli.order, cli.format),
        Command::Transform { n, expr, mode } => {
            commands::transform(expr, *n, *mode, cli.order, cli.format)
        }
        Command::Eigen { n, expr } => commands::eigen(expr, *n, cli.order, cli.format),
        Command::ClassifyCm { a, b, bound } => commands::classify_cm(a, b, *bound, cli.format),
        Command::Inner {
            left,
            right,
            r_squared,
        } => commands::inner(left, right, r_squared.as_deref(), cli.order, cli.format),
        Command::Verify { suite, trials } => {
            let name = suite.to_possible_value().expect("no skipped variants");
            commands::verify(name.get_name(), *trials, cli.seed, cli.order, cli.format)
        }
    };
    match result {
        Ok(outcome) => {
            print!("{}", outcome.stdout);
            ExitCode::from(outcome.code as u8)
        }
        Err(err) => {
            eprintln!("error: {err}");
            ExitCode::from(err.exit_code() as u8)
        }
    }
}
