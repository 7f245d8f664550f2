//! `hhverify`: numerical checks of Hermite-Hadamard type inequalities.
//!
//! Exit status: 0 when everything checked holds, 1 when an applicable
//! inequality is violated beyond its slack, 2 on invalid input or
//! configuration.

mod commands;
mod output;

use std::process::ExitCode;

use clap::{Args, Parser, Subcommand};

use hhverify::{CheckConfig, Interval, QuadConfig};

use commands::{ConfigError, Outcome, PropsArgs, Render, VerifyArgs};
use output::Format;

#[derive(Parser, Debug)]
#[command(
    name = "hhverify",
    version,
    about = "Check Hermite-Hadamard type inequalities numerically"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
    #[command(flatten)]
    output: OutputArgs,
    #[command(flatten)]
    tolerances: ToleranceArgs,
}

#[derive(Args, Debug)]
struct OutputArgs {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    format: Format,
    /// Shorthand for `--format json`.
    #[arg(long, global = true)]
    json: bool,
    /// Decimal digits in text output. JSON always carries full doubles.
    #[arg(long, global = true, default_value_t = 12)]
    precision: usize,
}

#[derive(Args, Debug)]
struct ToleranceArgs {
    /// Relative tolerance of the adaptive quadrature.
    #[arg(long, global = true, default_value_t = 1e-10)]
    rel_tol: f64,
    /// Quadrature evaluation cap per integral.
    #[arg(long, global = true, default_value_t = 200_000)]
    max_evals: usize,
    /// Absolute floor of the inequality slack, which is max(floor, 10 * err).
    #[arg(long, global = true, default_value_t = 1e-9)]
    slack_floor: f64,
    /// Absolute tolerance of the midpoint-chord shape test.
    #[arg(long, global = true, default_value_t = 1e-9)]
    shape_tol: f64,
    /// Grid points of the shape test.
    #[arg(long, global = true, default_value_t = 64)]
    shape_grid: usize,
}

impl ToleranceArgs {
    fn config(&self) -> Result<CheckConfig, ConfigError> {
        let cfg = CheckConfig {
            quad: QuadConfig {
                rel_tol: self.rel_tol,
                max_evals: self.max_evals,
                ..QuadConfig::default()
            },
            slack_floor: self.slack_floor,
            shape_tol: self.shape_tol,
            shape_grid: self.shape_grid,
        };
        cfg.validate()?;
        Ok(cfg)
    }
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Arithmetic, geometric, harmonic, logarithmic and identric means of a and b.
    Means {
        #[arg(allow_negative_numbers = true)]
        a: f64,
        #[arg(allow_negative_numbers = true)]
        b: f64,
        /// Also print the generalized logarithmic mean L_p.
        #[arg(long, allow_negative_numbers = true)]
        p: Option<f64>,
        /// Accept p = 0 and p = -1 as the identric and logarithmic limits.
        #[arg(long)]
        extend: bool,
    },
    /// Deviation, lemma identity, bounds and the Hadamard chain for one function.
    Bound {
        /// Function of x, e.g. "1/x" or "x^2*exp(x)".
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, allow_negative_numbers = true)]
        b: f64,
        /// Exponents q >= 1 (repeatable or comma separated).
        #[arg(long, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
        q: Vec<f64>,
        /// Include the classical trapezoid bounds.
        #[arg(long)]
        classical: bool,
    },
    /// Propositions 1-9: printed forms against the generic bounds.
    Props {
        #[arg(long, allow_negative_numbers = true)]
        a: f64,
        #[arg(long, allow_negative_numbers = true)]
        b: f64,
        /// Exponents n >= 2 for the power instances.
        #[arg(long, value_delimiter = ',', num_args = 1..)]
        n: Vec<u32>,
        /// Exponents q for the propositions derived from the q-bounds.
        #[arg(long, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true)]
        q: Vec<f64>,
        /// All nine propositions.
        #[arg(long, conflicts_with = "k")]
        all: bool,
        /// Propositions to run when --all is absent.
        #[arg(long, value_delimiter = ',', num_args = 1.., default_value = "1")]
        k: Vec<u8>,
    },
    /// Seeded random corpus through the full inequality suite.
    Verify {
        #[arg(long, default_value_t = 1)]
        seed: u64,
        #[arg(long, default_value_t = 100)]
        count: usize,
        /// Sampling range for the interval endpoints.
        #[arg(long, num_args = 2, value_names = ["LO", "HI"], allow_negative_numbers = true, default_values_t = [0.1, 10.0])]
        range: Vec<f64>,
        #[arg(long, value_delimiter = ',', num_args = 1.., allow_negative_numbers = true, default_values_t = [1.0, 1.5, 2.0, 3.0, 5.0])]
        q_list: Vec<f64>,
    },
}

fn run(cli: Cli) -> Result<(String, Outcome), ConfigError> {
    let render = Render {
        format: if cli.output.json {
            Format::Json
        } else {
            cli.output.format
        },
        precision: cli.output.precision,
    };
    let cfg = cli.tolerances.config()?;
    match cli.command {
        Command::Means { a, b, p, extend } => {
            commands::means(Interval::new(a, b)?, p, extend, &render)
        }
        Command::Bound {
            f,
            a,
            b,
            q,
            classical,
        } => {
            let iv = Interval::new(a, b)?;
            commands::bound(&f, iv, q, classical, &cfg, &render)
        }
        Command::Props { a, b, n, q, all, k } => {
            let iv = Interval::new(a, b)?;
            let ks = if all { (1..=9).collect() } else { k };
            let ns = if n.is_empty() { vec![2] } else { n };
            let qs = if q.is_empty() { vec![2.0] } else { q };
            commands::props(PropsArgs { iv, ks, ns, qs }, &cfg, &render)
        }
        Command::Verify {
            seed,
            count,
            range,
            q_list,
        } => {
            let args = VerifyArgs {
                seed,
                count,
                range: (range[0], range[1]),
                q_list,
            };
            commands::verify(args, &cfg, &render)
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    match run(cli) {
        Ok((text, outcome)) => {
            commands::write_stdout(&text);
            match outcome {
                Outcome::Ok => ExitCode::SUCCESS,
                Outcome::Violation => ExitCode::from(1),
            }
        }
        Err(ConfigError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
