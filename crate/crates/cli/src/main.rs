//! `qdiff`: command-line front end for the q-difference engine.
//!
//! Exit status: 0 on success, 2 when a mathematical hypothesis is found
//! violated (vanishing divisor, failed estimate, suspected diophantine
//! violation), 1 on usage or input errors.

mod commands;
mod inputs;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use qdiff_core::numeric::DEFAULT_PRECISION_BITS;

#[derive(Parser, Debug)]
#[command(name = "qdiff", version, about = "Generalized power series solutions of q-difference equations")]
struct Cli {
    #[command(flatten)]
    config: RunConfig,
    #[command(subcommand)]
    command: Command,
}

/// Settings shared by every subcommand.
#[derive(Args, Debug, Clone)]
pub struct RunConfig {
    /// Working precision in bits.
    #[arg(long, global = true, default_value_t = DEFAULT_PRECISION_BITS, value_parser = clap::value_parser!(u32).range(64..))]
    pub precision_bits: u32,
    /// Largest total degree |m| to compute.
    #[arg(long, global = true, default_value_t = 8, value_parser = clap::value_parser!(u32).range(1..))]
    pub degree: u32,
    /// Directory receiving `<command>.json` and, where a table exists, `<command>.csv`.
    #[arg(long, global = true)]
    pub out: Option<PathBuf>,
    /// What goes to standard output when `--out` is absent.
    #[arg(long, global = true, value_enum, default_value_t = Format::Json)]
    pub format: Format,
    /// Binds a free identifier of the equation or of an expression, e.g. `c00=0.5`.
    #[arg(long = "param", global = true, value_name = "NAME=VALUE")]
    pub params: Vec<String>,
    /// Worker threads for the parallel stages.
    #[arg(long, global = true)]
    pub threads: Option<usize>,
    /// Print errors as a JSON object on standard error.
    #[arg(long, global = true)]
    pub json_errors: bool,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Format {
    Json,
    Csv,
}

/// Where the equation comes from: text and initial data, or a saved reduction.
#[derive(Args, Debug, Clone)]
pub struct EquationArgs {
    /// Equation text, e.g. `sigma[y] - 3*y - z - y^2 = 0`.
    #[arg(long, allow_hyphen_values = true, conflicts_with_all = ["eq_file", "red"])]
    pub eq: Option<String>,
    #[arg(long, conflicts_with = "red")]
    pub eq_file: Option<PathBuf>,
    /// The base `q` as a constant expression.
    #[arg(long, allow_hyphen_values = true)]
    pub q: Option<String>,
    /// Initial part, e.g. `c00*z^I`.
    #[arg(long, allow_hyphen_values = true)]
    pub phi0: Option<String>,
    /// Exponent `lambda`; defaults to the leading exponent of the initial part.
    #[arg(long, allow_hyphen_values = true)]
    pub lambda: Option<String>,
    /// A reduced equation written by `qdiff reduce`.
    #[arg(long)]
    pub red: Option<PathBuf>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Reduce an equation along its initial part.
    Reduce {
        #[command(flatten)]
        input: EquationArgs,
    },
    /// Solve for the coefficients `c_m` up to `--degree`.
    Solve {
        #[command(flatten)]
        input: EquationArgs,
        /// Also solve the majorant equation.
        #[arg(long)]
        majorant: bool,
        /// Also tabulate the delta sequence (degree at most 10).
        #[arg(long)]
        delta: bool,
        /// Include growth diagnostics in the JSON (the CSV always has them).
        #[arg(long)]
        growth: bool,
    },
    /// Scan the small divisors and fit diophantine envelopes.
    Divisors {
        #[command(flatten)]
        input: EquationArgs,
        /// Use a built-in example instead: ex1, ex2, ex3 or synthetic.
        #[arg(long, conflicts_with_all = ["eq", "eq_file", "red"])]
        example: Option<String>,
        /// Degree bound of the scan; defaults to `--degree`.
        #[arg(long)]
        max_degree: Option<u32>,
        /// `auto` for the roots of L, or a comma-separated list of constants.
        #[arg(long, default_value = "auto", allow_hyphen_values = true)]
        roots: String,
    },
    /// Continued fraction, convergents and Brjuno sums of a real constant.
    Cf {
        #[arg(long, allow_hyphen_values = true)]
        omega: String,
        #[arg(long, default_value_t = 30)]
        depth: usize,
    },
    /// Rational approximations of the Liouville constant.
    Liouville {
        #[arg(long = "N", short = 'N', default_value_t = 3)]
        n: u32,
    },
    /// Check the estimate chain on random instances.
    Verify {
        #[command(flatten)]
        input: EquationArgs,
        /// Use a built-in example instead: ex1, ex2 or synthetic.
        #[arg(long, conflicts_with_all = ["eq", "eq_file", "red"])]
        example: Option<String>,
        /// Exponent to check with; fitted from a divisor scan when absent.
        #[arg(long)]
        nu: Option<f64>,
        /// Any of 1, 2, 3, comb.
        #[arg(long, value_delimiter = ',', default_value = "1,2,3,comb")]
        lemmas: Vec<String>,
        #[arg(long)]
        max_degree: Option<u32>,
        #[arg(long, default_value_t = 200)]
        samples: usize,
        #[arg(long, default_value_t = 5)]
        chain_len: usize,
        #[arg(long, default_value_t = 1)]
        seed: u64,
        /// Largest total for the combinatorial check (at most 14).
        #[arg(long, default_value_t = 12)]
        comb_total: u32,
    },
    /// Run one of the built-in examples end to end.
    Example {
        /// ex1, ex2, ex3 or synthetic.
        name: String,
        #[arg(long, allow_hyphen_values = true)]
        c00: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        omega: Option<String>,
        #[arg(long, allow_hyphen_values = true)]
        r: Option<String>,
    },
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return ExitCode::from(if err.use_stderr() { 1 } else { 0 });
        }
    };
    let config = cli.config.clone();
    let outcome = match config.threads {
        Some(t) => qdiff_core::solver::with_pool(t, || Ok(dispatch(cli))).unwrap_or_else(|e| Err(e.into())),
        None => dispatch(cli),
    };
    match outcome.and_then(|artifact| output::emit(&artifact, &config).map(|_| artifact)) {
        Ok(artifact) => ExitCode::from(if artifact.violation { 2 } else { 0 }),
        Err(err) => {
            let code = output::exit_code(&err);
            output::report_error(&err, code, config.json_errors);
            ExitCode::from(code)
        }
    }
}

fn dispatch(cli: Cli) -> anyhow::Result<output::Artifact> {
    let cfg = &cli.config;
    match cli.command {
        Command::Reduce { input } => commands::reduce(cfg, &input),
        Command::Solve {
            input,
            majorant,
            delta,
            growth,
        } => commands::solve(cfg, &input, majorant, delta, growth),
        Command::Divisors {
            input,
            example,
            max_degree,
            roots,
        } => commands::divisors(cfg, &input, example.as_deref(), max_degree.unwrap_or(cfg.degree), &roots),
        Command::Cf { omega, depth } => commands::cf(cfg, &omega, depth),
        Command::Liouville { n } => commands::liouville(cfg, n),
        Command::Verify {
            input,
            example,
            nu,
            lemmas,
            max_degree,
            samples,
            chain_len,
            seed,
            comb_total,
        } => commands::verify(
            cfg,
            &input,
            example.as_deref(),
            &commands::VerifyOptions {
                nu,
                lemmas,
                max_degree: max_degree.unwrap_or(cfg.degree),
                samples,
                chain_len,
                seed,
                comb_total,
            },
        ),
        Command::Example { name, c00, omega, r } => {
            commands::example(cfg, &name, c00.as_deref(), omega.as_deref(), r.as_deref())
        }
    }
}
