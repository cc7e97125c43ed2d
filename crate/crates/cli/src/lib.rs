//! Command line front end for `jetcalc-core`.
//!
//! Exit codes: `0` success, `1` a checked identity or claim failed, `2`
//! usage, parse or input error.

pub mod commands;
pub mod dsl;
pub mod fixtures;
pub mod report;

use std::ffi::OsString;
use std::path::PathBuf;

use clap::{Parser, Subcommand};

pub use report::Format;

pub const EXIT_OK: i32 = 0;
pub const EXIT_FAILED: i32 = 1;
pub const EXIT_USAGE: i32 = 2;

#[derive(Debug, thiserror::Error)]
pub enum CliError {
    #[error("{path}:{source}")]
    Parse {
        path: String,
        #[source]
        source: dsl::ParseError,
    },
    #[error("cannot read {path}: {message}")]
    Io { path: String, message: String },
    #[error("{0}")]
    Usage(String),
    #[error(transparent)]
    Engine(#[from] jetcalc_core::JetError),
}

/// Identity names accepted by `verify`.
pub const IDENTITIES: [&str; 11] = [
    "hess-sym",
    "hess-double",
    "prop2",
    "prop3",
    "jacobi",
    "antihom",
    "commutation-lemma",
    "mu-lemma",
    "bracket-oracle",
    "gateaux",
    "graded-additivity",
];

#[derive(Debug, Parser)]
#[command(
    name = "jetcalc",
    version,
    about = "Exact calculus of differential operators on jet spaces"
)]
pub struct Cli {
    /// Session file with declarations and operator definitions.
    #[arg(long, global = true)]
    pub session: Option<PathBuf>,
    #[arg(long, global = true, value_enum, default_value_t = Format::Text)]
    pub format: Format,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Print the universal linearization of an operator.
    Linearize {
        #[arg(long)]
        op: String,
    },
    /// Jacobi bracket, through the linearization and term by term.
    Bracket {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Hessian operator Hess_F G, and the form Hess_F(G,H) when --third is given.
    Hessian {
        #[arg(long)]
        op: String,
        #[arg(long)]
        arg: String,
        #[arg(long)]
        third: Option<String>,
    },
    /// Both sides of [l_F,l_G] - l_{F,G} = Hess_G F - Hess_F G.
    Anomaly {
        #[arg(long)]
        left: String,
        #[arg(long)]
        right: String,
    },
    /// Check an identity on random operators or on named operands.
    Verify {
        #[arg(value_parser = clap::builder::PossibleValuesParser::new(IDENTITIES))]
        identity: String,
        /// Number of random trials.
        #[arg(long, conflicts_with = "ops")]
        random: Option<usize>,
        #[arg(long, default_value_t = 7)]
        seed: u64,
        /// Comma-separated operator names from the session.
        #[arg(long, value_delimiter = ',')]
        ops: Vec<String>,
        #[arg(long, default_value_t = 2)]
        max_order: u32,
        #[arg(long, default_value_t = 2)]
        max_degree: u32,
        /// Largest probe order for antihom.
        #[arg(long, default_value_t = 4)]
        probe_order: u32,
    },
    /// Check {F,H} = l_theta F, from named operators or a claims file.
    CheckSymmetry {
        #[arg(long, required_unless_present = "fixtures")]
        f: Option<String>,
        #[arg(long, required_unless_present = "fixtures")]
        h: Option<String>,
        #[arg(long)]
        theta: Option<String>,
        #[arg(long, conflicts_with_all = ["f", "h", "theta"])]
        fixtures: Option<PathBuf>,
    },
    /// Check {F,G} = l_lambda F + l_mu G, from named operators or a claims file.
    CheckAux {
        #[arg(long, required_unless_present = "fixtures")]
        f: Option<String>,
        #[arg(long, required_unless_present = "fixtures")]
        g: Option<String>,
        #[arg(long)]
        lambda: Option<String>,
        #[arg(long)]
        mu: Option<String>,
        #[arg(long, conflicts_with_all = ["f", "g", "lambda", "mu"])]
        fixtures: Option<PathBuf>,
    },
    /// Check every claim of a claims file against its expectation.
    CheckFixtures {
        #[arg(long)]
        fixtures: PathBuf,
    },
    /// The linear pair with free terms on two base variables.
    Section4,
    /// Print the session in canonical form.
    Print,
}

/// Result of one invocation.
#[derive(Clone, Debug, PartialEq, Eq)]
pub struct Outcome {
    pub stdout: String,
    pub stderr: String,
    pub code: i32,
}

impl Outcome {
    fn error(e: &CliError) -> Self {
        Self {
            stdout: String::new(),
            stderr: format!("error: {e}\n"),
            code: EXIT_USAGE,
        }
    }
}

/// Parses `args` (including the program name) and runs the command.
pub fn run_args<I, T>(args: I) -> Outcome
where
    I: IntoIterator<Item = T>,
    T: Into<OsString> + Clone,
{
    match Cli::try_parse_from(args) {
        Ok(cli) => run(&cli),
        Err(e) => {
            let code = if e.use_stderr() { EXIT_USAGE } else { EXIT_OK };
            let text = e.render().to_string();
            let (stdout, stderr) = if e.use_stderr() {
                (String::new(), text)
            } else {
                (text, String::new())
            };
            Outcome {
                stdout,
                stderr,
                code,
            }
        }
    }
}

pub fn run(cli: &Cli) -> Outcome {
    match commands::execute(cli) {
        Ok(report) => Outcome {
            stdout: report.render(cli.format),
            stderr: String::new(),
            code: if report.ok { EXIT_OK } else { EXIT_FAILED },
        },
        Err(e) => Outcome::error(&e),
    }
}
