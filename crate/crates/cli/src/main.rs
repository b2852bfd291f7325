use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};

mod commands;
mod doc;

use doc::InputError;

#[derive(Parser, Debug)]
#[command(
    name = "exsym",
    version,
    about = "Extrinsic symmetric triples: validation, orbits, extensions"
)]
struct Cli {
    /// Emit machine-readable JSON instead of text.
    #[arg(long, global = true)]
    json: bool,

    #[command(subcommand)]
    command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Mode {
    Product,
    Single,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Verify {
    Parabola,
    Flat3,
    Cw2,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Check every axiom of a triple.
    Validate { path: PathBuf },
    /// Fullness, normality, metric radical, mean curvature and A_h.
    Invariants { path: PathBuf },
    /// Sample the orbit and write it as CSV.
    Orbit {
        path: PathBuf,
        /// Comma-separated rational parameters, e.g. "-1,-1/2,0,1/2,1".
        #[arg(long, allow_hyphen_values = true)]
        grid: Option<String>,
        /// Word length in product mode (default: dim g+).
        #[arg(long)]
        max_word_len: Option<usize>,
        #[arg(long, value_enum, default_value_t = Mode::Product)]
        mode: Mode,
        /// Sample along a known closed-form parametrization and compare.
        #[arg(long, value_enum)]
        verify: Option<Verify>,
        /// Output file (default: stdout).
        #[arg(long)]
        out: Option<PathBuf>,
    },
    /// Second cohomology with trivial coefficients in R^fiber.
    Cohomology {
        path: PathBuf,
        #[arg(long, default_value_t = 1)]
        fiber: usize,
    },
    /// Central extension by a cocycle; prints the extended triple.
    Extend {
        path: PathBuf,
        /// Cocycle file; defaults to the document's "extension" block.
        #[arg(long)]
        cocycle: Option<PathBuf>,
    },
    /// Quotient by the metric radical, with the cocycle as an extension block.
    Extract { path: PathBuf },
    /// Build l* + a + l from a "quadext" block; prints the triple.
    Quadext { path: PathBuf },
    /// Run the fixtures of a worked example, or list the examples.
    Catalog {
        name: Option<String>,
        /// Print the example as a triple document instead.
        #[arg(long)]
        export: bool,
    },
}

/// How a command finished.
pub enum Outcome {
    Ok,
    Failed,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let res = match cli.command {
        Command::Validate { path } => commands::validate(&path, cli.json),
        Command::Invariants { path } => commands::invariants(&path, cli.json),
        Command::Orbit {
            path,
            grid,
            max_word_len,
            mode,
            verify,
            out,
        } => commands::orbit(
            &path,
            &commands::OrbitOptions {
                grid,
                max_word_len,
                mode,
                verify,
                out,
            },
            cli.json,
        ),
        Command::Cohomology { path, fiber } => commands::cohomology(&path, fiber, cli.json),
        Command::Extend { path, cocycle } => commands::extend(&path, cocycle.as_deref()),
        Command::Extract { path } => commands::extract(&path),
        Command::Quadext { path } => commands::quadext(&path),
        Command::Catalog { name, export } => commands::catalog(name.as_deref(), export, cli.json),
    };
    match res {
        Ok(Outcome::Ok) => ExitCode::SUCCESS,
        Ok(Outcome::Failed) => ExitCode::from(1),
        Err(InputError(msg)) => {
            eprintln!("error: {msg}");
            ExitCode::from(2)
        }
    }
}
