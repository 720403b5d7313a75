mod commands;
mod report;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Parser, Subcommand};
use ineqlab::Parallelism;

use commands::{SearchArgs, UsageError};
use report::{Format, Status};

#[derive(Parser)]
#[command(name = "ineqlab", version)]
#[command(about = "Bounds, extremal search and lemma checks for Littlewood-type series inequalities")]
struct Cli {
    /// Output format
    #[arg(long, value_enum, default_value_t = Format::Text, global = true)]
    format: Format,

    /// Seed for randomized commands
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,

    /// Write the report here instead of standard output
    #[arg(long, global = true)]
    out: Option<PathBuf>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Closed-form upper bounds on K(p,q,r) and the best of them
    Bound {
        /// Comma-separated values are accepted with --grid
        #[arg(long, allow_hyphen_values = true)]
        p: String,
        #[arg(long, allow_hyphen_values = true)]
        q: String,
        #[arg(long, allow_hyphen_values = true)]
        r: String,
        /// Sweep the Cartesian product of the p, q and r lists
        #[arg(long)]
        grid: bool,
    },
    /// Search for sequences with a large ratio (a lower bound on K)
    Search {
        #[arg(long, allow_hyphen_values = true)]
        p: f64,
        #[arg(long, allow_hyphen_values = true)]
        q: f64,
        #[arg(long, allow_hyphen_values = true)]
        r: f64,
        /// Sequence length
        #[arg(long, default_value_t = 16)]
        n: usize,
        #[arg(long, default_value_t = 32)]
        restarts: usize,
        #[arg(long, default_value_t = 2000)]
        max_iters: usize,
    },
    /// Run a randomized verification suite
    Verify {
        /// copson, copson-dual, tail, tail-finite, eq2-dominance, eq3, eq4 or duality
        #[arg(long)]
        suite: String,
        #[arg(long, default_value_t = 1000)]
        trials: usize,
    },
    /// Recompute the published constants and check each against its tolerance
    Reproduce,
}

fn run(cli: &Cli) -> Result<report::ReportDocument, UsageError> {
    let parallelism = Parallelism::from_env();
    match &cli.command {
        Command::Bound { p, q, r, grid } => commands::bound(p, q, r, *grid),
        Command::Search {
            p,
            q,
            r,
            n,
            restarts,
            max_iters,
        } => commands::search(
            &SearchArgs {
                p: *p,
                q: *q,
                r: *r,
                n: *n,
                restarts: *restarts,
                max_iters: *max_iters,
                seed: cli.seed,
            },
            parallelism,
        ),
        Command::Verify { suite, trials } => commands::verify(suite, *trials, cli.seed, parallelism),
        Command::Reproduce => commands::reproduce(),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let doc = match run(&cli) {
        Ok(doc) => doc,
        Err(UsageError(msg)) => {
            eprintln!("error: {msg}");
            return ExitCode::from(2);
        }
    };
    let text = doc.render(cli.format);
    let written = match &cli.out {
        Some(path) => std::fs::write(path, text),
        None => {
            print!("{text}");
            Ok(())
        }
    };
    if let Err(e) = written {
        eprintln!("error: cannot write report: {e}");
        return ExitCode::from(2);
    }
    match doc.status {
        Status::Pass => ExitCode::SUCCESS,
        Status::Fail => {
            eprintln!("error: a proved inequality was violated; see the report for the witness");
            ExitCode::from(1)
        }
    }
}
