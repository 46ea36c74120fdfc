//! `polysum`: verify identities, run the corpus, apply transforms and
//! evaluate expressions.

mod commands;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};
use polysum::corpus::CORPUS_ENV;

#[derive(Parser)]
#[command(
    name = "polysum",
    version,
    about = "Exact verifier for binomial and harmonic-number identities"
)]
struct Cli {
    /// Worker threads (default: all cores).
    #[arg(long, global = true)]
    jobs: Option<usize>,

    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// Verify identity documents against their expectations.
    Verify {
        #[arg(required = true)]
        paths: Vec<PathBuf>,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Apply a chain of transforms and print the result.
    Transform {
        path: PathBuf,
        /// Comma-separated chain, e.g. `beta,dds`.
        #[arg(long, value_delimiter = ',', required = true)]
        op: Vec<Op>,
        /// Verify the result on the default grid.
        #[arg(long)]
        check: bool,
        /// Substitute t -> -t before transforming.
        #[arg(long)]
        negate_t: bool,
        /// Digits for the float derivative cross-check.
        #[arg(long, default_value_t = 40)]
        precision: u32,
        #[command(flatten)]
        grid: GridArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Work with the identity corpus.
    Corpus {
        #[command(subcommand)]
        action: CorpusAction,
    },
    /// Evaluate a t-free expression exactly.
    Eval {
        expr: String,
        #[arg(long)]
        n: Option<i64>,
        #[arg(long)]
        k: Option<i64>,
        #[arg(long)]
        r: Option<String>,
        #[arg(long)]
        s: Option<String>,
        #[arg(long)]
        u: Option<String>,
        #[arg(long)]
        v: Option<String>,
        /// Also print a decimal approximation to this many digits.
        #[arg(long)]
        precision: Option<u32>,
        #[command(flatten)]
        out: OutArgs,
    },
}

#[derive(Subcommand)]
enum CorpusAction {
    /// Verify every (selected) manifest entry.
    Run {
        /// Keep entries whose name contains this.
        filter: Option<String>,
        #[arg(long)]
        status: Option<String>,
        #[command(flatten)]
        dir: DirArgs,
        #[command(flatten)]
        out: OutArgs,
    },
    /// Check the display checklist against the manifest.
    Coverage {
        #[command(flatten)]
        dir: DirArgs,
    },
}

#[derive(Args, Clone, Default)]
struct GridArgs {
    /// Range of n, e.g. `0..24` or `3`.
    #[arg(long)]
    n: Option<String>,
    /// Half-integer grid: `1/2,1,3/2` or `1/2..3:1/2`.
    #[arg(long)]
    r: Option<String>,
    #[arg(long)]
    s: Option<String>,
    #[arg(long)]
    u: Option<String>,
    #[arg(long)]
    v: Option<String>,
}

#[derive(Args, Clone)]
struct DirArgs {
    /// Corpus directory.
    #[arg(long, env = CORPUS_ENV)]
    corpus: Option<PathBuf>,
}

#[derive(Args, Clone, Copy)]
struct OutArgs {
    #[arg(long, value_enum, default_value_t = Format::Text)]
    format: Format,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
enum Op {
    Beta,
    Dds,
    Ddr,
    #[value(name = "central_v")]
    CentralV,
    #[value(name = "central_uv")]
    CentralUv,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    if let Some(jobs) = cli.jobs {
        if let Err(e) = rayon::ThreadPoolBuilder::new()
            .num_threads(jobs)
            .build_global()
        {
            eprintln!("error: {e}");
            return ExitCode::from(2);
        }
    }
    let status = match cli.command {
        Command::Verify { paths, grid, out } => commands::verify(&paths, &grid, out.format),
        Command::Transform {
            path,
            op,
            check,
            negate_t,
            precision,
            grid,
            out,
        } => commands::transform(&path, &op, check, negate_t, precision, &grid, out.format),
        Command::Corpus { action } => match action {
            CorpusAction::Run {
                filter,
                status,
                dir,
                out,
            } => commands::corpus_run(dir.corpus, filter, status, out.format),
            CorpusAction::Coverage { dir } => commands::corpus_coverage(dir.corpus),
        },
        Command::Eval {
            expr,
            n,
            k,
            r,
            s,
            u,
            v,
            precision,
            out,
        } => commands::eval(&expr, n, k, [r, s, u, v], precision, out.format),
    };
    match status {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
