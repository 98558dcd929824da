use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use fixdiv::cli::{self, Common, Format, ProblemArgs};
use fixdiv::ideal::DEFAULT_RESIDUE_CAP;
use fixdiv::search::DEFAULT_SUBSET_CAP;
use fixdiv::{par, Error};

/// Fixed divisors and Selfridge-type divisibility searches over Z,
/// imaginary quadratic rings and matrix rings.
#[derive(Parser, Debug)]
#[command(version, about)]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output format
    #[arg(long, value_enum, default_value_t = FormatArg::Table, global = true)]
    format: FormatArg,

    /// Worker threads (default: all cores)
    #[arg(long, global = true)]
    threads: Option<usize>,

    /// Cap on residue scans and enumeration sizes
    #[arg(long, env = "FIXDIV_RESIDUE_CAP", default_value_t = DEFAULT_RESIDUE_CAP, global = true)]
    residue_cap: u64,

    /// Cap on the number of terms for subset-sum checks
    #[arg(long, env = "FIXDIV_SUBSET_CAP", default_value_t = DEFAULT_SUBSET_CAP, global = true)]
    subset_cap: usize,

    /// Use sampled matrix fixed divisors with this many samples
    #[arg(long, global = true)]
    samples: Option<u64>,

    /// Seed for sampled mode
    #[arg(long, default_value_t = 0, global = true)]
    seed: u64,
}

#[derive(Clone, Copy, Debug, ValueEnum)]
enum FormatArg {
    Table,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Fixed divisor of a scalar polynomial, or of a matrix polynomial with --n
    Fixdiv(Problem),
    /// Pairs (m, n) with (b^m - b^n) | x^m - x^n for all integers x
    Selfridge {
        #[arg(long, default_value_t = 2, allow_hyphen_values = true)]
        base: i64,
        #[arg(long, default_value_t = 16)]
        max_m: u64,
    },
    /// Pairs (m, n), m > n > 0, with (2^m - 2^n) | (3^m - 3^n)
    Ruderman {
        #[arg(long, default_value_t = 16)]
        max_m: u64,
    },
    /// Conditions A.1, A.2, B.1, B.2 for coefficients, exponents and B
    Check(Problem),
    /// Exponent tuples satisfying B.1 and B.2 for a fixed B
    SearchTuples(Problem),
    /// Candidate B in a box below the norm cutoff, with their tuples
    SearchB(Problem),
    /// Norm cutoff T for B
    Bound(Problem),
    /// Canned reproduction of the headline results
    Repro,
}

#[derive(Args, Debug)]
struct Problem {
    /// Problem file (.toml or .json)
    #[arg(long)]
    spec: Option<PathBuf>,
    /// Z, Q(i), or Q(sqrt(-d))
    #[arg(long)]
    ring: Option<String>,
    /// Matrix size
    #[arg(long)]
    n: Option<usize>,
    /// Scalar polynomial, e.g. "x^5 - x"
    #[arg(long, allow_hyphen_values = true)]
    poly: Option<String>,
    /// Coefficient matrices separated by ';', e.g. "[[1,0],[0,1]]; [[-1,0],[0,-1]]"
    #[arg(long, allow_hyphen_values = true)]
    coeffs: Option<String>,
    /// Exponents separated by ',', one per coefficient
    #[arg(long)]
    exps: Option<String>,
    /// The matrix B, e.g. "[[2,0],[0,2]]" or "2"
    #[arg(long, allow_hyphen_values = true)]
    b: Option<String>,
    /// Largest exponent searched
    #[arg(long)]
    max_m: Option<u64>,
    /// Coordinate bound for candidate B entries
    #[arg(long)]
    entry_box: Option<i64>,
    /// Scan all exponent orders, not only nonincreasing tuples
    #[arg(long)]
    all_orders: bool,
}

impl From<Problem> for ProblemArgs {
    fn from(p: Problem) -> Self {
        ProblemArgs {
            spec: p.spec,
            ring: p.ring,
            n: p.n,
            poly: p.poly,
            coeffs: p.coeffs,
            exps: p.exps,
            b: p.b,
            max_m: p.max_m,
            entry_box: p.entry_box,
            all_orders: p.all_orders,
        }
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let common = Common {
        format: match cli.format {
            FormatArg::Table => Format::Table,
            FormatArg::Json => Format::Json,
        },
        residue_cap: cli.residue_cap,
        subset_cap: cli.subset_cap,
        samples: cli.samples,
        seed: cli.seed,
    };
    let threads = cli.threads;
    let result = par::install(threads, move || dispatch(cli.command, &common));
    match result {
        Ok((out, ok)) => {
            print!("{}", out.text);
            if out.truncated {
                eprintln!("warning: a cap truncated the search; rerun with a larger --residue-cap");
                ExitCode::from(2)
            } else if ok {
                ExitCode::SUCCESS
            } else {
                eprintln!("error: reproduction mismatch");
                ExitCode::from(1)
            }
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(if e.is_cap() { 2 } else { 1 })
        }
    }
}

fn dispatch(command: Command, common: &Common) -> Result<(cli::Output, bool), Error> {
    let done = |o: cli::Output| (o, true);
    match command {
        Command::Fixdiv(p) => cli::run_fixdiv(&p.into(), common).map(done),
        Command::Selfridge { base, max_m } => cli::run_selfridge(base, max_m, common).map(done),
        Command::Ruderman { max_m } => cli::run_ruderman(max_m, common).map(done),
        Command::Check(p) => cli::run_check(&p.into(), common).map(done),
        Command::SearchTuples(p) => cli::run_search_tuples(&p.into(), common).map(done),
        Command::SearchB(p) => cli::run_search_b(&p.into(), common).map(done),
        Command::Bound(p) => cli::run_bound(&p.into(), common).map(done),
        Command::Repro => cli::run_repro(common),
    }
}
