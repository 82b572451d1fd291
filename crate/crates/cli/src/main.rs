//! `polycoef`: exact polynomial coefficients, saddle-point estimates and
//! unimodality scans from the command line.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

use polycoef::unimodality::CellBudget;
use polycoef::Precision;

use crate::output::Format;

#[derive(Parser, Debug)]
#[command(name = "polycoef", version, about = "Coefficients of (1 + x + ... + x^(q-1))^n")]
struct Cli {
    #[command(flatten)]
    config: ConfigArgs,
    #[command(subcommand)]
    command: Command,
}

#[derive(Args, Debug)]
struct ConfigArgs {
    /// Working precision in decimal digits (at least 30)
    #[arg(long, global = true, default_value_t = Precision::DEFAULT_DIGITS)]
    precision: u32,
    /// Maximum big-integer operations per scan cell
    #[arg(long, global = true, default_value_t = CellBudget::default().0)]
    cell_budget: u64,
    /// Output format [default: csv for scan and row, pretty otherwise]
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Write output to this file instead of stdout
    #[arg(long, short = 'o', global = true)]
    output: Option<PathBuf>,
    /// Worker threads [default: available parallelism]
    #[arg(long, global = true)]
    threads: Option<usize>,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Print C(n, q, k)
    Coeff {
        #[arg(short = 'n')]
        n: u32,
        #[arg(short = 'q')]
        q: u32,
        #[arg(short = 'k', allow_negative_numbers = true)]
        k: i64,
        #[arg(long, value_enum, default_value_t = Engine::Dp)]
        engine: Engine,
    },
    /// Print the full coefficient row for (n, q)
    Row {
        #[arg(short = 'n')]
        n: u32,
        #[arg(short = 'q')]
        q: u32,
    },
    /// Check the recurrences, symmetry and row sum on rows n <= n-max, 2 <= q <= q-max
    Identities {
        /// Check only this n
        #[arg(short = 'n')]
        n: Option<u32>,
        /// Check only this q
        #[arg(short = 'q')]
        q: Option<u32>,
        #[arg(long, default_value_t = 30)]
        n_max: u32,
        #[arg(long, default_value_t = 8)]
        q_max: u32,
    },
    /// Asymptotic estimate of a coefficient (natural log and linear value)
    Estimate {
        #[arg(short = 'n')]
        n: u64,
        #[arg(short = 'q', default_value_t = 3)]
        q: u32,
        #[arg(short = 'c', default_value_t = 1)]
        c: u32,
        /// hayman | cor35 | trinomial | andre | binomial:<cFrac>
        #[arg(long, default_value = "hayman")]
        kind: String,
        /// Also compute the exact coefficient and the ratio exact/estimate
        #[arg(long)]
        check: bool,
    },
    /// Solve the saddle-point equation for k = cn
    Root {
        #[arg(short = 'q')]
        q: u32,
        #[arg(short = 'c', default_value_t = 1)]
        c: u32,
        /// Report the location bound for the c = 1 root
        #[arg(long)]
        bound_check: bool,
        /// Compare both two-term approximations with the solved root
        #[arg(long)]
        compare_approx: bool,
    },
    /// Unimodality scan over n (conjecture) or k (or)
    Scan {
        #[arg(long, value_enum)]
        kind: ScanKind,
        #[arg(long, short = 'c', default_value_t = 1)]
        c: u32,
        #[arg(long, default_value_t = 8)]
        n_min: u32,
        #[arg(long)]
        n_max: Option<u32>,
        #[arg(long, default_value_t = 2)]
        k_min: u64,
        #[arg(long)]
        k_max: Option<u64>,
    },
    /// Count compositions of k by brute force and compare with the closed forms
    Oracle {
        #[arg(short = 'k')]
        k: u32,
        /// Fix the number of parts
        #[arg(short = 'n')]
        n: Option<u32>,
        /// Every part at most q
        #[arg(long, conflicts_with = "largest", required_unless_present = "largest")]
        max_part: Option<u32>,
        /// Largest part exactly q
        #[arg(long)]
        largest: Option<u32>,
    },
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Engine {
    Dp,
    Altsum,
    Quadrature,
    All,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum ScanKind {
    Conjecture,
    Or,
}

/// Validated run configuration shared by every subcommand.
#[derive(Debug, Clone)]
pub struct RunConfig {
    pub precision: Precision,
    pub cell_budget: CellBudget,
    pub format: Option<Format>,
    pub output: Option<PathBuf>,
    pub threads: Option<usize>,
}

impl RunConfig {
    fn from_args(args: ConfigArgs) -> Result<Self, commands::Failure> {
        if args.precision < 30 {
            return Err(commands::Failure::usage(format!(
                "--precision must be at least 30 digits, got {}",
                args.precision
            )));
        }
        if args.cell_budget == 0 {
            return Err(commands::Failure::usage("--cell-budget must be positive"));
        }
        if args.threads == Some(0) {
            return Err(commands::Failure::usage("--threads must be positive"));
        }
        Ok(RunConfig {
            precision: Precision::digits(args.precision),
            cell_budget: CellBudget(args.cell_budget),
            format: args.format,
            output: args.output,
            threads: args.threads,
        })
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(cli) => cli,
        Err(err) => {
            let _ = err.print();
            return if err.use_stderr() { ExitCode::from(1) } else { ExitCode::SUCCESS };
        }
    };
    let result = RunConfig::from_args(cli.config).and_then(|config| {
        if let Some(threads) = config.threads {
            rayon::ThreadPoolBuilder::new()
                .num_threads(threads)
                .build_global()
                .map_err(|e| commands::Failure::usage(format!("thread pool: {e}")))?;
        }
        commands::run(cli.command, &config)
    });
    match result {
        Ok(code) => ExitCode::from(code),
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
