//! Command line driver for the exact signalling toolkit: analyze a utility
//! matrix, enumerate its equilibria, print the duality certificates, run the
//! behavioral grid search, or generate reproducible test matrices.
//!
//! Exit codes: 0 on success, 2 for bad input (parse, dimension, domain,
//! I/O, usage), 3 when an exact-solver size limit is exceeded.

mod io;
mod report;

use std::io::Write as _;
use std::path::{Path, PathBuf};
use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use rand::{Rng, SeedableRng};
use rand_chacha::ChaCha8Rng;

use signalgames::behavioral::{self, GridSearchOutcome, Prior};
use signalgames::{format_rational, GameError, UtilityMatrix};

use crate::io::CliError;

#[derive(Parser, Debug)]
#[command(name = "signalgames", version, about = "Exact analysis of finite sender-receiver signalling games", long_about = None)]
struct AnalysisConfig {
    #[command(subcommand)]
    command: Command,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
enum Format {
    Text,
    Json,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Sender graphs, the two leader values, and class-existence flags
    Analyze {
        /// Utility matrix file (plain rows or a JSON report)
        #[arg(short, long)]
        input: PathBuf,
        /// Output format
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Reject inputs with a larger alphabet
        #[arg(long, default_value_t = 16)]
        limit_q: usize,
    },
    /// Every equilibrium partition with recovered count and class label
    Enumerate {
        /// Utility matrix file (plain rows or a JSON report)
        #[arg(short, long)]
        input: PathBuf,
        /// Output format
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Reject inputs with a larger alphabet
        #[arg(long, default_value_t = 12)]
        limit_q: usize,
    },
    /// The exact packing and covering programs behind the two leader values
    Duality {
        /// Utility matrix file (plain rows or a JSON report)
        #[arg(short, long)]
        input: PathBuf,
        /// Output format
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Reject inputs with a larger alphabet
        #[arg(long, default_value_t = 16)]
        limit_q: usize,
    },
    /// Exact grid search over mixed sender strategies (three symbols only)
    Behavioral {
        /// Utility matrix file (plain rows or a JSON report)
        #[arg(short, long)]
        input: PathBuf,
        /// Output format
        #[arg(long, value_enum, default_value = "text")]
        format: Format,
        /// Grid denominator N: rows range over probabilities k/N
        #[arg(long, default_value_t = 10)]
        grid: usize,
        /// Prior as comma-separated rationals (default: uniform)
        #[arg(long)]
        prior: Option<String>,
        /// Write one JSON line per grid point to this file
        #[arg(long)]
        stream: Option<PathBuf>,
    },
    /// Write a reproducible pseudo-random utility matrix to stdout
    Gen {
        /// Alphabet size
        #[arg(long)]
        q: usize,
        /// RNG seed; equal seeds give identical matrices
        #[arg(long)]
        seed: u64,
        /// Smallest entry
        #[arg(long, default_value_t = -3, allow_hyphen_values = true)]
        lo: i64,
        /// Largest entry
        #[arg(long, default_value_t = 3, allow_hyphen_values = true)]
        hi: i64,
        /// Force U(x,y) = U(y,x)
        #[arg(long, conflicts_with = "skew")]
        symmetric: bool,
        /// Force U(x,y) = -U(y,x) with a zero diagonal; the range applies
        /// to the upper triangle
        #[arg(long)]
        skew: bool,
    },
}

fn main() -> ExitCode {
    let config = AnalysisConfig::parse();
    match run(config) {
        Ok(()) => ExitCode::SUCCESS,
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.exit_code())
        }
    }
}

fn run(config: AnalysisConfig) -> Result<(), CliError> {
    match config.command {
        Command::Analyze {
            input,
            format,
            limit_q,
        } => {
            let u = load(&input, limit_q)?;
            println!("{}", report::analyze(&u, format)?);
            Ok(())
        }
        Command::Enumerate {
            input,
            format,
            limit_q,
        } => {
            let u = load(&input, limit_q)?;
            println!("{}", report::enumerate(&u, format)?);
            Ok(())
        }
        Command::Duality {
            input,
            format,
            limit_q,
        } => {
            let u = load(&input, limit_q)?;
            println!("{}", report::duality(&u, format)?);
            Ok(())
        }
        Command::Behavioral {
            input,
            format,
            grid,
            prior,
            stream,
        } => {
            let u = io::read_matrix(&input)?;
            let p = match prior {
                Some(spec) => io::parse_prior(&spec, u.q())?,
                None => Prior::uniform(u.q()),
            };
            let outcome = behavioral_outcome(&u, &p, grid, stream.as_deref())?;
            println!("{}", report::behavioral(&u, &p, grid, &outcome, format)?);
            Ok(())
        }
        Command::Gen {
            q,
            seed,
            lo,
            hi,
            symmetric,
            skew,
        } => gen(q, seed, lo, hi, symmetric, skew),
    }
}

fn load(input: &Path, limit_q: usize) -> Result<UtilityMatrix, CliError> {
    let u = io::read_matrix(input)?;
    if u.q() > limit_q {
        return Err(CliError::Game(GameError::SizeLimit(format!(
            "alphabet size {} exceeds --limit-q {limit_q}",
            u.q()
        ))));
    }
    Ok(u)
}

/// Runs the grid search; with `--stream`, takes the exact scanning path and
/// appends one `{"pi": ..., "value": ...}` line per grid point.
fn behavioral_outcome(
    u: &UtilityMatrix,
    p: &Prior,
    grid: usize,
    stream: Option<&Path>,
) -> Result<GridSearchOutcome, CliError> {
    let Some(path) = stream else {
        return behavioral::grid_search_sup(u, p, grid).map_err(CliError::from);
    };
    const MAX_STREAM_DENOM: usize = 15;
    if grid > MAX_STREAM_DENOM {
        return Err(CliError::Game(GameError::SizeLimit(format!(
            "--stream writes every grid point and is limited to N <= {MAX_STREAM_DENOM}, got {grid}"
        ))));
    }
    let file = std::fs::File::create(path)
        .map_err(|e| CliError::msg(format!("{}: {e}", path.display())))?;
    let mut writer = std::io::BufWriter::new(file);
    let mut write_error: Option<std::io::Error> = None;
    let outcome = behavioral::grid_search_scan(u, p, grid, |pi, value| {
        if write_error.is_some() {
            return;
        }
        let rows: Vec<Vec<String>> = pi
            .rows()
            .iter()
            .map(|row| row.iter().map(format_rational).collect())
            .collect();
        let line = serde_json::json!({ "pi": rows, "value": format_rational(value) });
        if let Err(e) = writeln!(writer, "{line}") {
            write_error = Some(e);
        }
    })?;
    if write_error.is_none() {
        if let Err(e) = writer.flush() {
            write_error = Some(e);
        }
    }
    if let Some(e) = write_error {
        return Err(CliError::msg(format!("{}: {e}", path.display())));
    }
    Ok(outcome)
}

/// Deterministic matrix generation: entries uniform on `lo..=hi` from a
/// seeded stream, with optional symmetric or skew shaping.
fn gen(q: usize, seed: u64, lo: i64, hi: i64, symmetric: bool, skew: bool) -> Result<(), CliError> {
    if q == 0 {
        return Err(CliError::msg("--q must be at least 1"));
    }
    if lo > hi {
        return Err(CliError::msg(format!(
            "invalid range: --lo {lo} is greater than --hi {hi}"
        )));
    }
    let mut rng = ChaCha8Rng::seed_from_u64(seed);
    let mut rows = vec![vec![0i64; q]; q];
    if skew {
        for x in 0..q {
            for y in (x + 1)..q {
                let v = rng.gen_range(lo..=hi);
                rows[x][y] = v;
                rows[y][x] = -v;
            }
        }
    } else if symmetric {
        for x in 0..q {
            for y in x..q {
                let v = rng.gen_range(lo..=hi);
                rows[x][y] = v;
                rows[y][x] = v;
            }
        }
    } else {
        for row in &mut rows {
            for cell in row.iter_mut() {
                *cell = rng.gen_range(lo..=hi);
            }
        }
    }
    let shape = if skew {
        " skew"
    } else if symmetric {
        " symmetric"
    } else {
        ""
    };
    let mut out = String::new();
    out.push_str(&format!("# q={q} seed={seed} range=[{lo},{hi}]{shape}\n"));
    for row in rows {
        let cells: Vec<String> = row.iter().map(|v| v.to_string()).collect();
        out.push_str(&cells.join(" "));
        out.push('\n');
    }
    print!("{out}");
    Ok(())
}
