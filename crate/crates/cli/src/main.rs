use std::process::ExitCode;

use clap::{Parser, Subcommand, ValueEnum};
use dynfree_core::enumerate::DEFAULT_SEED;
use dynfree_core::freeness::DEFAULT_N_ITER;
use dynfree_core::Field;

mod commands;

use commands::{CliError, Output};

#[derive(Parser, Debug)]
#[command(name = "dynfree", version, about = "Heights, freeness certificates and growth of polynomial semigroups")]
struct Cli {
    #[command(subcommand)]
    cmd: Command,
    /// Base field: `q` or `fp:<prime>`.
    #[arg(long, global = true, default_value = "q")]
    field: Field,
    /// Cap on enumerated elements, words or candidate points. Overrides
    /// DYNFREE_BUDGET.
    #[arg(long, global = true)]
    budget: Option<usize>,
    /// Output format; commands that emit tables accept csv.
    #[arg(long, global = true, value_enum)]
    format: Option<Format>,
    /// Seed for fingerprint primes and evaluation points.
    #[arg(long, global = true, default_value_t = DEFAULT_SEED)]
    seed: u64,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Json,
    Csv,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// Parse an expression and print its canonical form.
    Parse {
        #[arg(allow_hyphen_values = true)]
        expr: String,
    },
    /// Search for a freeness certificate for <f^j, g^j> and audit it.
    FreeCert {
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, allow_hyphen_values = true)]
        g: String,
        /// Point to try first, e.g. `2`, `-3/5` or `inf`.
        #[arg(long, allow_hyphen_values = true)]
        witness: Option<String>,
        /// Starting iteration depth for the canonical heights.
        #[arg(long, default_value_t = DEFAULT_N_ITER)]
        n_iter: usize,
        /// Word length of the brute-force audit of <f^j, g^j>; 0 skips it.
        #[arg(long, default_value_t = 6)]
        audit_len: usize,
    },
    /// Growth table d_S(n) of a finitely generated semigroup.
    Growth {
        /// Generators separated by `;`.
        #[arg(long, allow_hyphen_values = true)]
        gens: String,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
    },
    /// Rational preperiodic points of a polynomial over Q.
    Prep {
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        /// Height bound; defaults to the certified C/(d-1).
        #[arg(long)]
        bound: Option<f64>,
    },
    /// Böttcher coordinate of f at a superattracting fixed point, and the
    /// fixed-point freeness test against g when given.
    Boettcher {
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        #[arg(long, default_value = "0", allow_hyphen_values = true)]
        alpha: String,
        #[arg(long, default_value_t = 12)]
        prec: usize,
        #[arg(long, allow_hyphen_values = true)]
        g: Option<String>,
    },
    /// All coincidences among words of length up to max-len.
    Relations {
        #[arg(long, allow_hyphen_values = true)]
        gens: String,
        #[arg(long, default_value_t = 6)]
        max_len: usize,
    },
    /// CSV raster `re,im,G` of the escape rate over a window.
    EscapeGrid {
        #[arg(long, allow_hyphen_values = true)]
        f: String,
        /// `x0,x1,y0,y1`.
        #[arg(long, default_value = "-2,2,-2,2", allow_hyphen_values = true)]
        window: String,
        /// `W,H`.
        #[arg(long, default_value = "64,64")]
        res: String,
        #[arg(long, default_value_t = 50)]
        n_iter: usize,
        /// Working precision in bits (24 or 53).
        #[arg(long, default_value_t = 53)]
        prec: u32,
    },
    /// Growth table of a semigroup of invertible affine maps of Q^k.
    AffineGrowth {
        /// `A|t` with rows of A separated by `;`, e.g. `2|0` or `1,1;0,1|0,1`.
        #[arg(long = "map", required = true, allow_hyphen_values = true)]
        maps: Vec<String>,
        #[arg(long, default_value_t = 8)]
        max_len: usize,
    },
}

fn budget(cli: &Cli, default: usize) -> Result<usize, CliError> {
    if let Some(b) = cli.budget {
        return Ok(b);
    }
    match std::env::var("DYNFREE_BUDGET") {
        Ok(v) => v.trim().parse().map_err(|_| CliError::Usage(format!("DYNFREE_BUDGET is not a count: `{v}`"))),
        Err(_) => Ok(default),
    }
}

fn run(cli: &Cli) -> Result<Output, CliError> {
    let fmt = cli.format;
    match &cli.cmd {
        Command::Parse { expr } => commands::parse(cli.field, expr, fmt),
        Command::FreeCert { f, g, witness, n_iter, audit_len } => {
            let b = budget(cli, dynfree_core::freeness::DEFAULT_WORD_BUDGET)?;
            commands::free_cert(cli.field, f, g, witness.as_deref(), *n_iter, *audit_len, b, cli.seed, fmt)
        }
        Command::Growth { gens, max_len } => {
            let b = budget(cli, dynfree_core::growth::DEFAULT_BUDGET)?;
            commands::growth(cli.field, gens, *max_len, b, cli.seed, fmt)
        }
        Command::Prep { f, bound } => {
            let b = budget(cli, dynfree_core::preper::DEFAULT_PREP_BUDGET)?;
            commands::prep(cli.field, f, *bound, b, fmt)
        }
        Command::Boettcher { f, alpha, prec, g } => commands::boettcher(cli.field, f, alpha, *prec, g.as_deref(), fmt),
        Command::Relations { gens, max_len } => {
            let b = budget(cli, dynfree_core::freeness::DEFAULT_WORD_BUDGET)?;
            commands::relations(cli.field, gens, *max_len, b, cli.seed, fmt)
        }
        Command::EscapeGrid { f, window, res, n_iter, prec } => commands::escape_grid(cli.field, f, window, res, *n_iter, *prec, fmt),
        Command::AffineGrowth { maps, max_len } => {
            let b = budget(cli, dynfree_core::growth::DEFAULT_BUDGET)?;
            commands::affine_growth(maps, *max_len, b, fmt)
        }
    }
}

fn main() -> ExitCode {
    let cli = match Cli::try_parse() {
        Ok(c) => c,
        Err(e) => {
            let _ = e.print();
            return if e.use_stderr() { ExitCode::from(2) } else { ExitCode::SUCCESS };
        }
    };
    match run(&cli) {
        Ok(out) => {
            print!("{}", out.text);
            ExitCode::from(out.code)
        }
        Err(e) => {
            eprintln!("error: {e}");
            ExitCode::from(e.code())
        }
    }
}
