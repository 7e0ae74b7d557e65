//! `parafrob`: batch front end for generalized Frobenius numbers, parametric
//! lattice problems and quasi-polynomial fitting.
//!
//! Exit codes: 0 success, 2 input error, 3 resource limit, 4 cross-check
//! mismatch.

mod commands;
mod output;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(name = "parafrob", version, about = "Generalized Frobenius numbers along polynomial families")]
struct Cli {
    #[command(subcommand)]
    command: Command,

    /// Output style.
    #[arg(long, value_enum, default_value_t = Format::Table, global = true)]
    format: Format,

    /// Run every sweep on one thread.
    #[arg(long, global = true)]
    sequential: bool,
}

#[derive(Copy, Clone, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Table,
    Machine,
}

#[derive(Subcommand, Debug)]
enum Command {
    /// F, G, F_{m,l} and G_m of one tuple, with the first representation counts.
    Compute(ComputeArgs),
    /// Write F_{m,l}(P(t)) and G_m(P(t)) series files for a family.
    Series(SeriesArgs),
    /// Fit an eventually quasi-polynomial to a series file.
    Fit(FitArgs),
    /// Compare the exclusion construction with direct computation, per t.
    Crosscheck(CrosscheckArgs),
    /// Evaluate a system or exclusion file at one t.
    Pilp(PilpArgs),
    /// Randomized oracle checks of the Frobenius routines.
    Selftest(SelftestArgs),
}

#[derive(Args, Debug)]
pub struct OutArg {
    /// Write the report here instead of standard output.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct ComputeArgs {
    /// Tuple entries, e.g. `3,5` or `a: [6, 10, 15]`.
    #[arg(long)]
    pub a: String,
    #[arg(long, default_value_t = 1)]
    pub m: u64,
    #[arg(long, default_value_t = 1)]
    pub l: u64,
    /// Largest k in the representation-count excerpt.
    #[arg(long, default_value_t = 20)]
    pub k_max: u64,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Args, Debug)]
pub struct SeriesArgs {
    /// Family file (`poly:`, `m:` and `l:` lines).
    #[arg(long)]
    pub family: PathBuf,
    #[arg(long)]
    pub t_min: i64,
    #[arg(long)]
    pub t_max: i64,
    /// Override m from the family file.
    #[arg(long)]
    pub m: Option<u64>,
    /// Override l from the family file.
    #[arg(long)]
    pub l: Option<u64>,
    /// Output prefix; writes `<prefix>_F.txt` and `<prefix>_G.txt`. Existing
    /// files are extended with the missing t only.
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Args, Debug)]
pub struct FitArgs {
    /// Series file of `t value` lines.
    #[arg(long)]
    pub series: PathBuf,
    #[arg(long, default_value_t = 24)]
    pub d_max: usize,
    #[arg(long, default_value_t = 6)]
    pub deg_max: usize,
    /// Trailing samples held out for validation [default: 2 * d_max].
    #[arg(long)]
    pub holdout: Option<usize>,
    /// Minimum training points per residue class [default: deg_max + 3].
    #[arg(long)]
    pub min_support: Option<usize>,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Args, Debug)]
pub struct CrosscheckArgs {
    #[arg(long)]
    pub family: PathBuf,
    #[arg(long)]
    pub t_min: i64,
    #[arg(long)]
    pub t_max: i64,
    #[arg(long)]
    pub m: Option<u64>,
    #[arg(long)]
    pub l: Option<u64>,
    /// Largest box size t^r (and lattice point count) attempted per t.
    #[arg(long, default_value_t = 2_000_000)]
    pub point_cap: usize,
    /// Test hook: perturb the exclusion-path F at this t.
    #[arg(long, hide = true)]
    pub inject_mismatch: Option<i64>,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Args, Debug)]
pub struct PilpArgs {
    /// System file (`kind: system` or `kind: exclusion`).
    #[arg(long)]
    pub system: PathBuf,
    #[arg(long)]
    pub t: i64,
    /// Number of largest objective values to report.
    #[arg(long, default_value_t = 1)]
    pub l: usize,
    #[arg(long, default_value_t = 1_000_000)]
    pub point_cap: usize,
    /// Also list the lattice points (L3 for exclusion files).
    #[arg(long)]
    pub list: bool,
    #[command(flatten)]
    pub out: OutArg,
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    #[arg(long, default_value_t = 100)]
    pub cases: usize,
    #[command(flatten)]
    pub out: OutArg,
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let ctx = commands::Context {
        format: cli.format,
        exec: if cli.sequential {
            parafrob_core::parallel::Execution::Sequential
        } else {
            parafrob_core::parallel::Execution::Parallel
        },
    };
    let (result, out) = match &cli.command {
        Command::Compute(a) => (commands::compute(&ctx, a), a.out.out.as_ref()),
        Command::Series(a) => (commands::series(&ctx, a), None),
        Command::Fit(a) => (commands::fit(&ctx, a), a.out.out.as_ref()),
        Command::Crosscheck(a) => (commands::crosscheck(&ctx, a), a.out.out.as_ref()),
        Command::Pilp(a) => (commands::pilp(&ctx, a), a.out.out.as_ref()),
        Command::Selftest(a) => (commands::selftest(&ctx, a), a.out.out.as_ref()),
    };
    match result {
        Ok(report) => {
            for w in &report.warnings {
                eprintln!("warning: {w}");
            }
            if let Err(e) = output::emit(&report.text, out) {
                eprintln!("error: {e}");
                return ExitCode::from(2);
            }
            ExitCode::from(report.code)
        }
        Err(failure) => {
            eprintln!("error: {}", failure.message);
            ExitCode::from(failure.code)
        }
    }
}
