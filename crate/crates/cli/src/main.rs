//! `commutant`: commutativity analysis of second-order LTV systems.
//!
//! Exit codes: 0 success, 1 negative verdict, 2 usage or input error,
//! 3 numeric failure.

mod commands;
mod style;

use std::path::PathBuf;
use std::process::ExitCode;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser)]
#[command(
    name = "commutant",
    version,
    about = "Commutativity analysis of second-order linear time-varying systems"
)]
struct Cli {
    #[command(subcommand)]
    command: Command,
}

#[derive(Subcommand)]
enum Command {
    /// List catalog entries or show one in detail.
    Catalog(CatalogArgs),
    /// Decide whether a system admits a commutative partner with c1 != 0.
    Check(CheckArgs),
    /// Synthesize the commutative partner of a system.
    Pair(PairArgs),
    /// Simulate a cascade of systems and write the trajectory as CSV.
    Simulate(SimulateArgs),
    /// Run the transmitter/receiver demonstration.
    Demo(DemoArgs),
    /// Cross-check the catalog's classes, final forms and conjugates.
    VerifyTables(VerifyArgs),
}

#[derive(Args)]
#[group(required = true, multiple = false)]
struct CatalogArgs {
    /// Print one row per entry.
    #[arg(long)]
    list: bool,
    /// Show one entry by name or number.
    #[arg(long, value_name = "NAME")]
    show: Option<String>,
}

/// Where a system comes from: a file or a catalog entry.
#[derive(Args)]
struct SystemSource {
    /// System definition file.
    #[arg(
        long,
        value_name = "FILE",
        conflicts_with = "catalog",
        required_unless_present = "catalog"
    )]
    system: Option<PathBuf>,
    /// Catalog entry name or number.
    #[arg(long, value_name = "NAME")]
    catalog: Option<String>,
    /// Parameter override for catalog entries, `name=value` (repeatable).
    #[arg(long = "param", value_name = "K=V", requires = "catalog")]
    params: Vec<String>,
    /// Condition label or row numeral of a catalog entry.
    #[arg(long, value_name = "LABEL", requires = "catalog")]
    condition: Option<String>,
    /// Domain override, `lo,hi`.
    #[arg(long, value_name = "LO,HI", allow_hyphen_values = true)]
    domain: Option<String>,
}

#[derive(Args)]
struct CheckArgs {
    #[command(flatten)]
    source: SystemSource,
    /// Number of probe points.
    #[arg(long, default_value_t = commutant::commutativity::DEFAULT_GRID)]
    grid: usize,
    /// Relative constancy tolerance.
    #[arg(long, default_value_t = commutant::commutativity::DEFAULT_TOL)]
    tol: f64,
}

#[derive(Args)]
struct PairArgs {
    #[command(flatten)]
    source: SystemSource,
    /// Constant c2 (an expression such as 1/2).
    #[arg(long, allow_hyphen_values = true)]
    c2: String,
    /// Constant c1.
    #[arg(long, allow_hyphen_values = true)]
    c1: String,
    /// Constant c0.
    #[arg(long, allow_hyphen_values = true)]
    c0: String,
    /// Write the partner as a system file.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

#[derive(Args)]
struct SimulateArgs {
    /// Comma-separated system files, first stage first.
    #[arg(long, value_name = "FILE[,FILE...]", value_delimiter = ',', required = true)]
    chain: Vec<PathBuf>,
    /// Input: sine-saw, pulse, zero or expr:<E>.
    #[arg(long, default_value = "sine-saw")]
    input: String,
    #[arg(long, default_value_t = 0.0, allow_hyphen_values = true)]
    t0: f64,
    #[arg(long, allow_hyphen_values = true)]
    t1: f64,
    #[arg(long, default_value_t = 1e-3, allow_hyphen_values = true)]
    dt: f64,
    /// Output CSV path.
    #[arg(long, value_name = "CSV")]
    out: PathBuf,
}

#[derive(Clone, Copy, ValueEnum)]
enum Preset {
    /// The reference pair `A`, `B` with k2 = 1/2, k1 = -1/4.
    #[value(alias = "paper5")]
    Reference,
}

#[derive(Clone, Copy, ValueEnum)]
enum K0Arg {
    /// 337/32, consistent with the printed partner.
    Derived,
    /// 4213/400, the value stated with the pair.
    #[value(alias = "paper")]
    Stated,
}

#[derive(Clone, Copy, ValueEnum)]
enum DemoInput {
    SineSaw,
    Pulse,
}

#[derive(Args)]
struct DemoArgs {
    #[arg(long, value_enum, default_value = "reference")]
    preset: Preset,
    /// Angular frequency w0 of the preset.
    #[arg(long, default_value_t = commutant::channel::W0_DEFAULT)]
    w0: f64,
    #[arg(long, value_enum, default_value = "derived")]
    k0: K0Arg,
    #[arg(long, value_enum, default_value = "sine-saw")]
    input: DemoInput,
    /// Directory for the per-structure CSVs and report.txt.
    #[arg(long, value_name = "DIR")]
    out_dir: PathBuf,
    /// Total number of stages: 2 (A, B) or 4 (A, A, B, B).
    #[arg(long, default_value_t = 2, value_parser = parse_stages)]
    stages: usize,
    #[arg(long, default_value_t = 20.0)]
    t1: f64,
    #[arg(long, default_value_t = 1e-3)]
    dt: f64,
    /// Maximum normalized output disagreement.
    #[arg(long, default_value_t = commutant::channel::EPS_OUT)]
    eps_out: f64,
    /// Minimum normalized transmitted-signal divergence.
    #[arg(long, default_value_t = commutant::channel::DELTA_MIN)]
    delta_min: f64,
    /// Add an expression in t to b0 of B (e.g. a negative control).
    #[arg(long, value_name = "EXPR", allow_hyphen_values = true)]
    perturb_b0: Option<String>,
    /// Run even if B cannot be verified to commute with A.
    #[arg(long)]
    force: bool,
}

#[derive(Args)]
struct VerifyArgs {
    /// Relative tolerance of all comparisons.
    #[arg(long, default_value_t = commutant::commutativity::DEFAULT_TOL)]
    tol: f64,
    /// Also write the report to this file.
    #[arg(long, value_name = "FILE")]
    out: Option<PathBuf>,
}

fn parse_stages(s: &str) -> Result<usize, String> {
    match s {
        "2" => Ok(2),
        "4" => Ok(4),
        _ => Err("expected 2 or 4".to_string()),
    }
}

fn main() -> ExitCode {
    let cli = Cli::parse();
    let result = match cli.command {
        Command::Catalog(a) => commands::catalog(a.list, a.show.as_deref()),
        Command::Check(a) => commands::check(&a.source, a.grid, a.tol),
        Command::Pair(a) => commands::pair(&a.source, [&a.c2, &a.c1, &a.c0], a.out.as_deref()),
        Command::Simulate(a) => commands::simulate(&a.chain, &a.input, a.t0, a.t1, a.dt, &a.out),
        Command::Demo(a) => commands::demo(&a),
        Command::VerifyTables(a) => commands::verify_tables(a.tol, a.out.as_deref()),
    };
    match result {
        Ok(code) => ExitCode::from(code as u8),
        Err(e) => {
            eprintln!("{}: {}", style::error("error"), e.message);
            ExitCode::from(e.code as u8)
        }
    }
}
