//! `confalg` — exact checks for conformal-algebra structures, operators, and
//! tensor equations, driven by JSON definition files.
//!
//! Exit codes: 0 when every requested check passes, 1 when a check fails (the
//! report carries the counterexample), 2 for input or usage errors.

use std::path::PathBuf;

use clap::{ArgGroup, Parser, Subcommand, ValueEnum};

mod commands;
mod defs;
mod report;

#[derive(Parser)]
#[command(
    name = "confalg",
    version,
    about = "Exact checks for conformal-algebra structures, operators, and tensor equations"
)]
pub struct Cli {
    /// Emit the report as JSON instead of aligned text.
    #[arg(long, global = true)]
    pub json: bool,
    /// Seed for randomized spot checks.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    /// Largest ansatz degree the search command accepts.
    #[arg(long, global = true, default_value_t = 4)]
    pub max_degree: usize,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand)]
pub enum Command {
    /// Check the structure declared in a definition file, along with any
    /// bimodule and bilinear-form attachments.
    Check(CheckArgs),
    /// Test a named operator matrix against an operator identity.
    Operator(OperatorArgs),
    /// Derive a new definition from a stored one and print or write it.
    Derive(DeriveArgs),
    /// Check a two-slot tensor against the symmetric solution equation.
    Sequation(SequationArgs),
    /// Extract the constraint system for a polynomial operator ansatz and
    /// optionally enumerate solutions over a value grid.
    Search(SearchArgs),
}

#[derive(clap::Args)]
pub struct CheckArgs {
    /// Definition file to check.
    pub file: PathBuf,
    /// Check under this kind instead of the declared one.
    #[arg(long)]
    pub kind: Option<String>,
}

#[derive(Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum OperatorTest {
    /// Relative operator identity over the file's bimodule.
    O,
    /// Rota-Baxter identity with the given weight.
    Rb,
    /// Nijenhuis identity.
    Nijenhuis,
    /// Compatibility of two maps over the file's bimodule.
    Compatible,
}

impl OperatorTest {
    pub fn name(self) -> &'static str {
        match self {
            OperatorTest::O => "o",
            OperatorTest::Rb => "rb",
            OperatorTest::Nijenhuis => "nijenhuis",
            OperatorTest::Compatible => "compatible",
        }
    }
}

#[derive(clap::Args)]
pub struct OperatorArgs {
    /// Definition file holding the structure and the named operators.
    pub file: PathBuf,
    /// Operator name from the file's `operators` section.
    #[arg(long)]
    pub op: String,
    /// Second operator name (for `--test compatible`).
    #[arg(long)]
    pub op2: Option<String>,
    /// Identity to test.
    #[arg(long, value_enum)]
    pub test: OperatorTest,
    /// Rota-Baxter weight (a polynomial in the parameters).
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub weight: String,
    /// Additionally spot-check this many random parameter instantiations
    /// (seeded by --seed).
    #[arg(long, default_value_t = 0)]
    pub spot: usize,
}

#[derive(Clone, Copy, ValueEnum)]
pub enum DeriveWhat {
    /// Commutator bracket of a left-symmetric structure (a Lie structure).
    Commutator,
    /// Sum product of an L-dendriform structure (left-symmetric).
    Horizontal,
    /// Right-action product of an L-dendriform structure (left-symmetric).
    Vertical,
    /// Transposed L-dendriform structure.
    Transpose,
    /// Semidirect-product structure of the file's bimodule.
    Semidirect,
    /// The file's structure with the dual bimodule attached.
    Dual,
    /// L-dendriform structure induced by an operator over the bimodule.
    InducedLd,
    /// Product deformed by a Nijenhuis-style map.
    Deformed,
    /// L-dendriform structure split off by a qualifying bilinear form.
    PseudoHessian,
    /// Canonical solution tensor of an L-dendriform structure, with its
    /// ambient structure.
    CanonicalR,
    /// Solution tensor built from an operator over the bimodule, with its
    /// ambient structure.
    RFromT,
}

#[derive(clap::Args)]
pub struct DeriveArgs {
    /// Definition file to derive from.
    pub file: PathBuf,
    /// Derivation to perform.
    #[arg(long, value_enum)]
    pub what: DeriveWhat,
    /// Operator name (for induced-ld, deformed, r-from-t).
    #[arg(long)]
    pub op: Option<String>,
    /// Split flavor: `vertical` or `horizontal`.
    #[arg(long, default_value = "vertical")]
    pub flavor: String,
    /// Bilinear-form name (for pseudo-hessian).
    #[arg(long)]
    pub form: Option<String>,
    /// Write the derived definition here instead of printing it.
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(clap::Args)]
#[command(group(ArgGroup::new("source").required(true).args(["r", "canonical"])))]
pub struct SequationArgs {
    /// Definition file holding the structure (and tensors).
    pub file: PathBuf,
    /// Tensor name from the file's `tensors` section.
    #[arg(long)]
    pub r: Option<String>,
    /// Build and check the canonical tensor of an L-dendriform structure.
    #[arg(long)]
    pub canonical: bool,
    /// Split flavor for --canonical: `vertical` or `horizontal`.
    #[arg(long, default_value = "vertical")]
    pub flavor: String,
}

#[derive(clap::Args)]
pub struct SearchArgs {
    /// Definition file holding the structure (and bimodule for --test o).
    pub file: PathBuf,
    /// Identity to search solutions of (`rb`, `nijenhuis`, or `o`).
    #[arg(long, value_enum)]
    pub test: OperatorTest,
    /// Ansatz degree in the derivation variable.
    #[arg(long, default_value_t = 1)]
    pub degree: usize,
    /// Rota-Baxter weight (a polynomial in the parameters).
    #[arg(long, default_value = "0", allow_hyphen_values = true)]
    pub weight: String,
    /// Comma-separated rational values; enumerate all assignments of the
    /// constrained unknowns over this grid.
    #[arg(long, allow_hyphen_values = true)]
    pub grid: Option<String>,
    /// Cap on grid assignments per independent block (default 19683).
    #[arg(long)]
    pub max_points: Option<u128>,
}

fn main() {
    let cli = Cli::parse();
    let code = match run(&cli) {
        Ok(code) => code,
        Err(err) => {
            eprintln!("error: {err:#}");
            2
        }
    };
    std::process::exit(code);
}

fn run(cli: &Cli) -> anyhow::Result<i32> {
    match &cli.command {
        Command::Check(args) => Ok(commands::check::run(cli, args)?.print(cli.json)),
        Command::Operator(args) => Ok(commands::operator::run(cli, args)?.print(cli.json)),
        Command::Derive(args) => commands::derive::run(cli, args),
        Command::Sequation(args) => Ok(commands::sequation::run(cli, args)?.print(cli.json)),
        Command::Search(args) => Ok(commands::search::run(cli, args)?.print(cli.json)),
    }
}
