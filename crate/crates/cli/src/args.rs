use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::sweep::{parse_range, SweepRange};

#[derive(Debug, Parser)]
#[command(name = "csgnash", version, about = "Nash equilibrium model checking for concurrent stochastic games")]
#[command(args_conflicts_with_subcommands = true, subcommand_negates_reqs = true)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Option<Command>,
    #[command(flatten)]
    pub check: CheckArgs,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Equilibria and the social-welfare selection of a bimatrix game.
    SolveNfg(NfgArgs),
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    /// Model in the modelling language, or in the explicit-state format
    /// when the file name ends in `.explicit`.
    #[arg(long, required = true, value_name = "PATH")]
    pub model: Option<PathBuf>,
    /// Constant override; repeatable.
    #[arg(long = "const", value_name = "NAME=VAL", value_parser = parse_assignment)]
    pub consts: Vec<(String, String)>,
    /// Property text; repeatable.
    #[arg(long, value_name = "TEXT")]
    pub property: Vec<String>,
    /// One property per line, `//` comments allowed.
    #[arg(long, value_name = "PATH")]
    pub property_file: Option<PathBuf>,
    /// Deviation gain tolerated by `--verify`.
    #[arg(long, default_value_t = 1e-4)]
    pub epsilon: f64,
    /// Per-state convergence threshold of value iteration.
    #[arg(long, default_value_t = 1e-6)]
    pub conv_epsilon: f64,
    #[arg(long, default_value_t = 10_000)]
    pub max_iters: usize,
    /// Convergence-assumption violations are errors instead of warnings.
    #[arg(long)]
    pub strict_assumptions: bool,
    /// Value iteration in exact rational arithmetic.
    #[arg(long)]
    pub exact: bool,
    /// Record the iterates at this state (by name).
    #[arg(long, value_name = "STATE")]
    pub trace: Option<String>,
    /// Write the synthesised profiles as a JSON array, one per Nash property.
    #[arg(long, value_name = "PATH")]
    pub export_strategy: Option<PathBuf>,
    /// Check each synthesised profile is an epsilon-NE from the initial state.
    #[arg(long)]
    pub verify: bool,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    pub format: Format,
    /// Re-run for each value of a model constant or a property identifier.
    #[arg(long, value_name = "NAME=LO..HI[:STEP]", value_parser = parse_range)]
    pub sweep: Option<SweepRange>,
}

#[derive(Debug, Args)]
pub struct NfgArgs {
    /// Row player's payoffs: a CSV file, or inline rows separated by `;`.
    pub z1: String,
    /// Column player's payoffs, same shape.
    pub z2: String,
    #[arg(long, value_enum, default_value_t = Format::Human)]
    pub format: Format,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Format {
    Human,
    Json,
    Csv,
}

pub fn parse_assignment(s: &str) -> Result<(String, String), String> {
    let (name, value) = s.split_once('=').ok_or_else(|| format!("expected NAME=VAL, got `{s}`"))?;
    let name = name.trim();
    if name.is_empty() {
        return Err(format!("missing constant name in `{s}`"));
    }
    Ok((name.to_string(), value.trim().to_string()))
}
