use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Parser, Debug)]
#[command(
    name = "uncstates",
    version,
    about = "Coherent, squeezed and intelligent states with uncertainty-relation checks"
)]
pub struct Cli {
    /// TOML run configuration (falls back to $UNCSTATES_CONFIG).
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output format; each command has its own default.
    #[arg(long, global = true)]
    pub format: Option<Format>,
    /// Seed for randomized suites.
    #[arg(long, global = true)]
    pub seed: Option<u64>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum, serde::Deserialize)]
#[serde(rename_all = "lowercase")]
pub enum Format {
    Json,
    Csv,
    Text,
}

impl std::fmt::Display for Format {
    fn fmt(&self, f: &mut std::fmt::Formatter<'_>) -> std::fmt::Result {
        let name = self.to_possible_value().expect("no skipped variants");
        f.write_str(name.get_name())
    }
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Build states in the state-file format.
    #[command(subcommand)]
    State(StateCmd),
    /// Uncertainty-relation checks.
    #[command(subcommand)]
    Ur(UrCmd),
    /// Same as `ur scan`.
    Scan(ScanArgs),
    /// Same as `ur appendix-b`.
    AppendixB(AppendixBArgs),
    /// Distance between two states.
    Distance(DistanceArgs),
    /// Invariant-operator dynamics under a frequency profile, as CSV.
    Dynamics(DynamicsArgs),
    /// Dense operator matrices of a representation.
    DumpOps(DumpOpsArgs),
    /// Runs the acceptance suite.
    Selftest(SelftestArgs),
}

#[derive(Subcommand, Debug)]
pub enum StateCmd {
    Build(BuildArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum Family {
    Cs,
    Ss,
    Spin,
    Su11,
    Bg,
    Qcs,
    Ous,
    #[value(name = "suq11-ous")]
    Suq11Ous,
    #[value(name = "mm-ss")]
    MmSs,
}

#[derive(Args, Debug)]
pub struct BuildArgs {
    #[arg(long)]
    pub family: Family,
    /// Parameters as inline JSON or a path to a JSON file.
    #[arg(long)]
    pub params: String,
    /// Append residual diagnostics under "diagnostics".
    #[arg(long)]
    pub check: bool,
}

#[derive(Subcommand, Debug)]
pub enum UrCmd {
    Check(CheckArgs),
    Scan(ScanArgs),
    AppendixB(AppendixBArgs),
}

#[derive(Args, Debug)]
pub struct CheckArgs {
    #[arg(long, value_name = "FILE")]
    pub state: PathBuf,
    /// Comma-separated operator names, or one of qp, x1x2, x1x2x3, quadratures.
    #[arg(long)]
    pub ops: String,
    /// `2`, `1,3` or `1..3`; all orders when omitted.
    #[arg(long)]
    pub orders: Option<String>,
    /// Shorthand for `--format json`.
    #[arg(long)]
    pub json: bool,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum ScanFamily {
    Cs,
    #[value(name = "su11-cs")]
    Su11Cs,
    #[value(name = "spin-cs")]
    SpinCs,
}

#[derive(Args, Debug)]
pub struct ScanArgs {
    #[arg(long)]
    pub family: ScanFamily,
    /// Grid as inline JSON or a path to a JSON file.
    #[arg(long)]
    pub grid: String,
    #[arg(long, default_value_t = 2)]
    pub order: usize,
    /// Operator tuple; defaults to q,p for cs and x1,x2,x3 otherwise.
    #[arg(long)]
    pub ops: Option<String>,
}

#[derive(Args, Debug)]
pub struct AppendixBArgs {
    #[arg(long)]
    pub k: f64,
    /// `default` or a grid as inline JSON or a path to a JSON file.
    #[arg(long, default_value = "default")]
    pub grid: String,
}

#[derive(Args, Debug)]
pub struct DistanceArgs {
    #[arg(long, value_name = "FILE")]
    pub state1: PathBuf,
    #[arg(long, value_name = "FILE")]
    pub state2: PathBuf,
    #[arg(long)]
    pub ops: String,
    #[arg(long)]
    pub order: usize,
    /// `trace` or `xsq:<operator name>`.
    #[arg(long, default_value = "trace")]
    pub g: String,
}

#[derive(Args, Debug)]
pub struct DynamicsArgs {
    /// Frequency profile as inline JSON or a path to a JSON file.
    #[arg(long)]
    pub profile: String,
    /// Eigenvalue of the invariant, `re,im`.
    #[arg(long, allow_hyphen_values = true)]
    pub alpha: String,
    #[arg(long)]
    pub t_end: f64,
    #[arg(long)]
    pub dt: f64,
    /// Fock levels of the propagated state.
    #[arg(long)]
    pub dim: Option<usize>,
}

#[derive(Args, Debug)]
pub struct DumpOpsArgs {
    /// Representation as inline JSON, e.g. `{"kind":"su2","j":1}`.
    #[arg(long)]
    pub rep: String,
    #[arg(long)]
    pub dim: Option<usize>,
    /// Comma-separated operator names; all standard ones when omitted.
    #[arg(long)]
    pub names: Option<String>,
}

#[derive(Args, Debug)]
pub struct SelftestArgs {
    #[arg(long)]
    pub trials: Option<usize>,
    /// Comma-separated criterion numbers; all when omitted.
    #[arg(long)]
    pub only: Option<String>,
}
