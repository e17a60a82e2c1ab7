use std::path::PathBuf;

use avlab::Variant;
use clap::{ArgGroup, Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(
    name = "avlab",
    version,
    about = "Allan variance for non-stationary processes"
)]
pub struct Cli {
    /// Worker threads (all cores if unset).
    #[arg(long, global = true, env = "AVLAB_JOBS")]
    pub jobs: Option<usize>,

    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate one realization of a model to CSV `t,x`.
    Simulate(SimulateArgs),
    /// Empirical Allan variance of a signal file, CSV `n,av`.
    Estimate(EstimateArgs),
    /// Theoretical Allan variance of a model, CSV `n,av`.
    Theory(TheoryArgs),
    /// Monte Carlo experiment writing an output directory.
    Experiment(ExperimentArgs),
    /// Compare the closed-form theory against the dense quadratic-form oracle.
    Check(CheckArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ModelKind {
    NsWhiteNoise,
    WhiteNoise,
    BiasInstability,
    BlockAr1,
    Ar1,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum VariantArg {
    Moav,
    Noav,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Moav => Variant::Moav,
            VariantArg::Noav => Variant::Noav,
        }
    }
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum TheoryMode {
    NsMoav,
    NsNoav,
    Stationary,
}

#[derive(Debug, Clone, Args)]
pub struct ModelArgs {
    #[arg(long, value_enum)]
    pub model: ModelKind,
    /// Innovation (AR) or level variance.
    #[arg(long, default_value_t = 1.0)]
    pub sigma2: f64,
    /// AR(1) coefficient, required by `ar1` and `block-ar1`.
    #[arg(long, allow_negative_numbers = true)]
    pub phi: Option<f64>,
    #[arg(long)]
    pub block_length: Option<usize>,
    #[arg(long)]
    pub blocks: Option<usize>,
    /// Series length; block models default to block-length × blocks.
    #[arg(long = "T", visible_alias = "length")]
    pub len: Option<usize>,
    /// Per-index variances for `ns-white-noise`, CSV `t,variance`.
    #[arg(long)]
    pub variance_file: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output file (stdout if omitted).
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct EstimateArgs {
    /// Signal CSV; the `x` column is used if present, else the last column.
    #[arg(long)]
    pub input: PathBuf,
    #[arg(long, value_enum, default_value_t = VariantArg::Moav)]
    pub variant: VariantArg,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TheoryArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value_t = TheoryMode::NsMoav)]
    pub mode: TheoryMode,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Args)]
#[command(group(ArgGroup::new("source").required(true).args(["preset", "config"])))]
pub struct ExperimentArgs {
    /// Built-in case study: fig1, fig2 or fig3.
    #[arg(long)]
    pub preset: Option<String>,
    /// JSON experiment config, or a manifest from an earlier run.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Base seed; replicate r uses seed + r.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub replicates: Option<usize>,
    #[arg(long)]
    pub out: PathBuf,
}

#[derive(Debug, Args)]
pub struct CheckArgs {
    #[command(flatten)]
    pub model: ModelArgs,
    #[arg(long, value_enum, default_value_t = VariantArg::Moav)]
    pub variant: VariantArg,
    /// Largest admissible absolute difference.
    #[arg(long, default_value_t = 1e-10)]
    pub tol: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}
