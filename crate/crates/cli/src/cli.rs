use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::output::Format;

#[derive(Debug, Parser)]
#[command(
    name = "hecke-trace",
    version,
    about = "Geometric side of the Selberg trace formula for Hecke operators on cocompact Kleinian groups"
)]
pub struct Cli {
    /// Output format.
    #[arg(long, global = true, value_enum, default_value = "csv")]
    pub output: Format,
    /// Seed for randomly generated test data.
    #[arg(long, global = true, default_value_t = 0)]
    pub seed: u64,
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Evaluate a closed-form transform pair.
    Transform(TransformArgs),
    /// Enumerate a slice of a quaternion order.
    Factory(FactoryArgs),
    /// Coset decomposition of the double coset and the representation checks.
    Decompose(DecomposeArgs),
    /// Conjugacy classes of the double coset layer.
    Classes(ClassesArgs),
    /// Geometric side of the trace formula for a test-function pair.
    Trace(TraceArgs),
    /// Small-time asymptotics of the Hecke heat trace.
    Heat(HeatArgs),
    /// Residual of the resolvent identity for a spectrum package.
    Resolvent(ResolventArgs),
    /// Compare two spectrum packages.
    Huber(HuberArgs),
    /// Validate a slice file.
    Validate(ValidateArgs),
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum PairName {
    Heat,
    Resolvent,
}

#[derive(Debug, Args)]
pub struct PairArgs {
    #[arg(long, value_enum)]
    pub pair: PairName,
    /// Heat time.
    #[arg(long)]
    pub t: Option<f64>,
    /// Resolvent parameter `s`.
    #[arg(long)]
    pub s: Option<f64>,
    /// Resolvent parameter `B`.
    #[arg(long = "B")]
    pub b: Option<f64>,
}

#[derive(Debug, Args)]
pub struct TransformArgs {
    #[command(flatten)]
    pub pair: PairArgs,
    /// Points at which to evaluate `g`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub x: Vec<f64>,
    /// Eigenvalues at which to evaluate `h`.
    #[arg(long, value_delimiter = ',', allow_negative_numbers = true)]
    pub lambda: Vec<f64>,
    /// Also compute `g` from `h` by quadrature and report the difference.
    #[arg(long)]
    pub check: bool,
}

#[derive(Debug, Args)]
pub struct FactoryArgs {
    #[arg(long)]
    pub config: PathBuf,
    #[arg(long)]
    pub radius: Option<f64>,
    #[arg(long)]
    pub out: PathBuf,
    /// Search centralizer generators and conjugators up to this length.
    #[arg(long)]
    pub augment: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DecomposeArgs {
    #[arg(long)]
    pub slice: PathBuf,
    #[arg(long)]
    pub rep: Option<PathBuf>,
    /// Number of random point pairs at which to compare the two kernel evaluations.
    #[arg(long, default_value_t = 0)]
    pub kernel_pairs: usize,
    /// Distance from `j` within which the random points are drawn.
    #[arg(long, default_value_t = 0.1)]
    pub spread: f64,
}

#[derive(Debug, Args)]
pub struct ClassesArgs {
    #[arg(long)]
    pub slice: PathBuf,
    /// Write a spectrum package with the length spectrum and elliptic number.
    #[arg(long)]
    pub package_out: Option<PathBuf>,
    /// Eigenvalue data to include in the package.
    #[arg(long)]
    pub spectral: Option<PathBuf>,
    #[arg(long, default_value = "slice")]
    pub label: String,
}

#[derive(Debug, Args)]
pub struct TraceArgs {
    #[arg(long)]
    pub slice: PathBuf,
    #[command(flatten)]
    pub pair: PairArgs,
    #[arg(long)]
    pub rep: Option<PathBuf>,
    /// Eigenvalue data (`lambda,omega_re,omega_im`) for the spectral side.
    #[arg(long)]
    pub spectral: Option<PathBuf>,
    /// Covering radius of the group, sharpening the completeness bound.
    #[arg(long)]
    pub covering_radius: Option<f64>,
}

#[derive(Debug, Args)]
pub struct HeatArgs {
    #[arg(long)]
    pub slice: PathBuf,
    #[arg(long, value_delimiter = ',', default_value = "0.2,0.1,0.05,0.025")]
    pub tgrid: Vec<f64>,
    /// Elliptic number to test against; defaults to the one of the slice.
    #[arg(long, allow_negative_numbers = true)]
    pub claimed_e: Option<f64>,
}

#[derive(Debug, Args)]
pub struct ResolventArgs {
    #[arg(long)]
    pub package: PathBuf,
    /// `s`, real or `re+imi`.
    #[arg(long)]
    pub s: String,
    /// `B`, real or `re+imi`.
    #[arg(long = "B")]
    pub b: String,
}

#[derive(Clone, Copy, Debug, PartialEq, Eq, ValueEnum)]
pub enum HuberMode {
    #[value(name = "S")]
    S,
    #[value(name = "L")]
    L,
    Corollary,
}

#[derive(Debug, Args)]
pub struct HuberArgs {
    #[arg(long)]
    pub left: PathBuf,
    #[arg(long)]
    pub right: PathBuf,
    #[arg(long, value_enum, default_value = "L")]
    pub mode: HuberMode,
}

#[derive(Debug, Args)]
pub struct ValidateArgs {
    #[arg(long)]
    pub slice: PathBuf,
}
