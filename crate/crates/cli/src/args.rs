use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "eqop", version, about = "Distributed latent operators: data, training, evaluation and theory checks")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a paired dataset of transformed shapes or MNIST digits.
    GenData(GenDataArgs),
    /// Train a model from a JSON config on a dataset.
    Train(TrainArgs),
    /// Evaluate a checkpoint on a dataset's test split.
    Eval(EvalArgs),
    /// Run the operator theory checks.
    Verify(VerifyArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum DataKind {
    Shapes,
    Mnist,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum PairModeArg {
    Orbit,
    Base,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum RotationArg {
    Bilinear,
    Exact90,
}

#[derive(Debug, Args)]
pub struct GenDataArgs {
    #[arg(long, value_enum, default_value = "shapes")]
    pub kind: DataKind,
    /// Number of base images.
    #[arg(long, default_value_t = 200, value_parser = clap::value_parser!(u64).range(1..))]
    pub count: u64,
    /// Number of rotations.
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub rot: u64,
    /// Number of x-translations (one pixel each).
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub tx: u64,
    /// Number of y-translations (one pixel each).
    #[arg(long, default_value_t = 1, value_parser = clap::value_parser!(u64).range(1..))]
    pub ty: u64,
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    /// Side length of generated shapes.
    #[arg(long, default_value_t = 28, value_parser = clap::value_parser!(u64).range(2..))]
    pub size: u64,
    /// Keep a uniform random subset of this many pairs.
    #[arg(long)]
    pub cap: Option<usize>,
    #[arg(long, value_enum, default_value = "orbit")]
    pub pair_mode: PairModeArg,
    #[arg(long, value_enum, default_value = "bilinear")]
    pub rotation: RotationArg,
    #[arg(long, required_if_eq("kind", "mnist"))]
    pub idx_images: Option<PathBuf>,
    #[arg(long, required_if_eq("kind", "mnist"))]
    pub idx_labels: Option<PathBuf>,
}

#[derive(Debug, Args)]
pub struct TrainArgs {
    #[arg(long)]
    pub config: PathBuf,
    /// Dataset directory or container file.
    #[arg(long)]
    pub data: PathBuf,
    /// Output directory.
    #[arg(long)]
    pub out: PathBuf,
    #[arg(long)]
    pub epochs: Option<usize>,
    #[arg(long)]
    pub lr: Option<f64>,
    #[arg(long)]
    pub batch: Option<usize>,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long)]
    pub latent_dim: Option<usize>,
    #[arg(long)]
    pub init_scale: Option<f64>,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[arg(long)]
    pub checkpoint: PathBuf,
    /// Dataset directory or container file.
    #[arg(long)]
    pub data: PathBuf,
    /// Report path (JSON).
    #[arg(long)]
    pub out: PathBuf,
    /// Directory for PGM orbit strips of sampled test images.
    #[arg(long)]
    pub grids: Option<PathBuf>,
    /// Number of test images to draw strips for.
    #[arg(long, default_value_t = 4)]
    pub grid_samples: usize,
}

#[derive(Debug, Args)]
pub struct VerifyArgs {
    /// Skip checks on groups larger than this.
    #[arg(long, default_value_t = 60)]
    pub max_order: usize,
    /// Flip the sign of the permutation shift operators.
    #[arg(long, hide = true)]
    pub inject_fault: bool,
}
