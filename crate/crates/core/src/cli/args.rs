use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::pipeline::{FastPath, Variant};
use crate::primitives::Backend;

/// Aggregate the weights of dominated points for every query point.
#[derive(Parser, Debug)]
#[command(name = "domscan", version, about)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Subcommand, Debug)]
pub enum Command {
    /// Run the pipeline and write one `id,value` row per query.
    Run(RunArgs),
    /// Run the pipeline and compare it with the brute-force oracle.
    Verify(VerifyArgs),
    /// Generate a random instance.
    Gen(GenArgs),
    /// Time the pipeline over doubling instance sizes.
    Bench(BenchArgs),
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum MonoidArg {
    Count,
    Sum,
    Min,
    Max,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum VariantArg {
    Basic,
    Improved,
}

impl From<VariantArg> for Variant {
    fn from(v: VariantArg) -> Self {
        match v {
            VariantArg::Basic => Variant::Basic,
            VariantArg::Improved => Variant::Improved,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum BackendArg {
    Seq,
    Par,
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum FastPathArg {
    Auto,
    Off,
}

impl From<FastPathArg> for FastPath {
    fn from(f: FastPathArg) -> Self {
        match f {
            FastPathArg::Auto => FastPath::Auto,
            FastPathArg::Off => FastPath::Off,
        }
    }
}

#[derive(ValueEnum, Clone, Copy, Debug, PartialEq, Eq)]
pub enum Distribution {
    Uniform,
    /// Coordinates drawn from a grid of eight values, so ties are common.
    Duplicates,
}

#[derive(Args, Debug, Clone)]
pub struct EngineArgs {
    #[arg(long, value_enum, default_value_t = MonoidArg::Count)]
    pub monoid: MonoidArg,

    #[arg(long, value_enum, default_value_t = VariantArg::Basic)]
    pub variant: VariantArg,

    #[arg(long, value_enum, default_value_t = BackendArg::Seq)]
    pub backend: BackendArg,

    /// Worker threads for the parallel backend (0 = all cores)
    #[arg(long, default_value_t = 0)]
    pub threads: usize,

    #[arg(long = "fast-path", value_enum, default_value_t = FastPathArg::Auto)]
    pub fast_path: FastPathArg,
}

impl EngineArgs {
    pub fn backend(&self) -> Backend {
        match self.backend {
            BackendArg::Seq => Backend::Sequential,
            BackendArg::Par => Backend::Parallel {
                threads: self.threads,
            },
        }
    }
}

#[derive(Args, Debug)]
pub struct InputArgs {
    /// Data file: `id,x1,...,xm[,weight]` with a header row
    pub data: PathBuf,

    /// Query file: `id,x1,...,xm` with a header row
    pub queries: PathBuf,

    /// Number of coordinates; inferred from the headers when omitted
    #[arg(long)]
    pub dim: Option<usize>,
}

#[derive(Args, Debug)]
pub struct RunArgs {
    #[command(flatten)]
    pub input: InputArgs,

    #[command(flatten)]
    pub engine: EngineArgs,

    /// Write results here instead of stdout
    #[arg(long)]
    pub output: Option<PathBuf>,

    /// Write a JSON run report
    #[arg(long)]
    pub stats: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct VerifyArgs {
    #[command(flatten)]
    pub input: InputArgs,

    #[command(flatten)]
    pub engine: EngineArgs,

    /// Also compare against a previously written `id,value` file
    #[arg(long)]
    pub expected: Option<PathBuf>,

    #[arg(long)]
    pub stats: Option<PathBuf>,
}

#[derive(Args, Debug)]
pub struct GenArgs {
    /// Number of data points
    #[arg(long = "points", short = 'n')]
    pub points: usize,

    /// Number of query points
    #[arg(long, short = 'q')]
    pub queries: usize,

    #[arg(long, short = 'm')]
    pub dim: usize,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, value_enum, default_value_t = Distribution::Uniform)]
    pub distribution: Distribution,

    /// Where to write the data file
    pub data_out: PathBuf,

    /// Where to write the query file
    pub queries_out: PathBuf,
}

#[derive(Args, Debug)]
pub struct BenchArgs {
    #[command(flatten)]
    pub engine: EngineArgs,

    #[arg(long, short = 'm', default_value_t = 2)]
    pub dim: usize,

    /// Smallest total point count; half data, half queries
    #[arg(long, default_value_t = 1024)]
    pub start: usize,

    /// Number of doublings
    #[arg(long, default_value_t = 5)]
    pub steps: u32,

    #[arg(long, default_value_t = 0)]
    pub seed: u64,

    #[arg(long, value_enum, default_value_t = Distribution::Uniform)]
    pub distribution: Distribution,
}
