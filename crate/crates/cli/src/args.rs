use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

use crate::config::Format;

#[derive(Debug, Parser)]
#[command(
    name = "semicircle-lab",
    version,
    about = "Seeded Monte-Carlo experiments on spectra of random symmetric matrices"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
    #[command(flatten)]
    pub global: GlobalArgs,
}

#[derive(Debug, Args)]
pub struct GlobalArgs {
    /// JSON run configuration. Command-line flags take precedence over it.
    #[arg(long, global = true, value_name = "FILE")]
    pub config: Option<PathBuf>,
    /// Output format [default: json]
    #[arg(long, global = true, value_enum)]
    pub format: Option<Format>,
    /// Write the report here instead of stdout.
    #[arg(long, global = true, value_name = "FILE")]
    pub out: Option<PathBuf>,
    /// Worker threads for the seed fan-out [default: available parallelism]
    #[arg(long, global = true, env = "SEMICIRCLE_LAB_THREADS")]
    pub threads: Option<usize>,
    /// Exit with status 4 if the command's threshold is violated.
    #[arg(long, global = true)]
    pub assert: bool,
    /// Threshold checked by --assert (each command has its own default).
    #[arg(long, global = true, requires = "assert")]
    pub threshold: Option<f64>,
    /// Omit the timestamp so reruns are byte-identical.
    #[arg(long, global = true)]
    pub reproducible: bool,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Averaged ESD, eigenvalue histogram with density overlay, and distances.
    Simulate(RunArgs),
    /// Averaged ESD on the grid.
    Esd(RunArgs),
    /// Kolmogorov and Levy distances to the semicircle law.
    Distance(RunArgs),
    /// Empirical trace moments against Catalan numbers.
    Moments {
        #[command(flatten)]
        run: RunArgs,
        /// Largest moment order.
        #[arg(long, default_value_t = 6)]
        max_k: u32,
    },
    /// Canonical graphs of a trace moment with categories and contributions.
    Graphs {
        #[command(flatten)]
        run: RunArgs,
        /// Walk length.
        #[arg(long)]
        k: Option<usize>,
    },
    /// Stieltjes transform along the interpolation path between two ensembles.
    Interpolate {
        #[command(flatten)]
        run: RunArgs,
        /// Kind of the second ensemble [default: gaussian]
        #[arg(long, value_enum)]
        kind_y: Option<KindArg>,
        /// Number of equispaced angles on [0, pi/2], endpoints included.
        #[arg(long, default_value_t = 5)]
        phi_points: usize,
        /// Real parts of the evaluation points.
        #[arg(long, value_delimiter = ',', allow_hyphen_values = true, default_values_t = [-2.0, -1.0, 0.0, 1.0, 2.0])]
        z_re: Vec<f64>,
        /// Imaginary part shared by all evaluation points.
        #[arg(long, default_value_t = 1.0)]
        z_im: f64,
    },
    /// Block-profile ensemble that violates the row-variance condition.
    Counterexample(RunArgs),
    /// Variance-profile conditions and Lindeberg estimate.
    Check(RunArgs),
}

#[derive(Debug, Clone, Default, Args)]
pub struct RunArgs {
    #[arg(long, value_enum)]
    pub kind: Option<KindArg>,
    /// Matrix dimension.
    #[arg(long)]
    pub n: Option<usize>,
    /// Number of seeds, counted up from the ensemble's base seed.
    #[arg(long, conflicts_with = "seed_list")]
    pub seeds: Option<usize>,
    /// Explicit comma-separated seeds.
    #[arg(long, value_delimiter = ',')]
    pub seed_list: Option<Vec<u64>>,
    #[arg(long, value_enum)]
    pub profile: Option<ProfileArg>,
    /// Smooth-profile amplitude, in [0, 1).
    #[arg(long)]
    pub alpha: Option<f64>,
    /// Coupling strength of the dependent ensemble.
    #[arg(long)]
    pub delta: Option<f64>,
    /// Truncation level [default: n^(-1/8)]
    #[arg(long)]
    pub tau: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub grid_min: Option<f64>,
    #[arg(long, allow_hyphen_values = true)]
    pub grid_max: Option<f64>,
    #[arg(long)]
    pub grid_points: Option<usize>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum KindArg {
    Gaussian,
    Rademacher,
    Dependent,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum ProfileArg {
    Constant,
    Smooth,
    Block,
    Zero,
}

impl Command {
    pub fn name(&self) -> &'static str {
        match self {
            Command::Simulate(_) => "simulate",
            Command::Esd(_) => "esd",
            Command::Distance(_) => "distance",
            Command::Moments { .. } => "moments",
            Command::Graphs { .. } => "graphs",
            Command::Interpolate { .. } => "interpolate",
            Command::Counterexample(_) => "counterexample",
            Command::Check(_) => "check",
        }
    }
}
