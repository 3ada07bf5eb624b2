use std::path::PathBuf;

use clap::{Args, Parser, Subcommand, ValueEnum};

#[derive(Debug, Parser)]
#[command(name = "censim", version, about = "Censored survival data: simulate, calibrate, fit, study")]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Generate a (possibly censored) sample as CSV.
    Sample(SampleArgs),
    /// Compute a censoring time or window for a target censored proportion.
    Calibrate(CalibrateArgs),
    /// Fit a model to a CSV sample and print the result as JSON.
    Fit(FitArgs),
    /// Run a Monte Carlo study and write `<prefix>.csv` and `<prefix>.json`.
    Mc(McArgs),
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Dist {
    Weibull,
    Mixture,
    Plc,
    Cure,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum Censoring {
    None,
    Type1,
    Type2,
    Random,
}

#[derive(Debug, Args)]
pub struct WeibullFlags {
    #[arg(long)]
    pub alpha: Option<f64>,
    #[arg(long)]
    pub beta: Option<f64>,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct SampleArgs {
    #[arg(long, value_enum)]
    pub dist: Dist,
    #[command(flatten)]
    pub weibull: WeibullFlags,
    /// Second mixture component shape.
    #[arg(long)]
    pub alpha2: Option<f64>,
    /// Second mixture component scale.
    #[arg(long)]
    pub beta2: Option<f64>,
    /// Weight of the first mixture component.
    #[arg(long)]
    pub p1: Option<f64>,
    /// Lower bound of the PLC support.
    #[arg(long)]
    pub xmin: Option<f64>,
    /// Cured fraction.
    #[arg(long = "cure-p")]
    pub cure_p: Option<f64>,
    #[arg(long)]
    pub n: usize,
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long, value_enum, default_value = "none")]
    pub censoring: Censoring,
    /// Type-I censoring time.
    #[arg(long)]
    pub tc: Option<f64>,
    /// Number of type-II censored units.
    #[arg(long)]
    pub m: Option<usize>,
    /// Upper end of the uniform censoring window.
    #[arg(long)]
    pub lambda: Option<f64>,
    /// Target censored proportion, used instead of --tc / --m / --lambda.
    #[arg(long)]
    pub pi: Option<f64>,
    /// With --pi and random censoring, use the closed-form window instead
    /// of the exact one.
    #[arg(long)]
    pub analytic_lambda: bool,
    #[arg(long, default_value_t = 1000)]
    pub burnin: usize,
    #[arg(long, default_value_t = 50)]
    pub thin: usize,
    #[arg(long = "proposal-sd", default_value_t = 0.5)]
    pub proposal_sd: f64,
    /// Output file (default: stdout).
    #[arg(long)]
    pub out: Option<PathBuf>,
    /// Cure only: also write latent lifetimes, cure flags and censoring times.
    #[arg(long = "latent-out")]
    pub latent_out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum CalibrateScheme {
    Type1,
    Random,
    RandomExact,
    CureGrid,
    CureExact,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct CalibrateArgs {
    #[arg(long, value_enum)]
    pub scheme: CalibrateScheme,
    #[arg(long)]
    pub pi: f64,
    #[command(flatten)]
    pub weibull: WeibullFlags,
    #[arg(long = "cure-p")]
    pub cure_p: Option<f64>,
    /// Grid step.
    #[arg(long, default_value_t = 0.01)]
    pub epsilon: f64,
    /// Draws per grid step and for the pilot sample.
    #[arg(long = "grid-n", default_value_t = 10_000)]
    pub grid_n: usize,
    /// Grid starting value (default: minimum of a pilot sample).
    #[arg(long)]
    pub lambda0: Option<f64>,
    #[arg(long = "max-steps", default_value_t = 1_000_000)]
    pub max_steps: usize,
    #[arg(long)]
    pub seed: Option<u64>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum FitScheme {
    Type1,
    Type2,
    Random,
    Cure,
    Plc,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct FitArgs {
    #[arg(long, value_enum)]
    pub scheme: FitScheme,
    #[arg(long = "in")]
    pub input: PathBuf,
    #[arg(long)]
    pub tc: Option<f64>,
    #[arg(long)]
    pub xmin: Option<f64>,
    /// Starting values `a,b` or `a,b,p`.
    #[arg(long, value_delimiter = ',')]
    pub init: Option<Vec<f64>>,
    /// Confidence level of the reported intervals.
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    #[arg(long)]
    pub out: Option<PathBuf>,
}

#[derive(Debug, Clone, Copy, PartialEq, Eq, ValueEnum)]
pub enum McScheme {
    Type1,
    Type2,
    Random,
    Cure,
}

#[derive(Debug, Args)]
#[command(allow_negative_numbers = true)]
pub struct McArgs {
    /// Study file (JSON). Inline flags are ignored when given.
    #[arg(long)]
    pub config: Option<PathBuf>,
    /// Inline study: schemes to run.
    #[arg(long, value_enum, value_delimiter = ',')]
    pub scheme: Vec<McScheme>,
    /// Inline study: target censored proportion.
    #[arg(long)]
    pub pi: Option<f64>,
    #[command(flatten)]
    pub weibull: WeibullFlags,
    #[arg(long = "cure-p")]
    pub cure_p: Option<f64>,
    #[arg(long)]
    pub lambda: Option<f64>,
    #[arg(long = "n-grid", value_delimiter = ',')]
    pub n_grid: Vec<usize>,
    #[arg(long, default_value_t = 2000)]
    pub replications: usize,
    #[arg(long, default_value_t = 0.95)]
    pub level: f64,
    /// Share one complete sample across type1, type2 and random.
    #[arg(long)]
    pub shared: bool,
    #[arg(long)]
    pub analytic_lambda: bool,
    /// Overrides the study file's master seed.
    #[arg(long)]
    pub seed: Option<u64>,
    #[arg(long = "out-prefix")]
    pub out_prefix: PathBuf,
    #[arg(long, env = "CENSIM_THREADS")]
    pub threads: Option<usize>,
    /// Replace maximum likelihood by a fitter that returns the truth.
    #[arg(long = "oracle-fitter", hide = true)]
    pub oracle_fitter: bool,
}
