//! Command-line definitions.

use clap::{Args, Parser, Subcommand};
use std::path::PathBuf;

#[derive(Debug, Parser)]
#[command(
    name = "svol",
    version,
    about = "Stochastic volatility with fixed or random-walk leverage: simulate, filter, fit, and diagnose"
)]
pub struct Cli {
    #[command(subcommand)]
    pub command: Command,
}

#[derive(Debug, Subcommand)]
pub enum Command {
    /// Simulate returns and latent paths from either model
    Simulate(SimulateArgs),
    /// Run the bootstrap particle filter and write per-time summaries
    Filter(FilterArgs),
    /// Maximum-likelihood fit by iterated filtering
    Fit(FitArgs),
    /// Replicate-averaged log-likelihood with Monte Carlo standard error
    Eval(EvalArgs),
    /// Sliced likelihood along one parameter with local quadratic smoothing
    Slice(SliceArgs),
    /// Parameter standard errors from a numerical Hessian
    Hessian(HessianArgs),
}

#[derive(Debug, Args)]
pub struct CommonArgs {
    /// Model variant: `fixed` or `rw`
    #[arg(long, default_value = "fixed")]
    pub model: String,
    /// Output directory (created if missing)
    #[arg(long)]
    pub out: PathBuf,
    /// Root random seed
    #[arg(long, default_value_t = 0)]
    pub seed: u64,
    /// Worker threads for particle loops (1 = fully serial)
    #[arg(long, default_value_t = 1)]
    pub workers: usize,
}

/// Model-parameter overrides. Unset values fall back to built-in reference
/// estimates for daily percent log-returns.
#[derive(Debug, Args)]
pub struct ParamArgs {
    /// Marginal mean of the log-volatility factor
    #[arg(long)]
    pub mu_h: Option<f64>,
    /// Volatility persistence, in (0,1)
    #[arg(long)]
    pub phi: Option<f64>,
    /// Marginal sd of the log-volatility factor, > 0
    #[arg(long)]
    pub sigma_eta: Option<f64>,
    /// Leverage correlation, in (-1,1) (fixed model)
    #[arg(long)]
    pub rho: Option<f64>,
    /// Leverage-factor random-walk sd, > 0 (random-walk model)
    #[arg(long)]
    pub sigma_nu: Option<f64>,
    /// Initial leverage factor (random-walk model)
    #[arg(long)]
    pub f0: Option<f64>,
}

#[derive(Debug, Args)]
pub struct DataArgs {
    /// Input CSV with a date column and a value column
    #[arg(long)]
    pub data: PathBuf,
    /// Name of the date column
    #[arg(long, default_value = "date")]
    pub date_col: String,
    /// Name of the value column
    #[arg(long, default_value = "return")]
    pub value_col: String,
    /// Treat the value column as price levels and convert to scaled log returns
    #[arg(long, default_value_t = false)]
    pub prices: bool,
    /// Scale applied to log returns when converting from prices
    #[arg(long, default_value_t = 100.0)]
    pub scale: f64,
    /// Subtract the sample mean after loading
    #[arg(long, default_value_t = false)]
    pub demean: bool,
    /// Fail unless the series has exactly this many observations
    #[arg(long)]
    pub expect_n: Option<usize>,
}

#[derive(Debug, Args)]
pub struct SimulateArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    /// Number of observations to simulate
    #[arg(long = "T")]
    pub t_len: usize,
}

#[derive(Debug, Args)]
pub struct FilterArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub data: DataArgs,
    /// Particle count
    #[arg(long, default_value_t = 5_000)]
    pub particles: usize,
    /// Resample only when ESS falls below this fraction of the particle
    /// count (default: resample at every step)
    #[arg(long)]
    pub resample_threshold: Option<f64>,
    /// Also write simple SVG charts
    #[arg(long, default_value_t = false)]
    pub svg: bool,
}

#[derive(Debug, Args)]
pub struct FitArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub data: DataArgs,
    /// Iterated-filtering iterations
    #[arg(long, default_value_t = 150)]
    pub iterations: usize,
    /// Geometric cooling factor of the perturbations, in (0,1]
    #[arg(long, default_value_t = 0.978)]
    pub alpha: f64,
    /// Particle count per filtering pass
    #[arg(long, default_value_t = 8_000)]
    pub particles: usize,
    /// Perturbation sd (estimation scale) for regular parameters
    #[arg(long, default_value_t = 0.02)]
    pub init_sd: f64,
    /// Perturbation sd for initial-value parameters (f0)
    #[arg(long, default_value_t = 0.1)]
    pub ivp_sd: f64,
    /// Observation index (1-based) whose filtered mean updates IVPs
    #[arg(long, default_value_t = 20)]
    pub ivp_time: usize,
    /// Also write simple SVG charts
    #[arg(long, default_value_t = false)]
    pub svg: bool,
}

#[derive(Debug, Args)]
pub struct EvalArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub data: DataArgs,
    /// Particle count per replicate
    #[arg(long, default_value_t = 70_000)]
    pub particles: usize,
    /// Independent filter replicates
    #[arg(long, default_value_t = 2)]
    pub replicates: usize,
}

#[derive(Debug, Args)]
pub struct SliceArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub data: DataArgs,
    /// Parameter to slice along
    #[arg(long)]
    pub param: String,
    #[arg(long)]
    pub grid_min: f64,
    #[arg(long)]
    pub grid_max: f64,
    /// Number of grid points
    #[arg(long, default_value_t = 11)]
    pub points: usize,
    /// Particle count per evaluation
    #[arg(long, default_value_t = 70_000)]
    pub particles: usize,
    /// Replicates per grid point
    #[arg(long, default_value_t = 2)]
    pub replicates: usize,
    /// Smoothing bandwidth on the parameter axis (default 0.3 x grid span)
    #[arg(long)]
    pub bandwidth: Option<f64>,
    /// Also write simple SVG charts
    #[arg(long, default_value_t = false)]
    pub svg: bool,
}

#[derive(Debug, Args)]
pub struct HessianArgs {
    #[command(flatten)]
    pub common: CommonArgs,
    #[command(flatten)]
    pub params: ParamArgs,
    #[command(flatten)]
    pub data: DataArgs,
    /// Particle count per evaluation
    #[arg(long, default_value_t = 8_000)]
    pub particles: usize,
    /// Replicates averaged at every stencil point (common random numbers)
    #[arg(long, default_value_t = 3)]
    pub replicates: usize,
    /// Central-difference step on the estimation scale
    #[arg(long, default_value_t = 0.05)]
    pub step: f64,
}
