//! Stochastic volatility with fixed and random-walk leverage.
//!
//! This crate simulates and estimates two discrete-time stochastic-volatility
//! models: one with a constant leverage correlation and one where the
//! Fisher-transformed leverage follows a random walk. Estimation is by
//! iterated filtering on top of a bootstrap particle filter; the inference
//! tools add replicated likelihood evaluation, numerical-Hessian standard
//! errors, sliced likelihoods, AIC, and an extra-parameters equivalence
//! measure for comparing the two models.
//!
//! Everything is deterministic given a seed: randomness comes from
//! counter-keyed streams, so results do not depend on the number of worker
//! threads.

pub mod data;
pub mod error;
pub mod filter;
pub mod inference;
pub mod mif;
pub mod model;
pub mod params;
pub mod rng;
pub mod special;
pub mod transform;

pub use data::{demean, load_returns, prices_to_returns, ColumnSpec, ReturnSeries};
pub use error::{Error, Result};
pub use filter::{
    effective_sample_size, normalize_and_increment, run_filter, systematic_resample,
    weighted_quantile, FilterOptions, FilterResult, ParticleCloud, ResamplePolicy,
};
pub use inference::{
    aic, equivalent_extra_params, evaluate_loglik, local_quadratic_smooth, numerical_se,
    slice_likelihood, LoglikEstimate, SeReport, SliceResult,
};
pub use mif::{cooling_factor, mif_update, perturb_params, run_mif, MifConfig, MifTrace};
pub use model::{
    beta_t, fisher_to_rho, obs_logdensity, rho_to_f, shock_recovery, sigma_omega, simulate,
    FixedLevParams, LatentState, RwLevParams, Simulation, Variant,
};
pub use params::{param_specs, ParamSpec, ParamVector};
