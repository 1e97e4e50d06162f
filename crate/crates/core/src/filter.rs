//! Bootstrap particle filter.
//!
//! Particles are propagated through the model transition and weighted by the
//! measurement density; the log-likelihood accumulates the log of the mean
//! unnormalized weight at each step. Filtering summaries (means and quartiles
//! of the latent quantities) are computed from the weighted cloud *before*
//! resampling. Systematic resampling runs at every step by default, or only
//! when the effective sample size falls below a threshold.
//!
//! All randomness is drawn from counter-keyed streams, so results are
//! bit-identical for a given seed regardless of how many worker threads
//! execute the particle loops.

use rayon::prelude::*;

use crate::data::ReturnSeries;
use crate::error::{Error, Result};
use crate::model::{
    self, obs_logdensity, shock_recovery, FixedLevParams, LatentState, RwLevParams, Variant,
};
use crate::params::ParamVector;
use crate::rng::{StreamKind, StreamRng};
use crate::transform::saturating_tanh;

/// Per-step shock streams handed to a model transition; `vol` and `leverage`
/// are independent sub-streams of the same root seed.
pub struct StepRngs {
    pub vol: StreamRng,
    pub leverage: StreamRng,
}

impl StepRngs {
    pub fn new(seed: u64, t: u64, particle: u64) -> Self {
        StepRngs {
            vol: StreamRng::new(seed, StreamKind::VolShock, t, particle),
            leverage: StreamRng::new(seed, StreamKind::LeverageShock, t, particle),
        }
    }
}

/// Filtered per-particle quantities reported in summaries.
#[derive(Debug, Clone, Copy)]
pub struct ParticleStats {
    /// Log-volatility factor (or the latent level for harness models).
    pub h: f64,
    /// Leverage correlation in effect.
    pub rho: f64,
    /// Recovered return shock.
    pub eps: f64,
}

/// A state-space model the bootstrap filter can run on.
pub trait StateSpace: Sync {
    type State: Clone + Send + Sync;

    /// Draw an initial state.
    fn init(&self, rng: &mut StreamRng) -> Self::State;

    /// Propagate one particle from t-1 to t given the previous observation.
    fn step(&self, prev: &Self::State, y_prev: f64, rngs: &mut StepRngs) -> Result<Self::State>;

    /// Log measurement density of `y` given the state.
    fn log_obs(&self, y: f64, state: &Self::State) -> f64;

    /// Summary quantities for the filtered cloud.
    fn stats(&self, y: f64, state: &Self::State) -> ParticleStats;
}

/// Fixed-leverage stochastic-volatility model.
#[derive(Debug, Clone)]
pub struct FixedSv {
    pub params: FixedLevParams,
}

impl StateSpace for FixedSv {
    type State = LatentState;

    fn init(&self, rng: &mut StreamRng) -> LatentState {
        model::init_state_fixed(&self.params, rng)
    }

    fn step(&self, prev: &LatentState, y_prev: f64, rngs: &mut StepRngs) -> Result<LatentState> {
        model::step_fixed(prev.h, y_prev, &self.params, &mut rngs.vol).map(LatentState::fixed)
    }

    fn log_obs(&self, y: f64, state: &LatentState) -> f64 {
        obs_logdensity(y, state.h)
    }

    fn stats(&self, y: f64, state: &LatentState) -> ParticleStats {
        ParticleStats {
            h: state.h,
            rho: self.params.rho,
            eps: shock_recovery(y, state.h),
        }
    }
}

/// Random-walk leverage stochastic-volatility model.
#[derive(Debug, Clone)]
pub struct RwSv {
    pub params: RwLevParams,
}

impl StateSpace for RwSv {
    type State = LatentState;

    fn init(&self, rng: &mut StreamRng) -> LatentState {
        model::init_state_rw(&self.params, rng)
    }

    fn step(&self, prev: &LatentState, y_prev: f64, rngs: &mut StepRngs) -> Result<LatentState> {
        model::step_rw(
            prev,
            y_prev,
            &self.params,
            &mut rngs.leverage,
            &mut rngs.vol,
        )
    }

    fn log_obs(&self, y: f64, state: &LatentState) -> f64 {
        obs_logdensity(y, state.h)
    }

    fn stats(&self, y: f64, state: &LatentState) -> ParticleStats {
        ParticleStats {
            h: state.h,
            rho: saturating_tanh(state.f.unwrap_or(0.0)),
            eps: shock_recovery(y, state.h),
        }
    }
}

/// When to resample.
#[derive(Debug, Clone, Copy, PartialEq)]
pub enum ResamplePolicy {
    /// After every observation (plain bootstrap filter).
    EveryStep,
    /// Only when ESS drops below `fraction * J`.
    EssThreshold(f64),
}

/// Filter configuration.
#[derive(Debug, Clone)]
pub struct FilterOptions {
    pub resample: ResamplePolicy,
    /// Worker threads for the particle loops; 1 runs fully serial.
    pub workers: usize,
}

impl Default for FilterOptions {
    fn default() -> Self {
        FilterOptions {
            resample: ResamplePolicy::EveryStep,
            workers: 1,
        }
    }
}

impl FilterOptions {
    pub fn with_workers(workers: usize) -> Self {
        FilterOptions {
            workers,
            ..FilterOptions::default()
        }
    }

    fn validate(&self) -> Result<()> {
        if let ResamplePolicy::EssThreshold(f) = self.resample {
            if !(f.is_finite() && f > 0.0 && f <= 1.0) {
                return Err(Error::domain(format!(
                    "ESS resampling threshold must be in (0,1], got {f}"
                )));
            }
        }
        Ok(())
    }
}

/// Per-time filtering summaries, computed before resampling.
#[derive(Debug, Clone, PartialEq)]
pub struct PerTimeSummary {
    /// 1-based observation index.
    pub t: usize,
    pub loglik_increment: f64,
    pub ess: f64,
    pub h_mean: f64,
    pub rho_mean: f64,
    pub rho_q1: f64,
    pub rho_q3: f64,
    pub eps_mean: f64,
}

/// Output of one filtering run.
#[derive(Debug, Clone, PartialEq)]
pub struct FilterResult {
    pub loglik: f64,
    pub per_time: Vec<PerTimeSummary>,
    pub seed: u64,
}

/// The working set of a filter pass. Per-particle parameters are populated
/// only under iterated filtering, where parameters ride along as extra state.
#[derive(Debug, Clone)]
pub struct ParticleCloud {
    pub states: Vec<LatentState>,
    pub log_weights: Vec<f64>,
    /// Estimation-scale parameter rows, one per particle (iterated filtering only).
    pub params: Option<Vec<Vec<f64>>>,
}

impl ParticleCloud {
    pub fn len(&self) -> usize {
        self.states.len()
    }

    pub fn is_empty(&self) -> bool {
        self.states.is_empty()
    }
}

/// Normalize log-weights and return the log-likelihood increment
/// `log-mean-exp(log_weights)`, computed with max-subtraction.
pub fn normalize_and_increment(log_weights: &[f64]) -> Result<(Vec<f64>, f64)> {
    if log_weights.is_empty() {
        return Err(Error::domain("normalize_and_increment on empty weights"));
    }
    let mut max = f64::NEG_INFINITY;
    for &lw in log_weights {
        if lw.is_nan() {
            return Err(Error::domain("NaN log-weight"));
        }
        if lw > max {
            max = lw;
        }
    }
    if max == f64::NEG_INFINITY {
        return Err(Error::WeightsVanished);
    }
    let mut weights: Vec<f64> = log_weights.iter().map(|&lw| (lw - max).exp()).collect();
    let sum: f64 = weights.iter().sum();
    for w in &mut weights {
        *w /= sum;
    }
    let increment = max + (sum / log_weights.len() as f64).ln();
    Ok((weights, increment))
}

/// Systematic resampling: one ancestor index per particle, with offspring
/// counts within one of the expected `J * w_j`.
pub fn systematic_resample(weights: &[f64], rng: &mut StreamRng) -> Result<Vec<usize>> {
    systematic_resample_n(weights, weights.len(), rng)
}

/// Systematic resampling drawing `n` ancestors; offspring counts stay within
/// one of `n * w_j`.
pub fn systematic_resample_n(weights: &[f64], n: usize, rng: &mut StreamRng) -> Result<Vec<usize>> {
    if weights.is_empty() || n == 0 {
        return Err(Error::domain("systematic_resample on empty input"));
    }
    let mut sum = 0.0;
    for &w in weights {
        if !(w.is_finite() && w >= 0.0) {
            return Err(Error::domain(format!("invalid weight {w}")));
        }
        sum += w;
    }
    if (sum - 1.0).abs() > 1e-9 {
        return Err(Error::domain(format!(
            "weights must sum to 1 within 1e-9, got {sum}"
        )));
    }
    let offset = rng.uniform();
    let step = 1.0 / n as f64;
    let mut indices = Vec::with_capacity(n);
    let mut i = 0usize;
    let mut cum = weights[0];
    for k in 0..n {
        let pos = (offset + k as f64) * step;
        while cum < pos && i + 1 < weights.len() {
            i += 1;
            cum += weights[i];
        }
        indices.push(i);
    }
    Ok(indices)
}

/// Effective sample size `1 / sum(w^2)` of normalized weights.
pub fn effective_sample_size(weights: &[f64]) -> f64 {
    let s: f64 = weights.iter().map(|w| w * w).sum();
    1.0 / s
}

/// Inverse of the weighted empirical CDF: the smallest value whose cumulative
/// weight reaches `q`, values taken in ascending order.
pub fn weighted_quantile(values: &[f64], weights: &[f64], q: f64) -> Result<f64> {
    if values.is_empty() {
        return Err(Error::domain("weighted_quantile on empty input"));
    }
    if values.len() != weights.len() {
        return Err(Error::domain("weighted_quantile: length mismatch"));
    }
    if !(0.0..=1.0).contains(&q) {
        return Err(Error::domain(format!(
            "quantile level must be in [0,1], got {q}"
        )));
    }
    let mut order: Vec<usize> = (0..values.len()).collect();
    order.sort_unstable_by(|&a, &b| {
        values[a]
            .partial_cmp(&values[b])
            .unwrap_or(std::cmp::Ordering::Equal)
    });
    let mut cum = 0.0;
    for &i in &order {
        cum += weights[i];
        if cum >= q {
            return Ok(values[i]);
        }
    }
    Ok(values[*order.last().expect("nonempty")])
}

/// Weighted mean with normalized weights.
pub fn weighted_mean(values: &[f64], weights: &[f64]) -> f64 {
    values.iter().zip(weights).map(|(v, w)| v * w).sum()
}

/// Run a closure inside a rayon pool of `workers` threads (1 = fully serial).
pub(crate) fn with_workers<R: Send>(workers: usize, f: impl FnOnce() -> R + Send) -> R {
    if workers == 1 {
        f()
    } else {
        let threads = if workers == 0 { 0 } else { workers };
        match rayon::ThreadPoolBuilder::new().num_threads(threads).build() {
            Ok(pool) => pool.install(f),
            Err(_) => f(),
        }
    }
}

enum Detail {
    Full,
    LoglikOnly,
}

/// Bootstrap filter over the raw observation slice for any [`StateSpace`].
pub fn run_filter_model<M: StateSpace>(
    model: &M,
    ys: &[f64],
    particles: usize,
    seed: u64,
    options: &FilterOptions,
) -> Result<FilterResult> {
    options.validate()?;
    with_workers(options.workers, || {
        engine(
            model,
            ys,
            particles,
            seed,
            options,
            Detail::Full,
            options.workers == 1,
        )
    })
}

/// Log-likelihood-only filter run (no per-time summaries).
pub fn filter_loglik<M: StateSpace>(
    model: &M,
    ys: &[f64],
    particles: usize,
    seed: u64,
    options: &FilterOptions,
) -> Result<f64> {
    options.validate()?;
    with_workers(options.workers, || {
        engine(
            model,
            ys,
            particles,
            seed,
            options,
            Detail::LoglikOnly,
            options.workers == 1,
        )
    })
    .map(|r| r.loglik)
}

/// Bootstrap filter for one of the stochastic-volatility variants.
pub fn run_filter(
    variant: Variant,
    params: &ParamVector,
    data: &ReturnSeries,
    particles: usize,
    seed: u64,
    options: &FilterOptions,
) -> Result<FilterResult> {
    match variant {
        Variant::Fixed => {
            let model = FixedSv {
                params: params.as_fixed()?,
            };
            run_filter_model(&model, data.values(), particles, seed, options)
        }
        Variant::RandomWalk => {
            let model = RwSv {
                params: params.as_rw()?,
            };
            run_filter_model(&model, data.values(), particles, seed, options)
        }
    }
}

fn engine<M: StateSpace>(
    model: &M,
    ys: &[f64],
    particles: usize,
    seed: u64,
    options: &FilterOptions,
    detail: Detail,
    serial: bool,
) -> Result<FilterResult> {
    if particles < 2 {
        return Err(Error::domain(format!(
            "particle count must be at least 2, got {particles}"
        )));
    }
    if ys.is_empty() {
        return Err(Error::EmptySeries("filter requires observations".into()));
    }

    // carry[j] = ln(J * normalized weight of particle j) from the last
    // non-resampled step; zero right after resampling.
    let mut carry = vec![0.0f64; particles];
    let mut log_weights = vec![0.0f64; particles];
    let mut states: Vec<Option<M::State>> = vec![None; particles];
    let mut loglik = 0.0;
    let mut per_time = Vec::new();
    let want_summaries = matches!(detail, Detail::Full);
    let mut stats_buf: Vec<ParticleStats> = Vec::new();

    for (idx, &y) in ys.iter().enumerate() {
        let t = idx + 1;
        // fused propagate (or initialize) + weigh, one parallel region
        let advance = |j: usize, slot: &mut Option<M::State>, lw: &mut f64| -> Result<()> {
            let state = if idx == 0 {
                let mut rng = StreamRng::new(seed, StreamKind::InitState, 0, j as u64);
                model.init(&mut rng)
            } else {
                let mut rngs = StepRngs::new(seed, idx as u64, j as u64);
                let prev = slot.as_ref().expect("state populated after t=1");
                model.step(prev, ys[idx - 1], &mut rngs)?
            };
            *lw = model.log_obs(y, &state);
            *slot = Some(state);
            Ok(())
        };
        let outcome: Result<()> = if serial {
            states
                .iter_mut()
                .zip(log_weights.iter_mut())
                .enumerate()
                .try_for_each(|(j, (slot, lw))| advance(j, slot, lw))
        } else {
            states
                .par_iter_mut()
                .zip(log_weights.par_iter_mut())
                .enumerate()
                .with_min_len(64)
                .try_for_each(|(j, (slot, lw))| advance(j, slot, lw))
        };
        outcome.map_err(|e| {
            if e.is_runtime() {
                e
            } else {
                Error::Propagation {
                    t,
                    reason: e.to_string(),
                }
            }
        })?;
        for (lw, c) in log_weights.iter_mut().zip(&carry) {
            *lw += c;
        }

        let (weights, increment) = normalize_and_increment(&log_weights).map_err(|e| match e {
            Error::WeightsVanished => Error::FilterFailure { t },
            other => other,
        })?;
        loglik += increment;
        let ess = effective_sample_size(&weights);

        if want_summaries {
            stats_buf.clear();
            stats_buf.extend(
                states
                    .iter()
                    .map(|s| model.stats(y, s.as_ref().expect("state populated"))),
            );
            let h: Vec<f64> = stats_buf.iter().map(|s| s.h).collect();
            let rho: Vec<f64> = stats_buf.iter().map(|s| s.rho).collect();
            let eps: Vec<f64> = stats_buf.iter().map(|s| s.eps).collect();
            per_time.push(PerTimeSummary {
                t,
                loglik_increment: increment,
                ess,
                h_mean: weighted_mean(&h, &weights),
                rho_mean: weighted_mean(&rho, &weights),
                rho_q1: weighted_quantile(&rho, &weights, 0.25)?,
                rho_q3: weighted_quantile(&rho, &weights, 0.75)?,
                eps_mean: weighted_mean(&eps, &weights),
            });
        }

        let do_resample = match options.resample {
            ResamplePolicy::EveryStep => true,
            ResamplePolicy::EssThreshold(frac) => ess < frac * particles as f64,
        };
        if do_resample {
            let mut rng = StreamRng::new(seed, StreamKind::Resample, idx as u64, 0);
            let ancestors = systematic_resample(&weights, &mut rng)?;
            states = ancestors.iter().map(|&a| states[a].clone()).collect();
            carry.iter_mut().for_each(|c| *c = 0.0);
        } else {
            let ln_j = (particles as f64).ln();
            for (c, &w) in carry.iter_mut().zip(&weights) {
                *c = ln_j + w.ln();
            }
        }
    }

    Ok(FilterResult {
        loglik,
        per_time,
        seed,
    })
}
