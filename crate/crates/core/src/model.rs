//! Discrete-time stochastic-volatility models with leverage.
//!
//! Two variants share the same measurement equation `y_t = exp(h_t/2) eps_t`
//! and the same autoregression for the log-volatility factor `h_t`:
//!
//! ```text
//! h_t = mu_h (1 - phi) + phi h_{t-1} + beta rho exp(-h_{t-1}/2) + sigma_omega omega_t
//! beta        = y_{t-1} sigma_eta sqrt(1 - phi^2)
//! sigma_omega = sigma_eta sqrt(1 - phi^2) sqrt(1 - rho^2)
//! ```
//!
//! The parameterization makes the marginal law of `h_t` be
//! `N(mu_h, sigma_eta^2)` regardless of `phi`. In the fixed variant the
//! leverage correlation `rho` is a constant parameter. In the random-walk
//! variant it is `rho_t = tanh(f_t)` for a latent random walk
//! `f_t = f_{t-1} + sigma_nu nu_t`, and `sigma_omega` is evaluated at the
//! current `rho_t`, which makes `sigma_nu = 0` collapse exactly onto the
//! fixed variant.

use std::fmt;
use std::str::FromStr;

use crate::data::ReturnSeries;
use crate::error::{Error, Result};
use crate::rng::{StreamKind, StreamRng};
use crate::transform::saturating_tanh;

/// ln(2 pi)
pub(crate) const LN_2PI: f64 = 1.837_877_066_409_345_3;

/// Guard band for the log-volatility factor: `exp(-h/2)` is only evaluated
/// for |h| <= H_GUARD, anything beyond signals a runaway state.
const H_GUARD: f64 = 700.0;

/// Which leverage specification to run.
#[derive(Debug, Clone, Copy, PartialEq, Eq)]
pub enum Variant {
    /// Constant leverage correlation.
    Fixed,
    /// Fisher-transformed leverage following a random walk.
    RandomWalk,
}

impl Variant {
    pub fn as_str(self) -> &'static str {
        match self {
            Variant::Fixed => "fixed",
            Variant::RandomWalk => "rw",
        }
    }
}

impl fmt::Display for Variant {
    fn fmt(&self, f: &mut fmt::Formatter<'_>) -> fmt::Result {
        f.write_str(self.as_str())
    }
}

impl FromStr for Variant {
    type Err = Error;

    fn from_str(s: &str) -> Result<Self> {
        match s {
            "fixed" => Ok(Variant::Fixed),
            "rw" | "random-walk" | "random_walk" => Ok(Variant::RandomWalk),
            other => Err(Error::domain(format!(
                "unknown model variant `{other}` (expected `fixed` or `rw`)"
            ))),
        }
    }
}

/// Parameters of the fixed-leverage model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct FixedLevParams {
    /// Marginal mean of the log-volatility factor.
    pub mu_h: f64,
    /// Volatility persistence, in (0, 1).
    pub phi: f64,
    /// Marginal standard deviation of the log-volatility factor, > 0.
    pub sigma_eta: f64,
    /// Leverage correlation, in (-1, 1).
    pub rho: f64,
}

impl FixedLevParams {
    pub fn new(mu_h: f64, phi: f64, sigma_eta: f64, rho: f64) -> Result<Self> {
        let p = FixedLevParams {
            mu_h,
            phi,
            sigma_eta,
            rho,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_common(self.mu_h, self.phi, self.sigma_eta)?;
        if !(self.rho.is_finite() && self.rho > -1.0 && self.rho < 1.0) {
            return Err(Error::domain(format!(
                "rho must be in (-1,1), got {}",
                self.rho
            )));
        }
        Ok(())
    }
}

/// Parameters of the random-walk leverage model.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct RwLevParams {
    pub mu_h: f64,
    pub phi: f64,
    pub sigma_eta: f64,
    /// Standard deviation of the leverage-factor random walk, > 0.
    pub sigma_nu: f64,
    /// Initial leverage factor (an initial-value parameter).
    pub f0: f64,
}

impl RwLevParams {
    pub fn new(mu_h: f64, phi: f64, sigma_eta: f64, sigma_nu: f64, f0: f64) -> Result<Self> {
        let p = RwLevParams {
            mu_h,
            phi,
            sigma_eta,
            sigma_nu,
            f0,
        };
        p.validate()?;
        Ok(p)
    }

    pub fn validate(&self) -> Result<()> {
        check_common(self.mu_h, self.phi, self.sigma_eta)?;
        if !(self.sigma_nu.is_finite() && self.sigma_nu > 0.0) {
            return Err(Error::domain(format!(
                "sigma_nu must be positive, got {}",
                self.sigma_nu
            )));
        }
        if !self.f0.is_finite() {
            return Err(Error::domain(format!("f0 must be finite, got {}", self.f0)));
        }
        Ok(())
    }
}

fn check_common(mu_h: f64, phi: f64, sigma_eta: f64) -> Result<()> {
    if !mu_h.is_finite() {
        return Err(Error::domain(format!("mu_h must be finite, got {mu_h}")));
    }
    if !(phi.is_finite() && phi > 0.0 && phi < 1.0) {
        return Err(Error::domain(format!("phi must be in (0,1), got {phi}")));
    }
    if !(sigma_eta.is_finite() && sigma_eta > 0.0) {
        return Err(Error::domain(format!(
            "sigma_eta must be positive, got {sigma_eta}"
        )));
    }
    Ok(())
}

/// Latent state at one time step. `f` is present only for the random-walk variant.
#[derive(Debug, Clone, Copy, PartialEq)]
pub struct LatentState {
    /// Log-volatility factor.
    pub h: f64,
    /// Leverage factor, `rho_t = tanh(f)`.
    pub f: Option<f64>,
}

impl LatentState {
    pub fn fixed(h: f64) -> Self {
        LatentState { h, f: None }
    }

    pub fn random_walk(h: f64, f: f64) -> Self {
        LatentState { h, f: Some(f) }
    }
}

/// Fisher transform of the leverage factor: `(e^{2f} - 1) / (e^{2f} + 1)`.
///
/// Saturates strictly inside (-1, 1) for large |f| instead of overflowing
/// or rounding onto the boundary.
pub fn fisher_to_rho(f: f64) -> Result<f64> {
    if !f.is_finite() {
        return Err(Error::domain(format!(
            "fisher_to_rho requires a finite input, got {f}"
        )));
    }
    Ok(saturating_tanh(f))
}

/// Inverse Fisher transform, `0.5 ln((1 + rho) / (1 - rho))`.
pub fn rho_to_f(rho: f64) -> Result<f64> {
    if !(rho.is_finite() && rho > -1.0 && rho < 1.0) {
        return Err(Error::domain(format!(
            "rho_to_f requires rho in (-1,1), got {rho}"
        )));
    }
    Ok(0.5 * ((1.0 + rho) / (1.0 - rho)).ln())
}

/// Innovation scale `sigma_eta sqrt(1 - phi^2) sqrt(1 - rho^2)`.
pub fn sigma_omega(sigma_eta: f64, phi: f64, rho: f64) -> Result<f64> {
    if !(sigma_eta.is_finite() && sigma_eta > 0.0) {
        return Err(Error::domain(format!(
            "sigma_omega requires sigma_eta > 0, got {sigma_eta}"
        )));
    }
    if !(phi.is_finite() && phi.abs() < 1.0) {
        return Err(Error::domain(format!(
            "sigma_omega requires |phi| < 1, got {phi}"
        )));
    }
    if !(rho.is_finite() && rho.abs() < 1.0) {
        return Err(Error::domain(format!(
            "sigma_omega requires |rho| < 1, got {rho}"
        )));
    }
    Ok(sigma_eta * (1.0 - phi * phi).sqrt() * (1.0 - rho * rho).sqrt())
}

/// Leverage loading `beta = y_{t-1} sigma_eta sqrt(1 - phi^2)`.
///
/// Observation-dependent, so it varies over time.
pub fn beta_t(y_prev: f64, sigma_eta: f64, phi: f64) -> Result<f64> {
    if !y_prev.is_finite() {
        return Err(Error::domain(format!(
            "beta_t requires finite y_prev, got {y_prev}"
        )));
    }
    if !(sigma_eta.is_finite() && sigma_eta > 0.0) {
        return Err(Error::domain(format!(
            "beta_t requires sigma_eta > 0, got {sigma_eta}"
        )));
    }
    if !(phi.is_finite() && phi.abs() < 1.0) {
        return Err(Error::domain(format!(
            "beta_t requires |phi| < 1, got {phi}"
        )));
    }
    Ok(y_prev * sigma_eta * (1.0 - phi * phi).sqrt())
}

fn guarded_exp_neg_half(h: f64) -> Result<f64> {
    if h.is_nan() || h.abs() > H_GUARD {
        return Err(Error::domain(format!(
            "log-volatility {h} outside the guard band |h| <= {H_GUARD}"
        )));
    }
    Ok((-0.5 * h).exp())
}

/// Fixed-model transition with the volatility shock supplied explicitly.
pub fn step_fixed_det(h_prev: f64, y_prev: f64, p: &FixedLevParams, omega: f64) -> Result<f64> {
    let decay = guarded_exp_neg_half(h_prev)?;
    let beta = beta_t(y_prev, p.sigma_eta, p.phi)?;
    let sw = sigma_omega(p.sigma_eta, p.phi, p.rho)?;
    let h = p.mu_h * (1.0 - p.phi) + p.phi * h_prev + beta * p.rho * decay + sw * omega;
    if h.is_finite() {
        Ok(h)
    } else {
        Err(Error::domain(format!(
            "transition produced non-finite h ({h}) from h_prev={h_prev}, y_prev={y_prev}"
        )))
    }
}

/// Fixed-model transition, drawing `omega ~ N(0,1)` from `rng`.
pub fn step_fixed(
    h_prev: f64,
    y_prev: f64,
    p: &FixedLevParams,
    rng: &mut StreamRng,
) -> Result<f64> {
    let omega = rng.normal();
    step_fixed_det(h_prev, y_prev, p, omega)
}

/// Random-walk-model transition with both shocks supplied explicitly.
///
/// The leverage factor moves first (`f_t = f_{t-1} + sigma_nu nu`), the
/// volatility factor then uses `rho_t = tanh(f_t)` both in the leverage term
/// and inside `sigma_omega`.
pub fn step_rw_det(
    prev: &LatentState,
    y_prev: f64,
    p: &RwLevParams,
    nu: f64,
    omega: f64,
) -> Result<LatentState> {
    let f_prev = prev.f.ok_or_else(|| {
        Error::domain("random-walk transition requires a state carrying a leverage factor")
    })?;
    let f = f_prev + p.sigma_nu * nu;
    if !f.is_finite() {
        return Err(Error::domain(format!(
            "leverage factor became non-finite ({f}) from f_prev={f_prev}"
        )));
    }
    let rho = saturating_tanh(f);
    let decay = guarded_exp_neg_half(prev.h)?;
    let beta = beta_t(y_prev, p.sigma_eta, p.phi)?;
    let sw = sigma_omega(p.sigma_eta, p.phi, rho)?;
    let h = p.mu_h * (1.0 - p.phi) + p.phi * prev.h + beta * rho * decay + sw * omega;
    if h.is_finite() {
        Ok(LatentState::random_walk(h, f))
    } else {
        Err(Error::domain(format!(
            "transition produced non-finite h ({h}) from h_prev={}, y_prev={y_prev}",
            prev.h
        )))
    }
}

/// Random-walk-model transition drawing `nu` and `omega` from separate streams.
///
/// Keeping the streams separate guarantees that leverage draws never shift
/// the volatility draws; with `sigma_nu = 0` the realized `h` path matches
/// the fixed model's under the same seed.
pub fn step_rw(
    prev: &LatentState,
    y_prev: f64,
    p: &RwLevParams,
    nu_rng: &mut StreamRng,
    omega_rng: &mut StreamRng,
) -> Result<LatentState> {
    let nu = nu_rng.normal();
    let omega = omega_rng.normal();
    step_rw_det(prev, y_prev, p, nu, omega)
}

/// Draw the initial fixed-model state from the marginal `N(mu_h, sigma_eta^2)`.
pub fn init_state_fixed(p: &FixedLevParams, rng: &mut StreamRng) -> LatentState {
    LatentState::fixed(p.mu_h + p.sigma_eta * rng.normal())
}

/// Draw the initial random-walk-model state: `h ~ N(mu_h, sigma_eta^2)`,
/// leverage factor fixed at the initial-value parameter `f0`.
pub fn init_state_rw(p: &RwLevParams, rng: &mut StreamRng) -> LatentState {
    LatentState::random_walk(p.mu_h + p.sigma_eta * rng.normal(), p.f0)
}

/// Log measurement density `log N(y; 0, e^h)`.
pub fn obs_logdensity(y: f64, h: f64) -> f64 {
    -0.5 * LN_2PI - 0.5 * h - 0.5 * y * y * (-h).exp()
}

/// Recover the return shock `eps = y exp(-h/2)`.
pub fn shock_recovery(y: f64, h: f64) -> f64 {
    y * (-0.5 * h).exp()
}

/// A simulated trajectory: observations plus the latent paths that generated them.
#[derive(Debug, Clone)]
pub struct Simulation {
    pub variant: Variant,
    pub returns: ReturnSeries,
    /// Log-volatility path, one entry per observation.
    pub h: Vec<f64>,
    /// Leverage correlation in effect at each time (constant for the fixed variant).
    pub rho: Vec<f64>,
    /// Leverage-factor path; present only for the random-walk variant.
    pub f: Option<Vec<f64>>,
}

/// Simulate `t_len` observations from either model.
///
/// The first state is drawn from the marginal law (no leverage contribution
/// at t=1, since no earlier observation exists). Deterministic given `seed`.
pub fn simulate(
    variant: Variant,
    params: &crate::params::ParamVector,
    t_len: usize,
    seed: u64,
) -> Result<Simulation> {
    if t_len < 1 {
        return Err(Error::domain("simulate requires t_len >= 1"));
    }
    let mut h = Vec::with_capacity(t_len);
    let mut rho = Vec::with_capacity(t_len);
    let mut ys = Vec::with_capacity(t_len);

    let mut init_rng = StreamRng::new(seed, StreamKind::InitState, 0, 0);
    let propagation = |t: usize, e: Error| Error::Propagation {
        t,
        reason: e.to_string(),
    };

    match variant {
        Variant::Fixed => {
            let p = params.as_fixed()?;
            let mut state = init_state_fixed(&p, &mut init_rng).h;
            for t in 0..t_len {
                if t > 0 {
                    let mut omega = StreamRng::new(seed, StreamKind::VolShock, t as u64, 0);
                    state = step_fixed(state, ys[t - 1], &p, &mut omega)
                        .map_err(|e| propagation(t + 1, e))?;
                }
                let mut eps_rng = StreamRng::new(seed, StreamKind::ReturnShock, t as u64, 0);
                ys.push((0.5 * state).exp() * eps_rng.normal());
                h.push(state);
                rho.push(p.rho);
            }
            Ok(Simulation {
                variant,
                returns: ReturnSeries::from_values(ys)?,
                h,
                rho,
                f: None,
            })
        }
        Variant::RandomWalk => {
            let p = params.as_rw()?;
            let mut f_path = Vec::with_capacity(t_len);
            let mut state = init_state_rw(&p, &mut init_rng);
            for t in 0..t_len {
                if t > 0 {
                    let mut nu = StreamRng::new(seed, StreamKind::LeverageShock, t as u64, 0);
                    let mut omega = StreamRng::new(seed, StreamKind::VolShock, t as u64, 0);
                    state = step_rw(&state, ys[t - 1], &p, &mut nu, &mut omega)
                        .map_err(|e| propagation(t + 1, e))?;
                }
                let mut eps_rng = StreamRng::new(seed, StreamKind::ReturnShock, t as u64, 0);
                ys.push((0.5 * state.h).exp() * eps_rng.normal());
                h.push(state.h);
                let f = state.f.expect("random-walk state carries f");
                f_path.push(f);
                rho.push(saturating_tanh(f));
            }
            Ok(Simulation {
                variant,
                returns: ReturnSeries::from_values(ys)?,
                h,
                rho,
                f: Some(f_path),
            })
        }
    }
}
