//! Shared test harness: a linear-Gaussian local-level model with an exact
//! Kalman-filter likelihood, used as an independent oracle for the particle
//! filter.
//!
//! Not every test target uses every helper.
#![allow(dead_code)]

use svol_core::error::Result;
use svol_core::filter::{ParticleStats, StateSpace, StepRngs};
use svol_core::rng::{StreamKind, StreamRng};

const LN_2PI: f64 = 1.837_877_066_409_345_3;

/// Local-level model: x_t = x_{t-1} + q_sd w_t, y_t = x_t + r_sd v_t,
/// x_1 ~ N(m0, p0_sd^2).
#[derive(Debug, Clone)]
pub struct LocalLevel {
    pub m0: f64,
    pub p0_sd: f64,
    pub q_sd: f64,
    pub r_sd: f64,
}

impl StateSpace for LocalLevel {
    type State = f64;

    fn init(&self, rng: &mut StreamRng) -> f64 {
        self.m0 + self.p0_sd * rng.normal()
    }

    fn step(&self, prev: &f64, _y_prev: f64, rngs: &mut StepRngs) -> Result<f64> {
        Ok(prev + self.q_sd * rngs.vol.normal())
    }

    fn log_obs(&self, y: f64, state: &f64) -> f64 {
        let r2 = self.r_sd * self.r_sd;
        let d = y - state;
        -0.5 * (LN_2PI + r2.ln()) - 0.5 * d * d / r2
    }

    fn stats(&self, y: f64, state: &f64) -> ParticleStats {
        ParticleStats {
            h: *state,
            rho: 0.0,
            eps: y - state,
        }
    }
}

impl LocalLevel {
    /// Simulate observations from the model.
    pub fn simulate(&self, t_len: usize, seed: u64) -> Vec<f64> {
        let mut init = StreamRng::new(seed, StreamKind::InitState, 0, 0);
        let mut x = self.m0 + self.p0_sd * init.normal();
        let mut ys = Vec::with_capacity(t_len);
        for t in 0..t_len {
            if t > 0 {
                let mut w = StreamRng::new(seed, StreamKind::VolShock, t as u64, 0);
                x += self.q_sd * w.normal();
            }
            let mut v = StreamRng::new(seed, StreamKind::ReturnShock, t as u64, 0);
            ys.push(x + self.r_sd * v.normal());
        }
        ys
    }

    /// Exact log-likelihood via the Kalman filter recursion.
    pub fn kalman_loglik(&self, ys: &[f64]) -> f64 {
        let q2 = self.q_sd * self.q_sd;
        let r2 = self.r_sd * self.r_sd;
        let mut a = self.m0;
        let mut p = self.p0_sd * self.p0_sd;
        let mut loglik = 0.0;
        for (t, &y) in ys.iter().enumerate() {
            if t > 0 {
                p += q2;
            }
            let f = p + r2;
            let v = y - a;
            loglik += -0.5 * (LN_2PI + f.ln() + v * v / f);
            let k = p / f;
            a += k * v;
            p *= 1.0 - k;
        }
        loglik
    }
}

/// Sample mean and standard deviation (n - 1 denominator).
pub fn mean_sd(values: &[f64]) -> (f64, f64) {
    let n = values.len() as f64;
    let mean = values.iter().sum::<f64>() / n;
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (n - 1.0);
    (mean, var.sqrt())
}

pub fn median(values: &[f64]) -> f64 {
    let mut v = values.to_vec();
    v.sort_by(|a, b| a.partial_cmp(b).unwrap());
    let n = v.len();
    if n % 2 == 1 {
        v[n / 2]
    } else {
        0.5 * (v[n / 2 - 1] + v[n / 2])
    }
}
