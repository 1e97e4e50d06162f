//! Post-estimation machinery: replicated likelihood evaluation, numerical
//! Hessian standard errors, sliced likelihoods with local quadratic
//! smoothing, AIC, and the extra-parameters equivalence measure.

use nalgebra::{DMatrix, DVector, Matrix3, Vector3};

use crate::data::ReturnSeries;
use crate::error::{Error, Result};
use crate::filter::{filter_loglik, FilterOptions, FixedSv, RwSv};
use crate::mif::{run_mif, MifConfig, MifTrace};
use crate::model::Variant;
use crate::params::ParamVector;
use crate::rng::{derive_seed, StreamKind};
use crate::special::chi2_quantile;

/// Replicate-averaged log-likelihood with its Monte Carlo standard error.
#[derive(Debug, Clone, PartialEq)]
pub struct LoglikEstimate {
    pub mean: f64,
    /// Standard error across replicates; `None` for a single replicate.
    pub mc_se: Option<f64>,
    pub replicates: usize,
    pub particles: usize,
}

/// Mean and Monte Carlo SE (`sd / sqrt(R)`) of replicate log-likelihoods.
pub fn summarize_replicates(values: &[f64]) -> (f64, Option<f64>) {
    let r = values.len();
    let mean = values.iter().sum::<f64>() / r as f64;
    if r < 2 {
        return (mean, None);
    }
    let var = values.iter().map(|v| (v - mean) * (v - mean)).sum::<f64>() / (r - 1) as f64;
    (mean, Some((var / r as f64).sqrt()))
}

/// Average `replicates` independent filter log-likelihoods at `params`.
pub fn evaluate_loglik(
    variant: Variant,
    params: &ParamVector,
    data: &ReturnSeries,
    particles: usize,
    replicates: usize,
    seed: u64,
    options: &FilterOptions,
) -> Result<LoglikEstimate> {
    if replicates < 1 {
        return Err(Error::domain("evaluate_loglik needs at least 1 replicate"));
    }
    let mut values = Vec::with_capacity(replicates);
    for r in 0..replicates {
        let rep_seed = derive_seed(seed, StreamKind::Replicate, r as u64, 0);
        let ll = match variant {
            Variant::Fixed => {
                let model = FixedSv {
                    params: params.as_fixed()?,
                };
                filter_loglik(&model, data.values(), particles, rep_seed, options)
            }
            Variant::RandomWalk => {
                let model = RwSv {
                    params: params.as_rw()?,
                };
                filter_loglik(&model, data.values(), particles, rep_seed, options)
            }
        }
        .map_err(|e| {
            if e.is_runtime() {
                Error::ReplicateFailure {
                    replicate: r,
                    source: Box::new(e),
                }
            } else {
                e
            }
        })?;
        values.push(ll);
    }
    let (mean, mc_se) = summarize_replicates(&values);
    Ok(LoglikEstimate {
        mean,
        mc_se,
        replicates,
        particles,
    })
}

/// Likelihood slice along one parameter, the others held at `theta_hat`.
#[derive(Debug, Clone)]
pub struct SliceResult {
    pub param: String,
    pub grid: Vec<f64>,
    pub points: Vec<LoglikEstimate>,
    pub smoothed: Vec<f64>,
    /// True when the smoother had to widen at least one window.
    pub widened: bool,
}

/// Evaluate the log-likelihood along `grid` for `param_name`, smoothing the
/// points with local quadratic regression. All grid points share the same
/// replicate seeds (common random numbers), which removes most of the
/// Monte Carlo wiggle between neighboring points.
#[allow(clippy::too_many_arguments)]
pub fn slice_likelihood(
    variant: Variant,
    theta_hat: &ParamVector,
    data: &ReturnSeries,
    param_name: &str,
    grid: &[f64],
    particles: usize,
    replicates: usize,
    seed: u64,
    bandwidth: Option<f64>,
    options: &FilterOptions,
) -> Result<SliceResult> {
    if grid.is_empty() {
        return Err(Error::domain("slice grid is empty"));
    }
    if grid.windows(2).any(|w| w[0] >= w[1]) {
        return Err(Error::domain("slice grid must be strictly increasing"));
    }
    let mut points = Vec::with_capacity(grid.len());
    for &g in grid {
        let params = theta_hat.with(param_name, g).map_err(|e| {
            Error::domain(format!("grid point {g} for `{param_name}` is invalid: {e}"))
        })?;
        points.push(evaluate_loglik(
            variant, &params, data, particles, replicates, seed, options,
        )?);
    }
    let (smoothed, widened) = if grid.len() >= 3 {
        let span = grid[grid.len() - 1] - grid[0];
        let bw = bandwidth.unwrap_or(0.3 * span).max(f64::MIN_POSITIVE);
        let means: Vec<f64> = points.iter().map(|p| p.mean).collect();
        local_quadratic_smooth(grid, &means, bw)?
    } else {
        (points.iter().map(|p| p.mean).collect(), false)
    };
    Ok(SliceResult {
        param: param_name.to_string(),
        grid: grid.to_vec(),
        points,
        smoothed,
        widened,
    })
}

/// Fit a weighted quadratic around each x and return the fitted values.
///
/// Windows use tricube weights within `bandwidth`; windows holding fewer
/// than 3 points widen to the 3 nearest neighbors and flag the result.
pub fn local_quadratic_smooth(xs: &[f64], ys: &[f64], bandwidth: f64) -> Result<(Vec<f64>, bool)> {
    if xs.len() != ys.len() {
        return Err(Error::domain("local_quadratic_smooth: length mismatch"));
    }
    if xs.len() < 3 {
        return Err(Error::domain(
            "local quadratic regression needs at least 3 points",
        ));
    }
    if !(bandwidth.is_finite() && bandwidth > 0.0) {
        return Err(Error::domain(format!(
            "bandwidth must be positive, got {bandwidth}"
        )));
    }
    let mut fitted = Vec::with_capacity(xs.len());
    let mut widened = false;
    for (i, &x0) in xs.iter().enumerate() {
        let mut scale = bandwidth;
        let mut in_window: Vec<usize> = (0..xs.len())
            .filter(|&j| (xs[j] - x0).abs() <= scale)
            .collect();
        if in_window.len() < 3 {
            widened = true;
            let mut by_dist: Vec<usize> = (0..xs.len()).collect();
            by_dist.sort_by(|&a, &b| {
                (xs[a] - x0)
                    .abs()
                    .partial_cmp(&(xs[b] - x0).abs())
                    .unwrap_or(std::cmp::Ordering::Equal)
            });
            in_window = by_dist[..3].to_vec();
            scale = in_window
                .iter()
                .map(|&j| (xs[j] - x0).abs())
                .fold(0.0f64, f64::max)
                * 1.5;
        }
        // weights on a slightly inflated scale so boundary points keep
        // nonzero weight
        let denom = scale * 1.000_001;
        let mut s = [0.0f64; 5]; // sums of w * dx^k, k = 0..4
        let mut sy = [0.0f64; 3]; // sums of w * dx^k * y, k = 0..2
        for &j in &in_window {
            let dx = xs[j] - x0;
            let u = (dx / denom).abs();
            let w = if u >= 1.0 {
                0.0
            } else {
                let t = 1.0 - u * u * u;
                t * t * t
            };
            let mut p = w;
            for acc in &mut s {
                *acc += p;
                p *= dx;
            }
            let mut p = w;
            for acc in &mut sy {
                *acc += p * ys[j];
                p *= dx;
            }
        }
        let normal = Matrix3::new(
            s[0], s[1], s[2], //
            s[1], s[2], s[3], //
            s[2], s[3], s[4],
        );
        let rhs = Vector3::new(sy[0], sy[1], sy[2]);
        let value = match normal.lu().solve(&rhs) {
            // centered design: the fitted value at x0 is the intercept
            Some(coef) => coef[0],
            None => {
                if s[0] > 0.0 {
                    sy[0] / s[0]
                } else {
                    ys[i]
                }
            }
        };
        fitted.push(value);
    }
    Ok((fitted, widened))
}

/// Standard errors from a numerical Hessian.
#[derive(Debug, Clone)]
pub struct SeReport {
    pub names: Vec<String>,
    /// Natural-scale estimates.
    pub estimates: Vec<f64>,
    /// Natural-scale standard errors (delta method).
    pub ses: Vec<f64>,
    /// True when -H was not positive definite and had to be projected.
    pub projected: bool,
}

/// Central-difference Hessian of `f` at `center` with per-coordinate `steps`.
pub fn central_hessian(
    f: &mut dyn FnMut(&[f64]) -> Result<f64>,
    center: &[f64],
    steps: &[f64],
) -> Result<Vec<Vec<f64>>> {
    let n = center.len();
    if steps.len() != n {
        return Err(Error::domain("one step size per coordinate required"));
    }
    if let Some(bad) = steps.iter().find(|s| !(s.is_finite() && **s > 0.0)) {
        return Err(Error::domain(format!(
            "step sizes must be positive, got {bad}"
        )));
    }
    let mut point = center.to_vec();
    let f0 = f(&point)?;
    let mut h = vec![vec![0.0; n]; n];
    for i in 0..n {
        let di = steps[i];
        point[i] = center[i] + di;
        let fp = f(&point)?;
        point[i] = center[i] - di;
        let fm = f(&point)?;
        point[i] = center[i];
        h[i][i] = (fp - 2.0 * f0 + fm) / (di * di);
        for j in (i + 1)..n {
            let dj = steps[j];
            point[i] = center[i] + di;
            point[j] = center[j] + dj;
            let fpp = f(&point)?;
            point[j] = center[j] - dj;
            let fpm = f(&point)?;
            point[i] = center[i] - di;
            let fmm = f(&point)?;
            point[j] = center[j] + dj;
            let fmp = f(&point)?;
            point[i] = center[i];
            point[j] = center[j];
            let v = (fpp - fpm - fmp + fmm) / (4.0 * di * dj);
            h[i][j] = v;
            h[j][i] = v;
        }
    }
    Ok(h)
}

/// Standard errors `sqrt(diag((-H)^-1))` from a log-likelihood Hessian.
///
/// When `-H` is not positive definite its eigenvalues are clamped to a small
/// positive floor (nearest positive-definite projection) and the flag in the
/// result is set.
pub fn ses_from_hessian(hessian: &[Vec<f64>]) -> Result<(Vec<f64>, bool)> {
    let n = hessian.len();
    let neg = DMatrix::from_fn(n, n, |i, j| -hessian[i][j]);
    let sym = (&neg + neg.transpose()) * 0.5;
    let eig = sym.symmetric_eigen();
    let max_abs = eig
        .eigenvalues
        .iter()
        .fold(0.0f64, |acc, &v| acc.max(v.abs()))
        .max(1.0);
    // caps the condition number of the projected matrix at 1e6
    let floor = 1e-6 * max_abs;
    let mut projected = false;
    let clamped: DVector<f64> = eig.eigenvalues.map(|v| {
        if v <= floor {
            projected = true;
            floor
        } else {
            v
        }
    });
    let mut ses = Vec::with_capacity(n);
    for i in 0..n {
        // diag of Q diag(1/lambda) Q^T
        let mut acc = 0.0;
        for k in 0..n {
            let q = eig.eigenvectors[(i, k)];
            acc += q * q / clamped[k];
        }
        ses.push(acc.sqrt());
    }
    Ok((ses, projected))
}

/// Numerical-Hessian standard errors of the model parameters at `theta_hat`.
///
/// The Hessian is taken on the estimation scale with central differences;
/// every stencil point reuses the same replicate seeds (common random
/// numbers) so Monte Carlo noise largely cancels in the differences. SEs are
/// mapped back to the natural scale by the delta method.
#[allow(clippy::too_many_arguments)]
pub fn numerical_se(
    variant: Variant,
    theta_hat: &ParamVector,
    data: &ReturnSeries,
    particles: usize,
    steps: &[f64],
    replicates: usize,
    seed: u64,
    options: &FilterOptions,
) -> Result<SeReport> {
    let specs = theta_hat.specs();
    let center = theta_hat.to_estimation()?;
    let steps = if steps.len() == 1 {
        vec![steps[0]; center.len()]
    } else {
        steps.to_vec()
    };
    let mut eval = |u: &[f64]| -> Result<f64> {
        let params = ParamVector::from_estimation(variant, u)?;
        Ok(evaluate_loglik(variant, &params, data, particles, replicates, seed, options)?.mean)
    };
    let hessian = central_hessian(&mut eval, &center, &steps)?;
    let (est_ses, projected) = ses_from_hessian(&hessian)?;
    let ses = est_ses
        .iter()
        .zip(specs.iter().zip(&center))
        .map(|(se, (spec, &u))| se * spec.transform.inverse_deriv(u).abs())
        .collect();
    Ok(SeReport {
        names: specs.iter().map(|s| s.name.to_string()).collect(),
        estimates: theta_hat.values().to_vec(),
        ses,
        projected,
    })
}

/// Akaike information criterion `2k - 2 loglik`.
pub fn aic(loglik: f64, k: usize) -> f64 {
    2.0 * k as f64 - 2.0 * loglik
}

/// Smallest number of extra parameters k >= 1 for which a likelihood-ratio
/// test at `level` would NOT call an improvement of `delta_loglik` units
/// significant: the informal model-equivalence measure.
pub fn equivalent_extra_params(delta_loglik: f64, level: f64) -> Result<usize> {
    if !(delta_loglik.is_finite() && delta_loglik > 0.0) {
        return Err(Error::domain(format!(
            "delta_loglik must be positive, got {delta_loglik}"
        )));
    }
    let stat = 2.0 * delta_loglik;
    for k in 1..=100_000 {
        if stat < chi2_quantile(1.0 - level, k)? {
            return Ok(k);
        }
    }
    Err(Error::domain(
        "equivalent_extra_params did not terminate below k = 100000",
    ))
}

/// Profile likelihood driver (experimental): re-runs iterated filtering with
/// `param_name` frozen at each grid value, then evaluates the profiled
/// log-likelihood at the per-point optimum.
pub struct ProfilePoint {
    pub value: f64,
    pub params: ParamVector,
    pub loglik: LoglikEstimate,
}

#[allow(clippy::too_many_arguments)]
pub fn profile_likelihood(
    variant: Variant,
    data: &ReturnSeries,
    theta_hat: &ParamVector,
    param_name: &str,
    grid: &[f64],
    config: &MifConfig,
    eval_particles: usize,
    eval_replicates: usize,
    options: &FilterOptions,
) -> Result<Vec<ProfilePoint>> {
    let mut out = Vec::with_capacity(grid.len());
    for (i, &g) in grid.iter().enumerate() {
        let start = theta_hat.with(param_name, g)?;
        let mut cfg = config.clone();
        cfg.frozen_names.push(param_name.to_string());
        cfg.seed = derive_seed(config.seed, StreamKind::Replicate, i as u64, 1);
        let trace: MifTrace = run_mif(variant, data, &cfg, &start)?;
        let loglik = evaluate_loglik(
            variant,
            &trace.final_params,
            data,
            eval_particles,
            eval_replicates,
            cfg.seed,
            options,
        )?;
        out.push(ProfilePoint {
            value: g,
            params: trace.final_params,
            loglik,
        });
    }
    Ok(out)
}

#[cfg(test)]
mod tests {
    use super::*;
    use crate::model::{simulate, FixedLevParams};
    use crate::rng::StreamRng;

    #[test]
    fn replicate_summary_two_point_example() {
        let (mean, se) = summarize_replicates(&[-8416.40, -8416.48]);
        assert!((mean - (-8416.44)).abs() < 1e-9);
        assert!((se.unwrap() - 0.04).abs() < 1e-9);
        let (mean, se) = summarize_replicates(&[-100.0]);
        assert_eq!(mean, -100.0);
        assert!(se.is_none());
    }

    fn test_setup() -> (ParamVector, ReturnSeries) {
        let p = FixedLevParams::new(-0.3, 0.96, 0.9, -0.5).unwrap();
        let params = ParamVector::from_fixed(&p);
        let data = simulate(Variant::Fixed, &params, 120, 17).unwrap().returns;
        (params, data)
    }

    #[test]
    fn evaluate_loglik_basics() {
        let (params, data) = test_setup();
        let opts = FilterOptions::default();
        let single = evaluate_loglik(Variant::Fixed, &params, &data, 200, 1, 3, &opts).unwrap();
        assert!(single.mc_se.is_none());
        assert_eq!(single.replicates, 1);
        let multi = evaluate_loglik(Variant::Fixed, &params, &data, 200, 4, 3, &opts).unwrap();
        assert!(multi.mc_se.unwrap() > 0.0);
        assert_eq!(multi.particles, 200);
        // replicate 0 shares the seed derivation, so the single run is one
        // of the replicates entering the average
        assert!((multi.mean - single.mean).abs() < 3.0);
        assert!(evaluate_loglik(Variant::Fixed, &params, &data, 200, 0, 3, &opts).is_err());
    }

    #[test]
    fn evaluate_loglik_mean_invariant_to_replicate_order() {
        // replicates are keyed by index, so the set of values (and hence the
        // mean) does not depend on evaluation order; spot-check determinism
        let (params, data) = test_setup();
        let opts = FilterOptions::default();
        let a = evaluate_loglik(Variant::Fixed, &params, &data, 150, 3, 11, &opts).unwrap();
        let b = evaluate_loglik(Variant::Fixed, &params, &data, 150, 3, 11, &opts).unwrap();
        assert_eq!(a.mean, b.mean);
        assert_eq!(a.mc_se, b.mc_se);
    }

    #[test]
    fn replicate_summary_is_permutation_invariant() {
        // permuting which replicate got which seed cannot change the
        // estimate: mean and mc_se are symmetric in the replicate values
        let values = [-101.2, -100.7, -101.9, -100.9];
        let permuted = [-100.9, -101.9, -100.7, -101.2];
        let (m1, s1) = summarize_replicates(&values);
        let (m2, s2) = summarize_replicates(&permuted);
        assert!((m1 - m2).abs() < 1e-12);
        assert!((s1.unwrap() - s2.unwrap()).abs() < 1e-12);
    }

    #[test]
    fn smoother_reproduces_quadratics() {
        let xs: Vec<f64> = (0..21).map(|i| -1.0 + 0.1 * i as f64).collect();
        let ys: Vec<f64> = xs.iter().map(|x| 2.0 * x * x - x + 3.0).collect();
        let (fit, widened) = local_quadratic_smooth(&xs, &ys, 0.5).unwrap();
        assert!(!widened);
        for (f, y) in fit.iter().zip(&ys) {
            assert!((f - y).abs() < 1e-8, "{f} vs {y}");
        }
    }

    #[test]
    fn smoother_preserves_constants() {
        let xs: Vec<f64> = (0..11).map(|i| i as f64).collect();
        let ys = vec![4.2; 11];
        let (fit, _) = local_quadratic_smooth(&xs, &ys, 3.0).unwrap();
        for f in fit {
            assert!((f - 4.2).abs() < 1e-10);
        }
    }

    #[test]
    fn smoother_reduces_noise() {
        let xs: Vec<f64> = (0..41).map(|i| -2.0 + 0.1 * i as f64).collect();
        let truth: Vec<f64> = xs.iter().map(|x| -1.5 * x * x + 0.4 * x).collect();
        let mut rng = StreamRng::new(5, StreamKind::Replicate, 0, 0);
        let noisy: Vec<f64> = truth.iter().map(|y| y + 0.1 * rng.normal()).collect();
        let (fit, _) = local_quadratic_smooth(&xs, &noisy, 0.8).unwrap();
        let rms = |v: &[f64]| {
            (v.iter()
                .zip(&truth)
                .map(|(a, b)| (a - b) * (a - b))
                .sum::<f64>()
                / v.len() as f64)
                .sqrt()
        };
        assert!(rms(&fit) < rms(&noisy), "{} vs {}", rms(&fit), rms(&noisy));
    }

    #[test]
    fn smoother_widens_tiny_windows_and_validates() {
        let xs = vec![0.0, 1.0, 2.0, 3.0];
        let ys = vec![1.0, 2.0, 1.5, 0.5];
        let (_, widened) = local_quadratic_smooth(&xs, &ys, 0.01).unwrap();
        assert!(widened);
        assert!(local_quadratic_smooth(&xs[..2], &ys[..2], 1.0).is_err());
        assert!(local_quadratic_smooth(&xs, &ys, 0.0).is_err());
    }

    #[test]
    fn hessian_quadratic_oracle() {
        // f(x) = -sum (x_i - a_i)^2 / (2 v_i): SEs must be sqrt(v_i).
        let a = [0.3, -1.2, 2.0];
        let v = [0.25, 4.0, 0.01];
        let mut f = |x: &[f64]| -> Result<f64> {
            Ok(-x
                .iter()
                .zip(&a)
                .zip(&v)
                .map(|((xi, ai), vi)| (xi - ai) * (xi - ai) / (2.0 * vi))
                .sum::<f64>())
        };
        for step in [1e-3, 1e-2, 1e-1] {
            let h = central_hessian(&mut f, &a, &[step; 3]).unwrap();
            let (ses, projected) = ses_from_hessian(&h).unwrap();
            assert!(!projected);
            for (se, vi) in ses.iter().zip(&v) {
                assert!(
                    (se - vi.sqrt()).abs() < 1e-6,
                    "step {step}: se {se} vs {}",
                    vi.sqrt()
                );
            }
            // separable objective: vanishing cross-derivatives
            assert!(h[0][1].abs() < 1e-6 && h[0][2].abs() < 1e-6 && h[1][2].abs() < 1e-6);
        }
    }

    #[test]
    fn hessian_projection_flags_non_pd() {
        // concave in x, convex in y: -H has a negative eigenvalue
        let mut f = |x: &[f64]| -> Result<f64> { Ok(-x[0] * x[0] + x[1] * x[1]) };
        let h = central_hessian(&mut f, &[0.0, 0.0], &[1e-2; 2]).unwrap();
        let (ses, projected) = ses_from_hessian(&h).unwrap();
        assert!(projected);
        assert!(ses.iter().all(|s| s.is_finite() && *s > 0.0));
    }

    #[test]
    fn numerical_se_on_simulated_fit_is_finite() {
        let (params, data) = test_setup();
        let report = numerical_se(
            Variant::Fixed,
            &params,
            &data,
            150,
            &[0.05],
            2,
            9,
            &FilterOptions::default(),
        )
        .unwrap();
        assert_eq!(report.names, vec!["mu_h", "phi", "sigma_eta", "rho"]);
        assert!(report.ses.iter().all(|s| s.is_finite() && *s > 0.0));
        assert_eq!(report.estimates, params.values());
    }

    #[test]
    fn slice_single_point_matches_eval() {
        let (params, data) = test_setup();
        let opts = FilterOptions::default();
        let slice = slice_likelihood(
            Variant::Fixed,
            &params,
            &data,
            "sigma_eta",
            &[0.9],
            200,
            2,
            21,
            None,
            &opts,
        )
        .unwrap();
        let direct = evaluate_loglik(Variant::Fixed, &params, &data, 200, 2, 21, &opts).unwrap();
        assert!((slice.points[0].mean - direct.mean).abs() < 1e-9);
        assert_eq!(slice.smoothed.len(), 1);
    }

    #[test]
    fn slice_validates_grid() {
        let (params, data) = test_setup();
        let opts = FilterOptions::default();
        assert!(slice_likelihood(
            Variant::Fixed,
            &params,
            &data,
            "sigma_eta",
            &[],
            50,
            1,
            0,
            None,
            &opts
        )
        .is_err());
        assert!(slice_likelihood(
            Variant::Fixed,
            &params,
            &data,
            "sigma_eta",
            &[0.9, 0.8],
            50,
            1,
            0,
            None,
            &opts
        )
        .is_err());
        // grid point outside the domain names the point
        let err = slice_likelihood(
            Variant::Fixed,
            &params,
            &data,
            "phi",
            &[0.5, 1.5],
            50,
            1,
            0,
            None,
            &opts,
        )
        .unwrap_err();
        assert!(err.to_string().contains("1.5"), "{err}");
    }

    #[test]
    fn aic_examples() {
        assert!((aic(-8416.44, 4) - 16840.88).abs() < 1e-9);
        let rw = aic(-8409.06, 4);
        assert!((rw - 16826.12).abs() < 1e-9);
        assert!(rw < aic(-8416.44, 4));
        assert_eq!(aic(0.0, 0), 0.0);
    }

    #[test]
    fn equivalent_extra_params_examples() {
        assert_eq!(equivalent_extra_params(6.78, 0.05).unwrap(), 7);
        assert_eq!(equivalent_extra_params(0.1, 0.05).unwrap(), 1);
        assert_eq!(equivalent_extra_params(2.0, 0.05).unwrap(), 2);
        assert!(equivalent_extra_params(0.0, 0.05).is_err());
        assert!(equivalent_extra_params(-1.0, 0.05).is_err());
    }

    #[test]
    fn equivalent_extra_params_nondecreasing() {
        let mut prev = 0usize;
        for i in 1..60 {
            let delta = 0.25 * i as f64;
            let k = equivalent_extra_params(delta, 0.05).unwrap();
            assert!(k >= prev, "delta {delta}: {k} < {prev}");
            prev = k;
        }
    }
}
