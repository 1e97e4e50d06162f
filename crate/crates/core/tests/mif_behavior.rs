//! Behavioral checks of iterated filtering on simulated data.

mod common;

use common::median;
use svol_core::filter::FilterOptions;
use svol_core::inference::evaluate_loglik;
use svol_core::mif::{cooling_factor, run_mif, MifConfig};
use svol_core::model::{rho_to_f, simulate, FixedLevParams, RwLevParams, Variant};
use svol_core::params::ParamVector;

#[test]
fn perturbation_schedule_strictly_decreases() {
    let alpha = 0.95;
    let mut prev = f64::INFINITY;
    for m in 1..=60 {
        let c = cooling_factor(m, alpha);
        assert!(c < prev, "m={m}");
        prev = c;
    }
    // alpha = 1 keeps the level
    assert_eq!(cooling_factor(10, 1.0), 1.0);
}

#[test]
fn final_estimate_beats_the_start() {
    let truth = FixedLevParams::new(-0.2506, 0.9805, 0.9003, -0.6579).unwrap();
    let params = ParamVector::from_fixed(&truth);
    let data = simulate(Variant::Fixed, &params, 1_000, 55)
        .unwrap()
        .returns;
    let start = ParamVector::from_fixed(&FixedLevParams::new(-0.1, 0.96, 0.7, -0.4).unwrap());

    let mut config = MifConfig::new(Variant::Fixed, 25, 400, 0.95, 4);
    config.init_sd = vec![0.05; 4];
    let trace = run_mif(Variant::Fixed, &data, &config, &start).unwrap();

    // unperturbed replicate-averaged log-likelihood at both points
    let opts = FilterOptions::default();
    let at_start = evaluate_loglik(Variant::Fixed, &start, &data, 1_000, 5, 99, &opts).unwrap();
    let at_end = evaluate_loglik(
        Variant::Fixed,
        &trace.final_params,
        &data,
        1_000,
        5,
        99,
        &opts,
    )
    .unwrap();
    assert!(
        at_end.mean >= at_start.mean,
        "final {} vs start {}",
        at_end.mean,
        at_start.mean
    );
}

#[test]
fn sigma_nu_shrinks_on_fixed_leverage_data() {
    // Fitting the random-walk model to data with constant leverage should
    // push sigma_nu below the value used in a matched random-walk world.
    let true_sigma_nu = 0.02;
    let fx = FixedLevParams::new(-0.25, 0.97, 0.9, -0.55).unwrap();
    let fx_params = ParamVector::from_fixed(&fx);
    let start = ParamVector::from_rw(
        &RwLevParams::new(-0.25, 0.96, 0.85, true_sigma_nu, rho_to_f(-0.4).unwrap()).unwrap(),
    );

    let mut fitted = Vec::new();
    for rep in 0..5u64 {
        let data = simulate(Variant::Fixed, &fx_params, 2_000, 700 + rep)
            .unwrap()
            .returns;
        let mut config = MifConfig::new(Variant::RandomWalk, 30, 300, 0.95, 31 + rep);
        config.init_sd = vec![0.05, 0.05, 0.05, 0.1, 0.1];
        let trace = run_mif(Variant::RandomWalk, &data, &config, &start).unwrap();
        fitted.push(trace.final_params.get("sigma_nu").unwrap());
    }
    let med = median(&fitted);
    assert!(
        med < true_sigma_nu,
        "median fitted sigma_nu {med} vs matched true {true_sigma_nu} ({fitted:?})"
    );
}
