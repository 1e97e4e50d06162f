//! The filter's leverage summaries must track a drifting true leverage path.

mod common;

use svol_core::filter::{run_filter, FilterOptions};
use svol_core::model::{rho_to_f, simulate, RwLevParams, Variant};
use svol_core::params::ParamVector;

#[test]
fn filtered_leverage_tracks_the_true_path() {
    let truth = RwLevParams::new(-0.25, 0.975, 0.9, 0.012, rho_to_f(-0.4).unwrap()).unwrap();
    let params = ParamVector::from_rw(&truth);
    let sim = simulate(Variant::RandomWalk, &params, 3_000, 42).unwrap();

    let result = run_filter(
        Variant::RandomWalk,
        &params,
        &sim.returns,
        5_000,
        17,
        &FilterOptions::default(),
    )
    .unwrap();

    let mae = result
        .per_time
        .iter()
        .zip(&sim.rho)
        .map(|(p, r)| (p.rho_mean - r).abs())
        .sum::<f64>()
        / sim.rho.len() as f64;
    assert!(mae < 0.15, "mean absolute leverage error {mae}");

    // quartile band ordered and inside (-1, 1) throughout
    for p in &result.per_time {
        assert!(p.rho_q1 <= p.rho_mean + 0.5 && p.rho_q3 >= p.rho_mean - 0.5);
        assert!(p.rho_q1 > -1.0 && p.rho_q3 < 1.0);
    }
}
